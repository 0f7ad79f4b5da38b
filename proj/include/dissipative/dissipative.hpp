#pragma once

// Everything.
#include "dissipative/core/gates.hpp"
#include "dissipative/core/local_action.hpp"
#include "dissipative/core/operator.hpp"
#include "dissipative/core/ops.hpp"
#include "dissipative/core/parallel.hpp"
#include "dissipative/core/random.hpp"
#include "dissipative/core/site_system.hpp"
#include "dissipative/core/types.hpp"
#include "dissipative/dqc/analytic.hpp"
#include "dissipative/dqc/circuit.hpp"
#include "dissipative/dqc/compile.hpp"
#include "dissipative/dse/channel.hpp"
#include "dissipative/dse/convergence.hpp"
#include "dissipative/dse/graph.hpp"
#include "dissipative/dse/hamiltonian.hpp"
#include "dissipative/dse/pauli.hpp"
#include "dissipative/dse/toric.hpp"
#include "dissipative/io/circuit_format.hpp"
#include "dissipative/io/hamiltonian_format.hpp"
#include "dissipative/io/mps_format.hpp"
#include "dissipative/io/text.hpp"
#include "dissipative/liouville/channel.hpp"
#include "dissipative/liouville/evolve.hpp"
#include "dissipative/liouville/spectrum.hpp"
#include "dissipative/liouville/superoperator.hpp"
#include "dissipative/mps/mps.hpp"
#include "dissipative/mps/preparation.hpp"
#include "dissipative/reservoir/reservoir.hpp"
