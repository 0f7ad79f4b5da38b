// dissipate: experiment runner for the dissipative workbench.
#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dissipative/core/parallel.hpp"
#include "dissipative/dqc/compile.hpp"
#include "dissipative/dse/convergence.hpp"
#include "dissipative/dse/toric.hpp"
#include "dissipative/io/circuit_format.hpp"
#include "dissipative/io/hamiltonian_format.hpp"
#include "dissipative/io/mps_format.hpp"
#include "dissipative/liouville/evolve.hpp"
#include "dissipative/liouville/spectrum.hpp"
#include "dissipative/mps/preparation.hpp"
#include "dissipative/reservoir/reservoir.hpp"

namespace fs = std::filesystem;
using namespace dissipative;

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr const char* kOutEnv = "DISSIPATE_OUT_DIR";

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}
std::string num(long long x) { return std::to_string(x); }
std::string num(int x) { return std::to_string(x); }
std::string num(std::size_t x) { return std::to_string(x); }

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : path_(path), f_(path) {
    if (!f_) throw InputError("cannot write '" + path.string() + "'");
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) f_ << (i ? "," : "") << cells[i];
    f_ << '\n';
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
  std::ofstream f_;
};

struct Common {
  std::string out;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string config;
};

struct Run {
  std::string name;
  CLI::App* app = nullptr;
  Common common;
  std::vector<std::string> outputs;
  std::vector<std::pair<std::string, std::string>> summary;

  fs::path file(const std::string& stem) {
    outputs.push_back(stem);
    return fs::path(common.out) / stem;
  }
  void note(const std::string& k, const std::string& v) { summary.emplace_back(k, v); }
  void note(const std::string& k, double v) { summary.emplace_back(k, num(v)); }
};

// Seed for grid point i, independent of worker count.
Rng grid_rng(std::uint64_t seed, std::size_t i) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), static_cast<std::uint32_t>(i)};
  return Rng(seq);
}

std::string compiler_id() {
#if defined(__clang__)
  return std::string("clang ") + __clang_version__;
#elif defined(__GNUC__)
  return std::string("gcc ") + __VERSION__;
#else
  return "unknown";
#endif
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void write_summary(Run& run) {
  Csv csv(run.file(run.name + "_summary.csv"), {"key", "value"});
  for (const auto& [k, v] : run.summary) csv.row({k, v});
}

void write_manifest(const Run& run, int status, double wall) {
  std::ofstream f(fs::path(run.common.out) / "manifest.txt");
  f << "# dissipate run manifest\n";
  f << "subcommand = " << run.name << '\n';
  f << "version = " << kVersion << '\n';
  f << "eigen = " << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION << '\n';
  f << "cli11 = " << CLI11_VERSION << '\n';
  f << "compiler = " << compiler_id() << '\n';
  f << "seed = " << run.common.seed << '\n';
  f << "exit_status = " << status << '\n';
  f << "outputs =";
  for (const auto& o : run.outputs) f << ' ' << o;
  f << '\n';
  f << "timestamp = " << utc_now() << " wall_time_s=" << num(wall) << '\n';
  f << "[config]\n" << run.app->config_to_str(true, false);
}

// ---------------------------------------------------------------- dqc

struct DqcSource {
  std::string circuit;
  int qubits = 1;
  int depth = 2;
  double two_qubit_fraction = 0.5;
  std::string encoding = "direct";
  double reset_rate = 2.0;
};

void add_dqc_source(CLI::App* app, DqcSource& s) {
  app->add_option("--circuit", s.circuit, "circuit file (otherwise a random circuit)");
  app->add_option("--qubits", s.qubits, "random circuit: qubits")->check(CLI::PositiveNumber);
  app->add_option("--depth", s.depth, "random circuit: depth")->check(CLI::PositiveNumber);
  app->add_option("--two-qubit-fraction", s.two_qubit_fraction)->check(CLI::Range(0.0, 1.0));
  app->add_option("--encoding", s.encoding)->check(CLI::IsMember({"direct", "unary"}));
  app->add_option("--reset-rate", s.reset_rate)->check(CLI::PositiveNumber);
}

dqc::QuantumCircuit load_or_random(const DqcSource& s, std::uint64_t seed) {
  if (!s.circuit.empty()) return io::load_circuit(s.circuit);
  Rng rng = grid_rng(seed, 0);
  return dqc::random_circuit(s.qubits, s.depth, rng, s.two_qubit_fraction);
}

dqc::CompiledDQC compile(const dqc::QuantumCircuit& c, const DqcSource& s) {
  dqc::CompileOptions opt;
  opt.reset_rate = s.reset_rate;
  return s.encoding == "unary" ? dqc::compile_unary(c, opt) : dqc::compile_direct(c, opt);
}

DensityMatrix direct_view(const DensityMatrix& rho, const dqc::QuantumCircuit& c, const DqcSource& s) {
  return s.encoding == "unary" ? dqc::restrict_to_valid_clock(rho, c) : rho;
}

struct DqcGapArgs {
  int t_min = 1, t_max = 6, n_min = 1, n_max = 3, instances = 3;
  double two_qubit_fraction = 0.5;
  std::string encoding = "direct";
  double reset_rate = 2.0;
};

int run_dqc_gap(Run& run, const DqcGapArgs& a) {
  detail::require(a.t_min <= a.t_max && a.n_min <= a.n_max, "empty (T, N) grid");
  struct Point {
    int t, n, i;
  };
  std::vector<Point> grid;
  for (int t = a.t_min; t <= a.t_max; ++t)
    for (int n = a.n_min; n <= a.n_max; ++n)
      for (int i = 0; i < a.instances; ++i) grid.push_back({t, n, i});
  struct Result {
    double gap = 0.0;
    int steady_dim = 0;
  };
  const auto results = parallel_map(
      grid.size(),
      [&](std::size_t k) {
        Rng rng = grid_rng(run.common.seed, k);
        const auto c = dqc::random_circuit(grid[k].n, grid[k].t, rng, a.two_qubit_fraction);
        DqcSource s;
        s.encoding = a.encoding;
        s.reset_rate = a.reset_rate;
        const auto rep = spectral_gap(dqc::generator(compile(c, s)));
        return Result{rep.gap, rep.steady_dim};
      },
      run.common.threads);
  Csv csv(run.file("dqc-gap.csv"), {"T", "N", "instance", "numeric_gap", "closed_form_gap", "abs_error", "steady_dim"});
  double worst = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double cf = dqc::closed_form_gap(grid[k].t);
    const double err = std::abs(results[k].gap - cf);
    worst = std::max(worst, err);
    csv.row({num(grid[k].t), num(grid[k].n), num(grid[k].i), num(results[k].gap), num(cf), num(err), num(results[k].steady_dim)});
  }
  run.note("points", static_cast<double>(grid.size()));
  run.note("max_abs_error", worst);
  return 0;
}

struct DqcRunArgs {
  DqcSource src;
  double horizon = 0.0;
  int samples = 50;
};

int run_dqc_run(Run& run, const DqcRunArgs& a) {
  const auto c = load_or_random(a.src, run.common.seed);
  const auto compiled = compile(c, a.src);
  const auto gen = dqc::generator(compiled);
  const auto space = steady_space(gen);
  if (space.states.empty()) throw NumericalError("generator has no steady state");
  const DensityMatrix ss = direct_view(space.states.front(), c, a.src);
  const DensityMatrix expected = dqc::expected_fixed_point(c);
  const auto ro = dqc::readout(ss, c);
  const Vector final_state = c.history().back();

  Csv dist(run.file("dqc-run.csv"), {"t", "probability"});
  const int depth = c.depth();
  const auto dq = Eigen::Index{1} << c.n_qubits();
  for (int t = 0; t <= depth; ++t) {
    double p = 0.0;
    for (Eigen::Index s = 0; s < dq; ++s) p += ss.matrix()(s * (depth + 1) + t, s * (depth + 1) + t).real();
    dist.row({num(t), num(p)});
  }
  run.note("qubits", static_cast<double>(c.n_qubits()));
  run.note("depth", static_cast<double>(depth));
  run.note("encoding", a.src.encoding);
  run.note("steady_dim", static_cast<double>(space.dim));
  run.note("fidelity_expected_fixed_point", fidelity(ss, expected));
  run.note("p_final", ro.p_final);
  run.note("final_state_fidelity", fidelity(ro.psi_final, final_state));

  if (a.horizon > 0.0) {
    detail::require(a.samples >= 1, "--samples must be >= 1");
    Csv trace(run.file("dqc-run_trace.csv"), {"time", "trace_distance", "p_final"});
    const auto full_sys = compiled.model.system;
    const Eigen::Index dim = static_cast<Eigen::Index>(full_sys.total_dim());
    // Start in |0...0> with the clock at t = 0.
    Matrix rho0 = Matrix::Zero(dim, dim);
    if (a.src.encoding == "unary") {
      const Matrix v = dqc::unary_embedding(c.n_qubits(), depth);
      rho0 = v.col(0) * v.col(0).adjoint();
    } else {
      rho0(0, 0) = 1.0;
    }
    const Propagator step(gen, a.horizon / a.samples);
    Matrix x = rho0;
    for (int i = 0; i <= a.samples; ++i) {
      if (i > 0) x = step.apply(x);
      const DensityMatrix cur(Operator(0.5 * (x + x.adjoint()), full_sys), DensityMatrix::Trusted{});
      const DensityMatrix view = direct_view(cur, c, a.src);
      double p = 0.0;
      for (Eigen::Index s = 0; s < dq; ++s) p += view.matrix()(s * (depth + 1) + depth, s * (depth + 1) + depth).real();
      trace.row({num(a.horizon * i / a.samples), num(trace_distance(cur, space.states.front())), num(p)});
    }
  }
  return 0;
}

int run_dqc_spectrum(Run& run, const DqcSource& src) {
  const auto c = load_or_random(src, run.common.seed);
  const auto gen = dqc::generator(compile(c, src));
  const auto ev = sorted_eigenvalues(gen.matrix());
  Csv csv(run.file("dqc-spectrum.csv"), {"index", "re", "im"});
  for (std::size_t i = 0; i < ev.size(); ++i) csv.row({num(i), num(ev[i].real()), num(ev[i].imag())});
  const auto rep = spectral_gap(gen);
  run.note("gap", rep.gap);
  run.note("closed_form_gap", dqc::closed_form_gap(c.depth()));
  run.note("steady_dim", static_cast<double>(rep.steady_dim));
  return 0;
}

// ---------------------------------------------------------------- dse

dse::FrustrationFreeHamiltonian preset_hamiltonian(const std::string& p) {
  if (p.rfind("cluster", 0) == 0) {
    const std::string n = p.substr(7);
    if (n.empty() || n.find_first_not_of("0123456789") != std::string::npos) throw InputError("preset: expected cluster<N>, got '" + p + "'");
    return dse::cluster_chain(std::stoi(n));
  }
  if (p == "toric") return dse::toric_code(2, 2);
  throw InputError("unknown preset '" + p + "' (cluster<N> or toric)");
}

dse::CorrectionSet corrections_for(const dse::FrustrationFreeHamiltonian& h, const std::string& kind) {
  if (kind == "depolarizing") return dse::CorrectionSet::depolarizing(h.size());
  if (kind == "first") return dse::first_site_corrections(h);
  return dse::all_site_corrections(h);
}

struct DseArgs {
  std::string preset = "cluster3";
  std::string hamiltonian;
  std::string corrections = "depolarizing";
  int steps = 500;
  double tol = 1e-6;
  std::string input = "mixed";
  int q_samples = 0;
};

DensityMatrix initial_state(const SiteSystem& sys, const std::string& kind, Rng& rng) {
  if (kind == "mixed") return DensityMatrix::maximally_mixed(sys);
  if (kind == "random-pure") return DensityMatrix::from_pure(random_pure(static_cast<Eigen::Index>(sys.total_dim()), rng), sys);
  return random_density(sys, rng);
}

int run_dse(Run& run, const DseArgs& a) {
  const auto h = a.hamiltonian.empty() ? preset_hamiltonian(a.preset) : io::load_hamiltonian(a.hamiltonian);
  const auto rep = dse::validate(h);
  if (!rep.frustration_free) throw NumericalError("Hamiltonian is not frustration free (min eigenvalue " + num(rep.min_eigenvalue) + ")");
  const auto ch = dse::dse_channel(h, corrections_for(h, a.corrections));
  Rng rng = grid_rng(run.common.seed, 0);
  const auto tr = dse::run_to_convergence(ch, h, initial_state(h.system(), a.input, rng), a.tol, a.steps);
  Csv csv(run.file("dse-run.csv"), {"step", "energy", "overlap", "trace_distance_step"});
  for (const auto& r : tr.records) csv.row({num(r.step), num(r.energy), num(r.overlap), std::isnan(r.distance) ? "" : num(r.distance)});
  run.note("ground_dim", static_cast<double>(rep.ground_dim));
  run.note("commuting", rep.commuting ? "true" : "false");
  run.note("converged", tr.converged ? "true" : "false");
  run.note("steps", static_cast<double>(tr.steps));
  run.note("final_energy", tr.records.back().energy);
  run.note("final_overlap", tr.records.back().overlap);
  if (a.q_samples > 0) run.note("q_estimate", dse::estimate_q(ch, h, a.q_samples, run.common.seed));
  return 0;
}

std::vector<std::pair<int, int>> parse_edges(const std::string& text) {
  std::vector<std::pair<int, int>> edges;
  std::string tok;
  std::stringstream ss(text);
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    const auto dash = tok.find('-');
    if (dash == std::string::npos) throw InputError("--edges: expected a-b, got '" + tok + "'");
    edges.emplace_back(io::parse_int(tok.substr(0, dash), 0), io::parse_int(tok.substr(dash + 1), 0));
  }
  return edges;
}

struct GraphArgs {
  int vertices = 3;
  std::string edges = "0-1,1-2";
};

int run_graph_state(Run& run, const GraphArgs& a) {
  const dse::GraphSpec g(a.vertices, parse_edges(a.edges));
  const auto gen = assemble_generator(dse::graph_liouvillian(g));
  auto ev = eigenvalues(gen.matrix());
  auto pred = dse::graph_spectrum_prediction(g);
  auto by_real = [](cplx x, cplx y) { return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag(); };
  std::sort(ev.begin(), ev.end(), by_real);
  std::sort(pred.begin(), pred.end(), by_real);
  Csv csv(run.file("graph-state.csv"), {"index", "re", "im", "predicted_re", "predicted_im"});
  double worst = 0.0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    worst = std::max(worst, std::abs(ev[i] - pred[i]));
    csv.row({num(i), num(ev[i].real()), num(ev[i].imag()), num(pred[i].real()), num(pred[i].imag())});
  }
  const auto st = steady_states(gen);
  run.note("max_spectrum_error", worst);
  run.note("steady_dim", static_cast<double>(st.size()));
  run.note("graph_state_fidelity", fidelity(st.front(), dse::graph_state(g)));
  return 0;
}

struct ToricArgs {
  int lx = 2, ly = 2;
  int inputs = 20;
  int steps = 5000;
  double tol = 1e-6;
  std::string corrections = "all";
};

int run_toric(Run& run, const ToricArgs& a) {
  const auto h = dse::toric_code(a.lx, a.ly);
  const auto rep = dse::validate(h);
  const auto ch = dse::dse_channel(h, corrections_for(h, a.corrections));
  const Matrix psi = h.ground_projector();
  dse::ConvergenceOptions opt;
  opt.track_distance = false;
  opt.ground_projector = &psi;
  const auto traces = parallel_map(
      static_cast<std::size_t>(a.inputs),
      [&](std::size_t i) {
        Rng rng = grid_rng(run.common.seed, i);
        const auto rho0 = DensityMatrix::from_pure(random_pure(static_cast<Eigen::Index>(h.system().total_dim()), rng), h.system());
        return dse::run_to_convergence(ch, h, rho0, a.tol, a.steps, opt);
      },
      run.common.threads);
  Csv csv(run.file("toric-run.csv"), {"input", "steps", "converged", "final_energy", "final_overlap"});
  double worst_e = 0.0, worst_o = 1.0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& last = traces[i].records.back();
    worst_e = std::max(worst_e, last.energy);
    worst_o = std::min(worst_o, last.overlap);
    csv.row({num(i), num(traces[i].steps), traces[i].converged ? "1" : "0", num(last.energy), num(last.overlap)});
  }
  if (!traces.empty()) {
    Csv trace(run.file("toric-run_trace.csv"), {"step", "energy", "overlap"});
    for (const auto& r : traces.front().records) trace.row({num(r.step), num(r.energy), num(r.overlap)});
  }
  run.note("ground_dim", static_cast<double>(rep.ground_dim));
  run.note("max_final_energy", worst_e);
  run.note("min_final_overlap", worst_o);
  return 0;
}

// ---------------------------------------------------------------- mps

struct MpsArgs {
  std::string mps;
  std::string preset = "aklt";
  int sites = 4;
  double C = 50.0;
  long long steps = -1;
  long long record_every = 100;
  std::string mode = "auto";
  int trajectories = 200;
};

int run_mps(Run& run, const MpsArgs& a) {
  mps::MatrixProductState m;
  if (!a.mps.empty()) {
    m = io::load_mps(a.mps);
  } else if (a.preset == "aklt") {
    m = mps::aklt(a.sites);
  } else if (a.preset == "ghz") {
    m = mps::ghz(a.sites);
  } else if (a.preset == "w") {
    m = mps::w_like(a.sites);
  } else {
    throw InputError("unknown MPS preset '" + a.preset + "'");
  }
  const auto target = mps::make_target(m);
  const mps::ScheduleParams p(a.C, m.n_sites);
  mps::PreparationOptions opt;
  opt.max_steps = a.steps;
  opt.record_every = a.record_every;
  opt.mode = a.mode == "deterministic" ? mps::IterationMode::deterministic
             : a.mode == "stochastic"  ? mps::IterationMode::stochastic
                                       : mps::IterationMode::automatic;
  opt.trajectories = a.trajectories;
  opt.seed = run.common.seed;
  const auto res = mps::prepare(target, p, opt);
  std::vector<std::string> header{"step", "fidelity", "fidelity_stderr"};
  for (int r = 1; r <= p.levels() + 1; ++r) header.push_back("mu_" + std::to_string(r));
  Csv csv(run.file("mps-prepare.csv"), header);
  for (const auto& rec : res.records) {
    std::vector<std::string> row{num(rec.step), num(rec.fidelity), num(rec.fidelity_stderr)};
    for (double mu : rec.mu) row.push_back(num(mu));
    csv.row(row);
  }
  const auto psi = DensityMatrix::from_pure(target.psi, target.system);
  run.note("N", static_cast<double>(m.n_sites));
  run.note("C", a.C);
  run.note("step_budget", static_cast<double>(p.step_budget()));
  run.note("steps", static_cast<double>(res.steps));
  run.note("stochastic", res.stochastic ? "true" : "false");
  run.note("final_fidelity", res.final_fidelity);
  run.note("fixed_point_distance", trace_distance(mps::channel_T(target, p).apply(psi), psi));
  return 0;
}

// ---------------------------------------------------------------- reservoir

struct ReservoirArgs {
  std::string target = "sigma-minus";
  double omega = 1.0;
  std::vector<double> ratios{10.0, 30.0, 100.0};
};

int run_reservoir(Run& run, const ReservoirArgs& a) {
  Matrix l;
  if (a.target == "sigma-minus") {
    l = gates::lowering();
  } else if (a.target == "sigma-plus") {
    l = gates::raising();
  } else if (a.target == "random") {
    Rng rng = grid_rng(run.common.seed, 0);
    l = random_ginibre(2, 2, rng) / 2.0;
  } else {
    throw InputError("unknown reservoir target '" + a.target + "'");
  }
  const Operator target(l, SiteSystem::qubits(1));
  for (double r : a.ratios)
    if (r < 1.0) std::cerr << "warning: Gamma/Omega = " << r << " is outside the elimination regime\n";
  const auto sweep = reservoir::elimination_sweep(target, a.omega, a.ratios, {}, run.common.threads);
  Csv csv(run.file("reservoir-check.csv"),
          {"omega", "gamma", "fitted_rate", "rate_constant", "horizon", "max_trace_distance", "steady_state_distance"});
  for (const auto& p : sweep.points)
    csv.row({num(p.omega), num(p.gamma), num(p.fitted_rate), num(p.rate_constant), num(p.horizon), num(p.max_trace_distance),
             num(p.steady_state_distance)});
  run.note("exponent", sweep.exponent);
  run.note("mismatch_decreasing", sweep.mismatch_decreasing ? "true" : "false");
  return 0;
}

// ---------------------------------------------------------------- validate

struct ValidateArgs {
  std::string circuit, hamiltonian, mps;
};

int run_validate(Run& run, const ValidateArgs& a) {
  const int given = !a.circuit.empty() + !a.hamiltonian.empty() + !a.mps.empty();
  if (given != 1) throw InputError("validate: give exactly one of --circuit, --hamiltonian, --mps");
  int status = 0;
  if (!a.circuit.empty()) {
    const auto c = io::load_circuit(a.circuit);
    run.note("kind", "circuit");
    run.note("qubits", static_cast<double>(c.n_qubits()));
    run.note("depth", static_cast<double>(c.depth()));
  } else if (!a.hamiltonian.empty()) {
    const auto h = io::load_hamiltonian(a.hamiltonian);
    const auto rep = dse::validate(h);
    run.note("kind", "hamiltonian");
    run.note("terms", static_cast<double>(h.size()));
    run.note("min_eigenvalue", rep.min_eigenvalue);
    run.note("ground_dim", static_cast<double>(rep.ground_dim));
    run.note("frustration_free", rep.frustration_free ? "true" : "false");
    run.note("commuting", rep.commuting ? "true" : "false");
    if (!rep.frustration_free) status = 1;
  } else {
    const auto m = io::load_mps(a.mps);
    run.note("kind", "mps");
    run.note("d", static_cast<double>(m.d));
    run.note("D", static_cast<double>(m.D));
    run.note("N", static_cast<double>(m.n_sites));
    const bool inj = mps::is_injective(m);
    run.note("injective", inj ? "true" : "false");
    if (inj) {
      const auto rep = dse::validate(mps::parent_hamiltonian(m));
      run.note("parent_ground_dim", static_cast<double>(rep.ground_dim));
      run.note("parent_frustration_free", rep.frustration_free ? "true" : "false");
    }
  }
  for (const auto& [k, v] : run.summary) std::cout << k << " = " << v << '\n';
  return status;
}

// ---------------------------------------------------------------- config

// `key = value` lines (INI-style `[section]` headers and '#' comments ignored)
// turned into `--key value`; appended after the command line so they win.
std::vector<std::string> config_args(const std::string& path, const CLI::App* sub) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open config file '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  int number = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  while (std::getline(f, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw io::ParseError(number, "config: expected 'key = value'");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key == "config") throw io::ParseError(number, "config: field 'config' may not nest");
    if (sub->get_option_no_throw("--" + key) == nullptr) throw io::ParseError(number, "config: unknown field '" + key + "'");
    out.push_back("--" + key);
    out.push_back(value);
  }
  return out;
}

std::string find_config(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("dissipate: dissipative quantum computation and state engineering workbench");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Common common;
  const char* env_out = std::getenv(kOutEnv);
  const std::string default_out = env_out && *env_out ? env_out : ".";
  auto add_common = [&](CLI::App* s) {
    common.out = default_out;
    s->add_option("--out", common.out, std::string("output directory (default $") + kOutEnv + " or .)");
    s->add_option("--seed", common.seed, "random seed");
    s->add_option("--threads", common.threads, "worker threads (0: all cores)");
    s->add_option("--config", common.config, "config file; its values override flags");
  };

  DqcGapArgs gap;
  auto* s_gap = app.add_subcommand("dqc-gap", "numeric vs closed-form DQC gap over a (T, N) grid");
  s_gap->add_option("--t-min", gap.t_min)->check(CLI::PositiveNumber);
  s_gap->add_option("--t-max", gap.t_max)->check(CLI::PositiveNumber);
  s_gap->add_option("--n-min", gap.n_min)->check(CLI::PositiveNumber);
  s_gap->add_option("--n-max", gap.n_max)->check(CLI::PositiveNumber);
  s_gap->add_option("--instances", gap.instances)->check(CLI::PositiveNumber);
  s_gap->add_option("--two-qubit-fraction", gap.two_qubit_fraction)->check(CLI::Range(0.0, 1.0));
  s_gap->add_option("--encoding", gap.encoding)->check(CLI::IsMember({"direct", "unary"}));
  s_gap->add_option("--reset-rate", gap.reset_rate)->check(CLI::PositiveNumber);
  add_common(s_gap);

  DqcRunArgs drun;
  auto* s_run = app.add_subcommand("dqc-run", "steady state and readout of a compiled circuit");
  add_dqc_source(s_run, drun.src);
  s_run->add_option("--horizon", drun.horizon, "also evolve from |0>|t=0> up to this time");
  s_run->add_option("--samples", drun.samples)->check(CLI::PositiveNumber);
  add_common(s_run);

  DqcSource dspec;
  auto* s_spec = app.add_subcommand("dqc-spectrum", "full generator spectrum of a compiled circuit");
  add_dqc_source(s_spec, dspec);
  add_common(s_spec);

  DseArgs dse_a;
  auto* s_dse = app.add_subcommand("dse-run", "iterate a state-engineering channel to the ground space");
  s_dse->add_option("--preset", dse_a.preset, "cluster<N> or toric");
  s_dse->add_option("--hamiltonian", dse_a.hamiltonian, "Hamiltonian file (overrides --preset)");
  s_dse->add_option("--corrections", dse_a.corrections)->check(CLI::IsMember({"depolarizing", "first", "all"}));
  s_dse->add_option("--steps", dse_a.steps)->check(CLI::NonNegativeNumber);
  s_dse->add_option("--tol", dse_a.tol)->check(CLI::PositiveNumber);
  s_dse->add_option("--input", dse_a.input)->check(CLI::IsMember({"mixed", "random-pure", "random-mixed"}));
  s_dse->add_option("--q-samples", dse_a.q_samples)->check(CLI::NonNegativeNumber);
  add_common(s_dse);

  GraphArgs graph;
  auto* s_graph = app.add_subcommand("graph-state", "graph-state Liouvillian spectrum and steady state");
  s_graph->add_option("--vertices", graph.vertices)->check(CLI::PositiveNumber);
  s_graph->add_option("--edges", graph.edges, "comma separated a-b pairs");
  add_common(s_graph);

  ToricArgs toric;
  auto* s_toric = app.add_subcommand("toric-run", "toric-code stabilizer-correction channel from random inputs");
  s_toric->add_option("--lx", toric.lx);
  s_toric->add_option("--ly", toric.ly);
  s_toric->add_option("--inputs", toric.inputs)->check(CLI::PositiveNumber);
  s_toric->add_option("--steps", toric.steps)->check(CLI::NonNegativeNumber);
  s_toric->add_option("--tol", toric.tol)->check(CLI::PositiveNumber);
  s_toric->add_option("--corrections", toric.corrections)->check(CLI::IsMember({"depolarizing", "first", "all"}));
  add_common(s_toric);

  MpsArgs mps_a;
  auto* s_mps = app.add_subcommand("mps-prepare", "iterate the MPS preparation channel");
  s_mps->add_option("--mps", mps_a.mps, "MPS file (overrides --preset)");
  s_mps->add_option("--preset", mps_a.preset)->check(CLI::IsMember({"aklt", "ghz", "w"}));
  s_mps->add_option("--sites", mps_a.sites)->check(CLI::PositiveNumber);
  s_mps->add_option("--C", mps_a.C)->check(CLI::PositiveNumber);
  s_mps->add_option("--steps", mps_a.steps, "default: schedule budget");
  s_mps->add_option("--record-every", mps_a.record_every)->check(CLI::PositiveNumber);
  s_mps->add_option("--mode", mps_a.mode)->check(CLI::IsMember({"auto", "deterministic", "stochastic"}));
  s_mps->add_option("--trajectories", mps_a.trajectories)->check(CLI::PositiveNumber);
  add_common(s_mps);

  ReservoirArgs res_a;
  auto* s_res = app.add_subcommand("reservoir-check", "ancilla embedding and adiabatic-elimination sweep");
  s_res->add_option("--target", res_a.target)->check(CLI::IsMember({"sigma-minus", "sigma-plus", "random"}));
  s_res->add_option("--omega", res_a.omega)->check(CLI::PositiveNumber);
  s_res->add_option("--ratios", res_a.ratios, "Gamma/Omega grid")->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  add_common(s_res);

  ValidateArgs val;
  auto* s_val = app.add_subcommand("validate", "parse and check an input file");
  s_val->add_option("--circuit", val.circuit);
  s_val->add_option("--hamiltonian", val.hamiltonian);
  s_val->add_option("--mps", val.mps);
  add_common(s_val);

  // Config values are appended after the command line; with take-last they win.
  std::vector<std::string> args(argv, argv + argc);
  const std::string cfg_name = find_config(argc, argv);
  try {
    const std::string& cfg = cfg_name;
    if (!cfg.empty() && argc > 1) {
      const CLI::App* sub = app.get_subcommand_no_throw(argv[1]);
      if (sub == nullptr) throw InputError("--config needs a subcommand first");
      auto extra = config_args(cfg, sub);
      if (sub == s_res) {
        // ratios accumulate; a config value replaces the command-line grid.
        for (std::size_t i = 0; i < extra.size(); i += 2)
          if (extra[i] == "--ratios") {
            for (std::size_t j = 1; j + 1 < args.size(); ++j)
              if (args[j] == "--ratios") args.erase(args.begin() + static_cast<long>(j), args.begin() + static_cast<long>(j) + 2);
          }
      }
      args.insert(args.end(), extra.begin(), extra.end());
    }
  } catch (const io::ParseError& e) {
    std::cerr << "error: " << cfg_name << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  std::vector<char*> cargs;
  for (auto& a : args) cargs.push_back(a.data());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  Run run;
  run.common = common;
  for (auto* s : app.get_subcommands()) {
    run.name = s->get_name();
    run.app = s;
  }
  const auto start = std::chrono::steady_clock::now();
  int status = 0;
  try {
    fs::create_directories(run.common.out);
    if (run.name == "dqc-gap") status = run_dqc_gap(run, gap);
    else if (run.name == "dqc-run") status = run_dqc_run(run, drun);
    else if (run.name == "dqc-spectrum") status = run_dqc_spectrum(run, dspec);
    else if (run.name == "dse-run") status = run_dse(run, dse_a);
    else if (run.name == "graph-state") status = run_graph_state(run, graph);
    else if (run.name == "toric-run") status = run_toric(run, toric);
    else if (run.name == "mps-prepare") status = run_mps(run, mps_a);
    else if (run.name == "reservoir-check") status = run_reservoir(run, res_a);
    else if (run.name == "validate") status = run_validate(run, val);
    write_summary(run);
  } catch (const io::ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    status = 2;
  } catch (const BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    status = 3;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    status = 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    status = 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    status = 2;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    write_manifest(run, status, wall);
  } catch (const std::exception& e) {
    std::cerr << "warning: could not write manifest: " << e.what() << '\n';
  }
  return status;
}
