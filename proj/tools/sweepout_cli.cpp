// Command-line front end: sequence generation, growth checks, rotation
// solving, grid certificates, random draws and thinning.
//
// Exit codes: 0 pass, 1 verification failure, 2 usage or input error.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sweepout/io.hpp"
#include "sweepout/sweepout.hpp"

namespace {

using namespace sweepout;
using io::json;

constexpr int kPass = 0;
constexpr int kVerificationFailure = 1;
constexpr int kInputError = 2;

struct CommonOptions {
  std::string out;
  std::uint64_t seed = 42;
  unsigned threads = 1;
  long precision_cap = 4096;

  PrecisionPolicy precision() const {
    PrecisionPolicy p;
    p.cap_bits = precision_cap;
    return p;
  }
};

void add_common(CLI::App* sub, CommonOptions& c) {
  sub->add_option("--out", c.out, "Output path (stdout when omitted)");
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
  sub->add_option("--precision-cap", c.precision_cap, "Interval precision cap in bits")->check(CLI::Range(64L, 1L << 20));
}

/// Collects what a run did and writes it next to the primary output.
class Manifest {
 public:
  explicit Manifest(std::string subcommand)
      : subcommand_(std::move(subcommand)), started_(std::chrono::steady_clock::now()) {}

  json& parameters() { return params_; }
  void input(const std::string& p) { inputs_.push_back(p); }
  void output(const std::string& p) { outputs_.push_back(p); }

  void emit(const std::string& primary_out) const {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
    const std::time_t now = std::time(nullptr);
    char stamp[32] = {};
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    json m{{"subcommand", subcommand_}, {"parameters", params_},        {"inputs", inputs_},
           {"outputs", outputs_},       {"tool_version", SWEEPOUT_VERSION}, {"wall_clock_seconds", secs},
           {"finished_at", stamp}};
    if (primary_out.empty()) {
      std::cerr << m.dump(2) << "\n";
      return;
    }
    auto f = io::open_out(primary_out + ".manifest.json");
    f << m.dump(2) << "\n";
  }

 private:
  std::string subcommand_;
  std::chrono::steady_clock::time_point started_;
  json params_ = json::object();
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
};

// Writes through `fn` to `path`, or to stdout when `path` is empty.
template <class Fn>
void write_to(const std::string& path, Fn&& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  auto f = io::open_out(path);
  fn(f);
}

IntegerSequence load_sequence(const std::string& path) {
  auto in = io::open_in(path);
  return io::read_sequence(in);
}

// ---------------------------------------------------------------- gen-seq

struct GenSeqArgs {
  std::string kind;
  std::string rho = "2";
  std::string start = "1";
  std::uint64_t count = 0;
  std::string eta = "1";
  std::uint64_t n0 = 3;
};

int cmd_gen_seq(const GenSeqArgs& a, const CommonOptions& c) {
  Manifest m("gen-seq");
  m.parameters() = {{"kind", a.kind}, {"count", a.count}};
  IntegerSequence seq;
  if (a.kind == "ratio") {
    m.parameters()["rho"] = a.rho;
    m.parameters()["start"] = a.start;
    seq = generate_ratio_sequence(parse_rational(a.rho), parse_integer(a.start), a.count);
  } else if (a.kind == "paper") {
    m.parameters()["eta"] = a.eta;
    m.parameters()["n0"] = a.n0;
    m.parameters()["precision_cap"] = c.precision_cap;
    seq = generate_paper_example(parse_rational(a.eta), a.n0, a.count, c.precision());
  } else {
    throw invalid_argument("unknown sequence kind '" + a.kind + "'");
  }
  write_to(c.out, [&](std::ostream& o) { io::write_sequence(o, seq); });
  if (!c.out.empty()) m.output(c.out);
  m.emit(c.out);
  return kPass;
}

// ---------------------------------------------------------- verify-growth

struct VerifyGrowthArgs {
  std::string seq;
  std::string kind = "fixed";
  std::string rho = "2";
  std::string eta = "1";
  std::string weights = "harmonic";
  bool strict = false;
};

WeightSequence parse_weights(const std::string& spec) {
  if (spec == "harmonic") return WeightSequence::harmonic();
  if (spec.rfind("const:", 0) == 0) return WeightSequence::constant(parse_rational(spec.substr(6)));
  throw invalid_argument("weights must be 'harmonic' or 'const:<p/q>'");
}

int cmd_verify_growth(const VerifyGrowthArgs& a, const CommonOptions& c) {
  Manifest m("verify-growth");
  m.parameters() = {{"kind", a.kind}, {"rho", a.rho}, {"eta", a.eta}, {"weights", a.weights}, {"strict", a.strict}};
  m.input(a.seq);
  const IntegerSequence seq = load_sequence(a.seq);
  GrowthSpec spec;
  if (a.kind == "fixed") spec = GrowthSpec::fixed_ratio(parse_rational(a.rho));
  else if (a.kind == "lacunary") spec = GrowthSpec::lacunary(parse_rational(a.eta));
  else if (a.kind == "loglog") spec = GrowthSpec::log_log(parse_rational(a.eta));
  else if (a.kind == "weighted") spec = GrowthSpec::log_log_weighted(parse_rational(a.eta), parse_weights(a.weights));
  else throw invalid_argument("unknown growth kind '" + a.kind + "'");

  GrowthOptions opts;
  opts.strict_domain = a.strict;
  opts.precision = c.precision();
  const GrowthReport rep = verify_growth(seq, spec, opts);
  json j{{"holds", rep.holds},
         {"first_violation", rep.first_violation ? json(*rep.first_violation) : json(nullptr)},
         {"checked", rep.checked},
         {"skipped", rep.skipped}};
  write_to(c.out, [&](std::ostream& o) { o << j.dump(2) << "\n"; });
  if (!c.out.empty()) m.output(c.out);
  m.emit(c.out);
  return rep.holds ? kPass : kVerificationFailure;
}

// --------------------------------------------------------- solve-rotation

struct SolveRotationArgs {
  std::string constraints;
  std::uint64_t q = 2;
  std::string trace;
};

int cmd_solve_rotation(const SolveRotationArgs& a, const CommonOptions& c) {
  Manifest m("solve-rotation");
  m.parameters() = {{"Q", a.q}};
  m.input(a.constraints);
  auto in = io::open_in(a.constraints);
  const auto constraints = io::read_constraints(in);
  const RotationSolution sol = solve_rotation_traced(constraints, a.q);
  const bool ok = verify_rotation(sol.r, constraints, a.q);
  json j{{"r", to_fraction_string(sol.r.value())}, {"constraints", constraints.size()}, {"verified", ok}};
  write_to(c.out, [&](std::ostream& o) { o << j.dump(2) << "\n"; });
  if (!c.out.empty()) m.output(c.out);
  if (!a.trace.empty()) {
    auto t = io::open_out(a.trace);
    t << format_trace(sol);
    m.output(a.trace);
  }
  m.emit(c.out);
  return ok ? kPass : kVerificationFailure;
}

// ------------------------------------------------ build-grid / verify-sweepout

struct GridArgs {
  std::string seq;
  std::uint64_t q = 10;
  std::uint64_t k = 2;
  std::uint64_t block_length = 0;
  std::string epsilon = "1/2";
  std::string c = "2";
  std::string eta = "1";
  std::string mode = "demo";
  std::uint64_t n1 = 0;
  std::uint64_t samples = 3;
  std::string grid;
  std::string csv;
};

GridParameters plan_from(const GridArgs& a, const CommonOptions& c) {
  PlanOverrides o;
  o.Q = a.q;
  o.K = a.k;
  if (a.block_length) o.block_length = a.block_length;
  o.N1 = a.n1;
  o.precision = c.precision();
  GridMode mode;
  if (a.mode == "demo") {
    mode = GridMode::demo;
  } else if (a.mode == "full") {
    mode = GridMode::full;
    o.K.reset();
  } else {
    throw invalid_argument("mode must be 'demo' or 'full'");
  }
  return plan_parameters(parse_rational(a.eta), parse_rational(a.epsilon), parse_rational(a.c), mode, o);
}

void echo_grid_args(Manifest& m, const GridArgs& a) {
  m.parameters() = {{"Q", a.q},       {"K", a.k},       {"block_length", a.block_length}, {"epsilon", a.epsilon},
                    {"C", a.c},       {"eta", a.eta},   {"mode", a.mode},                 {"N1", a.n1},
                    {"samples", a.samples}, {"grid", a.grid}};
}

int cmd_build_grid(const GridArgs& a, const CommonOptions& c) {
  Manifest m("build-grid");
  echo_grid_args(m, a);
  m.input(a.seq);
  const IntegerSequence seq = load_sequence(a.seq);
  io::GridArtifact art;
  art.params = plan_from(a, c);
  art.sequence_file = a.seq;
  art.n_total = seq.start_index() == 1 ? seq.size() : 0;
  if (art.n_total == 0) throw invalid_argument("grid construction needs a sequence starting at index 1");

  std::optional<IndexPartition> part;
  try {
    part = partition_indices(art.params, art.n_total);
  } catch (const not_enough_indices&) {
    if (art.params.mode == GridMode::demo) throw;
  }
  if (part) {
    art.blocks = part->blocks;
    const TargetAssignment assign = assign_targets(*part, art.params);
    art.rotation = solve_all_rotations(seq, assign, art.params, c.threads);
  }
  json j = io::to_json(art);
  if (!part) j["note"] = "dyadic schedule exceeds the available indices; parameters recorded symbolically";
  write_to(c.out, [&](std::ostream& o) { o << j.dump(2) << "\n"; });
  if (!c.out.empty()) m.output(c.out);
  m.emit(c.out);
  return kPass;
}

int cmd_verify_sweepout(const GridArgs& a, const CommonOptions& c) {
  Manifest m("verify-sweepout");
  echo_grid_args(m, a);
  m.parameters()["seed"] = c.seed;

  GridParameters params;
  IndexPartition part;
  RotationVector r;
  std::string seq_path = a.seq;
  std::optional<io::GridArtifact> art;
  if (!a.grid.empty()) {
    m.input(a.grid);
    auto in = io::open_in(a.grid);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw parse_error(std::string("grid artifact is not valid JSON: ") + e.what());
    }
    art = io::grid_from_json(j);
    if (seq_path.empty()) seq_path = art->sequence_file;
  }
  if (seq_path.empty()) throw invalid_argument("need --seq or a grid artifact naming its sequence file");
  m.input(seq_path);
  const IntegerSequence seq = load_sequence(seq_path);
  if (seq.start_index() != 1) throw invalid_argument("grid verification needs a sequence starting at index 1");

  if (art) {
    params = art->params;
    if (params.measure_budget() <= make_rational(Integer(static_cast<unsigned long>(2 * params.K)),
                                                 Integer(static_cast<unsigned long>(params.Q)))) {
      throw infeasible_parameters("artifact parameters violate 2K/Q < min(epsilon, 1/C)");
    }
    part = partition_indices(params, seq.size());
    if (part.blocks != art->blocks) throw parse_error("artifact blocks disagree with its parameters");
    r = art->rotation;
    if (r.dimension() != params.K) throw parse_error("artifact rotation has the wrong dimension");
  } else {
    params = plan_from(a, c);
    part = partition_indices(params, seq.size());
  }
  const TargetAssignment assign = assign_targets(part, params);
  if (!art) r = solve_all_rotations(seq, assign, params, c.threads);

  SweepoutOptions opts;
  opts.samples_per_cube = a.samples;
  opts.seed = c.seed;
  opts.threads = c.threads;
  const SweepoutReport rep = verify_sweepout(seq, params, part, assign, r, BadSet{params.K, params.Q}, opts);

  json j = io::to_json(rep);
  j["rotation"] = io::rotation_to_json(r);
  write_to(c.out, [&](std::ostream& o) { o << j.dump(2) << "\n"; });
  if (!c.out.empty()) m.output(c.out);
  const std::string csv = !a.csv.empty() ? a.csv : (c.out.empty() ? "" : c.out + ".csv");
  if (!csv.empty()) {
    auto f = io::open_out(csv);
    io::write_cube_csv(f, rep);
    m.output(csv);
  }
  m.emit(c.out);

  std::cerr << "cubes passed: " << rep.cubes_passed << "/" << rep.cubes.size()
            << ", bad-set measure " << to_fraction_string(rep.bad_set_measure) << " (~"
            << approx_decimal(rep.bad_set_measure) << ")\n";
  if (auto bad = rep.first_failing_cube()) {
    const auto& cube = rep.cubes[*bad];
    std::cerr << "first failing cube " << *bad;
    if (cube.witness) std::cerr << ": k=" << cube.witness->coordinate << " n=" << cube.witness->n;
    std::cerr << "\n";
  }
  return rep.full_cover && rep.measure_within_budget ? kPass : kVerificationFailure;
}

// ------------------------------------------------------ random / thin / density

struct RandomArgs {
  std::string eta = "1/2";
  std::uint64_t t_max = 1'000'000;
  std::uint64_t n_start = 16;
};

int cmd_random(const RandomArgs& a, const CommonOptions& c) {
  Manifest m("random");
  m.parameters() = {{"eta", a.eta}, {"t_max", a.t_max}, {"n_start", a.n_start}, {"seed", c.seed}};
  const auto profile = ProbabilityProfile::log_log_log(parse_rational(a.eta), a.n_start);
  const RandomDraw draw = sample_sequence(profile, a.t_max, c.seed, c.threads, c.precision());
  write_to(c.out, [&](std::ostream& o) { io::write_draw(o, draw); });
  if (!c.out.empty()) m.output(c.out);
  m.emit(c.out);
  return kPass;
}

struct ThinArgs {
  std::string draw;
  std::string eta;
};

int cmd_thin(const ThinArgs& a, const CommonOptions& c) {
  Manifest m("thin");
  m.parameters() = {{"eta", a.eta}};
  m.input(a.draw);
  auto in = io::open_in(a.draw);
  const RandomDraw draw = io::read_draw(in);
  const Rational eta = a.eta.empty() ? draw.profile.eta : parse_rational(a.eta);
  const IntervalGrid grid(eta, draw.t_max, c.precision());
  const ThinningResult result = thin(draw, grid);
  const ThinningReport rep = verify_thinning(result, grid, &draw);
  write_to(c.out, [&](std::ostream& o) { io::write_thinning(o, result, eta, draw.t_max); });
  if (!c.out.empty()) m.output(c.out);
  m.emit(c.out);
  std::cerr << "A=" << draw.selected.size() << " B=" << result.B.size() << " D=" << result.D.size()
            << " E=" << result.E.size() << " pending=" << result.pending.size()
            << " uncovered=" << result.uncovered.size() << " verification=" << (rep.passed() ? "pass" : "FAIL")
            << "\n";
  for (const auto& v : rep.violations) std::cerr << "  " << v << "\n";
  return rep.passed() ? kPass : kVerificationFailure;
}

struct DensityArgs {
  std::string draw;
  std::string thinning;
  std::vector<std::uint64_t> checkpoints;
};

int cmd_density(const DensityArgs& a, const CommonOptions& c) {
  Manifest m("density");
  m.parameters() = {{"checkpoints", a.checkpoints}};
  m.input(a.draw);
  m.input(a.thinning);
  auto din = io::open_in(a.draw);
  const RandomDraw draw = io::read_draw(din);
  auto tin = io::open_in(a.thinning);
  const io::ThinningFile tf = io::read_thinning(tin);
  if (tf.t_max != draw.t_max) throw invalid_argument("thinning file and draw have different horizons");
  std::vector<std::uint64_t> checkpoints = a.checkpoints;
  if (checkpoints.empty()) checkpoints.push_back(draw.t_max);
  const auto rows = density_report(draw, tf.result, checkpoints);
  write_to(c.out, [&](std::ostream& o) { io::write_density_csv(o, rows); });
  if (!c.out.empty()) m.output(c.out);
  m.emit(c.out);
  return kPass;
}

struct SigmaArgs {
  std::string eta = "1/2";
  std::uint64_t n = 1;
  std::uint64_t n_start = 16;
};

int cmd_sigma(const SigmaArgs& a, const CommonOptions& c) {
  Manifest m("sigma");
  m.parameters() = {{"eta", a.eta}, {"n", a.n}, {"n_start", a.n_start}};
  const auto d = sigma_diagnostics(ProbabilityProfile::log_log_log(parse_rational(a.eta), a.n_start), a.n,
                                   c.precision());
  json j{{"n", d.n},
         {"partial_sum", d.partial_sum},
         {"u_n", d.u_n},
         {"comparator", d.comparator ? json(*d.comparator) : json(nullptr)}};
  write_to(c.out, [&](std::ostream& o) { o << j.dump(2) << "\n"; });
  if (!c.out.empty()) m.output(c.out);
  m.emit(c.out);
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact constructions for sweeping-out counterexamples along sub-lacunary sequences"};
  app.set_version_flag("--version", SWEEPOUT_VERSION);
  app.require_subcommand(1);
  CommonOptions common;

  GenSeqArgs gen;
  auto* s_gen = app.add_subcommand("gen-seq", "Generate an integer sequence file");
  s_gen->add_option("--kind", gen.kind, "ratio | paper")->required();
  s_gen->add_option("--rho", gen.rho, "Ratio bound (ratio kind), e.g. 5 or 21/4");
  s_gen->add_option("--start", gen.start, "First term (ratio kind)");
  s_gen->add_option("--count", gen.count, "Number of terms")->required();
  s_gen->add_option("--eta", gen.eta, "eta (paper kind)");
  s_gen->add_option("--n0", gen.n0, "First index (paper kind, >= 3)");
  add_common(s_gen, common);

  VerifyGrowthArgs vg;
  auto* s_vg = app.add_subcommand("verify-growth", "Check consecutive ratios against a growth bound");
  s_vg->add_option("--seq", vg.seq, "Sequence file")->required();
  s_vg->add_option("--kind", vg.kind, "fixed | lacunary | loglog | weighted");
  s_vg->add_option("--rho", vg.rho, "Bound for the fixed kind");
  s_vg->add_option("--eta", vg.eta, "eta for lacunary / loglog / weighted kinds");
  s_vg->add_option("--weights", vg.weights, "harmonic | const:<p/q> (weighted kind)");
  s_vg->add_flag("--strict", vg.strict, "Fail where log log of the bound's argument is not positive");
  add_common(s_vg, common);

  SolveRotationArgs sr;
  auto* s_sr = app.add_subcommand("solve-rotation", "Solve for r with r*a_j mod 1 in target bins");
  s_sr->add_option("--constraints", sr.constraints, "File of 'a target' lines")->required();
  s_sr->add_option("--Q", sr.q, "Number of bins")->required();
  s_sr->add_option("--trace", sr.trace, "Write the per-constraint solver trace here");
  add_common(s_sr, common);

  GridArgs ga;
  auto add_grid_options = [&](CLI::App* s) {
    s->add_option("--seq", ga.seq, "Sequence file (index 1 first)");
    s->add_option("--Q", ga.q, "Bins per coordinate");
    s->add_option("--K", ga.k, "Torus dimension");
    s->add_option("--block-length", ga.block_length, "Indices per block (demo mode; default K)");
    s->add_option("--epsilon", ga.epsilon, "Measure budget epsilon");
    s->add_option("--C", ga.c, "Maximal-inequality constant C");
    s->add_option("--eta", ga.eta, "eta");
    s->add_option("--mode", ga.mode, "demo | full");
    s->add_option("--N1", ga.n1, "Dyadic offset (full mode)");
    add_common(s, common);
  };
  auto* s_bg = app.add_subcommand("build-grid", "Plan parameters, partition indices and solve rotations");
  add_grid_options(s_bg);
  auto* s_vs = app.add_subcommand("verify-sweepout", "Certify that every cube reaches block average 1");
  add_grid_options(s_vs);
  s_vs->add_option("--samples", ga.samples, "Sampled points per cube");
  s_vs->add_option("--grid", ga.grid, "Use the rotation vector of this grid artifact instead of solving");
  s_vs->add_option("--csv", ga.csv, "Per-cube CSV path (default <out>.csv)");

  RandomArgs ra;
  auto* s_rand = app.add_subcommand("random", "Draw a random sequence with sigma_n = (log log log n)^(1-eta)/n");
  s_rand->add_option("--eta", ra.eta, "eta");
  s_rand->add_option("--tmax", ra.t_max, "Horizon");
  s_rand->add_option("--n-start", ra.n_start, "First eligible index");
  add_common(s_rand, common);

  ThinArgs ta;
  auto* s_thin = app.add_subcommand("thin", "Split a draw into B/D/E over the threshold grid");
  s_thin->add_option("--draw", ta.draw, "Draw file")->required();
  s_thin->add_option("--eta", ta.eta, "Grid eta (defaults to the draw's)");
  add_common(s_thin, common);

  DensityArgs da;
  auto* s_den = app.add_subcommand("density", "B(t)/A(t) at checkpoints as CSV");
  s_den->add_option("--draw", da.draw, "Draw file")->required();
  s_den->add_option("--thinning", da.thinning, "Thinning file")->required();
  s_den->add_option("--checkpoints", da.checkpoints, "Values of t (default t_max)");
  add_common(s_den, common);

  SigmaArgs sa;
  auto* s_sig = app.add_subcommand("sigma", "Partial sums of sigma and u_n");
  s_sig->add_option("--eta", sa.eta, "eta");
  s_sig->add_option("--n", sa.n, "n")->required();
  s_sig->add_option("--n-start", sa.n_start, "First eligible index");
  add_common(s_sig, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*s_gen) return cmd_gen_seq(gen, common);
    if (*s_vg) return cmd_verify_growth(vg, common);
    if (*s_sr) return cmd_solve_rotation(sr, common);
    if (*s_bg) return cmd_build_grid(ga, common);
    if (*s_vs) return cmd_verify_sweepout(ga, common);
    if (*s_rand) return cmd_random(ra, common);
    if (*s_thin) return cmd_thin(ta, common);
    if (*s_den) return cmd_density(da, common);
    if (*s_sig) return cmd_sigma(sa, common);
  } catch (const sweepout::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const sweepout::error& e) {
    // ratio_too_small, precision_exhausted, undefined_bound: the input cannot be processed.
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kVerificationFailure;
  }
  return kInputError;
}
