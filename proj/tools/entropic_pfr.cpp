// Command-line front end. Exit codes: 0 success, 1 a checked property or
// certificate failed, 2 bad input or usage.

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pfr/cover.hpp"
#include "pfr/descent.hpp"
#include "pfr/fixtures.hpp"
#include "pfr/io.hpp"
#include "pfr/suite.hpp"

namespace {

using nlohmann::json;
using namespace pfr;

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitBadInput = 2;

struct RunConfig {
  std::uint64_t seed = 42;
  int n = 5;
  int trials = 500;
  double eta = 1.0 / 9.0;
  double eps_d = 1e-4;
  double eps_step = 1e-9;
  int budget = 64;
  int max_iter = 50;
  std::string output;
  bool quiet = false;
  bool timestamp = false;
};

/// Writes JSON documents to --output or stdout, one per line.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw io::ParseError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  void line(const json& j) { stream() << j.dump() << '\n'; }
  void document(const json& j) { stream() << j.dump(2) << '\n'; }
  bool to_file() const { return file_.is_open(); }

 private:
  std::ofstream file_;
};

std::string now_utc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

void stamp(json& j, const RunConfig& cfg) {
  if (cfg.timestamp) j["timestamp"] = now_utc();
}

DescentConfig descent_config(const RunConfig& cfg) {
  DescentConfig d;
  d.eps_d = cfg.eps_d;
  d.eps_step = cfg.eps_step;
  d.budget = cfg.budget;
  d.max_iter = cfg.max_iter;
  return d;
}

void add_descent_flags(CLI::App* app, RunConfig& cfg) {
  app->add_option("--eta", cfg.eta, "Weight of the reference terms in tau")->capture_default_str();
  app->add_option("--eps-d", cfg.eps_d, "Stop once d[X1;X2] <= eps-d")->capture_default_str();
  app->add_option("--eps-step", cfg.eps_step, "Minimal accepted decrease of tau")->capture_default_str();
  app->add_option("--budget", cfg.budget, "Conditioning values tried per move class")->capture_default_str();
  app->add_option("--max-iter", cfg.max_iter, "Maximal number of accepted moves")->capture_default_str();
}

void add_output_flags(CLI::App* app, RunConfig& cfg) {
  app->add_option("-o,--output", cfg.output, "Write output here instead of stdout");
  app->add_flag("-q,--quiet", cfg.quiet, "Print only the final verdict");
  app->add_flag("--timestamp", cfg.timestamp, "Add a timestamp field to the output");
}

void verdict(const RunConfig& cfg, Sink& sink, const json& summary) {
  if (cfg.quiet) {
    std::cout << summary.value("verdict", "") << '\n';
  } else if (sink.to_file()) {
    std::cout << summary.dump() << '\n';
  }
}

int cmd_check(const RunConfig& cfg, const std::vector<std::string>& suites, bool points) {
  SuiteConfig sc;
  sc.n = cfg.n;
  sc.trials = cfg.trials;
  sc.seed = cfg.seed;
  sc.point_masses = points;
  sc.only = suites;
  Sink sink(cfg.output);
  std::size_t violations = 0;
  json per_suite = json::array();
  std::optional<json> counterexample;
  run_suites(sc, [&](const SuiteOutcome& o) {
    if (!cfg.quiet || sink.to_file()) {
      for (const auto& r : o.reports) {
        json j = io::to_json(r);
        j["suite"] = o.suite;
        sink.line(j);
      }
    }
    violations += o.violations;
    per_suite.push_back({{"suite", o.suite}, {"trials", o.trials_run}, {"violations", o.violations}, {"worst", o.worst}});
    if (o.counterexample && !counterexample) counterexample = *o.counterexample;
  });
  json summary = {{"verdict", violations == 0 ? "pass" : "fail"},
                  {"violations", violations},
                  {"n", cfg.n},
                  {"trials", cfg.trials},
                  {"seed", cfg.seed},
                  {"suites", per_suite}};
  if (counterexample) {
    summary["counterexample"] = *counterexample;
    std::cerr << "counterexample: " << counterexample->dump() << '\n';
  }
  if (!cfg.quiet || sink.to_file()) sink.line(summary);
  verdict(cfg, sink, {{"verdict", summary["verdict"]}});
  return violations == 0 ? kExitOk : kExitFailed;
}

int cmd_demo(const RunConfig& cfg, int example, DemoParams params, const std::string& policy) {
  DescentConfig dc = descent_config(cfg);
  if (policy == "tiered") {
    dc.policy = AcceptPolicy::Tiered;
  } else if (policy == "best-first") {
    dc.policy = AcceptPolicy::BestFirst;
  } else {
    throw io::ParseError("policy must be 'tiered' or 'best-first'");
  }
  const auto r = run_demo(example, params, dc, cfg.eta);
  json best = json::object(), rejected = json::object();
  for (MoveKind k : kMoveKinds) {
    const auto i = static_cast<std::size_t>(k);
    const double v = r.initial_class_best[i];
    best[std::string(to_string(k))] = std::isnan(v) ? json(nullptr) : json(v);
    rejected[std::string(to_string(k))] = r.initially_rejected[i];
  }
  const auto& p = r.fixture.params;
  json out = {{"example", example},
              {"params", {{"n", p.n}, {"rank", p.rank}, {"m", p.m}, {"density", p.density}, {"seed", p.seed}}},
              {"policy", policy},
              {"set_sizes", {r.fixture.a1.size(), r.fixture.a2.size()}},
              {"initial_tau", static_cast<double>(tau(r.fixture.x1, r.fixture.x2, RefPair{r.fixture.x1, r.fixture.x2, Real(cfg.eta)}))},
              {"initial_class_best", best},
              {"initially_rejected", rejected},
              {"first_accepted", r.first_class ? json(std::string(to_string(*r.first_class))) : json(nullptr)},
              {"state", io::to_json(r.state)},
              {"certificate", io::to_json(r.certificate)}};
  stamp(out, cfg);
  Sink sink(cfg.output);
  if (!cfg.quiet || sink.to_file()) sink.document(out);
  verdict(cfg, sink, {{"verdict", out["first_accepted"].is_null() ? "none" : out["first_accepted"]}});
  return kExitOk;
}

int cmd_descend(const RunConfig& cfg, const std::string& f1, const std::string& f2) {
  const Dist x0_1 = io::load_dist(f1);
  const Dist x0_2 = f2.empty() ? x0_1 : io::load_dist(f2);
  if (x0_1.dim() != x0_2.dim()) throw io::ParseError("inputs have different dimensions");
  const auto res = entropic_pfr(x0_1, x0_2, descent_config(cfg), Real(cfg.eta));
  json out = {{"state", io::to_json(res.state)}, {"certificate", io::to_json(res.certificate)}};
  stamp(out, cfg);
  Sink sink(cfg.output);
  if (!cfg.quiet || sink.to_file()) sink.document(out);
  verdict(cfg, sink, {{"verdict", res.certificate.holds ? "certified" : "uncertified"}});
  return res.certificate.holds ? kExitOk : kExitFailed;
}

int cmd_cover(const RunConfig& cfg, const std::string& file, double c_exponent, double theta) {
  const auto a = io::load_set(file);
  PipelineConfig pc;
  pc.descent = descent_config(cfg);
  pc.eta = cfg.eta;
  pc.c_exponent = c_exponent;
  pc.theta = theta;
  const auto cover = pfr_pipeline(a, pc);
  json out = io::to_json(cover);
  out["set_size"] = a.size();
  stamp(out, cfg);
  Sink sink(cfg.output);
  if (!cfg.quiet || sink.to_file()) sink.document(out);
  verdict(cfg, sink, {{"verdict", cover.certified ? "certified" : "uncertified"}});
  return cover.certified ? kExitOk : kExitFailed;
}

int cmd_endgame(const RunConfig& cfg, const std::string& f1, const std::string& f2, bool table) {
  const Dist x1 = io::load_dist(f1);
  const Dist x2 = io::load_dist(f2);
  const auto t = endgame_tables(x1, x2);
  const auto uv = pushforward(t.joint_uvs, {AxisSet{0}, AxisSet{1}}, {"U", "V"});
  json out = {{"tables", io::to_json(t, table)}, {"bsg_uv", io::to_json(bsg_check(uv))}};
  stamp(out, cfg);
  Sink sink(cfg.output);
  if (!cfg.quiet || sink.to_file()) sink.document(out);
  const bool ok = std::abs(static_cast<double>(t.i2 - t.i3)) <= tol::kIdentity;
  verdict(cfg, sink, {{"verdict", ok ? "ok" : "mismatch"}});
  return ok ? kExitOk : kExitFailed;
}

int cmd_entropy(const RunConfig& cfg, const std::string& file) {
  const Dist x = io::load_dist(file);
  const double h = static_cast<double>(entropy(x));
  Sink sink(cfg.output);
  if (cfg.quiet) {
    std::cout << std::setprecision(17) << h << '\n';
  } else {
    json out = {{"entropy", h}, {"dim", x.dim()}, {"support_size", x.support_size()}};
    stamp(out, cfg);
    sink.line(out);
  }
  return kExitOk;
}

int cmd_rdist(const RunConfig& cfg, const std::string& f1, const std::string& f2) {
  const Dist x = io::load_dist(f1);
  const Dist y = io::load_dist(f2);
  if (x.dim() != y.dim()) throw io::ParseError("inputs have different dimensions");
  const double d = static_cast<double>(rdist(x, y));
  Sink sink(cfg.output);
  if (cfg.quiet) {
    std::cout << std::setprecision(17) << d << '\n';
  } else {
    json out = {{"rdist", d}, {"dim", x.dim()}};
    stamp(out, cfg);
    sink.line(out);
  }
  return kExitOk;
}

int cmd_verify_fibring(const RunConfig& cfg, const std::vector<std::string>& files, const std::vector<std::string>& cols,
                       int out_dim) {
  if (files.empty()) {
    SuiteConfig sc;
    sc.n = cfg.n;
    sc.trials = cfg.trials;
    sc.seed = cfg.seed;
    sc.only = {"fibring"};
    const auto o = run_suite("fibring", sc);
    Sink sink(cfg.output);
    json summary = {{"verdict", o.violations == 0 ? "pass" : "fail"},
                    {"trials", o.trials_run},
                    {"max_abs_residual", o.worst}};
    if (o.counterexample) summary["counterexample"] = *o.counterexample;
    if (!cfg.quiet || sink.to_file()) sink.line(summary);
    verdict(cfg, sink, summary);
    return o.violations == 0 ? kExitOk : kExitFailed;
  }
  if (files.size() != 2) throw io::ParseError("verify-fibring takes two distribution files");
  const Dist z1 = io::load_dist(files[0]);
  const Dist z2 = io::load_dist(files[1]);
  if (z1.dim() != z2.dim()) throw io::ParseError("inputs have different dimensions");
  LinearMap pi;
  if (cols.empty()) {
    pi = LinearMap::identity(z1.dim());
  } else {
    std::vector<Elem> c;
    for (const auto& s : cols) c.push_back(parse_elem(s));
    if (out_dim < 0) throw io::ParseError("--out-dim is required with --columns");
    pi = LinearMap(z1.dim(), out_dim, std::move(c));
  }
  const auto r = fibring_decompose(z1, z2, pi);
  const bool ok = std::abs(r.residual) <= tol::kInequality;
  json out = io::to_json(r);
  out["verdict"] = ok ? "pass" : "fail";
  Sink sink(cfg.output);
  if (!cfg.quiet || sink.to_file()) sink.line(out);
  verdict(cfg, sink, out);
  return ok ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropic Ruzsa distance calculus and the PFR descent over F_2^n"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* check = app.add_subcommand("check", "Run the randomized identity and inequality suites");
  std::vector<std::string> suites;
  bool points = false;
  check->add_option("--seed", cfg.seed)->capture_default_str();
  check->add_option("--n", cfg.n, "Dimension")->capture_default_str()->check(CLI::Range(1, 8));
  check->add_option("--trials", cfg.trials)->capture_default_str()->check(CLI::PositiveNumber);
  check->add_option("--suite", suites, "Run only these suites");
  check->add_flag("--points-only", points, "Draw only point masses");
  add_output_flags(check, cfg);

  auto* demo = app.add_subcommand("demo", "Run one of the three motivating examples at n = 6");
  int example = 1;
  DemoParams params;
  std::optional<int> rank, m;
  std::optional<double> density;
  std::string policy = "tiered";
  demo->add_option("example", example, "1, 2 or 3")->required()->check(CLI::Range(1, 3));
  demo->add_option("--seed", params.seed)->capture_default_str();
  demo->add_option("--n", params.n)->capture_default_str()->check(CLI::Range(1, 7));
  demo->add_option("--rank", rank, "Rank of H");
  demo->add_option("--m", m, "Cosets per set");
  demo->add_option("--density", density, "Subset density");
  demo->add_option("--policy", policy, "tiered or best-first")->capture_default_str();
  add_descent_flags(demo, cfg);
  add_output_flags(demo, cfg);

  auto* descend_cmd = app.add_subcommand("descend", "Descend from (X0_2, X0_1) and certify a subgroup");
  std::string in1, in2;
  descend_cmd->add_option("x0_1", in1, "Dist JSON, set file or CSV")->required()->check(CLI::ExistingFile);
  descend_cmd->add_option("x0_2", in2, "Second input (defaults to the first)")->check(CLI::ExistingFile);
  descend_cmd->add_option("--seed", cfg.seed, "Unused; accepted for uniformity");
  add_descent_flags(descend_cmd, cfg);
  add_output_flags(descend_cmd, cfg);

  auto* cover = app.add_subcommand("cover", "Cover a set by cosets of a subgroup of size <= |A|");
  std::string set_file;
  double c_exponent = 12;
  double theta = 0.5;
  cover->add_option("set", set_file, "Set file")->required()->check(CLI::ExistingFile);
  cover->add_option("--c-exponent", c_exponent, "Exponent C in the 2 K^C bound")->capture_default_str();
  cover->add_option("--theta", theta, "Mass threshold for reading off the subgroup")->capture_default_str();
  cover->add_option("--seed", cfg.seed, "Unused; accepted for uniformity");
  add_descent_flags(cover, cfg);
  add_output_flags(cover, cfg);

  auto* endgame = app.add_subcommand("endgame", "Endgame tables and BSG report for a pair");
  bool table = false;
  endgame->add_option("x1", in1)->required()->check(CLI::ExistingFile);
  endgame->add_option("x2", in2)->required()->check(CLI::ExistingFile);
  endgame->add_flag("--table", table, "Include the full (U, V, S) table");
  add_output_flags(endgame, cfg);

  auto* entropy_cmd = app.add_subcommand("entropy", "Shannon entropy in nats");
  entropy_cmd->add_option("x", in1)->required()->check(CLI::ExistingFile);
  add_output_flags(entropy_cmd, cfg);

  auto* rdist_cmd = app.add_subcommand("rdist", "Entropic Ruzsa distance");
  rdist_cmd->add_option("x", in1)->required()->check(CLI::ExistingFile);
  rdist_cmd->add_option("y", in2)->required()->check(CLI::ExistingFile);
  add_output_flags(rdist_cmd, cfg);

  auto* fib = app.add_subcommand("verify-fibring", "Check the fibring identity");
  std::vector<std::string> fib_files, columns;
  int out_dim = -1;
  fib->add_option("files", fib_files, "Z1 Z2 (omit for the randomized suite)")->check(CLI::ExistingFile);
  fib->add_option("--columns", columns, "Images of the unit vectors under pi");
  fib->add_option("--out-dim", out_dim, "Target dimension of pi");
  fib->add_option("--seed", cfg.seed)->capture_default_str();
  fib->add_option("--n", cfg.n)->capture_default_str()->check(CLI::Range(1, 10));
  fib->add_option("--trials", cfg.trials)->capture_default_str()->check(CLI::PositiveNumber);
  add_output_flags(fib, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (*check) return cmd_check(cfg, suites, points);
    if (*demo) {
      DemoParams p = default_demo_params(example);
      p.seed = params.seed;
      p.n = params.n;
      if (rank) p.rank = *rank;
      if (m) p.m = *m;
      if (density) p.density = *density;
      // Demo runs stop at a tighter k than the library default.
      if (demo->count("--eps-d") == 0) cfg.eps_d = 1e-6;
      return cmd_demo(cfg, example, p, policy);
    }
    if (*descend_cmd) return cmd_descend(cfg, in1, in2);
    if (*cover) return cmd_cover(cfg, set_file, c_exponent, theta);
    if (*endgame) return cmd_endgame(cfg, in1, in2, table);
    if (*entropy_cmd) return cmd_entropy(cfg, in1);
    if (*rdist_cmd) return cmd_rdist(cfg, in1, in2);
    if (*fib) return cmd_verify_fibring(cfg, fib_files, columns, out_dim);
  } catch (const io::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  return kExitBadInput;
}
