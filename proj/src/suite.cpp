#include "pfr/suite.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "pfr/endgame.hpp"
#include "pfr/fibring.hpp"
#include "pfr/io.hpp"
#include "pfr/parallel.hpp"
#include "pfr/random.hpp"

namespace pfr {

namespace {

struct Trial {
  std::vector<IneqReport> reports;
  nlohmann::json inputs = nlohmann::json::array();
};

struct Gen {
  Rng& rng;
  int n;
  bool points;
  nlohmann::json& log;

  Dist dist() {
    Dist x = points ? Dist::point(n, random_elem(rng, n)) : random_dist<Real>(rng, n);
    log.push_back(io::to_json(x));
    return x;
  }

  JointDist joint(int arity) {
    JointDist j;
    if (points) {
      const Key k = random_keys(rng, n * arity, 1).front();
      j = JointDist(n, arity, {}, {{k, Real(1)}});
    } else {
      j = random_joint<Real>(rng, n, arity);
    }
    log.push_back(io::to_json(j));
    return j;
  }

  LinearMap map() {
    std::uniform_int_distribution<int> out(1, n);
    LinearMap pi = random_linear_map(rng, n, out(rng));
    log.push_back({{"columns", pi.columns()}, {"out_dim", pi.out_dim()}});
    return pi;
  }
};

using TrialFn = void (*)(Gen&, Trial&);

IneqReport residual_report(std::string name, double residual, double tolerance) {
  return identity_report(std::move(name), residual, 0.0, tolerance);
}

void triangle(Gen& g, Trial& t) {
  const auto x = g.dist(), y = g.dist(), z = g.dist();
  t.reports.push_back(check_triangle(x, y, z));
}

void madiman(Gen& g, Trial& t) {
  const auto x = g.dist(), y = g.dist(), z = g.dist();
  t.reports.push_back(check_madiman(x, y, z));
}

void lemma51(Gen& g, Trial& t) {
  const auto xz = g.joint(2), yw = g.joint(2);
  t.reports.push_back(check_lemma51(xz, yw));
}

void lemma52(Gen& g, Trial& t) {
  const auto x = g.dist(), y = g.dist(), z = g.dist();
  auto [a, b] = check_lemma52(x, y, z);
  t.reports.push_back(std::move(a));
  t.reports.push_back(std::move(b));
}

void lemma71(Gen& g, Trial& t) {
  const auto x = g.dist(), y = g.dist(), z = g.dist(), zp = g.dist();
  t.reports.push_back(check_lemma71(x, y, z, zp));
}

void rdist_diff(Gen& g, Trial& t) {
  const auto x = g.dist(), y = g.dist();
  t.reports.push_back(check_rdist_diff(x, y));
}

void submodularity(Gen& g, Trial& t) {
  t.reports.push_back(check_submodularity(g.joint(3)));
}

void sumset_lower(Gen& g, Trial& t) {
  t.reports.push_back(check_sumset_lower(g.joint(2)));
}

void bsg(Gen& g, Trial& t) {
  const auto r = bsg_check(g.joint(2));
  t.reports.push_back(make_report("bsg", r.lhs, r.rhs));
}

void fibring(Gen& g, Trial& t) {
  const auto z1 = g.dist(), z2 = g.dist();
  const auto pi = g.map();
  const auto r = fibring_decompose(z1, z2, pi);
  t.reports.push_back(residual_report("fibring_identity", r.residual, tol::kInequality));
}

void cond_rdist_forms(Gen& g, Trial& t) {
  const auto xz = g.joint(2), yw = g.joint(2);
  const CondDist a{xz, 0, AxisSet{1}}, b{yw, 0, AxisSet{1}};
  t.reports.push_back(identity_report("cond_rdist_forms", static_cast<double>(cond_rdist(a, b)),
                                      static_cast<double>(cond_rdist_alt(a, b)), tol::kIdentity));
}

void rdist_symmetry(Gen& g, Trial& t) {
  const auto x = g.dist(), y = g.dist();
  const Elem a = random_elem(g.rng, g.n), b = random_elem(g.rng, g.n);
  const double d = static_cast<double>(rdist(x, y));
  t.reports.push_back(identity_report("rdist_symmetry", d, static_cast<double>(rdist(y, x)), tol::kIdentity));
  t.reports.push_back(identity_report("rdist_translation", d, static_cast<double>(rdist(x.translate(a), y.translate(b))),
                                      tol::kIdentity));
  t.reports.push_back(make_report("rdist_nonnegative", 0.0, d));
}

void tau_reference(Gen& g, Trial& t) {
  const auto x = g.dist(), y = g.dist();
  const RefPair ref{x, y};
  t.reports.push_back(identity_report("tau_reference", static_cast<double>(tau(y, x, ref)),
                                      static_cast<double>((1 + 2 * ref.eta) * rdist(x, y)), tol::kIdentity));
}

const std::vector<std::pair<std::string, TrialFn>>& registry() {
  static const std::vector<std::pair<std::string, TrialFn>> r{
      {"triangle", triangle},
      {"madiman", madiman},
      {"lemma51", lemma51},
      {"lemma52", lemma52},
      {"lemma71", lemma71},
      {"rdist_diff", rdist_diff},
      {"submodularity", submodularity},
      {"sumset_lower", sumset_lower},
      {"bsg", bsg},
      {"fibring", fibring},
      {"cond_rdist_forms", cond_rdist_forms},
      {"rdist_symmetry", rdist_symmetry},
      {"tau_reference", tau_reference},
  };
  return r;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

IneqReport identity_report(std::string name, double a, double b, double tolerance) {
  const double gap = std::abs(a - b);
  return {std::move(name), a, b, -gap, gap <= tolerance};
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

std::uint64_t instance_seed(std::uint64_t seed, const std::string& suite, int trial) {
  std::uint64_t h = splitmix(seed);
  for (char c : suite) h = splitmix(h ^ static_cast<unsigned char>(c));
  return splitmix(h ^ static_cast<std::uint64_t>(trial));
}

SuiteOutcome run_suite(const std::string& name, const SuiteConfig& cfg) {
  const auto& reg = registry();
  const auto it = std::find_if(reg.begin(), reg.end(), [&](const auto& e) { return e.first == name; });
  if (it == reg.end()) throw std::invalid_argument("unknown suite '" + name + "'");
  if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
  check_dim(cfg.n);

  std::vector<Trial> trials(static_cast<std::size_t>(cfg.trials));
  parallel_for(trials.size(), [&](std::size_t i) {
    const auto seed = instance_seed(cfg.seed, name, static_cast<int>(i));
    Rng rng(seed);
    Gen g{rng, cfg.n, cfg.point_masses, trials[i].inputs};
    it->second(g, trials[i]);
  });

  SuiteOutcome out;
  out.suite = name;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    ++out.trials_run;
    bool violated = false;
    for (auto& r : trials[i].reports) {
      out.worst = std::max(out.worst, -r.slack);
      if (!r.holds) violated = true;
      out.reports.push_back(std::move(r));
    }
    if (violated) {
      ++out.violations;
      out.counterexample = nlohmann::json{{"suite", name},
                                          {"trial", i},
                                          {"n", cfg.n},
                                          {"seed", cfg.seed},
                                          {"instance_seed", instance_seed(cfg.seed, name, static_cast<int>(i))},
                                          {"inputs", std::move(trials[i].inputs)}};
      break;
    }
  }
  return out;
}

std::vector<SuiteOutcome> run_suites(const SuiteConfig& cfg, const std::function<void(const SuiteOutcome&)>& on_done) {
  for (const auto& s : cfg.only) {
    if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end()) {
      throw std::invalid_argument("unknown suite '" + s + "'");
    }
  }
  std::vector<SuiteOutcome> out;
  for (const auto& name : suite_names()) {
    if (!cfg.only.empty() && std::find(cfg.only.begin(), cfg.only.end(), name) == cfg.only.end()) continue;
    out.push_back(run_suite(name, cfg));
    if (on_done) on_done(out.back());
  }
  return out;
}

}  // namespace pfr
