#include "pfr/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pfr {

DemoParams default_demo_params(int example) {
  DemoParams p;
  switch (example) {
    case 1: p.rank = 5; p.density = 0.5; break;
    case 2: p.rank = 0; p.m = 3; break;
    case 3: p.rank = 2; p.m = 2; p.density = 0.5; break;
    default: throw std::invalid_argument("example must be 1, 2 or 3");
  }
  return p;
}

std::vector<Elem> independent_mod(Rng& rng, const SubgroupBasis& h, int count) {
  if (h.rank() + count > h.ambient_dim()) throw std::invalid_argument("not enough room for independent cosets");
  SubgroupBasis acc = h;
  std::vector<Elem> out;
  while (static_cast<int>(out.size()) < count) {
    const Elem x = random_elem(rng, h.ambient_dim());
    if (acc.insert(x)) out.push_back(h.reduce(x));
  }
  return out;
}

namespace {

std::vector<Elem> union_of_cosets(const SubgroupBasis& h, const std::vector<Elem>& reps) {
  std::vector<Elem> out;
  for (Elem r : reps) {
    for (Elem x : h.enumerate()) out.push_back(x ^ r);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

DemoFixture make_demo(int example, const DemoParams& p) {
  if (example < 1 || example > 3) throw std::invalid_argument("example must be 1, 2 or 3");
  Rng rng(p.seed);
  DemoFixture f;
  f.example = example;
  f.params = p;
  f.h = random_subgroup(rng, p.n, p.rank);
  if (example == 1) {
    f.a1 = random_subset(rng, f.h.enumerate(), p.density);
    f.a2 = f.a1;
  } else {
    const auto reps = independent_mod(rng, f.h, 2 * p.m);
    f.a1 = union_of_cosets(f.h, {reps.begin(), reps.begin() + p.m});
    f.a2 = union_of_cosets(f.h, {reps.begin() + p.m, reps.end()});
    if (example == 3) {
      f.a1 = random_subset(rng, f.a1, p.density);
      f.a2 = random_subset(rng, f.a2, p.density);
    }
  }
  f.x1 = Dist::uniform(f.a1, p.n);
  f.x2 = Dist::uniform(f.a2, p.n);
  return f;
}

DemoReport run_demo(int example, const DemoParams& p, const DescentConfig& cfg, double eta) {
  DemoReport r;
  r.fixture = make_demo(example, p);
  const RefPair ref{r.fixture.x1, r.fixture.x2, Real(eta)};
  r.state = descend(r.fixture.x1, r.fixture.x2, ref, cfg);

  const auto initial = make_state(r.fixture.x1, r.fixture.x2, ref);
  r.initial_class_best.fill(std::numeric_limits<double>::quiet_NaN());
  for (const auto& c : generate_candidates(initial, cfg.budget, cfg)) {
    auto& best = r.initial_class_best[static_cast<std::size_t>(c.move.kind)];
    const double t = static_cast<double>(tau(c.x1, c.x2, ref));
    if (std::isnan(best) || t < best) best = t;
  }
  for (std::size_t i = 0; i < r.initial_class_best.size(); ++i) {
    const double best = r.initial_class_best[i];
    r.initially_rejected[i] = std::isnan(best) || !(static_cast<double>(initial.tau) - best > cfg.eps_step);
  }
  if (!r.state.trace.empty()) r.first_class = r.state.trace.front().move.kind;
  r.certificate = certify(extract_subgroup(r.state.x1).h, r.fixture.x1, r.fixture.x2);
  r.certificate.converged = r.state.converged;
  return r;
}

}  // namespace pfr
