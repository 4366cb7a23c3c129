#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "pfr/random.hpp"
#include "pfr/ruzsa.hpp"
#include "pfr/suite.hpp"

using namespace pfr;

namespace {

std::vector<oracle::Table> pair_table(const JointDist& j) {
  const std::size_t len = std::size_t{1} << j.dim();
  std::vector<oracle::Table> t(len, oracle::Table(len, 0.0));
  for (const auto& [k, w] : j.entries()) t[j.component(k, 0)][j.component(k, 1)] += w;
  return t;
}

Dist coset(const SubgroupBasis& h, Elem a) {
  return Dist::uniform(h).translate(a);
}

}  // namespace

TEST_CASE("rdist of U_{0,1,2} with itself") {
  const std::vector<Elem> three{0, 1, 2};
  const auto u = Dist::uniform(three, 2);
  CHECK(std::abs(rdist(u, u) - 0.2703) < 1e-4);
  CHECK(std::abs(rdist(u, u) - oracle::rdist(oracle::table(u), oracle::table(u))) < 1e-14);
}

TEST_CASE("rdist matches the brute-force oracle") {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 7;
    const auto x = random_dist<Real>(rng, n), y = random_dist<Real>(rng, n);
    CHECK(std::abs(rdist(x, y) - oracle::rdist(oracle::table(x), oracle::table(y))) < 1e-12);
  }
}

TEST_CASE("rdist vanishes between cosets of one subgroup") {
  Rng rng(2);
  const auto h = random_subgroup(rng, 6, 3);
  CHECK(std::abs(rdist(coset(h, 0), coset(h, random_elem(rng, 6)))) < 1e-12);
  CHECK(std::abs(rdist(Dist::point(6, 3), Dist::point(6, 60))) < 1e-15);
}

TEST_CASE("conditioning on constants gives rdist") {
  Rng rng(3);
  const auto x = random_dist<Real>(rng, 4), y = random_dist<Real>(rng, 4);
  const CondDist a{product(x, Dist::point(4, 7)), 0, AxisSet{1}};
  const CondDist b{product(y, Dist::point(4, 2)), 0, AxisSet{1}};
  CHECK(std::abs(cond_rdist(a, b) - rdist(x, y)) < 1e-12);
  CHECK(std::abs(cond_rdist(unconditioned(x), unconditioned(y)) - rdist(x, y)) < 1e-12);
}

TEST_CASE("conditional distance: two formulas and the oracle") {
  Rng rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const auto xz = random_joint<Real>(rng, 3, 2), yw = random_joint<Real>(rng, 3, 2);
    const CondDist a{xz, 0, AxisSet{1}}, b{yw, 0, AxisSet{1}};
    const double fibre = cond_rdist(a, b);
    CHECK(std::abs(fibre - cond_rdist_alt(a, b)) < tol::kIdentity);
    CHECK(std::abs(fibre - oracle::cond_rdist(pair_table(xz), pair_table(yw))) < 1e-12);
  }
}

TEST_CASE("full conditioning on X") {
  Rng rng(5);
  const auto x = random_dist<Real>(rng, 3);
  const auto yw = random_joint<Real>(rng, 3, 2);
  const CondDist a{diagonal(x), 0, AxisSet{1}}, b{yw, 0, AxisSet{1}};
  CHECK(std::abs(cond_rdist(a, b) - cond_rdist_alt(a, b)) < tol::kIdentity);
  CHECK(std::abs(cond_rdist(a, b) - oracle::cond_rdist(pair_table(diagonal(x)), pair_table(yw))) < 1e-12);
}

TEST_CASE("fibres over the sum of coset-uniform variables are at distance 0") {
  Rng rng(6);
  const auto h = random_subgroup(rng, 5, 2);
  const auto x = coset(h, random_elem(rng, 5)), y = coset(h, random_elem(rng, 5));
  const auto j = with_sum(x, y);
  for (const auto& s : slices(j, 0, AxisSet{1})) CHECK(std::abs(rdist(s.dist, s.dist)) < 1e-12);
}

TEST_CASE("tau") {
  Rng rng(7);
  const auto uh = Dist::uniform(random_subgroup(rng, 5, 3));
  const RefPair flat{uh, uh};
  CHECK(std::abs(tau(uh, uh, flat)) < 1e-12);
  const auto x1 = random_dist<Real>(rng, 5), x2 = random_dist<Real>(rng, 5);
  const auto r1 = random_dist<Real>(rng, 5), r2 = random_dist<Real>(rng, 5);
  const RefPair ref{r1, r2};
  CHECK(std::abs(tau(x1, x2, ref) - (rdist(x1, x2) + (rdist(r1, x1) + rdist(r2, x2)) / 9)) < 1e-14);
  CHECK(RefPair::eta_limit() == doctest::Approx(1 / (4 + std::sqrt(17.0))));
  RefPair bad{r1, r2, 0.2};
  CHECK_THROWS(bad.validate());
}

TEST_CASE("trivial equality cases of the inequalities") {
  Rng rng(8);
  const auto x = random_dist<Real>(rng, 4), y = random_dist<Real>(rng, 4);
  const auto pt = Dist::point(4, 5), pt2 = Dist::point(4, 9);
  const auto h = random_subgroup(rng, 4, 2);
  const auto uh = Dist::uniform(h);
  const auto full = Dist::uniform(SubgroupBasis::whole(4));

  const auto tri = check_triangle(x, x, x);
  CHECK(tri.holds);
  CHECK(std::abs(tri.rhs - 2 * tri.lhs) < 1e-12);
  const auto tri_h = check_triangle(uh, uh, uh);
  CHECK(std::abs(tri_h.lhs) < 1e-12);
  CHECK(std::abs(tri_h.rhs) < 1e-12);

  const auto mad = check_madiman(full, full, full);
  CHECK(std::abs(mad.lhs) < 1e-12);
  CHECK(std::abs(mad.rhs) < 1e-12);
  const auto mad_pt = check_madiman(x, y, pt);
  CHECK(std::abs(mad_pt.slack) < 1e-12);

  const auto indep = check_lemma51(product(x, pt), product(y, pt2));
  CHECK(std::abs(indep.lhs - rdist(x, y)) < 1e-12);
  CHECK(std::abs(indep.slack) < 1e-12);
  CHECK(check_lemma51(diagonal(x), product(y, x)).holds);

  const auto [sum_pt, fibre_pt] = check_lemma52(x, y, pt);
  CHECK(std::abs(sum_pt.slack) < 1e-12);
  // Y + Z determines Y, so the fibre part is tight only up to H[X+Y] - H[X].
  CHECK(std::abs(fibre_pt.slack - (entropy(xor_convolve(x, y)) - entropy(x))) < 1e-12);
  const auto [sum_h, fibre_h] = check_lemma52(x, uh, uh);
  CHECK(std::abs(sum_h.lhs) < 1e-12);
  CHECK(std::abs(sum_h.rhs) < 1e-12);
  CHECK(fibre_h.holds);

  const auto l71 = check_lemma71(x, y, pt, pt2);
  CHECK(std::abs(l71.slack - (entropy(xor_convolve(x, y)) - entropy(x))) < 1e-12);
  const auto l71h = check_lemma71(uh, uh, uh, uh);
  CHECK(std::abs(l71h.lhs) < 1e-12);
  CHECK(std::abs(l71h.rhs) < 1e-12);

  CHECK(check_rdist_diff(x, x).lhs == 0.0);
  CHECK(std::abs(check_rdist_diff(uh, uh).rhs) < 1e-12);
  const auto diff = check_rdist_diff(pt, uh);
  CHECK(std::abs(diff.lhs - std::log(4.0)) < 1e-12);
  CHECK(std::abs(diff.slack) < 1e-12);
}

TEST_CASE("each checker detects a planted violation") {
  IneqReport r = make_report("probe", 1.0, 1.0 - 2e-9);
  CHECK_FALSE(r.holds);
  r = make_report("probe", 1.0, 1.0 - 5e-10);
  CHECK(r.holds);
  const auto id = identity_report("probe", 1.0, 1.0 + 2e-10, tol::kIdentity);
  CHECK_FALSE(id.holds);
}

TEST_CASE("randomized inequality suites hold") {
  SuiteConfig cfg;
  cfg.n = 4;
  cfg.trials = 40;
  for (const auto& name : suite_names()) {
    const auto out = run_suite(name, cfg);
    CHECK_MESSAGE(out.violations == 0, name);
    CHECK(out.trials_run == cfg.trials);
  }
}

TEST_CASE("point-mass suites are trivially tight") {
  SuiteConfig cfg;
  cfg.trials = 5;
  cfg.point_masses = true;
  for (const auto& name : suite_names()) {
    const auto out = run_suite(name, cfg);
    CHECK(out.violations == 0);
    CHECK(out.worst < 1e-12);
  }
}

TEST_CASE("suites replay from the instance seed") {
  CHECK(instance_seed(42, "triangle", 3) == instance_seed(42, "triangle", 3));
  CHECK(instance_seed(42, "triangle", 3) != instance_seed(42, "madiman", 3));
  SuiteConfig cfg;
  cfg.trials = 10;
  const auto a = run_suite("madiman", cfg), b = run_suite("madiman", cfg);
  REQUIRE(a.reports.size() == b.reports.size());
  for (std::size_t i = 0; i < a.reports.size(); ++i) CHECK(a.reports[i].lhs == b.reports[i].lhs);
  CHECK_THROWS(run_suite("nope", cfg));
}
