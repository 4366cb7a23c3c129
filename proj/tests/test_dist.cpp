#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "oracles.hpp"
#include "pfr/dist.hpp"
#include "pfr/random.hpp"

using namespace pfr;
using doctest::Approx;

namespace {

// (X, Y) uniform on {(0,0), (0,1), (1,0)} in F_2 x F_2.
JointDist three_point() {
  return JointDist(1, 2, {"X", "Y"}, {{0b00, 1.0}, {0b10, 1.0}, {0b01, 1.0}});
}

Dist from_table(int n, const std::vector<double>& t) {
  Dist::Vector w(static_cast<Eigen::Index>(t.size()));
  for (std::size_t i = 0; i < t.size(); ++i) w(static_cast<Eigen::Index>(i)) = t[i];
  return Dist(n, w);
}

}  // namespace

TEST_CASE("uniform distributions") {
  const std::vector<Elem> zero{0};
  CHECK(entropy(Dist::uniform(zero, 3)) == 0.0);
  Rng rng(1);
  const auto h = random_subgroup(rng, 5, 2);
  CHECK(entropy(Dist::uniform(h)) == Approx(std::log(4.0)).epsilon(1e-14));
  const std::vector<Elem> three{0, 1, 2};
  CHECK(entropy(uniform_on<Real>(three, 2)) == Approx(std::log(3.0)).epsilon(1e-14));
  CHECK(std::abs(entropy(Dist::uniform(SubgroupBasis::whole(4))) - 4 * std::log(2.0)) < 1e-12);
}

TEST_CASE("entropy of (1/2, 1/4, 1/4)") {
  const auto x = from_table(2, {0.5, 0.25, 0.25, 0.0});
  CHECK(std::abs(entropy(x) - 1.5 * std::log(2.0)) < 1e-14);
  CHECK(entropy(Dist::point(4, 9)) == 0.0);
}

TEST_CASE("constructor rejects bad weights") {
  CHECK_THROWS(from_table(2, {1, -1, 1, 1}));
  CHECK_THROWS(from_table(2, {0, 0, 0, 0}));
  CHECK_THROWS(from_table(2, {1, 1, 1}));
  const auto x = from_table(2, {3, 1, 0, 0});
  CHECK(std::abs(x.weights().sum() - 1) < tol::kMass);
}

TEST_CASE("random entropies match the oracle") {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = random_dist<Real>(rng, 1 + trial % 8);
    CHECK(std::abs(entropy(x) - oracle::entropy(oracle::table(x))) < 1e-12);
  }
}

TEST_CASE("three-point joint") {
  const auto j = three_point();
  CHECK(std::abs(joint_entropy(j, AxisSet{0, 1}) - std::log(3.0)) < 1e-14);
  CHECK(std::abs(cond_entropy(j, AxisSet{0}, AxisSet{1}) - 2.0 / 3.0 * std::log(2.0)) < 1e-14);
  CHECK(mutual_info(j, AxisSet{0}, AxisSet{1}) == Approx(0.1744).epsilon(1e-3));
}

TEST_CASE("entropy of products, diagonals and marginals") {
  Rng rng(3);
  const auto x = random_dist<Real>(rng, 4), y = random_dist<Real>(rng, 4);
  const auto xy = product(x, y);
  CHECK(std::abs(joint_entropy(xy, AxisSet{0, 1}) - entropy(x) - entropy(y)) < 1e-12);
  CHECK(std::abs(joint_entropy(xy, AxisSet{1}) - entropy(y)) < 1e-12);
  CHECK(std::abs(cond_entropy(xy, AxisSet{0}, AxisSet{1}) - entropy(x)) < 1e-12);
  CHECK(std::abs(mutual_info(xy, AxisSet{0}, AxisSet{1})) < 1e-12);
  const auto xx = diagonal(x);
  CHECK(std::abs(joint_entropy(xx, AxisSet{0, 1}) - entropy(x)) < 1e-12);
  CHECK(std::abs(cond_entropy(xx, AxisSet{0}, AxisSet{1})) < 1e-12);
  CHECK(std::abs(mutual_info(xx, AxisSet{0}, AxisSet{1}) - entropy(x)) < 1e-12);
}

TEST_CASE("convolution examples") {
  const std::vector<Elem> three{0, 1, 2};
  const auto u = Dist::uniform(three, 2);
  const auto c = xor_convolve(u, u);
  CHECK(std::abs(c(0) - 1.0 / 3) < 1e-15);
  for (Elem z = 1; z < 4; ++z) CHECK(std::abs(c(z) - 2.0 / 9) < 1e-15);

  Rng rng(4);
  const auto x = random_dist<Real>(rng, 5);
  CHECK(xor_convolve(x, Dist::point(5, 13)) == x.translate(13));
  const auto h = Dist::uniform(random_subgroup(rng, 6, 3));
  CHECK((xor_convolve(h, h).weights() - h.weights()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("transform path agrees with pairwise convolution") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 8;
    const auto x = random_dist<Real>(rng, n, std::size_t{1} << n);
    const auto y = random_dist<Real>(rng, n, std::size_t{1} << n);
    ConvolveStats stats;
    const auto c = xor_convolve(x, y, &stats);
    if (n > 1) CHECK(stats.used_transform);
    const auto ref = oracle::convolve(oracle::table(x), oracle::table(y));
    for (std::size_t z = 0; z < ref.size(); ++z) CHECK(std::abs(c(static_cast<Elem>(z)) - ref[z]) <= 1e-12);
  }
}

TEST_CASE("sparse convolution") {
  const SparseWeights<Real> a{{1, 0.5}, {2, 0.5}}, b{{1, 0.25}, {4, 0.75}};
  const auto c = xor_convolve(a, b);
  REQUIRE(c.size() == 4);
  CHECK(c[0] == std::pair<Elem, Real>{0, 0.125});
  CHECK(c[1] == std::pair<Elem, Real>{3, 0.125});
}

TEST_CASE("pushforward") {
  Rng rng(6);
  const auto x = random_dist<Real>(rng, 3), y = random_dist<Real>(rng, 3);
  const auto xy = product(x, y);
  const auto same = pushforward(xy, {AxisSet{0}, AxisSet{1}});
  const auto se = same.entries(), xe = xy.entries();
  REQUIRE(se.size() == xe.size());
  for (std::size_t i = 0; i < se.size(); ++i) {
    CHECK(se[i].first == xe[i].first);
    CHECK(std::abs(se[i].second - xe[i].second) < 1e-15);
  }
  const auto sum = pushforward(xy, {AxisSet{0, 1}}).to_dist();
  CHECK((sum.weights() - xor_convolve(x, y).weights()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("pushforward of four copies of U_H") {
  Rng rng(7);
  const auto h = random_subgroup(rng, 4, 2);
  const auto uh = Dist::uniform(h);
  const std::vector<Dist> parts{uh, uh, uh, uh};
  const auto four = product<Real>(parts);
  const auto uvs = pushforward(four, {AxisSet{0, 1}, AxisSet{1, 2}, AxisSet{0, 1, 2, 3}});
  CHECK(uvs.support_size() == h.size() * h.size() * h.size());
  for (int axis = 0; axis < 3; ++axis) {
    CHECK((uvs.marginal_dist(axis).weights() - uh.weights()).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("conditioning") {
  Rng rng(8);
  const auto x = random_dist<Real>(rng, 3), y = random_dist<Real>(rng, 3);
  const auto xy = product(x, y);
  const auto c = condition(xy, 1, y.support().front()).to_dist();
  CHECK((c.weights() - x.weights()).cwiseAbs().maxCoeff() < 1e-15);

  // (X, X + Y) given X + Y = s: Bayes by enumeration.
  const auto xs = pushforward(xy, {AxisSet{0}, AxisSet{0, 1}});
  const auto sum = xor_convolve(x, y);
  for (Elem s : sum.support()) {
    const auto post = condition(xs, 1, s).to_dist();
    for (Elem a = 0; a < 8; ++a) CHECK(std::abs(post(a) - x(a) * y(a ^ s) / sum(s)) < 1e-14);
  }

  const auto pt = product(Dist::point(3, 5), y);
  CHECK((condition(pt, 0, 5).to_dist().weights() - y.weights()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(condition(pt, 0, 4), std::domain_error);
}

TEST_CASE("slices sum back to the joint") {
  Rng rng(9);
  const auto j = random_joint<Real>(rng, 3, 2);
  const auto s = slices(j, 0, AxisSet{1});
  Real mass = 0;
  Dist::Vector total = Dist::Vector::Zero(8);
  for (const auto& sl : s) {
    mass += sl.mass;
    total += sl.mass * sl.dist.weights();
  }
  CHECK(std::abs(mass - 1) < tol::kMass);
  CHECK((total - j.marginal_dist(0).weights()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("sparse storage above the dense limit") {
  Rng rng(10);
  const auto j = random_joint<Real>(rng, 7, 4, 200);
  CHECK_FALSE(j.is_dense());
  std::map<std::pair<Elem, Elem>, double> m02;
  for (const auto& [k, w] : j.entries()) m02[{j.component(k, 0), j.component(k, 2)}] += w;
  CHECK(std::abs(joint_entropy(j, AxisSet{0, 2}) - oracle::entropy(m02)) < 1e-12);
  std::map<Key, double> all;
  for (const auto& [k, w] : j.entries()) all[k] += w;
  CHECK(std::abs(joint_entropy(j, AxisSet::all(4)) - oracle::entropy(all)) < 1e-12);
}

TEST_CASE("axis misuse is rejected") {
  const auto j = three_point();
  CHECK_THROWS(joint_entropy(j, AxisSet{2}));
  CHECK_THROWS(cond_entropy(j, AxisSet{0}, AxisSet{0}));
  CHECK_THROWS(mutual_info(j, AxisSet{0, 1}, AxisSet{1}));
}
