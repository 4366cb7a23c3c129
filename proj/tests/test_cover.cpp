#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "pfr/cover.hpp"
#include "pfr/fixtures.hpp"
#include "pfr/random.hpp"

using namespace pfr;

namespace {

std::vector<Elem> coset_union(const SubgroupBasis& h, const std::vector<Elem>& reps) {
  std::vector<Elem> out;
  for (Elem r : reps) {
    for (Elem y : h.enumerate()) out.push_back(r ^ y);
  }
  return out;
}

}  // namespace

TEST_CASE("set input normalizes") {
  const SetInput a(3, {5, 1, 5, 0});
  CHECK(a.elements() == std::vector<Elem>{0, 1, 5});
  CHECK(a.contains(5));
  CHECK_FALSE(a.contains(2));
  CHECK_THROWS(SetInput(3, {}));
  CHECK_THROWS(SetInput(3, {8}));
}

TEST_CASE("doubling constants") {
  Rng rng(1);
  const auto h = random_subgroup(rng, 6, 3);
  CHECK(doubling_constant(SetInput(6, h.enumerate())) == 1.0);
  CHECK(doubling_constant(SetInput(6, coset_union(h, {random_elem(rng, 6)}))) == 1.0);
  const SetInput tri(2, {0, 1, 2});
  CHECK(sumset_size(tri) == 4);
  CHECK(doubling_constant(tri) == doctest::Approx(4.0 / 3));
}

TEST_CASE("best shift") {
  Rng rng(2);
  const auto h = random_subgroup(rng, 6, 3);
  const auto members = h.enumerate();
  const std::vector<Elem> part(members.begin(), members.begin() + 5);
  const auto s = best_shift(SetInput(6, part), h);
  CHECK(s.x0 == 0);
  CHECK(s.overlap == 5);

  const Elem a = random_elem(rng, 6);
  const auto c = best_shift(SetInput(6, coset_union(h, {a})), h);
  CHECK(c.overlap == h.size());
  CHECK(h.contains(c.x0 ^ a));

  for (int trial = 0; trial < 40; ++trial) {
    const auto hh = random_subgroup(rng, 6, trial % 5);
    const auto set = random_uniform<Real>(rng, 6, 1 + trial % 30).support();
    const auto got = best_shift(SetInput(6, set), hh);
    const auto hm = hh.enumerate();
    const auto want = oracle::best_shift({set.begin(), set.end()}, {hm.begin(), hm.end()}, 6);
    CHECK(got.x0 == want.first);
    CHECK(got.overlap == want.second);
  }
}

TEST_CASE("Ruzsa covering") {
  Rng rng(3);
  const auto h = random_subgroup(rng, 6, 3);
  const SetInput hs(6, h.enumerate());
  CHECK(ruzsa_cover(hs, h.enumerate()) == std::vector<Elem>{0});

  const auto reps = independent_mod(rng, h, 2);
  const SetInput two(6, coset_union(h, reps));
  const auto first = coset_union(h, {reps[0]});
  CHECK(ruzsa_cover(two, first).size() == 2);

  for (int trial = 0; trial < 30; ++trial) {
    const auto set = random_uniform<Real>(rng, 6, 2 + trial).support();
    const SetInput a(6, set);
    const auto s = random_subset(rng, set, 0.4);
    if (s.empty()) continue;
    const auto centres = ruzsa_cover(a, s);
    std::set<Elem> ss;
    for (Elem x : s) {
      for (Elem y : s) ss.insert(x ^ y);
    }
    for (Elem x : set) {
      bool hit = false;
      for (Elem c : centres) hit = hit || ss.count(x ^ c);
      CHECK(hit);
    }
    std::set<Elem> as;
    for (Elem x : set) {
      for (Elem y : s) as.insert(x ^ y);
    }
    CHECK(centres.size() * s.size() <= as.size());
  }
  CHECK_THROWS(ruzsa_cover(hs, {}));
}

TEST_CASE("cover from a subgroup") {
  Rng rng(4);
  const auto h = random_subgroup(rng, 6, 3);
  const SetInput a(6, h.enumerate());
  const auto c = cover_from_subgroup(a, h, 1.0, 12);
  CHECK(c.translates.size() == 1);
  CHECK(c.hp == h);
  CHECK(c.cover_verified);
  CHECK(c.certified);
  CHECK(c.bound == 2.0);

  // |H| > |A| forces a smaller H'.
  const auto big = random_subgroup(rng, 6, 5);
  const auto part = random_subset(rng, big.enumerate(), 0.3);
  const SetInput small(6, part);
  const auto s = cover_from_subgroup(small, big, doubling_constant(small), 12);
  CHECK(s.hp.size() <= small.size());
  CHECK(s.hp.is_subgroup_of(big));
  CHECK(verify_cover(small, s.hp, s.translates));
  CHECK(s.certified);
  CHECK_FALSE(verify_cover(small, SubgroupBasis(6), {}));
}

TEST_CASE("pipeline on a subgroup") {
  Rng rng(5);
  const auto h = random_subgroup(rng, 6, 3);
  const auto c = pfr_pipeline(SetInput(6, h.enumerate()));
  CHECK(c.certified);
  CHECK(c.translates.size() == 1);
  CHECK(c.k == 1.0);
}

TEST_CASE("pipeline on four independent cosets") {
  Rng rng(6);
  const auto h = random_subgroup(rng, 6, 2);
  const auto reps = independent_mod(rng, h, 4);
  const SetInput a(6, coset_union(h, reps));
  const auto c = pfr_pipeline(a);
  CHECK(c.certified);
  CHECK(c.cover_verified);
  CHECK(c.hp.size() <= a.size());
  CHECK(static_cast<double>(c.translates.size()) <= c.bound);
  CHECK(c.bridge_holds);
  CHECK(c.translates.size() >= 1);
}

TEST_CASE("pipeline on a half-density subset of a rank-4 subgroup") {
  Rng rng(7);
  const auto h = random_subgroup(rng, 6, 4);
  const SetInput a(6, random_subset(rng, h.enumerate(), 0.5));
  const auto c = pfr_pipeline(a);
  CHECK(c.certified);
  CHECK(c.hp.size() <= a.size());
  CHECK(verify_cover(a, c.hp, c.translates));
}
