#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "pfr/io.hpp"
#include "pfr/random.hpp"

using namespace pfr;

namespace {

std::string temp_file(const std::string& name, const std::string& body) {
  const std::string path = std::string(PFR_TEST_TMP) + "/" + name;
  std::ofstream(path) << body;
  return path;
}

}  // namespace

TEST_CASE("distribution JSON round trip") {
  Rng rng(1);
  const auto x = random_dist<Real>(rng, 5);
  const auto back = io::dist_from_json(io::to_json(x));
  CHECK((back.weights() - x.weights()).cwiseAbs().maxCoeff() < 1e-15);

  const auto j = random_joint<Real>(rng, 3, 3);
  const auto jb = io::joint_from_json(io::to_json(j));
  CHECK(jb.arity() == 3);
  CHECK(jb.entries().size() == j.entries().size());
  CHECK(std::abs(joint_entropy(jb, AxisSet{0, 2}) - joint_entropy(j, AxisSet{0, 2})) < 1e-14);
}

TEST_CASE("malformed JSON is a parse error") {
  using io::json;
  CHECK_THROWS_AS(io::joint_from_json(json{{"dim", 2}, {"arity", 1}, {"entries", {{7, 1.0}}}}), io::ParseError);
  CHECK_THROWS_AS(io::joint_from_json(json{{"dim", 2}}), io::ParseError);
  CHECK_THROWS_AS(io::dist_from_json(io::to_json(product(Dist::point(2, 1), Dist::point(2, 2)))), io::ParseError);
}

TEST_CASE("dense CSV") {
  std::istringstream in("1, 1\n2 0\n");
  const auto x = io::read_dist_csv(in);
  CHECK(x.dim() == 2);
  CHECK(x(2) == 0.5);
  std::istringstream bad("1, 1, 1");
  CHECK_THROWS_AS(io::read_dist_csv(bad), io::ParseError);
  std::istringstream nan("1, x");
  CHECK_THROWS_AS(io::read_dist_csv(nan), io::ParseError);
}

TEST_CASE("set files") {
  std::istringstream in("# a coset\ndim=4\n0b0001\n0x3\n5 # trailing\n\n7\n");
  const auto a = io::read_set(in);
  CHECK(a.dim() == 4);
  CHECK(a.elements() == std::vector<Elem>{1, 3, 5, 7});
  std::ostringstream out;
  io::write_set(out, a);
  std::istringstream again(out.str());
  CHECK(io::read_set(again).elements() == a.elements());

  std::istringstream no_header("1\n2\n");
  CHECK_THROWS_AS(io::read_set(no_header), io::ParseError);
  std::istringstream range("dim=2\n4\n");
  CHECK_THROWS_AS(io::read_set(range), io::ParseError);
}

TEST_CASE("load_dist detects the format") {
  const auto set = temp_file("io_set.txt", "dim=3\n1\n2\n");
  CHECK(io::load_dist(set)(1) == 0.5);
  const auto csv = temp_file("io_dense.csv", "1,0,0,1\n");
  CHECK(io::load_dist(csv)(3) == 0.5);
  const auto js = temp_file("io_dist.json", io::to_json(Dist::point(3, 6)).dump());
  CHECK(io::load_dist(js)(6) == 1.0);
  CHECK_THROWS_AS(io::load_dist(std::string(PFR_TEST_TMP) + "/missing.json"), io::ParseError);
  const auto broken = temp_file("io_broken.json", "{\"dim\": 3,");
  CHECK_THROWS_AS(io::load_dist(broken), io::ParseError);
}

TEST_CASE("subgroup JSON") {
  Rng rng(2);
  const auto h = random_subgroup(rng, 7, 3);
  const auto j = io::to_json(h);
  CHECK(j["rank"] == 3);
  CHECK(io::subgroup_from_json(j) == h);
}

TEST_CASE("reports serialize") {
  Rng rng(3);
  const auto x = random_dist<Real>(rng, 3), y = random_dist<Real>(rng, 3);
  const auto st = descend(x, y, RefPair{x, y});
  const auto j = io::to_json(st);
  CHECK(j.contains("trace"));
  CHECK(j["converged"].get<bool>() == st.converged);
  CHECK(j.contains("diagnostics") == !st.converged);
  const auto t = io::to_json(endgame_tables(x, y), false);
  CHECK_FALSE(t.contains("joint_uvs"));
  CHECK(t.contains("i1"));
}
