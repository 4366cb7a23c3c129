#pragma once

// The three motivating examples X1 = U_{A1}, X2 = U_{A2}:
//   1. A1 = A2 a random dense subset of a subgroup H;
//   2. A1, A2 unions of m cosets of H with independent representatives;
//   3. random subsets of the sets of example 2.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pfr/descent.hpp"
#include "pfr/dist.hpp"
#include "pfr/group.hpp"
#include "pfr/random.hpp"

namespace pfr {

struct DemoParams {
  int n = 6;
  int rank = 4;          // rank of H
  int m = 2;             // cosets per set (examples 2 and 3)
  double density = 0.5;  // subset density (examples 1 and 3)
  std::uint64_t seed = 42;
};

struct DemoFixture {
  int example = 1;
  DemoParams params;
  SubgroupBasis h;
  std::vector<Elem> a1;
  std::vector<Elem> a2;
  Dist x1;
  Dist x2;
};

/// Default parameters for each example at n = 6.
DemoParams default_demo_params(int example);

/// `count` elements whose images in G/H are linearly independent.
std::vector<Elem> independent_mod(Rng& rng, const SubgroupBasis& h, int count);

DemoFixture make_demo(int example, const DemoParams& p);

struct DemoReport {
  DemoFixture fixture;
  DescentState state;
  /// Class of the first accepted move, if any move was accepted.
  std::optional<MoveKind> first_class;
  /// Best candidate tau per class at the initial pair.
  std::array<double, 5> initial_class_best{};
  /// Classes whose best initial candidate fails to lower tau by eps_step.
  std::array<bool, 5> initially_rejected{};
  SubgroupCertificate certificate;
};

/// Descends from (X1, X2) with reference pair (X1, X2) and certifies the
/// subgroup read off the terminal X1.
DemoReport run_demo(int example, const DemoParams& p, const DescentConfig& cfg, double eta = 1.0 / 9.0);

}  // namespace pfr
