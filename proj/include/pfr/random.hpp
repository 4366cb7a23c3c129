#pragma once

// Seedable generators for distributions, joints, subgroups and linear maps.
// Weights are normalized Exp(1) draws (a flat Dirichlet) over a uniformly
// random support of the requested size.

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "pfr/dist.hpp"
#include "pfr/group.hpp"

namespace pfr {

using Rng = std::mt19937_64;

/// Uniformly random subset of [0, 2^bits) with `count` members, ascending.
inline std::vector<Key> random_keys(Rng& rng, int bits, std::size_t count) {
  const std::uint64_t space = std::uint64_t{1} << bits;
  if (count == 0 || count > space) throw std::invalid_argument("random_keys: bad support size");
  std::vector<Key> out;
  if (count * 4 > space) {
    std::vector<Key> all(space);
    std::iota(all.begin(), all.end(), Key{0});
    std::shuffle(all.begin(), all.end(), rng);
    out.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(count));
  } else {
    std::uniform_int_distribution<Key> pick(0, space - 1);
    while (out.size() < count) {
      const Key k = pick(rng);
      if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

template <typename Scalar = Real>
BasicDist<Scalar> random_dist(Rng& rng, int dim, std::size_t support) {
  std::exponential_distribution<double> draw(1.0);
  typename BasicDist<Scalar>::Vector w = BasicDist<Scalar>::Vector::Zero(Eigen::Index{1} << dim);
  for (Key k : random_keys(rng, dim, support)) w(static_cast<Eigen::Index>(k)) = Scalar(draw(rng) + 1e-3);
  return BasicDist<Scalar>(dim, std::move(w));
}

/// Support size drawn uniformly from [1, 2^dim].
template <typename Scalar = Real>
BasicDist<Scalar> random_dist(Rng& rng, int dim) {
  std::uniform_int_distribution<std::size_t> size(1, std::size_t{1} << dim);
  return random_dist<Scalar>(rng, dim, size(rng));
}

/// Uniform distribution on a random subset of the given size.
template <typename Scalar = Real>
BasicDist<Scalar> random_uniform(Rng& rng, int dim, std::size_t support) {
  std::vector<Elem> set;
  for (Key k : random_keys(rng, dim, support)) set.push_back(static_cast<Elem>(k));
  return BasicDist<Scalar>::uniform(set, dim);
}

template <typename Scalar = Real>
BasicJointDist<Scalar> random_joint(Rng& rng, int dim, int arity, std::size_t support,
                                    std::vector<std::string> labels = {}) {
  std::exponential_distribution<double> draw(1.0);
  JointEntries<Scalar> e;
  for (Key k : random_keys(rng, dim * arity, support)) e.emplace_back(k, Scalar(draw(rng) + 1e-3));
  return BasicJointDist<Scalar>(dim, arity, std::move(labels), std::move(e));
}

/// Support size drawn uniformly from [1, min(2^(dim*arity), cap)].
template <typename Scalar = Real>
BasicJointDist<Scalar> random_joint(Rng& rng, int dim, int arity, std::vector<std::string> labels = {},
                                    std::size_t cap = 4096) {
  const std::size_t space = std::size_t{1} << (dim * arity);
  std::uniform_int_distribution<std::size_t> size(1, std::min(space, cap));
  return random_joint<Scalar>(rng, dim, arity, size(rng), std::move(labels));
}

inline SubgroupBasis random_subgroup(Rng& rng, int dim, int rank) {
  if (rank < 0 || rank > dim) throw std::invalid_argument("random_subgroup: rank out of range");
  std::uniform_int_distribution<Elem> pick(0, static_cast<Elem>(group_order(dim) - 1));
  SubgroupBasis h(dim);
  while (h.rank() < rank) h.insert(pick(rng));
  return h;
}

inline Elem random_elem(Rng& rng, int dim) {
  std::uniform_int_distribution<Elem> pick(0, static_cast<Elem>(group_order(dim) - 1));
  return pick(rng);
}

inline LinearMap random_linear_map(Rng& rng, int in_dim, int out_dim) {
  std::vector<Elem> cols(static_cast<std::size_t>(in_dim));
  for (Elem& c : cols) c = random_elem(rng, out_dim);
  return LinearMap(in_dim, out_dim, std::move(cols));
}

/// Random surjection F_2^in -> F_2^out (out <= in).
inline LinearMap random_surjection(Rng& rng, int in_dim, int out_dim) {
  for (;;) {
    LinearMap m = random_linear_map(rng, in_dim, out_dim);
    if (m.rank() == out_dim) return m;
  }
}

/// Keeps each element independently with probability `density`; never empty.
inline std::vector<Elem> random_subset(Rng& rng, const std::vector<Elem>& set, double density) {
  std::bernoulli_distribution keep(density);
  std::vector<Elem> out;
  for (Elem x : set) {
    if (keep(rng)) out.push_back(x);
  }
  if (out.empty() && !set.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, set.size() - 1);
    out.push_back(set[pick(rng)]);
  }
  return out;
}

}  // namespace pfr
