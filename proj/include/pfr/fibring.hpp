#pragma once

// Fibring identity: for independent Z1, Z2 on H and a homomorphism pi,
//   d[Z1;Z2] = d[pi Z1; pi Z2] + d[Z1|pi Z1; Z2|pi Z2]
//              + I[Z1 + Z2 : (pi Z1, pi Z2) | pi(Z1 + Z2)].

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "pfr/dist.hpp"
#include "pfr/ruzsa.hpp"

namespace pfr {

struct FibringReport {
  double d_total = 0;
  double d_projected = 0;
  double d_fibre = 0;
  double info_term = 0;
  double residual = 0;
};

namespace detail {

template <typename Scalar>
BasicDist<Scalar> lift(const BasicDist<Scalar>& x, int dim) {
  if (dim == x.dim()) return x;
  typename BasicDist<Scalar>::Vector w = BasicDist<Scalar>::Vector::Zero(Eigen::Index{1} << dim);
  w.head(x.weights().size()) = x.weights();
  return BasicDist<Scalar>(dim, std::move(w));
}

inline LinearMap lift(const LinearMap& pi, int dim) {
  std::vector<Elem> cols = pi.columns();
  cols.resize(static_cast<std::size_t>(dim), 0);
  return LinearMap(dim, dim, std::move(cols));
}

}  // namespace detail

/// Law of pi(X).
template <typename Scalar>
BasicDist<Scalar> push(const BasicDist<Scalar>& x, const LinearMap& pi) {
  if (pi.in_dim() != x.dim()) throw std::invalid_argument("push: dimension mismatch");
  typename BasicDist<Scalar>::Vector w = BasicDist<Scalar>::Vector::Zero(Eigen::Index{1} << pi.out_dim());
  for (const auto& [v, p] : x.sparse()) w(pi(v)) += p;
  return BasicDist<Scalar>(pi.out_dim(), std::move(w));
}

/// All four terms of the fibring identity, with Z1 and Z2 independent. The
/// fibre term is the fibre average d[Z1|pi Z1; Z2|pi Z2].
template <typename Scalar>
FibringReport fibring_decompose(const BasicDist<Scalar>& z1, const BasicDist<Scalar>& z2, const LinearMap& pi) {
  if (z1.dim() != z2.dim()) throw std::invalid_argument("fibring: dimension mismatch");
  if (pi.in_dim() != z1.dim()) throw std::invalid_argument("fibring: map does not act on Z's group");
  const int dim = std::max(pi.in_dim(), pi.out_dim());
  const auto a = detail::lift(z1, dim);
  const auto b = detail::lift(z2, dim);
  const LinearMap p = detail::lift(pi, dim);

  FibringReport r;
  const Scalar total = rdist(a, b);
  const Scalar projected = rdist(push(a, p), push(b, p));

  const std::vector<OutputAxis> with_image{{{0, std::nullopt}}, {{0, p}}};
  const auto fa = pushforward<Scalar>(BasicJointDist<Scalar>::from_dist(a), with_image);
  const auto fb = pushforward<Scalar>(BasicJointDist<Scalar>::from_dist(b), with_image);
  const Scalar fibre = cond_rdist<Scalar>({fa, 0, AxisSet{1}}, {fb, 0, AxisSet{1}});

  // Axes: Z1+Z2, pi Z1, pi Z2, pi(Z1+Z2).
  const std::vector<OutputAxis> terms{{{0, std::nullopt}, {1, std::nullopt}}, {{0, p}}, {{1, p}}, {{0, p}, {1, p}}};
  const auto j = pushforward<Scalar>(product(a, b), terms);
  const Scalar info = cond_mutual_info(j, AxisSet{0}, AxisSet{1, 2}, AxisSet{3});

  r.d_total = static_cast<double>(total);
  r.d_projected = static_cast<double>(projected);
  r.d_fibre = static_cast<double>(fibre);
  r.info_term = static_cast<double>(info);
  r.residual = static_cast<double>(total - projected - fibre - info);
  return r;
}

/// Law of (A, B) on F_2^n x F_2^n encoded in 2n bits, A in the low bits.
template <typename Scalar>
BasicDist<Scalar> pair_dist(const BasicDist<Scalar>& a, const BasicDist<Scalar>& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("pair_dist: dimension mismatch");
  const int n = a.dim();
  typename BasicDist<Scalar>::Vector w = BasicDist<Scalar>::Vector::Zero(Eigen::Index{1} << (2 * n));
  for (const auto& [x, px] : a.sparse()) {
    for (const auto& [y, py] : b.sparse()) w(static_cast<Eigen::Index>(x | (Elem{y} << n))) = px * py;
  }
  return BasicDist<Scalar>(2 * n, std::move(w));
}

/// pi(x, y) = x + y on F_2^n x F_2^n.
inline LinearMap sum_map(int n) {
  std::vector<Elem> cols(static_cast<std::size_t>(2 * n));
  for (int i = 0; i < n; ++i) {
    cols[static_cast<std::size_t>(i)] = Elem{1} << i;
    cols[static_cast<std::size_t>(n + i)] = Elem{1} << i;
  }
  return LinearMap(2 * n, n, std::move(cols));
}

/// For independent Y1..Y4:
///   d[Y1+Y3; Y2+Y4] + d[Y1|Y1+Y3; Y2|Y2+Y4] + I[Y1+Y2 : Y2+Y4 | Y1+Y2+Y3+Y4]
///     = d[Y1;Y2] + d[Y3;Y4],
/// evaluated as the fibring identity on Z1 = (Y1,Y3), Z2 = (Y2,Y4).
template <typename Scalar>
FibringReport cor_fibre(const BasicDist<Scalar>& y1, const BasicDist<Scalar>& y2, const BasicDist<Scalar>& y3,
                        const BasicDist<Scalar>& y4) {
  const int n = y1.dim();
  if (y2.dim() != n || y3.dim() != n || y4.dim() != n) throw std::invalid_argument("cor_fibre: dimension mismatch");
  if (2 * n > kMaxDim) throw std::invalid_argument("cor_fibre: product group too large");
  return fibring_decompose(pair_dist(y1, y3), pair_dist(y2, y4), sum_map(n));
}

}  // namespace pfr
