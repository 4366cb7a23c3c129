#pragma once

// Entropic Ruzsa distance, its conditional variant, the tau functional, and
// checkers for the unconditional inequalities of the entropic Ruzsa calculus.
// In characteristic 2 every difference is a sum, so X - Y is realized as X ^ Y.

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pfr/dist.hpp"

namespace pfr {

/// d[X;Y] = H[X' + Y'] - H[X]/2 - H[Y]/2 for independent copies X', Y'.
template <typename Scalar>
Scalar rdist(const BasicDist<Scalar>& x, const BasicDist<Scalar>& y) {
  if (x.dim() != y.dim()) throw std::invalid_argument("rdist: dimension mismatch");
#ifdef PFR_INJECT_RDIST_FAULT
  // Test-only build: sign error in the sumset term.
  return -entropy(xor_convolve(x, y)) - entropy(x) / 2 - entropy(y) / 2;
#else
  return entropy(xor_convolve(x, y)) - entropy(x) / 2 - entropy(y) / 2;
#endif
}

/// Variant with the marginal entropies supplied by the caller.
template <typename Scalar>
Scalar rdist(const BasicDist<Scalar>& x, const BasicDist<Scalar>& y, Scalar hx, Scalar hy) {
  if (x.dim() != y.dim()) throw std::invalid_argument("rdist: dimension mismatch");
#ifdef PFR_INJECT_RDIST_FAULT
  return -entropy(xor_convolve(x, y)) - hx / 2 - hy / 2;
#else
  return entropy(xor_convolve(x, y)) - hx / 2 - hy / 2;
#endif
}

/// d[X|Z; Y|W] as the average over fibres:
/// sum_{z,w} p(z) p(w) d[(X|Z=z); (Y|W=w)].
template <typename Scalar>
Scalar cond_rdist(const BasicCondDist<Scalar>& a, const BasicCondDist<Scalar>& b) {
  if (a.base.dim() != b.base.dim()) throw std::invalid_argument("cond_rdist: dimension mismatch");
  const auto sa = slices(a.base, a.target, a.given);
  const auto sb = slices(b.base, b.target, b.given);
  std::vector<Scalar> ha, hb;
  for (const auto& s : sa) ha.push_back(entropy(s.dist));
  for (const auto& s : sb) hb.push_back(entropy(s.dist));
  Scalar total(0);
  for (std::size_t i = 0; i < sa.size(); ++i) {
    for (std::size_t j = 0; j < sb.size(); ++j) {
      total += sa[i].mass * sb[j].mass * rdist(sa[i].dist, sb[j].dist, ha[i], hb[j]);
    }
  }
  return total;
}

namespace detail {

/// Restricts a conditional to its target and conditioning axes, renumbering
/// them in increasing order.
template <typename Scalar>
BasicCondDist<Scalar> compact(const BasicCondDist<Scalar>& c) {
  const AxisSet keep = c.given | AxisSet{c.target};
  BasicCondDist<Scalar> out{c.base.marginal(keep), 0, {}};
  int slot = 0;
  unsigned given = 0;
  for (int axis = 0; axis < c.base.arity(); ++axis) {
    if (!keep.has(axis)) continue;
    if (axis == c.target) out.target = slot;
    if (c.given.has(axis)) given |= 1u << slot;
    ++slot;
  }
  out.given = AxisSet::from_mask(given);
  return out;
}

}  // namespace detail

/// d[X|Z; Y|W] through independent copies:
/// H[X' + Y' | Z', W'] - H[X'|Z']/2 - H[Y'|W']/2.
template <typename Scalar>
Scalar cond_rdist_alt(const BasicCondDist<Scalar>& a, const BasicCondDist<Scalar>& b) {
  if (a.base.dim() != b.base.dim()) throw std::invalid_argument("cond_rdist: dimension mismatch");
  const auto ca = detail::compact(a);
  const auto cb = detail::compact(b);
  if (1 + ca.given.count() + cb.given.count() > 4) {
    throw std::invalid_argument("cond_rdist_alt: too many conditioning axes");
  }
  const auto both = product(ca.base, cb.base);
  const int shift = ca.base.arity();
  std::vector<OutputAxis> outs{{{ca.target, std::nullopt}, {cb.target + shift, std::nullopt}}};
  for (int i = 0; i < ca.base.arity(); ++i) {
    if (ca.given.has(i)) outs.push_back({{i, std::nullopt}});
  }
  for (int i = 0; i < cb.base.arity(); ++i) {
    if (cb.given.has(i)) outs.push_back({{i + shift, std::nullopt}});
  }
  const auto sum = pushforward<Scalar>(both, outs);
  const AxisSet rest = AxisSet::from_mask(AxisSet::all(sum.arity()).mask() & ~1u);
  return cond_entropy(sum, AxisSet{0}, rest) - cond_entropy(ca.base, AxisSet{ca.target}, ca.given) / 2 -
         cond_entropy(cb.base, AxisSet{cb.target}, cb.given) / 2;
}

/// Reference pair (X0_1, X0_2) and the weight eta of the tau functional.
template <typename Scalar>
struct BasicRefPair {
  BasicDist<Scalar> x0_1;
  BasicDist<Scalar> x0_2;
  Scalar eta = Scalar(1) / Scalar(9);

  /// Largest admissible eta is 1/(4 + sqrt 17), exclusive.
  static Scalar eta_limit() {
    using std::sqrt;
    return Scalar(1) / (Scalar(4) + sqrt(Scalar(17)));
  }

  void validate() const {
    if (!(eta > Scalar(0) && eta < eta_limit())) {
      throw std::invalid_argument("eta must lie in (0, 1/(4+sqrt(17)))");
    }
    if (x0_1.dim() != x0_2.dim()) throw std::invalid_argument("reference pair: dimension mismatch");
  }
};

using RefPair = BasicRefPair<Real>;

/// tau[X1;X2] = d[X1;X2] + eta d[X0_1;X1] + eta d[X0_2;X2].
template <typename Scalar>
Scalar tau(const BasicDist<Scalar>& x1, const BasicDist<Scalar>& x2, const BasicRefPair<Scalar>& ref) {
  if (x1.dim() != ref.x0_1.dim() || x2.dim() != ref.x0_2.dim()) {
    throw std::invalid_argument("tau: dimension mismatch");
  }
  return rdist(x1, x2) + ref.eta * rdist(ref.x0_1, x1) + ref.eta * rdist(ref.x0_2, x2);
}

/// One evaluated inequality lhs <= rhs.
struct IneqReport {
  std::string name;
  double lhs = 0;
  double rhs = 0;
  double slack = 0;
  bool holds = true;
};

template <typename Scalar>
IneqReport make_report(std::string name, Scalar lhs, Scalar rhs) {
  const double slack = static_cast<double>(rhs - lhs);
  return {std::move(name), static_cast<double>(lhs), static_cast<double>(rhs), slack,
          slack >= -tol::kInequality};
}

/// Ruzsa triangle inequality d[X;Y] <= d[X;Z] + d[Z;Y].
template <typename Scalar>
IneqReport check_triangle(const BasicDist<Scalar>& x, const BasicDist<Scalar>& y, const BasicDist<Scalar>& z) {
  return make_report("triangle", rdist(x, y), rdist(x, z) + rdist(z, y));
}

/// H[X+Y+Z] - H[X+Y] <= H[Y+Z] - H[Y] for independent X, Y, Z.
template <typename Scalar>
IneqReport check_madiman(const BasicDist<Scalar>& x, const BasicDist<Scalar>& y, const BasicDist<Scalar>& z) {
  const auto xy = xor_convolve(x, y);
  const Scalar lhs = entropy(xor_convolve(xy, z)) - entropy(xy);
  const Scalar rhs = entropy(xor_convolve(y, z)) - entropy(y);
  return make_report("madiman", lhs, rhs);
}

/// d[X|Z; Y|W] <= d[X;Y] + I[X:Z]/2 + I[Y:W]/2, for joints (X,Z) and (Y,W)
/// given on axes (0, 1).
template <typename Scalar>
IneqReport check_lemma51(const BasicJointDist<Scalar>& xz, const BasicJointDist<Scalar>& yw) {
  if (xz.arity() != 2 || yw.arity() != 2) throw std::invalid_argument("check_lemma51: arity-2 joints");
  const Scalar lhs = cond_rdist<Scalar>({xz, 0, AxisSet{1}}, {yw, 0, AxisSet{1}});
  const Scalar rhs = rdist(xz.marginal_dist(0), yw.marginal_dist(0)) +
                     mutual_info(xz, AxisSet{0}, AxisSet{1}) / 2 + mutual_info(yw, AxisSet{0}, AxisSet{1}) / 2;
  return make_report("lemma51_cond_dist", lhs, rhs);
}

/// Joint of (Y, Y + Z) for independent Y, Z.
template <typename Scalar>
BasicJointDist<Scalar> with_sum(const BasicDist<Scalar>& y, const BasicDist<Scalar>& z) {
  return pushforward(product(y, z), {AxisSet{0}, AxisSet{0, 1}}, {"Y", "Y+Z"});
}

/// For Y, Z independent:
///   d[X; Y+Z] - d[X;Y] <= (H[Y+Z] - H[Y]) / 2
///   d[X; Y | Y+Z] - d[X;Y] <= (H[Y+Z] - H[Z]) / 2
template <typename Scalar>
std::pair<IneqReport, IneqReport> check_lemma52(const BasicDist<Scalar>& x, const BasicDist<Scalar>& y,
                                                const BasicDist<Scalar>& z) {
  const auto yz = xor_convolve(y, z);
  const Scalar dxy = rdist(x, y);
  const Scalar h_yz = entropy(yz);
  auto first = make_report("lemma52_sum", rdist(x, yz) - dxy, (h_yz - entropy(y)) / 2);
  const Scalar cond = cond_rdist(unconditioned(x), BasicCondDist<Scalar>{with_sum(y, z), 0, AxisSet{1}});
  auto second = make_report("lemma52_fibre", cond - dxy, (h_yz - entropy(z)) / 2);
  return {std::move(first), std::move(second)};
}

/// For Y, Z, Z' independent:
///   d[X; Y+Z | Y+Z+Z'] - d[X;Y] <= (H[Y+Z+Z'] + H[Y+Z] - H[Y] - H[Z']) / 2
template <typename Scalar>
IneqReport check_lemma71(const BasicDist<Scalar>& x, const BasicDist<Scalar>& y, const BasicDist<Scalar>& z,
                         const BasicDist<Scalar>& zp) {
  const auto yz = xor_convolve(y, z);
  const auto j = with_sum(yz, zp);
  const Scalar lhs = cond_rdist(unconditioned(x), BasicCondDist<Scalar>{j, 0, AxisSet{1}}) - rdist(x, y);
  const Scalar rhs = (entropy(j.marginal_dist(1)) + entropy(yz) - entropy(y) - entropy(zp)) / 2;
  return make_report("lemma71", lhs, rhs);
}

/// |H[X] - H[Y]| <= 2 d[X;Y].
template <typename Scalar>
IneqReport check_rdist_diff(const BasicDist<Scalar>& x, const BasicDist<Scalar>& y) {
  using std::abs;
  return make_report("rdist_diff", abs(entropy(x) - entropy(y)), 2 * rdist(x, y));
}

/// H[X | Y, Z] <= H[X | Z] on a joint (X, Y, Z).
template <typename Scalar>
IneqReport check_submodularity(const BasicJointDist<Scalar>& xyz) {
  if (xyz.arity() != 3) throw std::invalid_argument("check_submodularity: arity-3 joint");
  return make_report("submodularity", cond_entropy(xyz, AxisSet{0}, AxisSet{1, 2}),
                     cond_entropy(xyz, AxisSet{0}, AxisSet{2}));
}

/// max(H[X], H[Y]) - I[X:Y] <= H[X + Y] on a joint (X, Y).
template <typename Scalar>
IneqReport check_sumset_lower(const BasicJointDist<Scalar>& xy) {
  if (xy.arity() != 2) throw std::invalid_argument("check_sumset_lower: arity-2 joint");
  using std::max;
  const Scalar lhs = max(joint_entropy(xy, AxisSet{0}), joint_entropy(xy, AxisSet{1})) -
                     mutual_info(xy, AxisSet{0}, AxisSet{1});
  const auto sum = pushforward(xy, {AxisSet{0, 1}});
  return make_report("sumset_lower", lhs, joint_entropy(sum, AxisSet{0}));
}

}  // namespace pfr
