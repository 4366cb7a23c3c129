#pragma once

// Entropic Balog-Szemeredi-Gowers, conditionally independent trials, and the
// endgame: the (U, V, S) table built from two independent copies of (X1, X2),
// and the improved pair extracted from a triple T1 + T2 + T3 = 0.

#include <array>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pfr/dist.hpp"
#include "pfr/ruzsa.hpp"

namespace pfr {

/// Raised when a table would exceed the configured size budget.
class CostGuardError : public std::length_error {
 public:
  using std::length_error::length_error;
};

struct BsgReport {
  double lhs = 0;   // sum_z p(z) d[(A|Z=z); (B|Z=z)]
  double i_ab = 0;  // I[A:B]
  double rhs = 0;   // 3 I[A:B] + 2 H[Z] - H[A] - H[B]
  double slack = 0;
  bool holds = true;
};

/// Balog-Szemeredi-Gowers bound for a joint (A, B) with Z = A + B.
template <typename Scalar>
BsgReport bsg_check(const BasicJointDist<Scalar>& ab) {
  if (ab.arity() != 2) throw std::invalid_argument("bsg_check: arity-2 joint");
  const auto abz = pushforward(ab, {AxisSet{0}, AxisSet{1}, AxisSet{0, 1}}, {"A", "B", "Z"});
  const auto sa = slices(abz, 0, AxisSet{2});
  const auto sb = slices(abz, 1, AxisSet{2});
  Scalar lhs(0);
  for (std::size_t i = 0; i < sa.size(); ++i) lhs += sa[i].mass * rdist(sa[i].dist, sb[i].dist);
  const Scalar h_a = joint_entropy(abz, AxisSet{0});
  const Scalar h_b = joint_entropy(abz, AxisSet{1});
  const Scalar i_ab = h_a + h_b - joint_entropy(abz, AxisSet{0, 1});
  const Scalar rhs = 3 * i_ab + 2 * joint_entropy(abz, AxisSet{2}) - h_a - h_b;
  BsgReport r;
  r.lhs = static_cast<double>(lhs);
  r.i_ab = static_cast<double>(i_ab);
  r.rhs = static_cast<double>(rhs);
  r.slack = r.rhs - r.lhs;
  r.holds = r.slack >= -tol::kInequality;
  return r;
}

/// H[X1, X2, Y] for conditionally independent trials X1, X2 of X relative to
/// Y, on a joint (X, Y): 2 H[X,Y] - H[Y].
template <typename Scalar>
Scalar cond_indep_trials_entropy(const BasicJointDist<Scalar>& xy) {
  if (xy.arity() != 2) throw std::invalid_argument("cond_indep_trials_entropy: arity-2 joint");
  return 2 * joint_entropy(xy, AxisSet{0, 1}) - joint_entropy(xy, AxisSet{1});
}

/// Joint law of (U, V, S) = (X1+X2, X1~+X2, X1+X2+X1~+X2~) with derived
/// statistics. W = X1 + X1~ equals U + V and is never stored.
template <typename Scalar>
struct BasicEndgameTables {
  BasicJointDist<Scalar> joint_uvs;
  Scalar i1{};   // I[U:V|S]
  Scalar i2{};   // I[W:U|S]
  Scalar i3{};   // I[V:W|S]
  Scalar h_s{};  // H[S]
  Scalar k{};    // d[X1;X2]
};

using EndgameTables = BasicEndgameTables<Real>;

struct EndgameOptions {
  int max_dense_dim = 7;
  double max_sparse_terms = 5e7;  // bound on |supp X1|^2 |supp X2|^2
};

namespace detail {

/// Entropy of the image of J under key -> f(key), f producing `bits`-bit keys.
template <typename Scalar, typename F>
Scalar image_entropy(const BasicJointDist<Scalar>& j, int bits, F&& f) {
  KeyAccumulator<Scalar> acc(bits);
  j.for_each([&](Key k, Scalar w) { acc.add(f(k), w); });
  return acc.entropy();
}

template <typename Scalar>
void fill_stats(BasicEndgameTables<Scalar>& t) {
  const auto& j = t.joint_uvs;
  const int n = j.dim();
  const Key mask = (Key{1} << n) - 1;
  const Scalar h_uvs = joint_entropy(j, AxisSet{0, 1, 2});
  const Scalar h_s = joint_entropy(j, AxisSet{2});
  const Scalar h_us = joint_entropy(j, AxisSet{0, 2});
  const Scalar h_vs = joint_entropy(j, AxisSet{1, 2});
  const Scalar h_ws = image_entropy(j, 2 * n, [&](Key k) { return ((k ^ (k >> n)) & mask) | ((k >> (2 * n)) << n); });
  t.h_s = h_s;
  t.i1 = h_us + h_vs - h_uvs - h_s;
  t.i2 = h_ws + h_us - h_uvs - h_s;
  t.i3 = h_vs + h_ws - h_uvs - h_s;
}

}  // namespace detail

/// Builds the (U, V, S) table from the single-sum factorization
///   p(u,v,s) = sum_x2 p2(x2) p1(u+x2) p1(v+x2) p2(s+u+v+x2),
/// evaluating the inner sum over x2 as a convolution in s for each (u, v).
/// Above `max_dense_dim` the table is built sparsely from the supports.
template <typename Scalar>
BasicEndgameTables<Scalar> endgame_tables(const BasicDist<Scalar>& x1, const BasicDist<Scalar>& x2,
                                          const EndgameOptions& opt = {}) {
  if (x1.dim() != x2.dim()) throw std::invalid_argument("endgame_tables: dimension mismatch");
  const int n = x1.dim();
  if (3 * n > 63) throw std::invalid_argument("endgame_tables: dimension too large");
  using Vector = typename BasicDist<Scalar>::Vector;
  const auto s1 = x1.sparse();
  const auto s2 = x2.sparse();
  const Eigen::Index len = Eigen::Index{1} << n;
  JointEntries<Scalar> entries;

  if (n <= opt.max_dense_dim) {
    const auto& p1 = x1.weights();
    const auto& p2 = x2.weights();
    Vector p2_hat = p2;
    walsh_hadamard(p2_hat);
    const auto sums = xor_convolve(x1, x2).support();  // support of U and of V
    Vector f(len), g(len);
    SparseWeights<Scalar> fs;
    for (Elem u : sums) {
      for (Elem v : sums) {
        fs.clear();
        for (const auto& [y, q] : s2) {
          const Scalar w = q * p1(u ^ y) * p1(v ^ y);
          if (w > Scalar(0)) fs.emplace_back(y, w);
        }
        if (fs.empty()) continue;
        const Key base = Key{u} | (Key{v} << n);
        const Elem shift = u ^ v;
        if (static_cast<double>(fs.size()) * static_cast<double>(s2.size()) < static_cast<double>(len) * n) {
          for (const auto& [y, w] : fs) {
            for (const auto& [c, q] : s2) entries.emplace_back(base | (Key{y ^ c ^ shift} << (2 * n)), w * q);
          }
        } else {
          f.setZero();
          for (const auto& [y, w] : fs) f(y) = w;
          walsh_hadamard(f);
          g = f.cwiseProduct(p2_hat);
          walsh_hadamard(g);
          g /= static_cast<Scalar>(len);
          const Scalar cut = g.maxCoeff() * Scalar(tol::kNegligible);
          for (Eigen::Index r = 0; r < len; ++r) {
            if (g(r) > cut) entries.emplace_back(base | (Key{static_cast<Elem>(r) ^ shift} << (2 * n)), g(r));
          }
        }
      }
    }
  } else {
    const double terms = static_cast<double>(s1.size()) * static_cast<double>(s1.size()) *
                         static_cast<double>(s2.size()) * static_cast<double>(s2.size());
    if (terms > opt.max_sparse_terms) {
      throw CostGuardError("endgame_tables: support product exceeds the configured budget");
    }
    for (const auto& [a, pa] : s1) {
      for (const auto& [b, pb] : s2) {
        for (const auto& [c, pc] : s1) {
          for (const auto& [d, pd] : s2) {
            const Key key = Key{a ^ b} | (Key{c ^ b} << n) | (Key{a ^ b ^ c ^ d} << (2 * n));
            entries.emplace_back(key, pa * pb * pc * pd);
          }
        }
      }
    }
  }

  BasicEndgameTables<Scalar> t;
  t.joint_uvs = BasicJointDist<Scalar>(n, 3, {"U", "V", "S"}, std::move(entries));
  t.k = rdist(x1, x2);
  detail::fill_stats(t);
  return t;
}

/// Pair chosen from a triple (T1, T2, T3 = T1 + T2).
template <typename Scalar>
struct BasicEndgameChoice {
  BasicDist<Scalar> t1p;
  BasicDist<Scalar> t2p;
  Scalar psi{};      // value at the chosen pair
  Scalar average{};  // average of psi over the six permutations and all fibres
  Scalar bound{};    // delta + eta/3 (delta + sum_ij (d[X0_i;T_j] - d[X0_i;X_i]))
  Scalar delta{};    // sum_{i<j} I[T_i:T_j]
  std::array<int, 3> perm{};  // (alpha, beta, gamma), 0-based
  Elem t = 0;                 // conditioning value of T_gamma
};

using EndgameChoice = BasicEndgameChoice<Real>;

/// psi[Y1;Y2] = d[Y1;Y2] + eta (d[X0_1;Y1] - d[X0_1;X1]) + eta (d[X0_2;Y2] - d[X0_2;X2]).
template <typename Scalar>
Scalar psi(const BasicDist<Scalar>& y1, const BasicDist<Scalar>& y2, const BasicRefPair<Scalar>& ref,
           const BasicDist<Scalar>& x1, const BasicDist<Scalar>& x2) {
  return rdist(y1, y2) + ref.eta * (rdist(ref.x0_1, y1) - rdist(ref.x0_1, x1)) +
         ref.eta * (rdist(ref.x0_2, y2) - rdist(ref.x0_2, x2));
}

/// Given (T1, T2) with T3 := T1 + T2, searches every permutation
/// (alpha, beta, gamma) and every t in supp T_gamma for the pair
/// ((T_alpha | T_gamma = t), (T_beta | T_gamma = t)) of least psi. Ties go to
/// the lexicographically first (gamma, alpha, beta, t).
template <typename Scalar>
BasicEndgameChoice<Scalar> abstract_endgame(const BasicJointDist<Scalar>& t12, const BasicRefPair<Scalar>& ref,
                                            const BasicDist<Scalar>& x1, const BasicDist<Scalar>& x2) {
  if (t12.arity() != 2) throw std::invalid_argument("abstract_endgame: arity-2 joint");
  if (t12.support_size() == 0) throw std::invalid_argument("abstract_endgame: empty support");
  const auto t = pushforward(t12, {AxisSet{0}, AxisSet{1}, AxisSet{0, 1}}, {"T1", "T2", "T3"});
  const Scalar eta = ref.eta;
  const Scalar d01 = rdist(ref.x0_1, x1);
  const Scalar d02 = rdist(ref.x0_2, x2);

  BasicEndgameChoice<Scalar> best;
  best.delta = mutual_info(t, AxisSet{0}, AxisSet{1}) + mutual_info(t, AxisSet{0}, AxisSet{2}) +
               mutual_info(t, AxisSet{1}, AxisSet{2});
  Scalar spread(0);
  for (int j = 0; j < 3; ++j) {
    const auto tj = t.marginal_dist(j);
    spread += rdist(ref.x0_1, tj) - d01 + rdist(ref.x0_2, tj) - d02;
  }
  best.bound = best.delta + eta / 3 * (best.delta + spread);

  // fib[target][gamma] = fibres of T_target given T_gamma, in t order.
  std::array<std::array<std::vector<Slice<Scalar>>, 3>, 3> fib;
  std::array<std::array<std::vector<Scalar>, 3>, 3> h, to_x01, to_x02;
  for (int g = 0; g < 3; ++g) {
    for (int a = 0; a < 3; ++a) {
      if (a == g) continue;
      fib[a][g] = slices(t, a, AxisSet{g});
      for (const auto& s : fib[a][g]) {
        h[a][g].push_back(entropy(s.dist));
        to_x01[a][g].push_back(rdist(ref.x0_1, s.dist));
        to_x02[a][g].push_back(rdist(ref.x0_2, s.dist));
      }
    }
  }

  Scalar best_psi = std::numeric_limits<Scalar>::infinity();
  Scalar total(0);
  for (int g = 0; g < 3; ++g) {
    for (int a = 0; a < 3; ++a) {
      if (a == g) continue;
      const int b = 3 - a - g;
      const auto& fa = fib[a][g];
      const auto& fb = fib[b][g];
      for (std::size_t i = 0; i < fa.size(); ++i) {
        const Scalar value = rdist(fa[i].dist, fb[i].dist, h[a][g][i], h[b][g][i]) +
                             eta * (to_x01[a][g][i] - d01) + eta * (to_x02[b][g][i] - d02);
        total += fa[i].mass * value;
        if (value < best_psi) {
          best_psi = value;
          best.t1p = fa[i].dist;
          best.t2p = fb[i].dist;
          best.perm = {a, b, g};
          best.t = static_cast<Elem>(fa[i].given);
        }
      }
    }
  }
  best.psi = best_psi;
  best.average = total / 6;
  return best;
}

}  // namespace pfr
