#pragma once

// Probability distributions on F_2^n and on (F_2^n)^k for k <= 4, with the
// Shannon entropy calculus used throughout the library. Entropies are in nats.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pfr/group.hpp"
#include "pfr/wht.hpp"

namespace pfr {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

namespace tol {
inline constexpr double kMass = 1e-12;
inline constexpr double kIdentity = 1e-10;
inline constexpr double kInequality = 1e-9;
/// Entries below this fraction of the largest entry count as zero.
inline constexpr double kNegligible = 1e-15;
/// Pre-clamp WHT deviation worth reporting.
inline constexpr double kWhtReport = 1e-9;
}  // namespace tol

template <typename Scalar>
using SparseWeights = std::vector<std::pair<Elem, Scalar>>;

namespace detail {

template <typename Scalar>
Scalar entropy_term(Scalar p) {
  using std::log;
  return p > Scalar(0) ? -p * log(p) : Scalar(0);
}

/// Entropy of a (possibly unnormalized) weight list; weights are divided by
/// their total first and entries below kNegligible * max are dropped.
template <typename Scalar, typename Range>
Scalar entropy_of(const Range& weights) {
  Scalar total(0), top(0);
  for (Scalar w : weights) {
    if (w > top) top = w;
  }
  const Scalar cut = top * Scalar(tol::kNegligible);
  for (Scalar w : weights) {
    if (w > cut) total += w;
  }
  if (total <= Scalar(0)) return Scalar(0);
  Scalar h(0);
  for (Scalar w : weights) {
    if (w > cut) h += entropy_term(w / total);
  }
  return h;
}

}  // namespace detail

/// A probability distribution on F_2^n, held as a dense table of 2^n weights.
template <typename Scalar>
class BasicDist {
 public:
  using Vector = Vec<Scalar>;

  BasicDist() : dim_(0), w_(Vector::Ones(1)) {}

  /// Normalizes `weights` to unit mass. Throws on negative entries, zero
  /// total mass, or a length other than 2^dim.
  BasicDist(int dim, Vector weights) : dim_(dim), w_(std::move(weights)) {
    check_dim(dim);
    if (static_cast<std::uint64_t>(w_.size()) != group_order(dim)) {
      throw std::invalid_argument("weight table length must be 2^dim");
    }
    if ((w_.array() < Scalar(0)).any()) throw std::invalid_argument("negative probability weight");
    const Scalar total = w_.sum();
    if (!(total > Scalar(0))) throw std::invalid_argument("distribution has zero total mass");
    w_ /= total;
  }

  static BasicDist point(int dim, Elem x) {
    check_dim(dim);
    check_elem(x, dim);
    Vector w = Vector::Zero(static_cast<Eigen::Index>(group_order(dim)));
    w(x) = Scalar(1);
    return BasicDist(dim, std::move(w));
  }

  static BasicDist uniform(std::span<const Elem> set, int dim) {
    check_dim(dim);
    if (set.empty()) throw std::invalid_argument("uniform distribution on an empty set");
    Vector w = Vector::Zero(static_cast<Eigen::Index>(group_order(dim)));
    for (Elem x : set) {
      check_elem(x, dim);
      w(x) = Scalar(1);
    }
    return BasicDist(dim, std::move(w));
  }

  static BasicDist uniform(const SubgroupBasis& h) {
    return uniform(h.enumerate(), h.ambient_dim());
  }

  static BasicDist from_sparse(int dim, const SparseWeights<Scalar>& entries) {
    check_dim(dim);
    Vector w = Vector::Zero(static_cast<Eigen::Index>(group_order(dim)));
    for (const auto& [x, p] : entries) {
      check_elem(x, dim);
      w(x) += p;
    }
    return BasicDist(dim, std::move(w));
  }

  int dim() const { return dim_; }
  std::size_t size() const { return static_cast<std::size_t>(w_.size()); }
  const Vector& weights() const { return w_; }
  Scalar operator()(Elem x) const { return w_(x); }

  std::vector<Elem> support() const {
    std::vector<Elem> out;
    for (Eigen::Index i = 0; i < w_.size(); ++i) {
      if (w_(i) > Scalar(0)) out.push_back(static_cast<Elem>(i));
    }
    return out;
  }

  std::size_t support_size() const { return static_cast<std::size_t>((w_.array() > Scalar(0)).count()); }

  SparseWeights<Scalar> sparse() const {
    SparseWeights<Scalar> out;
    for (Eigen::Index i = 0; i < w_.size(); ++i) {
      if (w_(i) > Scalar(0)) out.emplace_back(static_cast<Elem>(i), w_(i));
    }
    return out;
  }

  /// Most likely element; the smallest one on ties.
  Elem mode() const {
    Eigen::Index best = 0;
    w_.maxCoeff(&best);
    return static_cast<Elem>(best);
  }

  /// Distribution of X + g.
  BasicDist translate(Elem g) const {
    check_elem(g, dim_);
    Vector w(w_.size());
    for (Eigen::Index i = 0; i < w_.size(); ++i) w(i ^ static_cast<Eigen::Index>(g)) = w_(i);
    return BasicDist(dim_, std::move(w));
  }

  /// Zeroes weights below rel * max and renormalizes.
  BasicDist pruned(Scalar rel) const {
    const Scalar cut = w_.maxCoeff() * rel;
    Vector w = (w_.array() < cut).select(Scalar(0), w_);
    return BasicDist(dim_, std::move(w));
  }

  template <typename To>
  BasicDist<To> cast() const {
    return BasicDist<To>(dim_, w_.template cast<To>());
  }

  friend bool operator==(const BasicDist& a, const BasicDist& b) {
    return a.dim_ == b.dim_ && a.w_ == b.w_;
  }

 private:
  int dim_;
  Vector w_;
};

template <typename Scalar>
Scalar entropy(const BasicDist<Scalar>& x) {
  return detail::entropy_of<Scalar>(x.weights().reshaped());
}

template <typename Scalar>
Scalar entropy(const SparseWeights<Scalar>& entries) {
  std::vector<Scalar> w;
  w.reserve(entries.size());
  for (const auto& e : entries) w.push_back(e.second);
  return detail::entropy_of<Scalar>(w);
}

template <typename Scalar>
BasicDist<Scalar> uniform_on(std::span<const Elem> set, int dim) {
  return BasicDist<Scalar>::uniform(set, dim);
}

/// Diagnostics from the transform path of xor_convolve.
struct ConvolveStats {
  bool used_transform = false;
  double negative_deviation = 0.0;  // most negative pre-clamp entry, as a magnitude
  bool reported = false;            // deviation exceeded tol::kWhtReport
};

/// Distribution of X' + Y' for independent copies X', Y'. Uses support-pair
/// enumeration when |supp X| * |supp Y| < n * 2^n and the fast
/// Walsh-Hadamard transform otherwise.
template <typename Scalar>
BasicDist<Scalar> xor_convolve(const BasicDist<Scalar>& x, const BasicDist<Scalar>& y,
                               ConvolveStats* stats = nullptr) {
  if (x.dim() != y.dim()) throw std::invalid_argument("xor_convolve: dimension mismatch");
  const int n = x.dim();
  using Vector = typename BasicDist<Scalar>::Vector;
  const auto sx = x.sparse();
  const auto sy = y.sparse();
  const double pairs = static_cast<double>(sx.size()) * static_cast<double>(sy.size());
  if (pairs < static_cast<double>(group_order(n)) * std::max(n, 1)) {
    Vector w = Vector::Zero(static_cast<Eigen::Index>(x.size()));
    for (const auto& [a, pa] : sx) {
      for (const auto& [b, pb] : sy) w(a ^ b) += pa * pb;
    }
    if (stats) *stats = ConvolveStats{};
    return BasicDist<Scalar>(n, std::move(w));
  }
  Vector a = x.weights();
  Vector b = y.weights();
  walsh_hadamard(a);
  walsh_hadamard(b);
  Vector c = a.cwiseProduct(b);
  walsh_hadamard(c);
  c /= static_cast<Scalar>(group_order(n));
  const Scalar low = c.minCoeff();
  const Scalar cut = c.maxCoeff() * Scalar(tol::kNegligible);
  c = (c.array() <= cut).select(Scalar(0), c);
  if (stats) {
    stats->used_transform = true;
    stats->negative_deviation = low < Scalar(0) ? static_cast<double>(-low) : 0.0;
    stats->reported = stats->negative_deviation > tol::kWhtReport;
  }
  return BasicDist<Scalar>(n, std::move(c));
}

/// Sparse-only variant: support-pair enumeration into a sorted map.
template <typename Scalar>
SparseWeights<Scalar> xor_convolve(const SparseWeights<Scalar>& x, const SparseWeights<Scalar>& y) {
  std::unordered_map<Elem, Scalar> acc;
  for (const auto& [a, pa] : x) {
    for (const auto& [b, pb] : y) acc[a ^ b] += pa * pb;
  }
  SparseWeights<Scalar> out(acc.begin(), acc.end());
  std::sort(out.begin(), out.end());
  return out;
}

using Key = std::uint64_t;

/// A subset of the axes of a JointDist, as a bitmask.
class AxisSet {
 public:
  constexpr AxisSet() = default;
  constexpr AxisSet(std::initializer_list<int> axes) {
    for (int a : axes) mask_ |= 1u << a;
  }
  static constexpr AxisSet from_mask(unsigned mask) {
    AxisSet s;
    s.mask_ = mask;
    return s;
  }
  static constexpr AxisSet all(int arity) { return from_mask((1u << arity) - 1u); }

  constexpr unsigned mask() const { return mask_; }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr bool has(int axis) const { return (mask_ >> axis) & 1u; }
  constexpr int count() const { return __builtin_popcount(mask_); }
  constexpr bool disjoint(AxisSet o) const { return (mask_ & o.mask_) == 0; }

  friend constexpr AxisSet operator|(AxisSet a, AxisSet b) { return from_mask(a.mask_ | b.mask_); }
  friend constexpr bool operator==(AxisSet, AxisSet) = default;

 private:
  unsigned mask_ = 0;
};

template <typename Scalar>
using JointEntries = std::vector<std::pair<Key, Scalar>>;

namespace detail {

/// Collects weights by key, densely when the key space is small enough.
template <typename Scalar>
class KeyAccumulator {
 public:
  explicit KeyAccumulator(int bits) : dense_(bits <= 24) {
    if (dense_) table_ = Vec<Scalar>::Zero(Eigen::Index{1} << bits);
  }
  void add(Key k, Scalar w) {
    if (dense_) {
      table_(static_cast<Eigen::Index>(k)) += w;
    } else {
      map_[k] += w;
    }
  }
  JointEntries<Scalar> entries() const {
    JointEntries<Scalar> out;
    if (dense_) {
      for (Eigen::Index i = 0; i < table_.size(); ++i) {
        if (table_(i) > Scalar(0)) out.emplace_back(static_cast<Key>(i), table_(i));
      }
    } else {
      for (const auto& [k, w] : map_) {
        if (w > Scalar(0)) out.emplace_back(k, w);
      }
      std::sort(out.begin(), out.end());
    }
    return out;
  }
  Scalar entropy() const {
    if (dense_) return entropy_of<Scalar>(table_.reshaped());
    std::vector<Scalar> w;
    w.reserve(map_.size());
    for (const auto& kv : map_) w.push_back(kv.second);
    return entropy_of<Scalar>(w);
  }

 private:
  bool dense_;
  Vec<Scalar> table_;
  std::unordered_map<Key, Scalar> map_;
};

}  // namespace detail

/// A probability distribution on (F_2^n)^k, 1 <= k <= 4. Axis i occupies
/// bits [i*n, (i+1)*n) of the key. The table is dense when n*k <= 24 and a
/// sorted sparse entry list otherwise.
template <typename Scalar>
class BasicJointDist {
 public:
  using Vector = Vec<Scalar>;
  static constexpr int kDenseBits = 24;
  static constexpr int kMaxArity = 4;

  BasicJointDist() = default;

  /// Merges duplicate keys and normalizes.
  BasicJointDist(int dim, int arity, std::vector<std::string> labels, JointEntries<Scalar> entries)
      : dim_(dim), arity_(arity), labels_(std::move(labels)) {
    validate_shape();
    detail::KeyAccumulator<Scalar> acc(bits());
    for (const auto& [k, w] : entries) {
      if (bits() < 64 && (k >> bits()) != 0) throw std::invalid_argument("joint key out of range");
      if (w < Scalar(0)) throw std::invalid_argument("negative probability weight");
      acc.add(k, w);
    }
    assign(acc.entries());
  }

  static BasicJointDist from_dist(const BasicDist<Scalar>& x, std::string label = "X") {
    JointEntries<Scalar> e;
    for (const auto& [k, w] : x.sparse()) e.emplace_back(k, w);
    return BasicJointDist(x.dim(), 1, {std::move(label)}, std::move(e));
  }

  int dim() const { return dim_; }
  int arity() const { return arity_; }
  int bits() const { return dim_ * arity_; }
  bool is_dense() const { return dense_; }
  const std::vector<std::string>& labels() const { return labels_; }
  Elem axis_mask() const { return static_cast<Elem>(group_order(dim_) - 1); }

  int axis(std::string_view label) const {
    for (int i = 0; i < arity_; ++i) {
      if (labels_[static_cast<std::size_t>(i)] == label) return i;
    }
    throw std::invalid_argument("unknown axis label '" + std::string(label) + "'");
  }

  AxisSet axes(std::initializer_list<std::string_view> names) const {
    unsigned m = 0;
    for (auto nm : names) m |= 1u << axis(nm);
    return AxisSet::from_mask(m);
  }

  Elem component(Key key, int axis) const {
    return static_cast<Elem>(key >> (axis * dim_)) & axis_mask();
  }

  Key pack(std::span<const Elem> parts) const {
    Key k = 0;
    for (std::size_t i = 0; i < parts.size(); ++i) k |= Key{parts[i]} << (static_cast<int>(i) * dim_);
    return k;
  }

  /// Packs the components on `axes` into a compact key, lowest axis first.
  Key project(Key key, AxisSet axes) const {
    Key out = 0;
    int slot = 0;
    for (int a = 0; a < arity_; ++a) {
      if (axes.has(a)) out |= Key{component(key, a)} << (slot++ * dim_);
    }
    return out;
  }

  /// Calls f(key, weight) for every positive-mass entry in key order.
  template <typename F>
  void for_each(F&& f) const {
    if (dense_) {
      for (Eigen::Index i = 0; i < dense_table_.size(); ++i) {
        if (dense_table_(i) > Scalar(0)) f(static_cast<Key>(i), dense_table_(i));
      }
    } else {
      for (const auto& [k, w] : sparse_) f(k, w);
    }
  }

  JointEntries<Scalar> entries() const {
    JointEntries<Scalar> out;
    for_each([&](Key k, Scalar w) { out.emplace_back(k, w); });
    return out;
  }

  std::size_t support_size() const {
    std::size_t n = 0;
    for_each([&](Key, Scalar) { ++n; });
    return n;
  }

  Scalar weight(Key key) const {
    if (dense_) return dense_table_(static_cast<Eigen::Index>(key));
    auto it = std::lower_bound(sparse_.begin(), sparse_.end(), std::make_pair(key, Scalar(0)),
                               [](const auto& a, const auto& b) { return a.first < b.first; });
    return it != sparse_.end() && it->first == key ? it->second : Scalar(0);
  }

  BasicJointDist marginal(AxisSet keep) const {
    check_axes(keep);
    if (keep.empty()) throw std::invalid_argument("marginal needs at least one axis");
    detail::KeyAccumulator<Scalar> acc(keep.count() * dim_);
    for_each([&](Key k, Scalar w) { acc.add(project(k, keep), w); });
    std::vector<std::string> labels;
    for (int a = 0; a < arity_; ++a) {
      if (keep.has(a)) labels.push_back(labels_[static_cast<std::size_t>(a)]);
    }
    BasicJointDist out;
    out.dim_ = dim_;
    out.arity_ = keep.count();
    out.labels_ = std::move(labels);
    out.assign(acc.entries());
    return out;
  }

  BasicDist<Scalar> marginal_dist(int axis) const {
    check_axes(AxisSet{axis});
    Vector w = Vector::Zero(static_cast<Eigen::Index>(group_order(dim_)));
    for_each([&](Key k, Scalar p) { w(component(k, axis)) += p; });
    return BasicDist<Scalar>(dim_, std::move(w));
  }

  /// Single-axis joint as a Dist.
  BasicDist<Scalar> to_dist() const {
    if (arity_ != 1) throw std::invalid_argument("to_dist needs an arity-1 joint");
    return marginal_dist(0);
  }

  /// Re-stores the same distribution in the other representation.
  BasicJointDist with_storage(bool dense) const {
    BasicJointDist out = *this;
    out.store(entries(), dense);
    return out;
  }

  void check_axes(AxisSet s) const {
    if ((s.mask() >> arity_) != 0) throw std::invalid_argument("axis index out of range");
  }

 private:
  void validate_shape() {
    check_dim(dim_);
    if (arity_ < 1 || arity_ > kMaxArity) throw std::invalid_argument("joint arity must be 1..4");
    if (bits() > 64) throw std::invalid_argument("joint key wider than 64 bits");
    if (labels_.empty()) {
      for (int i = 0; i < arity_; ++i) labels_.push_back("X" + std::to_string(i));
    }
    if (static_cast<int>(labels_.size()) != arity_) {
      throw std::invalid_argument("one label per axis required");
    }
  }

  void assign(JointEntries<Scalar> entries) {
    Scalar total(0);
    for (const auto& e : entries) total += e.second;
    if (!(total > Scalar(0))) throw std::invalid_argument("joint distribution has zero total mass");
    for (auto& e : entries) e.second /= total;
    store(std::move(entries), bits() <= kDenseBits);
  }

  void store(JointEntries<Scalar> entries, bool dense) {
    dense_ = dense;
    if (dense_) {
      if (bits() > kDenseBits) throw std::invalid_argument("table too large for dense storage");
      dense_table_ = Vector::Zero(Eigen::Index{1} << bits());
      for (const auto& [k, w] : entries) dense_table_(static_cast<Eigen::Index>(k)) = w;
      sparse_.clear();
    } else {
      sparse_ = std::move(entries);
      dense_table_.resize(0);
    }
  }

  int dim_ = 0;
  int arity_ = 0;
  std::vector<std::string> labels_;
  bool dense_ = true;
  Vector dense_table_;
  JointEntries<Scalar> sparse_;
};

template <typename Scalar>
Scalar joint_entropy(const BasicJointDist<Scalar>& j, AxisSet axes) {
  j.check_axes(axes);
  if (axes.empty()) throw std::invalid_argument("joint_entropy needs at least one axis");
  detail::KeyAccumulator<Scalar> acc(axes.count() * j.dim());
  j.for_each([&](Key k, Scalar w) { acc.add(j.project(k, axes), w); });
  return acc.entropy();
}

/// H[target | given], evaluated slice by slice: sum over given values y of
/// p(y) * H[target | given = y].
template <typename Scalar>
Scalar cond_entropy(const BasicJointDist<Scalar>& j, AxisSet target, AxisSet given) {
  j.check_axes(target | given);
  if (target.empty()) throw std::invalid_argument("cond_entropy needs a target axis");
  if (!target.disjoint(given)) throw std::invalid_argument("cond_entropy: overlapping axes");
  if (given.empty()) return joint_entropy(j, target);
  struct Row {
    Key given;
    Key target;
    Scalar w;
  };
  std::vector<Row> rows;
  {
    detail::KeyAccumulator<Scalar> acc((target | given).count() * j.dim());
    // Key layout of the marginal: given bits low, target bits high.
    const int shift = given.count() * j.dim();
    j.for_each([&](Key k, Scalar w) {
      acc.add(j.project(k, given) | (j.project(k, target) << shift), w);
    });
    const Key low_mask = shift >= 64 ? ~Key{0} : (Key{1} << shift) - 1;
    for (const auto& [k, w] : acc.entries()) rows.push_back({k & low_mask, k >> shift, w});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.given != b.given ? a.given < b.given : a.target < b.target;
  });
  Scalar h(0);
  std::vector<Scalar> slice;
  for (std::size_t i = 0; i < rows.size();) {
    std::size_t e = i;
    Scalar mass(0);
    slice.clear();
    while (e < rows.size() && rows[e].given == rows[i].given) {
      mass += rows[e].w;
      slice.push_back(rows[e].w);
      ++e;
    }
    h += mass * detail::entropy_of<Scalar>(slice);
    i = e;
  }
  return h;
}

template <typename Scalar>
Scalar mutual_info(const BasicJointDist<Scalar>& j, AxisSet a, AxisSet b) {
  if (!a.disjoint(b)) throw std::invalid_argument("mutual_info: overlapping axes");
  return joint_entropy(j, a) + joint_entropy(j, b) - joint_entropy(j, a | b);
}

/// I[a : b | c] = H[a,c] + H[b,c] - H[a,b,c] - H[c].
template <typename Scalar>
Scalar cond_mutual_info(const BasicJointDist<Scalar>& j, AxisSet a, AxisSet b, AxisSet c) {
  if (!a.disjoint(b) || !a.disjoint(c) || !b.disjoint(c)) {
    throw std::invalid_argument("cond_mutual_info: overlapping axes");
  }
  if (c.empty()) return mutual_info(j, a, b);
  return joint_entropy(j, a | c) + joint_entropy(j, b | c) - joint_entropy(j, a | b | c) -
         joint_entropy(j, c);
}

/// Joint law of independent copies of the given distributions, one axis each.
template <typename Scalar>
BasicJointDist<Scalar> product(std::span<const BasicDist<Scalar>> parts,
                               std::vector<std::string> labels = {}) {
  if (parts.empty() || parts.size() > 4) throw std::invalid_argument("product of 1..4 distributions");
  const int n = parts[0].dim();
  for (const auto& p : parts) {
    if (p.dim() != n) throw std::invalid_argument("product: dimension mismatch");
  }
  JointEntries<Scalar> cur{{0, Scalar(1)}};
  for (std::size_t i = 0; i < parts.size(); ++i) {
    JointEntries<Scalar> next;
    const auto sp = parts[i].sparse();
    next.reserve(cur.size() * sp.size());
    for (const auto& [k, w] : cur) {
      for (const auto& [x, p] : sp) next.emplace_back(k | (Key{x} << (static_cast<int>(i) * n)), w * p);
    }
    cur = std::move(next);
  }
  return BasicJointDist<Scalar>(n, static_cast<int>(parts.size()), std::move(labels), std::move(cur));
}

template <typename Scalar>
BasicJointDist<Scalar> product(const BasicDist<Scalar>& x, const BasicDist<Scalar>& y,
                               std::vector<std::string> labels = {}) {
  const BasicDist<Scalar> parts[] = {x, y};
  return product<Scalar>(parts, std::move(labels));
}

/// Independent product of two joints; the axes of b follow those of a.
template <typename Scalar>
BasicJointDist<Scalar> product(const BasicJointDist<Scalar>& a, const BasicJointDist<Scalar>& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("product: dimension mismatch");
  if (a.arity() + b.arity() > 4) throw std::invalid_argument("product: arity above 4");
  JointEntries<Scalar> out;
  const auto eb = b.entries();
  a.for_each([&](Key ka, Scalar wa) {
    for (const auto& [kb, wb] : eb) out.emplace_back(ka | (kb << a.bits()), wa * wb);
  });
  std::vector<std::string> labels = a.labels();
  labels.insert(labels.end(), b.labels().begin(), b.labels().end());
  return BasicJointDist<Scalar>(a.dim(), a.arity() + b.arity(), std::move(labels), std::move(out));
}

/// The joint of (X, X).
template <typename Scalar>
BasicJointDist<Scalar> diagonal(const BasicDist<Scalar>& x) {
  JointEntries<Scalar> e;
  for (const auto& [v, w] : x.sparse()) e.emplace_back(Key{v} | (Key{v} << x.dim()), w);
  return BasicJointDist<Scalar>(x.dim(), 2, {"X", "X'"}, std::move(e));
}

/// One input axis feeding an output coordinate, optionally through a linear map.
struct AxisTerm {
  int axis = 0;
  std::optional<LinearMap> map;
};

/// An output coordinate: XOR of its terms.
using OutputAxis = std::vector<AxisTerm>;

/// Image of J under a GF(2)-linear map of the axes. `out_dim` defaults to the
/// input dimension; linear maps on terms must map into it.
template <typename Scalar>
BasicJointDist<Scalar> pushforward(const BasicJointDist<Scalar>& j, std::span<const OutputAxis> outputs,
                                   int out_dim = -1, std::vector<std::string> labels = {}) {
  if (out_dim < 0) out_dim = j.dim();
  if (outputs.empty() || outputs.size() > 4) throw std::invalid_argument("pushforward: 1..4 outputs");
  for (const auto& out : outputs) {
    if (out.empty()) throw std::invalid_argument("pushforward: empty output coordinate");
    for (const auto& t : out) {
      if (t.axis < 0 || t.axis >= j.arity()) throw std::invalid_argument("pushforward: bad axis");
      if (t.map) {
        if (t.map->in_dim() != j.dim() || t.map->out_dim() != out_dim) {
          throw std::invalid_argument("pushforward: linear map has wrong shape");
        }
      } else if (out_dim != j.dim()) {
        throw std::invalid_argument("pushforward: plain axis needs out_dim == dim");
      }
    }
  }
  JointEntries<Scalar> e;
  j.for_each([&](Key k, Scalar w) {
    Key nk = 0;
    for (std::size_t o = 0; o < outputs.size(); ++o) {
      Elem v = 0;
      for (const auto& t : outputs[o]) {
        const Elem c = j.component(k, t.axis);
        v ^= t.map ? (*t.map)(c) : c;
      }
      nk |= Key{v} << (static_cast<int>(o) * out_dim);
    }
    e.emplace_back(nk, w);
  });
  return BasicJointDist<Scalar>(out_dim, static_cast<int>(outputs.size()), std::move(labels), std::move(e));
}

/// Each output coordinate is the XOR of the input axes in its set.
template <typename Scalar>
BasicJointDist<Scalar> pushforward(const BasicJointDist<Scalar>& j, std::initializer_list<AxisSet> sums,
                                   std::vector<std::string> labels = {}) {
  std::vector<OutputAxis> outs;
  for (AxisSet s : sums) {
    j.check_axes(s);
    OutputAxis o;
    for (int a = 0; a < j.arity(); ++a) {
      if (s.has(a)) o.push_back({a, std::nullopt});
    }
    outs.push_back(std::move(o));
  }
  return pushforward<Scalar>(j, outs, -1, std::move(labels));
}

/// Normalized slice of J on the event {axis = value}; the axis is removed.
template <typename Scalar>
BasicJointDist<Scalar> condition(const BasicJointDist<Scalar>& j, int axis, Elem value) {
  j.check_axes(AxisSet{axis});
  if (j.arity() < 2) throw std::invalid_argument("condition needs arity >= 2");
  const AxisSet rest = AxisSet::from_mask(AxisSet::all(j.arity()).mask() & ~(1u << axis));
  JointEntries<Scalar> e;
  j.for_each([&](Key k, Scalar w) {
    if (j.component(k, axis) == value) e.emplace_back(j.project(k, rest), w);
  });
  if (e.empty()) throw std::domain_error("conditioning on a zero-mass event");
  std::vector<std::string> labels = j.labels();
  labels.erase(labels.begin() + axis);
  return BasicJointDist<Scalar>(j.dim(), j.arity() - 1, std::move(labels), std::move(e));
}

/// One fibre of a conditional distribution.
template <typename Scalar>
struct Slice {
  Key given;  // packed value of the conditioning axes
  Scalar mass;
  BasicDist<Scalar> dist;  // law of the target axis on this fibre
};

/// All fibres (target | given = y) for y in the support of `given`, in key order.
template <typename Scalar>
std::vector<Slice<Scalar>> slices(const BasicJointDist<Scalar>& j, int target, AxisSet given) {
  j.check_axes(given | AxisSet{target});
  if (given.has(target)) throw std::invalid_argument("slices: target among conditioning axes");
  std::vector<std::pair<Key, std::pair<Elem, Scalar>>> rows;
  j.for_each([&](Key k, Scalar w) { rows.push_back({j.project(k, given), {j.component(k, target), w}}); });
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Slice<Scalar>> out;
  using Vector = typename BasicDist<Scalar>::Vector;
  for (std::size_t i = 0; i < rows.size();) {
    Vector w = Vector::Zero(static_cast<Eigen::Index>(group_order(j.dim())));
    Scalar mass(0);
    std::size_t e = i;
    for (; e < rows.size() && rows[e].first == rows[i].first; ++e) {
      w(rows[e].second.first) += rows[e].second.second;
      mass += rows[e].second.second;
    }
    out.push_back({rows[i].first, mass, BasicDist<Scalar>(j.dim(), std::move(w))});
    i = e;
  }
  return out;
}

/// (target | given) as a conditional distribution over a base joint.
template <typename Scalar>
struct BasicCondDist {
  BasicJointDist<Scalar> base;
  int target = 0;
  AxisSet given;
};

/// X conditioned on nothing: the base is X itself.
template <typename Scalar>
BasicCondDist<Scalar> unconditioned(const BasicDist<Scalar>& x) {
  return {BasicJointDist<Scalar>::from_dist(x), 0, AxisSet{}};
}

#ifndef PFR_SCALAR
#define PFR_SCALAR double
#endif

/// Working precision of the command-line tool; the library itself is generic.
using Real = PFR_SCALAR;
using Dist = BasicDist<Real>;
using JointDist = BasicJointDist<Real>;
using CondDist = BasicCondDist<Real>;

}  // namespace pfr
