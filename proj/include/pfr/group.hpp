#pragma once

// Exact arithmetic over F_2^n: elements are n-bit words, addition is XOR.
// Subgroups are stored as bases in reduced row-echelon form.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pfr {

/// An element of F_2^n. The ambient dimension travels with the container.
using Elem = std::uint32_t;

inline constexpr int kMaxDim = 24;

constexpr std::uint64_t group_order(int dim) { return std::uint64_t{1} << dim; }

/// Throws std::invalid_argument unless 0 <= dim <= kMaxDim.
void check_dim(int dim);
/// Throws std::invalid_argument unless x < 2^dim.
void check_elem(Elem x, int dim);

/// Parses "0b0101", "0x5" or a plain decimal integer.
Elem parse_elem(std::string_view text);
std::string format_hex(Elem x);
std::string format_bin(Elem x, int dim);

/// Subgroup of F_2^n in canonical form: rows are linearly independent, each
/// row's leading bit is a pivot that no other row has set, and pivots are
/// strictly decreasing down the list. Two subgroups are equal iff their
/// canonical bases are equal.
class SubgroupBasis {
 public:
  SubgroupBasis() = default;
  explicit SubgroupBasis(int ambient_dim);

  /// RREF basis of the span of `elems`.
  static SubgroupBasis span(std::span<const Elem> elems, int ambient_dim);
  /// Accepts rows that are already a canonical basis; throws otherwise.
  static SubgroupBasis from_rows(std::vector<Elem> rows, int ambient_dim);
  static SubgroupBasis whole(int ambient_dim);

  int ambient_dim() const { return dim_; }
  int rank() const { return static_cast<int>(rows_.size()); }
  std::uint64_t size() const { return std::uint64_t{1} << rank(); }
  const std::vector<Elem>& rows() const { return rows_; }

  /// Eliminates every pivot bit of x. The result is the smallest element of
  /// the coset x + H, so it serves as the canonical coset representative.
  Elem reduce(Elem x) const;
  bool contains(Elem x) const;

  /// Adds x to the span; returns false if x was already a member.
  bool insert(Elem x);

  /// All 2^rank members in ascending order.
  std::vector<Elem> enumerate() const;

  /// Drops highest-pivot rows until 2^rank <= bound.
  SubgroupBasis shrink_to_size(std::uint64_t bound) const;

  /// Representatives of the cosets of `sub` inside *this (sub must be a
  /// subgroup of *this), one per coset, ascending.
  std::vector<Elem> coset_representatives(const SubgroupBasis& sub) const;

  bool is_subgroup_of(const SubgroupBasis& other) const;

  friend bool operator==(const SubgroupBasis&, const SubgroupBasis&) = default;

 private:
  int dim_ = 0;
  std::vector<Elem> rows_;
};

inline bool contains(const SubgroupBasis& h, Elem x) { return h.contains(x); }
inline std::vector<Elem> enumerate(const SubgroupBasis& h) { return h.enumerate(); }
inline SubgroupBasis span(std::span<const Elem> elems, int dim) {
  return SubgroupBasis::span(elems, dim);
}
inline SubgroupBasis shrink_to_size(const SubgroupBasis& h, std::uint64_t bound) {
  return h.shrink_to_size(bound);
}

/// A GF(2)-linear map F_2^in -> F_2^out, stored by the images of the unit
/// vectors.
class LinearMap {
 public:
  LinearMap() = default;
  LinearMap(int in_dim, int out_dim, std::vector<Elem> columns);

  static LinearMap identity(int dim);
  static LinearMap zero(int in_dim, int out_dim);

  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }
  const std::vector<Elem>& columns() const { return columns_; }

  Elem operator()(Elem x) const {
    Elem y = 0;
    for (int i = 0; x != 0; ++i, x >>= 1) {
      if (x & 1u) y ^= columns_[static_cast<std::size_t>(i)];
    }
    return y;
  }

  /// Image subgroup, in canonical form.
  SubgroupBasis image() const;
  int rank() const { return image().rank(); }

 private:
  int in_dim_ = 0;
  int out_dim_ = 0;
  std::vector<Elem> columns_;
};

}  // namespace pfr
