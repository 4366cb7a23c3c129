#include "pfr/group.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <stdexcept>

namespace pfr {

namespace {

int leading_bit(Elem x) { return 31 - std::countl_zero(x); }

}  // namespace

void check_dim(int dim) {
  if (dim < 0 || dim > kMaxDim) {
    throw std::invalid_argument("ambient dimension " + std::to_string(dim) +
                                " outside [0, " + std::to_string(kMaxDim) + "]");
  }
}

void check_elem(Elem x, int dim) {
  if (static_cast<std::uint64_t>(x) >= group_order(dim)) {
    throw std::invalid_argument("element " + format_hex(x) + " does not fit in dimension " +
                                std::to_string(dim));
  }
}

Elem parse_elem(std::string_view text) {
  int base = 10;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'b' || text[1] == 'B')) {
    base = 2;
    text.remove_prefix(2);
  } else if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    base = 16;
    text.remove_prefix(2);
  }
  Elem value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, base);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("malformed group element '" + std::string(text) + "'");
  }
  return value;
}

std::string format_hex(Elem x) {
  char buf[16];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x, 16);
  return "0x" + std::string(buf, ptr);
}

std::string format_bin(Elem x, int dim) {
  std::string out = "0b";
  for (int i = std::max(dim, 1) - 1; i >= 0; --i) out.push_back((x >> i) & 1u ? '1' : '0');
  return out;
}

SubgroupBasis::SubgroupBasis(int ambient_dim) : dim_(ambient_dim) { check_dim(ambient_dim); }

SubgroupBasis SubgroupBasis::span(std::span<const Elem> elems, int ambient_dim) {
  SubgroupBasis h(ambient_dim);
  for (Elem x : elems) {
    check_elem(x, ambient_dim);
    h.insert(x);
  }
  return h;
}

SubgroupBasis SubgroupBasis::from_rows(std::vector<Elem> rows, int ambient_dim) {
  SubgroupBasis h = span(rows, ambient_dim);
  if (h.rows_ != rows) throw std::invalid_argument("rows are not a reduced row-echelon basis");
  return h;
}

SubgroupBasis SubgroupBasis::whole(int ambient_dim) {
  SubgroupBasis h(ambient_dim);
  for (int i = ambient_dim - 1; i >= 0; --i) h.rows_.push_back(Elem{1} << i);
  return h;
}

Elem SubgroupBasis::reduce(Elem x) const {
  for (Elem row : rows_) {
    if ((x >> leading_bit(row)) & 1u) x ^= row;
  }
  return x;
}

bool SubgroupBasis::contains(Elem x) const { return reduce(x) == 0; }

bool SubgroupBasis::insert(Elem x) {
  check_elem(x, dim_);
  x = reduce(x);
  if (x == 0) return false;
  const int pivot = leading_bit(x);
  // Clear the new pivot from existing rows, then place x by pivot order.
  for (Elem& row : rows_) {
    if ((row >> pivot) & 1u) row ^= x;
  }
  const auto pos = std::find_if(rows_.begin(), rows_.end(),
                                [&](Elem row) { return leading_bit(row) < pivot; });
  rows_.insert(pos, x);
  return true;
}

std::vector<Elem> SubgroupBasis::enumerate() const {
  if (rank() > kMaxDim) throw std::length_error("subgroup too large to enumerate");
  std::vector<Elem> out(size());
  // Gray-code walk: consecutive members differ by one basis row.
  Elem cur = 0;
  out[0] = 0;
  for (std::uint64_t i = 1; i < size(); ++i) {
    cur ^= rows_[static_cast<std::size_t>(std::countr_zero(i))];
    out[i] = cur;
  }
  std::sort(out.begin(), out.end());
  return out;
}

SubgroupBasis SubgroupBasis::shrink_to_size(std::uint64_t bound) const {
  if (bound < 1) throw std::invalid_argument("shrink_to_size needs bound >= 1");
  SubgroupBasis out = *this;
  while (out.size() > bound) out.rows_.erase(out.rows_.begin());
  return out;
}

std::vector<Elem> SubgroupBasis::coset_representatives(const SubgroupBasis& sub) const {
  if (!sub.is_subgroup_of(*this)) throw std::invalid_argument("not a subgroup");
  // A complement of sub inside *this: rows of *this that are independent of sub.
  SubgroupBasis acc = sub;
  std::vector<Elem> complement;
  for (Elem row : rows_) {
    if (acc.insert(row)) complement.push_back(row);
  }
  std::vector<Elem> reps = SubgroupBasis::span(complement, dim_).enumerate();
  for (Elem& r : reps) r = sub.reduce(r);
  std::sort(reps.begin(), reps.end());
  return reps;
}

bool SubgroupBasis::is_subgroup_of(const SubgroupBasis& other) const {
  return dim_ == other.dim_ &&
         std::all_of(rows_.begin(), rows_.end(), [&](Elem r) { return other.contains(r); });
}

LinearMap::LinearMap(int in_dim, int out_dim, std::vector<Elem> columns)
    : in_dim_(in_dim), out_dim_(out_dim), columns_(std::move(columns)) {
  check_dim(in_dim);
  check_dim(out_dim);
  if (static_cast<int>(columns_.size()) != in_dim) {
    throw std::invalid_argument("linear map needs one column per input bit");
  }
  for (Elem c : columns_) check_elem(c, out_dim);
}

LinearMap LinearMap::identity(int dim) {
  std::vector<Elem> cols(static_cast<std::size_t>(dim));
  for (int i = 0; i < dim; ++i) cols[static_cast<std::size_t>(i)] = Elem{1} << i;
  return LinearMap(dim, dim, std::move(cols));
}

LinearMap LinearMap::zero(int in_dim, int out_dim) {
  return LinearMap(in_dim, out_dim, std::vector<Elem>(static_cast<std::size_t>(in_dim), 0));
}

SubgroupBasis LinearMap::image() const { return SubgroupBasis::span(columns_, out_dim_); }

}  // namespace pfr
