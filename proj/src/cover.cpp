#include "pfr/cover.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pfr {

SetInput::SetInput(int dim, std::vector<Elem> elements) : dim_(dim), elems_(std::move(elements)) {
  check_dim(dim);
  if (elems_.empty()) throw std::invalid_argument("set must be nonempty");
  for (Elem x : elems_) check_elem(x, dim);
  std::sort(elems_.begin(), elems_.end());
  elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
}

bool SetInput::contains(Elem x) const { return std::binary_search(elems_.begin(), elems_.end(), x); }

std::uint64_t sumset_size(const SetInput& a) {
  std::vector<bool> hit(group_order(a.dim()), false);
  std::uint64_t count = 0;
  for (Elem x : a.elements()) {
    for (Elem y : a.elements()) {
      if (!hit[x ^ y]) {
        hit[x ^ y] = true;
        ++count;
      }
    }
  }
  return count;
}

double doubling_constant(const SetInput& a) {
  return static_cast<double>(sumset_size(a)) / static_cast<double>(a.size());
}

Shift best_shift(const SetInput& a, const SubgroupBasis& h) {
  if (h.ambient_dim() != a.dim()) throw std::invalid_argument("best_shift: dimension mismatch");
  std::vector<Elem> reps;
  reps.reserve(a.size());
  for (Elem x : a.elements()) reps.push_back(h.reduce(x));
  std::sort(reps.begin(), reps.end());
  Shift best{reps.front(), 0};
  for (std::size_t i = 0; i < reps.size();) {
    std::size_t j = i;
    while (j < reps.size() && reps[j] == reps[i]) ++j;
    if (j - i > best.overlap) best = {reps[i], j - i};
    i = j;
  }
  return best;
}

std::vector<Elem> ruzsa_cover(const SetInput& a, const std::vector<Elem>& s) {
  if (s.empty()) throw std::invalid_argument("ruzsa_cover: S must be nonempty");
  for (Elem x : s) {
    if (!a.contains(x)) throw std::invalid_argument("ruzsa_cover: S must be a subset of A");
  }
  std::vector<bool> used(group_order(a.dim()), false);
  std::vector<Elem> kept;
  for (Elem x : a.elements()) {
    const bool free = std::none_of(s.begin(), s.end(), [&](Elem y) { return used[x ^ y]; });
    if (!free) continue;
    kept.push_back(x);
    for (Elem y : s) used[x ^ y] = true;
  }
  return kept;
}

bool verify_cover(const SetInput& a, const SubgroupBasis& hp, const std::vector<Elem>& translates) {
  std::vector<Elem> reps;
  for (Elem t : translates) reps.push_back(hp.reduce(t));
  std::sort(reps.begin(), reps.end());
  return std::all_of(a.elements().begin(), a.elements().end(),
                     [&](Elem x) { return std::binary_search(reps.begin(), reps.end(), hp.reduce(x)); });
}

CosetCover cover_from_subgroup(const SetInput& a, const SubgroupBasis& h, double k, double c_exponent) {
  CosetCover c;
  c.h = h;
  c.k = k;
  c.c_used = c_exponent;
  c.bound = 2 * std::pow(k, c_exponent);

  const Shift shift = best_shift(a, h);
  c.x0 = shift.x0;
  c.overlap = shift.overlap;
  std::vector<Elem> s;
  for (Elem x : a.elements()) {
    if (h.reduce(x) == shift.x0) s.push_back(x);
  }
  const auto kept = ruzsa_cover(a, s);
  c.packing_size = kept.size();

  c.hp = h.size() > a.size() ? h.shrink_to_size(a.size()) : h;
  // Each a_i + H splits into cosets of H'; keep the ones that meet A.
  const auto reps = h.coset_representatives(c.hp);
  std::vector<Elem> needed;
  for (Elem x : a.elements()) needed.push_back(c.hp.reduce(x));
  std::sort(needed.begin(), needed.end());
  needed.erase(std::unique(needed.begin(), needed.end()), needed.end());
  for (Elem ai : kept) {
    for (Elem r : reps) {
      const Elem t = c.hp.reduce(ai ^ r);
      if (std::binary_search(needed.begin(), needed.end(), t)) c.translates.push_back(t);
    }
  }
  std::sort(c.translates.begin(), c.translates.end());
  c.translates.erase(std::unique(c.translates.begin(), c.translates.end()), c.translates.end());

  c.cover_verified = verify_cover(a, c.hp, c.translates);
  c.certified = c.cover_verified && c.hp.size() <= a.size() &&
                static_cast<double>(c.translates.size()) <= c.bound;
  return c;
}

CosetCover pfr_pipeline(const SetInput& a, const PipelineConfig& cfg) {
  const double k = doubling_constant(a);
  const Dist ua = Dist::uniform(a.elements(), a.dim());
  auto res = entropic_pfr(ua, ua, cfg.descent, Real(cfg.eta), cfg.theta);

  CosetCover best = cover_from_subgroup(a, res.certificate.h, k, cfg.c_exponent);
  best.h_source = res.certificate.source;
  if (!best.certified || !res.state.converged) {
    // Fall back to subgroups read off the visited states.
    for (std::size_t i = res.state.history.size(); i-- > 0;) {
      for (int side = 0; side < 2; ++side) {
        const auto& x = side == 0 ? res.state.history[i].first : res.state.history[i].second;
        auto c = cover_from_subgroup(a, extract_subgroup(x, cfg.theta).h, k, cfg.c_exponent);
        if ((c.certified && !best.certified) ||
            (c.certified == best.certified && c.translates.size() < best.translates.size())) {
          c.h_source = "history[" + std::to_string(i) + "]." + (side == 0 ? "x1" : "x2");
          best = std::move(c);
        }
      }
    }
  }
  best.entropic = res.certificate;
  best.descent_converged = res.state.converged;
  best.bridge_distance = static_cast<double>(rdist(ua, ua));
  best.bridge_holds = best.bridge_distance <= std::log(k) + tol::kIdentity;
  return best;
}

}  // namespace pfr
