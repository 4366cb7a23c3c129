#pragma once

// From a set A with small doubling to an explicit cover of A by cosets of a
// subgroup H' with |H'| <= |A|, via the entropic descent and the Ruzsa
// covering lemma.

#include <cstdint>
#include <string>
#include <vector>

#include "pfr/descent.hpp"
#include "pfr/group.hpp"

namespace pfr {

/// A nonempty finite subset of F_2^n, sorted and deduplicated.
class SetInput {
 public:
  SetInput(int dim, std::vector<Elem> elements);

  int dim() const { return dim_; }
  const std::vector<Elem>& elements() const { return elems_; }
  std::size_t size() const { return elems_.size(); }
  bool contains(Elem x) const;

 private:
  int dim_;
  std::vector<Elem> elems_;
};

/// |A + A|.
std::uint64_t sumset_size(const SetInput& a);
/// |A + A| / |A|.
double doubling_constant(const SetInput& a);

struct Shift {
  Elem x0 = 0;
  std::uint64_t overlap = 0;
};

/// x0 maximizing |A ∩ (H + x0)|. Ties go to the smallest x0, which is always
/// the canonical representative of its coset.
Shift best_shift(const SetInput& a, const SubgroupBasis& h);

/// Greedy maximal packing: scans A ascending and keeps a when a + S misses
/// every previously kept a_i + S. Then A ⊆ ∪ (a_i + S + S). Requires
/// nonempty S ⊆ A.
std::vector<Elem> ruzsa_cover(const SetInput& a, const std::vector<Elem>& s);

struct CosetCover {
  SubgroupBasis hp;               // H'
  std::vector<Elem> translates;   // canonical coset representatives mod H'
  double k = 1;                   // doubling constant
  double c_used = 12;             // exponent in the 2 K^C bound
  double bound = 2;               // 2 K^C
  bool cover_verified = false;    // every a lies in some translate + H'
  bool certified = false;

  // Intermediate objects, for reporting.
  SubgroupBasis h;                // subgroup from the entropic stage
  Elem x0 = 0;
  std::uint64_t overlap = 0;
  std::size_t packing_size = 0;   // translates kept by the covering lemma
  double bridge_distance = 0;     // d[U_A; U_A]
  bool bridge_holds = true;       // d[U_A; U_A] <= log K
  SubgroupCertificate entropic;
  bool descent_converged = false;
  std::string h_source = "terminal";
};

/// Cover of A by cosets of H (shrunk to size <= |A| if necessary). `k` and
/// `c_exponent` feed the certification bound.
CosetCover cover_from_subgroup(const SetInput& a, const SubgroupBasis& h, double k, double c_exponent);

/// Exact membership check of A against translates + H'.
bool verify_cover(const SetInput& a, const SubgroupBasis& hp, const std::vector<Elem>& translates);

struct PipelineConfig {
  DescentConfig descent;
  double c_exponent = 12;
  double eta = 1.0 / 9.0;
  double theta = 0.5;
};

/// Entropic descent on (U_A, U_A), then shift, covering and shrinking.
CosetCover pfr_pipeline(const SetInput& a, const PipelineConfig& cfg = {});

}  // namespace pfr
