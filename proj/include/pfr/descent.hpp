#pragma once

// Greedy minimization of the tau functional over candidate pairs built from
// the current pair: sums, fibres, and endgame pairs. Ends at a pair with
// small Ruzsa distance, from which a subgroup is read off.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pfr/dist.hpp"
#include "pfr/endgame.hpp"
#include "pfr/fibring.hpp"
#include "pfr/parallel.hpp"
#include "pfr/ruzsa.hpp"

namespace pfr {

enum class MoveKind { SumCross = 0, SumSelf, FibreCross, FibreSelf, Endgame };

inline constexpr std::array<MoveKind, 5> kMoveKinds{MoveKind::SumCross, MoveKind::SumSelf, MoveKind::FibreCross,
                                                    MoveKind::FibreSelf, MoveKind::Endgame};

constexpr std::string_view to_string(MoveKind k) {
  switch (k) {
    case MoveKind::SumCross: return "SUM_CROSS";
    case MoveKind::SumSelf: return "SUM_SELF";
    case MoveKind::FibreCross: return "FIBRE_CROSS";
    case MoveKind::FibreSelf: return "FIBRE_SELF";
    case MoveKind::Endgame: return "ENDGAME";
  }
  return "?";
}

/// A candidate construction. Fibre moves condition on (g, g2); endgame moves
/// condition S = s and then T_gamma = t under permutation perm.
struct Move {
  MoveKind kind = MoveKind::SumSelf;
  Elem g = 0;
  Elem g2 = 0;
  Elem s = 0;
  std::array<int, 3> perm{};
  Elem t = 0;
};

template <typename Scalar>
struct BasicCandidate {
  Move move;
  BasicDist<Scalar> x1;
  BasicDist<Scalar> x2;
};

/// BestFirst accepts the lowest tau over all candidates. Tiered accepts the
/// best sum or fibre move when one decreases tau and turns to endgame moves
/// only otherwise.
enum class AcceptPolicy { BestFirst, Tiered };

struct DescentConfig {
  double eps_d = 1e-4;
  double eps_step = 1e-9;
  int max_iter = 50;
  int budget = 64;
  double prune = 1e-13;
  /// Move classes to try, indexed by MoveKind.
  std::array<bool, 5> enabled{true, true, true, true, true};
  AcceptPolicy policy = AcceptPolicy::BestFirst;
  EndgameOptions endgame;
};

struct TraceStep {
  Move move;
  double tau_before = 0;
  double tau_after = 0;
  double k_after = 0;
  /// Lowest candidate tau per move class at this step; NaN if none was generated.
  std::array<double, 5> class_best{};
};

/// Quantities from the minimizer analysis, evaluated at a terminal pair.
/// At an exact minimizer every report holds; elsewhere they are informative only.
struct MinimizerDiagnostics {
  double k = 0;
  double eta = 0;
  double i1 = 0, i2 = 0, i3 = 0;
  double h_s = 0;
  std::vector<IneqReport> reports;
};

template <typename Scalar>
struct BasicDescentState {
  BasicRefPair<Scalar> ref;
  BasicDist<Scalar> x1;
  BasicDist<Scalar> x2;
  Scalar k{};
  Scalar tau{};
  std::vector<TraceStep> trace;
  /// Every accepted pair, starting with the initial one.
  std::vector<std::pair<BasicDist<Scalar>, BasicDist<Scalar>>> history;
  bool converged = false;
  bool max_iter_reached = false;
  std::vector<std::string> notes;
  /// Evaluated at the terminal pair; dumped by reports when not converged.
  std::optional<MinimizerDiagnostics> diagnostics;
};

using DescentState = BasicDescentState<Real>;
using Candidate = BasicCandidate<Real>;

template <typename Scalar>
BasicDescentState<Scalar> make_state(const BasicDist<Scalar>& x1, const BasicDist<Scalar>& x2,
                                     const BasicRefPair<Scalar>& ref) {
  ref.validate();
  BasicDescentState<Scalar> s;
  s.ref = ref;
  s.x1 = x1;
  s.x2 = x2;
  s.k = rdist(x1, x2);
  s.tau = tau(x1, x2, ref);
  s.history.emplace_back(x1, x2);
  return s;
}

namespace detail {

/// Support of x, heaviest first (ties by element), truncated to `budget`.
template <typename Scalar>
std::vector<Elem> heaviest(const BasicDist<Scalar>& x, int budget) {
  auto sp = x.sparse();
  std::stable_sort(sp.begin(), sp.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<Elem> out;
  for (const auto& [e, w] : sp) {
    if (static_cast<int>(out.size()) >= budget) break;
    out.push_back(e);
  }
  return out;
}

/// (X | X + Y~ = g) for independent X, Y~: weights p_X(x) p_Y(x + g).
template <typename Scalar>
BasicDist<Scalar> fibre(const BasicDist<Scalar>& x, const BasicDist<Scalar>& y, Elem g) {
  typename BasicDist<Scalar>::Vector w(x.weights().size());
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = x(static_cast<Elem>(i)) * y(static_cast<Elem>(i) ^ g);
  return BasicDist<Scalar>(x.dim(), std::move(w));
}

}  // namespace detail

/// Candidate pairs for one descent step. When X1 and X2 are the same
/// distribution the cross moves coincide with the self moves and are emitted
/// once, under the self label.
template <typename Scalar>
std::vector<BasicCandidate<Scalar>> generate_candidates(const BasicDescentState<Scalar>& st, int budget,
                                                        const DescentConfig& cfg = {},
                                                        std::vector<std::string>* notes = nullptr) {
  if (budget < 1) throw std::invalid_argument("generate_candidates: budget must be >= 1");
  const auto& x1 = st.x1;
  const auto& x2 = st.x2;
  const bool same = x1 == x2;
  const auto on = [&](MoveKind k) { return cfg.enabled[static_cast<std::size_t>(k)]; };
  std::vector<BasicCandidate<Scalar>> out;

  if (on(MoveKind::SumCross) && !same) {
    const auto s = xor_convolve(x1, x2);
    out.push_back({{MoveKind::SumCross}, s, s});
  }
  if (on(MoveKind::SumSelf)) {
    out.push_back({{MoveKind::SumSelf}, xor_convolve(x1, x1), xor_convolve(x2, x2)});
  }
  const auto fibre_pairs = [&](MoveKind kind, const BasicDist<Scalar>& a1, const BasicDist<Scalar>& b1,
                               const BasicDist<Scalar>& a2, const BasicDist<Scalar>& b2) {
    const auto g1 = detail::heaviest(xor_convolve(a1, b1), budget);
    const auto g2 = detail::heaviest(xor_convolve(a2, b2), budget);
    std::vector<BasicDist<Scalar>> f1, f2;
    for (Elem g : g1) f1.push_back(detail::fibre(a1, b1, g));
    for (Elem g : g2) f2.push_back(detail::fibre(a2, b2, g));
    for (std::size_t i = 0; i < g1.size(); ++i) {
      for (std::size_t j = 0; j < g2.size(); ++j) {
        Move m{kind};
        m.g = g1[i];
        m.g2 = g2[j];
        out.push_back({m, f1[i], f2[j]});
      }
    }
  };
  if (on(MoveKind::FibreCross) && !same) fibre_pairs(MoveKind::FibreCross, x1, x2, x2, x1);
  if (on(MoveKind::FibreSelf)) fibre_pairs(MoveKind::FibreSelf, x1, x1, x2, x2);

  if (on(MoveKind::Endgame)) {
    try {
      const auto tables = endgame_tables(x1, x2, cfg.endgame);
      const auto s_dist = tables.joint_uvs.marginal_dist(2);
      const auto values = detail::heaviest(s_dist, budget);
      std::vector<BasicCandidate<Scalar>> eg(values.size());
      parallel_for(values.size(), [&](std::size_t i) {
        const auto uv = condition(tables.joint_uvs, 2, values[i]);
        const auto choice = abstract_endgame(uv, st.ref, x1, x2);
        Move m{MoveKind::Endgame};
        m.s = values[i];
        m.perm = choice.perm;
        m.t = choice.t;
        eg[i] = {m, choice.t1p, choice.t2p};
      });
      out.insert(out.end(), eg.begin(), eg.end());
    } catch (const CostGuardError& e) {
      if (notes) notes->push_back(std::string("ENDGAME skipped: ") + e.what());
    }
  }
  return out;
}

/// Quantities from the minimizer analysis at the pair in `st`.
template <typename Scalar>
MinimizerDiagnostics minimizer_diagnostics(const BasicDescentState<Scalar>& st, const EndgameOptions& opt = {}) {
  const auto& x1 = st.x1;
  const auto& x2 = st.x2;
  const Scalar eta = st.ref.eta;
  const auto tables = endgame_tables(x1, x2, opt);
  const Scalar k = tables.k;
  const Scalar i1 = tables.i1;
  MinimizerDiagnostics d;
  d.k = static_cast<double>(k);
  d.eta = static_cast<double>(eta);
  d.i1 = static_cast<double>(i1);
  d.i2 = static_cast<double>(tables.i2);
  d.i3 = static_cast<double>(tables.i3);
  d.h_s = static_cast<double>(tables.h_s);
  const Scalar gap = 2 * eta * k - i1;

  d.reports.push_back(make_report("first_estimate", i1, 2 * eta * k));
  d.reports.push_back(make_report("second_estimate", tables.i2, 2 * eta * k + 2 * eta * gap / (1 - eta)));

  // Fibring identity for (X1, X2, X2~, X1~): both sides reported as lhs/rhs.
  const auto fib = cor_fibre(x1, x2, x2, x1);
  const Scalar lhs_52 = Scalar(fib.d_projected + fib.d_fibre) + i1;
  d.reports.push_back(make_report("fibring_identity_2k", lhs_52, 2 * k));

  const Scalar h1 = entropy(x1), h2 = entropy(x2);
  d.reports.push_back(make_report("sum_entropy_bound", tables.h_s, h1 / 2 + h2 / 2 + (2 + eta) * k - i1));

  const Scalar d11 = rdist(x1, x1), d22 = rdist(x2, x2);
  d.reports.push_back(make_report("self_distance_bound", d11 + d22, 2 * k + 2 * gap / (1 - eta)));

  d.reports.push_back(make_report("conditional_info_sum", tables.i1 + tables.i2 + tables.i3,
                                  6 * eta * k - (1 - 5 * eta) / (1 - eta) * gap));

  const auto& j = tables.joint_uvs;
  const auto ws = pushforward(j, {AxisSet{0, 1}, AxisSet{2}}, {"W", "S"});
  Scalar spread(0);
  for (const auto* ref_x : {&st.ref.x0_1, &st.ref.x0_2}) {
    const Scalar base = rdist(*ref_x, ref_x == &st.ref.x0_1 ? x1 : x2);
    const auto x0 = unconditioned(*ref_x);
    spread += cond_rdist<Scalar>(x0, {j, 0, AxisSet{2}}) - base;
    spread += cond_rdist<Scalar>(x0, {j, 1, AxisSet{2}}) - base;
    spread += cond_rdist<Scalar>(x0, {ws, 0, AxisSet{1}}) - base;
  }
  d.reports.push_back(make_report("conditional_distance_sum", spread, (6 - 3 * eta) * k + 3 * gap));
  d.reports.push_back(make_report("closure", k, (8 * eta + eta * eta) * k));
  return d;
}

/// Accepts the best strict tau decrease (by more than eps_step) until
/// k <= eps_d, no candidate improves, or max_iter steps were taken.
template <typename Scalar>
BasicDescentState<Scalar> descend(const BasicDist<Scalar>& x1, const BasicDist<Scalar>& x2,
                                  const BasicRefPair<Scalar>& ref, const DescentConfig& cfg = {}) {
  if (x1.dim() != x2.dim() || x1.dim() != ref.x0_1.dim()) throw std::invalid_argument("descend: dimension mismatch");
  auto st = make_state(x1, x2, ref);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  int iter = 0;
  for (; iter < cfg.max_iter; ++iter) {
    if (st.k <= Scalar(cfg.eps_d)) break;
    const auto cands = generate_candidates(st, cfg.budget, cfg, &st.notes);
    std::vector<Scalar> values(cands.size());
    parallel_for(cands.size(), [&](std::size_t i) { values[i] = tau(cands[i].x1, cands[i].x2, ref); });

    TraceStep step;
    step.class_best.fill(nan);
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::array<std::size_t, 2> tier_best{none, none};
    for (std::size_t i = 0; i < cands.size(); ++i) {
      auto& cb = step.class_best[static_cast<std::size_t>(cands[i].move.kind)];
      const double v = static_cast<double>(values[i]);
      if (std::isnan(cb) || v < cb) cb = v;
      const std::size_t tier = cfg.policy == AcceptPolicy::Tiered && cands[i].move.kind == MoveKind::Endgame ? 1 : 0;
      auto& b = tier_best[tier];
      if (b == none || values[i] < values[b]) b = i;
    }
    std::size_t best = none;
    BasicDist<Scalar> nx1, nx2;
    Scalar next{};
    for (std::size_t i : tier_best) {
      if (i == none) continue;
      nx1 = cands[i].x1.pruned(Scalar(cfg.prune));
      nx2 = cands[i].x2.pruned(Scalar(cfg.prune));
      next = tau(nx1, nx2, ref);
      if (st.tau - next > Scalar(cfg.eps_step)) {
        best = i;
        break;
      }
    }
    if (best == none) break;
    step.move = cands[best].move;
    step.tau_before = static_cast<double>(st.tau);
    step.tau_after = static_cast<double>(next);
    st.x1 = nx1;
    st.x2 = nx2;
    st.tau = next;
    st.k = rdist(nx1, nx2);
    step.k_after = static_cast<double>(st.k);
    st.trace.push_back(step);
    st.history.emplace_back(nx1, nx2);
  }
  st.converged = st.k <= Scalar(cfg.eps_d);
  st.max_iter_reached = !st.converged && iter == cfg.max_iter;
  try {
    st.diagnostics = minimizer_diagnostics(st, cfg.endgame);
  } catch (const CostGuardError& e) {
    st.notes.push_back(std::string("diagnostics skipped: ") + e.what());
  }
  return st;
}

/// Subgroup found near a distribution, with distances to its uniform law.
struct SubgroupCertificate {
  SubgroupBasis h;
  double d1 = 0;              // d[X0_1; U_H]
  double d2 = 0;              // d[X0_2; U_H]
  double reference = 0;       // d[X0_1; X0_2]
  double sum_bound = 0;       // 11 * reference
  double individual_bound = 0;  // 6 * reference
  bool holds = false;
  bool converged = true;
  std::string source = "terminal";
};

inline constexpr double kCertificateTolerance = 1e-6;

template <typename Scalar>
SubgroupCertificate certify(const SubgroupBasis& h, const BasicDist<Scalar>& x0_1, const BasicDist<Scalar>& x0_2) {
  const auto uh = BasicDist<Scalar>::uniform(h);
  SubgroupCertificate c;
  c.h = h;
  c.d1 = static_cast<double>(rdist(x0_1, uh));
  c.d2 = static_cast<double>(rdist(x0_2, uh));
  c.reference = static_cast<double>(rdist(x0_1, x0_2));
  c.sum_bound = 11 * c.reference;
  c.individual_bound = 6 * c.reference;
  c.holds = c.d1 + c.d2 <= c.sum_bound + kCertificateTolerance &&
            std::max(c.d1, c.d2) <= c.individual_bound + kCertificateTolerance;
  return c;
}

/// H := span{x + x* : p(x) >= theta p(x*)}, x* the mode of X.
template <typename Scalar>
SubgroupCertificate extract_subgroup(const BasicDist<Scalar>& x, double theta = 0.5) {
  if (!(theta > 0 && theta <= 1)) throw std::invalid_argument("extract_subgroup: theta must lie in (0, 1]");
  const Elem top = x.mode();
  const Scalar cut = x(top) * Scalar(theta);
  std::vector<Elem> gens;
  for (const auto& [e, w] : x.sparse()) {
    if (w >= cut) gens.push_back(e ^ top);
  }
  return certify(SubgroupBasis::span(gens, x.dim()), x, x);
}

template <typename Scalar>
struct BasicPfrResult {
  SubgroupCertificate certificate;
  BasicDescentState<Scalar> state;
};

using PfrResult = BasicPfrResult<Real>;

/// Descends from (X0_2, X0_1), reads a subgroup off the terminal X1, and
/// certifies d[X0_1;U_H] + d[X0_2;U_H] <= 11 d[X0_1;X0_2]. If that fails,
/// every visited distribution is tried and the best certificate is kept.
template <typename Scalar>
BasicPfrResult<Scalar> entropic_pfr(const BasicDist<Scalar>& x0_1, const BasicDist<Scalar>& x0_2,
                                    const DescentConfig& cfg = {}, Scalar eta = Scalar(1) / Scalar(9),
                                    double theta = 0.5) {
  BasicRefPair<Scalar> ref{x0_1, x0_2, eta};
  auto state = descend(x0_2, x0_1, ref, cfg);
  auto cert = certify(extract_subgroup(state.x1, theta).h, x0_1, x0_2);
  if (!cert.holds) {
    for (std::size_t i = state.history.size(); i-- > 0;) {
      for (int side = 0; side < 2; ++side) {
        const auto& x = side == 0 ? state.history[i].first : state.history[i].second;
        auto c = certify(extract_subgroup(x, theta).h, x0_1, x0_2);
        if ((c.holds && !cert.holds) || (c.holds == cert.holds && c.d1 + c.d2 < cert.d1 + cert.d2)) {
          c.source = "history[" + std::to_string(i) + "]." + (side == 0 ? "x1" : "x2");
          cert = c;
        }
      }
    }
  }
  cert.converged = state.converged;
  return {std::move(cert), std::move(state)};
}

}  // namespace pfr
