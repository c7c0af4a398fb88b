#pragma once

#include <future>
#include <string>
#include <vector>

#include "privstate/ensembles.hpp"
#include "privstate/norms.hpp"

namespace privstate {

inline const Bipartition kShieldCut{{"A'"}, {"B'"}};
inline const Bipartition kPrivateCut{{"A", "A'"}, {"B", "B'"}};

/// Upper bound on the SEP-norm distance of gamma from the separable states,
/// (3/2) ||rho+ - rho-||_SEP, evaluated at the DPS upper endpoint. Requires
/// a separable key-attacked state, which complementary shields guarantee.
inline double pbit_sep_upper(const PrivateState& ps, int dps_level, const BracketOptions& opts = {}) {
  if (!has_complementary_shields(ps))
    throw std::invalid_argument("pbit_sep_upper: key-attacked separability needs complementary shields");
  const NormBracket b = sep_norm_bracket(ps.delta(), kShieldCut, dps_level, opts);
  return 1.5 * b.upper;
}

struct PbitPptLower {
  double value = 0.0;       // certified lower bound on ||gamma - S||_PPT
  double c = 0.0;           // bias of the distinguishing PPT measurement
  double fidelity = 0.0;    // singlet fraction of the twirled protocol output
};

/// Lower bound on the PPT-norm distance of gamma from the separable states
/// by running the distillation protocol: measure the shield with the
/// optimal PPT binary measurement, correct the Bell phase on the outcome,
/// twirl the key systems, and read off the isotropic distance.
inline PbitPptLower pbit_ppt_lower(const PrivateState& ps, const SolveOptions& opts = {}) {
  const HermitianOp delta = ps.delta();
  const PptNormResult res = ppt_norm_full(delta, kShieldCut, opts);
  // binary PPT measurement (M, 1-M) from the dual-body certificate T
  const HermitianOp effect = 0.5 * (HermitianOp::identity(delta.layout()) + res.optimizer);
  const double c = effect.inner(delta);

  // conditional key states: outcome "+" keeps the phase, outcome "-" flips it
  const double p_plus_given_plus = effect.inner(ps.shield_plus.op());
  const double p_plus_given_minus = effect.inner(ps.shield_minus.op());
  const HermitianOp out_ab = 0.5 * (p_plus_given_plus + (1.0 - p_plus_given_minus)) * bell_state(+1).op() +
                             0.5 * (p_plus_given_minus + (1.0 - p_plus_given_plus)) * bell_state(-1).op();
  const HermitianOp twirled = isotropic_twirl(out_ab);
  PbitPptLower out;
  out.c = c;
  out.fidelity = std::max(twirled.inner(bell_state(+1).op()), 0.5);
  // isotropic closed form at local dimension 2: 2 (d/(d+1)) (p - 1/d)
  out.value = iso_closed_forms(out.fidelity, 0.0, 2).norm_to_sep;
  return out;
}

struct LogNegativity {
  double value = 0.0;         // log2 || gamma^G ||_1
  double identity_gap = 0.0;  // | ||gamma^G||_1 - 1 - ||Delta^G||_1 |
};

/// Log-negativity of the private state and the defect of the identity
/// ||gamma^G||_1 = 1 + ||(rho+ - rho-)^G||_1.
inline LogNegativity log_negativity(const PrivateState& ps) {
  const double gamma_pt = trace_norm(partial_transpose(ps.gamma.op(), {"B", "B'"}));
  const double delta_pt = trace_norm(partial_transpose(ps.delta(), {"B'"}));
  LogNegativity out;
  out.value = std::log2(gamma_pt);
  out.identity_gap = std::abs(gamma_pt - 1.0 - delta_pt);
  return out;
}

/// D_SEP(gamma || S) <= log2(1 + eps*) from the SEP-ordering certificate.
inline double relent_sep_upper(const PrivateState& ps, int dps_level, const BracketOptions& opts = {}) {
  return order_relent_bound(sep_order_epsilon(ps, dps_level, opts));
}

struct RelentContinuityUpper {
  double value = 0.0;
  double epsilon = 0.0;
  bool within_validity = true;
};

/// D_SEP(gamma || S) via asymptotic continuity against the key-attacked
/// state: epsilon = ||gamma - gammahat||_SEP / 2 (from a supplied upper
/// bound) and both halves of the cut have dimension 2d.
inline RelentContinuityUpper relent_continuity_upper(const PrivateState& ps,
                                                     double sep_norm_upper_value) {
  if (sep_norm_upper_value < 0.0 || sep_norm_upper_value > 2.0 + 1e-9)
    throw std::invalid_argument("relent_continuity_upper: norm bound outside [0,2]");
  const ContinuityBound cb = continuity_bound(sep_norm_upper_value / 2.0, 2 * ps.d);
  return {cb.value, cb.epsilon, cb.within_validity};
}

/// D_PPT(gamma || S) >= pbit_ppt_lower(gamma)^2 / (2 ln 2) by Pinsker.
inline double relent_ppt_lower(const PrivateState& ps, const SolveOptions& opts = {}) {
  return pinsker_lower(pbit_ppt_lower(ps, opts).value);
}

struct RepeaterBound {
  double value = 0.0;    // bits, upper bound on the one-way single-copy rate
  double epsilon = 0.0;  // k ||Delta||_SEP upper endpoint
  int effective_dim = 0;
  bool trivial = false;  // epsilon >= 1: fell back to the dimension bound
  bool continuity_valid = true;
  double heuristic_value = std::numeric_limits<double>::quiet_NaN();
};

/// Upper bound on the one-way single-copy key repeater rate of gamma with
/// an arbitrary k-dimensional partner state: epsilon = k ||Delta||_SEP and
/// the continuity bound on the 2dk : 2dk cut. With `partner` set, also
/// evaluates the per-instance robustness refinement (heuristic: the
/// PPT-relaxed robustness lower-bounds the true one).
inline RepeaterBound repeater_bound_one_way(const PrivateState& ps, int k, int dps_level,
                                            const BracketOptions& opts = {},
                                            const DensityState* partner = nullptr) {
  if (k < 2) throw std::invalid_argument("repeater_bound_one_way: k >= 2 required");
  const HermitianOp delta = ps.delta();
  if (hs_norm(delta) < 1e-12)
    throw std::invalid_argument("repeater_bound_one_way: degenerate shields");
  const NormBracket b = sep_norm_bracket(delta, kShieldCut, dps_level, opts);
  RepeaterBound out;
  out.epsilon = static_cast<double>(k) * b.upper;
  out.effective_dim = 2 * ps.d * k;
  if (out.epsilon >= 1.0) {
    out.trivial = true;
    out.continuity_valid = false;
    out.value = std::log2(2.0 * ps.d);  // dimension bound on the relative entropy
  } else {
    const ContinuityBound cb = continuity_bound(out.epsilon, out.effective_dim);
    out.value = cb.value;
    out.continuity_valid = cb.within_validity;
  }
  if (partner != nullptr) {
    if (partner->layout().factor_count() != 2)
      throw std::invalid_argument("repeater_bound_one_way: partner must be bipartite");
    // robustness of the Bell pair tensored with the partner across AB : CCt
    const HermitianOp joint = tensor(bell_state(+1).op(), partner->op());
    const Bipartition cut{{"A", partner->layout().factor(0).label},
                          {"B", partner->layout().factor(1).label}};
    const double r = robustness_ppt(DensityState(joint), cut, opts.solve);
    const double eps_h = 0.5 * (2.0 * r + 1.0) * b.upper;
    out.heuristic_value = eps_h >= 1.0 ? std::log2(2.0 * ps.d)
                                       : continuity_bound(eps_h, out.effective_dim).value;
  }
  return out;
}

/// Layout of the entanglement-assisted discrimination system psi (x) shield.
inline SystemLayout assisted_layout(const PrivateState& ps) {
  return SystemLayout({{"A", 2},
                       {"B", 2},
                       {"A'", ps.shield_plus.layout().factor(0).dim},
                       {"B'", ps.shield_plus.layout().factor(1).dim}});
}

/// Upper bound on D_M(gamma || gammahat) under entanglement-assisted
/// measurement families: (1/2) max_m D(psi x rho+ || psi x rhobar) +
/// (1/2) max_m D(psi x rho- || psi x rhobar).
inline double keyattacked_divergence_bound(const PrivateState& ps,
                                           const std::vector<MeasurementPOVM>& family) {
  if (family.empty()) throw std::invalid_argument("keyattacked_divergence_bound: empty family");
  const SystemLayout target = assisted_layout(ps);
  const HermitianOp psi = bell_state(+1).op();
  const HermitianOp avg = 0.5 * (ps.shield_plus.op() + ps.shield_minus.op());
  const DensityState ref(tensor(psi, avg));
  const DensityState plus(tensor(psi, ps.shield_plus.op()));
  const DensityState minus(tensor(psi, ps.shield_minus.op()));
  double best_plus = 0.0, best_minus = 0.0;
  for (const auto& m : family) {
    if (m.layout() != target)
      throw std::invalid_argument("keyattacked_divergence_bound: family layout must be " +
                                  target.to_string());
    best_plus = std::max(best_plus, measured_relent(plus, ref, m));
    best_minus = std::max(best_minus, measured_relent(minus, ref, m));
  }
  return 0.5 * best_plus + 0.5 * best_minus;
}

/// The shield-support family: (P, 1-P) on the shield padded with the
/// identity on the Bell pair; it distinguishes construction shields
/// perfectly and witnesses the one-bit cap.
inline std::vector<MeasurementPOVM> shield_support_family(const PrivateState& ps) {
  const HermitianOp proj = support_projector(ps.shield_plus);
  const HermitianOp id_key = HermitianOp::identity(SystemLayout({{"A", 2}, {"B", 2}}));
  const HermitianOp padded = tensor(id_key, proj);
  return {binary_povm(padded)};
}

/// Everything the scan records for one private-state sample.
struct AnalysisReport {
  int d = 0;
  int k = 2;
  int dps_level = 1;
  std::uint64_t master_seed = 0;
  std::uint64_t trial = 0;

  double trace_norm_delta = 0.0;
  double trace_norm_gamma_gap = 0.0;  // ||gamma - gammahat||_1
  double ppt_norm_delta = 0.0;
  double sep_lower = 0.0;
  double sep_upper = 0.0;
  std::string sep_upper_certificate;
  double overlap_lower = 0.0;
  double overlap_upper = 0.0;
  double epsilon_star = 0.0;
  double pbit_sep_upper = 0.0;
  double pbit_ppt_lower = 0.0;
  double protocol_c = 0.0;
  double relent_sep_upper = 0.0;
  double relent_ppt_lower = 0.0;
  double relent_continuity_upper = 0.0;
  bool continuity_valid = true;
  double log_negativity = 0.0;
  double log_neg_identity_gap = 0.0;
  double repeater_bound = 0.0;
  double repeater_epsilon = 0.0;
  bool repeater_trivial = false;
  double keyattacked_divergence = 0.0;

  void check_invariants() const {
    if (!(pbit_ppt_lower <= trace_norm_gamma_gap + 1e-6) || trace_norm_gamma_gap > 2.0 + 1e-9)
      throw std::runtime_error("AnalysisReport: ppt lower bound exceeds the trace-norm gap");
  }
};

/// Full pipeline for one sampled private state. Independent solve groups
/// run concurrently; assembly is deterministic.
inline AnalysisReport analyze(int d, SeedSpec seed, int k, int dps_level,
                              const BracketOptions& opts = {}) {
  const PrivateState ps = sample_private_state(d, seed);
  AnalysisReport r;
  r.d = d;
  r.k = k;
  r.dps_level = dps_level;
  r.master_seed = seed.master_seed;
  r.trial = seed.trial_index;

  const HermitianOp delta = ps.delta();
  r.trace_norm_delta = trace_norm(delta);
  r.trace_norm_gamma_gap = trace_norm(ps.gamma.op() - key_attacked(ps).op());

  auto sep_future = std::async(std::launch::async, [&] {
    return sep_norm_bracket(delta, kShieldCut, dps_level, opts);
  });
  auto overlap_future = std::async(std::launch::async, [&] {
    return sep_overlap_bracket(delta, kShieldCut, dps_level, opts);
  });
  auto ppt_future = std::async(std::launch::async, [&] { return pbit_ppt_lower(ps, opts.solve); });

  const NormBracket sep = sep_future.get();
  const NormBracket overlap = overlap_future.get();
  const PbitPptLower ppt = ppt_future.get();

  r.sep_lower = sep.lower;
  r.sep_upper = sep.upper;
  r.sep_upper_certificate = sep.upper_certificate;
  r.overlap_lower = overlap.lower;
  r.overlap_upper = overlap.upper;
  r.epsilon_star = static_cast<double>(delta.dim()) * overlap.upper;
  r.pbit_sep_upper = 1.5 * sep.upper;
  r.pbit_ppt_lower = ppt.value;
  r.protocol_c = ppt.c;
  r.ppt_norm_delta = 2.0 * ppt.c;
  r.relent_sep_upper = order_relent_bound(r.epsilon_star);
  r.relent_ppt_lower = pinsker_lower(ppt.value);
  const RelentContinuityUpper cont = relent_continuity_upper(ps, std::min(r.pbit_sep_upper, 2.0));
  r.relent_continuity_upper = cont.value;
  r.continuity_valid = cont.within_validity;
  const LogNegativity ln = log_negativity(ps);
  r.log_negativity = ln.value;
  r.log_neg_identity_gap = ln.identity_gap;
  RepeaterBound rb;
  rb.epsilon = static_cast<double>(k) * sep.upper;
  rb.effective_dim = 2 * d * k;
  if (rb.epsilon >= 1.0) {
    rb.trivial = true;
    rb.value = std::log2(2.0 * d);
  } else {
    rb.value = continuity_bound(rb.epsilon, rb.effective_dim).value;
  }
  r.repeater_bound = rb.value;
  r.repeater_epsilon = rb.epsilon;
  r.repeater_trivial = rb.trivial;
  r.keyattacked_divergence = keyattacked_divergence_bound(ps, shield_support_family(ps));
  r.check_invariants();
  return r;
}

}  // namespace privstate
