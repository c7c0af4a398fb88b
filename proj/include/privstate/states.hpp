#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "privstate/operators.hpp"

namespace privstate {

inline const std::vector<std::string> kKeyShieldOrder = {"A", "A'", "B", "B'"};

/// Bell state (|00> +- |11>)/sqrt(2) as a density operator on A:B.
inline DensityState bell_state(int sign) {
  if (sign != +1 && sign != -1) throw std::invalid_argument("bell_state: sign must be +1 or -1");
  SystemLayout layout({{"A", 2}, {"B", 2}});
  Matrix m = Matrix::Zero(4, 4);
  const double s = sign;
  m(0, 0) = 0.5;
  m(3, 3) = 0.5;
  m(0, 3) = 0.5 * s;
  m(3, 0) = 0.5 * s;
  return DensityState(layout, m);
}

/// Maximally entangled state psi_k = (1/k) sum_ij |ii><jj| on C:D.
inline DensityState max_entangled(int k, const std::string& left = "C", const std::string& right = "D") {
  if (k < 2) throw std::invalid_argument("max_entangled: k >= 2 required");
  SystemLayout layout({{left, k}, {right, k}});
  Matrix m = Matrix::Zero(k * k, k * k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) m(i * k + i, j * k + j) = 1.0 / k;
  return DensityState(layout, m);
}

/// Projector onto the maximally correlated vector (unnormalized twirl basis).
inline HermitianOp max_entangled_projector(int k, const std::string& left = "C",
                                           const std::string& right = "D") {
  return HermitianOp(max_entangled(k, left, right).op());
}

struct IsotropicParams {
  int d = 2;
  double p = 1.0;
};

/// Isotropic state iota(p) = p psi + (1-p) psi_perp on C:D with local dim d.
inline DensityState isotropic_state(const IsotropicParams& params, const std::string& left = "C",
                                    const std::string& right = "D") {
  if (params.p < 0.0 || params.p > 1.0) throw std::invalid_argument("isotropic_state: p outside [0,1]");
  if (params.d < 2) throw std::invalid_argument("isotropic_state: d >= 2 required");
  const int d = params.d;
  const HermitianOp psi = max_entangled_projector(d, left, right);
  const HermitianOp perp =
      (1.0 / (static_cast<double>(d) * d - 1.0)) * (HermitianOp::identity(psi.layout()) - psi);
  return DensityState(params.p * psi + (1.0 - params.p) * perp);
}

/// Exact isotropic twirl, I(X) = Tr(XP) psi + Tr(XP_perp) psi_perp.
/// Requires a two-factor layout with equal local dimensions; trace
/// preserving and idempotent.
inline HermitianOp isotropic_twirl(const HermitianOp& x) {
  const SystemLayout& layout = x.layout();
  if (layout.factor_count() != 2 || layout.factor(0).dim != layout.factor(1).dim)
    throw std::invalid_argument("isotropic_twirl: needs two factors of equal dimension, got " +
                                layout.to_string());
  const int d = layout.factor(0).dim;
  const HermitianOp psi = max_entangled_projector(d, layout.factor(0).label, layout.factor(1).label);
  const HermitianOp id = HermitianOp::identity(layout);
  const double wp = x.inner(psi);
  const double wperp = x.trace() - wp;
  return wp * psi + (wperp / (static_cast<double>(d) * d - 1.0)) * (id - psi);
}

/// Normalized projectors onto the symmetric and antisymmetric subspaces
/// of C^k (x) C^k.
inline std::pair<DensityState, DensityState> sym_antisym(int k, const std::string& left = "C",
                                                         const std::string& right = "D") {
  if (k < 2) throw std::invalid_argument("sym_antisym: k >= 2 required");
  SystemLayout layout({{left, k}, {right, k}});
  Matrix swap = Matrix::Zero(k * k, k * k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) swap(i * k + j, j * k + i) = 1.0;
  const Matrix id = Matrix::Identity(k * k, k * k);
  const double rs = k * (k + 1) / 2.0;
  const double ra = k * (k - 1) / 2.0;
  DensityState sym(layout, Matrix(0.5 * (id + swap) / rs));
  DensityState antisym(layout, Matrix(0.5 * (id - swap) / ra));
  return {sym, antisym};
}

/// Private state gamma on A:A':B:B' built from a pair of orthogonal shield
/// states on A':B', together with the shields themselves.
struct PrivateState {
  DensityState gamma;         // on A:A':B:B', |A| = |B| = 2
  DensityState shield_plus;   // on A':B'
  DensityState shield_minus;  // on A':B'
  int d = 0;                  // shield local dimension (A' side)

  /// Shield difference Delta = rho+ - rho- on A':B'.
  HermitianOp delta() const { return shield_plus.op() - shield_minus.op(); }
};

/// Assemble gamma = (psi+ (x) rho+ + psi- (x) rho-)/2 and reorder the
/// factors to A:A':B:B'. Shields must be orthogonal states on A':B'.
inline PrivateState private_state(const DensityState& shield_plus, const DensityState& shield_minus) {
  shield_plus.op().require_same_layout(shield_minus.op());
  const SystemLayout& sl = shield_plus.layout();
  if (sl.factor_count() != 2 || sl.factor(0).label != "A'" || sl.factor(1).label != "B'")
    throw std::invalid_argument("private_state: shields must live on A':B', got " + sl.to_string());
  const double overlap = shield_plus.op().inner(shield_minus.op());
  if (std::abs(overlap) > 1e-8)
    throw std::invalid_argument("private_state: shields not orthogonal, overlap " + std::to_string(overlap));

  const HermitianOp mix = 0.5 * (tensor(bell_state(+1).op(), shield_plus.op()) +
                                 tensor(bell_state(-1).op(), shield_minus.op()));
  PrivateState ps;
  ps.gamma = DensityState(permute_factors(mix, kKeyShieldOrder));
  ps.shield_plus = shield_plus;
  ps.shield_minus = shield_minus;
  ps.d = sl.factor(0).dim;
  return ps;
}

/// Key-attacked state: gamma after the computational-basis measurement of
/// the key systems, (psi+ + psi-)/4 (x) (rho+ + rho-), on A:A':B:B'.
inline DensityState key_attacked(const PrivateState& ps) {
  const HermitianOp keypart = bell_state(+1).op() + bell_state(-1).op();
  const HermitianOp shieldpart = ps.shield_plus.op() + ps.shield_minus.op();
  return DensityState(permute_factors(0.25 * tensor(keypart, shieldpart), kKeyShieldOrder));
}

/// True when the shields sum to twice the maximally mixed state, i.e. the
/// key-attacked state is the separable (psi+ + psi-)/2 (x) 1/d^2.
inline bool has_complementary_shields(const PrivateState& ps, double tolerance = 1e-8) {
  const HermitianOp sum = ps.shield_plus.op() + ps.shield_minus.op();
  const long n = sum.dim();
  const Matrix target = 2.0 * Matrix::Identity(n, n) / static_cast<double>(n);
  return (sum.entries() - target).cwiseAbs().maxCoeff() <= tolerance;
}

/// eta(x||y) = x (log2 x - log2 y), the relative-entropy kernel in bits.
inline double eta_kernel(double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return std::numeric_limits<double>::infinity();
  return x * std::log2(x / y);
}

struct IsoClosedForms {
  double norm_dist = 0.0;       // || iota(p) - iota(q) ||_PPT
  double relent_dist = 0.0;     // D_PPT(iota(p) || iota(q)), bits
  double norm_to_sep = 0.0;     // || iota(p) - S ||_PPT, needs p >= 1/d
  double relent_to_sep = 0.0;   // D_PPT(iota(p) || S), bits, needs p >= 1/d
};

/// Closed-form PPT(=LOCC) distinguishability of isotropic states:
/// 2 d/(d+1) |p-q| for the norm and d/(d+1) [eta(p+1/d||q+1/d) +
/// eta(1-p||1-q)] for the relative entropy; the to-separable variants fix
/// q = 1/d and are defined for p >= 1/d.
inline IsoClosedForms iso_closed_forms(double p, double q, int d) {
  if (p < 0.0 || p > 1.0 || q < 0.0 || q > 1.0)
    throw std::invalid_argument("iso_closed_forms: p, q must lie in [0,1]");
  if (d < 2) throw std::invalid_argument("iso_closed_forms: d >= 2 required");
  const double dd = d;
  const double f = dd / (dd + 1.0);
  IsoClosedForms out;
  out.norm_dist = 2.0 * f * std::abs(p - q);
  out.relent_dist = f * (eta_kernel(p + 1.0 / dd, q + 1.0 / dd) + eta_kernel(1.0 - p, 1.0 - q));
  if (p >= 1.0 / dd) {
    out.norm_to_sep = 2.0 * f * (p - 1.0 / dd);
    out.relent_to_sep = f * (eta_kernel(p + 1.0 / dd, 2.0 / dd) + eta_kernel(1.0 - p, 1.0 - 1.0 / dd));
  } else {
    out.norm_to_sep = std::numeric_limits<double>::quiet_NaN();
    out.relent_to_sep = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

/// The extremal PPT isotropic binary measurement (P + P_perp/(d+1), rest);
/// it attains both isotropic closed forms.
inline MeasurementPOVM iso_extremal_povm(int d, const std::string& left = "C",
                                         const std::string& right = "D") {
  const HermitianOp psi = max_entangled_projector(d, left, right);
  const HermitianOp id = HermitianOp::identity(psi.layout());
  const HermitianOp effect = psi + (1.0 / (d + 1.0)) * (id - psi);
  return binary_povm(effect);
}

/// Projector onto the support of a state (eigenvalues above the cutoff).
inline HermitianOp support_projector(const DensityState& rho, double cutoff = 1e-9) {
  const EigResult e = herm_eig(rho.op());
  Matrix proj = Matrix::Zero(rho.dim(), rho.dim());
  for (long i = 0; i < rho.dim(); ++i)
    if (e.eigenvalues(i) > cutoff)
      proj += e.eigenvectors.col(i) * e.eigenvectors.col(i).adjoint();
  return HermitianOp(rho.layout(), proj);
}

/// Computational-basis POVM on the listed factors (identity elsewhere).
inline MeasurementPOVM computational_povm(const SystemLayout& layout,
                                          const std::vector<std::string>& factors) {
  const auto pos = layout.indices_of(factors);
  const int m = layout.factor_count();
  std::vector<bool> measured(static_cast<std::size_t>(m), false);
  long outcomes = 1;
  for (int p : pos) {
    measured[static_cast<std::size_t>(p)] = true;
    outcomes *= layout.factor(p).dim;
  }
  std::vector<HermitianOp> elements;
  std::vector<int> digits(static_cast<std::size_t>(m), 0);
  for (long o = 0; o < outcomes; ++o) {
    long rem = o;
    for (int t = m - 1; t >= 0; --t) {
      if (!measured[static_cast<std::size_t>(t)]) continue;
      digits[static_cast<std::size_t>(t)] = static_cast<int>(rem % layout.factor(t).dim);
      rem /= layout.factor(t).dim;
    }
    Matrix e = Matrix::Zero(layout.total_dim(), layout.total_dim());
    const long n = layout.total_dim();
    std::vector<int> idx(static_cast<std::size_t>(m));
    for (long r = 0; r < n; ++r) {
      layout.decompose(r, idx);
      bool match = true;
      for (int t = 0; t < m; ++t)
        if (measured[static_cast<std::size_t>(t)] && idx[static_cast<std::size_t>(t)] != digits[static_cast<std::size_t>(t)]) {
          match = false;
          break;
        }
      if (match) e(r, r) = 1.0;
    }
    elements.emplace_back(layout, e);
  }
  return MeasurementPOVM(layout, elements);
}

}  // namespace privstate
