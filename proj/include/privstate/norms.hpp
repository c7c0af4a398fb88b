#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "privstate/cone_solver.hpp"
#include "privstate/rng.hpp"
#include "privstate/states.hpp"

namespace privstate {

/// Bipartition of a layout's factor labels, e.g. {A,A'} : {B,B'}.
struct Bipartition {
  std::vector<std::string> left, right;
};

/// Parse "A,A':B,B'" into a Bipartition.
inline Bipartition parse_cut(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("cut must be 'a,b:c,d'");
  Bipartition cut;
  auto split = [](const std::string& s, std::vector<std::string>& out) {
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) out.push_back(item);
    }
  };
  split(text.substr(0, colon), cut.left);
  split(text.substr(colon + 1), cut.right);
  return cut;
}

namespace detail {

struct CutInfo {
  HermitianOp permuted;              // factors reordered to left..., right...
  std::vector<std::string> order;    // the permuted label order
  std::vector<int> dims;             // per-factor dims in permuted order
  std::vector<std::uint8_t> right_mask;
  int left_dim = 1, right_dim = 1;
};

inline CutInfo analyze_cut(const HermitianOp& x, const Bipartition& cut) {
  const SystemLayout& layout = x.layout();
  std::vector<std::string> order = cut.left;
  order.insert(order.end(), cut.right.begin(), cut.right.end());
  if (static_cast<int>(order.size()) != layout.factor_count())
    throw std::invalid_argument("cut must mention every factor exactly once");
  CutInfo info;
  info.permuted = permute_factors(x, order);
  info.order = order;
  for (int i = 0; i < info.permuted.layout().factor_count(); ++i)
    info.dims.push_back(info.permuted.layout().factor(i).dim);
  info.right_mask.assign(info.dims.size(), 0);
  for (std::size_t i = cut.left.size(); i < info.dims.size(); ++i) info.right_mask[i] = 1;
  for (std::size_t i = 0; i < cut.left.size(); ++i) info.left_dim *= info.dims[i];
  for (std::size_t i = cut.left.size(); i < info.dims.size(); ++i) info.right_dim *= info.dims[i];
  return info;
}

/// Isometry from Sym^2(C^d) into C^d (x) C^d.
inline Matrix sym2_isometry(int d) {
  const int s = d * (d + 1) / 2;
  Matrix v = Matrix::Zero(d * d, s);
  int col = 0;
  for (int i = 0; i < d; ++i) {
    v(i * d + i, col++) = 1.0;
  }
  const double inv_r2 = 1.0 / std::numbers::sqrt2;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      v(i * d + j, col) = inv_r2;
      v(j * d + i, col) = inv_r2;
      ++col;
    }
  return v;
}

inline Matrix kron_identity_left(int c, const Matrix& v) {
  Matrix out = Matrix::Zero(c * v.rows(), c * v.cols());
  for (int i = 0; i < c; ++i) out.block(i * v.rows(), i * v.cols(), v.rows(), v.cols()) = v;
  return out;
}

/// Chain computing Tr_{D2}[(1 (x) V) Y (1 (x) V)'] from Y on C (x) Sym^2(D).
inline LinOpChain extension_marginal_chain(int c, int d) {
  const Matrix lift = kron_identity_left(c, sym2_isometry(d));
  return {LinOpStep::sandwich(lift), LinOpStep::trace_out({c, d, d}, {0, 0, 1})};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// PPT norm.
// ---------------------------------------------------------------------------

/// Program for max Tr(TX) over the PPT dual body, -1 <= T <= 1 and
/// -1 <= T^Gamma <= 1.
inline SpectrahedronProgram ppt_norm_program(const HermitianOp& x, const Bipartition& cut) {
  const detail::CutInfo info = detail::analyze_cut(x, cut);
  const int n = static_cast<int>(info.permuted.dim());
  SpectrahedronProgram prog;
  prog.maximize = true;
  const int t = prog.add_var("T", n);
  prog.add_objective(t, info.permuted.entries());
  for (double sign : {1.0, -1.0}) {
    const std::size_t b = prog.add_block(ConeKind::Psd, n, sign > 0 ? "one_plus_T" : "one_minus_T");
    prog.blocks[b].constant = Matrix::Identity(n, n);
    prog.blocks[b].terms.push_back({t, sign, {}});
    const std::size_t bg = prog.add_block(ConeKind::Psd, n, sign > 0 ? "one_plus_TG" : "one_minus_TG");
    prog.blocks[bg].constant = Matrix::Identity(n, n);
    prog.blocks[bg].terms.push_back({t, sign, {LinOpStep::pt(info.dims, info.right_mask)}});
  }
  prog.slater_point = Eigen::VectorXd::Zero(prog.total_var_size());
  prog.primal_radius = std::sqrt(static_cast<double>(n));
  return prog;
}

struct PptNormResult {
  double value = 0.0;
  double certified_lower = 0.0;
  double certified_upper = 0.0;
  HermitianOp optimizer;  // feasible dual-body operator achieving certified_lower
  SolveReport report;
};

inline PptNormResult ppt_norm_full(const HermitianOp& x, const Bipartition& cut,
                                   const SolveOptions& opts = {}) {
  const detail::CutInfo info = detail::analyze_cut(x, cut);
  const SpectrahedronProgram prog = ppt_norm_program(x, cut);
  SolveReport rep = solve(prog, opts);
  if (rep.status != SolveStatus::Optimal)
    throw std::runtime_error(std::string("ppt_norm: solver status ") + to_string(rep.status));
  const CertifiedBracket cert = certify(prog, rep);
  PptNormResult out;
  out.value = rep.primal_value;
  out.certified_lower = cert.feasible_value;
  out.certified_upper = cert.dual_bound;
  const int n = static_cast<int>(info.permuted.dim());
  const HermitianOp t_perm(info.permuted.layout(), smat(cert.x_feasible, n));
  std::vector<std::string> original_order;
  for (const auto& f : x.layout().factors()) original_order.push_back(f.label);
  out.optimizer = permute_factors(t_perm, original_order);
  out.report = std::move(rep);
  return out;
}

/// The PPT-restricted trace norm, max Tr(TX) over K_PPT.
inline double ppt_norm(const HermitianOp& x, const Bipartition& cut, const SolveOptions& opts = {}) {
  return ppt_norm_full(x, cut, opts).value;
}

// ---------------------------------------------------------------------------
// Product see-saw machinery (lower endpoints).
// ---------------------------------------------------------------------------

namespace detail {

inline Matrix conditional_left(const Matrix& x, const Eigen::VectorXcd& chi, int c, int d) {
  Matrix a = Matrix::Zero(c, c);
  for (int i = 0; i < c; ++i)
    for (int k = 0; k < c; ++k) {
      Complex acc = 0.0;
      for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l) acc += std::conj(chi(j)) * x(i * d + j, k * d + l) * chi(l);
      a(i, k) = acc;
    }
  return a;
}

inline Matrix conditional_right(const Matrix& x, const Eigen::VectorXcd& phi, int c, int d) {
  Matrix b = Matrix::Zero(d, d);
  for (int j = 0; j < d; ++j)
    for (int l = 0; l < d; ++l) {
      Complex acc = 0.0;
      for (int i = 0; i < c; ++i)
        for (int k = 0; k < c; ++k) acc += std::conj(phi(i)) * x(i * d + j, k * d + l) * phi(k);
      b(j, l) = acc;
    }
  return b;
}

struct SeeSawResult {
  double value = 0.0;  // extremal <phi x chi| X |phi x chi>
  Eigen::VectorXcd phi, chi;
  Matrix left_basis, right_basis;  // eigenbases of the converged conditionals
};

/// Alternating eigenvector ascent for the extremal product-state overlap.
inline SeeSawResult product_see_saw(const Matrix& x, int c, int d, bool maximize, int restarts,
                                    int sweeps, double improve_tol) {
  SeeSawResult best;
  best.value = maximize ? -1e300 : 1e300;
  for (int r = 0; r < restarts; ++r) {
    PhiloxRng rng({0x5eed5eedULL, static_cast<std::uint64_t>(r)});
    Eigen::VectorXcd phi(c), chi(d);
    for (int i = 0; i < c; ++i) phi(i) = rng.complex_gaussian();
    for (int j = 0; j < d; ++j) chi(j) = rng.complex_gaussian();
    phi.normalize();
    chi.normalize();
    double value = 0.0, prev = maximize ? -1e300 : 1e300;
    Matrix a, b;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
      a = conditional_left(x, chi, c, d);
      Eigen::SelfAdjointEigenSolver<Matrix> ea(a);
      phi = maximize ? ea.eigenvectors().col(c - 1) : ea.eigenvectors().col(0);
      b = conditional_right(x, phi, c, d);
      Eigen::SelfAdjointEigenSolver<Matrix> eb(b);
      chi = maximize ? eb.eigenvectors().col(d - 1) : eb.eigenvectors().col(0);
      value = maximize ? eb.eigenvalues()(d - 1) : eb.eigenvalues()(0);
      if (std::abs(value - prev) < improve_tol) break;
      prev = value;
    }
    const bool better = maximize ? (value > best.value) : (value < best.value);
    if (better) {
      best.value = value;
      best.phi = phi;
      best.chi = chi;
      Eigen::SelfAdjointEigenSolver<Matrix> ea(conditional_left(x, chi, c, d));
      Eigen::SelfAdjointEigenSolver<Matrix> eb(conditional_right(x, phi, c, d));
      best.left_basis = ea.eigenvectors();
      best.right_basis = eb.eigenvectors();
    }
  }
  return best;
}

/// Value of the local product-basis measurement with optimal outcome signs,
/// sum_ij |<u_i v_j| X |u_i v_j>|, and the matching binary POVM on the
/// permuted layout.
inline std::pair<double, Matrix> product_basis_value(const Matrix& x, const Matrix& u,
                                                     const Matrix& v, int c, int d) {
  double total = 0.0;
  Matrix effect = Matrix::Zero(c * d, c * d);  // sum of +1-sign projectors
  for (int i = 0; i < c; ++i)
    for (int j = 0; j < d; ++j) {
      Eigen::VectorXcd w(c * d);
      for (int a = 0; a < c; ++a)
        for (int b = 0; b < d; ++b) w(a * d + b) = u(a, i) * v(b, j);
      const double val = (w.adjoint() * x * w)(0, 0).real();
      total += std::abs(val);
      if (val >= 0.0) effect += w * w.adjoint();
    }
  return {total, effect};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// SEP norm and separable-overlap brackets.
// ---------------------------------------------------------------------------

/// Certified two-sided estimate of an intractable restricted quantity.
struct NormBracket {
  double lower = 0.0;
  double upper = 0.0;
  std::optional<MeasurementPOVM> lower_povm;        // separable measurement achieving `lower`
  std::vector<Eigen::VectorXcd> lower_product;      // product vector certificate (overlap)
  std::string upper_certificate;                    // relaxation descriptor

  void check() const {
    if (lower > upper + 1e-6)
      throw std::runtime_error("NormBracket: lower " + std::to_string(lower) + " > upper " +
                               std::to_string(upper));
  }
};

struct BracketOptions {
  SolveOptions solve;
  int restarts = 8;
  int sweeps = 200;
  double improve_tol = 1e-8;
  long max_extension_block = 600;  // refuse level-2 beyond this PSD block dim
};

namespace detail {

/// DPS level-2 outer relaxation of max Tr(TX) over the SEP dual body: both
/// POVM effects acquire one bosonic symmetric extension that is PPT across
/// every cut.
inline SpectrahedronProgram sep_norm_level2_program(const CutInfo& info) {
  const int c = info.left_dim, d = info.right_dim;
  const int s = d * (d + 1) / 2;
  SpectrahedronProgram prog;
  prog.maximize = true;
  const int yp = prog.add_var("Yplus", c * s);
  const int ym = prog.add_var("Yminus", c * s);

  const LinOpChain marginal = extension_marginal_chain(c, d);
  const Matrix lift = kron_identity_left(c, sym2_isometry(d));

  // objective: Tr(TX) with T = 2 Tr_{D2}(W+) - 1
  const Matrix xe = apply_chain_adjoint(marginal, info.permuted.entries());
  prog.add_objective(yp, Matrix(2.0 * xe));
  prog.objective_offset = -info.permuted.trace();

  // marginals sum to the identity
  const std::size_t eq = prog.add_block(ConeKind::Zero, c * d, "marginal_sum");
  prog.blocks[eq].constant = -Matrix::Identity(c * d, c * d);
  prog.blocks[eq].terms.push_back({yp, 1.0, marginal});
  prog.blocks[eq].terms.push_back({ym, 1.0, marginal});

  for (int v : {yp, ym}) {
    const std::string tag = (v == yp) ? "plus" : "minus";
    const std::size_t psd = prog.add_block(ConeKind::Psd, c * s, "Y_" + tag);
    prog.blocks[psd].terms.push_back({v, 1.0, {}});
    const std::size_t pt2 = prog.add_block(ConeKind::Psd, c * d * d, "pt_D2_" + tag);
    prog.blocks[pt2].terms.push_back(
        {v, 1.0, {LinOpStep::sandwich(lift), LinOpStep::pt({c, d, d}, {0, 0, 1})}});
    const std::size_t pt12 = prog.add_block(ConeKind::Psd, c * s, "pt_DD2_" + tag);
    prog.blocks[pt12].terms.push_back(
        {v, 1.0,
         {LinOpStep::sandwich(lift), LinOpStep::pt({c, d, d}, {0, 1, 1}),
          LinOpStep::sandwich(lift.adjoint())}});
  }

  Eigen::VectorXd slater(prog.total_var_size());
  const Matrix y0 = Matrix::Identity(c * s, c * s) / (d + 1.0);
  slater.segment(0, svec_size(c * s)) = svec(y0);
  slater.segment(svec_size(c * s), svec_size(c * s)) = svec(y0);
  prog.slater_point = slater;
  prog.primal_radius = std::numbers::sqrt2 * c * d;
  return prog;
}

/// DPS relaxation of max Tr(tau X) over separable states.
inline SpectrahedronProgram overlap_program(const CutInfo& info, int dps_level,
                                            long max_extension_block) {
  const int c = info.left_dim, d = info.right_dim;
  SpectrahedronProgram prog;
  prog.maximize = true;
  if (dps_level <= 1) {
    const int n = c * d;
    const int tau = prog.add_var("tau", n);
    prog.add_objective(tau, info.permuted.entries());
    const std::size_t psd = prog.add_block(ConeKind::Psd, n, "tau");
    prog.blocks[psd].terms.push_back({tau, 1.0, {}});
    const std::size_t ppt = prog.add_block(ConeKind::Psd, n, "tau_pt");
    prog.blocks[ppt].terms.push_back({tau, 1.0, {LinOpStep::pt(info.dims, info.right_mask)}});
    prog.add_trace_row(tau, 1.0);
    prog.slater_point = svec(Matrix(Matrix::Identity(n, n) / n));
    prog.primal_radius = 1.0;
    return prog;
  }
  const int s = d * (d + 1) / 2;
  if (static_cast<long>(c) * d * d > max_extension_block)
    throw std::invalid_argument("overlap_program: level-2 extension block " +
                                std::to_string(static_cast<long>(c) * d * d) + " exceeds cap " +
                                std::to_string(max_extension_block));
  const int y = prog.add_var("Y", c * s);
  const LinOpChain marginal = extension_marginal_chain(c, d);
  const Matrix lift = kron_identity_left(c, sym2_isometry(d));
  prog.add_objective(y, apply_chain_adjoint(marginal, info.permuted.entries()));
  const std::size_t psd = prog.add_block(ConeKind::Psd, c * s, "Y");
  prog.blocks[psd].terms.push_back({y, 1.0, {}});
  const std::size_t pt2 = prog.add_block(ConeKind::Psd, c * d * d, "pt_D2");
  prog.blocks[pt2].terms.push_back(
      {y, 1.0, {LinOpStep::sandwich(lift), LinOpStep::pt({c, d, d}, {0, 0, 1})}});
  const std::size_t pt12 = prog.add_block(ConeKind::Psd, c * s, "pt_DD2");
  prog.blocks[pt12].terms.push_back(
      {y, 1.0,
       {LinOpStep::sandwich(lift), LinOpStep::pt({c, d, d}, {0, 1, 1}),
        LinOpStep::sandwich(lift.adjoint())}});
  prog.add_trace_row(y, 1.0);  // Tr tau = Tr Y
  prog.slater_point = svec(Matrix(Matrix::Identity(c * s, c * s) / (c * s)));
  prog.primal_radius = 1.0;
  return prog;
}

inline MeasurementPOVM unfuse_binary_povm(const Matrix& effect, const CutInfo& info,
                                          const SystemLayout& original) {
  const SystemLayout permuted_layout = info.permuted.layout();
  std::vector<std::string> original_order;
  for (const auto& f : original.factors()) original_order.push_back(f.label);
  const HermitianOp m = permute_factors(HermitianOp(permuted_layout, effect), original_order);
  return binary_povm(m);
}

}  // namespace detail

/// Two-sided bracket for the SEP-restricted norm: the upper endpoint is a
/// DPS outer relaxation (level 1 = PPT body, level 2 adds one bosonic
/// symmetric extension), the lower endpoint is the best separable
/// product-basis measurement found by see-saw.
inline NormBracket sep_norm_bracket(const HermitianOp& x, const Bipartition& cut, int dps_level,
                                    const BracketOptions& opts = {}) {
  if (dps_level != 1 && dps_level != 2)
    throw std::invalid_argument("sep_norm_bracket: dps_level must be 1 or 2");
  const detail::CutInfo info = detail::analyze_cut(x, cut);
  const int c = info.left_dim, d = info.right_dim;

  NormBracket out;
  // upper endpoint
  if (dps_level == 1) {
    const SpectrahedronProgram prog = ppt_norm_program(x, cut);
    const SolveReport rep = solve(prog, opts.solve);
    if (rep.status != SolveStatus::Optimal)
      throw std::runtime_error(std::string("sep_norm_bracket: solver status ") + to_string(rep.status));
    out.upper = certify(prog, rep).dual_bound;
    out.upper_certificate = "dps-1 (ppt body)";
  } else {
    if (static_cast<long>(c) * d * d > opts.max_extension_block)
      throw std::invalid_argument("sep_norm_bracket: level-2 extension block " +
                                  std::to_string(static_cast<long>(c) * d * d) + " exceeds cap " +
                                  std::to_string(opts.max_extension_block));
    const SpectrahedronProgram prog = detail::sep_norm_level2_program(info);
    const SolveReport rep = solve(prog, opts.solve);
    if (rep.status != SolveStatus::Optimal)
      throw std::runtime_error(std::string("sep_norm_bracket: solver status ") + to_string(rep.status));
    out.upper = certify(prog, rep).dual_bound;
    out.upper_certificate = "dps-2 (bosonic extension, ppt on all cuts)";
  }

  // lower endpoint: product-basis measurements from both see-saw extremes,
  // plus the trivial measurement
  const Matrix& xm = info.permuted.entries();
  double best = std::abs(info.permuted.trace());
  Matrix best_effect = Matrix::Identity(c * d, c * d);
  for (bool maximize : {true, false}) {
    const detail::SeeSawResult ss =
        detail::product_see_saw(xm, c, d, maximize, opts.restarts, opts.sweeps, opts.improve_tol);
    const auto [val, effect] = detail::product_basis_value(xm, ss.left_basis, ss.right_basis, c, d);
    if (val > best) {
      best = val;
      best_effect = effect;
    }
  }
  out.lower = best;
  out.lower_povm = detail::unfuse_binary_povm(best_effect, info, x.layout());
  out.check();
  return out;
}

/// Two-sided bracket for sup_{tau separable} |Tr(tau X)|.
inline NormBracket sep_overlap_bracket(const HermitianOp& x, const Bipartition& cut, int dps_level,
                                       const BracketOptions& opts = {}) {
  if (dps_level != 1 && dps_level != 2)
    throw std::invalid_argument("sep_overlap_bracket: dps_level must be 1 or 2");
  const detail::CutInfo info = detail::analyze_cut(x, cut);
  const int c = info.left_dim, d = info.right_dim;

  NormBracket out;
  out.upper_certificate = dps_level == 1 ? "dps-1 (ppt states)" : "dps-2 (bosonic extension)";
  double upper = 0.0;
  for (double sign : {1.0, -1.0}) {
    detail::CutInfo signed_info = info;
    signed_info.permuted = sign * info.permuted;
    const SpectrahedronProgram prog =
        detail::overlap_program(signed_info, dps_level, opts.max_extension_block);
    const SolveReport rep = solve(prog, opts.solve);
    if (rep.status != SolveStatus::Optimal)
      throw std::runtime_error(std::string("sep_overlap_bracket: solver status ") + to_string(rep.status));
    upper = std::max(upper, certify(prog, rep).dual_bound);
  }
  out.upper = upper;

  double lower = 0.0;
  Eigen::VectorXcd best_phi, best_chi;
  for (bool maximize : {true, false}) {
    const detail::SeeSawResult ss = detail::product_see_saw(info.permuted.entries(), c, d, maximize,
                                                            opts.restarts, opts.sweeps, opts.improve_tol);
    if (std::abs(ss.value) > lower) {
      lower = std::abs(ss.value);
      best_phi = ss.phi;
      best_chi = ss.chi;
    }
  }
  out.lower = lower;
  out.lower_product = {best_phi, best_chi};
  out.check();
  return out;
}

// ---------------------------------------------------------------------------
// Measured relative entropy and scalar bounds.
// ---------------------------------------------------------------------------

/// D(M(rho) || M(sigma)) in bits for a fixed measurement; a lower bound on
/// the restricted relative entropy of any class containing it.
inline double measured_relent(const DensityState& rho, const DensityState& sigma,
                              const MeasurementPOVM& m) {
  return classical_kl(apply_povm(m, rho), apply_povm(m, sigma));
}

/// Pinsker lower bound in bits from a norm distance in [0, 2].
inline double pinsker_lower(double norm_value) {
  if (norm_value < 0.0 || norm_value > 2.0)
    throw std::invalid_argument("pinsker_lower: norm value outside [0,2]");
  return norm_value * norm_value / (2.0 * std::numbers::ln2);
}

inline double binary_entropy(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return -t * std::log2(t) - (1.0 - t) * std::log2(1.0 - t);
}

inline double nu_kernel(double t) { return t <= 0.0 ? 0.0 : -t * std::log2(t); }

struct ContinuityBound {
  double epsilon = 0.0;
  int d = 2;
  double value = 0.0;       // bits
  bool within_validity = true;  // proof range epsilon <= 1/(2e)
  static constexpr double kappa = 10.0;
};

/// Asymptotic-continuity bound for partially measured relative entropy
/// distances: kappa eps log2 d + 5 eps log2 3 + 2 nu(2 eps) + h(eps).
inline ContinuityBound continuity_bound(double epsilon, int d) {
  if (epsilon < 0.0) throw std::invalid_argument("continuity_bound: epsilon >= 0 required");
  if (d < 2) throw std::invalid_argument("continuity_bound: d >= 2 required");
  ContinuityBound out;
  out.epsilon = epsilon;
  out.d = d;
  out.within_validity = epsilon <= 1.0 / (2.0 * std::numbers::e);
  out.value = ContinuityBound::kappa * epsilon * std::log2(static_cast<double>(d)) +
              5.0 * epsilon * std::log2(3.0) + 2.0 * nu_kernel(2.0 * epsilon) + binary_entropy(epsilon);
  return out;
}

/// If rho <=_M (1+eps) sigma then D_M(rho||sigma) <= log2(1+eps).
inline double order_relent_bound(double epsilon) {
  if (epsilon < 0.0) throw std::invalid_argument("order_relent_bound: epsilon >= 0 required");
  return std::log2(1.0 + epsilon);
}

/// If the ordering holds both ways, ||rho - sigma||_M <= eps/(1 - eps/2).
inline double order_trace_bound(double epsilon) {
  if (epsilon <= 0.0 || epsilon >= 1.0)
    throw std::invalid_argument("order_trace_bound: 0 < epsilon < 1 required");
  return epsilon / (1.0 - epsilon / 2.0);
}

/// SEP-ordering certificate for a complementary-shield private state:
/// eps* = D sup_{tau in S} |Tr(tau Delta)| certifies
/// gamma <=_SEP (1 + eps*) gamma_hat, with the supremum replaced by its
/// DPS upper endpoint. D is the total shield dimension.
inline double sep_order_epsilon(const PrivateState& ps, int dps_level,
                                const BracketOptions& opts = {}) {
  if (!has_complementary_shields(ps))
    throw std::invalid_argument("sep_order_epsilon: shields must be complementary projectors");
  const HermitianOp delta = ps.delta();
  if (hs_norm(delta) < 1e-12)
    throw std::invalid_argument("sep_order_epsilon: degenerate equal shields");
  const double total = static_cast<double>(delta.dim());
  const NormBracket overlap = sep_overlap_bracket(delta, {{"A'"}, {"B'"}}, dps_level, opts);
  return total * overlap.upper;
}

// ---------------------------------------------------------------------------
// PPT-relaxed robustness of entanglement (diagnostic).
// ---------------------------------------------------------------------------

/// min Tr(S) s.t. S in the PPT cone and (rho + S)^Gamma >= 0; equals the
/// robustness R(rho) when the separable optimum is PPT (e.g. isotropic
/// inputs, where R(psi_k) = k-1). A lower bound on R in general, so it is
/// never used inside certified upper-bound chains.
inline double robustness_ppt(const DensityState& rho, const Bipartition& cut,
                             const SolveOptions& opts = {}) {
  const detail::CutInfo info = detail::analyze_cut(rho.op(), cut);
  const int n = static_cast<int>(info.permuted.dim());
  SpectrahedronProgram prog;
  prog.maximize = false;
  const int s = prog.add_var("S", n);
  prog.add_objective(s, Matrix::Identity(n, n));
  const std::size_t psd = prog.add_block(ConeKind::Psd, n, "S");
  prog.blocks[psd].terms.push_back({s, 1.0, {}});
  const std::size_t pt = prog.add_block(ConeKind::Psd, n, "S_pt");
  prog.blocks[pt].terms.push_back({s, 1.0, {LinOpStep::pt(info.dims, info.right_mask)}});
  const std::size_t mix = prog.add_block(ConeKind::Psd, n, "mix_pt");
  prog.blocks[mix].constant = rawop::partial_transpose(info.permuted.entries(), info.dims, info.right_mask);
  prog.blocks[mix].terms.push_back({s, 1.0, {LinOpStep::pt(info.dims, info.right_mask)}});
  const SolveReport rep = solve(prog, opts);
  if (rep.status != SolveStatus::Optimal)
    throw std::runtime_error(std::string("robustness_ppt: solver status ") + to_string(rep.status));
  return rep.primal_value;
}

}  // namespace privstate
