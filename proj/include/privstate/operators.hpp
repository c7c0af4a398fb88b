#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "privstate/layout.hpp"

namespace privstate {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

namespace tol {
inline constexpr double hermiticity = 1e-12;        // residual after symmetrization
inline constexpr double symmetrize_defect = 1e-8;   // larger input defects are errors
inline constexpr double state_trace = 1e-10;
inline constexpr double state_psd = 1e-10;          // min eigenvalue >= -state_psd
inline constexpr double povm_completeness = 1e-10;
inline constexpr double eig_reconstruction = 1e-9;  // relative, Hilbert-Schmidt
}  // namespace tol

inline double log2_safe(double x) { return std::log2(x); }

/// Dense complex Hermitian operator over a labelled tensor-factor layout.
///
/// Constructors symmetrize the input, (X + X†)/2, and record the defect;
/// a defect above tol::symmetrize_defect is rejected so that accumulation
/// bugs surface at the point of construction rather than later.
class HermitianOp {
 public:
  HermitianOp() = default;

  HermitianOp(SystemLayout layout, const Matrix& raw) : layout_(std::move(layout)) {
    const long n = layout_.total_dim();
    if (raw.rows() != n || raw.cols() != n)
      throw std::invalid_argument("HermitianOp: matrix is " + std::to_string(raw.rows()) + "x" +
                                  std::to_string(raw.cols()) + " but layout " + layout_.to_string() +
                                  " has total dim " + std::to_string(n));
    Matrix sym = 0.5 * (raw + raw.adjoint());
    defect_ = (raw - sym).cwiseAbs().maxCoeff();
    if (defect_ > tol::symmetrize_defect)
      throw std::invalid_argument("HermitianOp: hermiticity defect " + std::to_string(defect_) +
                                  " exceeds " + std::to_string(tol::symmetrize_defect));
    entries_ = std::move(sym);
  }

  static HermitianOp zero(SystemLayout layout) {
    const long n = layout.total_dim();
    return HermitianOp(std::move(layout), Matrix::Zero(n, n));
  }

  static HermitianOp identity(SystemLayout layout) {
    const long n = layout.total_dim();
    return HermitianOp(std::move(layout), Matrix::Identity(n, n));
  }

  const SystemLayout& layout() const { return layout_; }
  const Matrix& entries() const { return entries_; }
  long dim() const { return entries_.rows(); }
  double symmetrization_defect() const { return defect_; }

  double trace() const { return entries_.trace().real(); }

  HermitianOp scaled(double c) const { return HermitianOp(layout_, Matrix(c * entries_)); }

  HermitianOp add(const HermitianOp& other) const {
    require_same_layout(other);
    return HermitianOp(layout_, Matrix(entries_ + other.entries_));
  }

  HermitianOp sub(const HermitianOp& other) const {
    require_same_layout(other);
    return HermitianOp(layout_, Matrix(entries_ - other.entries_));
  }

  /// Hilbert-Schmidt inner product Tr(A B), real for Hermitian arguments.
  double inner(const HermitianOp& other) const {
    require_same_layout(other);
    return (entries_.adjoint() * other.entries_).trace().real();
  }

  void require_same_layout(const HermitianOp& other) const {
    if (layout_ != other.layout_)
      throw std::invalid_argument("layout mismatch: " + layout_.to_string() + " vs " +
                                  other.layout_.to_string());
  }

 private:
  SystemLayout layout_;
  Matrix entries_;
  double defect_ = 0.0;
};

inline HermitianOp operator+(const HermitianOp& a, const HermitianOp& b) { return a.add(b); }
inline HermitianOp operator-(const HermitianOp& a, const HermitianOp& b) { return a.sub(b); }
inline HermitianOp operator*(double c, const HermitianOp& a) { return a.scaled(c); }

/// Kronecker product; the result layout is the concatenation of the factor
/// lists in argument order.
inline HermitianOp tensor(const HermitianOp& a, const HermitianOp& b) {
  const long na = a.dim(), nb = b.dim();
  Matrix out(na * nb, na * nb);
  for (long i = 0; i < na; ++i)
    for (long j = 0; j < na; ++j)
      out.block(i * nb, j * nb, nb, nb) = a.entries()(i, j) * b.entries();
  return HermitianOp(a.layout().concat(b.layout()), out);
}

namespace detail {

/// Entry permutation shared by partial transpose and factor permutation.
template <typename RowColMap>
Matrix remap_entries(const SystemLayout& in, const SystemLayout& out, const Matrix& x, RowColMap&& map) {
  const long n = x.rows();
  const int m = in.factor_count();
  Matrix y(out.total_dim(), out.total_dim());
  std::vector<int> ri(m), ci(m), ro(out.factor_count()), co(out.factor_count());
  for (long r = 0; r < n; ++r) {
    in.decompose(r, ri);
    for (long c = 0; c < n; ++c) {
      in.decompose(c, ci);
      map(ri, ci, ro, co);
      y(out.compose(ro), out.compose(co)) = x(r, c);
    }
  }
  return y;
}

}  // namespace detail

/// Transposition applied only on the selected factors. A linear involution
/// that preserves Hermiticity, the trace and the Hilbert-Schmidt norm.
inline HermitianOp partial_transpose(const HermitianOp& x, const std::vector<std::string>& factors) {
  const auto pos = x.layout().indices_of(factors);
  std::vector<bool> flip(static_cast<std::size_t>(x.layout().factor_count()), false);
  for (int p : pos) flip[static_cast<std::size_t>(p)] = true;
  Matrix y = detail::remap_entries(x.layout(), x.layout(), x.entries(),
                                   [&](const std::vector<int>& ri, const std::vector<int>& ci,
                                       std::vector<int>& ro, std::vector<int>& co) {
                                     for (std::size_t t = 0; t < ri.size(); ++t) {
                                       ro[t] = flip[t] ? ci[t] : ri[t];
                                       co[t] = flip[t] ? ri[t] : ci[t];
                                     }
                                   });
  return HermitianOp(x.layout(), y);
}

/// Reorder tensor factors to `order` (a permutation of the labels).
inline HermitianOp permute_factors(const HermitianOp& x, const std::vector<std::string>& order) {
  const SystemLayout& in = x.layout();
  if (static_cast<int>(order.size()) != in.factor_count())
    throw std::invalid_argument("permute_factors: order must list every factor exactly once");
  std::vector<int> src;  // src[t] = position in the input of output factor t
  std::vector<SystemFactor> out_factors;
  for (const auto& label : order) {
    int i = in.index_of(label);
    if (i < 0) throw std::invalid_argument("permute_factors: unknown label '" + label + "'");
    src.push_back(i);
    out_factors.push_back(in.factor(i));
  }
  SystemLayout out(out_factors);
  Matrix y = detail::remap_entries(in, out, x.entries(),
                                   [&](const std::vector<int>& ri, const std::vector<int>& ci,
                                       std::vector<int>& ro, std::vector<int>& co) {
                                     for (std::size_t t = 0; t < src.size(); ++t) {
                                       ro[t] = ri[static_cast<std::size_t>(src[t])];
                                       co[t] = ci[static_cast<std::size_t>(src[t])];
                                     }
                                   });
  return HermitianOp(out, y);
}

/// Trace out the selected factors; tracing everything yields a 1x1 operator.
inline HermitianOp partial_trace(const HermitianOp& x, const std::vector<std::string>& factors) {
  const SystemLayout& in = x.layout();
  const auto traced = in.indices_of(factors);
  SystemLayout out = in.drop(traced);
  const int m = in.factor_count();
  std::vector<bool> is_traced(static_cast<std::size_t>(m), false);
  for (int p : traced) is_traced[static_cast<std::size_t>(p)] = true;

  Matrix y = Matrix::Zero(out.total_dim(), out.total_dim());
  std::vector<int> ri(m), ci(m), ro, co;
  const long n = x.dim();
  for (long r = 0; r < n; ++r) {
    in.decompose(r, ri);
    for (long c = 0; c < n; ++c) {
      in.decompose(c, ci);
      bool diagonal_on_traced = true;
      for (int t = 0; t < m; ++t)
        if (is_traced[static_cast<std::size_t>(t)] && ri[static_cast<std::size_t>(t)] != ci[static_cast<std::size_t>(t)]) {
          diagonal_on_traced = false;
          break;
        }
      if (!diagonal_on_traced) continue;
      ro.clear();
      co.clear();
      for (int t = 0; t < m; ++t)
        if (!is_traced[static_cast<std::size_t>(t)]) {
          ro.push_back(ri[static_cast<std::size_t>(t)]);
          co.push_back(ci[static_cast<std::size_t>(t)]);
        }
      if (ro.empty()) { ro.push_back(0); co.push_back(0); }
      y(out.compose(ro), out.compose(co)) += x.entries()(r, c);
    }
  }
  return HermitianOp(out, y);
}

struct EigResult {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // columns
};

/// Hermitian eigendecomposition. Contract: ascending eigenvalues and
/// reconstruction error ||x - V diag(l) V'||_2 <= 1e-9 ||x||_2.
inline EigResult herm_eig(const HermitianOp& x) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(x.entries());
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("herm_eig: eigensolver failed to converge");
  EigResult r{solver.eigenvalues(), solver.eigenvectors()};
  const double nx = x.entries().norm();
  const double resid = (x.entries() - r.eigenvectors * r.eigenvalues.asDiagonal() * r.eigenvectors.adjoint()).norm();
  if (resid > tol::eig_reconstruction * std::max(nx, 1e-300))
    throw std::runtime_error("herm_eig: reconstruction residual " + std::to_string(resid) +
                             " exceeds contract for norm " + std::to_string(nx));
  return r;
}

enum class Schatten { One, Two, Inf };

inline double schatten_norm(const HermitianOp& x, Schatten p) {
  if (p == Schatten::Two) return x.entries().norm();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(x.entries(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("schatten_norm: eigensolver failed");
  const RealVector ev = solver.eigenvalues();
  if (p == Schatten::One) return ev.cwiseAbs().sum();
  return ev.size() ? ev.cwiseAbs().maxCoeff() : 0.0;
}

inline double trace_norm(const HermitianOp& x) { return schatten_norm(x, Schatten::One); }
inline double hs_norm(const HermitianOp& x) { return schatten_norm(x, Schatten::Two); }
inline double op_norm(const HermitianOp& x) { return schatten_norm(x, Schatten::Inf); }

inline double min_eigenvalue(const HermitianOp& x) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(x.entries(), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("min_eigenvalue: eigensolver failed");
  return solver.eigenvalues()(0);
}

/// A quantum state: trace one, positive semidefinite (within tolerances).
class DensityState {
 public:
  DensityState() = default;

  explicit DensityState(HermitianOp op) : op_(std::move(op)) {
    const double tr = op_.trace();
    if (std::abs(tr - 1.0) > tol::state_trace)
      throw std::invalid_argument("DensityState: trace " + std::to_string(tr) + " != 1");
    const double mineig = min_eigenvalue(op_);
    if (mineig < -tol::state_psd)
      throw std::invalid_argument("DensityState: min eigenvalue " + std::to_string(mineig) + " < 0");
  }

  DensityState(SystemLayout layout, const Matrix& raw) : DensityState(HermitianOp(std::move(layout), raw)) {}

  const HermitianOp& op() const { return op_; }
  const SystemLayout& layout() const { return op_.layout(); }
  const Matrix& entries() const { return op_.entries(); }
  long dim() const { return op_.dim(); }

 private:
  HermitianOp op_;
};

inline DensityState maximally_mixed(SystemLayout layout) {
  const long n = layout.total_dim();
  return DensityState(std::move(layout), Matrix::Identity(n, n) / static_cast<double>(n));
}

/// Positive operator-valued measure: PSD elements summing to the identity.
class MeasurementPOVM {
 public:
  MeasurementPOVM() = default;

  MeasurementPOVM(SystemLayout layout, std::vector<HermitianOp> elements)
      : layout_(std::move(layout)), elements_(std::move(elements)) {
    if (elements_.empty()) throw std::invalid_argument("MeasurementPOVM: no elements");
    Matrix sum = Matrix::Zero(layout_.total_dim(), layout_.total_dim());
    for (const auto& e : elements_) {
      if (e.layout() != layout_) throw std::invalid_argument("MeasurementPOVM: element layout mismatch");
      if (min_eigenvalue(e) < -tol::state_psd)
        throw std::invalid_argument("MeasurementPOVM: element not PSD");
      sum += e.entries();
    }
    const double defect = (sum - Matrix::Identity(layout_.total_dim(), layout_.total_dim())).cwiseAbs().maxCoeff();
    if (defect > tol::povm_completeness)
      throw std::invalid_argument("MeasurementPOVM: completeness defect " + std::to_string(defect));
  }

  const SystemLayout& layout() const { return layout_; }
  const std::vector<HermitianOp>& elements() const { return elements_; }
  int outcomes() const { return static_cast<int>(elements_.size()); }

 private:
  SystemLayout layout_;
  std::vector<HermitianOp> elements_;
};

/// Binary POVM (M, 1-M) from an effect operator with 0 <= M <= 1.
inline MeasurementPOVM binary_povm(const HermitianOp& effect) {
  return MeasurementPOVM(effect.layout(), {effect, HermitianOp::identity(effect.layout()) - effect});
}

/// Outcome distribution p_i = Tr(T_i rho). Tiny negative values from
/// roundoff are clipped at zero.
inline std::vector<double> apply_povm(const MeasurementPOVM& m, const DensityState& rho) {
  if (m.layout() != rho.layout())
    throw std::invalid_argument("apply_povm: layout mismatch: " + m.layout().to_string() + " vs " +
                                rho.layout().to_string());
  std::vector<double> p;
  p.reserve(static_cast<std::size_t>(m.outcomes()));
  double sum = 0.0;
  for (const auto& e : m.elements()) {
    double v = e.inner(rho.op());
    if (v < -tol::state_psd)
      throw std::runtime_error("apply_povm: negative outcome probability " + std::to_string(v));
    v = std::max(v, 0.0);
    p.push_back(v);
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::runtime_error("apply_povm: probabilities sum to " + std::to_string(sum));
  return p;
}

/// Kullback-Leibler divergence in bits, with 0 log 0 = 0 and +inf when
/// p_i > 0 while q_i = 0.
inline double classical_kl(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("classical_kl: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    s += p[i] * std::log2(p[i] / q[i]);
  }
  return s;
}

/// Classical 1-norm distance, sum_i |p_i - q_i|.
inline double classical_tv(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("classical_tv: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return s;
}

/// Unrestricted quantum relative entropy D(rho||sigma) in bits, computed
/// spectrally; +inf when supp(rho) is not contained in supp(sigma).
inline double quantum_relent(const DensityState& rho, const DensityState& sigma) {
  rho.op().require_same_layout(sigma.op());
  const EigResult er = herm_eig(rho.op());
  const EigResult es = herm_eig(sigma.op());
  const long n = rho.dim();
  const double support_cut = 1e-12;
  double s = 0.0;
  for (long i = 0; i < n; ++i) {
    const double li = er.eigenvalues(i);
    if (li <= support_cut) continue;
    s += li * std::log2(li);
    for (long j = 0; j < n; ++j) {
      const double mj = es.eigenvalues(j);
      const Complex amp = (es.eigenvectors.col(j).adjoint() * er.eigenvectors.col(i))(0, 0);
      const double ov = std::norm(amp);
      if (li * ov <= 1e-16) continue;
      if (mj <= support_cut) return std::numeric_limits<double>::infinity();
      s -= li * ov * std::log2(mj);
    }
  }
  return s;
}

}  // namespace privstate
