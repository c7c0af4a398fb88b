#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "privstate/operators.hpp"

namespace privstate {

// ---------------------------------------------------------------------------
// Real parametrization of Hermitian matrices.
//
// svec stacks the diagonal, then sqrt(2)-weighted real and imaginary parts
// of the upper triangle, so that <A,B>_HS = svec(A) . svec(B).
// ---------------------------------------------------------------------------

inline long svec_size(int n) { return static_cast<long>(n) * n; }

inline Eigen::VectorXd svec(const Matrix& h) {
  const int n = static_cast<int>(h.rows());
  Eigen::VectorXd v(svec_size(n));
  long k = 0;
  for (int i = 0; i < n; ++i) v(k++) = h(i, i).real();
  const double r2 = std::numbers::sqrt2;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      v(k++) = r2 * h(i, j).real();
      v(k++) = r2 * h(i, j).imag();
    }
  return v;
}

inline Matrix smat(const Eigen::VectorXd& v, int n) {
  Matrix h(n, n);
  long k = 0;
  for (int i = 0; i < n; ++i) h(i, i) = v(k++);
  const double inv_r2 = 1.0 / std::numbers::sqrt2;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double re = v(k++) * inv_r2;
      const double im = v(k++) * inv_r2;
      h(i, j) = Complex(re, im);
      h(j, i) = Complex(re, -im);
    }
  return h;
}

// ---------------------------------------------------------------------------
// Structured linear maps between Hermitian spaces.
// ---------------------------------------------------------------------------

namespace rawop {

inline void decompose_index(long idx, const std::vector<int>& dims, std::vector<int>& out) {
  for (int t = static_cast<int>(dims.size()) - 1; t >= 0; --t) {
    out[static_cast<std::size_t>(t)] = static_cast<int>(idx % dims[static_cast<std::size_t>(t)]);
    idx /= dims[static_cast<std::size_t>(t)];
  }
}

inline long compose_index(const std::vector<int>& digits, const std::vector<int>& dims) {
  long idx = 0;
  for (std::size_t t = 0; t < dims.size(); ++t) idx = idx * dims[t] + digits[t];
  return idx;
}

inline Matrix partial_transpose(const Matrix& x, const std::vector<int>& dims,
                                const std::vector<std::uint8_t>& mask) {
  const long n = x.rows();
  const int m = static_cast<int>(dims.size());
  Matrix y(n, n);
  std::vector<int> ri(m), ci(m), ro(m), co(m);
  for (long r = 0; r < n; ++r) {
    decompose_index(r, dims, ri);
    for (long c = 0; c < n; ++c) {
      decompose_index(c, dims, ci);
      for (int t = 0; t < m; ++t) {
        ro[static_cast<std::size_t>(t)] = mask[static_cast<std::size_t>(t)] ? ci[static_cast<std::size_t>(t)] : ri[static_cast<std::size_t>(t)];
        co[static_cast<std::size_t>(t)] = mask[static_cast<std::size_t>(t)] ? ri[static_cast<std::size_t>(t)] : ci[static_cast<std::size_t>(t)];
      }
      y(compose_index(ro, dims), compose_index(co, dims)) = x(r, c);
    }
  }
  return y;
}

inline Matrix partial_trace(const Matrix& x, const std::vector<int>& dims,
                            const std::vector<std::uint8_t>& mask) {
  const int m = static_cast<int>(dims.size());
  std::vector<int> kept_dims;
  for (int t = 0; t < m; ++t)
    if (!mask[static_cast<std::size_t>(t)]) kept_dims.push_back(dims[static_cast<std::size_t>(t)]);
  long nk = 1;
  for (int d : kept_dims) nk *= d;
  Matrix y = Matrix::Zero(nk, nk);
  const long n = x.rows();
  std::vector<int> ri(m), ci(m), ro, co;
  for (long r = 0; r < n; ++r) {
    decompose_index(r, dims, ri);
    for (long c = 0; c < n; ++c) {
      decompose_index(c, dims, ci);
      bool diag = true;
      for (int t = 0; t < m; ++t)
        if (mask[static_cast<std::size_t>(t)] && ri[static_cast<std::size_t>(t)] != ci[static_cast<std::size_t>(t)]) {
          diag = false;
          break;
        }
      if (!diag) continue;
      ro.clear();
      co.clear();
      for (int t = 0; t < m; ++t)
        if (!mask[static_cast<std::size_t>(t)]) {
          ro.push_back(ri[static_cast<std::size_t>(t)]);
          co.push_back(ci[static_cast<std::size_t>(t)]);
        }
      y(compose_index(ro, kept_dims), compose_index(co, kept_dims)) += x(r, c);
    }
  }
  return y;
}

/// Adjoint of partial_trace: place y on the kept factors, identity on the
/// traced factors.
inline Matrix identity_pad(const Matrix& y, const std::vector<int>& dims,
                           const std::vector<std::uint8_t>& mask) {
  const int m = static_cast<int>(dims.size());
  std::vector<int> kept_dims;
  for (int t = 0; t < m; ++t)
    if (!mask[static_cast<std::size_t>(t)]) kept_dims.push_back(dims[static_cast<std::size_t>(t)]);
  long n = 1;
  for (int d : dims) n *= d;
  Matrix x = Matrix::Zero(n, n);
  std::vector<int> ri(m), ci(m), ro, co;
  for (long r = 0; r < n; ++r) {
    decompose_index(r, dims, ri);
    for (long c = 0; c < n; ++c) {
      decompose_index(c, dims, ci);
      bool diag = true;
      for (int t = 0; t < m; ++t)
        if (mask[static_cast<std::size_t>(t)] && ri[static_cast<std::size_t>(t)] != ci[static_cast<std::size_t>(t)]) {
          diag = false;
          break;
        }
      if (!diag) continue;
      ro.clear();
      co.clear();
      for (int t = 0; t < m; ++t)
        if (!mask[static_cast<std::size_t>(t)]) {
          ro.push_back(ri[static_cast<std::size_t>(t)]);
          co.push_back(ci[static_cast<std::size_t>(t)]);
        }
      x(r, c) = y(compose_index(ro, kept_dims), compose_index(co, kept_dims));
    }
  }
  return x;
}

}  // namespace rawop

/// One primitive step of a linear map between Hermitian spaces.
struct LinOpStep {
  enum class Kind {
    PartialTranspose,  // transpose the masked factors (self-adjoint)
    TraceOut,          // trace out the masked factors
    Sandwich,          // X -> V X V' for a rectangular matrix V
  };
  Kind kind = Kind::PartialTranspose;
  std::vector<int> factor_dims;       // factor dims of the *input* space
  std::vector<std::uint8_t> mask;     // per-factor flag
  Matrix sandwich_v;                  // V for Kind::Sandwich

  static LinOpStep pt(std::vector<int> dims, std::vector<std::uint8_t> m) {
    LinOpStep s;
    s.kind = Kind::PartialTranspose;
    s.factor_dims = std::move(dims);
    s.mask = std::move(m);
    return s;
  }
  static LinOpStep trace_out(std::vector<int> dims, std::vector<std::uint8_t> m) {
    LinOpStep s;
    s.kind = Kind::TraceOut;
    s.factor_dims = std::move(dims);
    s.mask = std::move(m);
    return s;
  }
  static LinOpStep sandwich(Matrix v) {
    LinOpStep s;
    s.kind = Kind::Sandwich;
    s.sandwich_v = std::move(v);
    return s;
  }

  int input_dim() const {
    if (kind == Kind::Sandwich) return static_cast<int>(sandwich_v.cols());
    long n = 1;
    for (int d : factor_dims) n *= d;
    return static_cast<int>(n);
  }
  int output_dim() const {
    if (kind == Kind::Sandwich) return static_cast<int>(sandwich_v.rows());
    if (kind == Kind::PartialTranspose) return input_dim();
    long n = 1;
    for (std::size_t t = 0; t < factor_dims.size(); ++t)
      if (!mask[t]) n *= factor_dims[t];
    return static_cast<int>(n);
  }

  Matrix apply(const Matrix& x) const {
    switch (kind) {
      case Kind::PartialTranspose:
        return rawop::partial_transpose(x, factor_dims, mask);
      case Kind::TraceOut:
        return rawop::partial_trace(x, factor_dims, mask);
      case Kind::Sandwich:
        return sandwich_v * x * sandwich_v.adjoint();
    }
    throw std::logic_error("LinOpStep::apply: bad kind");
  }

  Matrix apply_adjoint(const Matrix& y) const {
    switch (kind) {
      case Kind::PartialTranspose:
        return rawop::partial_transpose(y, factor_dims, mask);
      case Kind::TraceOut:
        return rawop::identity_pad(y, factor_dims, mask);
      case Kind::Sandwich:
        return sandwich_v.adjoint() * y * sandwich_v;
    }
    throw std::logic_error("LinOpStep::apply_adjoint: bad kind");
  }
};

using LinOpChain = std::vector<LinOpStep>;

inline Matrix apply_chain(const LinOpChain& chain, Matrix x) {
  for (const auto& step : chain) x = step.apply(x);
  return x;
}

inline Matrix apply_chain_adjoint(const LinOpChain& chain, Matrix y) {
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) y = it->apply_adjoint(y);
  return y;
}

inline int chain_output_dim(const LinOpChain& chain, int input_dim) {
  int d = input_dim;
  for (const auto& step : chain) {
    if (step.input_dim() != d)
      throw std::invalid_argument("LinOpChain: step expects dim " + std::to_string(step.input_dim()) +
                                  ", got " + std::to_string(d));
    d = step.output_dim();
  }
  return d;
}

// ---------------------------------------------------------------------------
// Program description.
// ---------------------------------------------------------------------------

enum class ConeKind { Zero, Psd };

struct LinTerm {
  int var = 0;
  double coeff = 1.0;
  LinOpChain chain;  // empty chain = identity
};

/// One constraint block: constant + sum_t coeff_t chain_t(X_var) must lie in
/// the cone (PSD) or vanish (Zero). Scalar equality rows are dim-1 blocks.
struct ConstraintBlock {
  ConeKind cone = ConeKind::Psd;
  int dim = 1;
  Matrix constant;
  std::vector<LinTerm> terms;
  std::string name;
};

struct VarBlock {
  std::string name;
  int dim = 1;
};

/// Linear objective over Hermitian variable blocks subject to affine and
/// PSD constraints; the common form of every program in this library.
struct SpectrahedronProgram {
  std::vector<VarBlock> vars;
  bool maximize = true;
  std::vector<std::pair<int, Matrix>> objective;  // sum <C_v, X_v>
  double objective_offset = 0.0;
  std::vector<ConstraintBlock> blocks;

  // Optional certification metadata.
  Eigen::VectorXd slater_point;  // strictly feasible stacked svec, may be empty
  double primal_radius = 0.0;    // bound on ||x||_2 over the feasible set, 0 = unknown

  int add_var(const std::string& name, int dim) {
    vars.push_back({name, dim});
    return static_cast<int>(vars.size()) - 1;
  }

  void add_objective(int var, const Matrix& coeff) { objective.emplace_back(var, coeff); }

  std::size_t add_block(ConeKind cone, int dim, std::string name) {
    ConstraintBlock b;
    b.cone = cone;
    b.dim = dim;
    b.constant = Matrix::Zero(dim, dim);
    b.name = std::move(name);
    blocks.push_back(std::move(b));
    return blocks.size() - 1;
  }

  /// Scalar row Tr(X_var) = rhs as a dim-1 zero-cone block.
  void add_trace_row(int var, double rhs) {
    const int vd = vars[static_cast<std::size_t>(var)].dim;
    const std::size_t bi = add_block(ConeKind::Zero, 1, "tr" + std::to_string(blocks.size()));
    blocks[bi].constant = Matrix::Constant(1, 1, Complex(-rhs, 0.0));
    LinTerm t;
    t.var = var;
    t.coeff = 1.0;
    t.chain.push_back(LinOpStep::trace_out({vd}, {1}));
    blocks[bi].terms.push_back(std::move(t));
  }

  /// Scalar row sum_t <A_t, X_t> = rhs. Each coefficient is expanded into
  /// rank-one sandwiches from its eigendecomposition.
  void add_inner_product_row(const std::vector<std::pair<int, Matrix>>& lhs, double rhs) {
    const std::size_t bi = add_block(ConeKind::Zero, 1, "row" + std::to_string(blocks.size()));
    blocks[bi].constant = Matrix::Constant(1, 1, Complex(-rhs, 0.0));
    for (const auto& [var, coeff] : lhs) {
      Eigen::SelfAdjointEigenSolver<Matrix> eig(coeff);
      if (eig.info() != Eigen::Success)
        throw std::runtime_error("add_inner_product_row: eigensolver failed");
      for (long i = 0; i < coeff.rows(); ++i) {
        const double lam = eig.eigenvalues()(i);
        if (std::abs(lam) < 1e-14) continue;
        LinTerm t;
        t.var = var;
        t.coeff = lam;
        t.chain.push_back(LinOpStep::sandwich(eig.eigenvectors().col(i).adjoint()));
        blocks[bi].terms.push_back(std::move(t));
      }
    }
  }

  long total_var_size() const {
    long n = 0;
    for (const auto& v : vars) n += svec_size(v.dim);
    return n;
  }

  long total_constraint_size() const {
    long m = 0;
    for (const auto& b : blocks) m += svec_size(b.dim);
    return m;
  }

  long var_offset(int var) const {
    long off = 0;
    for (int i = 0; i < var; ++i) off += svec_size(vars[static_cast<std::size_t>(i)].dim);
    return off;
  }

  void validate() const {
    for (const auto& b : blocks) {
      if (b.constant.rows() != b.dim || b.constant.cols() != b.dim)
        throw std::invalid_argument("block '" + b.name + "': constant dim mismatch");
      for (const auto& t : b.terms) {
        if (t.var < 0 || t.var >= static_cast<int>(vars.size()))
          throw std::invalid_argument("block '" + b.name + "': bad var index");
        const int out = chain_output_dim(t.chain, vars[static_cast<std::size_t>(t.var)].dim);
        if (out != b.dim)
          throw std::invalid_argument("block '" + b.name + "': chain output dim " + std::to_string(out) +
                                      " != block dim " + std::to_string(b.dim));
      }
    }
    for (const auto& [var, coeff] : objective) {
      if (var < 0 || var >= static_cast<int>(vars.size()))
        throw std::invalid_argument("objective: bad var index");
      if (coeff.rows() != vars[static_cast<std::size_t>(var)].dim)
        throw std::invalid_argument("objective: coefficient dim mismatch");
    }
  }
};

enum class SolveStatus { Optimal, MaxIter, Infeasible, Unbounded };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::MaxIter: return "max_iter";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
  }
  return "?";
}

struct SolveOptions {
  double gap_tol = 1e-7;   // relative duality gap
  double feas_tol = 1e-8;  // relative primal/dual residual
  int max_iter = 400000;
  double over_relax = 1.6;
  int check_interval = 25;
  bool verbose = false;
};

struct SolveReport {
  SolveStatus status = SolveStatus::MaxIter;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;  // |primal - dual| (absolute)
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  std::vector<Matrix> primal_solution;  // one per variable block
  std::vector<Matrix> dual_solution;    // one per constraint block
};

// ---------------------------------------------------------------------------
// Solver: ADMM on the homogeneous self-dual embedding (SCS scheme), with
// conjugate-gradient solves of (I + A'A) in operator form.
// ---------------------------------------------------------------------------

namespace detail {

class ConicData {
 public:
  explicit ConicData(const SpectrahedronProgram& prog) : prog_(prog) {
    prog.validate();
    n_ = prog.total_var_size();
    m_ = prog.total_constraint_size();
    var_offsets_.resize(prog.vars.size());
    for (std::size_t v = 0; v < prog.vars.size(); ++v)
      var_offsets_[v] = prog.var_offset(static_cast<int>(v));
    block_offsets_.resize(prog.blocks.size());
    long off = 0;
    for (std::size_t b = 0; b < prog.blocks.size(); ++b) {
      block_offsets_[b] = off;
      off += svec_size(prog.blocks[b].dim);
    }
    // Block value S(x) = G + sum coeff chain(X_v) must lie in the cone.
    // Writing s = S(x) gives the conic form Ax + s = b with A = -L and
    // b = svec(G).
    b_ = Eigen::VectorXd::Zero(m_);
    for (std::size_t bi = 0; bi < prog.blocks.size(); ++bi)
      b_.segment(block_offsets_[bi], svec_size(prog.blocks[bi].dim)) = svec(prog.blocks[bi].constant);
    c_ = Eigen::VectorXd::Zero(n_);
    for (const auto& [var, coeff] : prog.objective)
      c_.segment(var_offsets_[static_cast<std::size_t>(var)], svec_size(prog.vars[static_cast<std::size_t>(var)].dim)) += svec(coeff);
    if (prog.maximize) c_ = -c_;
    materialize();
  }

  long n() const { return n_; }
  long m() const { return m_; }
  const Eigen::VectorXd& b() const { return b_; }
  const Eigen::VectorXd& c() const { return c_; }
  const Eigen::SparseMatrix<double>& A() const { return A_; }

  Eigen::VectorXd apply_A(const Eigen::VectorXd& x) const { return A_ * x; }
  Eigen::VectorXd apply_At(const Eigen::VectorXd& y) const { return At_ * y; }

  /// Evaluate all block values S(x) as matrices.
  std::vector<Matrix> block_values(const Eigen::VectorXd& x) const {
    std::vector<Matrix> out;
    out.reserve(prog_.blocks.size());
    for (const auto& blk : prog_.blocks) {
      Matrix acc = blk.constant;
      for (const auto& t : blk.terms) {
        const int vd = prog_.vars[static_cast<std::size_t>(t.var)].dim;
        const Matrix xv = smat(x.segment(var_offsets_[static_cast<std::size_t>(static_cast<std::size_t>(t.var))], svec_size(vd)), vd);
        acc += t.coeff * apply_chain(t.chain, xv);
      }
      out.push_back(std::move(acc));
    }
    return out;
  }

  /// Project the stacked dual vector onto K* (PSD blocks clipped, zero-cone
  /// duals free). `base` shifts the block offsets inside a larger vector.
  void project_dual_cone(Eigen::VectorXd& y, long base = 0) const {
    for (std::size_t bi = 0; bi < prog_.blocks.size(); ++bi) {
      const auto& blk = prog_.blocks[bi];
      if (blk.cone != ConeKind::Psd) continue;
      project_psd_segment(y, base + block_offsets_[bi], blk.dim);
    }
  }

  /// Project the stacked slack vector onto K (PSD blocks clipped, zero-cone
  /// entries zeroed).
  void project_primal_cone(Eigen::VectorXd& s) const {
    for (std::size_t bi = 0; bi < prog_.blocks.size(); ++bi) {
      const auto& blk = prog_.blocks[bi];
      if (blk.cone == ConeKind::Zero) {
        s.segment(block_offsets_[bi], svec_size(blk.dim)).setZero();
      } else {
        project_psd_segment(s, block_offsets_[bi], blk.dim);
      }
    }
  }

  long block_offset(std::size_t bi) const { return block_offsets_[bi]; }
  long var_offset_of(std::size_t v) const { return var_offsets_[v]; }

 private:
  /// Expand every chain into explicit sparse columns; the online iteration
  /// then only performs sparse mat-vec products.
  void materialize() {
    std::vector<Eigen::Triplet<double>> trips;
    for (std::size_t bi = 0; bi < prog_.blocks.size(); ++bi) {
      const auto& blk = prog_.blocks[bi];
      const long boff = block_offsets_[bi];
      for (const auto& t : blk.terms) {
        const int vd = prog_.vars[static_cast<std::size_t>(t.var)].dim;
        const long voff = var_offsets_[static_cast<std::size_t>(t.var)];
        const long cols = svec_size(vd);
        Eigen::VectorXd basis = Eigen::VectorXd::Zero(cols);
        for (long j = 0; j < cols; ++j) {
          basis(j) = 1.0;
          const Eigen::VectorXd col = svec(apply_chain(t.chain, smat(basis, vd)));
          basis(j) = 0.0;
          for (long r = 0; r < col.size(); ++r)
            if (std::abs(col(r)) > 1e-14)
              trips.emplace_back(static_cast<int>(boff + r), static_cast<int>(voff + j),
                                 -t.coeff * col(r));
        }
      }
    }
    A_.resize(m_, n_);
    A_.setFromTriplets(trips.begin(), trips.end());
    A_.makeCompressed();
    At_ = A_.transpose();
    At_.makeCompressed();
  }

  static void project_psd_segment(Eigen::VectorXd& y, long offset, int dim) {
    const Matrix h = smat(y.segment(offset, svec_size(dim)), dim);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
    if (eig.info() != Eigen::Success) throw std::runtime_error("psd projection: eig failed");
    const RealVector ev = eig.eigenvalues();
    if (ev(0) >= 0.0) return;  // already PSD
    Matrix proj = Matrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
      if (ev(i) <= 0.0) continue;
      proj += ev(i) * (eig.eigenvectors().col(i) * eig.eigenvectors().col(i).adjoint());
    }
    y.segment(offset, svec_size(dim)) = svec(proj);
  }

  const SpectrahedronProgram& prog_;
  long n_ = 0, m_ = 0;
  std::vector<long> var_offsets_;
  std::vector<long> block_offsets_;
  Eigen::VectorXd b_, c_;
  Eigen::SparseMatrix<double> A_, At_;
};

/// Solves (I + A'A) z = r. Three regimes: a scalar closed form when
/// A'A = alpha I (all pure norm-body programs), a cached dense Cholesky up
/// to moderate sizes, and conjugate gradients on the sparse factors beyond.
class NormalSolver {
 public:
  explicit NormalSolver(const ConicData& data) : data_(data) {
    const long n = data.n();
    const Eigen::SparseMatrix<double> gram = data.A().transpose() * data.A();
    // alpha-identity detection
    bool uniform = true;
    double alpha = n > 0 ? 0.0 : -1.0;
    {
      Eigen::SparseMatrix<double> g = gram;
      g.makeCompressed();
      bool first = true;
      for (int k = 0; k < g.outerSize() && uniform; ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(g, k); it; ++it) {
          if (it.row() == it.col()) {
            if (first) {
              alpha = it.value();
              first = false;
            } else if (std::abs(it.value() - alpha) > 1e-12 * std::max(1.0, std::abs(alpha))) {
              uniform = false;
              break;
            }
          } else if (std::abs(it.value()) > 1e-13) {
            uniform = false;
            break;
          }
        }
    }
    if (uniform && alpha >= 0.0) {
      mode_ = Mode::AlphaIdentity;
      alpha_ = alpha;
      return;
    }
    if (n <= 4096) {
      mode_ = Mode::DenseCholesky;
      Eigen::MatrixXd dense = Eigen::MatrixXd(gram);
      dense.diagonal().array() += 1.0;
      llt_.compute(dense);
      if (llt_.info() == Eigen::Success) return;
      mode_ = Mode::ConjugateGradient;  // fall through on numerical trouble
    } else {
      mode_ = Mode::ConjugateGradient;
    }
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& r) const {
    if (mode_ == Mode::AlphaIdentity) return r / (1.0 + alpha_);
    if (mode_ == Mode::DenseCholesky) return llt_.solve(r);
    Eigen::VectorXd z = Eigen::VectorXd::Zero(r.size());
    Eigen::VectorXd res = r;
    Eigen::VectorXd p = res;
    double rs = res.squaredNorm();
    const double tol2 = std::pow(1e-13 * std::max(1.0, r.norm()), 2);
    for (int it = 0; it < 1000 && rs > tol2; ++it) {
      const Eigen::VectorXd ap = p + data_.apply_At(data_.apply_A(p));
      const double step = rs / p.dot(ap);
      z += step * p;
      res -= step * ap;
      const double rs_new = res.squaredNorm();
      p = res + (rs_new / rs) * p;
      rs = rs_new;
    }
    return z;
  }

 private:
  enum class Mode { AlphaIdentity, DenseCholesky, ConjugateGradient };
  const ConicData& data_;
  Mode mode_ = Mode::ConjugateGradient;
  double alpha_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

}  // namespace detail

namespace detail {

/// Safeguarded type-II Anderson acceleration over a fixed-point map.
class AndersonAccelerator {
 public:
  AndersonAccelerator(long dim, int memory) : dim_(dim), memory_(memory) {}

  void push(const Eigen::VectorXd& z, const Eigen::VectorXd& gz) {
    if (have_prev_) {
      dz_.push_back(z - prev_z_);
      df_.push_back((gz - z) - prev_f_);
      dg_.push_back(gz - prev_g_);
      if (static_cast<int>(dz_.size()) > memory_) {
        dz_.erase(dz_.begin());
        df_.erase(df_.begin());
        dg_.erase(dg_.begin());
      }
    }
    prev_z_ = z;
    prev_g_ = gz;
    prev_f_ = gz - z;
    have_prev_ = true;
  }

  /// Extrapolated candidate from the current history; empty when history is
  /// too short or the least squares is degenerate.
  Eigen::VectorXd candidate() const {
    const int m = static_cast<int>(df_.size());
    if (m < 1) return {};
    Eigen::MatrixXd F(dim_, m), G(dim_, m);
    for (int j = 0; j < m; ++j) {
      F.col(j) = df_[static_cast<std::size_t>(j)];
      G.col(j) = dg_[static_cast<std::size_t>(j)];
    }
    const Eigen::MatrixXd gram =
        F.transpose() * F + 1e-12 * F.squaredNorm() * Eigen::MatrixXd::Identity(m, m);
    const Eigen::VectorXd gamma = gram.ldlt().solve(F.transpose() * prev_f_);
    if (!gamma.allFinite()) return {};
    return prev_g_ - G * gamma;
  }

  void reset() {
    dz_.clear();
    df_.clear();
    dg_.clear();
    have_prev_ = false;
  }

 private:
  long dim_;
  int memory_;
  std::vector<Eigen::VectorXd> dz_, df_, dg_;
  Eigen::VectorXd prev_z_, prev_g_, prev_f_;
  bool have_prev_ = false;
};

}  // namespace detail

inline SolveReport solve(const SpectrahedronProgram& prog, const SolveOptions& opts = {}) {
  const detail::ConicData data(prog);
  const detail::NormalSolver normal(data);
  const long n = data.n(), m = data.m();
  const Eigen::VectorXd& b0 = data.b();
  const Eigen::VectorXd& c0 = data.c();
  const double b0norm = b0.norm(), c0norm = c0.norm();
  // normalize the b/c scales; residuals are checked in original units
  const double sb = std::max(b0norm, 1e-12);
  const double sc = std::max(c0norm, 1e-12);
  const Eigen::VectorXd b = b0 / sb;
  const Eigen::VectorXd c = c0 / sc;

  // cached q = M^{-1} (c, b)
  const Eigen::VectorXd qx = normal.solve(c - data.apply_At(b));
  const Eigen::VectorXd qy = b + data.apply_A(qx);
  const double denom_const = 1.0 + c.dot(qx) + b.dot(qy);

  // Douglas-Rachford state: u = Pi_C(w), v = u - w (Moreau decomposition)
  const long wdim = n + m + 1;
  const double alpha = opts.over_relax;

  auto project_C = [&](Eigen::VectorXd wv) {
    data.project_dual_cone(wv, n);
    wv(n + m) = std::max(wv(n + m), 0.0);
    return wv;
  };

  // w+ = w + alpha (J_Q(2 Pi_C(w) - w) - Pi_C(w))
  auto step = [&](const Eigen::VectorXd& w, const Eigen::VectorXd& u) {
    const Eigen::VectorXd r = 2.0 * u - w;
    const Eigen::VectorXd px = normal.solve(r.segment(0, n) - data.apply_At(r.segment(n, m)));
    const Eigen::VectorXd py = r.segment(n, m) + data.apply_A(px);
    const double ttau = (r(n + m) + c.dot(px) + b.dot(py)) / denom_const;
    Eigen::VectorXd out = w;
    out.segment(0, n) += alpha * (px - ttau * qx - u.segment(0, n));
    out.segment(n, m) += alpha * (py - ttau * qy - u.segment(n, m));
    out(n + m) += alpha * (ttau - u(n + m));
    return out;
  };

  // the embedding is positively homogeneous: keep iterates on the unit
  // sphere so the trivial zero fixed point is unreachable
  auto normalize = [](Eigen::VectorXd wv) {
    const double nw = wv.norm();
    if (nw > 0.0) wv /= nw;
    return wv;
  };

  Eigen::VectorXd w = Eigen::VectorXd::Zero(wdim);
  w(n + m) = 1.0;
  Eigen::VectorXd u = project_C(w);

  SolveReport rep;

  auto finalize = [&](SolveStatus status, int iters) {
    rep.status = status;
    rep.iterations = iters;
    const double tau = std::max(u(n + m), 1e-300);
    const Eigen::VectorXd x = sb * u.segment(0, n) / tau;
    const Eigen::VectorXd y = sc * u.segment(n, m) / tau;
    const double cx = c0.dot(x);
    const double by = b0.dot(y);
    const double pv = prog.maximize ? -cx : cx;
    const double dv = prog.maximize ? by : -by;
    rep.primal_value = pv + prog.objective_offset;
    rep.dual_value = dv + prog.objective_offset;
    rep.gap = std::abs(pv - dv);
    rep.primal_solution.clear();
    for (std::size_t v = 0; v < prog.vars.size(); ++v)
      rep.primal_solution.push_back(smat(x.segment(data.var_offset_of(v), svec_size(prog.vars[v].dim)), prog.vars[v].dim));
    rep.dual_solution.clear();
    for (std::size_t bi = 0; bi < prog.blocks.size(); ++bi)
      rep.dual_solution.push_back(smat(y.segment(data.block_offset(bi), svec_size(prog.blocks[bi].dim)), prog.blocks[bi].dim));
    return rep;
  };

  detail::AndersonAccelerator aa(wdim, 10);
  int aa_cooldown = 0;

  for (int iter = 1; iter <= opts.max_iter; ++iter) {
    const Eigen::VectorXd gw = normalize(step(w, u));
    const double plain_res = (gw - w).norm();
    aa.push(w, gw);
    bool accepted_aa = false;
    if (aa_cooldown > 0) --aa_cooldown;
    if (plain_res > 0.0 && aa_cooldown == 0) {
      const Eigen::VectorXd cand_raw = aa.candidate();
      if (cand_raw.size() == wdim && cand_raw.allFinite() && cand_raw.norm() > 1e-8) {
        const Eigen::VectorXd cand = normalize(cand_raw);
        const Eigen::VectorXd ucand = project_C(cand);
        const Eigen::VectorXd gcand = normalize(step(cand, ucand));
        const double cand_res = (gcand - cand).norm();
        if (cand_res < plain_res) {
          w = gcand;
          aa.push(cand, gcand);
          accepted_aa = true;
        } else {
          aa.reset();
          aa_cooldown = 5;
        }
      }
    }
    if (!accepted_aa) w = gw;
    u = project_C(w);

    if (iter % opts.check_interval != 0 && iter != opts.max_iter) continue;

    const Eigen::VectorXd v = u - w;  // in C*, complementary to u
    const double utau = u(n + m);
    const double vkappa = v(n + m);

    if (utau > 1e-12 * std::max(1.0, vkappa)) {
      const Eigen::VectorXd x = sb * u.segment(0, n) / utau;
      const Eigen::VectorXd y = sc * u.segment(n, m) / utau;
      // repaired slack: project b - Ax onto the primal cone
      Eigen::VectorXd slack = b0 - data.apply_A(x);
      data.project_primal_cone(slack);
      const double pri = (data.apply_A(x) + slack - b0).norm() / (1.0 + b0norm);
      const double dua = (data.apply_At(y) + c0).norm() / (1.0 + c0norm);
      const double cx = c0.dot(x), by = b0.dot(y);
      const double gap = std::abs(cx + by) / (1.0 + std::abs(cx) + std::abs(by));
      rep.primal_residual = pri;
      rep.dual_residual = dua;
      if (opts.verbose && iter % (opts.check_interval * 40) == 0)
        std::fprintf(stderr, "  iter %7d  pri %.2e  dua %.2e  gap %.2e  fp %.2e\n", iter, pri, dua,
                     gap, plain_res);
      if (pri <= opts.feas_tol && dua <= opts.feas_tol && gap <= opts.gap_tol)
        return finalize(SolveStatus::Optimal, iter);
    }

    // certificates of primal infeasibility / unboundedness
    const double bty = b.dot(u.segment(n, m));
    if (bty < -1e-12) {
      const double res = data.apply_At(u.segment(n, m)).norm() / (-bty);
      if (res <= opts.feas_tol * 10.0) return finalize(SolveStatus::Infeasible, iter);
    }
    const double ctx = c.dot(u.segment(0, n));
    if (ctx < -1e-12) {
      const double res = (data.apply_A(u.segment(0, n)) + v.segment(n, m)).norm() / (-ctx);
      if (res <= opts.feas_tol * 10.0) return finalize(SolveStatus::Unbounded, iter);
    }
  }
  return finalize(SolveStatus::MaxIter, opts.max_iter);
}

// ---------------------------------------------------------------------------
// Certification: exactly feasible primal points by mixing toward a strictly
// feasible point, and rigorous dual-side bounds by cone-projecting the dual
// and paying for the stationarity residual with the feasible-set radius.
// ---------------------------------------------------------------------------

struct CertifiedBracket {
  double feasible_value = std::numeric_limits<double>::quiet_NaN();
  double dual_bound = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd x_feasible;
};

inline CertifiedBracket certify(const SpectrahedronProgram& prog, const SolveReport& rep,
                                double equality_tol = 1e-11) {
  const detail::ConicData data(prog);
  CertifiedBracket out;

  // stacked primal iterate
  Eigen::VectorXd x(data.n());
  for (std::size_t v = 0; v < prog.vars.size(); ++v)
    x.segment(data.var_offset_of(v), svec_size(prog.vars[v].dim)) = svec(rep.primal_solution[v]);

  // --- primal side ---------------------------------------------------------
  if (prog.slater_point.size() == data.n()) {
    // project x onto the zero-cone (equality) rows: x += A_eq' lambda
    bool has_eq = false;
    for (const auto& blk : prog.blocks)
      if (blk.cone == ConeKind::Zero) has_eq = true;
    if (has_eq) {
      auto apply_Aeq = [&](const Eigen::VectorXd& xx) {
        Eigen::VectorXd full = data.apply_A(xx);
        Eigen::VectorXd outv = Eigen::VectorXd::Zero(full.size());
        for (std::size_t bi = 0; bi < prog.blocks.size(); ++bi)
          if (prog.blocks[bi].cone == ConeKind::Zero)
            outv.segment(data.block_offset(bi), svec_size(prog.blocks[bi].dim)) =
                full.segment(data.block_offset(bi), svec_size(prog.blocks[bi].dim));
        return outv;
      };
      // residual r = b_eq - A_eq x, solve (A_eq A_eq') lam = r by CG
      Eigen::VectorXd r = data.b() - data.apply_A(x);
      for (std::size_t bi = 0; bi < prog.blocks.size(); ++bi)
        if (prog.blocks[bi].cone != ConeKind::Zero)
          r.segment(data.block_offset(bi), svec_size(prog.blocks[bi].dim)).setZero();
      Eigen::VectorXd lam = Eigen::VectorXd::Zero(r.size());
      Eigen::VectorXd res = r, p = res;
      double rs = res.squaredNorm();
      for (int it = 0; it < 500 && rs > equality_tol * equality_tol; ++it) {
        const Eigen::VectorXd ap = apply_Aeq(data.apply_At(p));
        const double denom = p.dot(ap);
        if (denom <= 0) break;
        const double a = rs / denom;
        lam += a * p;
        res -= a * ap;
        const double rs_new = res.squaredNorm();
        p = res + (rs_new / rs) * p;
        rs = rs_new;
      }
      x += data.apply_At(lam);
    }
    // mix toward the strictly feasible point until every PSD block clears
    const std::vector<Matrix> sx = data.block_values(x);
    const std::vector<Matrix> s0 = data.block_values(prog.slater_point);
    double theta = 0.0;
    for (std::size_t bi = 0; bi < prog.blocks.size(); ++bi) {
      if (prog.blocks[bi].cone != ConeKind::Psd) continue;
      Eigen::SelfAdjointEigenSolver<Matrix> ex(sx[bi], Eigen::EigenvaluesOnly);
      Eigen::SelfAdjointEigenSolver<Matrix> e0(s0[bi], Eigen::EigenvaluesOnly);
      const double viol = std::max(0.0, -ex.eigenvalues()(0));
      const double margin = e0.eigenvalues()(0);
      if (margin <= 0.0)
        throw std::invalid_argument("certify: slater point not strictly feasible on block '" +
                                    prog.blocks[bi].name + "'");
      if (viol > 0.0) theta = std::max(theta, viol / (viol + margin));
    }
    // tiny extra mixing absorbs roundoff in the eigenvalue estimates
    theta = std::min(1.0, theta * (1.0 + 1e-9) + 1e-14);
    out.x_feasible = (1.0 - theta) * x + theta * prog.slater_point;
    double val = prog.objective_offset;
    for (const auto& [var, coeff] : prog.objective) {
      const int vd = prog.vars[static_cast<std::size_t>(var)].dim;
      const Matrix xv = smat(out.x_feasible.segment(data.var_offset_of(static_cast<std::size_t>(var)), svec_size(vd)), vd);
      val += (coeff.adjoint() * xv).trace().real();
    }
    out.feasible_value = val;
  }

  // --- dual side ------------------------------------------------------------
  if (prog.primal_radius > 0.0) {
    Eigen::VectorXd y(data.m());
    for (std::size_t bi = 0; bi < prog.blocks.size(); ++bi)
      y.segment(data.block_offset(bi), svec_size(prog.blocks[bi].dim)) = svec(rep.dual_solution[bi]);
    data.project_dual_cone(y);
    const Eigen::VectorXd resid = data.c() + data.apply_At(y);
    const double pad = prog.primal_radius * resid.norm();
    const double bty = data.b().dot(y);
    // internal min c.x >= -b.y - pad; translate to the original sense
    if (prog.maximize)
      out.dual_bound = bty + pad + prog.objective_offset;
    else
      out.dual_bound = -bty - pad + prog.objective_offset;
  }
  return out;
}

}  // namespace privstate
