#include "htsim/linalg.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include <cblas.h>
#include <lapacke.h>

namespace htsim {

namespace {

constexpr long kPanel = 384;

double max_diag_scale(const Eigen::MatrixXd& m) {
  return m.diagonal().cwiseAbs().maxCoeff();
}

}  // namespace

struct CholFactor::Packed {
  long n = 0;
  long panel = kPanel;
  std::vector<double> data;        // concatenated trapezoid panels
  std::vector<std::size_t> offset; // per-panel start into data

  long npanels() const { return (n + panel - 1) / panel; }
  double* panel_ptr(long k) { return data.data() + offset[k]; }
  const double* panel_ptr(long k) const { return data.data() + offset[k]; }
  long panel_col0(long k) const { return k * panel; }
  long panel_width(long k) const { return std::min(panel, n - k * panel); }
  long panel_ld(long k) const { return n - k * panel; }
};

Eigen::SparseMatrix<double> SparseSymMatrix::lower() const {
  Eigen::SparseMatrix<double> m(n, n);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(values.size());
  for (int j = 0; j < n; ++j)
    for (long k = col_ptr[j]; k < col_ptr[j + 1]; ++k)
      trips.emplace_back(row_idx[k], j, values[k]);
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

Eigen::MatrixXd SparseSymMatrix::densify() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j)
    for (long k = col_ptr[j]; k < col_ptr[j + 1]; ++k) {
      m(row_idx[k], j) = values[k];
      m(j, row_idx[k]) = values[k];
    }
  return m;
}

namespace {

template <class Model>
DenseSym assemble_dense_impl(const Model& model, const PointSet& points) {
  const int n = points.n();
  DenseSym m;
  m.values.resize(n, n);
  for (int i = 0; i < n; ++i) {
    m.values(i, i) = sill_of(model);
    for (int j = 0; j < i; ++j) {
      const double v = cov_value(model, points.distance(i, j));
      m.values(i, j) = v;
      m.values(j, i) = v;
    }
  }
  return m;
}

}  // namespace

DenseSym assemble_dense(const CovarianceSpec& cov, const PointSet& points) {
  return assemble_dense_impl(cov, points);
}

DenseSym assemble_dense(const TaperedCovariance& tc, const PointSet& points) {
  return assemble_dense_impl(tc, points);
}

SparseSymMatrix assemble_sparse_tapered(const TaperedCovariance& tc, const PointSet& points) {
  tc.taper.validate();
  const int n = points.n();
  const auto pairs = neighbors_within(points, tc.taper.theta);

  // lower triangle: pair (i < j) contributes (row j, col i)
  std::vector<std::vector<std::pair<int, double>>> cols(n);
  for (const auto& p : pairs) {
    const double v = tapered_value(tc, p.distance);
    if (v != 0.0) cols[p.i].emplace_back(p.j, v);
  }
  SparseSymMatrix m;
  m.n = n;
  m.col_ptr.assign(n + 1, 0);
  for (int j = 0; j < n; ++j) m.col_ptr[j + 1] = m.col_ptr[j] + 1 + cols[j].size();
  m.row_idx.resize(m.col_ptr[n]);
  m.values.resize(m.col_ptr[n]);
  for (int j = 0; j < n; ++j) {
    long k = m.col_ptr[j];
    m.row_idx[k] = j;
    m.values[k] = tc.base.sill;
    ++k;
    for (const auto& [row, v] : cols[j]) {  // neighbors_within is (i,j)-sorted
      m.row_idx[k] = row;
      m.values[k] = v;
      ++k;
    }
  }
  return m;
}

CholFactor cholesky(const DenseSym& m, const JitterPolicy& policy) {
  const int n = m.n();
  if (n == 0) throw std::invalid_argument("cholesky: empty matrix");
  const double scale = max_diag_scale(m.values);
  double jitter = 0.0;
  while (true) {
    auto l = std::make_shared<Eigen::MatrixXd>(m.values);
    if (jitter > 0.0) l->diagonal().array() += jitter * scale;
    const int info = LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', n, l->data(), n);
    if (info == 0) {
      l->triangularView<Eigen::StrictlyUpper>().setZero();
      CholFactor f;
      f.kind_ = CholFactor::Kind::Dense;
      f.n_ = n;
      f.jitter_ = jitter;
      f.dense_l_ = std::move(l);
      return f;
    }
    if (info < 0) throw std::runtime_error("cholesky: bad argument to dpotrf");
    if (jitter == 0.0)
      jitter = policy.initial;
    else if (jitter * policy.step <= policy.max)
      jitter *= policy.step;
    else
      throw std::runtime_error("cholesky: matrix not positive definite after jitter");
  }
}

CholFactor sparse_cholesky(const SparseSymMatrix& m, const JitterPolicy& policy) {
  if (m.n == 0) throw std::invalid_argument("sparse_cholesky: empty matrix");
  double scale = 0.0;
  for (int j = 0; j < m.n; ++j) scale = std::max(scale, std::fabs(m.values[m.col_ptr[j]]));
  Eigen::SparseMatrix<double> a = m.lower();
  double jitter = 0.0;
  while (true) {
    auto llt = std::make_shared<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower,
                                                     Eigen::AMDOrdering<int>>>();
    if (jitter > 0.0) {
      Eigen::SparseMatrix<double> aj = a;
      for (int j = 0; j < m.n; ++j) aj.coeffRef(j, j) += jitter * scale;
      llt->compute(aj);
    } else {
      llt->compute(a);
    }
    if (llt->info() == Eigen::Success) {
      CholFactor f;
      f.kind_ = CholFactor::Kind::Sparse;
      f.n_ = m.n;
      f.jitter_ = jitter;
      f.sparse_llt_ = std::move(llt);
      return f;
    }
    if (jitter == 0.0)
      jitter = policy.initial;
    else if (jitter * policy.step <= policy.max)
      jitter *= policy.step;
    else
      throw std::runtime_error("sparse_cholesky: matrix not positive definite after jitter");
  }
}

CholFactor packed_cholesky(long n, const std::function<double(long, long)>& entry,
                           const JitterPolicy& policy) {
  if (n <= 0) throw std::invalid_argument("packed_cholesky: empty matrix");
  auto packed = std::make_shared<CholFactor::Packed>();
  packed->n = n;
  const long np = packed->npanels();
  packed->offset.resize(np);
  std::size_t total = 0;
  for (long k = 0; k < np; ++k) {
    packed->offset[k] = total;
    total += static_cast<std::size_t>(packed->panel_ld(k)) * packed->panel_width(k);
  }
  packed->data.resize(total);

  double scale = 0.0;
  for (long i = 0; i < n; i += std::max(1L, n / 64))
    scale = std::max(scale, std::fabs(entry(i, i)));

  double jitter = 0.0;
  while (true) {
    bool failed = false;
    for (long k = 0; k < np && !failed; ++k) {
      const long col0 = packed->panel_col0(k);
      const long w = packed->panel_width(k);
      const long ld = packed->panel_ld(k);
      double* pk = packed->panel_ptr(k);
      // assemble panel columns col0..col0+w, rows col0..n
      for (long j = 0; j < w; ++j)
        for (long i = 0; i < ld; ++i)
          pk[j * ld + i] = entry(col0 + i, col0 + j);
      if (jitter > 0.0)
        for (long j = 0; j < w; ++j) pk[j * ld + j] += jitter * scale;
      // left-looking update from earlier panels
      for (long p = 0; p < k; ++p) {
        const long wp = packed->panel_width(p);
        const long ldp = packed->panel_ld(p);
        const double* lp = packed->panel_ptr(p) + (col0 - packed->panel_col0(p));
        cblas_dgemm(CblasColMajor, CblasNoTrans, CblasTrans, static_cast<int>(ld),
                    static_cast<int>(w), static_cast<int>(wp), -1.0, lp,
                    static_cast<int>(ldp), lp, static_cast<int>(ldp), 1.0, pk,
                    static_cast<int>(ld));
      }
      const int info = LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', static_cast<int>(w), pk,
                                      static_cast<int>(ld));
      if (info != 0) {
        failed = true;
        break;
      }
      if (ld > w)
        cblas_dtrsm(CblasColMajor, CblasRight, CblasLower, CblasTrans, CblasNonUnit,
                    static_cast<int>(ld - w), static_cast<int>(w), 1.0, pk,
                    static_cast<int>(ld), pk + w, static_cast<int>(ld));
      // clear junk above the diagonal of the diagonal block
      for (long j = 1; j < w; ++j)
        for (long i = 0; i < j; ++i) pk[j * ld + i] = 0.0;
    }
    if (!failed) {
      CholFactor f;
      f.kind_ = CholFactor::Kind::Packed;
      f.n_ = n;
      f.jitter_ = jitter;
      f.packed_ = std::move(packed);
      return f;
    }
    if (jitter == 0.0)
      jitter = policy.initial;
    else if (jitter * policy.step <= policy.max)
      jitter *= policy.step;
    else
      throw std::runtime_error("packed_cholesky: matrix not positive definite after jitter");
  }
}

Eigen::VectorXd CholFactor::solve(const Eigen::VectorXd& rhs) const {
  if (rhs.size() != n_) throw std::invalid_argument("solve: dimension mismatch");
  switch (kind_) {
    case Kind::Dense: {
      Eigen::VectorXd x = rhs;
      LAPACKE_dpotrs(LAPACK_COL_MAJOR, 'L', static_cast<int>(n_), 1, dense_l_->data(),
                     static_cast<int>(n_), x.data(), static_cast<int>(n_));
      return x;
    }
    case Kind::Sparse:
      return sparse_llt_->solve(rhs);
    case Kind::Packed:
      throw std::logic_error("solve: packed factors support mult_lower only");
  }
  return {};
}

Eigen::MatrixXd CholFactor::solve(const Eigen::MatrixXd& rhs) const {
  if (rhs.rows() != n_) throw std::invalid_argument("solve: dimension mismatch");
  switch (kind_) {
    case Kind::Dense: {
      Eigen::MatrixXd x = rhs;
      LAPACKE_dpotrs(LAPACK_COL_MAJOR, 'L', static_cast<int>(n_),
                     static_cast<int>(rhs.cols()), dense_l_->data(), static_cast<int>(n_),
                     x.data(), static_cast<int>(n_));
      return x;
    }
    case Kind::Sparse:
      return sparse_llt_->solve(rhs);
    case Kind::Packed:
      throw std::logic_error("solve: packed factors support mult_lower only");
  }
  return {};
}

Eigen::VectorXd CholFactor::mult_lower(const Eigen::VectorXd& eps) const {
  if (eps.size() != n_) throw std::invalid_argument("mult_lower: dimension mismatch");
  switch (kind_) {
    case Kind::Dense:
      return dense_l_->triangularView<Eigen::Lower>() * eps;
    case Kind::Sparse: {
      // P A P' = L L'  =>  x = Pinv (L eps) has covariance A
      Eigen::VectorXd y = sparse_llt_->matrixL() * eps;
      return sparse_llt_->permutationPinv() * y;
    }
    case Kind::Packed: {
      Eigen::VectorXd y = Eigen::VectorXd::Zero(n_);
      for (long k = 0; k < packed_->npanels(); ++k) {
        const long col0 = packed_->panel_col0(k);
        const long w = packed_->panel_width(k);
        const long ld = packed_->panel_ld(k);
        cblas_dgemv(CblasColMajor, CblasNoTrans, static_cast<int>(ld), static_cast<int>(w),
                    1.0, packed_->panel_ptr(k), static_cast<int>(ld), eps.data() + col0, 1,
                    1.0, y.data() + col0, 1);
      }
      return y;
    }
  }
  return {};
}

Eigen::MatrixXd CholFactor::mult_lower(const Eigen::MatrixXd& eps) const {
  if (eps.rows() != n_) throw std::invalid_argument("mult_lower: dimension mismatch");
  switch (kind_) {
    case Kind::Dense:
      return dense_l_->triangularView<Eigen::Lower>() * eps;
    case Kind::Sparse: {
      Eigen::MatrixXd y = sparse_llt_->matrixL() * eps;
      return sparse_llt_->permutationPinv() * y;
    }
    case Kind::Packed: {
      Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n_, eps.cols());
      for (long k = 0; k < packed_->npanels(); ++k) {
        const long col0 = packed_->panel_col0(k);
        const long w = packed_->panel_width(k);
        const long ld = packed_->panel_ld(k);
        cblas_dgemm(CblasColMajor, CblasNoTrans, CblasNoTrans, static_cast<int>(ld),
                    static_cast<int>(eps.cols()), static_cast<int>(w), 1.0,
                    packed_->panel_ptr(k), static_cast<int>(ld), eps.data() + col0,
                    static_cast<int>(n_), 1.0, y.data() + col0, static_cast<int>(n_));
      }
      return y;
    }
  }
  return {};
}

Eigen::MatrixXd CholFactor::dense_lower() const {
  switch (kind_) {
    case Kind::Dense:
      return *dense_l_;
    case Kind::Sparse: {
      // same operator as mult_lower: (Pinv L)(Pinv L)' = A
      Eigen::MatrixXd l = sparse_llt_->matrixL();
      return sparse_llt_->permutationPinv() * l;
    }
    case Kind::Packed:
      throw std::logic_error("dense_lower: not available for packed factors");
  }
  return {};
}

double sparsity_fraction(const SparseSymMatrix& m) {
  const double full = static_cast<double>(m.n) * m.n;
  const double stored = 2.0 * static_cast<double>(m.nnz()) - m.n;  // both triangles
  return 1.0 - stored / full;
}

double sparsity_fraction(const DenseSym& m, double zero_tol) {
  const int n = m.n();
  long zeros = 0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (std::fabs(m.values(i, j)) <= zero_tol) ++zeros;
  return static_cast<double>(zeros) / (static_cast<double>(n) * n);
}

void dump_coord(std::ostream& os, const SparseSymMatrix& m) {
  os.precision(17);
  for (int j = 0; j < m.n; ++j)
    for (long k = m.col_ptr[j]; k < m.col_ptr[j + 1]; ++k)
      os << m.row_idx[k] << " " << j << " " << m.values[k] << "\n";
}

}  // namespace htsim
