#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "htsim/covmodel.hpp"
#include "htsim/field.hpp"

namespace htsim {

struct DenseSym {
  Eigen::MatrixXd values;
  int n() const { return static_cast<int>(values.rows()); }
};

// Lower triangle (row >= col) in compressed column form; the diagonal is
// always stored and stored zeros are pruned at assembly.
struct SparseSymMatrix {
  int n = 0;
  std::vector<long> col_ptr;   // size n+1
  std::vector<int> row_idx;    // ascending within a column
  std::vector<double> values;

  long nnz() const { return static_cast<long>(values.size()); }
  Eigen::SparseMatrix<double> lower() const;
  Eigen::MatrixXd densify() const;
};

struct JitterPolicy {
  double initial = 1e-12;
  double max = 1e-6;
  double step = 10.0;
};

// Cholesky factor of a (possibly permuted, possibly jittered) SPD matrix.
// Dense factors go through LAPACK dpotrf/dpotrs; sparse factors through an
// AMD-ordered simplicial LLT; the packed kind holds only the lower
// triangle in blocked panels and supports multiplication but not solves.
class CholFactor {
 public:
  enum class Kind { Dense, Sparse, Packed };

  Kind kind() const { return kind_; }
  long n() const { return n_; }
  double jitter_applied() const { return jitter_; }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;

  // y = L * eps (honoring the permutation), so that Cov(y) equals the
  // factorized matrix; this is the simulation primitive. The matrix form
  // multiplies many draws at once (one BLAS-3 pass for packed factors).
  Eigen::VectorXd mult_lower(const Eigen::VectorXd& eps) const;
  Eigen::MatrixXd mult_lower(const Eigen::MatrixXd& eps) const;

  // dense/sparse only: reconstruct rows for diagnostics
  Eigen::MatrixXd dense_lower() const;

 private:
  friend CholFactor cholesky(const DenseSym&, const JitterPolicy&);
  friend CholFactor sparse_cholesky(const SparseSymMatrix&, const JitterPolicy&);
  friend CholFactor packed_cholesky(long, const std::function<double(long, long)>&,
                                    const JitterPolicy&);

  Kind kind_ = Kind::Dense;
  long n_ = 0;
  double jitter_ = 0.0;

  std::shared_ptr<Eigen::MatrixXd> dense_l_;
  std::shared_ptr<Eigen::SimplicialLLT<Eigen::SparseMatrix<double>, Eigen::Lower,
                                       Eigen::AMDOrdering<int>>> sparse_llt_;
  struct Packed;
  std::shared_ptr<Packed> packed_;
};

DenseSym assemble_dense(const CovarianceSpec& cov, const PointSet& points);
DenseSym assemble_dense(const TaperedCovariance& tc, const PointSet& points);

SparseSymMatrix assemble_sparse_tapered(const TaperedCovariance& tc, const PointSet& points);

CholFactor cholesky(const DenseSym& m, const JitterPolicy& policy = {});
CholFactor sparse_cholesky(const SparseSymMatrix& m, const JitterPolicy& policy = {});

// Lower-triangle-only blocked factorization for site counts whose full
// n x n storage would not fit in memory. entry(i, j) is called for i >= j.
CholFactor packed_cholesky(long n, const std::function<double(long, long)>& entry,
                           const JitterPolicy& policy = {});

// Fraction of the full n^2 entry grid that is zero.
double sparsity_fraction(const SparseSymMatrix& m);
double sparsity_fraction(const DenseSym& m, double zero_tol = 0.0);

// coordinate (i, j, value) dump of the stored lower triangle
void dump_coord(std::ostream& os, const SparseSymMatrix& m);

}  // namespace htsim
