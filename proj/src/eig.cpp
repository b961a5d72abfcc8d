#include "spectramax/eig.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "spectramax/error.hpp"

namespace spectramax {

namespace {

std::span<double> col(Mat& X, int j) { return {X.col(j).data(), static_cast<std::size_t>(X.rows())}; }
std::span<const double> col(const Mat& X, int j) {
  return {X.col(j).data(), static_cast<std::size_t>(X.rows())};
}

// Removes the M-projection onto the unit constant mode c.
void deflate(const std::vector<double>& w, const Vec& c, Mat& X) {
  for (int j = 0; j < X.cols(); ++j) {
    const double a = kernels::wdot(w, span_of(c), col(X, j));
    kernels::axpy(-a, span_of(c), col(X, j));
  }
}

void fill_random(Mat& X, int from, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int j = from; j < X.cols(); ++j)
    for (int i = 0; i < X.rows(); ++i) X(i, j) = U(rng);
}

// Modified Gram-Schmidt in the M inner product, two passes. Columns that
// collapse are replaced by random vectors and re-orthogonalized.
void m_orthonormalize(const std::vector<double>& w, const Vec& c, Mat& X, std::mt19937_64& rng) {
  for (int j = 0; j < X.cols(); ++j) {
    for (int attempt = 0;; ++attempt) {
      const double before = std::sqrt(kernels::wdot(w, col(X, j), col(X, j)));
      for (int pass = 0; pass < 2; ++pass) {
        const double a = kernels::wdot(w, span_of(c), col(X, j));
        kernels::axpy(-a, span_of(c), col(X, j));
        for (int i = 0; i < j; ++i) {
          const double b = kernels::wdot(w, col(X, i), col(X, j));
          kernels::axpy(-b, col(X, i), col(X, j));
        }
      }
      const double nrm = std::sqrt(kernels::wdot(w, col(X, j), col(X, j)));
      if (nrm > 1e-10 * before && nrm > 0.0) {
        X.col(j) /= nrm;
        break;
      }
      if (attempt > 3) throw NoConvergence("cannot complete M-orthonormal basis");
      std::uniform_real_distribution<double> U(-1.0, 1.0);
      for (int i = 0; i < X.rows(); ++i) X(i, j) = U(rng);
    }
  }
}

}  // namespace

SpectralData solve_spectrum(const StiffnessForm& S, const MassForm& M, int m, double tol,
                            const EigOptions& opts) {
  const int n = static_cast<int>(S.size());
  if (M.weights.size() != S.size())
    throw DimensionMismatch("stiffness and mass sizes differ");
  if (m < 2 || tol <= 0.0) throw NoConvergence("need m >= 2 and tol > 0");
  if (m >= n) throw NoConvergence("requested more eigenpairs than the mesh supports");
  const int p = std::min(std::max(2 * m, m + 8), n - 1);
  const std::vector<double>& w = M.weights;

  const double trM = M.trace();
  Vec c = Vec::Constant(n, 1.0 / std::sqrt(trM));

  const double shift = 1e-3 * (S.matrix.diagonal().sum() / trM) / n;
  Eigen::SparseMatrix<double> A = S.matrix;
  for (int i = 0; i < n; ++i) A.coeffRef(i, i) += shift * w[i];
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
  if (ldlt.info() != Eigen::Success) throw NoConvergence("shifted stiffness factorization failed");

  std::mt19937_64 rng(opts.seed);
  Mat X(n, p);
  int filled = 0;
  if (opts.warm_start && opts.warm_start->rows() == n) {
    filled = std::min<int>(p, static_cast<int>(opts.warm_start->cols()));
    X.leftCols(filled) = opts.warm_start->leftCols(filled);
  }
  fill_random(X, filled, rng);
  m_orthonormalize(w, c, X, rng);

  Mat SX(n, p), MX(n, p);
  Vec lambda(p), res(p);
  int it = 0;
  for (;; ++it) {
    // Rayleigh-Ritz on span(X), which is M-orthonormal.
    for (int j = 0; j < p; ++j) S.apply(col(X, j), col(SX, j));
    Mat H = X.transpose() * SX;
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> rr(H);
    X = X * rr.eigenvectors();
    SX = SX * rr.eigenvectors();
    lambda = rr.eigenvalues();
    bool done = true;
    for (int j = 0; j < p; ++j) {
      for (int i = 0; i < n; ++i) MX(i, j) = w[i] * X(i, j);
      const double sn = SX.col(j).norm();
      res(j) = (SX.col(j) - lambda(j) * MX.col(j)).norm() / (sn > 0.0 ? sn : 1.0);
      if (j < m && res(j) > tol) done = false;
    }
    if (done) break;
    if (it >= opts.max_iterations) {
      throw NoConvergence("subspace iteration budget exhausted; worst wanted residual " +
                          std::to_string(res.head(m).maxCoeff()));
    }
    X = ldlt.solve(MX);
    deflate(w, c, X);
    m_orthonormalize(w, c, X, rng);
  }

  SpectralData sd;
  sd.iterations = it;
  sd.eigenvalues.resize(m + 1);
  sd.eigenvectors.resize(n, m + 1);
  sd.residuals.resize(m + 1);
  sd.eigenvalues(0) = 0.0;
  sd.eigenvectors.col(0) = c;
  sd.residuals(0) = 0.0;
  sd.eigenvalues.tail(m) = lambda.head(m);
  sd.eigenvectors.rightCols(m) = X.leftCols(m);
  sd.residuals.tail(m) = res.head(m);
  return sd;
}

namespace {

EigenspaceFrame make_frame(const SpectralData& sd, int k) {
  EigenspaceFrame fr;
  fr.k = k;
  fr.phi = sd.eigenvectors.middleCols(1, k);
  fr.lambda = sd.eigenvalues.segment(1, k).mean();
  return fr;
}

}  // namespace

EigenspaceFrame first_eigenspace(const SpectralData& sd, double cluster_rtol, int multiplicity_cap) {
  const int last = static_cast<int>(sd.eigenvalues.size()) - 1;
  if (last < 2) throw AmbiguousCluster("need at least two eigenpairs beyond the constant mode");
  const double l1 = sd.eigenvalues(1);
  int k = 0;
  while (k + 1 <= last && std::abs(sd.eigenvalues(k + 1) - l1) <= cluster_rtol * l1) ++k;
  if (k + 1 > last)
    throw AmbiguousCluster("no computed eigenvalue above the cluster of size " + std::to_string(k));
  if (k > multiplicity_cap)
    throw AmbiguousCluster("cluster size " + std::to_string(k) + " exceeds cap " +
                           std::to_string(multiplicity_cap));
  const double gap = (sd.eigenvalues(k + 1) - sd.eigenvalues(k)) / l1;
  if (gap < 2.0 * cluster_rtol)
    throw AmbiguousCluster("relative gap " + std::to_string(gap) + " above cluster is below 2*rtol");
  return make_frame(sd, k);
}

EigenspaceFrame leading_cluster(const SpectralData& sd, double rtol, int multiplicity_cap) {
  const int last = static_cast<int>(sd.eigenvalues.size()) - 1;
  const double l1 = sd.eigenvalues(1);
  int k = 1;
  while (k + 1 <= last && k < multiplicity_cap && sd.eigenvalues(k + 1) - l1 <= rtol * l1) ++k;
  return make_frame(sd, k);
}

}  // namespace spectramax
