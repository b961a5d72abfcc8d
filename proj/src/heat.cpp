#include "spectramax/heat.hpp"

#include <lapacke.h>

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spectramax/error.hpp"

namespace spectramax {

VertexMeasure VertexMeasure::uniform(const TriMesh& m) {
  return from_weights(m.vertex_areas());
}

VertexMeasure VertexMeasure::dirac(const TriMesh& m, int v) {
  VertexMeasure mu;
  mu.nu.assign(m.num_vertices(), 0.0);
  mu.nu.at(v) = 1.0;
  return mu;
}

VertexMeasure VertexMeasure::from_weights(std::vector<double> w) {
  double s = 0.0;
  for (double& x : w) {
    if (!(x > 0.0)) x = 0.0;
    s += x;
  }
  if (!(s > 0.0) || !std::isfinite(s)) throw ZeroNorm("measure has no positive mass");
  for (double& x : w) x /= s;
  return {std::move(w)};
}

std::shared_ptr<const BackgroundSpectrum> dense_background_spectrum(const TriMesh& m) {
  const int n = static_cast<int>(m.num_vertices());
  const StiffnessForm S = stiffness(m);
  auto out = std::make_shared<BackgroundSpectrum>();
  out->mass = Eigen::Map<const Vec>(m.vertex_areas().data(), n);
  const Vec isq = out->mass.cwiseSqrt().cwiseInverse();

  Mat C = Mat::Zero(n, n);
  for (int r = 0; r < n; ++r)
    for (SparseMat::InnerIterator it(S.matrix, r); it; ++it) C(r, it.col()) = it.value() * isq(r) * isq(it.col());
  out->lambda.resize(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'U', n, C.data(), n, out->lambda.data());
  if (info != 0) throw NoConvergence("dsyevd failed with info " + std::to_string(info));

  // The kernel of C is sqrt(M0) * 1; pin it exactly so constants are preserved.
  out->lambda(0) = 0.0;
  C.col(0) = out->mass.cwiseSqrt() / std::sqrt(out->mass.sum());
  out->phi = isq.asDiagonal() * C;
  return out;
}

std::shared_ptr<const BackgroundSpectrum> truncated_background_spectrum(const TriMesh& m, int modes,
                                                                        double tol) {
  const StiffnessForm S = stiffness(m);
  const MassForm M = mass(m, ConformalDensity::constant(m, 1.0));
  const SpectralData sd = solve_spectrum(S, M, modes - 1, tol);
  auto out = std::make_shared<BackgroundSpectrum>();
  out->lambda = sd.eigenvalues;
  out->phi = sd.eigenvectors;
  out->mass = Eigen::Map<const Vec>(M.weights.data(), static_cast<Eigen::Index>(M.weights.size()));
  return out;
}

struct HeatOperator::Factor {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
};

HeatOperator::HeatOperator(const TriMesh& m, double epsilon,
                           std::shared_ptr<const BackgroundSpectrum> spectrum)
    : epsilon_(epsilon), backend_(HeatBackend::spectral), mass_(m.vertex_areas()),
      spectrum_(std::move(spectrum)) {
  if (!spectrum_ || spectrum_->phi.rows() != static_cast<Eigen::Index>(m.num_vertices()))
    throw DimensionMismatch("background spectrum does not match the mesh");
}

HeatOperator::HeatOperator(const TriMesh& m, double epsilon, int substeps)
    : epsilon_(epsilon), backend_(HeatBackend::implicit_euler), substeps_(std::max(1, substeps)),
      mass_(m.vertex_areas()) {
  const StiffnessForm S = stiffness(m);
  Eigen::SparseMatrix<double> A = S.matrix;
  A *= epsilon / substeps_;
  for (int i = 0; i < A.rows(); ++i) A.coeffRef(i, i) += mass_[i];
  auto f = std::make_shared<Factor>();
  f->ldlt.compute(A);
  if (f->ldlt.info() != Eigen::Success) throw NoConvergence("implicit heat step factorization failed");
  factor_ = std::move(f);
}

HeatOperator HeatOperator::with_epsilon(double epsilon) const {
  if (backend_ == HeatBackend::spectral) {
    HeatOperator k = *this;
    k.epsilon_ = epsilon;
    return k;
  }
  throw DimensionMismatch("implicit-Euler operators are rebuilt per epsilon; construct a new one");
}

Mat HeatOperator::apply(const Mat& F) const {
  const Eigen::Index n = static_cast<Eigen::Index>(mass_.size());
  if (F.rows() != n) throw DimensionMismatch("field size does not match the mesh");
  const Eigen::Map<const Vec> w(mass_.data(), n);
  if (backend_ == HeatBackend::spectral) {
    const Mat& P = spectrum_->phi;
    Mat coef = P.transpose() * (w.asDiagonal() * F);
    for (Eigen::Index i = 0; i < coef.rows(); ++i) coef.row(i) *= std::exp(-spectrum_->lambda(i) * epsilon_);
    return P * coef;
  }
  Mat X = F;
  for (int s = 0; s < substeps_; ++s) {
    const Mat rhs = w.asDiagonal() * X;
    X = factor_->ldlt.solve(rhs);
  }
  return X;
}

Vec HeatOperator::apply(const Vec& f) const {
  Mat F = f;
  return apply(F).col(0);
}

ConformalDensity heat_of_measure(const HeatOperator& K, const TriMesh& m, const VertexMeasure& nu) {
  const std::size_t n = m.num_vertices();
  if (nu.nu.size() != n) throw DimensionMismatch("measure size does not match the mesh");
  Vec f(n);
  for (std::size_t v = 0; v < n; ++v) f(v) = nu.nu[v] / m.vertex_area(static_cast<int>(v));
  Vec rho = K.apply(f);
  const double mx = rho.maxCoeff();
  if (rho.minCoeff() < -1e-8 * mx)
    throw PositivityBreach("smoothed density reaches " + std::to_string(rho.minCoeff() / mx) +
                           " of its maximum; epsilon is too small for this mesh");
  const double floor = kDensityFloor / m.total_area();  // mean density is 1 / area
  std::vector<double> r(n);
  for (std::size_t v = 0; v < n; ++v) r[v] = std::max(rho(v), floor);
  return ConformalDensity::from_values(m, std::move(r)).normalized();
}

double gaussian_reference(double d, double epsilon) {
  return std::exp(-d * d / (4.0 * epsilon)) / (4.0 * std::numbers::pi * epsilon);
}

double epsilon_min(const TriMesh& m) {
  const double h = m.mean_edge_length();
  return h * h;
}

}  // namespace spectramax
