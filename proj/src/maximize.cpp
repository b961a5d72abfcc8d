#include "spectramax/maximize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "spectramax/bounds.hpp"
#include "spectramax/certify.hpp"
#include "spectramax/error.hpp"

namespace spectramax {

namespace {

void refresh_spectrum(OptState& s, const OptOptions& opts, const Mat* warm) {
  const MassForm M = mass(*s.mesh, s.rho);
  EigOptions eo;
  eo.seed = opts.seed;
  eo.warm_start = warm;
  const int nev = std::min<int>(opts.eigenpairs, static_cast<int>(s.mesh->num_vertices()) - 2);
  s.spectrum = solve_spectrum(s.S, M, nev, opts.eig_tol, eo);
  s.frame = leading_cluster(s.spectrum, opts.active_rtol, opts.multiplicity_cap);
  s.lambda = s.spectrum.eigenvalues(1);
}

double lambda_max(const Mat& G) {
  if (G.rows() == 1) return G(0, 0);
  return Eigen::SelfAdjointEigenSolver<Mat>(G, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
}

Mat gram_at(const Mat& fields, int k, int x) {
  Mat G(k, k);
  int c = 0;
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j, ++c) G(i, j) = G(j, i) = fields(x, c);
  return G;
}

}  // namespace

HeatOperator make_heat_operator(const TriMesh& m, double epsilon, const OptOptions& opts) {
  if (m.num_vertices() <= opts.dense_heat_limit) return HeatOperator(m, epsilon, dense_background_spectrum(m));
  return HeatOperator(m, epsilon, opts.implicit_substeps);
}

OptState make_state(const TriMesh& m, const HeatOperator& K, VertexMeasure nu, const OptOptions& opts) {
  OptState s;
  s.mesh = &m;
  s.S = stiffness(m);
  s.K = K;
  s.nu = std::move(nu);
  s.rho = heat_of_measure(K, m, s.nu);
  refresh_spectrum(s, opts, nullptr);
  return s;
}

Mat gram_fields(const OptState& s) {
  const int k = s.frame.k;
  const Eigen::Index n = s.frame.phi.rows();
  Mat P(n, k * (k + 1) / 2);
  int c = 0;
  for (int i = 0; i < k; ++i)
    for (int j = i; j < k; ++j, ++c) P.col(c) = s.frame.phi.col(i).cwiseProduct(s.frame.phi.col(j));
  return s.K.apply(P);
}

Vec directional_scores(const OptState& s) {
  const Mat F = gram_fields(s);
  Vec out(F.rows());
  for (Eigen::Index x = 0; x < F.rows(); ++x) out(x) = 1.0 - lambda_max(gram_at(F, s.frame.k, static_cast<int>(x)));
  return out;
}

double directional_score(const OptState& s, int x) {
  const Mat F = gram_fields(s);
  return 1.0 - lambda_max(gram_at(F, s.frame.k, x));
}

namespace {

struct Direction {
  std::vector<int> support;
  std::vector<double> weight;
  double slope = 0.0;  // predicted d lambda / dt at t = 0
  double max_score = 0.0;
  double gap = 0.0;    // slope / lambda for the best direction found
};

Mat averaged_gram(const Mat& F, int k, const std::vector<int>& support, const std::vector<double>& weight) {
  Mat G = Mat::Zero(k, k);
  for (std::size_t i = 0; i < support.size(); ++i) G += weight[i] * gram_at(F, k, support[i]);
  return G;
}

// Spread measure minimizing lambda_max(sum_x mu_x G(x)) by entropic mirror
// descent on a soft-max smoothing. At a multiple eigenvalue this can ascend
// where every single vertex has a negative score.
Direction spread_direction(const Mat& F, const OptState& s, const OptOptions& opts) {
  const int k = s.frame.k;
  const Eigen::Index n = F.rows();
  Vec mu = Vec::Constant(n, 1.0 / static_cast<double>(n));
  Vec best = mu;
  double best_val = std::numeric_limits<double>::infinity();
  const double beta = opts.spread_sharpness;
  for (int it = 0; it < opts.spread_iterations; ++it) {
    const Vec a = F.transpose() * mu;
    Mat A(k, k);
    for (int i = 0, c = 0; i < k; ++i)
      for (int j = i; j < k; ++j, ++c) A(i, j) = A(j, i) = a(c);
    const Eigen::SelfAdjointEigenSolver<Mat> es(A);
    const double top = es.eigenvalues().maxCoeff();
    if (top < best_val) {
      best_val = top;
      best = mu;
    }
    const Vec e = (beta * (es.eigenvalues().array() - top)).exp().matrix();
    const Mat P = es.eigenvectors() * (e / e.sum()).asDiagonal() * es.eigenvectors().transpose();
    Vec p(F.cols());
    for (int i = 0, c = 0; i < k; ++i)
      for (int j = i; j < k; ++j, ++c) p(c) = i == j ? P(i, i) : 2.0 * P(i, j);
    const Vec g = F * p;
    const double range = g.maxCoeff() - g.minCoeff();
    if (!(range > 0.0)) break;
    mu = mu.cwiseProduct((-(opts.spread_rate / range) * (g.array() - g.minCoeff())).exp().matrix());
    mu /= mu.sum();
  }
  Direction d;
  const double cut = 1e-4 * best.maxCoeff();
  double total = 0.0;
  for (Eigen::Index x = 0; x < n; ++x)
    if (best(x) >= cut) {
      d.support.push_back(static_cast<int>(x));
      d.weight.push_back(best(x));
      total += best(x);
    }
  for (double& w : d.weight) w /= total;
  d.gap = 1.0 - lambda_max(averaged_gram(F, k, d.support, d.weight));
  d.slope = s.lambda * d.gap;
  return d;
}

Direction ascent_direction(const OptState& s, const OptOptions& opts) {
  const Mat F = gram_fields(s);
  const int n = static_cast<int>(F.rows());
  Vec score(n);
  for (int x = 0; x < n; ++x) score(x) = 1.0 - lambda_max(gram_at(F, s.frame.k, x));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  const int q = std::min(opts.support_size, n);
  std::partial_sort(order.begin(), order.begin() + q, order.end(), [&](int a, int b) {
    return score(a) > score(b) || (score(a) == score(b) && a < b);
  });
  Direction d;
  d.max_score = score(order[0]);
  double total = 0.0;
  for (int i = 0; i < q && score(order[i]) > 0.0; ++i) {
    d.support.push_back(order[i]);
    d.weight.push_back(score(order[i]));
    total += score(order[i]);
  }
  if (!d.support.empty()) {
    for (double& w : d.weight) w /= total;
    d.gap = 1.0 - lambda_max(averaged_gram(F, s.frame.k, d.support, d.weight));
    d.slope = s.lambda * d.gap;
  } else {
    d.gap = d.max_score;
  }
  if (d.slope > 0.0 || s.frame.k < 2) return d;
  Direction spread = spread_direction(F, s, opts);
  if (!(spread.gap > d.gap)) return d;
  spread.max_score = d.max_score;
  return spread;
}

OptState step_to(const OptState& s, const Direction& d, double t, const OptOptions& opts) {
  std::vector<double> w(s.nu.nu.size());
  for (std::size_t v = 0; v < w.size(); ++v) w[v] = (1.0 - t) * s.nu.nu[v];
  for (std::size_t i = 0; i < d.support.size(); ++i) w[d.support[i]] += t * d.weight[i];
  OptState n;
  n.mesh = s.mesh;
  n.S = s.S;
  n.K = s.K;
  n.nu = VertexMeasure::from_weights(std::move(w));
  n.rho = heat_of_measure(n.K, *n.mesh, n.nu);
  const Mat warm = s.spectrum.eigenvectors.rightCols(s.spectrum.eigenvectors.cols() - 1);
  refresh_spectrum(n, opts, &warm);
  n.history = s.history;
  return n;
}

}  // namespace

namespace {

OptState step_along(const OptState& s, const Direction& d, double stepsize, const OptOptions& opts) {
  if (d.support.empty() || !(d.slope > 0.0))
    throw StallDetected("no ascent direction (max score " + std::to_string(d.max_score) + ", gap " +
                        std::to_string(d.gap) + ")");
  double t = stepsize;
  for (int h = 0; h <= opts.max_halvings; ++h, t *= 0.5) {
    OptState n = step_to(s, d, t, opts);
    if (n.lambda >= s.lambda + opts.armijo * t * d.slope) {
      n.history.push_back({static_cast<int>(s.history.size()), n.lambda, t, d.gap});
      return n;
    }
  }
  throw StallDetected("no improving step after " + std::to_string(opts.max_halvings) + " halvings");
}

}  // namespace

OptState ascent_step(const OptState& s, double stepsize, const OptOptions& opts) {
  if (!(stepsize >= 0.0 && stepsize <= 1.0)) throw StallDetected("stepsize must lie in [0, 1]");
  if (stepsize == 0.0) return s;
  return step_along(s, ascent_direction(s, opts), stepsize, opts);
}

double stationarity_gap(const OptState& s, const OptOptions& opts) {
  const Direction d = ascent_direction(s, opts);
  return std::max(d.max_score, d.gap);
}

OptState maximize_at_epsilon(const TriMesh& m, const HeatOperator& K, const VertexMeasure& init,
                             const OptOptions& opts) {
  const double emin = epsilon_min(m);
  if (K.epsilon() < emin)
    throw EpsilonTooSmall("epsilon " + std::to_string(K.epsilon()) + " is below the mesh limit " +
                          std::to_string(emin));
  OptState s = make_state(m, K, init, opts);
  double t = 0.5;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Direction d = ascent_direction(s, opts);
    const double slack = std::max(d.max_score, d.gap);
    if (slack <= opts.slack_tol) {
      s.history.push_back({it, s.lambda, 0.0, slack});
      return s;
    }
    try {
      OptState n = step_along(s, d, t, opts);
      t = std::min(1.0, 2.0 * n.history.back().step);
      s = std::move(n);
    } catch (const StallDetected&) {
      s.history.push_back({it, s.lambda, 0.0, slack});
      return s;
    }
  }
  return s;
}

OptReport optimize_conformal(const TriMesh& m, const std::vector<double>& schedule, const OptOptions& opts,
                             double certificate_tol) {
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (!(schedule[i] < schedule[i - 1])) throw EpsilonTooSmall("schedule must be strictly decreasing");
  OptReport r;
  r.genus = genus(m);
  const double emin = epsilon_min(m);
  for (double e : schedule) (e >= emin ? r.schedule : r.skipped).push_back(e);
  if (r.schedule.empty()) throw EpsilonTooSmall("every schedule entry is below epsilon_min");

  HeatOperator K = make_heat_operator(m, r.schedule.front(), opts);
  VertexMeasure nu = VertexMeasure::uniform(m);
  for (std::size_t i = 0; i < r.schedule.size(); ++i) {
    if (i > 0) {
      K = K.backend() == HeatBackend::spectral ? K.with_epsilon(r.schedule[i])
                                               : HeatOperator(m, r.schedule[i], opts.implicit_substeps);
    }
    r.final_state = maximize_at_epsilon(m, K, nu, opts);
    nu = r.final_state.nu;
    r.lambda_per_epsilon.push_back(r.final_state.lambda);
    r.iterations_per_epsilon.push_back(static_cast<int>(r.final_state.history.size()));
  }
  r.Lambda1_estimate = r.final_state.lambda;
  r.yang_yau_ok = r.Lambda1_estimate <= yang_yau(r.genus) * 1.05;
  r.certificate = summarize(el_certificate(r.final_state, certificate_tol), r.final_state);
  return r;
}

}  // namespace spectramax
