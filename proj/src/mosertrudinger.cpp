#include "spectramax/mosertrudinger.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <numbers>
#include <limits>
#include <algorithm>
#include <atomic>
#include <deque>
#include <mutex>
#include <thread>
#include <random>

#include "spectramax/error.hpp"
#include "spectramax/heat.hpp"

namespace spectramax {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEightPi = 8.0 * std::numbers::pi;

void check_size(const MTProblem& p, const Vec& u) {
  if (static_cast<std::size_t>(u.size()) != p.S.size())
    throw DimensionMismatch("u has " + std::to_string(u.size()) + " entries, mesh has " +
                            std::to_string(p.S.size()));
}

// e^{2u - 2 max u} w and its sum, with the shift returned separately.
struct Exps {
  Vec e;
  double Z = 0.0;
  double shift = 0.0;
};

Exps weighted_exps(const MTProblem& p, const Vec& u) {
  Exps x;
  x.shift = 2.0 * u.maxCoeff();
  x.e = ((2.0 * u).array() - x.shift).exp() * p.w.array();
  x.Z = x.e.sum();
  return x;
}

Vec apply_S(const MTProblem& p, const Vec& u) {
  Vec y(u.size());
  p.S.apply(span_of(u), span_of(y));
  return y;
}

}  // namespace

MTProblem make_mt_problem(const TriMesh& m, const Vec& v) {
  MTProblem p;
  p.S = stiffness(m);
  const auto n = static_cast<Eigen::Index>(m.num_vertices());
  p.v = v.size() == 0 ? Vec::Zero(n) : v;
  if (p.v.size() != n)
    throw DimensionMismatch("v has " + std::to_string(v.size()) + " entries, mesh has " + std::to_string(n));
  const auto& area = m.vertex_areas();
  p.w.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) p.w(i) = std::exp(2.0 * p.v(i)) * area[static_cast<std::size_t>(i)];
  p.w /= p.w.sum();
  return p;
}

double mt_value(const MTProblem& p, const Vec& u) {
  check_size(p, u);
  const Vec Su = apply_S(p, u);
  const Exps x = weighted_exps(p, u);
  return u.dot(Su) / (4.0 * kPi) + 2.0 * p.w.dot(u) - (std::log(x.Z) + x.shift);
}

Vec mt_gradient(const MTProblem& p, const Vec& u) {
  check_size(p, u);
  const Exps x = weighted_exps(p, u);
  return apply_S(p, u) / (2.0 * kPi) + 2.0 * p.w - (2.0 / x.Z) * x.e;
}

Vec mt_residual(const MTProblem& p, const Vec& u) {
  check_size(p, u);
  const Exps x = weighted_exps(p, u);
  const Vec Su = apply_S(p, u);
  Vec F(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) F(i) = Su(i) / p.w(i) + 4.0 * kPi - 4.0 * kPi * x.e(i) / (x.Z * p.w(i));
  return F;
}

double mt_residual_norm(const MTProblem& p, const Vec& u) {
  const Vec F = mt_residual(p, u);
  return std::sqrt((F.array().square() * p.w.array()).sum());
}

double mt_value(const TriMesh& m, const Vec& u, const Vec& v) { return mt_value(make_mt_problem(m, v), u); }

Vec mt_gradient(const TriMesh& m, const Vec& u, const Vec& v) { return mt_gradient(make_mt_problem(m, v), u); }

Vec mt_normalize(const MTProblem& p, Vec u) {
  check_size(p, u);
  const Exps x = weighted_exps(p, u);
  u.array() -= 0.5 * (std::log(x.Z) + x.shift);
  return u;
}

MTState mt_flow(const TriMesh& m, const Vec& v, const Vec& u0, const MTOptions& opts) {
  const MTProblem p = make_mt_problem(m, v);
  const auto n = static_cast<Eigen::Index>(m.num_vertices());

  MTState st;
  st.v = p.v;
  st.rigidity_applicable = genus(m) != 0;
  st.u = mt_normalize(p, u0.size() == 0 ? Vec::Zero(n) : u0);

  SparseMat P = p.S.matrix / (2.0 * kPi);
  for (Eigen::Index i = 0; i < n; ++i) P.coeffRef(i, i) += 4.0 * p.w(i);
  const Eigen::SparseMatrix<double> Pc(P);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(Pc);
  if (ldlt.info() != Eigen::Success) throw FlowNoConvergence("preconditioner factorization failed");

  st.J = mt_value(p, st.u);
  st.J_history.push_back(st.J);
  st.grad_norm = mt_residual_norm(p, st.u);

  // Limited-memory quasi-Newton directions over the H^1 preconditioner; a
  // preconditioned gradient step whenever the update is not a descent.
  std::deque<std::pair<Vec, Vec>> memory;  // (s, y)
  Vec g = mt_gradient(p, st.u);
  while (st.grad_norm > opts.tol) {
    if (st.iterations >= opts.max_iterations)
      throw FlowNoConvergence("residual " + std::to_string(st.grad_norm) + " after " +
                              std::to_string(st.iterations) + " iterations");
    Vec q = g;
    std::vector<double> alpha(memory.size());
    for (std::size_t j = memory.size(); j-- > 0;) {
      const auto& [sj, yj] = memory[j];
      alpha[j] = sj.dot(q) / yj.dot(sj);
      q -= alpha[j] * yj;
    }
    Vec d = ldlt.solve(q);
    for (std::size_t j = 0; j < memory.size(); ++j) {
      const auto& [sj, yj] = memory[j];
      d += (alpha[j] - yj.dot(d) / yj.dot(sj)) * sj;
    }
    d = -d;
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      memory.clear();
      d = -ldlt.solve(g);
      slope = g.dot(d);
    }
    const double slack = opts.descent_slack * std::max(1.0, std::abs(st.J));

    double step = 1.0;
    bool accepted = false;
    Vec trial;
    double J_trial = 0.0;
    for (int h = 0; h < 60; ++h, step *= 0.5) {
      trial = st.u + step * d;
      J_trial = mt_value(p, trial);
      if (J_trial <= st.J + opts.armijo * step * slope + slack) {
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw FlowNoConvergence("line search failed at residual " + std::to_string(st.grad_norm));
    trial = mt_normalize(p, trial);
    const Vec g_new = mt_gradient(p, trial);
    Vec sv = trial - st.u;
    sv.array() -= sv.mean();  // J is constant along u + c
    const Vec yv = g_new - g;
    if (sv.dot(yv) > 1e-14 * sv.norm() * yv.norm()) {
      memory.emplace_back(sv, yv);
      if (memory.size() > static_cast<std::size_t>(opts.memory)) memory.pop_front();
    }
    st.u = trial;
    g = g_new;
    st.J = J_trial;
    st.J_history.push_back(st.J);
    st.grad_norm = mt_residual_norm(p, st.u);
    ++st.iterations;
  }
  return st;
}

SecondVariation second_variation_check(const MTState& s, const TriMesh& m, double tol) {
  if (static_cast<std::size_t>(s.u.size()) != m.num_vertices() || s.v.size() != s.u.size())
    throw DimensionMismatch("state does not match the mesh");
  const StiffnessForm S = stiffness(m);
  auto density = [&](const Vec& f) {
    std::vector<double> r(static_cast<std::size_t>(f.size()));
    const double top = f.maxCoeff();
    for (Eigen::Index i = 0; i < f.size(); ++i) r[static_cast<std::size_t>(i)] = std::exp(2.0 * (f(i) - top));
    return ConformalDensity::from_values(m, std::move(r)).normalized();
  };

  SecondVariation out;
  const SpectralData sd = solve_spectrum(S, mass(m, density(s.u + s.v)), 4, 1e-9);
  out.lambda1_times_vol = sd.eigenvalues(1);
  out.margin = out.lambda1_times_vol - kEightPi;
  out.pass = out.lambda1_times_vol >= kEightPi * (1.0 - tol);

  // Spectrum of the background e^{2v} g until it passes 8 pi.
  const MassForm Mv = mass(m, density(s.v));
  const int cap = std::min<int>(64, static_cast<int>(m.num_vertices()) - 2);
  for (int count = 8;; count = std::min(cap, 2 * count)) {
    const SpectralData bg = solve_spectrum(S, Mv, count, 1e-9);
    double nearest = bg.eigenvalues(1);
    for (Eigen::Index i = 1; i < bg.eigenvalues.size(); ++i)
      if (std::abs(bg.eigenvalues(i) - kEightPi) < std::abs(nearest - kEightPi)) nearest = bg.eigenvalues(i);
    if (bg.eigenvalues(bg.eigenvalues.size() - 1) > kEightPi || count >= cap) {
      out.nearest_to_eight_pi = nearest;
      out.eight_pi_excluded = std::abs(nearest - kEightPi) > 1e-3 * kEightPi;
      break;
    }
  }
  return out;
}

namespace {

Vec combine_modes(const BackgroundSpectrum& bs, double amplitude, std::uint64_t seed) {
  const auto n = bs.phi.rows();
  if (amplitude == 0.0) return Vec::Zero(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  Vec f = Vec::Zero(n);
  for (Eigen::Index j = 1; j < bs.phi.cols(); ++j) f += U(rng) * bs.phi.col(j);
  const double sup = f.cwiseAbs().maxCoeff();
  if (!(sup > 0.0)) return Vec::Zero(n);
  return f * (amplitude / sup);
}

std::shared_ptr<const BackgroundSpectrum> low_modes(const TriMesh& m, int modes) {
  modes = std::max(1, std::min<int>(modes, static_cast<int>(m.num_vertices()) - 2));
  return truncated_background_spectrum(m, modes, 1e-8);
}

}  // namespace

Vec low_mode_field(const TriMesh& m, double amplitude, std::uint64_t seed, int modes) {
  if (amplitude == 0.0) return Vec::Zero(static_cast<Eigen::Index>(m.num_vertices()));
  return combine_modes(*low_modes(m, modes), amplitude, seed);
}

PerturbResult perturb_search(const TriMesh& m, int trials, double radius, std::uint64_t seed,
                             const MTOptions& opts) {
  if (trials < 1) throw DimensionMismatch("perturb_search needs at least one trial");
  if (radius < 0.0) throw DimensionMismatch("negative perturbation radius");
  if (radius == 0.0) trials = 1;

  const auto modes = low_modes(m, 8);
  std::vector<Vec> fields(static_cast<std::size_t>(trials));
  std::vector<double> margins(static_cast<std::size_t>(trials));
  auto run = [&](int t) {
    const auto base = seed + 2 * static_cast<std::uint64_t>(t);
    const Vec v = t == 0 ? Vec::Zero(modes->phi.rows()) : combine_modes(*modes, radius, base);
    // Small seeded start so the flow leaves u = 0 when it is a saddle.
    const Vec u0 = combine_modes(*modes, 1e-2, base + 1);
    const MTState st = mt_flow(m, v, u0, opts);
    margins[static_cast<std::size_t>(t)] = second_variation_check(st, m).margin;
    fields[static_cast<std::size_t>(t)] = v;
  };

  int workers = opts.threads > 0 ? opts.threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, trials);
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int t = next++; t < trials; t = next++) {
      try {
        run(t);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  PerturbResult out;
  out.margins = margins;
  const auto best = std::max_element(margins.begin(), margins.end()) - margins.begin();
  out.best_margin = margins[static_cast<std::size_t>(best)];
  out.best_v = fields[static_cast<std::size_t>(best)];
  return out;
}

}  // namespace spectramax
