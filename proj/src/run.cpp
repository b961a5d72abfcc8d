#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <ctime>
#include <limits>
#include <numbers>

#include "spectramax/bounds.hpp"
#include "spectramax/certify.hpp"
#include "spectramax/error.hpp"
#include "spectramax/hyperbolic.hpp"
#include "spectramax/mosertrudinger.hpp"
#include "spectramax/run.hpp"

extern "C" void openblas_set_num_threads(int) __attribute__((weak));

namespace spectramax {

namespace {

constexpr double kEightPi = 8.0 * std::numbers::pi;

Json summary_json(const CertificateSummary& c) {
  return {{"certified", c.certified},
          {"k", c.k},
          {"max_violation", c.max_violation},
          {"support_equality", c.support_equality},
          {"epsilon", c.epsilon}};
}

OptOptions opt_options(const RunConfig& c) {
  OptOptions o;
  o.slack_tol = c.slack_tol;
  o.seed = c.seed;
  return o;
}

std::vector<double> schedule_or_default(const RunConfig& c) {
  return c.schedule.empty() ? parse_schedule("0.08:0.01:half") : c.schedule;
}

int run_optimize(const RunConfig& c, Json& r) {
  const TriMesh m = resolve_mesh(c.mesh);
  const OptReport rep = optimize_conformal(m, schedule_or_default(c), opt_options(c), c.tol.value_or(5e-3));
  r["mesh_hash"] = m.hash();
  r["genus"] = rep.genus;
  r["num_vertices"] = m.num_vertices();
  r["schedule"] = rep.schedule;
  r["skipped"] = rep.skipped;
  r["lambda_per_epsilon"] = rep.lambda_per_epsilon;
  r["iterations_per_epsilon"] = rep.iterations_per_epsilon;
  r["Lambda1_estimate"] = rep.Lambda1_estimate;
  r["yang_yau_bound"] = yang_yau(rep.genus);
  r["yang_yau_ok"] = rep.yang_yau_ok;
  r["nu"] = rep.final_state.nu.nu;
  r["rho"] = rep.final_state.rho.rho;
  r["frame_k"] = rep.final_state.frame.k;
  r["certificate_summary"] = summary_json(rep.certificate);
  r["limit_epsilon"] = rep.schedule.back();
  r["notes"] = {{"limit", "the smallest epsilon run stands in for the epsilon -> 0 limit"},
                {"coupling", "epsilon is kept above h^2 (mean edge length squared); an engineering choice"}};
  return rep.certificate.certified ? 0 : 2;
}

int run_certify(const RunConfig& c, Json& r) {
  const double tol = c.tol.value_or(5e-3);
  const OptOptions opts = opt_options(c);
  std::string spec = c.mesh;
  Json prior;
  if (!c.result.empty()) {
    prior = read_result(c.result);
    if (prior.at("command") != "optimize") throw ConfigError("certify needs the result of an optimize run");
    if (spec.empty()) spec = prior.at("config").at("mesh").get<std::string>();
  }
  const TriMesh m = resolve_mesh(spec);

  OptState s;
  if (!prior.is_null()) {
    if (prior.at("mesh_hash") != m.hash()) throw ConfigError("mesh does not match the result's mesh_hash");
    const auto sched = prior.at("schedule").get<std::vector<double>>();
    if (sched.empty()) throw SchemaError("result has an empty schedule");
    const HeatOperator K = make_heat_operator(m, sched.back(), opts);
    s = make_state(m, K, VertexMeasure::from_weights(prior.at("nu").get<std::vector<double>>()), opts);
  } else {
    s = optimize_conformal(m, schedule_or_default(c), opts, tol).final_state;
  }

  const ELCertificate cert = el_certificate(s, tol);
  const CertificateSummary sum = summarize(cert, s);
  r["mesh_hash"] = m.hash();
  r["genus"] = genus(m);
  r["epsilon"] = s.epsilon();
  r["lambda"] = s.lambda;
  r["certificate_summary"] = summary_json(sum);
  r["planes"] = cert.planes;
  r["support_size"] = cert.support.size();

  Json nodal = Json::array();
  for (int j = 0; j < s.frame.k; ++j) nodal.push_back(nodal_domains(m, s.frame.phi.col(j)));
  r["nodal_domains"] = nodal;

  const double scale = std::sqrt(m.total_area());
  const std::vector<double> radii{0.2 * scale, 0.1 * scale, 0.05 * scale, 0.025 * scale};
  const ConcentrationProfile prof = nonconcentration_profile(m, s.rho, radii);
  Json rows = Json::array();
  for (const auto& row : prof.rows) rows.push_back({{"r", row.r}, {"mass", row.value}, {"fit", row.fit}});
  r["nonconcentration"] = {{"C", prof.C}, {"flagged", prof.flagged}, {"rows", rows}};

  if (cert.certified) {
    const HarmonicMapReport h = harmonic_map_report(s, cert);
    r["harmonic_map"] = {{"measure_match", h.measure_match},
                         {"max_norm_deviation", h.max_norm_deviation},
                         {"conical_candidates", h.conical_candidates}};
  } else {
    r["harmonic_map"] = nullptr;
  }
  return cert.certified ? 0 : 2;
}

int run_mtflow(const RunConfig& c, Json& r) {
  const TriMesh m = resolve_mesh(c.mesh);
  MTOptions o;
  o.tol = c.tol.value_or(1e-6);
  o.threads = c.threads;
  Vec v = Vec::Zero(static_cast<Eigen::Index>(m.num_vertices()));
  std::vector<double> margins;
  if (c.trials > 1 || c.radius > 0.0) {
    const PerturbResult pr = perturb_search(m, c.trials, c.radius, c.seed, o);
    v = pr.best_v;
    margins = pr.margins;
  }
  const MTState st = mt_flow(m, v, low_mode_field(m, 1e-2, c.seed + 1), o);
  const SecondVariation sv = second_variation_check(st, m);
  r["mesh_hash"] = m.hash();
  r["genus"] = genus(m);
  r["J"] = st.J;
  r["J_history"] = st.J_history;
  r["grad_norm"] = st.grad_norm;
  r["iterations"] = st.iterations;
  r["lambda1_times_vol"] = sv.lambda1_times_vol;
  r["margin"] = sv.margin;
  r["pass"] = sv.pass;
  r["eight_pi_excluded"] = sv.eight_pi_excluded;
  r["nearest_to_eight_pi"] = sv.nearest_to_eight_pi;
  r["curvature_condition"] = "unverified";
  r["rigidity_applicable"] = st.rigidity_applicable;
  r["trial_margins"] = margins;
  r["v_sup"] = v.size() ? v.cwiseAbs().maxCoeff() : 0.0;
  return sv.pass ? 0 : 2;
}

int run_degenerate(const RunConfig& c, Json& r) {
  const CollarCylinder cyl = make_collar(c.length);
  r["length"] = c.length;
  r["mu"] = cyl.mu;
  Json rows = Json::array();
  bool monotone = true;
  double prev = std::numeric_limits<double>::infinity();
  for (double a : c.widths) {
    const DegenerationBreakdown b = degeneration_breakdown(cyl, a, uniform_inner_profile(cyl, a));
    rows.push_back({{"a", a},
                    {"bound", b.bound},
                    {"excess", b.excess},
                    {"relative_excess", b.excess / kEightPi},
                    {"C", b.C},
                    {"coordinate", b.coordinate},
                    {"coordinate_ratio", b.coordinate_ratio},
                    {"outside_mass", b.outside_mass},
                    {"balance_residual", b.balance_residual}});
    if (!(b.bound < prev) || !(b.bound > kEightPi)) monotone = false;
    prev = b.bound;
  }
  r["rows"] = rows;
  r["monotone"] = monotone;
  return 0;
}

int run_bounds(const RunConfig& c, Json& r) {
  const auto [lo, hi] = parse_genus_range(c.genus);
  Json rows = Json::array();
  for (int g = lo; g <= hi; ++g) {
    const BoundsReport b = bounds_report(g);
    Json row{{"genus", g}, {"yang_yau", b.yang_yau}, {"lower_bound", b.lower_bound}, {"known_exact", nullptr}};
    if (b.known_exact)
      row["known_exact"] = {{"value", b.known_exact->value},
                            {"symbolic", b.known_exact->symbolic},
                            {"source", b.known_exact->source}};
    rows.push_back(row);
  }
  r["rows"] = rows;
  return 0;
}

int run_balance(const RunConfig& c, Json& r) {
  const TriMesh m = resolve_mesh(c.mesh);
  MobiusTransform pre;
  pre.center = Point3(c.shift[0], c.shift[1], c.shift[2]);
  if (!(pre.center.norm() < 1.0)) throw ConfigError("--shift must lie inside the unit ball");
  std::vector<Point3> pts;
  std::vector<double> w;
  for (std::size_t i = 0; i < m.num_vertices(); ++i) {
    const Point3 p = m.vertices()[i];
    if (!(p.norm() > 0.0)) throw ConfigError("balance needs vertices away from the origin");
    pts.push_back(pre.apply(p.normalized()));
    w.push_back(m.vertex_area(static_cast<int>(i)) / m.total_area());
  }
  auto center_of_mass = [&](const MobiusTransform* T) {
    Point3 s = Point3::Zero();
    for (std::size_t i = 0; i < pts.size(); ++i) s += w[i] * (T ? T->apply(pts[i]) : pts[i]);
    return s;
  };
  const MobiusTransform T = hersch_balance(pts, w);
  r["mesh_hash"] = m.hash();
  r["initial_residual"] = center_of_mass(nullptr).norm();
  r["center"] = {T.center.x(), T.center.y(), T.center.z()};
  r["residual"] = center_of_mass(&T).norm();
  return 0;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void set_blas_threads(int n) {
  if (openblas_set_num_threads && n > 0) openblas_set_num_threads(n);
}

RunOutcome run(const RunConfig& c) {
  validate(c);
  if (c.threads > 0) set_blas_threads(c.threads);
  const auto t0 = std::chrono::steady_clock::now();

  Json r;
  r["schema_version"] = kResultSchemaVersion;
  r["command"] = c.command;
  Json echo = to_json(c);
  echo.erase("out");
  r["config"] = echo;
  r["versions"] = {{"spectramax", kVersion},
                   {"schema", kResultSchemaVersion},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                 "." + std::to_string(EIGEN_MINOR_VERSION)},
                   {"kernels", std::string(kernels::isa_name(kernels::active_isa()))}};
  r["seed"] = c.seed;

  int code = 0;
  if (c.command == "optimize") code = run_optimize(c, r);
  else if (c.command == "certify") code = run_certify(c, r);
  else if (c.command == "mtflow") code = run_mtflow(c, r);
  else if (c.command == "degenerate") code = run_degenerate(c, r);
  else if (c.command == "bounds") code = run_bounds(c, r);
  else if (c.command == "balance") code = run_balance(c, r);

  r["exit_code"] = code;
  r["wallclock"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r["created"] = utc_now();
  validate_result(r);
  return {code, std::move(r)};
}

}  // namespace spectramax
