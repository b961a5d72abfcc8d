// spectramax: batch front end for the conformal eigenvalue toolkit.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "spectramax/error.hpp"
#include "spectramax/run.hpp"

namespace {

using spectramax::RunConfig;

struct Flags {
  std::string mesh, eps, out, config, genus, widths, result, shift;
  double tol = 0.0, slack_tol = 0.0, length = 0.0, radius = 0.0;
  std::uint64_t seed = 0;
  int threads = 0, trials = 0;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON config file; flags override its keys");
  sub->add_option("--seed", f.seed, "random seed");
  sub->add_option("--threads", f.threads, "worker threads (1 = deterministic)");
  sub->add_option("--out", f.out, "result file (default: stdout)");
}

void add_mesh(CLI::App* sub, Flags& f) {
  sub->add_option("--mesh", f.mesh,
                  "icosphere:k | flattorus:a,b,c,d:n | revtorus:R,r:n1,n2 | doubletorus:r | fixture:name | path");
}

void add_eps(CLI::App* sub, Flags& f) {
  sub->add_option("--eps", f.eps, "epsilon schedule: start:end:half or a comma list");
  sub->add_option("--slack-tol", f.slack_tol, "optimizer stopping slack");
}

// Flags given on the command line override the config file.
RunConfig assemble(const CLI::App& sub, const Flags& f) {
  RunConfig c;
  if (sub.count("--config")) c = spectramax::load_config(f.config);
  c.command = sub.get_name();
  auto given = [&](const char* name) {
    try {
      return sub.count(name) > 0;
    } catch (const CLI::OptionNotFound&) {
      return false;
    }
  };
  if (given("--mesh")) c.mesh = f.mesh;
  if (given("--eps")) c.schedule = spectramax::parse_schedule(f.eps);
  if (given("--tol")) c.tol = f.tol;
  if (given("--slack-tol")) c.slack_tol = f.slack_tol;
  if (given("--seed")) c.seed = f.seed;
  if (given("--threads")) c.threads = f.threads;
  if (given("--out")) c.out = f.out;
  if (given("--genus")) c.genus = f.genus;
  if (given("--length")) c.length = f.length;
  if (given("--widths")) c.widths = spectramax::parse_list(f.widths);
  if (given("--trials")) c.trials = f.trials;
  if (given("--radius")) c.radius = f.radius;
  if (given("--result")) c.result = f.result;
  if (given("--shift")) {
    const auto v = spectramax::parse_list(f.shift);
    if (v.size() != 3) throw spectramax::ConfigError("--shift needs three numbers");
    c.shift = {v[0], v[1], v[2]};
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximize and certify first Laplace eigenvalues over conformal classes"};
  app.require_subcommand(1);
  Flags f;

  auto* optimize = app.add_subcommand("optimize", "heat-regularized maximization with certificate");
  add_mesh(optimize, f);
  add_eps(optimize, f);
  optimize->add_option("--tol", f.tol, "certificate tolerance");

  auto* certify = app.add_subcommand("certify", "optimality certificate and diagnostics");
  add_mesh(certify, f);
  add_eps(certify, f);
  certify->add_option("--tol", f.tol, "certificate tolerance");
  certify->add_option("--result", f.result, "optimize result to certify instead of re-running");

  auto* mtflow = app.add_subcommand("mtflow", "minimize the Moser-Trudinger functional and check lambda_1");
  add_mesh(mtflow, f);
  mtflow->add_option("--tol", f.tol, "residual tolerance");
  mtflow->add_option("--trials", f.trials, "perturbation trials");
  mtflow->add_option("--radius", f.radius, "sup-norm of the perturbation v");

  auto* degenerate = app.add_subcommand("degenerate", "collar test-function bounds");
  degenerate->add_option("--length", f.length, "geodesic length l");
  degenerate->add_option("--widths", f.widths, "comma list of cutoff widths a");

  auto* bounds = app.add_subcommand("bounds", "closed-form bounds by genus");
  bounds->add_option("--genus", f.genus, "genus or lo:hi");

  auto* balance = app.add_subcommand("balance", "Hersch balancing of mesh vertices on the sphere");
  add_mesh(balance, f);
  balance->add_option("--shift", f.shift, "Moebius pre-shift x,y,z applied before balancing");

  for (auto* sub : {optimize, certify, mtflow, degenerate, bounds, balance}) add_common(sub, f);

  CLI11_PARSE(app, argc, argv);

  try {
    const CLI::App* sub = app.get_subcommands().front();
    const RunConfig cfg = assemble(*sub, f);
    const spectramax::RunOutcome res = spectramax::run(cfg);
    const std::string text = spectramax::dump_result(res.result);
    if (cfg.out.empty()) {
      std::cout << text;
    } else {
      std::ofstream out(cfg.out, std::ios::binary);
      if (!out) throw spectramax::ConfigError("cannot write " + cfg.out);
      out << text;
    }
    if (res.exit_code == 2) std::cerr << "certify.NotCertified: result written, certificate conditions not met\n";
    return res.exit_code;
  } catch (const spectramax::Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
