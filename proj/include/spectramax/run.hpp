#pragma once
// Batch runs: configuration, mesh specs, result files.

#include <array>
#include <optional>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "spectramax/mesh.hpp"

namespace spectramax {

using Json = nlohmann::ordered_json;

inline constexpr int kResultSchemaVersion = 1;
inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::string command;  // optimize, certify, mtflow, degenerate, bounds, balance
  std::string mesh;     // generator spec, fixture:name or file path
  std::vector<double> schedule;
  std::optional<double> tol;  // certificate tolerance (5e-3); flow residual for mtflow (1e-6)
  double slack_tol = 1e-3;  // optimizer stopping slack
  std::uint64_t seed = 0x5eed;
  int threads = 0;          // 0 = library defaults
  std::string out;          // empty = stdout
  std::string genus = "0:6";
  double length = 0.05;
  std::vector<double> widths{10.0, 20.0, 40.0, 80.0};
  int trials = 1;
  double radius = 0.0;
  std::string result;       // certify: earlier optimize result
  std::array<double, 3> shift{0.0, 0.0, 0.0};  // balance: Moebius pre-shift
};

/// Directory searched by fixture:name and by relative paths that do not
/// exist: $SPECTRAMAX_FIXTURES, else the compiled-in fixture directory.
std::string fixture_dir();

/// icosphere:k, flattorus:a,b,c,d:n, revtorus:R,r:n_major,n_minor,
/// doubletorus:r, fixture:name, or an .off/.obj path. Throws ConfigError and
/// mesh errors.
TriMesh resolve_mesh(const std::string& spec);

/// "start:end:half" (or a ratio in (0, 1) instead of half) or a comma list.
/// Throws ConfigError.
std::vector<double> parse_schedule(const std::string& text);
/// "g" or "lo:hi". Throws ConfigError.
std::pair<int, int> parse_genus_range(const std::string& text);
/// Comma-separated reals. Throws ConfigError.
std::vector<double> parse_list(const std::string& text);

/// Throws ConfigError: unknown command, missing mesh, non-decreasing
/// schedule, non-positive tolerances.
void validate(const RunConfig& c);

Json to_json(const RunConfig& c);
/// Overlays the keys present in j onto base. Throws ConfigError.
RunConfig config_from_json(const Json& j, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

/// Fields whose values legitimately differ between identical runs.
inline constexpr std::array<const char*, 2> kVolatileFields{"wallclock", "created"};

/// Field presence and type checks for the envelope and the command payload.
/// Throws SchemaError.
void validate_result(const Json& r);
/// Parses and validates; rejects unknown schema majors. Throws SchemaError.
Json read_result(const std::string& path);
Json parse_result(const std::string& text);
std::string dump_result(const Json& r);
/// Copy with the volatile fields removed.
Json strip_volatile(Json r);

struct RunOutcome {
  int exit_code = 0;  // 0 ok, 2 not certified, 1 error
  Json result;
};

/// Executes the command. Module errors propagate; NotCertified outcomes are
/// reported through exit code 2 with a complete result.
RunOutcome run(const RunConfig& c);

/// Caps BLAS threads when the BLAS library supports it.
void set_blas_threads(int n);

}  // namespace spectramax
