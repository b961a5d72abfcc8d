#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "spectramax/error.hpp"
#include "spectramax/run.hpp"

namespace spectramax {

namespace {

namespace fs = std::filesystem;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_real(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double x = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(x)) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad " + what + " '" + s + "'");
  }
}

int to_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const int x = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad " + what + " '" + s + "'");
  }
}

const std::set<std::string> kCommands{"optimize", "certify", "mtflow", "degenerate", "bounds", "balance"};

}  // namespace

std::string fixture_dir() {
  if (const char* env = std::getenv("SPECTRAMAX_FIXTURES"); env && *env) return env;
  return SPECTRAMAX_FIXTURE_DIR;
}

TriMesh resolve_mesh(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = colon == std::string::npos ? "" : spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);

  if (kind == "icosphere") return make_icosphere(to_int(rest, "subdivision level"));
  if (kind == "flattorus") {
    const auto parts = split(rest, ':');
    if (parts.size() != 2) throw ConfigError("flattorus expects a,b,c,d:n");
    const auto ab = split(parts[0], ',');
    if (ab.size() != 4) throw ConfigError("flattorus lattice needs four numbers");
    return make_flat_torus({to_real(ab[0], "lattice entry"), to_real(ab[1], "lattice entry")},
                           {to_real(ab[2], "lattice entry"), to_real(ab[3], "lattice entry")},
                           to_int(parts[1], "grid size"));
  }
  if (kind == "revtorus") {
    const auto parts = split(rest, ':');
    if (parts.size() != 2) throw ConfigError("revtorus expects R,r:n_major,n_minor");
    const auto radii = split(parts[0], ',');
    const auto counts = split(parts[1], ',');
    if (radii.size() != 2 || counts.size() != 2) throw ConfigError("revtorus expects R,r:n_major,n_minor");
    return make_revolution_torus(to_real(radii[0], "radius"), to_real(radii[1], "radius"),
                                 to_int(counts[0], "count"), to_int(counts[1], "count"));
  }
  if (kind == "doubletorus") return make_double_torus(to_int(rest, "resolution"));
  if (kind == "fixture") {
    for (const char* ext : {"", ".off", ".obj"}) {
      const fs::path p = fs::path(fixture_dir()) / (rest + ext);
      if (fs::is_regular_file(p)) return load_mesh_file(p.string());
    }
    throw ConfigError("fixture '" + rest + "' not found in " + fixture_dir());
  }
  if (spec.empty()) throw ConfigError("no mesh given");
  if (fs::is_regular_file(spec)) return load_mesh_file(spec);
  const fs::path alt = fs::path(fixture_dir()) / spec;
  if (fs::path(spec).is_relative() && fs::is_regular_file(alt)) return load_mesh_file(alt.string());
  throw ConfigError("cannot resolve mesh '" + spec + "'");
}

std::vector<double> parse_schedule(const std::string& text) {
  std::vector<double> out;
  const auto parts = split(text, ':');
  if (parts.size() == 3) {
    const double start = to_real(parts[0], "schedule start");
    const double end = to_real(parts[1], "schedule end");
    const double ratio = parts[2] == "half" ? 0.5 : to_real(parts[2], "schedule ratio");
    if (!(start > 0.0) || !(end > 0.0)) throw ConfigError("schedule entries must be positive");
    if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("schedule ratio must lie in (0, 1)");
    if (end > start) throw ConfigError("schedule must be decreasing: " + text);
    for (double e = start; e >= end * (1.0 - 1e-9); e *= ratio) out.push_back(e);
    return out;
  }
  if (parts.size() != 1) throw ConfigError("schedule expects start:end:half or a comma list");
  for (const auto& s : split(text, ',')) out.push_back(to_real(s, "schedule entry"));
  if (out.empty()) throw ConfigError("empty schedule");
  return out;
}

std::pair<int, int> parse_genus_range(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() == 1) {
    const int g = to_int(parts[0], "genus");
    return {g, g};
  }
  if (parts.size() != 2) throw ConfigError("genus expects g or lo:hi");
  const int lo = to_int(parts[0], "genus"), hi = to_int(parts[1], "genus");
  if (lo < 0 || hi < lo) throw ConfigError("genus range must satisfy 0 <= lo <= hi");
  return {lo, hi};
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split(text, ',')) out.push_back(to_real(s, "list entry"));
  return out;
}

void validate(const RunConfig& c) {
  if (!kCommands.count(c.command)) throw ConfigError("unknown command '" + c.command + "'");
  const bool needs_mesh = c.command == "optimize" || c.command == "mtflow" || c.command == "balance" ||
                          (c.command == "certify" && c.result.empty());
  if (needs_mesh && c.mesh.empty()) throw ConfigError(c.command + " needs --mesh");
  for (std::size_t i = 0; i < c.schedule.size(); ++i) {
    if (!(c.schedule[i] > 0.0)) throw ConfigError("schedule entries must be positive");
    if (i > 0 && !(c.schedule[i] < c.schedule[i - 1]))
      throw ConfigError("schedule must be strictly decreasing");
  }
  if (c.tol && !(*c.tol > 0.0)) throw ConfigError("--tol must be positive");
  if (!(c.slack_tol > 0.0)) throw ConfigError("--slack-tol must be positive");
  if (c.threads < 0) throw ConfigError("--threads must be non-negative");
  if (c.trials < 1) throw ConfigError("--trials must be at least 1");
  if (c.radius < 0.0) throw ConfigError("--radius must be non-negative");
  if (!(c.length > 0.0)) throw ConfigError("--length must be positive");
  for (double a : c.widths)
    if (!(a > 0.0)) throw ConfigError("widths must be positive");
  if (c.command == "bounds") parse_genus_range(c.genus);
}

Json to_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["mesh"] = c.mesh;
  j["schedule"] = c.schedule;
  j["tol"] = c.tol ? Json(*c.tol) : Json(nullptr);
  j["slack_tol"] = c.slack_tol;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["out"] = c.out;
  j["genus"] = c.genus;
  j["length"] = c.length;
  j["widths"] = c.widths;
  j["trials"] = c.trials;
  j["radius"] = c.radius;
  j["result"] = c.result;
  j["shift"] = c.shift;
  return j;
}

RunConfig config_from_json(const Json& j, RunConfig c) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "command") c.command = value.get<std::string>();
      else if (key == "mesh") c.mesh = value.get<std::string>();
      else if (key == "schedule")
        c.schedule = value.is_string() ? parse_schedule(value.get<std::string>()) : value.get<std::vector<double>>();
      else if (key == "tol") c.tol = value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
      else if (key == "slack_tol") c.slack_tol = value.get<double>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "threads") c.threads = value.get<int>();
      else if (key == "out") c.out = value.get<std::string>();
      else if (key == "genus") c.genus = value.is_string() ? value.get<std::string>() : std::to_string(value.get<int>());
      else if (key == "length") c.length = value.get<double>();
      else if (key == "widths") c.widths = value.get<std::vector<double>>();
      else if (key == "trials") c.trials = value.get<int>();
      else if (key == "radius") c.radius = value.get<double>();
      else if (key == "result") c.result = value.get<std::string>();
      else if (key == "shift") c.shift = value.get<std::array<double, 3>>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  try {
    return config_from_json(Json::parse(in), std::move(base));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

}  // namespace spectramax
