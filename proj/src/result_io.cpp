#include <fstream>
#include <map>
#include <sstream>

#include "spectramax/error.hpp"
#include "spectramax/run.hpp"

namespace spectramax {

namespace {

enum class Kind { integer, unsigned_integer, number, string, boolean, array, object, object_or_null };

bool matches(const Json& v, Kind k) {
  switch (k) {
    case Kind::integer: return v.is_number_integer();
    case Kind::unsigned_integer: return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
    case Kind::number: return v.is_number();
    case Kind::string: return v.is_string();
    case Kind::boolean: return v.is_boolean();
    case Kind::array: return v.is_array();
    case Kind::object: return v.is_object();
    case Kind::object_or_null: return v.is_object() || v.is_null();
  }
  return false;
}

using FieldList = std::vector<std::pair<const char*, Kind>>;

const FieldList kEnvelope{
    {"schema_version", Kind::integer}, {"command", Kind::string}, {"config", Kind::object},
    {"versions", Kind::object},        {"seed", Kind::unsigned_integer}, {"wallclock", Kind::number},
    {"created", Kind::string},         {"exit_code", Kind::integer}};

const std::map<std::string, FieldList> kPayload{
    {"optimize",
     {{"mesh_hash", Kind::string},
      {"genus", Kind::integer},
      {"num_vertices", Kind::integer},
      {"schedule", Kind::array},
      {"skipped", Kind::array},
      {"lambda_per_epsilon", Kind::array},
      {"iterations_per_epsilon", Kind::array},
      {"Lambda1_estimate", Kind::number},
      {"yang_yau_bound", Kind::number},
      {"yang_yau_ok", Kind::boolean},
      {"nu", Kind::array},
      {"rho", Kind::array},
      {"frame_k", Kind::integer},
      {"certificate_summary", Kind::object}}},
    {"certify",
     {{"mesh_hash", Kind::string},
      {"genus", Kind::integer},
      {"epsilon", Kind::number},
      {"lambda", Kind::number},
      {"certificate_summary", Kind::object},
      {"planes", Kind::integer},
      {"nodal_domains", Kind::array},
      {"nonconcentration", Kind::object},
      {"harmonic_map", Kind::object_or_null}}},
    {"mtflow",
     {{"mesh_hash", Kind::string},
      {"genus", Kind::integer},
      {"J", Kind::number},
      {"J_history", Kind::array},
      {"grad_norm", Kind::number},
      {"iterations", Kind::integer},
      {"lambda1_times_vol", Kind::number},
      {"margin", Kind::number},
      {"pass", Kind::boolean},
      {"eight_pi_excluded", Kind::boolean},
      {"curvature_condition", Kind::string},
      {"rigidity_applicable", Kind::boolean},
      {"trial_margins", Kind::array}}},
    {"degenerate",
     {{"length", Kind::number}, {"mu", Kind::number}, {"rows", Kind::array}, {"monotone", Kind::boolean}}},
    {"bounds", {{"rows", Kind::array}}},
    {"balance",
     {{"mesh_hash", Kind::string},
      {"center", Kind::array},
      {"residual", Kind::number},
      {"initial_residual", Kind::number}}},
};

void check_fields(const Json& r, const FieldList& fields, const std::string& where) {
  for (const auto& [name, kind] : fields) {
    if (!r.contains(name)) throw SchemaError(where + ": missing field '" + name + "'");
    if (!matches(r.at(name), kind)) throw SchemaError(where + ": field '" + name + "' has the wrong type");
  }
}

}  // namespace

void validate_result(const Json& r) {
  if (!r.is_object()) throw SchemaError("result must be a JSON object");
  if (!r.contains("schema_version") || !r.at("schema_version").is_number_integer())
    throw SchemaError("missing integer schema_version");
  const auto major = r.at("schema_version").get<int>();
  if (major != kResultSchemaVersion)
    throw SchemaError("unsupported schema version " + std::to_string(major) + " (reader understands " +
                      std::to_string(kResultSchemaVersion) + ")");
  check_fields(r, kEnvelope, "result");
  const auto command = r.at("command").get<std::string>();
  const auto it = kPayload.find(command);
  if (it == kPayload.end()) throw SchemaError("unknown command '" + command + "'");
  check_fields(r, it->second, command);
}

Json parse_result(const std::string& text) {
  Json r;
  try {
    r = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("result is not valid JSON: ") + e.what());
  }
  validate_result(r);
  return r;
}

Json read_result(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open result " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_result(ss.str());
}

std::string dump_result(const Json& r) { return r.dump(2) + "\n"; }

Json strip_volatile(Json r) {
  for (const char* f : kVolatileFields) r.erase(f);
  return r;
}

}  // namespace spectramax
