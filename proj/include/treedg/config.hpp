#ifndef TREEDG_CONFIG_HPP
#define TREEDG_CONFIG_HPP

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "treedg/errors.hpp"

namespace treedg {

// Declarative run configuration. The on-disk format is a strict TOML subset:
// one-level tables, bare keys, values that are integers, floats, booleans,
// quoted strings, or homogeneous arrays of those. Unknown keys are errors so
// typos cannot silently change a run.
struct RunConfig {
  // [equations]
  std::string kind = "linear_advection_2d";
  std::string initial_condition = "convergence_test";
  double gamma = 1.4;
  std::vector<double> advection_velocity; // sized ndims for advection kinds

  // [mesh]
  std::vector<double> coordinates_min{-1.0, -1.0};
  std::vector<double> coordinates_max{1.0, 1.0};
  int initial_refinement_level = 4;
  int n_cells_max = 100000;
  std::vector<bool> periodicity; // per axis; empty means periodic everywhere

  // [solver]
  int polydeg = 3;
  std::string surface_flux = "lax_friedrichs";
  std::string volume_integral = "weak_form";
  std::string volume_flux = "ec";
  std::string fv_flux = "lax_friedrichs";
  double alpha_max = 0.5;

  // [time]
  double t_end = 1.0;
  double cfl = 0.5;

  // [callbacks]
  int analysis_interval = 0;
  int alive_interval = 0;
  int save_interval = 0;
  bool positivity = false;
  double positivity_rho_min = 5e-13;
  double positivity_p_min = 5e-13;
  int amr_interval = 0;
  int amr_min_level = 0;
  int amr_max_level = 30;
  double amr_refine_threshold = 0.3;
  double amr_coarsen_threshold = 0.1;

  // [output]
  std::string directory = "out";
  std::vector<std::string> formats;
  std::string ppm_variable = "rho";
  int ppm_resolution = 400;

  int ndims() const {
    return (kind == "linear_advection_1d" || kind == "burgers_1d" || kind == "euler_1d") ? 1 : 2;
  }
  bool is_euler() const { return kind == "euler_1d" || kind == "euler_2d"; }
  bool is_advection() const {
    return kind == "linear_advection_1d" || kind == "linear_advection_2d";
  }

  std::string render() const;
};

namespace config_detail {

struct Value {
  enum class Type { integer, real, boolean, string, array };
  Type type = Type::string;
  long long i = 0;
  double d = 0.0;
  bool b = false;
  std::string s;
  std::vector<Value> items;
  int line = 0, column = 0;
};

inline std::string location(const std::string& source, int line, int column) {
  return source + ":" + std::to_string(line) + ":" + std::to_string(column);
}

class Parser {
public:
  Parser(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  std::map<std::string, std::map<std::string, Value>> parse() {
    std::map<std::string, std::map<std::string, Value>> tables;
    std::istringstream in(text_);
    std::string raw;
    std::string section;
    int line_no = 0;
    while (std::getline(in, raw)) {
      ++line_no;
      std::string line = strip_comment(raw);
      const auto [trimmed, indent] = trim(line);
      if (trimmed.empty()) continue;
      if (trimmed.front() == '[') {
        if (trimmed.back() != ']')
          fail(line_no, indent + 1, "expected ']' to close table header");
        section = trimmed.substr(1, trimmed.size() - 2);
        if (section.empty() || !is_bare_key(section))
          fail(line_no, indent + 2, "invalid table name '" + section + "'");
        tables[section]; // create even if empty
        continue;
      }
      const auto eq = trimmed.find('=');
      if (eq == std::string::npos) fail(line_no, indent + 1, "expected 'key = value'");
      std::string key = trim(trimmed.substr(0, eq)).first;
      std::string rhs = trim(trimmed.substr(eq + 1)).first;
      if (!is_bare_key(key)) fail(line_no, indent + 1, "invalid key '" + key + "'");
      if (rhs.empty()) fail(line_no, indent + static_cast<int>(eq) + 2, "missing value");
      if (section.empty()) fail(line_no, indent + 1, "key '" + key + "' appears before any [table]");
      if (tables[section].count(key))
        fail(line_no, indent + 1, "duplicate key '" + key + "' in [" + section + "]");
      Value v = parse_value(rhs, line_no, indent + static_cast<int>(eq) + 2);
      tables[section].emplace(std::move(key), std::move(v));
    }
    return tables;
  }

private:
  [[noreturn]] void fail(int line, int column, const std::string& msg) const {
    throw ConfigError(location(source_, line, column) + ": " + msg);
  }

  static std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_string = !in_string;
      if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
  }

  static std::pair<std::string, int> trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return {s.substr(b, e - b), static_cast<int>(b)};
  }

  static bool is_bare_key(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
      if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
    return true;
  }

  Value parse_value(const std::string& rhs, int line, int column) const {
    Value v;
    v.line = line;
    v.column = column;
    if (rhs == "true" || rhs == "false") {
      v.type = Value::Type::boolean;
      v.b = (rhs == "true");
      return v;
    }
    if (rhs.front() == '"') {
      if (rhs.size() < 2 || rhs.back() != '"')
        fail(line, column, "unterminated string value");
      v.type = Value::Type::string;
      v.s = rhs.substr(1, rhs.size() - 2);
      return v;
    }
    if (rhs.front() == '[') {
      if (rhs.back() != ']') fail(line, column, "unterminated array value");
      v.type = Value::Type::array;
      const std::string body = rhs.substr(1, rhs.size() - 2);
      size_t start = 0;
      int depth = 0;
      bool in_string = false;
      for (size_t i = 0; i <= body.size(); ++i) {
        const bool at_end = (i == body.size());
        const char c = at_end ? ',' : body[i];
        if (!at_end && c == '"') in_string = !in_string;
        if (!in_string && c == '[') ++depth;
        if (!in_string && c == ']') --depth;
        if ((c == ',' && depth == 0 && !in_string) || at_end) {
          const auto [piece, off] = trim(body.substr(start, i - start));
          if (!piece.empty())
            v.items.push_back(parse_value(piece, line, column + static_cast<int>(start + off) + 1));
          else if (!at_end)
            fail(line, column + static_cast<int>(i) + 1, "empty array element");
          start = i + 1;
        }
      }
      for (size_t i = 1; i < v.items.size(); ++i) {
        auto norm = [](Value::Type t) {
          return t == Value::Type::integer ? Value::Type::real : t;
        };
        if (norm(v.items[i].type) != norm(v.items[0].type))
          fail(line, column, "arrays must be homogeneous");
      }
      return v;
    }
    // number
    {
      char* end = nullptr;
      const bool looks_integral = rhs.find_first_of(".eE") == std::string::npos;
      if (looks_integral) {
        const long long i = std::strtoll(rhs.c_str(), &end, 10);
        if (end && *end == '\0') {
          v.type = Value::Type::integer;
          v.i = i;
          return v;
        }
      }
      const double d = std::strtod(rhs.c_str(), &end);
      if (end && *end == '\0') {
        v.type = Value::Type::real;
        v.d = d;
        return v;
      }
    }
    fail(line, column, "cannot parse value '" + rhs + "'");
  }

  const std::string& text_;
  std::string source_;
};

inline double as_real(const Value& v, const std::string& source, const std::string& key) {
  if (v.type == Value::Type::real) return v.d;
  if (v.type == Value::Type::integer) return static_cast<double>(v.i);
  throw ConfigError(location(source, v.line, v.column) + ": key '" + key + "' must be a number");
}

inline int as_int(const Value& v, const std::string& source, const std::string& key) {
  if (v.type != Value::Type::integer)
    throw ConfigError(location(source, v.line, v.column) + ": key '" + key +
                      "' must be an integer");
  return static_cast<int>(v.i);
}

inline bool as_bool(const Value& v, const std::string& source, const std::string& key) {
  if (v.type != Value::Type::boolean)
    throw ConfigError(location(source, v.line, v.column) + ": key '" + key + "' must be a boolean");
  return v.b;
}

inline std::string as_string(const Value& v, const std::string& source, const std::string& key) {
  if (v.type != Value::Type::string)
    throw ConfigError(location(source, v.line, v.column) + ": key '" + key +
                      "' must be a quoted string");
  return v.s;
}

inline std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += names[i];
  }
  return out;
}

inline void check_name(const std::string& value, const std::vector<std::string>& allowed,
                       const std::string& key) {
  if (std::find(allowed.begin(), allowed.end(), value) == allowed.end())
    throw ConfigError("key '" + key + "': unknown value \"" + value + "\" (allowed: " +
                      join(allowed) + ")");
}

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  std::string s(buf);
  // keep floats recognizable as floats in the rendered config
  if (s.find_first_of(".eEni") == std::string::npos) s += ".0";
  return s;
}

} // namespace config_detail

// Parses and validates a configuration. `source` names the input in error
// messages (a path, or "<string>" for in-memory text).
inline RunConfig parse_config_text(const std::string& text, const std::string& source = "<string>") {
  using config_detail::Value;
  using config_detail::as_bool;
  using config_detail::as_int;
  using config_detail::as_real;
  using config_detail::as_string;

  config_detail::Parser parser(text, source);
  auto tables = parser.parse();

  static const std::map<std::string, std::vector<std::string>> known_keys = {
      {"equations", {"kind", "initial_condition", "gamma", "advection_velocity"}},
      {"mesh",
       {"coordinates_min", "coordinates_max", "initial_refinement_level", "n_cells_max",
        "periodicity"}},
      {"solver", {"polydeg", "surface_flux", "volume_integral", "volume_flux", "fv_flux",
                  "alpha_max"}},
      {"time", {"t_end", "cfl"}},
      {"callbacks",
       {"analysis_interval", "alive_interval", "save_interval", "positivity",
        "positivity_rho_min", "positivity_p_min", "amr_interval", "amr_min_level",
        "amr_max_level", "amr_refine_threshold", "amr_coarsen_threshold"}},
      {"output", {"directory", "formats", "ppm_variable", "ppm_resolution"}},
  };

  for (const auto& [section, keys] : tables) {
    const auto it = known_keys.find(section);
    if (it == known_keys.end())
      throw ConfigError(source + ": unknown table [" + section + "] (expected one of: " +
                        "equations, mesh, solver, time, callbacks, output)");
    for (const auto& [key, value] : keys) {
      if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
        throw ConfigError(config_detail::location(source, value.line, value.column) +
                          ": unknown key '" + key + "' in [" + section + "] (allowed: " +
                          config_detail::join(it->second) + ")");
    }
  }

  RunConfig cfg;
  auto get = [&](const std::string& section, const std::string& key) -> const Value* {
    const auto t = tables.find(section);
    if (t == tables.end()) return nullptr;
    const auto k = t->second.find(key);
    return (k == t->second.end()) ? nullptr : &k->second;
  };

  if (const Value* v = get("equations", "kind")) cfg.kind = as_string(*v, source, "kind");
  config_detail::check_name(cfg.kind,
                            {"linear_advection_1d", "linear_advection_2d", "burgers_1d",
                             "euler_1d", "euler_2d"},
                            "kind");
  if (const Value* v = get("equations", "initial_condition"))
    cfg.initial_condition = as_string(*v, source, "initial_condition");
  if (const Value* v = get("equations", "gamma")) cfg.gamma = as_real(*v, source, "gamma");
  if (!(cfg.gamma > 1.0)) throw ConfigError("key 'gamma': must be > 1");

  cfg.advection_velocity.assign(cfg.ndims(), 1.0);
  if (const Value* v = get("equations", "advection_velocity")) {
    if (v->type != Value::Type::array)
      throw ConfigError("key 'advection_velocity' must be an array");
    cfg.advection_velocity.clear();
    for (const auto& item : v->items)
      cfg.advection_velocity.push_back(as_real(item, source, "advection_velocity"));
    if (static_cast<int>(cfg.advection_velocity.size()) != cfg.ndims())
      throw ConfigError("key 'advection_velocity': expected " + std::to_string(cfg.ndims()) +
                        " components for " + cfg.kind);
  }

  auto read_coords = [&](const char* key, std::vector<double>& out) {
    if (const Value* v = get("mesh", key)) {
      if (v->type != Value::Type::array)
        throw ConfigError(std::string("key '") + key + "' must be an array");
      out.clear();
      for (const auto& item : v->items) out.push_back(as_real(item, source, key));
    }
    if (static_cast<int>(out.size()) != cfg.ndims())
      throw ConfigError(std::string("key '") + key + "': expected " + std::to_string(cfg.ndims()) +
                        " components for " + cfg.kind);
  };
  cfg.coordinates_min.assign(cfg.ndims(), -1.0);
  cfg.coordinates_max.assign(cfg.ndims(), 1.0);
  read_coords("coordinates_min", cfg.coordinates_min);
  read_coords("coordinates_max", cfg.coordinates_max);

  if (const Value* v = get("mesh", "initial_refinement_level"))
    cfg.initial_refinement_level = as_int(*v, source, "initial_refinement_level");
  if (cfg.initial_refinement_level < 0)
    throw ConfigError("key 'initial_refinement_level': must be >= 0");
  if (const Value* v = get("mesh", "n_cells_max"))
    cfg.n_cells_max = as_int(*v, source, "n_cells_max");
  if (cfg.n_cells_max < 1) throw ConfigError("key 'n_cells_max': must be >= 1");

  cfg.periodicity.assign(cfg.ndims(), true);
  if (const Value* v = get("mesh", "periodicity")) {
    if (v->type == Value::Type::boolean) {
      cfg.periodicity.assign(cfg.ndims(), v->b);
    } else if (v->type == Value::Type::array) {
      if (static_cast<int>(v->items.size()) != cfg.ndims())
        throw ConfigError("key 'periodicity': expected " + std::to_string(cfg.ndims()) +
                          " entries");
      cfg.periodicity.clear();
      for (const auto& item : v->items)
        cfg.periodicity.push_back(as_bool(item, source, "periodicity"));
    } else {
      throw ConfigError("key 'periodicity' must be a boolean or an array of booleans");
    }
  }

  if (const Value* v = get("solver", "polydeg")) cfg.polydeg = as_int(*v, source, "polydeg");
  if (cfg.polydeg < 1) throw ConfigError("key 'polydeg': must be >= 1");
  if (const Value* v = get("solver", "surface_flux"))
    cfg.surface_flux = as_string(*v, source, "surface_flux");
  config_detail::check_name(cfg.surface_flux, {"central", "lax_friedrichs", "hll", "ec"},
                            "surface_flux");
  if (const Value* v = get("solver", "volume_integral"))
    cfg.volume_integral = as_string(*v, source, "volume_integral");
  config_detail::check_name(cfg.volume_integral,
                            {"weak_form", "flux_differencing", "shock_capturing"},
                            "volume_integral");
  if (const Value* v = get("solver", "volume_flux"))
    cfg.volume_flux = as_string(*v, source, "volume_flux");
  config_detail::check_name(cfg.volume_flux, {"central", "ec"}, "volume_flux");
  if (const Value* v = get("solver", "fv_flux")) cfg.fv_flux = as_string(*v, source, "fv_flux");
  config_detail::check_name(cfg.fv_flux, {"lax_friedrichs", "hll"}, "fv_flux");
  if (const Value* v = get("solver", "alpha_max")) cfg.alpha_max = as_real(*v, source, "alpha_max");
  if (cfg.alpha_max < 0.0 || cfg.alpha_max > 1.0)
    throw ConfigError("key 'alpha_max': must lie in [0, 1]");

  if (const Value* v = get("time", "t_end")) cfg.t_end = as_real(*v, source, "t_end");
  if (cfg.t_end < 0.0) throw ConfigError("key 't_end': must be >= 0");
  if (const Value* v = get("time", "cfl")) cfg.cfl = as_real(*v, source, "cfl");
  if (!(cfg.cfl > 0.0 && cfg.cfl <= 1.0))
    throw ConfigError("key 'cfl': value " + config_detail::format_real(cfg.cfl) +
                      " outside the valid range (0,1]");

  auto read_interval = [&](const char* key, int& out) {
    if (const Value* v = get("callbacks", key)) out = as_int(*v, source, key);
    if (out < 0) throw ConfigError(std::string("key '") + key + "': must be >= 0");
  };
  read_interval("analysis_interval", cfg.analysis_interval);
  read_interval("alive_interval", cfg.alive_interval);
  read_interval("save_interval", cfg.save_interval);
  read_interval("amr_interval", cfg.amr_interval);
  if (const Value* v = get("callbacks", "positivity"))
    cfg.positivity = as_bool(*v, source, "positivity");
  if (const Value* v = get("callbacks", "positivity_rho_min"))
    cfg.positivity_rho_min = as_real(*v, source, "positivity_rho_min");
  if (const Value* v = get("callbacks", "positivity_p_min"))
    cfg.positivity_p_min = as_real(*v, source, "positivity_p_min");
  if (const Value* v = get("callbacks", "amr_min_level"))
    cfg.amr_min_level = as_int(*v, source, "amr_min_level");
  if (const Value* v = get("callbacks", "amr_max_level"))
    cfg.amr_max_level = as_int(*v, source, "amr_max_level");
  if (cfg.amr_min_level < 0 || cfg.amr_max_level < cfg.amr_min_level)
    throw ConfigError("keys 'amr_min_level'/'amr_max_level': need 0 <= min <= max");
  if (const Value* v = get("callbacks", "amr_refine_threshold"))
    cfg.amr_refine_threshold = as_real(*v, source, "amr_refine_threshold");
  if (const Value* v = get("callbacks", "amr_coarsen_threshold"))
    cfg.amr_coarsen_threshold = as_real(*v, source, "amr_coarsen_threshold");

  if (const Value* v = get("output", "directory"))
    cfg.directory = as_string(*v, source, "directory");
  if (const Value* v = get("output", "formats")) {
    if (v->type != Value::Type::array) throw ConfigError("key 'formats' must be an array");
    cfg.formats.clear();
    for (const auto& item : v->items) {
      const std::string f = as_string(item, source, "formats");
      config_detail::check_name(f, {"vtk", "csv", "ppm"}, "formats");
      cfg.formats.push_back(f);
    }
  }
  if (const Value* v = get("output", "ppm_variable"))
    cfg.ppm_variable = as_string(*v, source, "ppm_variable");
  if (const Value* v = get("output", "ppm_resolution"))
    cfg.ppm_resolution = as_int(*v, source, "ppm_resolution");
  if (cfg.ppm_resolution < 2) throw ConfigError("key 'ppm_resolution': must be >= 2");

  return cfg;
}

inline RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config_text(text.str(), path);
}

// Canonical renderer; parse_config_text(render()) reproduces the config.
inline std::string RunConfig::render() const {
  using config_detail::format_real;
  std::ostringstream o;
  auto real_array = [&](const std::vector<double>& a) {
    std::string s = "[";
    for (size_t i = 0; i < a.size(); ++i) s += (i ? ", " : "") + format_real(a[i]);
    return s + "]";
  };
  o << "[equations]\n";
  o << "kind = \"" << kind << "\"\n";
  o << "initial_condition = \"" << initial_condition << "\"\n";
  if (is_euler()) o << "gamma = " << format_real(gamma) << "\n";
  if (is_advection()) o << "advection_velocity = " << real_array(advection_velocity) << "\n";
  o << "\n[mesh]\n";
  o << "coordinates_min = " << real_array(coordinates_min) << "\n";
  o << "coordinates_max = " << real_array(coordinates_max) << "\n";
  o << "initial_refinement_level = " << initial_refinement_level << "\n";
  o << "n_cells_max = " << n_cells_max << "\n";
  o << "periodicity = [";
  for (size_t i = 0; i < periodicity.size(); ++i)
    o << (i ? ", " : "") << (periodicity[i] ? "true" : "false");
  o << "]\n";
  o << "\n[solver]\n";
  o << "polydeg = " << polydeg << "\n";
  o << "surface_flux = \"" << surface_flux << "\"\n";
  o << "volume_integral = \"" << volume_integral << "\"\n";
  if (volume_integral != "weak_form") o << "volume_flux = \"" << volume_flux << "\"\n";
  if (volume_integral == "shock_capturing") {
    o << "fv_flux = \"" << fv_flux << "\"\n";
    o << "alpha_max = " << format_real(alpha_max) << "\n";
  }
  o << "\n[time]\n";
  o << "t_end = " << format_real(t_end) << "\n";
  o << "cfl = " << format_real(cfl) << "\n";
  o << "\n[callbacks]\n";
  o << "analysis_interval = " << analysis_interval << "\n";
  o << "alive_interval = " << alive_interval << "\n";
  o << "save_interval = " << save_interval << "\n";
  o << "positivity = " << (positivity ? "true" : "false") << "\n";
  if (positivity) {
    o << "positivity_rho_min = " << format_real(positivity_rho_min) << "\n";
    o << "positivity_p_min = " << format_real(positivity_p_min) << "\n";
  }
  o << "amr_interval = " << amr_interval << "\n";
  if (amr_interval > 0) {
    o << "amr_min_level = " << amr_min_level << "\n";
    o << "amr_max_level = " << amr_max_level << "\n";
    o << "amr_refine_threshold = " << format_real(amr_refine_threshold) << "\n";
    o << "amr_coarsen_threshold = " << format_real(amr_coarsen_threshold) << "\n";
  }
  o << "\n[output]\n";
  o << "directory = \"" << directory << "\"\n";
  o << "formats = [";
  for (size_t i = 0; i < formats.size(); ++i) o << (i ? ", " : "") << '"' << formats[i] << '"';
  o << "]\n";
  o << "ppm_variable = \"" << ppm_variable << "\"\n";
  o << "ppm_resolution = " << ppm_resolution << "\n";
  return o.str();
}

} // namespace treedg

#endif
