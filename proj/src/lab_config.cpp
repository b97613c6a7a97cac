#include "frontlab/lab_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "frontlab/errors.hpp"
#include "frontlab/nonlinearity.hpp"

namespace frontlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Type { number, text, list };

struct KeySpec {
  std::string key;
  Type type = Type::number;
  double lo = -kInf, hi = kInf;  // open bounds for numbers and list entries
  bool lo_closed = false;
};

KeySpec num(std::string k, double lo = -kInf, double hi = kInf, bool lo_closed = false) {
  return {std::move(k), Type::number, lo, hi, lo_closed};
}
KeySpec nonneg(std::string k) { return num(std::move(k), 0.0, kInf, true); }
KeySpec pos(std::string k) { return num(std::move(k), 0.0); }
KeySpec unit(std::string k) { return num(std::move(k), 0.0, 1.0); }
KeySpec list(std::string k, double lo = -kInf, double hi = kInf) { return {std::move(k), Type::list, lo, hi, false}; }
KeySpec text(std::string k) { return {std::move(k), Type::text}; }

const std::vector<KeySpec>& common_keys() {
  static const std::vector<KeySpec> keys = {pos("h"), nonneg("dt"), num("t_end"), nonneg("snapshot_every"),
                                            nonneg("write_snapshots")};
  return keys;
}

const std::map<std::string, std::vector<KeySpec>>& registry() {
  static const std::map<std::string, std::vector<KeySpec>> r = {
      {"exp_profile", {pos("tol")}},
      {"exp_front_speed", {num("t_begin", 0.0, kInf, true), pos("half_width")}},
      {"exp_fife_mcleod", {unit("theta_step"), num("x_min"), num("x_max"), nonneg("t_monotone"), pos("tol")}},
      {"exp_spreading", {pos("R"), unit("level"), pos("eps"), pos("half_width")}},
      {"exp_spreading_upper", {pos("R"), unit("level"), pos("eps"), pos("half_width")}},
      {"exp_mean_speed",
       {num("alpha"), pos("n"), pos("relax_time"), pos("clip_L"), text("kind")}},
      {"exp_nonstandard",
       {num("alpha"), pos("n"), pos("half_width"), pos("height"), pos("recenter_every"), pos("cone_n"),
        pos("cone_h"), pos("relax_time"), unit("eps"), pos("tilde_n"), pos("sigma"), pos("delta"),
        num("T_super", -kInf, 0.0), pos("sandwich_n"), pos("sandwich_width"), nonneg("doubling")}},
      {"exp_supersolution",
       {num("alpha"), list("sigma", 0.0), list("delta", 0.0), list("T", -kInf, 0.0), pos("cone_n"), pos("cone_h"),
        pos("relax_time"), num("t_start"), list("T_sweep", -kInf, 0.0), pos("sweep_delta")}},
      {"exp_terrace", {unit("theta_step"), list("levels", 0.0, 1.0), num("x_min"), num("x_max"), pos("t_fit")}},
      {"exp_planar_liouville", {pos("amplitude"), pos("wavelength"), pos("half_width")}},
      {"exp_metastable", {pos("plateau"), pos("half_width")}},
  };
  return r;
}

// exp_nonstandard and friends build on the rotated V of half-angle alpha
const std::set<std::string> kAlphaExperiments = {"exp_mean_speed", "exp_nonstandard", "exp_supersolution"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

// '#' outside double quotes starts a comment
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    if (line[k] == '"') quoted = !quoted;
    if (line[k] == '#' && !quoted) return line.substr(0, k);
  }
  return line;
}

ConfigValue parse_value(const std::string& raw, int line) {
  const std::string v = trim(raw);
  if (v.empty()) throw ConfigError("missing value", line);
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') throw ConfigError("unterminated string", line);
    const std::string inner = v.substr(1, v.size() - 2);
    if (inner.find('"') != std::string::npos) throw ConfigError("stray quote in string", line);
    return inner;
  }
  if (v.front() == '[') {
    if (v.back() != ']') throw ConfigError("unterminated list", line);
    std::vector<double> out;
    const std::string inner = trim(v.substr(1, v.size() - 2));
    if (inner.empty()) return out;
    std::stringstream ss(inner);
    std::string item;
    while (std::getline(ss, item, ',')) {
      double x = 0.0;
      if (!parse_number(item, x)) throw ConfigError("list entries must be numbers, got '" + trim(item) + "'", line);
      out.push_back(x);
    }
    return out;
  }
  double x = 0.0;
  if (parse_number(v, x)) return x;
  // bare words such as cubic(0.3)
  if (v.find_first_of("\"=[]") != std::string::npos) throw ConfigError("cannot read value '" + v + "'", line);
  return v;
}

int line_of(const std::map<std::string, int>& lines, const std::string& key) {
  const auto it = lines.find(key);
  return it == lines.end() ? 0 : it->second;
}

// shortest form that reads back exactly
std::string format_number(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string format_value(const ConfigValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return format_number(*d);
  if (const auto* s = std::get_if<std::string>(&v)) return "\"" + *s + "\"";
  const auto& l = std::get<std::vector<double>>(v);
  std::string out = "[";
  for (std::size_t k = 0; k < l.size(); ++k) out += (k ? ", " : "") + format_number(l[k]);
  return out + "]";
}

void check_range(const KeySpec& spec, double x, int line) {
  const bool lo_ok = spec.lo_closed ? x >= spec.lo : x > spec.lo;
  if (!std::isfinite(x) || !lo_ok || !(x < spec.hi)) {
    std::ostringstream os;
    os << spec.key << " = " << format_number(x) << " out of range: need " << format_number(spec.lo)
       << (spec.lo_closed ? " <= " : " < ") << spec.key;
    if (std::isfinite(spec.hi)) os << " < " << format_number(spec.hi);
    throw ConfigError(os.str(), line);
  }
}

}  // namespace

double ExperimentConfig::number(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (const auto* d = std::get_if<double>(&it->second)) return *d;
  throw ConfigError(key + " must be a number");
}

double ExperimentConfig::number(const std::string& key) const {
  if (!has(key)) throw ConfigError("missing required key " + key);
  return number(key, 0.0);
}

std::string ExperimentConfig::text(const std::string& key, const std::string& fallback) const {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
  throw ConfigError(key + " must be a string");
}

std::vector<double> ExperimentConfig::list(const std::string& key, const std::vector<double>& fallback) const {
  const auto it = params.find(key);
  if (it == params.end()) return fallback;
  if (const auto* l = std::get_if<std::vector<double>>(&it->second)) return *l;
  if (const auto* d = std::get_if<double>(&it->second)) return {*d};
  throw ConfigError(key + " must be a list of numbers");
}

std::vector<std::string> experiment_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : registry()) out.push_back(k);
  return out;
}

std::vector<std::string> experiment_keys(const std::string& name) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw ConfigError("unknown experiment '" + name + "'");
  std::vector<std::string> out;
  for (const auto& s : common_keys()) out.push_back(s.key);
  for (const auto& s : it->second) out.push_back(s.key);
  return out;
}

void validate_config(const ExperimentConfig& cfg, const std::map<std::string, int>& lines) {
  if (cfg.name.empty()) throw ConfigError("missing required key name");
  const auto it = registry().find(cfg.name);
  if (it == registry().end()) throw ConfigError("unknown experiment '" + cfg.name + "'", line_of(lines, "name"));
  if (cfg.f.empty()) throw ConfigError("missing required key f");
  try {
    Nonlinearity::parse(cfg.f);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bad f: ") + e.what(), line_of(lines, "f"));
  }
  if (cfg.profile != "smoke" && cfg.profile != "full")
    throw ConfigError("profile must be \"smoke\" or \"full\"", line_of(lines, "profile"));

  std::map<std::string, KeySpec> specs;
  for (const auto& s : common_keys()) specs[s.key] = s;
  for (const auto& s : it->second) specs[s.key] = s;
  for (const auto& [key, value] : cfg.params) {
    const int line = line_of(lines, key);
    const auto sp = specs.find(key);
    if (sp == specs.end()) throw ConfigError("unknown key '" + key + "' for " + cfg.name, line);
    const KeySpec& spec = sp->second;
    switch (spec.type) {
      case Type::number:
        if (!std::holds_alternative<double>(value)) throw ConfigError(key + " must be a number", line);
        check_range(spec, std::get<double>(value), line);
        break;
      case Type::text:
        if (!std::holds_alternative<std::string>(value)) throw ConfigError(key + " must be a string", line);
        break;
      case Type::list: {
        if (const auto* d = std::get_if<double>(&value)) {
          check_range(spec, *d, line);
          break;
        }
        const auto* l = std::get_if<std::vector<double>>(&value);
        if (!l) throw ConfigError(key + " must be a list of numbers", line);
        for (double x : *l) check_range(spec, x, line);
        break;
      }
    }
  }
  if (kAlphaExperiments.count(cfg.name) && cfg.has("alpha")) {
    const double a = cfg.number("alpha", 0.0);
    if (!(a > std::numbers::pi / 4 && a < std::numbers::pi / 2)) {
      std::ostringstream os;
      os << "alpha = " << format_number(a) << " violates the bound pi/4 < alpha < pi/2 (0.785398 < alpha < 1.570796)";
      throw ConfigError(os.str(), line_of(lines, "alpha"));
    }
  }
  if (cfg.name == "exp_terrace" && cfg.has("levels") && cfg.list("levels", {}).size() != 2)
    throw ConfigError("levels takes exactly two values", line_of(lines, "levels"));
  if (cfg.name == "exp_supersolution" && cfg.has("T") && cfg.has("t_start")) {
    for (double T : cfg.list("T", {}))
      if (T < cfg.number("t_start", 0.0)) throw ConfigError("every T must be >= t_start", line_of(lines, "T"));
  }
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::map<std::string, int> lines;
  std::string table;
  int table_line = 0;
  bool seen_name = false;
  std::istringstream in(text);
  std::string raw;
  int ln = 0;
  while (std::getline(in, raw)) {
    ++ln;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed table header", ln);
      if (!table.empty()) throw ConfigError("only one table is allowed", ln);
      table = trim(line.substr(1, line.size() - 2));
      if (table.empty()) throw ConfigError("empty table name", ln);
      table_line = ln;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key = value", ln);
    const std::string key = trim(line.substr(0, eq));
    if (key.empty() || key.find_first_of(" \t\"[]") != std::string::npos)
      throw ConfigError("bad key '" + key + "'", ln);
    const ConfigValue value = parse_value(line.substr(eq + 1), ln);
    if (lines.count(key)) throw ConfigError("duplicate key " + key, ln);
    lines[key] = ln;
    if (!table.empty()) {
      cfg.params[key] = value;
      continue;
    }
    auto as_text = [&](const char* what) {
      if (const auto* s = std::get_if<std::string>(&value)) return *s;
      throw ConfigError(std::string(what) + " must be a string", ln);
    };
    if (key == "name") {
      cfg.name = as_text("name");
      seen_name = true;
    } else if (key == "f") {
      cfg.f = as_text("f");
    } else if (key == "seed") {
      const auto* d = std::get_if<double>(&value);
      if (!d || *d < 0 || *d != std::floor(*d) || *d > 9.007199254740992e15)
        throw ConfigError("seed must be a non-negative integer", ln);
      cfg.seed = static_cast<std::uint64_t>(*d);
    } else if (key == "out_dir") {
      cfg.out_dir = as_text("out_dir");
    } else if (key == "profile") {
      cfg.profile = as_text("profile");
    } else {
      throw ConfigError("unknown top-level key '" + key + "'", ln);
    }
  }
  if (!table.empty()) {
    if (!seen_name) cfg.name = table;
    if (table != cfg.name)
      throw ConfigError("table [" + table + "] does not match name \"" + cfg.name + "\"", table_line);
  }
  validate_config(cfg, lines);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "name = \"" << cfg.name << "\"\n";
  os << "f = \"" << cfg.f << "\"\n";
  os << "seed = " << cfg.seed << "\n";
  os << "out_dir = \"" << cfg.out_dir << "\"\n";
  os << "profile = \"" << cfg.profile << "\"\n";
  os << "\n[" << cfg.name << "]\n";
  for (const auto& [key, value] : cfg.params) os << key << " = " << format_value(value) << "\n";
  return os.str();
}

}  // namespace frontlab
