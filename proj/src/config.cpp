#include "kgz/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "kgz/errors.hpp"

namespace kgz {

namespace {

using json = nlohmann::json;

std::string join(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

void allow_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(path, "expected an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key())) throw ConfigError(join(path, it.key()), "unknown key");
}

double number(const json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(join(path, key), "must be finite");
  return d;
}

double required_number(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) throw ConfigError(join(path, key), "missing required field");
  return number(obj, path, key, 0.0);
}

long integer(const json& obj, const std::string& path, const char* key, long fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(join(path, key), "expected an integer");
  return v.get<long>();
}

std::string text(const json& obj, const std::string& path, const char* key, std::string fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(join(path, key), "expected a string");
  return v.get<std::string>();
}

bool boolean(const json& obj, const std::string& path, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(join(path, key), "expected true or false");
  return v.get<bool>();
}

// "a.b[2].c" -> "/a/b/2/c"
json::json_pointer to_pointer(const std::string& dotted) {
  std::string p;
  std::string seg;
  auto flush = [&] {
    if (seg.empty()) throw ConfigError(dotted, "malformed override path");
    p += "/" + seg;
    seg.clear();
  };
  for (std::size_t i = 0; i < dotted.size(); ++i) {
    char ch = dotted[i];
    if (ch == '.') {
      if (!seg.empty()) flush();
    } else if (ch == '[') {
      if (!seg.empty()) flush();
    } else if (ch == ']') {
      flush();
    } else {
      seg += ch;
    }
  }
  if (!seg.empty()) flush();
  return json::json_pointer(p);
}

void apply_override(json& doc, const std::string& spec) {
  auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(spec, "override must look like key=value");
  std::string key = spec.substr(0, eq), raw = spec.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::parse_error&) {
    value = raw;
  }
  try {
    doc[to_pointer(key)] = value;
  } catch (const json::exception& e) {
    throw ConfigError(key, std::string("cannot apply override: ") + e.what());
  }
}

std::string locate(const std::string& textdoc, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < textdoc.size(); ++i) {
    if (textdoc[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  std::ostringstream os;
  os << "line " << line << ", column " << col;
  return os.str();
}

}  // namespace

RunConfig parse_config(const std::string& doc_text, const std::vector<std::string>& overrides) {
  json doc;
  try {
    doc = json::parse(doc_text);
  } catch (const json::parse_error& e) {
    std::string where = locate(doc_text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError("", "syntax error at " + where + ": " + e.what());
  }
  for (const auto& o : overrides) apply_override(doc, o);

  allow_keys(doc, "", {"system", "solitons", "grid", "time", "output", "construction", "spectrum",
                       "modulation"});
  RunConfig cfg;

  if (doc.contains("system")) {
    const json& s = doc["system"];
    allow_keys(s, "system", {"alpha", "beta"});
    cfg.system.alpha = number(s, "system", "alpha", 1.0);
    cfg.system.beta = number(s, "system", "beta", 0.0);
  }

  if (doc.contains("solitons")) {
    const json& list = doc["solitons"];
    if (!list.is_array()) throw ConfigError("solitons", "expected an array");
    for (std::size_t i = 0; i < list.size(); ++i) {
      std::string path = "solitons[" + std::to_string(i) + "]";
      const json& s = list[i];
      allow_keys(s, path, {"omega", "c", "x0", "gamma0"});
      SolitonSpec spec{required_number(s, path, "omega"), required_number(s, path, "c"),
                       number(s, path, "x0", 0.0), number(s, path, "gamma0", 0.0)};
      try {
        check_admissible(spec, cfg.system);
      } catch (const ParameterError& e) {
        throw ConfigError(path, e.what());
      }
      for (std::size_t j = 0; j < cfg.solitons.size(); ++j)
        if (cfg.solitons[j].c == spec.c)
          throw ConfigError(join(path, "c"), "duplicates the speed of solitons[" + std::to_string(j) + "]");
      cfg.solitons.push_back(spec);
    }
  }

  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    allow_keys(g, "grid", {"n", "length"});
    long n = integer(g, "grid", "n", static_cast<long>(cfg.grid_n));
    if (n < 8) throw ConfigError("grid.n", "must be at least 8");
    if (n % 2 != 0) throw ConfigError("grid.n", "must be even");
    cfg.grid_n = static_cast<std::size_t>(n);
    cfg.grid_length = number(g, "grid", "length", cfg.grid_length);
    if (!(cfg.grid_length > 0.0)) throw ConfigError("grid.length", "must be positive");
  }

  if (doc.contains("time")) {
    const json& t = doc["time"];
    allow_keys(t, "time", {"t0", "t1", "dt", "scheme", "dealias", "initial"});
    cfg.t0 = number(t, "time", "t0", cfg.t0);
    cfg.t1 = number(t, "time", "t1", cfg.t0);
    cfg.dt = number(t, "time", "dt", cfg.dt);
    if (cfg.dt == 0.0) throw ConfigError("time.dt", "must be nonzero");
    if (cfg.t1 != cfg.t0 && (cfg.t1 > cfg.t0) != (cfg.dt > 0.0))
      throw ConfigError("time.dt", "sign does not point from t0 towards t1");
    std::string scheme = text(t, "time", "scheme", "lawson");
    try {
      cfg.scheme = parse_scheme(scheme);
    } catch (const ParameterError& e) {
      throw ConfigError("time.scheme", e.what());
    }
    cfg.dealias = boolean(t, "time", "dealias", cfg.dealias);
    cfg.initial = text(t, "time", "initial", "");
  }

  if (doc.contains("output")) {
    const json& o = doc["output"];
    allow_keys(o, "output", {"dir", "stride"});
    cfg.out_dir = text(o, "output", "dir", "");
    long stride = integer(o, "output", "stride", static_cast<long>(cfg.stride));
    if (stride < 1) throw ConfigError("output.stride", "must be at least 1");
    cfg.stride = static_cast<std::size_t>(stride);
  }

  if (doc.contains("construction")) {
    const json& c = doc["construction"];
    allow_keys(c, "construction", {"t0", "tn_list"});
    cfg.has_construction = true;
    cfg.construction_t0 = number(c, "construction", "t0", cfg.construction_t0);
    if (!(cfg.construction_t0 > 0.0)) throw ConfigError("construction.t0", "must be positive");
    if (c.contains("tn_list")) {
      const json& l = c["tn_list"];
      if (!l.is_array() || l.empty()) throw ConfigError("construction.tn_list", "expected a non-empty array");
      for (std::size_t i = 0; i < l.size(); ++i) {
        std::string path = "construction.tn_list[" + std::to_string(i) + "]";
        if (!l[i].is_number()) throw ConfigError(path, "expected a number");
        double v = l[i].get<double>();
        if (!(v > cfg.construction_t0)) throw ConfigError(path, "must exceed construction.t0");
        if (!cfg.tn_list.empty() && !(v > cfg.tn_list.back()))
          throw ConfigError(path, "tn_list must be strictly increasing");
        cfg.tn_list.push_back(v);
      }
    }
  }

  if (doc.contains("spectrum")) {
    const json& s = doc["spectrum"];
    allow_keys(s, "spectrum", {"count", "operator", "soliton", "method"});
    long count = integer(s, "spectrum", "count", cfg.spectrum_count);
    if (count < 1 || count > 10) throw ConfigError("spectrum.count", "must be between 1 and 10");
    cfg.spectrum_count = static_cast<int>(count);
    cfg.spectrum_operator = text(s, "spectrum", "operator", cfg.spectrum_operator);
    if (cfg.spectrum_operator != "L1" && cfg.spectrum_operator != "L2")
      throw ConfigError("spectrum.operator", "expected \"L1\" or \"L2\"");
    long idx = integer(s, "spectrum", "soliton", 0);
    if (idx < 0) throw ConfigError("spectrum.soliton", "must be non-negative");
    cfg.spectrum_soliton = static_cast<std::size_t>(idx);
    cfg.spectrum_method = text(s, "spectrum", "method", cfg.spectrum_method);
    if (cfg.spectrum_method != "auto" && cfg.spectrum_method != "dense" &&
        cfg.spectrum_method != "iterative")
      throw ConfigError("spectrum.method", "expected \"auto\", \"dense\" or \"iterative\"");
  }

  if (doc.contains("modulation")) {
    const json& m = doc["modulation"];
    allow_keys(m, "modulation", {"tol", "max_iter"});
    cfg.modulation_tol = number(m, "modulation", "tol", cfg.modulation_tol);
    if (!(cfg.modulation_tol > 0.0)) throw ConfigError("modulation.tol", "must be positive");
    long it = integer(m, "modulation", "max_iter", cfg.modulation_max_iter);
    if (it < 1) throw ConfigError("modulation.max_iter", "must be at least 1");
    cfg.modulation_max_iter = static_cast<int>(it);
  }
  return cfg;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream f(path);
  if (!f) throw ConfigError("", "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), overrides);
}

}  // namespace kgz
