#include "stiffchaos/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace stiffchaos::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

double get_number(const std::string& field, const json& v) {
  if (!v.is_number()) fail(field, "expected a number, got " + v.dump());
  return v.get<double>();
}

std::size_t get_count(const std::string& field, const json& v) {
  const double d = get_number(field, v);
  if (!(d >= 0.0) || d != std::floor(d) || d > 1e15) fail(field, "expected a non-negative integer");
  return static_cast<std::size_t>(d);
}

Vec3 get_vec3(const std::string& field, const json& v) {
  if (!v.is_array() || v.size() != 3) fail(field, "expected an array of 3 numbers");
  Vec3 out{};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!v[i].is_number()) fail(field, "expected an array of 3 numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) {
    const double d = v.get<double>();
    if (d == std::floor(d)) return std::to_string(static_cast<long long>(d));
  }
  return v.dump();
}

std::optional<double> opt_number(const json& sec, const std::string& key, const std::string& path) {
  const json& v = sec.at(key);
  if (v.is_null()) return std::nullopt;
  return get_number(path, v);
}

}  // namespace

json default_document() {
  return json{
      {"problem", {{"name", "lorenz84"}, {"params", json::object()}, {"t_start", nullptr},
                   {"t_end", nullptr}}},
      {"solver",
       {{"kind", "rk4"}, {"steps", 600}, {"tol", 1e-3}, {"atol", 1e-10}, {"dt_init", 1e-2},
        {"dt_min", 1e-14}, {"dt_max", 1e300}, {"max_steps", 100000}}},
      {"transform",
       {{"method", "3"}, {"intervals", 0}, {"mu_init", nullptr}, {"coeffs", nullptr},
        {"eps_scale", nullptr}, {"q", nullptr}, {"gamma_source", nullptr}}},
      {"eps", nullptr},
      {"scan", {{"samples", 400}, {"component", 0}, {"from", nullptr}, {"to", nullptr}}},
      {"demo", {{"kappa_g", -1.0}}},
      {"oracle", {{"refinement", 1024}}},
      {"output", {{"dir", "."}}},
  };
}

json parse_document(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": JSON syntax error: " + e.what());
  }
}

json load_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_document(ss.str(), path);
}

void merge_document(json& base, const json& overlay, const std::string& prefix) {
  if (!overlay.is_object()) throw ConfigError("config '" + prefix + "': expected an object");
  // problem.params is open-ended; the problem itself validates its keys.
  const bool free_form = (base.is_object() && base.empty()) || prefix == "problem.params";
  for (const auto& [key, value] : overlay.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!free_form && !base.contains(key)) throw ConfigError("unknown config field '" + path + "'");
    json& slot = base[key];
    if (slot.is_object() && !slot.empty()) {
      merge_document(slot, value, path);
    } else if (slot.is_object()) {
      if (!value.is_object()) fail(path, "expected an object");
      for (const auto& [k, v] : value.items()) slot[k] = v;
    } else {
      slot = value;
    }
  }
}

void set_path(json& doc, const std::string& dotted, const std::string& value) {
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::parse_error&) {
    if (value.find(',') != std::string::npos) {
      parsed = json::array();
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          parsed.push_back(std::stod(item));
        } catch (const std::exception&) {
          fail(dotted, "cannot parse '" + value + "' as a number list");
        }
      }
    } else {
      parsed = value;
    }
  }
  json overlay = parsed;
  std::string rest = dotted;
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while ((pos = rest.find('.')) != std::string::npos) {
    parts.push_back(rest.substr(0, pos));
    rest.erase(0, pos + 1);
  }
  parts.push_back(rest);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) overlay = json{{*it, overlay}};
  merge_document(doc, overlay);
}

std::string to_string(SolverKind k) {
  switch (k) {
    case SolverKind::rk4: return "rk4";
    case SolverKind::rk4_adaptive: return "rk4-adaptive";
    case SolverKind::trapezoid: return "trapezoid";
  }
  return "rk4";
}

Vec3 parse_vec3(const std::string& text, const std::string& field) {
  json doc = json::object();
  doc["v"] = nullptr;
  set_path(doc, "v", text);
  return get_vec3(field, doc["v"]);
}

ExperimentConfig to_config(const json& doc) {
  ExperimentConfig c;
  try {
    const json& p = doc.at("problem");
    if (!p.at("name").is_string()) fail("problem.name", "expected a string");
    c.problem = p.at("name").get<std::string>();
    for (const auto& [k, v] : p.at("params").items()) {
      c.problem_params[k] = get_number("problem.params." + k, v);
    }
    c.t_start = opt_number(p, "t_start", "problem.t_start");
    c.t_end = opt_number(p, "t_end", "problem.t_end");

    const json& s = doc.at("solver");
    const std::string kind = scalar_text(s.at("kind"));
    if (kind == "rk4") {
      c.solver = SolverKind::rk4;
    } else if (kind == "rk4-adaptive") {
      c.solver = SolverKind::rk4_adaptive;
    } else if (kind == "trapezoid") {
      c.solver = SolverKind::trapezoid;
    } else {
      fail("solver.kind", "expected rk4, rk4-adaptive or trapezoid, got '" + kind + "'");
    }
    c.steps = get_count("solver.steps", s.at("steps"));
    if (c.steps == 0) fail("solver.steps", "must be >= 1");
    c.adaptive.tol = get_number("solver.tol", s.at("tol"));
    c.adaptive.atol = get_number("solver.atol", s.at("atol"));
    c.adaptive.dt_init = get_number("solver.dt_init", s.at("dt_init"));
    c.adaptive.dt_min = get_number("solver.dt_min", s.at("dt_min"));
    c.adaptive.dt_max = get_number("solver.dt_max", s.at("dt_max"));
    c.adaptive.max_steps = get_count("solver.max_steps", s.at("max_steps"));
    try {
      c.adaptive.validate();
    } catch (const std::invalid_argument& e) {
      fail("solver", e.what());
    }

    const json& t = doc.at("transform");
    try {
      c.method = parse_method(scalar_text(t.at("method")));
    } catch (const std::invalid_argument& e) {
      fail("transform.method", e.what());
    }
    c.intervals = get_count("transform.intervals", t.at("intervals"));
    if (!t.at("mu_init").is_null()) c.mu_init = get_vec3("transform.mu_init", t.at("mu_init"));
    if (!t.at("coeffs").is_null()) c.coeffs = get_vec3("transform.coeffs", t.at("coeffs"));
    if (!t.at("eps_scale").is_null()) {
      c.eps_scale = get_vec3("transform.eps_scale", t.at("eps_scale"));
      for (double e : *c.eps_scale) {
        if (!(e > 0.0)) fail("transform.eps_scale", "components must be > 0");
      }
    }
    c.q = opt_number(t, "q", "transform.q");
    if (!t.at("gamma_source").is_null()) {
      try {
        c.gamma_source = parse_gamma_source(scalar_text(t.at("gamma_source")));
      } catch (const std::invalid_argument& e) {
        fail("transform.gamma_source", e.what());
      }
    }

    c.eps = opt_number(doc, "eps", "eps");
    if (c.eps && !(*c.eps > 0.0)) fail("eps", "must be > 0");
    const json& sc = doc.at("scan");
    c.samples = get_count("scan.samples", sc.at("samples"));
    if (c.samples < 2) fail("scan.samples", "must be >= 2");
    c.component = get_count("scan.component", sc.at("component"));
    c.window_from = opt_number(sc, "from", "scan.from");
    c.window_to = opt_number(sc, "to", "scan.to");

    c.kappa_g = get_number("demo.kappa_g", doc.at("demo").at("kappa_g"));
    c.refinement = get_count("oracle.refinement", doc.at("oracle").at("refinement"));
    if (c.refinement < 16) fail("oracle.refinement", "must be >= 16");
    if (!doc.at("output").at("dir").is_string()) fail("output.dir", "expected a string");
    c.out_dir = doc.at("output").at("dir").get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

}  // namespace stiffchaos::cli
