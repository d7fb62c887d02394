#include "stiffchaos/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

#include <CLI11.hpp>

#include "stiffchaos/cli/csv.hpp"
#include "stiffchaos/errors.hpp"
#include "stiffchaos/problems.hpp"
#include "stiffchaos/transform.hpp"

namespace stiffchaos::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

BenchmarkSpec build_spec(const ExperimentConfig& c) {
  BenchmarkSpec spec;
  try {
    spec = make_benchmark(c.problem, c.problem_params);
    if (c.t_start) spec.problem.t_start = *c.t_start;
    if (c.t_end) spec.problem.t_end = *c.t_end;
    spec.problem.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::out_of_range& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

std::string prepare_dir(const ExperimentConfig& c) {
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + c.out_dir + "': " + ec.message());
  return c.out_dir;
}

std::string path_in(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

json state_json(const State& u) { return json(std::vector<double>(u.begin(), u.end())); }

std::vector<std::string> state_header(std::size_t dim) {
  std::vector<std::string> h{"t"};
  for (std::size_t i = 0; i < dim; ++i) h.push_back("u" + std::to_string(i + 1));
  return h;
}

std::vector<std::vector<double>> trajectory_rows(const Trajectory& tr) {
  std::vector<std::vector<double>> rows;
  rows.reserve(tr.size());
  for (std::size_t k = 0; k < tr.size(); ++k) {
    std::vector<double> row{tr.times[k]};
    row.insert(row.end(), tr.states[k].begin(), tr.states[k].end());
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_manifest(const std::string& dir, json& manifest, Clock::time_point start) {
  manifest["wall_seconds"] = seconds_since(start);
  std::ofstream out(path_in(dir, "manifest.json"));
  if (!out) throw std::runtime_error("cannot write manifest in '" + dir + "'");
  out << manifest.dump(2) << '\n';
}

json stagnation_json(const Trajectory& tr) {
  if (!tr.stagnation) return nullptr;
  return json{{"t_reached", tr.stagnation->t_reached},
              {"steps", tr.stagnation->steps},
              {"reason", tr.stagnation->reason == StagnationReason::dt_min ? "dt_min" : "max_steps"}};
}

Trajectory run_solver(const ExperimentConfig& c, const OdeProblem& problem) {
  switch (c.solver) {
    case SolverKind::rk4: return solve_rk4_fixed(problem, c.steps);
    case SolverKind::rk4_adaptive: return solve_rk4_adaptive(problem, c.adaptive);
    case SolverKind::trapezoid: return solve_trapezoid_adaptive(problem, c.adaptive);
  }
  throw ConfigError("unknown solver");
}

Trajectory window_of(const Trajectory& tr, double from, double to) {
  Trajectory w;
  w.solver_id = tr.solver_id;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    if (tr.times[k] >= from && tr.times[k] <= to) {
      w.times.push_back(tr.times[k]);
      w.states.push_back(tr.states[k]);
    }
  }
  return w;
}

// Times where Q falls through 1 between consecutive samples, linearly
// interpolated.
std::vector<double> q_crossings(const StiffnessReport& rep) {
  std::vector<double> out;
  for (std::size_t k = 1; k < rep.samples.size(); ++k) {
    const auto& a = rep.samples[k - 1];
    const auto& b = rep.samples[k];
    if ((a.Q > 1.0) != (b.Q > 1.0)) {
      const double f = (1.0 - a.Q) / (b.Q - a.Q);
      out.push_back(a.t + f * (b.t - a.t));
    }
  }
  return out;
}

struct OracleKey {
  std::string problem;
  std::map<std::string, double> params;
  double t_start;
  double t_end;
  std::size_t N;
  std::size_t refinement;
  friend bool operator==(const OracleKey&, const OracleKey&) = default;
};

OracleKey oracle_key(const ExperimentConfig& c, const BenchmarkSpec& spec) {
  return {spec.problem.name, spec.problem.params, spec.problem.t_start, spec.problem.t_end,
          c.steps, c.refinement};
}

void require_lorenz(const BenchmarkSpec& spec) {
  if (spec.problem.name != "lorenz84") {
    throw ConfigError("transform requires problem lorenz84, got '" + spec.problem.name + "'");
  }
}

TransformParams transform_params(const ExperimentConfig& c) {
  TransformParams p = TransformParams::defaults(c.method);
  if (c.mu_init) {
    p.mu_init = *c.mu_init;
    if (c.method == Method::fixed_mu) p.fixed_mu = *c.mu_init;
  }
  if (c.coeffs) p.coeffs = *c.coeffs;
  if (c.eps_scale) p.eps_scale = *c.eps_scale;
  if (c.q) p.q = *c.q;
  if (c.gamma_source) p.gamma_source = *c.gamma_source;
  return p;
}

IntervalPlan transform_plan(const ExperimentConfig& c, const BenchmarkSpec& spec) {
  IntervalPlan plan =
      IntervalPlan::for_method(c.method, c.steps, spec.problem.t_start, spec.problem.t_end);
  if (c.intervals != 0) plan.K = c.intervals;
  try {
    plan.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return plan;
}

json vec3_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

json params_json(const TransformParams& p) {
  return json{{"eps_scale", vec3_json(p.eps_scale)}, {"q", p.q},
              {"coeffs", vec3_json(p.coeffs)},       {"mu_init", vec3_json(p.mu_init)},
              {"fixed_mu", vec3_json(p.fixed_mu)},   {"gamma_source", to_string(p.gamma_source)}};
}

}  // namespace

json cmd_solve(const ExperimentConfig& c, const json& echo) {
  const auto start = Clock::now();
  const std::string dir = prepare_dir(c);
  const BenchmarkSpec spec = build_spec(c);
  const Trajectory tr = run_solver(c, spec.problem);

  write_csv(path_in(dir, "trajectory.csv"), state_header(spec.problem.dim), trajectory_rows(tr));
  json m{{"command", "solve"},
         {"config", echo},
         {"solver", to_string(tr.solver_id)},
         {"steps_taken", tr.steps_taken},
         {"steps_rejected", tr.steps_rejected},
         {"samples", tr.size()},
         {"t_final", tr.times.back()},
         {"final_state", state_json(tr.back())},
         {"stagnated", tr.stagnation.has_value()},
         {"stagnation", stagnation_json(tr)},
         {"outputs", {"trajectory.csv"}}};
  write_manifest(dir, m, start);
  return m;
}

json cmd_diagnose(const ExperimentConfig& c, const json& echo) {
  const auto start = Clock::now();
  const std::string dir = prepare_dir(c);
  const BenchmarkSpec spec = build_spec(c);
  const OdeProblem& p = spec.problem;
  if (c.component >= p.dim) throw ConfigError("scan.component out of range for " + p.name);
  const double eps = c.eps.value_or(spec.default_eps);
  const double from = c.window_from.value_or(p.t_start);
  const double to = c.window_to.value_or(p.t_end);
  if (!(to > from)) throw ConfigError("scan window must satisfy from < to");

  Trajectory tr;
  std::string source;
  if (spec.exact) {
    source = "exact";
    for (std::size_t k = 0; k <= c.steps; ++k) {
      const double t = k == c.steps ? to
                                    : from + (to - from) * static_cast<double>(k) /
                                                 static_cast<double>(c.steps);
      tr.times.push_back(t);
      tr.states.push_back((*spec.exact)(t));
    }
  } else if (p.name == "robertson") {
    source = "trapezoid_adaptive";
    AdaptiveConfig ac = c.adaptive;
    tr = solve_trapezoid_adaptive(p, ac);
  } else {
    source = "reference_rk4";
    tr = reference_solution(p, c.steps, c.refinement);
  }
  const Trajectory win = window_of(tr, from, to);
  const StiffnessReport rep =
      stiffness_report(win, p, spec.variational_jacobian, eps, c.component);
  const LleTrace lle = lle_scan(spec, win, c.samples);

  std::vector<std::vector<double>> srows;
  for (const auto& s : rep.samples) srows.push_back({s.t, s.kappa, s.dt_max, s.dt_stiff, s.Q, s.R});
  write_csv(path_in(dir, "stiffness.csv"), {"t", "kappa", "dt_max", "dt_stiff", "Q", "R"}, srows);

  std::vector<std::string> lhead{"t"};
  for (std::size_t i = 0; i < p.dim; ++i) {
    lhead.push_back("re_g" + std::to_string(i + 1));
    lhead.push_back("im_g" + std::to_string(i + 1));
  }
  lhead.emplace_back("gamma_max");
  lhead.emplace_back("gamma_min");
  std::vector<std::vector<double>> lrows;
  for (std::size_t k = 0; k < lle.size(); ++k) {
    std::vector<double> row{lle.samples[k].t};
    for (const auto& v : lle.samples[k].values) {
      row.push_back(v.real());
      row.push_back(v.imag());
    }
    row.push_back(lle.gamma_max[k]);
    row.push_back(lle.gamma_min[k]);
    lrows.push_back(std::move(row));
  }
  write_csv(path_in(dir, "lle.csv"), lhead, lrows);

  double qmin = std::numeric_limits<double>::infinity();
  double qmax = -std::numeric_limits<double>::infinity();
  for (const auto& s : rep.samples) {
    qmin = std::min(qmin, s.Q);
    qmax = std::max(qmax, s.Q);
  }
  const auto crossings = q_crossings(rep);
  json m{{"command", "diagnose"},
         {"config", echo},
         {"problem", p.name},
         {"eps", eps},
         {"trajectory_source", source},
         {"window", {from, to}},
         {"stiffness_samples", rep.samples.size()},
         {"lle_samples", lle.size()},
         {"q_min", qmin},
         {"q_max", qmax},
         {"q_crossings", crossings},
         {"chaotic_fraction", lle.chaotic_fraction()},
         {"gamma_max_max", *std::max_element(lle.gamma_max.begin(), lle.gamma_max.end())},
         {"gamma_min_min", *std::min_element(lle.gamma_min.begin(), lle.gamma_min.end())},
         {"outputs", {"stiffness.csv", "lle.csv"}}};
  if (source == "reference_rk4") m["oracle_refinement"] = c.refinement;
  write_manifest(dir, m, start);
  return m;
}

json cmd_transform(const ExperimentConfig& c, const json& echo) {
  const auto start = Clock::now();
  const std::string dir = prepare_dir(c);
  const BenchmarkSpec spec = build_spec(c);
  require_lorenz(spec);
  const IntervalPlan plan = transform_plan(c, spec);
  const TransformParams params = transform_params(c);
  const Trajectory ref = reference_solution(spec.problem, c.steps, c.refinement);

  const TransformRun run = run_transformed(spec, plan, c.method, params, ref);
  const IntervalPlan base_plan{plan.N, 1, plan.t_start, plan.t_end};
  const TransformRun base =
      run_transformed(spec, base_plan, Method::none, TransformParams::defaults(Method::none), ref);
  const double eps_achieved = run.max_error(0);
  const StepExtensionReport ext = step_extension_report(spec, run, ref, eps_achieved);

  write_csv(path_in(dir, "solution.csv"), {"t", "x", "y", "z"}, trajectory_rows(run.solution));
  std::vector<std::vector<double>> erows;
  for (std::size_t k = 0; k < run.solution.size(); ++k) {
    const auto& e = run.errors_vs_reference[k];
    erows.push_back({run.solution.times[k], e[0], e[1], e[2]});
  }
  write_csv(path_in(dir, "errors.csv"), {"t", "err_x", "err_y", "err_z"}, erows);
  std::vector<std::vector<double>> mrows;
  for (std::size_t k = 0; k < run.mu_history.size(); ++k) {
    const auto& mu = run.mu_history[k];
    const double t0 = plan.t_start + static_cast<double>(k * plan.steps_per_interval()) * plan.dt();
    mrows.push_back({static_cast<double>(k), t0, mu[0], mu[1], mu[2], run.gamma_max_history[k]});
  }
  write_csv(path_in(dir, "mu.csv"), {"interval", "t_start", "mu1", "mu2", "mu3", "gamma_max"},
            mrows);
  std::vector<std::vector<double>> xrows;
  for (const auto& pt : ext.points) xrows.push_back({pt.t, pt.dt_max, ext.delta});
  write_csv(path_in(dir, "step_extension.csv"), {"t", "dt_max", "delta"}, xrows);

  const double ratio = base.max_error(0) / run.max_error(0);
  json m{{"command", "transform"},
         {"config", echo},
         {"method", to_string(c.method)},
         {"N", plan.N},
         {"K", plan.K},
         {"steps_per_interval", plan.steps_per_interval()},
         {"params", params_json(params)},
         {"oracle_refinement", c.refinement},
         {"max_error_x", run.max_error(0)},
         {"max_error_y", run.max_error(1)},
         {"max_error_z", run.max_error(2)},
         {"mean_error_x", run.mean_error(0)},
         {"baseline_max_error_x", base.max_error(0)},
         {"improvement_ratio", ratio},
         {"step_extension",
          {{"eps", ext.eps},
           {"delta", ext.delta},
           {"min_dt_max", ext.min_dt_max},
           {"min_ratio", ext.min_ratio()}}},
         {"outputs", {"solution.csv", "errors.csv", "mu.csv", "step_extension.csv"}}};
  write_manifest(dir, m, start);
  return m;
}

json cmd_demo_stiff_transform(const ExperimentConfig& c, const json& echo) {
  const auto start = Clock::now();
  const std::string dir = prepare_dir(c);
  for (const auto& [k, v] : c.problem_params) {
    if (k != "a") throw ConfigError("demo-stiff-transform accepts only parameter 'a', got '" + k + "'");
  }
  const auto it = c.problem_params.find("a");
  const double a = it == c.problem_params.end() ? 300.0 : it->second;
  const double eps = c.eps.value_or(1e-3);
  StiffTransformDemo d;
  try {
    d = stiff_transform_demo(a, c.kappa_g, eps);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  write_csv(path_in(dir, "demo.csv"),
            {"a", "kappa_g", "eps", "growth_rate", "dt_stiff_u", "dt_max_z", "ratio"},
            {{d.a, d.kappa_g, d.eps, d.growth_rate, d.dt_stiff_u, d.dt_max_z, d.ratio()}});
  json m{{"command", "demo-stiff-transform"},
         {"config", echo},
         {"a", d.a},
         {"kappa_g", d.kappa_g},
         {"eps", d.eps},
         {"growth_rate", d.growth_rate},
         {"dt_stiff_u", d.dt_stiff_u},
         {"dt_max_z", d.dt_max_z},
         {"ratio", d.ratio()},
         {"same_order", d.ratio() >= 0.1 && d.ratio() <= 10.0},
         {"outputs", {"demo.csv"}}};
  write_manifest(dir, m, start);
  return m;
}

json cmd_compare(const std::vector<ExperimentConfig>& runs, const std::vector<json>& echoes) {
  const auto start = Clock::now();
  if (runs.empty()) throw ConfigError("compare needs at least one run");
  const std::string dir = prepare_dir(runs.front());

  std::vector<BenchmarkSpec> specs;
  for (const auto& c : runs) {
    specs.push_back(build_spec(c));
    require_lorenz(specs.back());
  }
  const OracleKey key = oracle_key(runs.front(), specs.front());
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (!(oracle_key(runs[i], specs[i]) == key)) {
      throw MismatchedBaseline("compare: mismatched baseline, run " + std::to_string(i + 1) +
                               " differs from run 1 in problem, time grid or oracle");
    }
  }
  const Trajectory ref = reference_solution(specs.front().problem, key.N, key.refinement);

  std::vector<TransformRun> results;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    results.push_back(run_transformed(specs[i], transform_plan(runs[i], specs[i]), runs[i].method,
                                      transform_params(runs[i]), ref));
  }
  std::size_t baseline = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (runs[i].method == Method::none) {
      baseline = i;
      break;
    }
  }
  const double base_err = results[baseline].max_error(0);

  std::vector<std::vector<double>> rows;
  json table = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const double method_code = r.method == Method::none ? 0.0 : std::stod(std::string(to_string(r.method)));
    const double ratio = base_err / r.max_error(0);
    rows.push_back({static_cast<double>(i), method_code, static_cast<double>(r.plan.N),
                    static_cast<double>(r.plan.K), r.max_error(0), r.mean_error(0), ratio});
    table.push_back({{"run", i},
                     {"method", to_string(r.method)},
                     {"N", r.plan.N},
                     {"K", r.plan.K},
                     {"max_error_x", r.max_error(0)},
                     {"mean_error_x", r.mean_error(0)},
                     {"improvement_ratio", ratio}});
  }
  write_csv(path_in(dir, "compare.csv"),
            {"run", "method", "N", "K", "max_error_x", "mean_error_x", "improvement_ratio"}, rows);

  std::vector<std::size_t> order(results.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return results[a].max_error(0) < results[b].max_error(0);
  });
  json ranking = json::array();
  for (std::size_t i : order) ranking.push_back(to_string(results[i].method));

  json m{{"command", "compare"},
         {"configs", echoes},
         {"oracle_refinement", key.refinement},
         {"baseline_run", baseline},
         {"rows", table},
         {"ranking_by_max_error", ranking},
         {"outputs", {"compare.csv"}}};
  write_manifest(dir, m, start);
  return m;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stiffness and chaos diagnostics for ODEs, with exponentially transformed "
               "integration of the Lorenz 1984 model"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  std::vector<std::pair<std::string, std::string>> overrides;
  std::vector<std::string> config_paths;
  std::string methods_list;

  const auto add_common = [&](CLI::App* sub) {
    const auto flag = [&](const std::string& name, const std::string& path, const std::string& help) {
      sub->add_option_function<std::string>(
          name, [&overrides, path](const std::string& v) { overrides.emplace_back(path, v); }, help);
    };
    flag("--problem", "problem.name", "stiff-linear | flame | robertson | lorenz84");
    flag("--solver", "solver.kind", "rk4 | rk4-adaptive | trapezoid");
    flag("--steps", "solver.steps", "Fixed step count N");
    flag("--intervals", "transform.intervals", "Interval count K (must divide N)");
    flag("--method", "transform.method", "none | 1 | 2 | 3 | 4");
    flag("--tol", "solver.tol", "Adaptive tolerance");
    flag("--eps", "eps", "Diagnostic accuracy epsilon");
    flag("--tf", "problem.t_end", "End time");
    flag("--t0", "problem.t_start", "Start time");
    flag("--dt-init", "solver.dt_init", "Initial adaptive step");
    flag("--max-steps", "solver.max_steps", "Adaptive step budget");
    flag("--out", "output.dir", "Output directory");
    flag("--samples", "scan.samples", "Eigenvalue scan sample count");
    flag("--q", "transform.q", "Method 2 gain");
    flag("--mu-init", "transform.mu_init", "m1,m2,m3");
    flag("--coeffs", "transform.coeffs", "c1,c2,c3 (Methods 3 and 4)");
    flag("--eps-scale", "transform.eps_scale", "e1,e2,e3");
    flag("--gamma-source", "transform.gamma_source", "untransformed | jstar");
    flag("--component", "scan.component", "State component for curvature");
    flag("--from", "scan.from", "Diagnostic window start");
    flag("--to", "scan.to", "Diagnostic window end");
    flag("--refinement", "oracle.refinement", "Oracle step refinement factor");
    flag("--kappa-g", "demo.kappa_g", "Transform rate kappa_g (< 0)");
    sub->add_option_function<std::vector<std::string>>(
        "--param",
        [&overrides](const std::vector<std::string>& vs) {
          for (const auto& kv : vs) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError("--param expects key=value, got '" + kv + "'");
            overrides.emplace_back("problem.params." + kv.substr(0, eq), kv.substr(eq + 1));
          }
        },
        "Problem parameter override key=value");
    sub->add_option_function<std::vector<std::string>>(
        "--set",
        [&overrides](const std::vector<std::string>& vs) {
          for (const auto& kv : vs) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects path=value, got '" + kv + "'");
            overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
          }
        },
        "Generic dotted-path override path=value");
    sub->add_option("--config", config_paths, "JSON config file");
  };

  CLI::App* solve = app.add_subcommand("solve", "Integrate a benchmark problem");
  CLI::App* diagnose = app.add_subcommand("diagnose", "Stiffness report and eigenvalue scan");
  CLI::App* transform = app.add_subcommand("transform", "Transformed Lorenz 1984 integration");
  CLI::App* compare = app.add_subcommand("compare", "Compare transformation methods");
  CLI::App* demo =
      app.add_subcommand("demo-stiff-transform", "Linear transform of the stiff linear problem");
  for (CLI::App* sub : {solve, diagnose, transform, compare, demo}) add_common(sub);
  compare->add_option("--methods", methods_list, "Comma-separated methods, e.g. none,1,2,3,4");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }

  try {
    const auto build = [&](const std::string* config_path,
                           const std::optional<std::string>& method) -> std::pair<ExperimentConfig, json> {
      json doc = default_document();
      if (config_path) merge_document(doc, load_document(*config_path));
      if (method) set_path(doc, "transform.method", *method);
      for (const auto& [path, value] : overrides) {
        if (method && path == "transform.method") continue;
        set_path(doc, path, value);
      }
      return {to_config(doc), doc};
    };

    if (compare->parsed()) {
      std::vector<ExperimentConfig> runs;
      std::vector<json> echoes;
      if (!config_paths.empty()) {
        if (!methods_list.empty()) throw ConfigError("compare: use either --config files or --methods");
        for (const auto& path : config_paths) {
          auto [c, doc] = build(&path, std::nullopt);
          runs.push_back(std::move(c));
          echoes.push_back(std::move(doc));
        }
      } else {
        std::string list = methods_list.empty() ? "none,1,2,3,4" : methods_list;
        std::stringstream ss(list);
        for (std::string item; std::getline(ss, item, ',');) {
          auto [c, doc] = build(nullptr, item);
          runs.push_back(std::move(c));
          echoes.push_back(std::move(doc));
        }
      }
      const json m = cmd_compare(runs, echoes);
      for (const auto& row : m["rows"]) {
        out << "method " << row["method"].get<std::string>() << ": max |x err| "
            << format_double(row["max_error_x"].get<double>()) << ", improvement "
            << format_double(row["improvement_ratio"].get<double>()) << '\n';
      }
      return 0;
    }

    if (config_paths.size() > 1) throw ConfigError("only compare accepts several --config files");
    const std::string* cfg_path = config_paths.empty() ? nullptr : &config_paths.front();
    auto [c, doc] = build(cfg_path, std::nullopt);

    if (solve->parsed()) {
      const json m = cmd_solve(c, doc);
      out << "solve: " << m["steps_taken"] << " steps, t_final " << format_double(m["t_final"].get<double>());
      if (m["stagnated"].get<bool>()) out << " (stagnated)";
      out << '\n';
    } else if (diagnose->parsed()) {
      const json m = cmd_diagnose(c, doc);
      out << "diagnose: " << m["stiffness_samples"] << " samples, Q range ["
          << format_double(m["q_min"].get<double>()) << ", " << format_double(m["q_max"].get<double>())
          << "]\n";
    } else if (transform->parsed()) {
      const json m = cmd_transform(c, doc);
      out << "transform: method " << m["method"].get<std::string>() << ", max |x err| "
          << format_double(m["max_error_x"].get<double>()) << ", improvement "
          << format_double(m["improvement_ratio"].get<double>()) << '\n';
    } else if (demo->parsed()) {
      const json m = cmd_demo_stiff_transform(c, doc);
      out << "demo: dt_max_z / dt_stiff_u = " << format_double(m["ratio"].get<double>()) << '\n';
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace stiffchaos::cli
