#include "adabelief/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace adabelief::cli {

using nlohmann::json;

namespace {

json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

Vec parse_start(const std::string& s) {
  const auto parts = split_list(s);
  Vec v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) {
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(parts[i], &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != parts[i].size() || !std::isfinite(x)) {
      throw CLI::ValidationError("--start", "cannot parse '" + parts[i] + "' as a number");
    }
    v[static_cast<Eigen::Index>(i)] = x;
  }
  if (v.size() == 0) throw CLI::ValidationError("--start", "expected comma-separated coordinates");
  return v;
}

// Writes to --out when given, stdout otherwise.
void emit(const std::string& path, std::ostream& out, const std::string& text) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidConfig, "cannot open " + path + " for writing");
  f << text;
}

const CLI::IsMember kOptimizerNames{std::vector<std::string>{"adabelief", "adam", "sgd"}};

}  // namespace

std::string format_double(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::setprecision(17) << v;
  return os.str();
}

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& traj) {
  const Eigen::Index d = traj.start.size();
  os << "step";
  for (Eigen::Index i = 0; i < d; ++i) os << ",theta_" << i;
  os << ",f,grad_norm,update_norm\n";
  for (const auto& row : traj.rows) {
    os << row.step;
    for (Eigen::Index i = 0; i < d; ++i) os << ',' << format_double(row.theta[i]);
    os << ',' << format_double(row.f) << ',' << format_double(row.grad_norm) << ','
       << format_double(row.update.norm()) << '\n';
  }
  if (traj.diverged_at) os << "# diverged at step " << *traj.diverged_at << '\n';
}

json trajectory_json(const TrajectoryRecord& traj) {
  json rows = json::array();
  for (const auto& row : traj.rows) {
    rows.push_back({{"step", row.step},
                    {"theta", to_json(row.theta)},
                    {"f", row.f},
                    {"grad_norm", row.grad_norm},
                    {"update_norm", row.update.norm()}});
  }
  return {{"problem", traj.problem},
          {"optimizer", std::string(to_string(traj.kind))},
          {"start", to_json(traj.start)},
          {"rows", std::move(rows)},
          {"first_hit", optional_json(traj.first_hit)},
          {"diverged_at", optional_json(traj.diverged_at)}};
}

json bench_report(const BenchOptions& o) {
  if (o.problems.empty() || o.optimizers.empty()) throw Error(ErrorCode::InvalidConfig, "empty grid");
  if (o.steps < 1) throw Error(ErrorCode::InvalidConfig, "steps must be >= 1");
  if (!(o.delta > 0)) throw Error(ErrorCode::InvalidConfig, "delta must be > 0");

  const RngStream master(o.seed);
  std::vector<RunSpec> specs;
  std::vector<Problem> problems;
  for (std::size_t i = 0; i < o.problems.size(); ++i) {
    problems.push_back(builtin_problem(o.problems[i]));
    for (std::size_t j = 0; j < o.optimizers.size(); ++j) {
      RunSpec s;
      s.problem = o.problems[i];
      s.kind = o.optimizers[j];
      s.config = default_config(s.problem, s.kind);
      s.config.learning_rate = o.learning_rate;
      s.start = default_start(s.problem);
      s.steps = o.steps;
      s.sigma = o.sigma;
      s.seed = master.split(i * o.optimizers.size() + j).seed();
      s.convergence_radius = o.delta;
      specs.push_back(std::move(s));
    }
  }
  const auto results = run_all(specs);

  json cells = json::array();
  json fastest = json::object();
  for (std::size_t i = 0; i < o.problems.size(); ++i) {
    const Problem& p = problems[i];
    std::optional<std::size_t> best_hit;
    json best_name = nullptr;
    for (std::size_t j = 0; j < o.optimizers.size(); ++j) {
      const auto& r = results[i * o.optimizers.size() + j];
      const Vec& last = r.rows.empty() ? r.start : r.rows.back().theta;
      const double final_f = r.rows.empty() ? p.eval(r.start) : r.rows.back().f;
      json cell{{"problem", p.name},
                {"optimizer", std::string(to_string(r.kind))},
                {"first_hit", optional_json(r.first_hit)},
                {"final_f", final_f},
                {"final_distance", (last - *p.optimum).norm()},
                {"diverged_at", optional_json(r.diverged_at)}};
      cells.push_back(std::move(cell));
      // Ties keep the optimizer listed first.
      if (r.first_hit && (!best_hit || *r.first_hit < *best_hit)) {
        best_hit = r.first_hit;
        best_name = std::string(to_string(r.kind));
      }
    }
    fastest[p.name] = best_name;
  }
  return {{"steps", o.steps}, {"delta", o.delta},   {"learning_rate", o.learning_rate},
          {"sigma", o.sigma}, {"seed", o.seed},     {"cells", std::move(cells)},
          {"fastest", std::move(fastest)}};
}

const std::vector<std::string>& probe_kinds() {
  static const std::vector<std::string> kinds{"table1", "ema", "sign", "regret", "nonconvex", "gradcheck"};
  return kinds;
}

namespace {

json table1_json() {
  json cases = json::array();
  bool pass = true;
  const Table1Thresholds th;
  for (auto c : {CurvatureCase::Flat, CurvatureCase::SteepValley, CurvatureCase::LargeGradSmallCurvature}) {
    const auto r = table1_case_check(c, th);
    json cells = json::array();
    for (const auto& cell : r.cells) {
      cells.push_back({{"optimizer", std::string(to_string(cell.kind))},
                       {"mean_abs_update_over_lr", cell.mean_abs_update},
                       {"effective_stepsize_over_lr", cell.effective_stepsize},
                       {"label", std::string(to_string(cell.label))},
                       {"expected", std::string(to_string(cell.expected))},
                       {"match", cell.match}});
    }
    cases.push_back({{"case", std::string(to_string(c))}, {"pass", r.pass}, {"cells", std::move(cells)}});
    pass = pass && r.pass;
  }
  return {{"kind", "table1"},
          {"pass", pass},
          {"thresholds",
           {{"sgd_large", th.sgd_large},
            {"sgd_small", th.sgd_small},
            {"adaptive_large", th.adaptive_large},
            {"adaptive_small", th.adaptive_small}}},
          {"cases", std::move(cases)}};
}

json ema_json() {
  const OptimizerConfig<double> config;
  const auto adam = ema_steady_state(OptimizerKind::Adam, config, alternating_drive(), 2, 9000, 1000,
                                     "g = (1, -1/+1 alternating)");
  const auto belief = ema_steady_state(OptimizerKind::AdaBelief, config, alternating_drive(), 2, 9000, 1000,
                                       "g = (1, -1/+1 alternating)");
  const Vec& v = *adam.v_hat;
  const Vec& s = *belief.s_hat;
  const bool adam_ok = (v.array() >= 0.95).all() && (v.array() <= 1.05).all();
  const bool belief_ok = s[0] <= 0.01 && s[1] >= 0.9 && s[1] <= 1.1;
  return {{"kind", "ema"},
          {"pass", adam_ok && belief_ok},
          {"drive", adam.drive},
          {"steps", adam.burn_in + adam.window},
          {"adam", {{"m_hat", to_json(adam.m_hat)}, {"v_hat", to_json(v)}, {"pass", adam_ok}}},
          {"adabelief", {{"m_hat", to_json(belief.m_hat)}, {"s_hat", to_json(s)}, {"pass", belief_ok}}}};
}

json sign_json() {
  OptimizerConfig<double> config;
  config.beta1 = config.beta2 = config.momentum = 0.3;
  const auto r = sign_descent_angle(config);
  const bool pass = r.adam_ratio >= 0.9 && r.adam_ratio <= 1.1 && r.adabelief_ratio >= 0.05 &&
                    r.adabelief_ratio <= 0.2 && std::abs(r.sgd_ratio - 0.1) <= 1e-12;
  return {{"kind", "sign"},
          {"pass", pass},
          {"gradient", to_json(r.gradient)},
          {"adam_ratio", r.adam_ratio},
          {"adabelief_ratio", r.adabelief_ratio},
          {"sgd_ratio", r.sgd_ratio}};
}

json regret_json() {
  const auto r = standard_regret_run();
  const double early = r.regret_over_t(100);
  const double late = r.regret_over_t(10000);
  double max_over_sqrt = 0;
  for (std::size_t t = 100; t <= r.steps(); ++t) max_over_sqrt = std::max(max_over_sqrt, r.regret_over_sqrt(t));
  const bool pass = late < 0.1 * early && max_over_sqrt <= kRegretOverSqrtBound;
  return {{"kind", "regret"},
          {"pass", pass},
          {"steps", r.steps()},
          {"comparator", to_json(r.comparator)},
          {"regret_over_t_100", early},
          {"regret_over_t_10000", late},
          {"max_regret_over_sqrt_t", max_over_sqrt},
          {"regret_over_sqrt_t_bound", kRegretOverSqrtBound},
          {"final_regret", r.regret(r.steps())},
          {"belief_to_adam_ratio", r.belief_to_adam_ratio}};
}

json nonconvex_json(std::uint64_t seed) {
  json runs = json::array();
  bool pass = true;
  for (std::uint64_t k = 1; k <= 5; ++k) {
    const auto probe = standard_nonconvex_run(seed + k);
    const auto& series = probe.min_sq_grad_norm;
    const bool monotone = std::is_sorted(series.rbegin(), series.rend());
    const auto at100 = std::find(probe.checkpoints.begin(), probe.checkpoints.end(), 100) - probe.checkpoints.begin();
    const bool decayed = series.back() < series[static_cast<std::size_t>(at100)] / 10.0;
    pass = pass && monotone && decayed;
    runs.push_back({{"seed", seed + k},
                    {"checkpoints", probe.checkpoints},
                    {"min_sq_grad_norm", series},
                    {"correlation", probe.correlation},
                    {"non_increasing", monotone},
                    {"decayed_tenfold_from_t100", decayed}});
  }
  return {{"kind", "nonconvex"}, {"pass", pass}, {"problem", "rosenbrock"}, {"sigma", 0.1}, {"runs", runs}};
}

json gradcheck_json(std::uint64_t seed) {
  json problems = json::array();
  double worst = 0;
  for (const auto& name : builtin_problem_names()) {
    const auto r = gradient_check(builtin_problem(name), 100, seed);
    worst = std::max(worst, r.max_relative_error);
    problems.push_back({{"problem", name}, {"points", r.points}, {"max_relative_error", r.max_relative_error}});
  }
  return {{"kind", "gradcheck"}, {"pass", worst < 1e-5}, {"max_relative_error", worst}, {"problems", problems}};
}

}  // namespace

json probe_report(const std::string& kind, std::uint64_t seed) {
  if (kind == "table1") return table1_json();
  if (kind == "ema") return ema_json();
  if (kind == "sign") return sign_json();
  if (kind == "regret") return regret_json();
  if (kind == "nonconvex") return nonconvex_json(seed);
  if (kind == "gradcheck") return gradcheck_json(seed);
  throw Error(ErrorCode::InvalidConfig, "unknown probe kind " + kind);
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"AdaBelief / Adam / SGD benchmark and diagnostics"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  // run
  auto* run_cmd = app.add_subcommand("run", "Run one optimizer on one problem and write its trajectory");
  std::string problem, optimizer = "adabelief", start, out_path, format = "csv", schedule = "constant";
  double lr = 1e-3, beta1 = 0.9, beta2 = 0.999, eps = 1e-8, sigma = 0.0, weight_decay = 0.0, momentum = 0.9;
  std::size_t steps = 1000;
  std::uint64_t seed = 0;
  bool amsgrad = false, decoupled = false;
  run_cmd->add_option("--problem", problem, "Problem name")->required()->check(CLI::IsMember(builtin_problem_names()));
  run_cmd->add_option("--optimizer", optimizer, "adabelief | adam | sgd")->check(kOptimizerNames);
  auto* lr_opt = run_cmd->add_option("--lr", lr, "Learning rate")->check(CLI::PositiveNumber);
  auto* b1_opt = run_cmd->add_option("--beta1", beta1, "First-moment decay");
  auto* b2_opt = run_cmd->add_option("--beta2", beta2, "Second-moment decay");
  auto* mom_opt = run_cmd->add_option("--momentum", momentum, "SGD momentum");
  run_cmd->add_option("--eps", eps, "Epsilon")->check(CLI::PositiveNumber);
  run_cmd->add_option("--steps", steps, "Number of steps")->check(CLI::PositiveNumber);
  run_cmd->add_option("--seed", seed, "Noise seed");
  run_cmd->add_option("--sigma", sigma, "Gradient noise standard deviation")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--start", start, "Start point \"x,y\"");
  run_cmd->add_flag("--amsgrad", amsgrad, "Use the running max of the second moment");
  run_cmd->add_option("--weight-decay", weight_decay, "Weight decay")->check(CLI::NonNegativeNumber);
  run_cmd->add_flag("--decoupled", decoupled, "Apply weight decay after the adaptive update");
  run_cmd->add_option("--schedule", schedule, "constant | inverse_sqrt")
      ->check(CLI::IsMember({"constant", "inverse_sqrt"}));
  run_cmd->add_option("--out", out_path, "Output file (stdout when omitted)");
  run_cmd->add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Run a problem x optimizer grid and report first-hit steps");
  std::string bench_problems, bench_optimizers = "adabelief,adam,sgd", bench_out;
  BenchOptions bench;
  for (const auto& n : builtin_problem_names()) bench_problems += (bench_problems.empty() ? "" : ",") + n;
  bench_cmd->add_option("--problems", bench_problems, "Comma-separated problem names");
  bench_cmd->add_option("--optimizers", bench_optimizers, "Comma-separated optimizer names");
  bench_cmd->add_option("--steps", bench.steps, "Steps per run")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--delta", bench.delta, "First-hit radius")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--lr", bench.learning_rate, "Learning rate")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--sigma", bench.sigma, "Gradient noise standard deviation")->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--seed", bench.seed, "Master seed");
  bench_cmd->add_option("--out", bench_out, "Output file (stdout when omitted)");

  // probe
  auto* probe_cmd = app.add_subcommand("probe", "Run a diagnostics probe and report pass/fail");
  std::string probe_kind, probe_out;
  std::uint64_t probe_seed = 0;
  probe_cmd->add_option("--kind", probe_kind, "table1 | ema | sign | regret | nonconvex | gradcheck")
      ->required()
      ->check(CLI::IsMember(probe_kinds()));
  probe_cmd->add_option("--seed", probe_seed, "Base seed");
  probe_cmd->add_option("--out", probe_out, "Output file (stdout when omitted)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*run_cmd) {
      RunSpec spec;
      spec.problem = problem;
      spec.kind = *parse_optimizer_kind(optimizer);
      spec.config = default_config(problem, spec.kind);
      if (*lr_opt) spec.config.learning_rate = lr;
      if (*b1_opt) spec.config.beta1 = beta1;
      if (*b2_opt) spec.config.beta2 = beta2;
      if (*mom_opt) spec.config.momentum = momentum;
      spec.config.epsilon = eps;
      spec.config.amsgrad = amsgrad;
      spec.config.weight_decay = weight_decay;
      spec.config.decoupled_weight_decay = decoupled;
      spec.config.lr_schedule = schedule == "inverse_sqrt" ? LrSchedule::InverseSqrt : LrSchedule::Constant;
      spec.start = start.empty() ? default_start(problem) : parse_start(start);
      spec.steps = steps;
      spec.seed = seed;
      spec.sigma = sigma;
      const auto traj = run(spec);

      std::ostringstream text;
      if (format == "json") {
        text << trajectory_json(traj).dump(2) << '\n';
      } else {
        write_trajectory_csv(text, traj);
      }
      emit(out_path, out, text.str());
      if (traj.diverged()) {
        err << "diverged at step " << *traj.diverged_at << '\n';
        return kDiverged;
      }
      return kSuccess;
    }
    if (*bench_cmd) {
      bench.problems = split_list(bench_problems);
      for (const auto& name : split_list(bench_optimizers)) {
        const auto kind = parse_optimizer_kind(name);
        if (!kind) throw CLI::ValidationError("--optimizers", "unknown optimizer '" + name + "'");
        bench.optimizers.push_back(*kind);
      }
      for (const auto& name : bench.problems) {
        if (std::find(builtin_problem_names().begin(), builtin_problem_names().end(), name) ==
            builtin_problem_names().end()) {
          throw CLI::ValidationError("--problems", "unknown problem '" + name + "'");
        }
      }
      emit(bench_out, out, bench_report(bench).dump(2) + "\n");
      return kSuccess;
    }
    if (*probe_cmd) {
      const json report = probe_report(probe_kind, probe_seed);
      emit(probe_out, out, report.dump(2) + "\n");
      return report.at("pass").get<bool>() ? kSuccess : kDiverged;
    }
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace adabelief::cli
