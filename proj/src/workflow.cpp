#include "gre/workflow.hpp"

#include "gre/csv.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace gre {

std::string to_string(Stage s) {
  switch (s) {
    case Stage::Pilot: return "pilot";
    case Stage::Design: return "design";
    case Stage::Extra: return "extra";
  }
  return "?";
}

Stage stage_from_string(const std::string& s) {
  if (s == "pilot") return Stage::Pilot;
  if (s == "design") return Stage::Design;
  if (s == "extra") return Stage::Extra;
  throw ParseError("unknown ledger stage '" + s + "'");
}

namespace {

json::Json record_to_json(const LedgerRecord& r) {
  return {{"x", r.x},
          {"value", r.value},
          {"cost_seconds", r.cost},
          {"wall_time", r.wall_time},
          {"stage", to_string(r.stage)},
          {"exit_status", r.exit_status},
          {"run_id", r.run_id}};
}

LedgerRecord record_from_json(const json::Json& j) {
  LedgerRecord r;
  r.x = j.at("x").get<std::vector<double>>();
  r.value = j.at("value").get<double>();
  r.cost = j.at("cost_seconds").get<double>();
  r.wall_time = j.value("wall_time", 0.0);
  r.stage = stage_from_string(j.at("stage").get<std::string>());
  r.exit_status = j.value("exit_status", 0);
  r.run_id = j.value("run_id", std::string());
  return r;
}

std::string point_text(std::span<const double> x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) s += (i ? ", " : "") + csv::format(x[i]);
  return s + ")";
}

}  // namespace

RunLedger::RunLedger(std::string path) : path_(std::move(path)) {
  if (path_.empty()) return;
  std::ifstream in(path_);
  if (!in) return;
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(line);
  }
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      records_.push_back(record_from_json(json::Json::parse(lines[i])));
    } catch (const std::exception& e) {
      if (i + 1 == lines.size()) {
        warnings_.push_back("ledger " + path_ + ": dropped an unreadable final line (interrupted run?)");
      } else {
        throw ParseError("ledger " + path_ + " line " + std::to_string(i + 1) + ": " + e.what());
      }
    }
  }
}

const LedgerRecord* RunLedger::find(std::span<const double> x) const {
  std::lock_guard<std::mutex> lock(mutex_);
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) {
    if (it->exit_status == 0 && it->x.size() == x.size() && std::equal(x.begin(), x.end(), it->x.begin())) {
      return &*it;
    }
  }
  return nullptr;
}

void RunLedger::append(const LedgerRecord& r) {
  std::lock_guard<std::mutex> lock(mutex_);
  if (!path_.empty()) {
    const std::string line = record_to_json(r).dump() + "\n";
    std::FILE* f = std::fopen(path_.c_str(), "ab");
    if (!f) throw InvalidArgument("cannot append to ledger '" + path_ + "'");
    const bool ok =
        std::fwrite(line.data(), 1, line.size(), f) == line.size() && std::fflush(f) == 0 && ::fsync(::fileno(f)) == 0;
    std::fclose(f);
    if (!ok) throw InvalidArgument("cannot append to ledger '" + path_ + "'");
  }
  records_.push_back(r);
}

void WorkflowConfig::validate() const {
  const std::size_t d = lofi.size();
  if (d == 0) throw InvalidArgument("workflow: lo-fi point is empty");
  for (double v : lofi) {
    if (!(v > 0.0)) throw InvalidArgument("workflow: lo-fi components must be positive");
  }
  if (sweeps.size() != d) throw DimensionError("workflow: need one sweep per fidelity parameter");
  for (std::size_t i = 0; i < d; ++i) {
    if (sweeps[i].empty()) throw InvalidArgument("workflow: sweep for x" + std::to_string(i + 1) + " is empty");
    for (double v : sweeps[i]) {
      if (!(v > 0.0)) throw InvalidArgument("workflow: sweep values must be positive");
    }
  }
  if (!grids.empty() && grids.size() != 1 && grids.size() != d) {
    throw DimensionError("workflow: give one order grid per axis or a single shared grid");
  }
  for (const auto& g : grids) g.validate(false);
  if (candidates.empty()) throw InvalidArgument("workflow: candidate set is empty");
  for (const auto& c : candidates) {
    if (c.size() != d) throw DimensionError("workflow: candidate dimension disagrees with the lo-fi point");
    for (double v : c) {
      if (!(v > 0.0)) throw InvalidArgument("workflow: candidate components must be positive");
    }
  }
  if (!costs.empty() && costs.size() != candidates.size()) {
    throw DimensionError("workflow: costs and candidates differ in length");
  }
  if (!(budget > 0.0)) throw InvalidArgument("workflow: budget must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("workflow: alpha must lie in (0, 1)");
  if (workers == 0) throw InvalidArgument("workflow: workers must be positive");
}

namespace {

/// Runs every point missing from the ledger, up to `workers` at a time.
/// Returns the records for `points` in order.
std::vector<LedgerRecord> execute(Simulator& sim, RunLedger& ledger, const std::vector<std::vector<double>>& points,
                                  Stage stage, std::size_t workers) {
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool earlier = false;
    for (std::size_t k = 0; k < i && !earlier; ++k) earlier = points[k] == points[i];
    if (!earlier && !ledger.find(points[i])) todo.push_back(i);
  }

  std::vector<std::exception_ptr> errors(todo.size());
  const auto n = static_cast<long long>(todo.size());
#pragma omp parallel for schedule(dynamic) num_threads(static_cast<int>(workers)) if (workers > 1)
  for (long long t = 0; t < n; ++t) {
    const auto i = todo[static_cast<std::size_t>(t)];
    try {
      const std::string run_id = to_string(stage) + "-" + std::to_string(i);
      const SimResult r = sim.run(points[i], run_id);
      LedgerRecord rec;
      rec.x = points[i];
      rec.value = r.value;
      rec.cost = r.cost;
      rec.wall_time = r.wall_time;
      rec.stage = stage;
      rec.exit_status = r.exit_status;
      rec.run_id = run_id;
      ledger.append(rec);
    } catch (...) {
      errors[static_cast<std::size_t>(t)] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<LedgerRecord> out;
  for (const auto& p : points) out.push_back(*ledger.find(p));
  return out;
}

Dataset dataset_of(const std::vector<LedgerRecord>& recs) {
  std::vector<std::vector<double>> pts;
  std::vector<double> vals;
  for (const auto& r : recs) {
    if (std::find(pts.begin(), pts.end(), r.x) != pts.end()) continue;
    pts.push_back(r.x);
    vals.push_back(r.value);
  }
  return Dataset::from_rows(pts, vals);
}

}  // namespace

WorkflowReport run_workflow(Simulator& sim, const WorkflowConfig& cfg) {
  cfg.validate();
  const std::size_t d = cfg.dim();
  const std::size_t calls_before = sim.calls();
  RunLedger ledger(cfg.ledger_path);
  WorkflowReport rep;
  rep.budget = cfg.budget;
  rep.warnings = ledger.warnings();

  // Step 1: one-at-a-time sweeps from the lo-fi point.
  std::vector<std::vector<double>> pilot_points = {cfg.lofi};
  std::vector<std::vector<std::vector<double>>> axis_points(d);
  for (std::size_t i = 0; i < d; ++i) {
    axis_points[i].push_back(cfg.lofi);
    for (double v : cfg.sweeps[i]) {
      auto p = cfg.lofi;
      p[i] = v;
      if (std::find(axis_points[i].begin(), axis_points[i].end(), p) == axis_points[i].end()) {
        axis_points[i].push_back(p);
      }
      if (std::find(pilot_points.begin(), pilot_points.end(), p) == pilot_points.end()) pilot_points.push_back(p);
    }
  }
  const auto pilot = execute(sim, ledger, pilot_points, Stage::Pilot, cfg.workers);
  for (const auto& r : pilot) rep.pilot_cost += r.cost;

  std::vector<Dataset> axis_data;
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> vals;
    for (const auto& p : axis_points[i]) vals.push_back(ledger.find(p)->value);
    axis_data.push_back(Dataset::from_rows(axis_points[i], vals));
  }
  EstimateOptions eo;
  eo.kernel_family = cfg.kernel_family;
  eo.nugget_relative = cfg.nugget_relative;
  rep.axes = estimate_axiswise(axis_data, cfg.grids, eo);
  for (const auto& w : rep.axes.warnings) rep.warnings.push_back(w);

  // Step 2: additive bound, product kernel, design under the budget.
  rep.bound = rep.axes.additive_bound();
  rep.kernel = rep.axes.product_kernel(cfg.kernel_family);

  if (!cfg.costs.empty()) {
    rep.candidate_costs = cfg.costs;
    rep.cost_origin = "config";
  } else {
    bool predicted = true;
    for (const auto& c : cfg.candidates) {
      const auto cost = sim.predict_cost(c);
      if (!cost) {
        predicted = false;
        break;
      }
      rep.candidate_costs.push_back(*cost);
    }
    if (predicted) {
      rep.cost_origin = "predicted";
    } else {
      rep.warnings.push_back("no cost model: every candidate was run to measure its cost (expensive)");
      const auto measured = execute(sim, ledger, cfg.candidates, Stage::Extra, cfg.workers);
      rep.candidate_costs.clear();
      for (const auto& r : measured) rep.candidate_costs.push_back(r.cost > 0.0 ? r.cost : 1e-9);
      rep.cost_origin = "measured";
    }
  }

  DesignProblem problem;
  problem.candidates = cfg.candidates;
  problem.costs = rep.candidate_costs;
  problem.budget = cfg.budget;
  problem.bound = rep.bound;
  problem.kernel = rep.kernel;
  problem.nugget_relative = cfg.nugget_relative;
  rep.design = optimize_design(problem, cfg.design);
  for (const auto& w : rep.design.warnings) rep.warnings.push_back(w);

  // Step 3: run the design and extrapolate.
  const GreModel model(rep.bound, rep.kernel, cfg.nugget_relative);
  std::vector<LedgerRecord> used;
  if (rep.design.selected.empty()) {
    rep.pilot_only = true;
    rep.warnings.push_back(
        "WARNING: the budget admits no candidate; the extrapolation below uses the pilot runs only");
    used = pilot;
  } else {
    std::vector<std::vector<double>> pts;
    for (auto i : rep.design.selected) pts.push_back(cfg.candidates[i]);
    used = execute(sim, ledger, pts, Stage::Design, cfg.workers);
    for (const auto& r : used) rep.design_cost += r.cost;
  }
  const Dataset data = dataset_of(used);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto p = data.point(i);
    rep.executed.emplace_back(p.begin(), p.end());
  }
  const GrePosterior post(data, model);
  rep.mean_at_zero = post.mean_at_zero();
  rep.sd_at_zero = std::sqrt(post.var_at_zero());
  rep.sigma2 = post.sigma2();
  rep.interval = credible_interval(post, cfg.alpha);
  if (data.size() == 1) rep.warnings.push_back("single run: the interval collapses to a point");
  rep.simulator_calls = sim.calls() - calls_before;
  return rep;
}

json::Json report_to_json(const WorkflowReport& r) {
  json::Json design = {{"selected", r.design.selected},
                       {"objective", r.design.objective},
                       {"predicted_cost", r.design.total_cost},
                       {"method", to_string(r.design.method)},
                       {"optimal", r.design.optimal}};
  return {{"mean_at_zero", r.mean_at_zero},
          {"sd_at_zero", r.sd_at_zero},
          {"sigma2", r.sigma2},
          {"interval", {{"alpha", r.interval.alpha}, {"lo", r.interval.lo}, {"hi", r.interval.hi}}},
          {"pilot_only", r.pilot_only},
          {"axes", json::axiswise_to_json(r.axes)},
          {"bound", json::bound_to_json(r.bound)},
          {"kernel", json::kernel_to_json(r.kernel)},
          {"cost_origin", r.cost_origin},
          {"candidate_costs", r.candidate_costs},
          {"design", design},
          {"executed", r.executed},
          {"budget",
           {{"budget", r.budget},
            {"design_cost_recorded", r.design_cost},
            {"pilot_cost", r.pilot_cost},
            {"pilot_to_budget", r.pilot_cost / r.budget},
            {"note", "pilot runs are excluded from the budget"}}},
          {"warnings", r.warnings}};
}

std::string report_summary(const WorkflowReport& r) {
  std::ostringstream out;
  for (const auto& w : r.warnings) {
    if (w.rfind("WARNING", 0) == 0) out << w << "\n\n";
  }
  out << "orders per axis:\n";
  for (const auto& a : r.axes.axes) {
    out << "  x" << a.axis + 1 << ": r=" << csv::format(a.r) << " s=" << a.s << " ell=" << csv::format(a.ell)
        << " sigma=" << csv::format(a.sigma_hat) << "\n";
  }
  out << "design (" << to_string(r.design.method) << (r.design.optimal ? ", optimal" : "") << "), "
      << r.executed.size() << " runs:\n";
  for (const auto& x : r.executed) out << "  " << point_text(x) << "\n";
  out << "f(0) ~ " << csv::format(r.mean_at_zero) << " +/- " << csv::format(r.sd_at_zero) << "\n";
  out << 100.0 * (1.0 - r.interval.alpha) << "% interval [" << csv::format(r.interval.lo) << ", "
      << csv::format(r.interval.hi) << "]\n";
  out << "budget " << csv::format(r.budget) << ", design cost (" << r.cost_origin << ") "
      << csv::format(r.design.total_cost) << ", pilot cost " << csv::format(r.pilot_cost)
      << " (excluded from the budget)\n";
  for (const auto& w : r.warnings) {
    if (w.rfind("WARNING", 0) != 0) out << "note: " << w << "\n";
  }
  return out.str();
}

SimulatorSpec simulator_spec_from_json(const json::Json& j) {
  try {
    SimulatorSpec s;
    s.command_template = j.at("command").get<std::string>();
    s.shell = j.value("shell", false);
    s.timeout = j.value("timeout", 60.0);
    const std::string parse = j.value("parse", std::string("last_line"));
    if (parse == "last_line") {
      s.parse = ParseMode::LastLineFloat;
    } else if (parse.rfind("json:", 0) == 0) {
      s.parse = ParseMode::JsonValue;
      s.value_path = parse.substr(5);
    } else {
      throw ParseError("simulator parse must be 'last_line' or 'json:<path>'");
    }
    const std::string cost = j.value("cost", std::string("measured"));
    if (cost == "measured") {
      s.cost_source = CostSource::Measured;
    } else if (cost.rfind("reported:", 0) == 0) {
      s.cost_source = CostSource::Reported;
      s.cost_path = cost.substr(9);
    } else if (cost.rfind("predicted:", 0) == 0) {
      s.cost_source = CostSource::Predicted;
      s.cost_expression = cost.substr(10);
    } else {
      throw ParseError("simulator cost must be 'measured', 'reported:<path>' or 'predicted:<expression>'");
    }
    s.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("simulator: ") + e.what());
  }
}

WorkflowConfig workflow_config_from_json(const json::Json& j, const std::string& base_dir) {
  namespace fs = std::filesystem;
  auto resolve = [&](const std::string& p) {
    return fs::path(p).is_absolute() ? p : (fs::path(base_dir) / p).string();
  };
  try {
    WorkflowConfig c;
    c.lofi = j.at("lofi").get<std::vector<double>>();
    c.sweeps = j.at("sweeps").get<std::vector<std::vector<double>>>();
    if (j.contains("order_grid")) c.grids.push_back(json::order_grid_from_json(j.at("order_grid"), OrderGrid{}));
    if (j.contains("order_grids")) {
      for (const auto& g : j.at("order_grids")) c.grids.push_back(json::order_grid_from_json(g, OrderGrid{}));
    }
    c.kernel_family = kernel_family_from_string(j.value("kernel_family", std::string("matern")));
    if (j.contains("candidates")) c.candidates = j.at("candidates").get<std::vector<std::vector<double>>>();
    if (j.contains("costs")) c.costs = j.at("costs").get<std::vector<double>>();
    if (j.contains("candidates_csv")) {
      const auto cand = csv::read_candidates(resolve(j.at("candidates_csv").get<std::string>()));
      c.candidates = cand.points;
      c.costs = cand.costs;
    }
    c.budget = j.at("budget").get<double>();
    c.alpha = j.value("alpha", 0.05);
    if (j.contains("ledger")) c.ledger_path = resolve(j.at("ledger").get<std::string>());
    c.workers = j.value("workers", std::size_t{1});
    c.nugget_relative = j.value("nugget", 0.0);
    const std::string method = j.value("design_method", std::string("auto"));
    if (method == "auto") {
      c.design.method = DesignMethod::Auto;
    } else if (method == "exhaustive") {
      c.design.method = DesignMethod::Exhaustive;
    } else if (method == "greedy") {
      c.design.method = DesignMethod::Greedy;
    } else {
      throw ParseError("design_method must be auto, exhaustive or greedy");
    }
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("workflow config: ") + e.what());
  }
}

}  // namespace gre
