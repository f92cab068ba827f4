// Command-line front end.
//
//   gre fit --data d.csv --model m.json [--out fitted.json]
//   gre extrapolate --model fitted.json [--at 0.1,0.2]
//   gre design --candidates c.csv --model m.json --budget 100
//   gre estimate-order --data d.csv [--grid g.json] [--family additive]
//   gre classical --data seq.csv --method richardson:2
//   gre study --problem trapezoid --kernel matern --s 2
//   gre workflow --config wf.json
//
// Exit status: 0 success, 1 domain error (JSON on stderr), 2 usage error.

#include "gre/classical.hpp"
#include "gre/csv.hpp"
#include "gre/design.hpp"
#include "gre/diagnostics.hpp"
#include "gre/gre.hpp"
#include "gre/json_io.hpp"
#include "gre/multioutput.hpp"
#include "gre/order.hpp"
#include "gre/problems.hpp"
#include "gre/simulator.hpp"
#include "gre/workflow.hpp"

#include <CLI11.hpp>

#include <omp.h>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

using namespace gre;
using json::Json;

namespace {

struct Options {
  std::string data, model, grid, candidates, config, out, summary;
  std::string precision = "double";
  std::string family = "monomial";
  std::string kernel_family = "matern";
  std::string method;
  std::string problem = "trapezoid";
  std::string index_kernel;
  std::vector<std::string> at, methods;
  std::vector<double> h_values, base;
  double budget = std::numeric_limits<double>::infinity();
  double alpha = 0.05;
  double ell = 1.0;
  int s = 2;
  int s_true = 2;
  std::size_t workers = 0;
  std::uint64_t seed = 0;
  bool multi = false;
  bool diagnostics = false;
  bool table = false;
};

void emit(const Options& o, const std::string& text) {
  if (o.out.empty()) {
    std::cout << text;
  } else {
    json::write_atomic(o.out, text);
  }
}

std::vector<double> parse_point(const std::string& s) {
  std::vector<double> x;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      x.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidArgument("bad point '" + s + "'");
    }
  }
  if (x.empty()) throw InvalidArgument("empty point");
  return x;
}

Json box_fill_json(const Dataset& data, const GreModel& model, std::uint64_t seed) {
  std::vector<std::vector<double>> pts;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto p = data.point(i);
    pts.emplace_back(p.begin(), p.end());
  }
  BoxFillOptions bo;
  bo.seed = seed;
  bo.random_anchors = data.dim() > 1 ? 4096 : 0;
  const auto bf = box_fill_distance(pts, data.dim(), bo);
  const int d = static_cast<int>(data.dim());
  return {{"box_fill_distance", bf.value},
          {"approximate", bf.approximate},
          {"threshold", fill_threshold(d, model.bound.max_order(), kernel_smoothness(model.kernel))}};
}

Json summary_for(const Dataset& data, const GreModel& model, const Options& o) {
  const Precision prec = Precision::parse(o.precision);
  Json out;
  if (!prec.extended) {
    const GrePosterior post(data, model);
    out = json::posterior_summary(post, o.alpha);
    if (!o.at.empty()) {
      Json preds = Json::array();
      for (const auto& s : o.at) {
        const auto x = parse_point(s);
        const auto p = predict(post, x);
        preds.push_back({{"x", x}, {"mean", p.mean}, {"sd", std::sqrt(p.variance)}});
      }
      out["predictions"] = preds;
    }
  } else {
    ScopedDigits digits(prec.digits);
    const BasicPosterior<Extended> post(data.cast<Extended>(), model);
    const double mean = to_double(post.mean_at_zero()), var = to_double(post.var_at_zero());
    const auto ci = credible_interval(mean, var, o.alpha);
    std::vector<double> w;
    for (Eigen::Index i = 0; i < post.weights().size(); ++i) w.push_back(to_double(post.weights()(i)));
    out = {{"mean_at_zero", mean},
           {"sd_at_zero", std::sqrt(var)},
           {"sigma2", to_double(post.sigma2())},
           {"objective", to_double(post.objective())},
           {"weights", w},
           {"interval", {{"alpha", ci.alpha}, {"lo", ci.lo}, {"hi", ci.hi}, {"degenerate", ci.degenerate}}},
           {"nugget", post.nugget_used()},
           {"n", data.size()}};
    if (!o.at.empty()) {
      Json preds = Json::array();
      for (const auto& s : o.at) {
        const auto x = parse_point(s);
        const std::vector<Extended> xe(x.begin(), x.end());
        const auto p = post.predict(std::span<const Extended>(xe));
        preds.push_back({{"x", x}, {"mean", to_double(p.mean)}, {"sd", std::sqrt(to_double(p.variance))}});
      }
      out["predictions"] = preds;
    }
  }
  out["precision"] = prec.name();
  if (o.diagnostics) out["diagnostics"] = box_fill_json(data, model, o.seed);
  return out;
}

int cmd_fit(const Options& o) {
  const GreModel model = json::model_from_json(json::read_file(o.model));
  if (o.multi) {
    const GridDataset grid = read_grid(o.data);
    const Kernel kt = o.index_kernel.empty() ? Kernel(default_index_kernel(grid.t_points()))
                                             : json::kernel_from_json(json::read_file(o.index_kernel));
    const MultiPosterior post(grid, model, kt);
    Json out = json::grid_summary(post, o.alpha);
    out["model"] = json::model_to_json(model);
    out["index_kernel"] = json::kernel_to_json(kt);
    emit(o, out.dump(2) + "\n");
    return 0;
  }
  const Dataset data = csv::read_dataset(o.data);
  Json out = {{"model", json::model_to_json(model)},
              {"data", json::dataset_to_json(data)},
              {"summary", summary_for(data, model, o)}};
  emit(o, out.dump(2) + "\n");
  return 0;
}

int cmd_extrapolate(const Options& o) {
  const Json m = json::read_file(o.model);
  // Accepts a bare model or the output of `fit`, which carries its data.
  const bool fitted = m.contains("model") && m.contains("data");
  const GreModel model = json::model_from_json(fitted ? m.at("model") : m);
  Dataset data;
  if (!o.data.empty()) {
    data = csv::read_dataset(o.data);
  } else if (fitted) {
    data = json::dataset_from_json(m.at("data"));
  } else {
    throw InvalidArgument("extrapolate needs --data or a fitted model file");
  }
  emit(o, summary_for(data, model, o).dump(2) + "\n");
  return 0;
}

int cmd_design(const Options& o) {
  const Json m = json::read_file(o.model);
  const GreModel model = json::model_from_json(m.contains("model") ? m.at("model") : m);
  const auto cand = csv::read_candidates(o.candidates);
  DesignProblem p;
  p.candidates = cand.points;
  p.costs = cand.costs;
  p.budget = o.budget;
  p.bound = model.bound;
  p.kernel = model.kernel;
  p.nugget_relative = model.nugget_relative;
  DesignOptions opts;
  if (o.method == "exhaustive") {
    opts.method = DesignMethod::Exhaustive;
  } else if (o.method == "greedy") {
    opts.method = DesignMethod::Greedy;
  } else if (!o.method.empty() && o.method != "auto") {
    throw InvalidArgument("design method must be auto, exhaustive or greedy");
  }
  const auto sol = optimize_design(p, opts);
  const std::string text = json::design_to_json(sol, p).dump(2) + "\n";

  std::ostringstream table;
  table << "#  point                     cost\n";
  for (auto i : sol.selected) {
    std::string pt;
    for (std::size_t k = 0; k < p.candidates[i].size(); ++k) pt += (k ? ", " : "") + csv::format(p.candidates[i][k]);
    table << i << "  (" << pt << ")  " << csv::format(p.costs[i]) << "\n";
  }
  table << "total cost " << csv::format(sol.total_cost) << " of " << csv::format(p.budget) << ", objective "
        << csv::format(sol.objective) << " (" << to_string(sol.method) << (sol.optimal ? ", optimal" : "") << ")\n";
  for (const auto& w : sol.warnings) table << "warning: " << w << "\n";

  if (!o.out.empty()) {
    json::write_atomic(o.out, text);
    std::cout << table.str();
  } else {
    std::cout << (o.table ? table.str() : text);
  }
  return 0;
}

int cmd_estimate_order(const Options& o) {
  const Dataset data = csv::read_dataset(o.data);
  OrderGrid grid;
  grid.ell_values.clear();
  if (!o.grid.empty()) grid = json::order_grid_from_json(json::read_file(o.grid), grid);
  EstimateOptions eo;
  eo.kernel_family = kernel_family_from_string(o.kernel_family);
  const BoundFamily fam = bound_family_from_string(o.family);
  const auto est = estimate_order(data, grid, fam, eo);
  Json out = json::order_estimate_to_json(est);
  out["family"] = to_string(fam);
  out["model"] = json::model_to_json(GreModel(est.bound(fam), est.kernel(eo.kernel_family, data.dim())));
  emit(o, out.dump(2) + "\n");
  return 0;
}

int cmd_classical(const Options& o) {
  const auto table = csv::read(o.data);
  const std::size_t fcol = table.column("f");
  if (fcol == std::string::npos) throw ParseError(o.data + ": sequence CSV needs an 'f' column");
  const std::size_t xcol = table.column("x1");
  Sequence seq;
  for (const auto& row : table.rows) {
    seq.y.push_back(row[fcol]);
    if (xcol != std::string::npos) seq.x.push_back(row[xcol]);
  }
  std::vector<std::string> parts;
  std::stringstream ss(o.method.empty() ? "shanks" : o.method);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  auto arg = [&](std::size_t i, double fallback) {
    return i < parts.size() ? parse_point(parts[i]).at(0) : fallback;
  };

  Json out = {{"method", o.method.empty() ? "shanks" : o.method}, {"n", seq.size()}};
  auto put = [&](const Transformed& t) {
    out["sequence"] = {{"x", t.x}, {"y", t.y}, {"start", t.start}, {"undefined", t.undefined}};
    if (t.y.empty()) throw DegenerateBasisError("transform undefined on every window");
    out["estimate"] = t.y.back();
  };
  const std::string& name = parts.at(0);
  if (name == "richardson") {
    const double r = arg(1, 1.0);
    const auto depth = static_cast<std::size_t>(arg(2, static_cast<double>(seq.size() - 1)));
    put(richardson(seq, r, depth));
  } else if (name == "shanks") {
    put(shanks(seq));
  } else if (name == "germain-bonne") {
    out["estimate"] = germain_bonne(seq, static_cast<std::size_t>(arg(1, 2.0)));
  } else if (name == "thiele") {
    out["estimate"] = thiele(seq, static_cast<std::size_t>(arg(1, 1.0)));
  } else {
    throw InvalidArgument("classical method must be richardson[:r[:depth]], shanks, germain-bonne[:n] or thiele[:p]");
  }
  emit(o, out.dump(2) + "\n");
  return 0;
}

int cmd_study(const Options& o) {
  OracleProblem problem;
  std::vector<double> base, hs;
  if (o.problem == "trapezoid") {
    problem = trapezoid_oracle();
    base = {1.0, 0.5, 0.25, 0.125, 0.0625};
    hs = {1.0, 0.5, 0.25};
  } else if (o.problem == "central-difference") {
    problem = central_difference_oracle(o.s_true);
    base = {0.2, 0.4, 0.6, 0.8, 1.0};
    hs = {1.0, 0.7, 0.5, 0.35, 0.25, 0.18};
  } else {
    throw InvalidArgument("problem must be trapezoid or central-difference");
  }
  if (!o.base.empty()) base = o.base;
  if (!o.h_values.empty()) hs = o.h_values;
  std::vector<std::vector<double>> design;
  for (double b : base) design.push_back({b});

  std::vector<StudyMethod> methods;
  if (o.methods.empty()) {
    methods.push_back(StudyMethod::gre(kernel_family_from_string(o.kernel_family), o.s, o.ell));
    methods.push_back(StudyMethod::raw());
  }
  for (const auto& m : o.methods) methods.push_back(StudyMethod::parse(m));

  const auto res = run_convergence_study(problem, design, hs, methods, Precision::parse(o.precision));
  emit(o, res.to_csv());
  const std::string summary = json::study_summary(res).dump(2) + "\n";
  if (!o.summary.empty()) json::write_atomic(o.summary, summary);
  return 0;
}

int cmd_workflow(const Options& o) {
  const Json j = json::read_file(o.config);
  const std::string dir = std::filesystem::path(o.config).parent_path().string();
  WorkflowConfig cfg = workflow_config_from_json(j, dir.empty() ? "." : dir);
  if (o.workers > 0) cfg.workers = o.workers;
  if (std::isfinite(o.budget)) cfg.budget = o.budget;
  if (!j.contains("simulator")) throw InvalidArgument("workflow config has no 'simulator' block");
  ProcessSimulator sim(simulator_spec_from_json(j.at("simulator")));
  const auto rep = run_workflow(sim, cfg);
  const std::string text = report_to_json(rep).dump(2) + "\n";
  if (!o.out.empty()) {
    json::write_atomic(o.out, text);
    std::cout << report_summary(rep);
  } else {
    std::cout << (o.table ? report_summary(rep) : text);
  }
  std::cerr << "simulator runs this invocation: " << rep.simulator_calls << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gauss-Richardson extrapolation of multi-fidelity simulator output"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* c) {
    c->add_option("--out", o.out, "Output file (written atomically); standard output if absent");
    c->add_option("--alpha", o.alpha, "Credible interval level")->check(CLI::Range(1e-12, 1.0 - 1e-12));
    c->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber);
  };

  auto* fit = app.add_subcommand("fit", "Fit GRE and write the model, data and summary");
  fit->add_option("--data", o.data, "Dataset CSV (x1..xd,f) or, with --multi, grid CSV (x1..xd,t,f)")
      ->required()
      ->check(CLI::ExistingFile);
  fit->add_option("--model", o.model, "Model JSON")->required()->check(CLI::ExistingFile);
  fit->add_option("--precision", o.precision, "double or extended:<digits>");
  fit->add_flag("--multi", o.multi, "Multi-output grid data");
  fit->add_option("--index-kernel", o.index_kernel, "Kernel JSON over the output index t")->check(CLI::ExistingFile);
  fit->add_option("--at", o.at, "Also predict at these points (comma separated)");
  fit->add_flag("--diagnostics", o.diagnostics, "Report the box fill distance of the design");
  fit->add_option("--seed", o.seed, "Seed for randomised diagnostics");
  common(fit);

  auto* ext = app.add_subcommand("extrapolate", "Estimate f(0) with a credible interval");
  ext->add_option("--data", o.data, "Dataset CSV")->check(CLI::ExistingFile);
  ext->add_option("--model", o.model, "Model JSON or the output of fit")->required()->check(CLI::ExistingFile);
  ext->add_option("--precision", o.precision, "double or extended:<digits>");
  ext->add_option("--at", o.at, "Also predict at these points (comma separated)");
  ext->add_flag("--diagnostics", o.diagnostics, "Report the box fill distance of the design");
  ext->add_option("--seed", o.seed, "Seed for randomised diagnostics");
  common(ext);

  auto* des = app.add_subcommand("design", "Choose simulations under a cost budget");
  des->add_option("--candidates", o.candidates, "Candidates CSV (x1..xd,cost)")->required()->check(CLI::ExistingFile);
  des->add_option("--model", o.model, "Model JSON")->required()->check(CLI::ExistingFile);
  des->add_option("--budget", o.budget, "Total cost budget")->required();
  des->add_option("--method", o.method, "auto, exhaustive or greedy");
  des->add_flag("--table", o.table, "Print a table instead of JSON on standard output");
  common(des);

  auto* est = app.add_subcommand("estimate-order", "Grid search for convergence order and kernel");
  est->add_option("--data", o.data, "Dataset CSV")->required()->check(CLI::ExistingFile);
  est->add_option("--grid", o.grid, "Grid JSON {\"r\":[..],\"s\":[..],\"ell\":[..]}")->check(CLI::ExistingFile);
  est->add_option("--family", o.family, "monomial, additive or product");
  est->add_option("--kernel", o.kernel_family, "matern, wendland or gaussian");
  common(est);

  auto* cls = app.add_subcommand("classical", "Classical sequence extrapolation");
  cls->add_option("--data", o.data, "Sequence CSV with f and optionally x1")->required()->check(CLI::ExistingFile);
  cls->add_option("--method", o.method, "richardson[:r[:depth]], shanks, germain-bonne[:n], thiele[:p]");
  common(cls);

  auto* stu = app.add_subcommand("study", "Convergence study on a built-in test problem");
  stu->add_option("--problem", o.problem, "trapezoid or central-difference");
  stu->add_option("--s-true", o.s_true, "Smoothness parameter of the central difference problem");
  stu->add_option("--kernel", o.kernel_family, "matern, wendland or gaussian");
  stu->add_option("--s", o.s, "Kernel smoothness");
  stu->add_option("--ell", o.ell, "Kernel length-scale");
  stu->add_option("--method", o.methods, "Method spec (gre:matern:2, raw, richardson:2, shanks); repeatable");
  stu->add_option("--scales", o.h_values, "Scale factors h")->delimiter(',');
  stu->add_option("--base", o.base, "Base design")->delimiter(',');
  stu->add_option("--precision", o.precision, "double or extended:<digits>");
  stu->add_option("--summary", o.summary, "JSON summary with fitted slopes");
  common(stu);

  auto* wf = app.add_subcommand("workflow", "Pilot, order estimation, design and extrapolation over a simulator");
  wf->add_option("--config", o.config, "Workflow JSON")->required()->check(CLI::ExistingFile);
  wf->add_option("--budget", o.budget, "Override the configured budget");
  wf->add_flag("--summary-only", o.table, "Print the human-readable summary instead of JSON");
  common(wf);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (o.workers > 0) omp_set_num_threads(static_cast<int>(o.workers));

  try {
    if (*fit) return cmd_fit(o);
    if (*ext) return cmd_extrapolate(o);
    if (*des) return cmd_design(o);
    if (*est) return cmd_estimate_order(o);
    if (*cls) return cmd_classical(o);
    if (*stu) return cmd_study(o);
    if (*wf) return cmd_workflow(o);
  } catch (const Error& e) {
    Json err = json::error_to_json(e.kind(), e.what());
    if (const auto* se = dynamic_cast<const SimulatorError*>(&e)) err["error"]["output"] = se->output();
    if (const auto* ie = dynamic_cast<const IllConditionedError*>(&e)) {
      err["error"]["points"] = {ie->first(), ie->second()};
    }
    std::cerr << err.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << json::error_to_json("internal", e.what()).dump() << "\n";
    return 1;
  }
  return 2;
}
