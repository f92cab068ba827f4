#include "gre/json_io.hpp"

#include "gre/csv.hpp"
#include "gre/normal.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace gre::json {

namespace {

template <typename F>
auto guarded(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(what + ": " + e.what());
  }
}

const Json& field(const Json& j, const char* name, const std::string& what) {
  if (!j.is_object() || !j.contains(name)) throw ParseError(what + ": missing field '" + name + "'");
  return j.at(name);
}

Json kernel_spec_to_json(const KernelSpec& k) {
  return {{"family", to_string(k.family())},
          {"s", k.smoothness()},
          {"ell", k.lengthscales().values()},
          {"dim", k.dim()}};
}

KernelSpec kernel_spec_from_json(const Json& j) {
  return guarded("kernel", [&] {
    const auto family = kernel_family_from_string(field(j, "family", "kernel").get<std::string>());
    const int s = j.contains("s") ? j.at("s").get<int>() : 0;
    const Json& ell = field(j, "ell", "kernel");
    std::vector<double> ls;
    if (ell.is_number()) {
      const std::size_t d = j.contains("dim") ? j.at("dim").get<std::size_t>() : 1;
      ls.assign(d, ell.get<double>());
    } else {
      ls = ell.get<std::vector<double>>();
      if (j.contains("dim") && j.at("dim").get<std::size_t>() != ls.size()) {
        throw DimensionError("kernel: 'dim' disagrees with the length of 'ell'");
      }
    }
    return KernelSpec(family, s, LengthScales(ls));
  });
}

}  // namespace

Json kernel_to_json(const Kernel& k) {
  if (const auto* spec = std::get_if<KernelSpec>(&k)) return kernel_spec_to_json(*spec);
  Json factors = Json::array();
  for (const auto& f : std::get<ProductKernel>(k).factors()) factors.push_back(kernel_spec_to_json(f));
  return {{"product", factors}};
}

Kernel kernel_from_json(const Json& j) {
  if (j.is_object() && j.contains("product")) {
    return guarded("kernel", [&]() -> Kernel {
      std::vector<KernelSpec> factors;
      for (const auto& f : j.at("product")) factors.push_back(kernel_spec_from_json(f));
      return ProductKernel(std::move(factors));
    });
  }
  return kernel_spec_from_json(j);
}

Json bound_to_json(const ErrorBound& b) {
  return std::visit(
      [](const auto& f) -> Json {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, ErrorBound::Monomial>) {
          return {{"form", "monomial"}, {"order", f.order}, {"axis", f.axis}};
        } else if constexpr (std::is_same_v<F, ErrorBound::AdditiveMonomials>) {
          return {{"form", "additive"}, {"weights", f.weights}, {"orders", f.orders}};
        } else if constexpr (std::is_same_v<F, ErrorBound::ProductMonomials>) {
          return {{"form", "product"}, {"orders", f.orders}};
        } else {
          Json terms = Json::array();
          for (const auto& t : f.terms) terms.push_back({{"coefficient", t.coefficient}, {"powers", t.powers}});
          return {{"form", "polynomial"}, {"terms", terms}};
        }
      },
      b.form());
}

ErrorBound bound_from_json(const Json& j) {
  return guarded("bound", [&] {
    const auto form = field(j, "form", "bound").get<std::string>();
    if (form == "monomial") {
      return ErrorBound::monomial(field(j, "order", "bound").get<double>(),
                                  j.contains("axis") ? j.at("axis").get<std::size_t>() : 0);
    }
    if (form == "additive") {
      const auto orders = field(j, "orders", "bound").get<std::vector<double>>();
      const auto weights =
          j.contains("weights") ? j.at("weights").get<std::vector<double>>() : std::vector<double>(orders.size(), 1.0);
      return ErrorBound::additive(weights, orders);
    }
    if (form == "product") return ErrorBound::product(field(j, "orders", "bound").get<std::vector<double>>());
    if (form == "polynomial") {
      std::vector<ErrorBound::Term> terms;
      for (const auto& t : field(j, "terms", "bound")) {
        terms.push_back({field(t, "coefficient", "bound term").get<double>(),
                         field(t, "powers", "bound term").get<std::vector<int>>()});
      }
      return ErrorBound::polynomial(std::move(terms));
    }
    throw ParseError("bound: unknown form '" + form + "'");
  });
}

Json model_to_json(const GreModel& m) {
  return {{"bound", bound_to_json(m.bound)}, {"kernel", kernel_to_json(m.kernel)}, {"nugget", m.nugget_relative}};
}

GreModel model_from_json(const Json& j) {
  return guarded("model", [&] {
    const double nugget = j.contains("nugget") ? j.at("nugget").get<double>() : 0.0;
    return GreModel(bound_from_json(field(j, "bound", "model")), kernel_from_json(field(j, "kernel", "model")), nugget);
  });
}

Json dataset_to_json(const Dataset& d) {
  Json pts = Json::array();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto p = d.point(i);
    pts.push_back(std::vector<double>(p.begin(), p.end()));
  }
  Json out = {{"points", pts}, {"values", d.values()}};
  if (d.costs()) out["costs"] = *d.costs();
  return out;
}

Dataset dataset_from_json(const Json& j) {
  return guarded("data", [&] {
    const auto pts = field(j, "points", "data").get<std::vector<std::vector<double>>>();
    const auto vals = field(j, "values", "data").get<std::vector<double>>();
    std::optional<std::vector<double>> costs;
    if (j.contains("costs")) costs = j.at("costs").get<std::vector<double>>();
    if (pts.size() != vals.size()) throw DimensionError("data: points and values differ in length");
    return Dataset::from_rows(pts, vals, costs);
  });
}

Json posterior_summary(const GrePosterior& post, double alpha) {
  const auto ci = credible_interval(post, alpha);
  const VectorXd& w = post.weights();
  return {{"mean_at_zero", post.mean_at_zero()},
          {"sd_at_zero", std::sqrt(post.var_at_zero())},
          {"sigma2", post.sigma2()},
          {"objective", post.objective()},
          {"weights", std::vector<double>(w.data(), w.data() + w.size())},
          {"interval", {{"alpha", ci.alpha}, {"lo", ci.lo}, {"hi", ci.hi}, {"degenerate", ci.degenerate}}},
          {"nugget", post.nugget_used()},
          {"n", post.dataset().size()}};
}

Json fitted_model(const GrePosterior& post, double alpha) {
  return {{"model", model_to_json(post.model())},
          {"data", dataset_to_json(post.dataset())},
          {"summary", posterior_summary(post, alpha)}};
}

Json grid_summary(const MultiPosterior& post, double alpha) {
  Json cols = Json::array();
  for (Eigen::Index j = 0; j < post.mean_at_zero().size(); ++j) {
    const double m = post.mean_at_zero()(j), v = post.var_at_zero()(j);
    const auto ci = credible_interval(m, v, alpha);
    cols.push_back({{"mean_at_zero", m},
                    {"sd_at_zero", std::sqrt(v)},
                    {"interval", {{"alpha", ci.alpha}, {"lo", ci.lo}, {"hi", ci.hi}}}});
  }
  return {{"sigma2", post.sigma2()}, {"objective", post.objective()}, {"columns", cols}};
}

Json order_grid_to_json(const OrderGrid& g) {
  return {{"r", g.r_values}, {"s", g.s_values}, {"ell", g.ell_values}};
}

OrderGrid order_grid_from_json(const Json& j, const OrderGrid& fallback) {
  return guarded("order grid", [&] {
    OrderGrid g = fallback;
    if (j.contains("r")) g.r_values = j.at("r").get<std::vector<double>>();
    if (j.contains("s")) g.s_values = j.at("s").get<std::vector<int>>();
    if (j.contains("ell")) g.ell_values = j.at("ell").get<std::vector<double>>();
    g.validate(false);
    return g;
  });
}

Json order_estimate_to_json(const OrderEstimate& e) {
  std::ostringstream table;
  table << "r,s,ell,log_ql,feasible\n";
  for (const auto& row : e.surface) {
    for (std::size_t i = 0; i < row.r.size(); ++i) table << (i ? ";" : "") << csv::format(row.r[i]);
    table << ',' << row.s << ',' << csv::format(row.ell) << ',' << csv::format(row.log_ql) << ','
          << (row.feasible ? 1 : 0) << '\n';
  }
  return {{"r_hat", e.r_hat}, {"s_hat", e.s_hat},       {"ell_hat", e.ell_hat},    {"log_ql", e.log_ql},
          {"sigma2", e.sigma2}, {"surface", table.str()}, {"warnings", e.warnings}};
}

Json axiswise_to_json(const AxiswiseEstimate& e) {
  Json axes = Json::array();
  for (const auto& a : e.axes) {
    axes.push_back({{"axis", a.axis},
                    {"r", a.r},
                    {"s", a.s},
                    {"ell", a.ell},
                    {"sigma_hat", a.sigma_hat},
                    {"log_ql", a.estimate.log_ql}});
  }
  return {{"axes", axes}, {"warnings", e.warnings}};
}

Json design_to_json(const DesignSolution& s, const DesignProblem& p) {
  Json pts = Json::array();
  for (auto i : s.selected) pts.push_back(p.candidates[i]);
  return {{"selected", s.selected},
          {"points", pts},
          {"objective", s.objective},
          {"sd_at_zero_unit_scale", s.objective > 0 ? 1.0 / std::sqrt(s.objective) : std::nan("")},
          {"total_cost", s.total_cost},
          {"budget", p.budget},
          {"method", to_string(s.method)},
          {"optimal", s.optimal},
          {"evaluated", s.evaluated},
          {"per_cost_greedy_objective", s.per_cost_greedy_objective},
          {"warnings", s.warnings}};
}

Json study_summary(const StudyResult& r) {
  Json methods = Json::array();
  for (const auto& c : r.curves) {
    double worst = 0.0;
    bool any = false;
    for (double v : c.rel_error) {
      if (std::isfinite(v)) {
        worst = std::max(worst, std::abs(v));
        any = true;
      }
    }
    Json window = Json::array();
    if (c.window_end > c.window_begin) window = {r.h_values[c.window_begin], r.h_values[c.window_end - 1]};
    methods.push_back({{"method", c.method},
                       {"slope", c.slope},
                       {"window", window},
                       {"max_abs_rel_error", any ? Json(worst) : Json(nullptr)}});
  }
  return {{"problem", r.problem},
          {"precision", r.precision},
          {"h_values", r.h_values},
          {"methods", methods},
          {"warnings", r.warnings}};
}

Json error_to_json(const std::string& kind, const std::string& message) {
  return {{"error", {{"kind", kind}, {"message", message}}}};
}

Json read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_atomic(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  std::FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f) throw InvalidArgument("cannot write '" + path + "'");
  const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size() && std::fflush(f) == 0 &&
                  ::fsync(::fileno(f)) == 0;
  std::fclose(f);
  if (!ok || std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw InvalidArgument("cannot write '" + path + "'");
  }
}

}  // namespace gre::json
