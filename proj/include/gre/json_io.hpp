#pragma once

#include "gre/bound.hpp"
#include "gre/design.hpp"
#include "gre/gre.hpp"
#include "gre/kernels.hpp"
#include "gre/multioutput.hpp"
#include "gre/order.hpp"
#include "gre/problems.hpp"

#include <json.hpp>

#include <string>

namespace gre::json {

using Json = nlohmann::json;

Json kernel_to_json(const Kernel& k);
/// {"family","s","ell","dim"} or {"product": [factor, ...]}. A scalar "ell"
/// is broadcast over "dim" axes.
Kernel kernel_from_json(const Json& j);

/// {"form":"monomial","order","axis"}, {"form":"additive","weights","orders"},
/// {"form":"product","orders"} or {"form":"polynomial","terms":[{"coefficient","powers"}]}.
Json bound_to_json(const ErrorBound& b);
ErrorBound bound_from_json(const Json& j);

/// {"bound", "kernel", "nugget"}.
Json model_to_json(const GreModel& m);
GreModel model_from_json(const Json& j);

Json dataset_to_json(const Dataset& d);
Dataset dataset_from_json(const Json& j);

/// Posterior summary: mean_at_zero, sd_at_zero, sigma2, objective, weights,
/// interval, nugget.
Json posterior_summary(const GrePosterior& post, double alpha);
/// Summary plus the model and the data, enough to refit bit-identically.
Json fitted_model(const GrePosterior& post, double alpha);

Json grid_summary(const MultiPosterior& post, double alpha);

Json order_grid_to_json(const OrderGrid& g);
OrderGrid order_grid_from_json(const Json& j, const OrderGrid& fallback);
Json order_estimate_to_json(const OrderEstimate& e);
Json axiswise_to_json(const AxiswiseEstimate& e);

Json design_to_json(const DesignSolution& s, const DesignProblem& p);

Json study_summary(const StudyResult& r);

Json error_to_json(const std::string& kind, const std::string& message);

/// Reads and parses a JSON file; ParseError names the path on failure.
Json read_file(const std::string& path);

/// Writes `text` to `path` through a temporary file in the same directory
/// followed by a rename.
void write_atomic(const std::string& path, const std::string& text);

}  // namespace gre::json
