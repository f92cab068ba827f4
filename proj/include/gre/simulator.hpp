#pragma once

#include "gre/expression.hpp"

#include <atomic>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace gre {

enum class ParseMode { JsonValue, LastLineFloat };
enum class CostSource { Measured, Reported, Predicted };

struct SimulatorSpec {
  /// Command with placeholders {x1}..{xd}, each exactly once. Without `shell`
  /// the substituted command is split on whitespace and run directly;
  /// otherwise it is handed to /bin/sh -c.
  std::string command_template;
  bool shell = false;
  ParseMode parse = ParseMode::LastLineFloat;
  std::string value_path;  ///< dotted path into the JSON output for JsonValue
  double timeout = 60.0;   ///< seconds
  CostSource cost_source = CostSource::Measured;
  std::string cost_path;        ///< Reported: dotted path into the JSON output
  std::string cost_expression;  ///< Predicted: expression in x1..xd

  /// Number of fidelity placeholders, checked against the template.
  std::size_t dim() const;
  void validate() const;
  /// Cost predicted from the expression; only valid for Predicted.
  double predicted_cost(std::span<const double> x) const;
};

struct SimResult {
  double value = 0.0;
  double cost = 0.0;       ///< seconds (measured/reported) or model units (predicted)
  double wall_time = 0.0;  ///< seconds
  int exit_status = 0;
  int attempts = 1;
  std::string output;
};

/// Substitutes %.17g renderings of x into the template.
std::string render_command(const std::string& command_template, std::span<const double> x);

/// Extracts the value (and optionally the reported cost) from captured output.
double parse_value(const SimulatorSpec& spec, const std::string& output);
double parse_reported_cost(const SimulatorSpec& spec, const std::string& output);

/// Name of the environment variable carrying the run identifier.
inline constexpr const char* kRunIdVariable = "GRE_RUN_ID";

/// Spawns the simulator once (retrying once on nonzero exit) and parses its
/// output. Throws SimulatorError with the captured output on timeout, parse
/// failure, or a second nonzero exit.
SimResult run_simulator(const SimulatorSpec& spec, std::span<const double> x, const std::string& run_id = "");

/// Source of simulator evaluations used by the workflow.
class Simulator {
 public:
  virtual ~Simulator() = default;
  virtual SimResult run(std::span<const double> x, const std::string& run_id) = 0;
  /// Cost known before running, if the simulator has a cost model.
  virtual std::optional<double> predict_cost(std::span<const double> x) const = 0;
  std::size_t calls() const { return calls_.load(); }

 protected:
  void count() { ++calls_; }

 private:
  std::atomic<std::size_t> calls_{0};
};

class ProcessSimulator : public Simulator {
 public:
  explicit ProcessSimulator(SimulatorSpec spec);
  SimResult run(std::span<const double> x, const std::string& run_id) override;
  std::optional<double> predict_cost(std::span<const double> x) const override;
  const SimulatorSpec& spec() const { return spec_; }

 private:
  SimulatorSpec spec_;
};

/// In-process simulator backed by a function; used for synthetic studies.
class FunctionSimulator : public Simulator {
 public:
  using Function = std::function<double(std::span<const double>)>;
  FunctionSimulator(Function f, Function cost);
  SimResult run(std::span<const double> x, const std::string& run_id) override;
  std::optional<double> predict_cost(std::span<const double> x) const override;

 private:
  Function f_, cost_;
};

}  // namespace gre
