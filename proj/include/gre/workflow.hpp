#pragma once

#include "gre/design.hpp"
#include "gre/gre.hpp"
#include "gre/json_io.hpp"
#include "gre/order.hpp"
#include "gre/simulator.hpp"

#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace gre {

enum class Stage { Pilot, Design, Extra };
std::string to_string(Stage s);
Stage stage_from_string(const std::string& s);

struct LedgerRecord {
  std::vector<double> x;
  double value = 0.0;
  double cost = 0.0;
  double wall_time = 0.0;
  Stage stage = Stage::Pilot;
  int exit_status = 0;
  std::string run_id;
};

/// Append-only JSON-lines log of simulator runs. Every append is flushed to
/// disk before it returns; a truncated final line left by a crash is dropped
/// on load.
class RunLedger {
 public:
  /// An empty path keeps the ledger in memory only.
  explicit RunLedger(std::string path = "");

  const std::vector<LedgerRecord>& records() const { return records_; }
  const LedgerRecord* find(std::span<const double> x) const;
  void append(const LedgerRecord& r);
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::string path_;
  std::vector<LedgerRecord> records_;
  std::vector<std::string> warnings_;
  mutable std::mutex mutex_;
};

struct WorkflowConfig {
  std::vector<double> lofi;
  /// sweeps[i] are the values taken by x_i with the other coordinates at lofi.
  std::vector<std::vector<double>> sweeps;
  /// One grid per axis, one shared grid, or empty for per-axis defaults.
  std::vector<OrderGrid> grids;
  KernelFamily kernel_family = KernelFamily::Matern;
  std::vector<std::vector<double>> candidates;
  /// Candidate costs; when empty they come from the simulator's cost model,
  /// or failing that from running every candidate.
  std::vector<double> costs;
  double budget = 0.0;
  double alpha = 0.05;
  std::string ledger_path;
  std::size_t workers = 1;
  DesignOptions design;
  double nugget_relative = 0.0;

  std::size_t dim() const { return lofi.size(); }
  void validate() const;
};

struct WorkflowReport {
  AxiswiseEstimate axes;
  ErrorBound bound = ErrorBound::monomial(1.0);
  Kernel kernel;
  std::vector<double> candidate_costs;
  std::string cost_origin;  ///< "config", "predicted" or "measured"
  DesignSolution design;
  std::vector<std::vector<double>> executed;  ///< points the final fit used
  bool pilot_only = false;
  double mean_at_zero = 0.0;
  double sd_at_zero = 0.0;
  double sigma2 = 0.0;
  CredibleInterval interval{};
  double pilot_cost = 0.0;
  double design_cost = 0.0;  ///< recorded cost of the executed design runs
  double budget = 0.0;
  std::vector<std::string> warnings;
  /// Simulator invocations made by this call (not part of the JSON report).
  std::size_t simulator_calls = 0;
};

/// Pilot sweeps and per-axis order estimation, design under the budget,
/// execution of the design and the final fit. Runs already in the ledger are
/// reused instead of repeated.
WorkflowReport run_workflow(Simulator& sim, const WorkflowConfig& cfg);

json::Json report_to_json(const WorkflowReport& r);
std::string report_summary(const WorkflowReport& r);

/// Reads a workflow configuration; `candidates_csv` and `ledger` paths are
/// taken relative to `base_dir` when not absolute.
WorkflowConfig workflow_config_from_json(const json::Json& j, const std::string& base_dir = ".");
/// "simulator" block: command, shell, parse ("last_line" or "json:<path>"),
/// timeout, cost ("measured", "reported:<path>" or "predicted:<expression>").
SimulatorSpec simulator_spec_from_json(const json::Json& j);

}  // namespace gre
