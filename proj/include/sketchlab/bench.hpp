#pragma once

#include "sketchlab/dense.hpp"
#include "sketchlab/descriptor.hpp"
#include "sketchlab/rangefinder.hpp"
#include "sketchlab/rng.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace sketchlab::bench {

inline constexpr const char* kReportSchema = "sketchlab.report/1";

/// Generator selection for experiment inputs.
///   kind "svd":             n x n, sigma_j = 1/j (j <= r), tail otherwise
///   kind "laplacian":       n x n single-layer log kernel
///   kind "fd":              preset "small" | "medium" | "large"
///   kind "factor_gaussian": m x n, rank r, noise
///   kind "file":            matrix read from `path`
struct InputSpec {
  std::string kind = "svd";
  Index n = 256;
  Index m = 0;  // rows for factor_gaussian (0 means n)
  Index r = 8;
  double tail = 1e-10;
  double noise = 0.0;
  std::string preset;
  std::string path;

  /// True when the matrix does not depend on the seed.
  bool deterministic() const;
  nlohmann::json to_json() const;
  static InputSpec from_json(const nlohmann::json& j);
};

struct GeneratedInput {
  DenseMatrix M;
  /// sigma_{r+1}(M) where known from the generator, else computed by SVD.
  double sigma_next = 0.0;
  Index r = 0;
};

GeneratedInput generate(const InputSpec& spec, std::uint64_t seed);

/// Column count of the generated matrix (the multiplier order).
Index input_cols(const InputSpec& spec);

/// One experiment: a fixed input class and multiplier recipe repeated over
/// trials. Trial t uses seed trial_seed(seed, t); the input is drawn from
/// derive_seed(trial seed, 1) and the multiplier from derive_seed(trial seed, 2).
struct ExperimentConfig {
  std::string label;
  InputSpec input;
  Descriptor multiplier;            // reseeded per trial; must be cols(M) x l
  std::vector<Index> block_sizes;   // non-empty selects the recursive finder on an n x n multiplier
  double tau = -1.0;                // negative: 10 * sigma_{r+1}(M)
  rf::ErrorEstimator estimator;
  int power_iterations = 0;
  int trials = 1;
  std::uint64_t seed = 0;
  double xi = 1e-5;                 // rank threshold for the reported numerical rank
  int threads = 0;                  // 0: hardware concurrency

  void validate() const;
  nlohmann::json to_json() const;
  /// Accepts "multiplier" as a descriptor or {"recipe": name, "l": width}.
  static ExperimentConfig from_json(const nlohmann::json& j);
};

struct Aggregates {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  double max = 0.0;
};

/// Index-order accumulation, so recomputation is bit-identical.
Aggregates aggregate(const std::vector<double>& v);

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<double> deltas;
  std::vector<int> successes;
  std::vector<int> stages;
  std::vector<double> flops;  // field operations of the sketch products per trial
  Aggregates delta;
  double mean_flops = 0.0;
  double success_rate = 0.0;
  double tau_used = 0.0;      // tau of trial 0 (all trials when the input is deterministic)
  Index numerical_rank = 0;   // of the trial-0 input at config.xi
  double wall_seconds = 0.0;

  nlohmann::json to_json() const;
  static ExperimentReport from_json(const nlohmann::json& j);
};

ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Runs configs that share input, seed and trial count, drawing each trial's
/// input once for all of them. Throws InvalidArgument when they do not share.
std::vector<ExperimentReport> run_experiment_group(const std::vector<ExperimentConfig>& cfgs);

// Table reproduction.

enum class Scale { Desk, Full };
Scale scale_from_string(const std::string& s);
const char* to_string(Scale s);

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  bool asserted = true;  // false: reported only
  bool contains(double x) const { return x >= lo && x <= hi; }
};

struct TableCell {
  std::string column;
  ExperimentConfig config;
  std::optional<double> reference_mean;
  Bracket bracket;
  std::optional<ExperimentReport> report;

  bool pass() const;
};

struct TableRow {
  std::string label;
  nlohmann::json params;
  std::vector<TableCell> cells;
};

struct TableResult {
  int id = 0;
  std::string title;
  Scale scale = Scale::Desk;
  std::vector<TableRow> rows;
  double wall_seconds = 0.0;

  bool pass() const;
  nlohmann::json to_json() const;
};

struct TableOptions {
  Scale scale = Scale::Desk;
  std::uint64_t seed = 20240101;
  int trials = 0;  // 0: scale default
  int threads = 0;
};

/// Cell configurations for table id in 2..9, without running them.
TableResult table_layout(int id, const TableOptions& opts);

/// table_layout followed by the runs (cells of a row share inputs).
TableResult reproduce_table(int id, const TableOptions& opts);

std::vector<int> table_ids();

// Operation-count audit against the catalog budgets.

struct AuditRow {
  std::string family;
  Index n = 0;
  bool real = true;
  std::uint64_t additions = 0;
  std::uint64_t multiplications = 0;
  std::uint64_t random_variables = 0;
  double flop_budget = 0.0;
  double rv_budget = 0.0;
  bool exact = false;  // measured total must equal the budget
  std::string budget_formula;
  bool pass() const;
};

std::vector<AuditRow> flop_audit(Index n);
std::vector<AuditRow> flop_audit(const std::vector<Index>& sizes);
nlohmann::json audit_to_json(const std::vector<AuditRow>& rows);

// Monte Carlo checks of Gaussian norm expectations.

struct NormSummary {
  Index m = 0, n = 0;
  int trials = 0;
  double mean_norm = 0.0, se_norm = 0.0, bound_norm = 0.0;
  bool norm_ok = false;
  bool pinv_checked = false;
  double mean_pinv = 0.0, se_pinv = 0.0, bound_pinv = 0.0;
  bool pinv_ok = false;
  std::string notice;

  bool pass() const { return norm_ok && (!pinv_checked || pinv_ok); }
  nlohmann::json to_json() const;
};

/// Means of ||G|| and ||G^+|| = 1/sigma_min(G) over Gaussian m x n samples,
/// against 1 + sqrt m + sqrt n and e sqrt(m) / |m - n|.
NormSummary monte_carlo_gaussian_norms(Index m, Index n, int trials, Rng& rng);

// Report serialization.

/// Wraps a payload with the schema tag and kind.
nlohmann::json envelope(const std::string& kind, nlohmann::json payload);
std::string reports_to_csv(const std::vector<ExperimentReport>& reports);
std::string table_to_csv(const TableResult& t);
std::string audit_to_csv(const std::vector<AuditRow>& rows);

}  // namespace sketchlab::bench
