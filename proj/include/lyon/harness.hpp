#pragma once

// Monte-Carlo experiment engine: batches of independent episodes per
// (policy, budget), per-episode metrics, and deterministic aggregation.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lyon/model.hpp"
#include "lyon/oracle.hpp"
#include "lyon/policies.hpp"

namespace lyon {

enum class PolicyType { stationary, static_arm, lyoff, lyon, ucb_bwi };

struct PolicySpec {
  std::string name;
  PolicyType type = PolicyType::lyon;
  std::size_t static_arm = 0;             ///< 0-based, for PolicyType::static_arm
  std::optional<std::vector<double>> p;   ///< stationary override; p* when empty
  double v0 = 1.0;
  double delta0 = 0.5;
  double alpha = 2.0;
  IndexVariant index_variant = IndexVariant::lcb_both;
  ExplorationMode exploration_mode = ExplorationMode::fixed;
  std::size_t exploration_pulls = 1;
};

struct RunConfig {
  Instance instance;
  std::vector<PolicySpec> policies;
  std::vector<double> budgets;
  std::size_t runs = 2000;
  std::uint64_t master_seed = 0;
  std::size_t threads = 1;  ///< never changes results
};

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

struct AggregateRow {
  std::string policy;
  double budget = 0.0;
  std::size_t runs = 0;
  MeanSe reward_rate;
  MeanSe violation;
  MeanSe regret;
  MeanSe total_reward;
  double mean_n_pulls = 0.0;
  std::size_t cap_hits = 0;
  std::vector<double> allocation;  ///< mean budget share per arm
  std::vector<double> pull_share;  ///< mean pull share per arm
};

struct AggregateResult {
  /// r(p*); pseudo-regret is measured against r_star * B.
  double r_star = 0.0;
  std::vector<AggregateRow> rows;  ///< policy-major, budgets in config order
};

/// r_star * B - total reward. Negative values are legitimate for single runs.
double pseudo_regret(const EpisodeResult& result, double r_star, double budget);

/// total penalty / B - c
double violation(const EpisodeResult& result, double c, double budget);

/// Budget share per arm, cost_per_arm / total_cost. Throws ZeroCost.
std::vector<double> allocation(const EpisodeResult& result);

/// pulls_per_arm / n_pulls
std::vector<double> pull_allocation(const EpisodeResult& result);

/// Mean and standard error (sample sd / sqrt(n)) in index order.
MeanSe mean_se(std::span<const double> values);

/// Fresh per-episode policy for `spec` at budget B. Schedule errors
/// (DeltaOutOfRange, SlaterViolation) surface here.
std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const Instance& instance,
                                    double budget, const OracleSolution& oracle);

/// Runs config.runs episodes for every (policy, budget). Run i of every cell
/// uses the stream derived from (master_seed, i); episodes that overrun their
/// cap are counted in cap_hits and left out of the means.
AggregateResult run_batch(const RunConfig& config);

struct ScalingRow {
  double budget = 0.0;
  double mean_regret = 0.0;
  double mean_violation = 0.0;
  double normalized_regret = 0.0;     ///< regret / sqrt(B ln B)
  double normalized_violation = 0.0;  ///< violation * B / ln B
};

struct ScalingReport {
  std::string policy;
  std::vector<ScalingRow> rows;
  /// Least-squares slope of ln(regret) on ln(B); NaN if any regret <= 0.
  double loglog_slope = 0.0;
};

/// Least-squares slope of ln(y) against ln(x); NaN if any value is <= 0.
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// Scaling report for one policy's rows (at least three budgets, ordered as given).
ScalingReport sweep_scaling(std::span<const AggregateRow> series);

/// One report per policy, in first-appearance order.
std::vector<ScalingReport> sweep_scaling(const AggregateResult& result);

}  // namespace lyon
