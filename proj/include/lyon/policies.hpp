#pragma once

// Virtual-queue policies for the budgeted, penalty-constrained bandit:
// stationary randomized, offline drift-plus-penalty minimisation (LyOff),
// its empirical counterpart with confidence radii (LyOn), and UCB-BwI.

#include <cstddef>
#include <span>
#include <vector>

#include "lyon/model.hpp"
#include "lyon/oracle.hpp"

namespace lyon {

/// Q_{n+1} = max{0, Q_n + Y_n - (c - delta) X_n}
struct QueueState {
  double q = 0.0;
  double c = 0.0;
  double delta = 0.0;

  QueueState() = default;
  QueueState(double q0, double c_level, double tightening);

  void update(const Outcome& outcome) noexcept {
    const double next = q + outcome.y - (c - delta) * outcome.x;
    q = next > 0.0 ? next : 0.0;
  }
};

inline QueueState queue_update(QueueState state, const Outcome& outcome) {
  state.update(outcome);
  return state;
}

/// Per-arm pull count and running sums of observed outcomes.
struct ArmStats {
  std::size_t t = 0;
  double sum_x = 0.0;
  double sum_r = 0.0;
  double sum_y = 0.0;

  void add(const Outcome& o) noexcept {
    ++t;
    sum_x += o.x;
    sum_r += o.r;
    sum_y += o.y;
  }
};

enum class IndexVariant {
  lcb_both,       ///< subtract the radius term from both the reward and the penalty part
  literal_paper,  ///< add the radius term on the penalty part
};

enum class ExplorationMode { fixed, theoretical };

enum class ScheduleKind { lyoff, lyon };

struct LyParams {
  double V = 1.0;
  double delta = 0.0;
  double alpha = 2.0;
  std::size_t exploration_pulls = 1;
  IndexVariant index_variant = IndexVariant::lcb_both;
  /// Lower clamp on the empirical mean cost; max(1/B, 1e-6) in experiments.
  double denominator_floor = 1e-6;
};

/// Offline per-arm drift-plus-penalty ratio -V E[R_k]/E[X_k] + q E[Y_k]/E[X_k].
double psi_offline(std::size_t k, double q, double V, const Instance& instance);

/// argmin_k psi_offline; ties go to the lowest index.
std::size_t lyoff_select(const QueueState& queue, double V, const Instance& instance);

/// sqrt(2 alpha ln(n) / t). Throws NoSamples for t = 0.
double confidence_radius(std::size_t t, std::size_t n, double alpha);

struct EmpiricalRates {
  double x_hat = 0.0;
  double r_hat = 0.0;
  double y_hat = 0.0;
};

/// Clamped empirical mean cost (floored at `denominator_floor`) and the
/// empirical reward and penalty rates built on it. Throws NoSamples for t = 0.
EmpiricalRates empirical_rates(const ArmStats& stats, double denominator_floor = 1e-6);

/// Confidence-adjusted index from already computed rates and radius.
double lyapunov_index(const EmpiricalRates& rates, double q, double V, double rad,
                      IndexVariant variant);

/// Index of one arm at selection epoch n (n - 1 pulls so far), with the
/// radius evaluated at n - 1.
double gamma_index(double q, const ArmStats& stats, std::size_t n, const LyParams& params);

/// argmin_k gamma_index; ties go to the lowest index. Throws
/// ExplorationIncomplete if some arm has fewer than exploration_pulls samples.
std::size_t lyon_select(const QueueState& queue, std::span<const ArmStats> stats,
                        std::size_t n, const LyParams& params);

/// lyon_select with the queue pinned at zero.
std::size_t ucb_bwi_select(std::span<const ArmStats> stats, std::size_t n,
                           const LyParams& params);

/// 32 alpha (1 + y_max)^2 / (mu_min^2 epsilon^2)
double exploration_beta0(const Bounds& bounds, double alpha);

/// Per-arm initial pulls: ceil(beta0 ln(2B / mu_min)) clamped to >= 1 in
/// theoretical mode, params.exploration_pulls in fixed mode.
std::size_t exploration_schedule(double budget, const Bounds& bounds, const LyParams& params,
                                 ExplorationMode mode);

struct ScheduledParams {
  double V = 0.0;
  double delta = 0.0;
};

/// LyOff: V = v0 sqrt(B), delta = delta0 / sqrt(B).
/// LyOn:  V = v0 sqrt(B ln B), delta = delta0 sqrt(ln B / B).
/// Throws DeltaOutOfRange if delta >= c.
ScheduledParams param_schedule(double budget, double v0, double delta0, ScheduleKind kind,
                               double c);

/// Categorical draw from p.
std::size_t stationary_select(const SimplexDist& p, RandomStream& rng);

// ---------------------------------------------------------------------------

class StationaryPolicy final : public Policy {
public:
  explicit StationaryPolicy(SimplexDist p) : p_(std::move(p)) {}

  std::size_t select(RandomStream& rng) override { return stationary_select(p_, rng); }
  void observe(std::size_t, const Outcome&) override {}

private:
  SimplexDist p_;
};

class LyOffPolicy final : public Policy {
public:
  LyOffPolicy(const Instance& instance, double V, double delta, double initial_queue = 0.0);

  std::size_t select(RandomStream& rng) override;
  void observe(std::size_t arm, const Outcome& outcome) override;
  double queue_value() const override { return queue_.q; }

private:
  const Instance* instance_;
  double V_;
  QueueState queue_;
};

/// LyOn, or UCB-BwI when constructed with `pin_queue_at_zero`.
class LyOnPolicy final : public Policy {
public:
  LyOnPolicy(std::size_t num_arms, double c, LyParams params, bool pin_queue_at_zero = false);

  std::size_t select(RandomStream& rng) override;
  void observe(std::size_t arm, const Outcome& outcome) override;
  double queue_value() const override { return queue_.q; }

  bool exploring() const noexcept;
  /// Epoch of the next selection (1-based).
  std::size_t epoch() const noexcept { return pulls_ + 1; }
  std::span<const ArmStats> stats() const noexcept { return stats_; }
  const LyParams& params() const noexcept { return params_; }

  /// Index of every arm for the next selection; requires exploring() == false.
  std::vector<double> indices() const;

private:
  LyParams params_;
  bool pinned_;
  QueueState queue_;
  std::vector<ArmStats> stats_;
  std::size_t pulls_ = 0;
};

}  // namespace lyon
