#include "lyon/policies.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lyon/errors.hpp"

namespace lyon {

QueueState::QueueState(double q0, double c_level, double tightening)
    : q(q0), c(c_level), delta(tightening) {
  if (!(q >= 0.0)) throw InvalidArgument("queue value must be nonnegative");
  if (!(delta >= 0.0 && delta < c)) throw DeltaOutOfRange("delta must lie in [0, c)");
}

double psi_offline(std::size_t k, double q, double V, const Instance& instance) {
  return -V * instance.arm_reward_rate(k) + q * instance.arm_penalty_rate(k);
}

std::size_t lyoff_select(const QueueState& queue, double V, const Instance& instance) {
  std::size_t best = 0;
  double best_psi = psi_offline(0, queue.q, V, instance);
  for (std::size_t k = 1; k < instance.num_arms(); ++k) {
    const double psi = psi_offline(k, queue.q, V, instance);
    if (psi < best_psi) {
      best_psi = psi;
      best = k;
    }
  }
  return best;
}

double confidence_radius(std::size_t t, std::size_t n, double alpha) {
  if (t == 0) throw NoSamples("confidence radius undefined for an arm with no pulls");
  if (n == 0) throw InvalidArgument("confidence radius needs epoch n >= 1");
  return std::sqrt(2.0 * alpha * std::log(static_cast<double>(n)) / static_cast<double>(t));
}

EmpiricalRates empirical_rates(const ArmStats& stats, double denominator_floor) {
  if (stats.t == 0) throw NoSamples("empirical rates need at least one sample");
  const double t = static_cast<double>(stats.t);
  EmpiricalRates e;
  e.x_hat = std::max(std::min(1.0, stats.sum_x / t), denominator_floor);
  e.r_hat = std::min(1.0, stats.sum_r / t) / e.x_hat;
  e.y_hat = std::min(1.0, stats.sum_y / t) / e.x_hat;
  return e;
}

double lyapunov_index(const EmpiricalRates& rates, double q, double V, double rad,
                      IndexVariant variant) {
  const double psi_hat = -V * rates.r_hat + q * rates.y_hat;
  const double reward_width = rad * V * (1.0 + rates.r_hat) / rates.x_hat;
  const double penalty_width = rad * q * (1.0 + rates.y_hat) / rates.x_hat;
  if (variant == IndexVariant::literal_paper) return psi_hat - reward_width + penalty_width;
  return psi_hat - reward_width - penalty_width;
}

double gamma_index(double q, const ArmStats& stats, std::size_t n, const LyParams& params) {
  if (stats.t == 0) throw NoSamples("index undefined for an arm with no pulls");
  if (n < 2) throw InvalidArgument("index needs at least one completed epoch");
  const EmpiricalRates rates = empirical_rates(stats, params.denominator_floor);
  const double rad = confidence_radius(stats.t, n - 1, params.alpha);
  return lyapunov_index(rates, q, params.V, rad, params.index_variant);
}

std::size_t lyon_select(const QueueState& queue, std::span<const ArmStats> stats,
                        std::size_t n, const LyParams& params) {
  if (stats.empty()) throw InvalidArgument("no arms");
  for (std::size_t k = 0; k < stats.size(); ++k) {
    if (stats[k].t < std::max<std::size_t>(params.exploration_pulls, 1)) {
      throw ExplorationIncomplete("arm " + std::to_string(k + 1) +
                                  " has not finished its exploration pulls");
    }
  }
  std::size_t best = 0;
  double best_index = gamma_index(queue.q, stats[0], n, params);
  for (std::size_t k = 1; k < stats.size(); ++k) {
    const double g = gamma_index(queue.q, stats[k], n, params);
    if (g < best_index) {
      best_index = g;
      best = k;
    }
  }
  return best;
}

std::size_t ucb_bwi_select(std::span<const ArmStats> stats, std::size_t n,
                           const LyParams& params) {
  QueueState empty;
  return lyon_select(empty, stats, n, params);
}

double exploration_beta0(const Bounds& bounds, double alpha) {
  const double a = 1.0 + bounds.y_max;
  const double d = bounds.mu_min * bounds.epsilon;
  return 32.0 * alpha * a * a / (d * d);
}

std::size_t exploration_schedule(double budget, const Bounds& bounds, const LyParams& params,
                                 ExplorationMode mode) {
  if (mode == ExplorationMode::fixed) return params.exploration_pulls;
  if (!(bounds.mu_min > 0.0 && bounds.epsilon > 0.0)) {
    throw InvalidArgument("theoretical exploration needs mu_min > 0 and epsilon > 0");
  }
  const double beta0 = exploration_beta0(bounds, params.alpha);
  const double pulls = std::ceil(beta0 * std::log(2.0 * budget / bounds.mu_min));
  return pulls < 1.0 ? 1 : static_cast<std::size_t>(pulls);
}

ScheduledParams param_schedule(double budget, double v0, double delta0, ScheduleKind kind,
                               double c) {
  if (!(budget > 1.0)) throw InvalidArgument("parameter schedules need B > 1");
  if (!(v0 > 0.0)) throw InvalidArgument("v0 must be positive");
  if (!(delta0 >= 0.0)) throw InvalidArgument("delta0 must be nonnegative");
  ScheduledParams out;
  if (kind == ScheduleKind::lyoff) {
    out.V = v0 * std::sqrt(budget);
    out.delta = delta0 / std::sqrt(budget);
  } else {
    const double log_b = std::log(budget);
    out.V = v0 * std::sqrt(budget * log_b);
    out.delta = delta0 * std::sqrt(log_b / budget);
  }
  if (out.delta >= c) {
    throw DeltaOutOfRange("scheduled delta " + std::to_string(out.delta) +
                          " is not below c = " + std::to_string(c));
  }
  return out;
}

std::size_t stationary_select(const SimplexDist& p, RandomStream& rng) {
  const double u = unit_uniform(rng);
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] <= 0.0) continue;
    acc += p[k];
    last_positive = k;
    if (u < acc) return k;
  }
  return last_positive;
}

LyOffPolicy::LyOffPolicy(const Instance& instance, double V, double delta, double initial_queue)
    : instance_(&instance), V_(V), queue_(initial_queue, instance.c(), delta) {
  if (!(V_ > 0.0)) throw InvalidArgument("V must be positive");
}

std::size_t LyOffPolicy::select(RandomStream&) { return lyoff_select(queue_, V_, *instance_); }

void LyOffPolicy::observe(std::size_t, const Outcome& outcome) { queue_.update(outcome); }

LyOnPolicy::LyOnPolicy(std::size_t num_arms, double c, LyParams params, bool pin_queue_at_zero)
    : params_(params), pinned_(pin_queue_at_zero), queue_(0.0, c, params.delta),
      stats_(num_arms) {
  if (num_arms == 0) throw InvalidArgument("no arms");
  if (!(params_.V > 0.0)) throw InvalidArgument("V must be positive");
  if (!(params_.alpha > 0.0)) throw InvalidArgument("alpha must be positive");
  if (params_.exploration_pulls == 0) throw InvalidArgument("exploration_pulls must be >= 1");
  if (!(params_.denominator_floor > 0.0)) {
    throw InvalidArgument("denominator floor must be positive");
  }
}

bool LyOnPolicy::exploring() const noexcept {
  return std::any_of(stats_.begin(), stats_.end(), [&](const ArmStats& s) {
    return s.t < params_.exploration_pulls;
  });
}

std::size_t LyOnPolicy::select(RandomStream&) {
  // Round-robin exploration: the least-pulled arm still short of its quota.
  std::size_t pick = stats_.size();
  for (std::size_t k = 0; k < stats_.size(); ++k) {
    if (stats_[k].t >= params_.exploration_pulls) continue;
    if (pick == stats_.size() || stats_[k].t < stats_[pick].t) pick = k;
  }
  if (pick != stats_.size()) return pick;
  return lyon_select(queue_, stats_, epoch(), params_);
}

void LyOnPolicy::observe(std::size_t arm, const Outcome& outcome) {
  stats_.at(arm).add(outcome);
  ++pulls_;
  if (!pinned_) queue_.update(outcome);
}

std::vector<double> LyOnPolicy::indices() const {
  if (exploring()) throw ExplorationIncomplete("indices requested during exploration");
  std::vector<double> out(stats_.size());
  for (std::size_t k = 0; k < stats_.size(); ++k) {
    out[k] = gamma_index(queue_.q, stats_[k], epoch(), params_);
  }
  return out;
}

}  // namespace lyon
