#pragma once

// Bandit instance, outcome sampling, the causal policy contract, and the
// budget-limited episode runner.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "lyon/random.hpp"

namespace lyon {

/// One pull's (cost, reward, penalty), each in [0, 1].
struct Outcome {
  double x = 0.0;
  double r = 0.0;
  double y = 0.0;
};

/// First moments E[X], E[R], E[Y] of an arm.
struct Means {
  double x = 0.0;
  double r = 0.0;
  double y = 0.0;
};

enum class ArmKind {
  independent_bernoulli,
  independent_scaled_uniform,
  joint_discrete_table,
};

std::string_view to_string(ArmKind kind);

/// One support point of a joint (X, R, Y) table.
struct Atom {
  Outcome value;
  double prob = 0.0;
};

/// Law of the joint outcome of one arm. Immutable after construction.
class ArmSpec {
public:
  /// X, R, Y independent Bernoulli with the given means.
  static ArmSpec bernoulli(double x_mean, double r_mean, double y_mean);

  /// X, R, Y independent, each uniform on the widest interval inside [0, 1]
  /// centred on its mean: [0, 2m] for m <= 1/2, [2m - 1, 1] otherwise.
  static ArmSpec scaled_uniform(double x_mean, double r_mean, double y_mean);

  /// Arbitrary joint law on finitely many points of [0, 1]^3.
  static ArmSpec joint_table(std::vector<Atom> atoms);

  ArmKind kind() const noexcept { return kind_; }
  const Means& means() const noexcept { return means_; }
  std::span<const Atom> atoms() const noexcept { return atoms_; }

  Outcome sample(RandomStream& rng) const;

private:
  ArmSpec(ArmKind kind, Means means) : kind_(kind), means_(means) {}

  ArmKind kind_;
  Means means_;
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
};

inline Outcome sample_outcome(const ArmSpec& arm, RandomStream& rng) {
  return arm.sample(rng);
}

/// K arms plus the penalty budget rate c. Shareable across threads.
class Instance {
public:
  Instance(std::vector<ArmSpec> arms, double c);

  std::size_t num_arms() const noexcept { return arms_.size(); }
  double c() const noexcept { return c_; }
  const ArmSpec& arm(std::size_t k) const { return arms_.at(k); }
  std::span<const ArmSpec> arms() const noexcept { return arms_; }
  const Means& means(std::size_t k) const { return arms_.at(k).means(); }

  /// E[R_k] / E[X_k]
  double arm_reward_rate(std::size_t k) const;
  /// E[Y_k] / E[X_k]
  double arm_penalty_rate(std::size_t k) const;

private:
  std::vector<ArmSpec> arms_;
  double c_;
};

/// Problem constants: cost floor, rate ceilings and the Slater margin.
struct Bounds {
  double mu_min = 0.0;
  double r_max = 0.0;
  double y_max = 0.0;
  double epsilon = 0.0;
};

/// Bounds computed from the ground-truth means (simulation use only).
/// Throws SlaterViolation when no arm has E[Y - cX] < 0.
Bounds derive_bounds(const Instance& instance);

struct EpisodeResult {
  std::size_t n_pulls = 0;
  double total_cost = 0.0;
  double total_reward = 0.0;
  double total_penalty = 0.0;
  std::vector<std::size_t> pulls_per_arm;
  std::vector<double> cost_per_arm;
  double last_cost = 0.0;
  double q_final = 0.0;
  double q_max = 0.0;
};

/// Causal policy: `select` at epoch n may only use what `observe` has been
/// told about epochs before n. Instances carry per-episode state and must not
/// be shared between concurrently running episodes.
class Policy {
public:
  virtual ~Policy() = default;

  virtual std::size_t select(RandomStream& rng) = 0;
  virtual void observe(std::size_t arm, const Outcome& outcome) = 0;

  /// Virtual queue value, for policies that keep one.
  virtual double queue_value() const { return 0.0; }
};

/// 10 * ceil(2B / mu_min).
std::size_t default_episode_cap(double budget, double mu_min);

/// Pulls arms until cumulative cost first exceeds `budget`; the crossing
/// pull's reward and penalty are counted. Throws EpisodeOverrun after `cap`
/// pulls without depleting the budget.
EpisodeResult run_episode(const Instance& instance, Policy& policy, double budget,
                          std::size_t cap, RandomStream& rng);

/// Same, with the default cap derived from the instance's smallest mean cost.
EpisodeResult run_episode(const Instance& instance, Policy& policy, double budget,
                          RandomStream& rng);

}  // namespace lyon
