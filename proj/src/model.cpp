#include "lyon/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lyon/errors.hpp"

namespace lyon {

namespace {

bool in_unit_interval(double v) { return v >= 0.0 && v <= 1.0; }

void check_mean(double m, const char* what) {
  if (!in_unit_interval(m)) {
    throw InvalidArgument(std::string(what) + " mean must lie in [0, 1], got " +
                          std::to_string(m));
  }
}

double scaled_uniform_draw(double mean, RandomStream& rng) {
  const double u = unit_uniform(rng);
  if (mean <= 0.5) return u * 2.0 * mean;
  return (2.0 * mean - 1.0) + u * (2.0 - 2.0 * mean);
}

}  // namespace

std::string_view to_string(ArmKind kind) {
  switch (kind) {
    case ArmKind::independent_bernoulli:
      return "independent_bernoulli";
    case ArmKind::independent_scaled_uniform:
      return "independent_scaled_uniform";
    case ArmKind::joint_discrete_table:
      return "joint_discrete_table";
  }
  return "unknown";
}

ArmSpec ArmSpec::bernoulli(double x_mean, double r_mean, double y_mean) {
  check_mean(x_mean, "cost");
  check_mean(r_mean, "reward");
  check_mean(y_mean, "penalty");
  return ArmSpec(ArmKind::independent_bernoulli, Means{x_mean, r_mean, y_mean});
}

ArmSpec ArmSpec::scaled_uniform(double x_mean, double r_mean, double y_mean) {
  check_mean(x_mean, "cost");
  check_mean(r_mean, "reward");
  check_mean(y_mean, "penalty");
  return ArmSpec(ArmKind::independent_scaled_uniform, Means{x_mean, r_mean, y_mean});
}

ArmSpec ArmSpec::joint_table(std::vector<Atom> atoms) {
  if (atoms.empty()) throw InvalidArgument("joint table needs at least one atom");
  Means means;
  double total = 0.0;
  std::vector<double> cumulative;
  cumulative.reserve(atoms.size());
  for (const Atom& a : atoms) {
    if (!in_unit_interval(a.value.x) || !in_unit_interval(a.value.r) ||
        !in_unit_interval(a.value.y)) {
      throw InvalidArgument("joint table atom outside [0, 1]^3");
    }
    if (!(a.prob >= 0.0)) throw InvalidArgument("joint table atom has negative probability");
    total += a.prob;
    cumulative.push_back(total);
    means.x += a.prob * a.value.x;
    means.r += a.prob * a.value.r;
    means.y += a.prob * a.value.y;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidArgument("joint table probabilities sum to " + std::to_string(total));
  }
  ArmSpec spec(ArmKind::joint_discrete_table, means);
  spec.atoms_ = std::move(atoms);
  spec.cumulative_ = std::move(cumulative);
  return spec;
}

Outcome ArmSpec::sample(RandomStream& rng) const {
  switch (kind_) {
    case ArmKind::independent_bernoulli: {
      Outcome o;
      o.x = unit_uniform(rng) < means_.x ? 1.0 : 0.0;
      o.r = unit_uniform(rng) < means_.r ? 1.0 : 0.0;
      o.y = unit_uniform(rng) < means_.y ? 1.0 : 0.0;
      return o;
    }
    case ArmKind::independent_scaled_uniform: {
      Outcome o;
      o.x = scaled_uniform_draw(means_.x, rng);
      o.r = scaled_uniform_draw(means_.r, rng);
      o.y = scaled_uniform_draw(means_.y, rng);
      return o;
    }
    case ArmKind::joint_discrete_table: {
      // Scale by the table total so rounding in the sum never leaves a gap.
      const double u = unit_uniform(rng) * cumulative_.back();
      const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
      const auto idx = std::min<std::size_t>(
          static_cast<std::size_t>(it - cumulative_.begin()), atoms_.size() - 1);
      return atoms_[idx].value;
    }
  }
  return {};
}

Instance::Instance(std::vector<ArmSpec> arms, double c) : arms_(std::move(arms)), c_(c) {
  if (arms_.empty()) throw InvalidArgument("instance needs at least one arm");
  if (!(c_ > 0.0 && c_ <= 1.0)) {
    throw InvalidArgument("penalty budget rate c must lie in (0, 1], got " + std::to_string(c_));
  }
  for (std::size_t k = 0; k < arms_.size(); ++k) {
    if (!(arms_[k].means().x > 0.0)) {
      throw InvalidArgument("arm " + std::to_string(k + 1) + " has zero mean cost");
    }
  }
}

double Instance::arm_reward_rate(std::size_t k) const {
  const Means& m = means(k);
  return m.r / m.x;
}

double Instance::arm_penalty_rate(std::size_t k) const {
  const Means& m = means(k);
  return m.y / m.x;
}

Bounds derive_bounds(const Instance& instance) {
  Bounds b;
  b.mu_min = std::numeric_limits<double>::infinity();
  b.epsilon = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < instance.num_arms(); ++k) {
    const Means& m = instance.means(k);
    b.mu_min = std::min(b.mu_min, m.x);
    b.r_max = std::max(b.r_max, m.r / m.x);
    b.y_max = std::max(b.y_max, m.y / m.x);
    b.epsilon = std::max(b.epsilon, instance.c() * m.x - m.y);
  }
  if (!(b.epsilon > 0.0)) {
    throw SlaterViolation("no arm satisfies E[Y - cX] < 0 (best margin " +
                          std::to_string(b.epsilon) + ")");
  }
  return b;
}

std::size_t default_episode_cap(double budget, double mu_min) {
  if (!(mu_min > 0.0)) throw InvalidArgument("mu_min must be positive");
  return 10 * static_cast<std::size_t>(std::ceil(2.0 * budget / mu_min));
}

EpisodeResult run_episode(const Instance& instance, Policy& policy, double budget,
                          std::size_t cap, RandomStream& rng) {
  if (!(budget > 0.0)) throw InvalidArgument("budget must be positive");
  if (cap == 0) throw InvalidArgument("episode cap must be at least 1");

  const std::size_t K = instance.num_arms();
  EpisodeResult res;
  res.pulls_per_arm.assign(K, 0);
  res.cost_per_arm.assign(K, 0.0);
  res.q_max = policy.queue_value();

  while (res.total_cost <= budget) {
    if (res.n_pulls == cap) {
      throw EpisodeOverrun("budget " + std::to_string(budget) + " not depleted after " +
                           std::to_string(cap) + " pulls");
    }
    const std::size_t k = policy.select(rng);
    if (k >= K) throw InvalidArgument("policy selected arm index out of range");
    const Outcome o = instance.arm(k).sample(rng);
    policy.observe(k, o);

    ++res.n_pulls;
    ++res.pulls_per_arm[k];
    res.cost_per_arm[k] += o.x;
    res.total_cost += o.x;
    res.total_reward += o.r;
    res.total_penalty += o.y;
    res.last_cost = o.x;
    res.q_max = std::max(res.q_max, policy.queue_value());
  }
  res.q_final = policy.queue_value();
  return res;
}

EpisodeResult run_episode(const Instance& instance, Policy& policy, double budget,
                          RandomStream& rng) {
  double mu_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < instance.num_arms(); ++k) {
    mu_min = std::min(mu_min, instance.means(k).x);
  }
  return run_episode(instance, policy, budget, default_episode_cap(budget, mu_min), rng);
}

}  // namespace lyon
