#include "lyon/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <thread>

#include "lyon/errors.hpp"

namespace lyon {

double pseudo_regret(const EpisodeResult& result, double r_star, double budget) {
  return r_star * budget - result.total_reward;
}

double violation(const EpisodeResult& result, double c, double budget) {
  return result.total_penalty / budget - c;
}

std::vector<double> allocation(const EpisodeResult& result) {
  if (!(result.total_cost > 0.0)) throw ZeroCost("allocation undefined for zero total cost");
  std::vector<double> share(result.cost_per_arm.size());
  for (std::size_t k = 0; k < share.size(); ++k) {
    share[k] = result.cost_per_arm[k] / result.total_cost;
  }
  return share;
}

std::vector<double> pull_allocation(const EpisodeResult& result) {
  std::vector<double> share(result.pulls_per_arm.size(), 0.0);
  if (result.n_pulls == 0) return share;
  for (std::size_t k = 0; k < share.size(); ++k) {
    share[k] = static_cast<double>(result.pulls_per_arm[k]) / static_cast<double>(result.n_pulls);
  }
  return share;
}

MeanSe mean_se(std::span<const double> values) {
  MeanSe out;
  if (values.empty()) {
    out.mean = out.se = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / n;
  if (values.size() < 2) return out;
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  out.se = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  return out;
}

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const Instance& instance,
                                    double budget, const OracleSolution& oracle) {
  const std::size_t K = instance.num_arms();
  switch (spec.type) {
    case PolicyType::stationary:
      if (spec.p) return std::make_unique<StationaryPolicy>(SimplexDist(*spec.p));
      return std::make_unique<StationaryPolicy>(oracle.p_star);
    case PolicyType::static_arm:
      if (spec.static_arm >= K) throw InvalidArgument("static arm index out of range");
      return std::make_unique<StationaryPolicy>(SimplexDist::vertex(K, spec.static_arm));
    case PolicyType::lyoff: {
      const ScheduledParams s =
          param_schedule(budget, spec.v0, spec.delta0, ScheduleKind::lyoff, instance.c());
      return std::make_unique<LyOffPolicy>(instance, s.V, s.delta);
    }
    case PolicyType::lyon:
    case PolicyType::ucb_bwi: {
      const bool ucb = spec.type == PolicyType::ucb_bwi;
      const ScheduledParams s = param_schedule(budget, spec.v0, ucb ? 0.0 : spec.delta0,
                                               ScheduleKind::lyon, instance.c());
      LyParams params;
      params.V = s.V;
      params.delta = s.delta;
      params.alpha = spec.alpha;
      params.index_variant = spec.index_variant;
      params.exploration_pulls = spec.exploration_pulls;
      params.denominator_floor = std::max(1.0 / budget, 1e-6);
      if (spec.exploration_mode == ExplorationMode::theoretical) {
        params.exploration_pulls = exploration_schedule(budget, derive_bounds(instance), params,
                                                        ExplorationMode::theoretical);
      }
      return std::make_unique<LyOnPolicy>(K, instance.c(), params, ucb);
    }
  }
  throw InvalidArgument("unknown policy type");
}

namespace {

struct RunMetrics {
  bool capped = false;
  double reward_rate = 0.0;
  double violation = 0.0;
  double regret = 0.0;
  double total_reward = 0.0;
  double n_pulls = 0.0;
  std::vector<double> allocation;
  std::vector<double> pull_share;
};

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

AggregateRow aggregate(const std::string& name, double budget, std::size_t K,
                       const std::vector<RunMetrics>& runs) {
  AggregateRow row;
  row.policy = name;
  row.budget = budget;
  row.runs = runs.size();
  row.allocation.assign(K, 0.0);
  row.pull_share.assign(K, 0.0);

  std::vector<double> rate, viol, reg, rew;
  double pulls = 0.0;
  for (const RunMetrics& m : runs) {
    if (m.capped) {
      ++row.cap_hits;
      continue;
    }
    rate.push_back(m.reward_rate);
    viol.push_back(m.violation);
    reg.push_back(m.regret);
    rew.push_back(m.total_reward);
    pulls += m.n_pulls;
    for (std::size_t k = 0; k < K; ++k) {
      row.allocation[k] += m.allocation[k];
      row.pull_share[k] += m.pull_share[k];
    }
  }
  const double n = static_cast<double>(rate.size());
  row.reward_rate = mean_se(rate);
  row.violation = mean_se(viol);
  row.regret = mean_se(reg);
  row.total_reward = mean_se(rew);
  row.mean_n_pulls = rate.empty() ? std::numeric_limits<double>::quiet_NaN() : pulls / n;
  for (std::size_t k = 0; k < K; ++k) {
    row.allocation[k] = rate.empty() ? std::numeric_limits<double>::quiet_NaN() : row.allocation[k] / n;
    row.pull_share[k] = rate.empty() ? std::numeric_limits<double>::quiet_NaN() : row.pull_share[k] / n;
  }
  return row;
}

}  // namespace

AggregateResult run_batch(const RunConfig& config) {
  if (config.runs == 0) throw InvalidArgument("runs must be at least 1");
  if (config.policies.empty()) throw InvalidArgument("no policies configured");
  if (config.budgets.empty()) throw InvalidArgument("no budgets configured");
  for (double b : config.budgets) {
    if (!(b > 1.0)) throw InvalidArgument("budgets must exceed 1");
  }

  const Instance& instance = config.instance;
  const std::size_t K = instance.num_arms();
  const OracleSolution oracle = solve_lfp(instance);

  AggregateResult result;
  result.r_star = oracle.r_star;

  for (const PolicySpec& spec : config.policies) {
    for (double budget : config.budgets) {
      make_policy(spec, instance, budget, oracle);  // surface schedule errors up front
      std::vector<RunMetrics> runs(config.runs);
      parallel_for(config.runs, config.threads, [&](std::size_t i) {
        RandomStream rng = make_stream(config.master_seed, i);
        auto policy = make_policy(spec, instance, budget, oracle);
        RunMetrics& m = runs[i];
        try {
          const EpisodeResult ep = run_episode(instance, *policy, budget, rng);
          m.reward_rate = ep.total_reward / budget;
          m.violation = violation(ep, instance.c(), budget);
          m.regret = pseudo_regret(ep, oracle.r_star, budget);
          m.total_reward = ep.total_reward;
          m.n_pulls = static_cast<double>(ep.n_pulls);
          m.allocation = allocation(ep);
          m.pull_share = pull_allocation(ep);
        } catch (const EpisodeOverrun&) {
          m.capped = true;
        }
      });
      result.rows.push_back(aggregate(spec.name, budget, K, runs));
    }
  }
  return result;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InvalidArgument("log-log slope needs two equally sized series of length >= 2");
  }
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    sx += std::log(x[i]);
    sy += std::log(y[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

ScalingReport sweep_scaling(std::span<const AggregateRow> series) {
  if (series.size() < 3) throw InvalidArgument("need >= 3 budgets for a scaling report");
  ScalingReport report;
  report.policy = series.front().policy;
  std::vector<double> budgets, regrets;
  for (const AggregateRow& row : series) {
    const double B = row.budget;
    const double log_b = std::log(B);
    ScalingRow s;
    s.budget = B;
    s.mean_regret = row.regret.mean;
    s.mean_violation = row.violation.mean;
    s.normalized_regret = row.regret.mean / std::sqrt(B * log_b);
    s.normalized_violation = row.violation.mean * B / log_b;
    report.rows.push_back(s);
    budgets.push_back(B);
    regrets.push_back(row.regret.mean);
  }
  report.loglog_slope = loglog_slope(budgets, regrets);
  return report;
}

std::vector<ScalingReport> sweep_scaling(const AggregateResult& result) {
  std::vector<std::string> order;
  for (const AggregateRow& row : result.rows) {
    if (std::find(order.begin(), order.end(), row.policy) == order.end()) {
      order.push_back(row.policy);
    }
  }
  std::vector<ScalingReport> reports;
  for (const std::string& name : order) {
    std::vector<AggregateRow> series;
    for (const AggregateRow& row : result.rows) {
      if (row.policy == name) series.push_back(row);
    }
    reports.push_back(sweep_scaling(series));
  }
  return reports;
}

}  // namespace lyon
