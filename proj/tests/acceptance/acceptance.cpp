// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cli.hpp"
#include "lyon/errors.hpp"
#include "lyon/harness.hpp"

using namespace lyon;

namespace {

constexpr double kC = 0.8;
constexpr double kRStar = 1.3;
constexpr double kMuMin = 0.4;
constexpr std::size_t kRuns = 2000;
constexpr std::uint64_t kSeed = 20240917;

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail, double seconds) {
  std::printf("%s criterion %d: %s [%s] (%.1f s)\n", ok ? "PASS" : "FAIL", id, what.c_str(),
              detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

void info(const std::string& line) {
  std::printf("INFO  %s\n", line.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

class Stopwatch {
public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::vector<ArmSpec> all_arms() {
  // Arms 3..5 keep the ordering "higher reward rate, higher penalty rate".
  return {ArmSpec::bernoulli(0.4, 0.8, 0.6), ArmSpec::bernoulli(0.6, 0.6, 0.3),
          ArmSpec::bernoulli(0.5, 0.7, 0.35), ArmSpec::bernoulli(0.35, 0.805, 0.7),
          ArmSpec::bernoulli(0.5, 0.85, 0.5)};
}

Instance sec6() {
  const auto arms = all_arms();
  return Instance({arms[0], arms[1]}, kC);
}

std::size_t threads() { return std::max(1u, std::thread::hardware_concurrency()); }

RunConfig config(const Instance& inst, std::vector<PolicySpec> policies, std::vector<double> budgets) {
  RunConfig cfg{inst, std::move(policies), std::move(budgets)};
  cfg.runs = kRuns;
  cfg.master_seed = kSeed;
  cfg.threads = threads();
  return cfg;
}

PolicySpec policy(std::string name, PolicyType type, double v0 = 1.0, double delta0 = 0.5) {
  PolicySpec p;
  p.name = std::move(name);
  p.type = type;
  p.v0 = v0;
  p.delta0 = delta0;
  return p;
}

PolicySpec static_arm(std::size_t k) {
  PolicySpec p = policy("static:" + std::to_string(k + 1), PolicyType::static_arm);
  p.static_arm = k;
  return p;
}

std::vector<AggregateRow> rows_of(const AggregateResult& res, const std::string& name) {
  std::vector<AggregateRow> out;
  for (const AggregateRow& r : res.rows) {
    if (r.policy == name) out.push_back(r);
  }
  return out;
}

std::string series(const std::vector<AggregateRow>& rows,
                   const std::function<double(const AggregateRow&)>& value) {
  std::string s;
  for (const AggregateRow& r : rows) {
    s += (s.empty() ? "" : " ") + fmt("B=%g:", r.budget) + fmt("%.4f", value(r));
  }
  return s;
}

bool decreasing(const std::vector<AggregateRow>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].violation.mean < rows[i - 1].violation.mean)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

void oracle_correctness() {
  Stopwatch clock;
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  int checked = 0;
  while (checked < 200) {
    const std::size_t K = 2 + static_cast<std::size_t>(checked % 4);
    std::vector<ArmSpec> arms;
    double best = 1e300;
    for (std::size_t k = 0; k < K; ++k) {
      const double x = 0.05 + 0.95 * u(rng);
      const double r = u(rng);
      const double y = u(rng);
      arms.push_back(ArmSpec::bernoulli(x, r, y));
      best = std::min(best, y / x);
    }
    const double c = 0.05 + 0.95 * u(rng);
    if (best > c) continue;
    const Instance inst(std::move(arms), c);
    worst = std::max(worst, std::abs(solve_lfp(inst).r_star - solve_lfp_grid(inst, 1e-4).r_star));
    ++checked;
  }
  const OracleSolution sol = solve_lfp(sec6());
  const double seconds = clock.seconds();
  const bool ok = worst <= 1e-3 && std::abs(sol.p_star[0] - 0.391304) <= 1e-5 &&
                  std::abs(sol.r_star - kRStar) <= 1e-6 && seconds < 5.0;
  report(1, ok, "oracle matches grid search; two-arm p* and r*",
         "max |r - r_grid| over 200 instances " + fmt("%.2e", worst) + ", p1* " +
             fmt("%.6f", sol.p_star[0]) + ", r* " + fmt("%.9f", sol.r_star),
         seconds);
}

void wald_band_and_benchmark_violation() {
  Stopwatch clock;
  const Instance inst = sec6();
  const AggregateResult res =
      run_batch(config(inst, {policy("stationary", PolicyType::stationary)}, {100, 500, 2000}));
  const double seconds = clock.seconds();
  bool ok = seconds < 60.0;
  std::string detail;
  for (const AggregateRow& r : res.rows) {
    const double lo = kRStar * r.budget, hi = kRStar * (r.budget + 1.0 / (kMuMin * kMuMin));
    const double m = r.total_reward.mean, se = r.total_reward.se;
    ok = ok && m >= lo - 3 * se && m <= hi + 3 * se;
    detail += fmt("B=%g: ", r.budget) + fmt("%.3f", m) + fmt(" +- %.3f", se) + fmt(" in [%g, ", lo) +
              fmt("%g] ", hi);
  }
  report(2, ok, "stationary p* total reward inside the Wald band", detail, seconds);

  const AggregateRow& big = res.rows.back();
  const double bound = kC / (big.budget * kMuMin * kMuMin);
  report(3, big.violation.mean <= bound + 3 * big.violation.se,
         "stationary p* violation at B=2000 within c/(B mu_min^2) + 3 se",
         fmt("violation %.5f", big.violation.mean) + fmt(" +- %.5f", big.violation.se) +
             fmt(", bound %.5f", bound),
         seconds);
}

void lyoff_convergence() {
  Stopwatch clock;
  const AggregateResult res = run_batch(
      config(sec6(), {policy("lyoff", PolicyType::lyoff)}, {250, 500, 1000, 2000, 4000}));
  const double seconds = clock.seconds();
  const auto rows = rows_of(res, "lyoff");
  const AggregateRow& last = rows.back();
  bool positive = true;
  for (const AggregateRow& r : rows) positive = positive && r.violation.mean > 0.0;
  const bool ok = std::abs(last.reward_rate.mean - kRStar) <= 0.05 && positive && decreasing(rows) &&
                  last.violation.mean < 0.02 && seconds < 120.0;
  report(4, ok, "LyOff rate within 0.05 of r* at B=4000; violation positive, decreasing, < 0.02",
         "rate " + series(rows, [](const AggregateRow& r) { return r.reward_rate.mean; }) +
             "; violation " + series(rows, [](const AggregateRow& r) { return r.violation.mean; }),
         seconds);
}

void lyon_convergence() {
  Stopwatch clock;
  PolicySpec lyon = policy("lyon", PolicyType::lyon);
  const AggregateResult res =
      run_batch(config(sec6(), {lyon}, {250, 500, 1000, 2000, 4000, 8000}));
  const double seconds = clock.seconds();
  const auto rows = rows_of(res, "lyon");
  const AggregateRow& last = rows.back();
  const bool rate_ok = std::abs(last.reward_rate.mean - kRStar) <= 0.07;
  const bool viol_ok = decreasing(rows) && last.violation.mean < 0.03;
  const bool alloc_ok = std::abs(last.allocation[0] - 0.3) <= 0.05;
  report(5, rate_ok && viol_ok && alloc_ok && seconds < 300.0,
         "LyOn rate within 0.07 of r*, violation decreasing and < 0.03, arm-1 share within 0.05 of 0.3 at "
         "B=8000",
         "rate " + series(rows, [](const AggregateRow& r) { return r.reward_rate.mean; }) +
             "; violation " + series(rows, [](const AggregateRow& r) { return r.violation.mean; }) +
             fmt("; violation se at 8000 %.2e", last.violation.se) +
             fmt("; arm-1 share %.4f", last.allocation[0]),
         seconds);
}

void negative_violation_regime() {
  Stopwatch clock;
  const AggregateResult res =
      run_batch(config(sec6(), {policy("lyon", PolicyType::lyon, 1.0, 15.0)}, {8000}));
  const double seconds = clock.seconds();
  const AggregateRow& r = res.rows[0];
  const ScheduledParams s = param_schedule(8000, 1.0, 15.0, ScheduleKind::lyon, kC);
  const bool ok = r.violation.mean - 2 * r.violation.se <= 0.0 && r.reward_rate.mean > 1.15;
  report(6, ok, "LyOn with delta0=15: violation <= 0 within 2 se and rate > 1.15 at B=8000",
         fmt("violation %.4f", r.violation.mean) + fmt(" +- %.4f", r.violation.se) +
             fmt(", rate %.4f", r.reward_rate.mean) + fmt(", delta %.4f", s.delta) +
             fmt(", c - delta %.4f", kC - s.delta),
         seconds);
}

void scaling_and_dichotomy() {
  Stopwatch clock;
  const std::vector<double> grid = {500, 1000, 2000, 4000, 8000, 16000};
  // v0 and delta0 chosen inside the admissible region of the regret bound:
  // delta0 > r_max v0 / epsilon, delta < c and c - delta >= min_k E[Y_k] on the grid.
  const double v0 = 0.2, delta0 = 2.5;
  const AggregateResult res = run_batch(config(
      sec6(),
      {policy("lyon", PolicyType::lyon, v0, delta0), policy("lyoff", PolicyType::lyoff, v0, delta0),
       static_arm(0), static_arm(1)},
      grid));
  const AggregateResult defaults = run_batch(config(
      sec6(), {policy("lyon", PolicyType::lyon), policy("lyoff", PolicyType::lyoff)}, grid));
  const double seconds = clock.seconds();

  const auto lyon = rows_of(res, "lyon"), lyoff = rows_of(res, "lyoff");
  const auto arm1 = rows_of(res, "static:1"), arm2 = rows_of(res, "static:2");
  const double s_on = sweep_scaling(lyon).loglog_slope;
  const double s_off = sweep_scaling(lyoff).loglog_slope;
  const double s_arm2 = sweep_scaling(arm2).loglog_slope;
  const bool ok7 = s_on <= 0.75 && s_off <= 0.75 && s_arm2 >= 0.9;
  auto regret = [](const AggregateRow& r) { return r.regret.mean; };
  report(7, ok7, "log-log regret slope <= 0.75 for LyOn and LyOff, >= 0.9 for always-arm-2",
         fmt("v0=%g", v0) + fmt(" delta0=%g", delta0) + fmt("; LyOn slope %.3f", s_on) +
             fmt(", LyOff slope %.3f", s_off) + fmt(", arm-2 slope %.3f", s_arm2) +
             "; LyOn regret " + series(lyon, regret) + "; LyOff regret " + series(lyoff, regret),
         seconds);
  for (const std::string name : {"lyon", "lyoff"}) {
    const auto rows = rows_of(defaults, name);
    info(name + " at v0=1, delta0=0.5: slope " + fmt("%.3f", sweep_scaling(rows).loglog_slope) +
         ", regret " + series(rows, regret));
  }

  bool arm1_ok = true;
  for (const AggregateRow& r : arm1) arm1_ok = arm1_ok && r.violation.mean > 0.1;
  // Least-squares slope of mean regret against B.
  double mb = 0, mr = 0;
  for (const AggregateRow& r : arm2) {
    mb += r.budget;
    mr += r.regret.mean;
  }
  mb /= static_cast<double>(arm2.size());
  mr /= static_cast<double>(arm2.size());
  double sbr = 0, sbb = 0;
  for (const AggregateRow& r : arm2) {
    sbr += (r.budget - mb) * (r.regret.mean - mr);
    sbb += (r.budget - mb) * (r.budget - mb);
  }
  const double per_unit = sbr / sbb;
  report(8, arm1_ok && std::abs(per_unit - 0.3) <= 0.06,
         "always-arm-1 violation > 0.1 at every B; always-arm-2 regret slope 0.3 +- 20%",
         "arm-1 violation " + series(arm1, [](const AggregateRow& r) { return r.violation.mean; }) +
             fmt("; arm-2 regret per unit budget %.4f", per_unit),
         seconds);
}

bool queue_fuzz() {
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  QueueState s(0.0, kC, 0.05);
  for (int i = 0; i < 1000000; ++i) {
    const double before = s.q;
    s.update(Outcome{i % 9 == 0 ? 1.0 : u(rng), 0.0, i % 11 == 0 ? 1.0 : u(rng)});
    if (!(s.q >= 0.0) || std::abs(s.q - before) > 1.0) return false;
  }
  return true;
}

bool zero_queue_coincidence() {
  const Instance inst({ArmSpec::bernoulli(0.4, 0.8, 0.0), ArmSpec::bernoulli(0.6, 0.6, 0.0),
                       ArmSpec::scaled_uniform(0.5, 0.75, 0.0)},
                      kC);
  LyParams p;
  p.V = param_schedule(2000, 1.0, 0.5, ScheduleKind::lyon, kC).V;
  p.delta = 0.05;
  for (std::uint64_t run = 0; run < 100; ++run) {
    LyOnPolicy lyon(3, kC, p, false), ucb(3, kC, p, true);
    RandomStream rng = make_stream(kSeed, run);
    for (int n = 0; n < 4000; ++n) {
      const std::size_t a = lyon.select(rng);
      if (lyon.queue_value() != 0.0 || a != ucb.select(rng)) return false;
      const Outcome o = inst.arm(a).sample(rng);
      lyon.observe(a, o);
      ucb.observe(a, o);
    }
  }
  return true;
}

bool radius_monotone() {
  for (std::size_t n = 1; n <= 2000; n += 7) {
    for (std::size_t t = 1; t <= 2000; t += 13) {
      if (confidence_radius(t + 1, n, 2.0) > confidence_radius(t, n, 2.0)) return false;
      if (confidence_radius(t, n + 1, 2.0) < confidence_radius(t, n, 2.0)) return false;
    }
  }
  return true;
}

bool csv_reproducible() {
  const auto dir = std::filesystem::temp_directory_path() / "lyon_acceptance";
  std::filesystem::create_directories(dir);
  const auto cfg = dir / "config.json";
  std::ofstream(cfg) << R"({
    "instance": {"c": 0.8, "arms": [
      {"x_mean": 0.4, "r_mean": 0.8, "y_mean": 0.6},
      {"x_mean": 0.6, "r_mean": 0.6, "y_mean": 0.3}]},
    "policies": [{"type": "lyon"}, {"type": "lyoff"}, {"type": "ucb_bwi"}, {"type": "stationary"}],
    "budgets": [200, 800], "runs": 200, "seed": 5})";
  std::ostringstream sink;
  const std::string a = (dir / "a.csv").string(), b = (dir / "b.csv").string();
  if (cli::run({"run", "--config", cfg.string(), "--out", a, "--threads", "1"}, sink, sink) != 0) {
    return false;
  }
  if (cli::run({"run", "--config", cfg.string(), "--out", b, "--threads", "3"}, sink, sink) != 0) {
    return false;
  }
  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  };
  return !slurp(a).empty() && slurp(a) == slurp(b);
}

// Fraction of episodes in which every post-exploration index from epoch
// `from_epoch` on lies below the true drift-plus-penalty ratio at the
// current queue value.
double lcb_coverage(double budget, std::size_t episodes, std::size_t from_epoch = 1) {
  const Instance inst = sec6();
  const ScheduledParams s = param_schedule(budget, 1.0, 0.5, ScheduleKind::lyon, kC);
  LyParams p;
  p.V = s.V;
  p.delta = s.delta;
  p.denominator_floor = std::max(1.0 / budget, 1e-6);
  std::size_t covered = 0;
  for (std::size_t i = 0; i < episodes; ++i) {
    RandomStream rng = make_stream(kSeed + 1, i);
    LyOnPolicy policy(2, kC, p);
    double cost = 0.0;
    bool ok = true;
    while (cost <= budget) {
      if (ok && !policy.exploring() && policy.epoch() >= from_epoch) {
        const std::vector<double> idx = policy.indices();
        for (std::size_t k = 0; k < idx.size(); ++k) {
          if (idx[k] > psi_offline(k, policy.queue_value(), p.V, inst)) ok = false;
        }
      }
      const std::size_t k = policy.select(rng);
      const Outcome o = inst.arm(k).sample(rng);
      policy.observe(k, o);
      cost += o.x;
    }
    covered += ok;
  }
  return static_cast<double>(covered) / static_cast<double>(episodes);
}

// Mean one-step queue change over LyOff steps taken while Q >= V r_max / epsilon.
double high_queue_drift(double budget, std::size_t episodes) {
  const Instance inst = sec6();
  const Bounds b = derive_bounds(inst);
  const ScheduledParams s = param_schedule(budget, 1.0, 0.5, ScheduleKind::lyoff, kC);
  const double threshold = s.V * b.r_max / b.epsilon;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < episodes; ++i) {
    RandomStream rng = make_stream(kSeed + 2, i);
    LyOffPolicy policy(inst, s.V, s.delta, 1.5 * threshold);
    double cost = 0.0;
    while (cost <= budget) {
      const double q = policy.queue_value();
      const std::size_t k = policy.select(rng);
      const Outcome o = inst.arm(k).sample(rng);
      policy.observe(k, o);
      cost += o.x;
      if (q >= threshold) {
        sum += policy.queue_value() - q;
        ++count;
      }
    }
  }
  return count ? sum / static_cast<double>(count) : std::nan("");
}

double stopping_tail(double budget, std::size_t episodes) {
  const Instance inst = sec6();
  const OracleSolution oracle = solve_lfp(inst);
  const std::size_t limit = static_cast<std::size_t>(std::ceil(2.0 * budget / kMuMin));
  std::size_t over = 0;
  for (std::size_t i = 0; i < episodes; ++i) {
    RandomStream rng = make_stream(kSeed + 3, i);
    auto p = make_policy(policy("lyon", PolicyType::lyon), inst, budget, oracle);
    over += run_episode(inst, *p, budget, rng).n_pulls >= limit;
  }
  return static_cast<double>(over) / static_cast<double>(episodes);
}

void invariant_suites() {
  Stopwatch clock;
  const bool fuzz = queue_fuzz();
  const bool coincide = zero_queue_coincidence();
  const bool radius = radius_monotone();
  const bool determinism = csv_reproducible();
  const double coverage = lcb_coverage(2000, 1000);
  info(fmt("LCB coverage counting epochs n >= 10 only: %.3f", lcb_coverage(2000, 1000, 10)));
  const double drift = high_queue_drift(2000, 1000);
  const double tail = std::max(stopping_tail(50, 1000), stopping_tail(1000, 1000));
  const bool ok = fuzz && coincide && radius && determinism && coverage >= 0.95 && drift < 0.0 &&
                  tail < 0.01;
  auto yn = [](bool b) { return std::string(b ? "ok" : "broken"); };
  report(9, ok, "queue fuzz, zero-queue coincidence, radius monotonicity, determinism, LCB coverage",
         "queue " + yn(fuzz) + ", coincidence " + yn(coincide) + ", radius " + yn(radius) +
             ", csv bytes " + yn(determinism) + fmt(", coverage %.3f", coverage) +
             fmt(", high-queue drift %.4f", drift) + fmt(", stopping tail %.4f", tail),
         clock.seconds());
}

void more_arms() {
  Stopwatch clock;
  const auto arms = all_arms();
  bool ok = true;
  std::string detail;
  for (std::size_t K = 2; K <= 5; ++K) {
    const Instance inst(std::vector<ArmSpec>(arms.begin(), arms.begin() + static_cast<long>(K)), kC);
    const AggregateResult res = run_batch(config(inst, {policy("lyon", PolicyType::lyon)}, {8000}));
    const double rate = res.rows[0].reward_rate.mean;
    ok = ok && std::abs(rate - res.r_star) <= 0.07;
    detail += fmt("K=%g: ", static_cast<double>(K)) + fmt("rate %.4f", rate) +
              fmt(" r* %.4f", res.r_star) + fmt(" violation %.4f; ", res.rows[0].violation.mean);
  }
  report(10, ok, "LyOn rate within 0.07 of r* at B=8000 for K = 2..5", detail, clock.seconds());
}

}  // namespace

int main() {
  std::printf("acceptance suite: %zu runs per cell, seed %llu, %zu threads\n", kRuns,
              static_cast<unsigned long long>(kSeed), threads());
  try {
    oracle_correctness();
    wald_band_and_benchmark_violation();
    lyoff_convergence();
    lyon_convergence();
    negative_violation_regime();
    scaling_and_dichotomy();
    invariant_suites();
    more_arms();
  } catch (const std::exception& e) {
    std::printf("FAIL acceptance suite aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d criteria failed\n", failures);
  return failures ? 1 : 0;
}
