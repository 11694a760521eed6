#pragma once

// Rates of stationary randomized policies and the linear-fractional program
// whose solution p* is the benchmark every learning policy is measured
// against.

#include <cstddef>
#include <span>
#include <vector>

#include "lyon/model.hpp"

namespace lyon {

/// Absolute slack allowed on y(p) <= c.
inline constexpr double kFeasibilityTol = 1e-9;

/// Probability vector over the K arms.
class SimplexDist {
public:
  /// Throws InvalidArgument unless every entry is >= 0 and the sum is 1 +- 1e-12.
  explicit SimplexDist(std::vector<double> p);

  static SimplexDist vertex(std::size_t num_arms, std::size_t k);
  static SimplexDist uniform(std::size_t num_arms);

  std::size_t size() const noexcept { return p_.size(); }
  double operator[](std::size_t k) const { return p_[k]; }
  std::span<const double> probs() const noexcept { return p_; }

private:
  std::vector<double> p_;
};

struct OracleSolution {
  SimplexDist p_star;
  double r_star = 0.0;
  double y_star = 0.0;
  std::vector<std::size_t> support;
};

/// r(p) = sum p_k E[R_k] / sum p_k E[X_k]
double reward_rate(const SimplexDist& p, const Instance& instance);
/// y(p) = sum p_k E[Y_k] / sum p_k E[X_k]
double penalty_rate(const SimplexDist& p, const Instance& instance);

/// Exact maximiser of r(p) subject to y(p) <= c.
///
/// One ratio objective and one ratio constraint over the simplex leave an
/// optimum supported on at most two arms, so it suffices to enumerate every
/// feasible vertex and, for every pair of arms on opposite sides of the
/// constraint, the unique mixture that makes it tight. Equal values are
/// resolved toward the lowest first arm index, then the smallest weight on
/// the second arm (pure arms beat mixtures). Throws Infeasible.
OracleSolution solve_lfp(const Instance& instance);

/// Brute-force reference for solve_lfp that relies on no structural
/// property of the optimum: the simplex is recursively bisected down to
/// cells whose edges are no longer than `step`, and the best feasible cell
/// vertex is returned. A cell is discarded only when none of its vertices is
/// feasible or none beats the incumbent; both rules are exact for a
/// linear-fractional objective and a linear constraint, so the answer equals
/// the best feasible point of the full dyadic grid. Throws Infeasible.
OracleSolution solve_lfp_grid(const Instance& instance, double step);

struct RewardBand {
  double low = 0.0;
  double high = 0.0;
};

/// [r(p) B, r(p) (B + 1 / mu_min^2)], the bracket on the expected total
/// reward of the stationary policy pi(p) run to budget B.
RewardBand wald_interval(const SimplexDist& p, const Instance& instance, double budget);

}  // namespace lyon
