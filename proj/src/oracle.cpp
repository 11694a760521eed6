#include "lyon/oracle.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "lyon/errors.hpp"

namespace lyon {

SimplexDist::SimplexDist(std::vector<double> p) : p_(std::move(p)) {
  if (p_.empty()) throw InvalidArgument("simplex distribution needs at least one entry");
  double total = 0.0;
  for (double v : p_) {
    if (!(v >= 0.0)) throw InvalidArgument("simplex distribution has a negative entry");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidArgument("simplex distribution sums to " + std::to_string(total));
  }
}

SimplexDist SimplexDist::vertex(std::size_t num_arms, std::size_t k) {
  std::vector<double> p(num_arms, 0.0);
  p.at(k) = 1.0;
  return SimplexDist(std::move(p));
}

SimplexDist SimplexDist::uniform(std::size_t num_arms) {
  return SimplexDist(std::vector<double>(num_arms, 1.0 / static_cast<double>(num_arms)));
}

namespace {

struct MixMeans {
  double x = 0.0;
  double r = 0.0;
  double y = 0.0;
};

MixMeans mix(std::span<const double> p, const Instance& instance) {
  if (p.size() != instance.num_arms()) {
    throw InvalidArgument("distribution size does not match the number of arms");
  }
  MixMeans m;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const Means& a = instance.means(k);
    m.x += p[k] * a.x;
    m.r += p[k] * a.r;
    m.y += p[k] * a.y;
  }
  return m;
}

bool feasible(double y, double c) { return y <= c + kFeasibilityTol; }

std::vector<std::size_t> support_of(std::span<const double> p) {
  std::vector<std::size_t> s;
  for (std::size_t k = 0; k < p.size(); ++k) {
    if (p[k] > 0.0) s.push_back(k);
  }
  return s;
}

OracleSolution make_solution(std::vector<double> p, const Instance& instance) {
  SimplexDist dist(std::move(p));
  OracleSolution sol{dist, reward_rate(dist, instance), penalty_rate(dist, instance),
                     support_of(dist.probs())};
  return sol;
}

struct Candidate {
  std::size_t first = 0;
  std::size_t second = 0;
  double second_weight = 0.0;  // mass on `second`; 0 for a pure arm
  double value = -std::numeric_limits<double>::infinity();
};

bool better(const Candidate& a, const Candidate& b) {
  const double tol = 1e-12 * std::max(1.0, std::abs(b.value));
  if (a.value > b.value + tol) return true;
  if (a.value < b.value - tol) return false;
  if (a.first != b.first) return a.first < b.first;
  return a.second_weight < b.second_weight;
}

}  // namespace

double reward_rate(const SimplexDist& p, const Instance& instance) {
  const MixMeans m = mix(p.probs(), instance);
  return m.r / m.x;
}

double penalty_rate(const SimplexDist& p, const Instance& instance) {
  const MixMeans m = mix(p.probs(), instance);
  return m.y / m.x;
}

OracleSolution solve_lfp(const Instance& instance) {
  const std::size_t K = instance.num_arms();
  const double c = instance.c();

  bool found = false;
  Candidate best;
  auto offer = [&](const Candidate& cand) {
    if (!found || better(cand, best)) {
      best = cand;
      found = true;
    }
  };

  for (std::size_t k = 0; k < K; ++k) {
    if (feasible(instance.arm_penalty_rate(k), c)) {
      offer(Candidate{k, k, 0.0, instance.arm_reward_rate(k)});
    }
  }

  // Constraint slack per unit of probability: g_k = E[Y_k] - c E[X_k].
  std::vector<double> slack(K);
  for (std::size_t k = 0; k < K; ++k) {
    slack[k] = instance.means(k).y - c * instance.means(k).x;
  }
  for (std::size_t j = 0; j < K; ++j) {
    for (std::size_t k = j + 1; k < K; ++k) {
      if (!((slack[j] < 0.0 && slack[k] > 0.0) || (slack[j] > 0.0 && slack[k] < 0.0))) {
        continue;
      }
      // w g_j + (1 - w) g_k = 0, weight w on j.
      const double w = slack[k] / (slack[k] - slack[j]);
      if (!(w > 0.0 && w < 1.0)) continue;
      const Means& a = instance.means(j);
      const Means& b = instance.means(k);
      const double mx = w * a.x + (1.0 - w) * b.x;
      const double my = w * a.y + (1.0 - w) * b.y;
      if (!feasible(my / mx, c)) continue;
      const double mr = w * a.r + (1.0 - w) * b.r;
      offer(Candidate{j, k, 1.0 - w, mr / mx});
    }
  }

  if (!found) {
    throw Infeasible("no arm or mixture of two arms satisfies y(p) <= c = " + std::to_string(c));
  }

  std::vector<double> p(K, 0.0);
  p[best.first] = 1.0 - best.second_weight;
  if (best.second != best.first) p[best.second] = best.second_weight;
  return make_solution(std::move(p), instance);
}

namespace {

// Cell vertices live in a shared pool; a cell is K indices into it. Mixture
// means are linear in p, so a midpoint's means are the average of its
// endpoints' and every vertex is evaluated exactly once.
class GridSearch {
public:
  GridSearch(const Instance& instance, double step)
      : instance_(instance), K_(instance.num_arms()), step2_(step * step) {}

  void run() {
    std::vector<std::uint32_t> stack;
    for (std::size_t k = 0; k < K_; ++k) {
      std::vector<double> p(K_, 0.0);
      p[k] = 1.0;
      const Means& m = instance_.means(k);
      stack.push_back(add_vertex(p.data(), MixMeans{m.x, m.r, m.y}));
    }
    if (K_ == 1) return;

    std::vector<std::uint32_t> cell(K_);
    std::vector<double> mid(K_);
    while (!stack.empty()) {
      std::copy(stack.end() - static_cast<std::ptrdiff_t>(K_), stack.end(), cell.begin());
      stack.resize(stack.size() - K_);

      bool any_feasible = false;
      double bound = -std::numeric_limits<double>::infinity();
      for (std::uint32_t v : cell) {
        any_feasible = any_feasible || vertices_[v].feasible;
        bound = std::max(bound, vertices_[v].r);
      }
      // max of r and min of y over a cell are both attained at vertices
      if (!any_feasible) continue;
      if (have_incumbent_ && bound <= vertices_[incumbent_].r) continue;

      std::size_t ia = 0, ib = 1;
      double longest = -1.0;
      for (std::size_t a = 0; a < K_; ++a) {
        const double* pa = coords(cell[a]);
        for (std::size_t b = a + 1; b < K_; ++b) {
          const double* pb = coords(cell[b]);
          double d2 = 0.0;
          for (std::size_t k = 0; k < K_; ++k) d2 += (pa[k] - pb[k]) * (pa[k] - pb[k]);
          if (d2 > longest) {
            longest = d2;
            ia = a;
            ib = b;
          }
        }
      }
      if (longest <= step2_) continue;

      const Vertex& va = vertices_[cell[ia]];
      const Vertex& vb = vertices_[cell[ib]];
      const MixMeans mm{0.5 * (va.x + vb.x), 0.5 * (va.r_sum + vb.r_sum), 0.5 * (va.y + vb.y)};
      const double* pa = coords(cell[ia]);
      const double* pb = coords(cell[ib]);
      for (std::size_t k = 0; k < K_; ++k) mid[k] = 0.5 * (pa[k] + pb[k]);
      const std::uint32_t m = add_vertex(mid.data(), mm);

      // Child keeping the better endpoint goes on top.
      const bool a_first = vertices_[cell[ia]].r >= vertices_[cell[ib]].r;
      const std::size_t drop_first = a_first ? ib : ia;
      const std::size_t drop_second = a_first ? ia : ib;
      for (std::size_t i = 0; i < K_; ++i) stack.push_back(i == drop_second ? m : cell[i]);
      for (std::size_t i = 0; i < K_; ++i) stack.push_back(i == drop_first ? m : cell[i]);
    }
  }

  bool found() const { return have_incumbent_; }

  std::vector<double> best_point() const {
    const double* p = coords(incumbent_);
    return std::vector<double>(p, p + K_);
  }

private:
  struct Vertex {
    double x;
    double r_sum;
    double y;
    double r;
    bool feasible;
  };

  const double* coords(std::uint32_t v) const { return &coords_[static_cast<std::size_t>(v) * K_]; }

  std::uint32_t add_vertex(const double* p, const MixMeans& m) {
    const auto id = static_cast<std::uint32_t>(vertices_.size());
    vertices_.push_back(Vertex{m.x, m.r, m.y, m.r / m.x, feasible(m.y / m.x, instance_.c())});
    coords_.insert(coords_.end(), p, p + K_);
    const Vertex& v = vertices_.back();
    if (v.feasible && (!have_incumbent_ || v.r > vertices_[incumbent_].r)) {
      have_incumbent_ = true;
      incumbent_ = id;
    }
    return id;
  }

  const Instance& instance_;
  std::size_t K_;
  double step2_;
  std::vector<Vertex> vertices_;
  std::vector<double> coords_;
  bool have_incumbent_ = false;
  std::uint32_t incumbent_ = 0;
};

}  // namespace

OracleSolution solve_lfp_grid(const Instance& instance, double step) {
  if (!(step > 0.0 && step <= 1.0)) throw InvalidArgument("grid step must lie in (0, 1]");
  GridSearch search(instance, step);
  search.run();
  if (!search.found()) {
    throw Infeasible("no grid point satisfies y(p) <= c = " + std::to_string(instance.c()));
  }
  std::vector<double> p = search.best_point();
  for (double& v : p) v = std::max(v, 0.0);
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  for (double& v : p) v /= total;
  return make_solution(std::move(p), instance);
}

RewardBand wald_interval(const SimplexDist& p, const Instance& instance, double budget) {
  if (!(budget > 0.0)) throw InvalidArgument("budget must be positive");
  double mu_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < instance.num_arms(); ++k) {
    mu_min = std::min(mu_min, instance.means(k).x);
  }
  const double r = reward_rate(p, instance);
  return {r * budget, r * (budget + 1.0 / (mu_min * mu_min))};
}

}  // namespace lyon
