#pragma once

// JSON experiment configuration and CSV/JSON result encoding.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lyon/errors.hpp"
#include "lyon/harness.hpp"

namespace lyon::cli {

class ConfigError : public Error {
public:
  using Error::Error;
};

/// Schema:
///   { "instance": { "c": <(0,1]>,
///                   "arms": [ { "kind": "bernoulli" | "scaled_uniform" | "joint_discrete_table",
///                               "x_mean", "r_mean", "y_mean": <[0,1]>,
///                               "atoms": [[x, r, y, prob], ...] } ] },
///     "policies": [ { "name", "type": "stationary" | "lyoff" | "lyon" | "ucb_bwi" | "static:<k>",
///                     "v0", "delta0", "alpha", "index_variant": "lcb_both" | "literal_paper",
///                     "exploration": <int >= 1> | "theoretical", "p": [...] } ],
///     "budgets": [ ... ], "runs": <int >= 1>, "seed": <u64> }
/// Unknown keys are rejected. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

/// %.9g
std::string format_number(double v);

/// policy,B,runs,mean_reward_rate,...,cap_hits,alloc_1..alloc_K
std::string csv_header(std::size_t num_arms);
std::string run_csv(const AggregateResult& result, std::size_t num_arms);
std::string scaling_csv(const std::vector<ScalingReport>& reports);

nlohmann::json to_json(const OracleSolution& sol);
nlohmann::json to_json(const AggregateResult& result);

}  // namespace lyon::cli
