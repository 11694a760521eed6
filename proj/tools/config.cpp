#include "config.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace lyon::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError("missing '" + std::string(key) + "' in " + where);
  return obj.at(key);
}

double number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ConfigError(what + " must be a number");
  return v.get<double>();
}

double unit_number(const json& v, const std::string& what) {
  const double d = number(v, what);
  if (!(d >= 0.0 && d <= 1.0)) throw ConfigError(what + " must lie in [0, 1]");
  return d;
}

std::uint64_t count(const json& v, const std::string& what, std::uint64_t min) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < static_cast<std::int64_t>(min)) {
    throw ConfigError(what + " must be an integer >= " + std::to_string(min));
  }
  return v.get<std::uint64_t>();
}

ArmSpec parse_arm(const json& a, std::size_t index) {
  const std::string where = "arm " + std::to_string(index + 1);
  if (!a.is_object()) throw ConfigError(where + " must be an object");
  reject_unknown(a, {"kind", "x_mean", "r_mean", "y_mean", "atoms"}, where);
  const std::string kind = a.value("kind", std::string("bernoulli"));

  if (kind == "joint_discrete_table") {
    const json& atoms = require(a, "atoms", where);
    if (!atoms.is_array() || atoms.empty()) throw ConfigError(where + ": atoms must be a non-empty array");
    std::vector<Atom> table;
    for (const json& row : atoms) {
      if (!row.is_array() || row.size() != 4) {
        throw ConfigError(where + ": each atom is [x, r, y, prob]");
      }
      table.push_back(Atom{{unit_number(row[0], where + " atom x"), unit_number(row[1], where + " atom r"),
                            unit_number(row[2], where + " atom y")},
                           unit_number(row[3], where + " atom prob")});
    }
    try {
      return ArmSpec::joint_table(std::move(table));
    } catch (const InvalidArgument& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }

  const double x = unit_number(require(a, "x_mean", where), where + " x_mean");
  const double r = unit_number(require(a, "r_mean", where), where + " r_mean");
  const double y = unit_number(require(a, "y_mean", where), where + " y_mean");
  if (kind == "bernoulli" || kind == "independent_bernoulli") return ArmSpec::bernoulli(x, r, y);
  if (kind == "scaled_uniform" || kind == "independent_scaled_uniform") {
    return ArmSpec::scaled_uniform(x, r, y);
  }
  throw ConfigError(where + ": unknown kind '" + kind + "'");
}

PolicySpec parse_policy(const json& p, std::size_t index, std::size_t num_arms) {
  const std::string where = "policy " + std::to_string(index + 1);
  if (!p.is_object()) throw ConfigError(where + " must be an object");
  reject_unknown(p, {"name", "type", "v0", "delta0", "alpha", "index_variant", "exploration", "p"},
                 where);
  PolicySpec spec;
  const json& type_field = require(p, "type", where);
  if (!type_field.is_string()) throw ConfigError(where + ": type must be a string");
  const std::string type = type_field.get<std::string>();
  if (type == "stationary") {
    spec.type = PolicyType::stationary;
  } else if (type == "lyoff") {
    spec.type = PolicyType::lyoff;
  } else if (type == "lyon") {
    spec.type = PolicyType::lyon;
  } else if (type == "ucb_bwi") {
    spec.type = PolicyType::ucb_bwi;
  } else if (type.rfind("static:", 0) == 0) {
    spec.type = PolicyType::static_arm;
    std::size_t k = 0;
    try {
      std::size_t used = 0;
      k = std::stoul(type.substr(7), &used);
      if (used != type.size() - 7) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError(where + ": malformed static arm in '" + type + "'");
    }
    if (k < 1 || k > num_arms) throw ConfigError(where + ": static arm out of range");
    spec.static_arm = k - 1;
  } else {
    throw ConfigError(where + ": unknown type '" + type + "'");
  }
  spec.name = p.contains("name") ? p.at("name").get<std::string>() : type;

  if (p.contains("v0")) spec.v0 = number(p.at("v0"), where + " v0");
  if (p.contains("delta0")) spec.delta0 = number(p.at("delta0"), where + " delta0");
  if (p.contains("alpha")) spec.alpha = number(p.at("alpha"), where + " alpha");
  if (!(spec.v0 > 0.0)) throw ConfigError(where + ": v0 must be positive");
  if (!(spec.delta0 >= 0.0)) throw ConfigError(where + ": delta0 must be nonnegative");
  if (!(spec.alpha > 0.0)) throw ConfigError(where + ": alpha must be positive");

  if (p.contains("index_variant")) {
    const std::string v = p.at("index_variant").get<std::string>();
    if (v == "lcb_both") {
      spec.index_variant = IndexVariant::lcb_both;
    } else if (v == "literal_paper") {
      spec.index_variant = IndexVariant::literal_paper;
    } else {
      throw ConfigError(where + ": unknown index_variant '" + v + "'");
    }
  }
  if (p.contains("exploration")) {
    const json& e = p.at("exploration");
    if (e.is_string() && e.get<std::string>() == "theoretical") {
      spec.exploration_mode = ExplorationMode::theoretical;
    } else {
      spec.exploration_mode = ExplorationMode::fixed;
      spec.exploration_pulls = count(e, where + " exploration", 1);
    }
  }
  if (p.contains("p")) {
    if (spec.type != PolicyType::stationary) throw ConfigError(where + ": only stationary takes p");
    const json& arr = p.at("p");
    if (!arr.is_array() || arr.size() != num_arms) {
      throw ConfigError(where + ": p must have one entry per arm");
    }
    std::vector<double> probs;
    for (const json& v : arr) probs.push_back(number(v, where + " p"));
    try {
      SimplexDist check(probs);
    } catch (const InvalidArgument& e) {
      throw ConfigError(where + ": " + e.what());
    }
    spec.p = std::move(probs);
  }
  return spec;
}

}  // namespace

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc, {"instance", "policies", "budgets", "runs", "seed"}, "config");

  const json& inst = require(doc, "instance", "config");
  if (!inst.is_object()) throw ConfigError("instance must be an object");
  reject_unknown(inst, {"arms", "c"}, "instance");
  const double c = number(require(inst, "c", "instance"), "c");
  if (!(c > 0.0 && c <= 1.0)) throw ConfigError("c must lie in (0, 1]");
  const json& arms = require(inst, "arms", "instance");
  if (!arms.is_array() || arms.empty()) throw ConfigError("instance.arms must be a non-empty array");
  std::vector<ArmSpec> specs;
  for (std::size_t k = 0; k < arms.size(); ++k) {
    try {
      specs.push_back(parse_arm(arms[k], k));
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }

  std::optional<Instance> instance;
  try {
    instance.emplace(std::move(specs), c);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }

  RunConfig cfg{*instance, {}, {}};
  const json& policies = require(doc, "policies", "config");
  if (!policies.is_array() || policies.empty()) {
    throw ConfigError("policies must be a non-empty array");
  }
  for (std::size_t i = 0; i < policies.size(); ++i) {
    cfg.policies.push_back(parse_policy(policies[i], i, cfg.instance.num_arms()));
  }

  const json& budgets = require(doc, "budgets", "config");
  if (!budgets.is_array() || budgets.empty()) throw ConfigError("budgets must be a non-empty array");
  for (const json& b : budgets) {
    const double v = number(b, "budget");
    if (!(v > 1.0)) throw ConfigError("budgets must exceed 1");
    cfg.budgets.push_back(v);
  }
  if (doc.contains("runs")) cfg.runs = count(doc.at("runs"), "runs", 1);
  if (doc.contains("seed")) cfg.master_seed = count(doc.at("seed"), "seed", 0);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in '" + path.string() + "': " + e.what());
  }
  try {
    return parse_config(doc);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string csv_header(std::size_t num_arms) {
  std::string h =
      "policy,B,runs,mean_reward_rate,se_reward_rate,mean_violation,se_violation,"
      "mean_regret,se_regret,mean_n_pulls,cap_hits";
  for (std::size_t k = 1; k <= num_arms; ++k) h += ",alloc_" + std::to_string(k);
  return h;
}

std::string run_csv(const AggregateResult& result, std::size_t num_arms) {
  std::ostringstream out;
  out << csv_header(num_arms) << '\n';
  for (const AggregateRow& row : result.rows) {
    out << row.policy << ',' << format_number(row.budget) << ',' << row.runs << ','
        << format_number(row.reward_rate.mean) << ',' << format_number(row.reward_rate.se) << ','
        << format_number(row.violation.mean) << ',' << format_number(row.violation.se) << ','
        << format_number(row.regret.mean) << ',' << format_number(row.regret.se) << ','
        << format_number(row.mean_n_pulls) << ',' << row.cap_hits;
    for (double a : row.allocation) out << ',' << format_number(a);
    out << '\n';
  }
  return out.str();
}

std::string scaling_csv(const std::vector<ScalingReport>& reports) {
  std::ostringstream out;
  out << "policy,B,mean_regret,mean_violation,normalized_regret,normalized_violation,loglog_slope\n";
  for (const ScalingReport& rep : reports) {
    for (const ScalingRow& row : rep.rows) {
      out << rep.policy << ',' << format_number(row.budget) << ',' << format_number(row.mean_regret)
          << ',' << format_number(row.mean_violation) << ',' << format_number(row.normalized_regret)
          << ',' << format_number(row.normalized_violation) << ','
          << format_number(rep.loglog_slope) << '\n';
    }
  }
  return out.str();
}

json to_json(const OracleSolution& sol) {
  json support = json::array();
  for (std::size_t k : sol.support) support.push_back(k + 1);
  return json{{"p_star", std::vector<double>(sol.p_star.probs().begin(), sol.p_star.probs().end())},
              {"r_star", sol.r_star},
              {"y_star", sol.y_star},
              {"support", support}};
}

json to_json(const AggregateResult& result) {
  json rows = json::array();
  for (const AggregateRow& row : result.rows) {
    rows.push_back({{"policy", row.policy},
                    {"B", row.budget},
                    {"runs", row.runs},
                    {"mean_reward_rate", row.reward_rate.mean},
                    {"se_reward_rate", row.reward_rate.se},
                    {"mean_violation", row.violation.mean},
                    {"se_violation", row.violation.se},
                    {"mean_regret", row.regret.mean},
                    {"se_regret", row.regret.se},
                    {"mean_n_pulls", row.mean_n_pulls},
                    {"cap_hits", row.cap_hits},
                    {"allocation", row.allocation},
                    {"pull_share", row.pull_share}});
  }
  return json{{"r_star", result.r_star},
              {"regret_benchmark", "r_star * B (optimal stationary randomized policy)"},
              {"rows", rows}};
}

}  // namespace lyon::cli
