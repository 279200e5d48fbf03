#include "ibandit/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ibandit/criteo.hpp"

extern char** environ;

namespace ibandit {

namespace {

const std::vector<std::string> kKnownKeys = {
    "policy",        "m",
    "T",             "reps",
    "seed",          "jobs",
    "out",           "strict",
    "b0",            "gamma",
    "rewards",       "rewards.means",
    "rewards.stdev", "rewards.uplift_n",
    "rewards.manifest", "cost",
    "cost.value",    "cost.a",
    "cost.b",        "population",
    "population.size", "arp.lambda",
    "arp.tau",       "arp.k",
    "arp.margin",    "arp.min_prior_prob",
    "marp.eta",      "marp.full_information",
    "even_dar.c",    "even_dar.delta",
    "log.records",   "log.weights",
    "log.transitions", "log.fairness",
    "sweep.policies", "sweep.m",
    "sweep.cost_values", "sweep.cost_betas",
};

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r\n");
    auto end = s.find_last_not_of(" \t\r\n");
    if (begin == std::string::npos) {
        return "";
    }
    return s.substr(begin, end - begin + 1);
}

void check_known(const std::string& key) {
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end()) {
        throw ValidationError("unknown config key '" + key + "'");
    }
}

}  // namespace

Config Config::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open config file " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
}

Config Config::from_text(const std::string& text) {
    Config cfg;
    std::stringstream ss(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("config line " + std::to_string(line_no) + " is not 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        check_known(key);
        cfg.entries_[key] = value;
    }
    return cfg;
}

void Config::apply_override(const std::string& key, const std::string& value) {
    check_known(key);
    entries_[key] = value;
}

void Config::apply_env_overrides() {
    for (char** env = environ; *env != nullptr; ++env) {
        const std::string kv(*env);
        if (kv.rfind("IBANDIT_", 0) != 0) {
            continue;
        }
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            continue;
        }
        std::string key = kv.substr(8, eq - 8);
        std::transform(key.begin(), key.end(), key.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        std::replace(key.begin(), key.end(), '_', '.');
        // Single-word keys have no dot; restore them.
        if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end()) {
            std::replace(key.begin(), key.end(), '.', '_');
            if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end()) {
                continue;  // unrelated IBANDIT_* variable
            }
        }
        entries_[key] = kv.substr(eq + 1);
    }
}

bool Config::has(const std::string& key) const { return entries_.count(key) > 0; }

std::string Config::get(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        return fallback;
    }
    try {
        return std::stod(it->second);
    } catch (const std::exception&) {
        throw ValidationError("config key '" + key + "' is not numeric: '" + it->second + "'");
    }
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        return fallback;
    }
    try {
        return std::stoll(it->second);
    } catch (const std::exception&) {
        throw ValidationError("config key '" + key + "' is not an integer: '" + it->second + "'");
    }
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        return fallback;
    }
    if (it->second == "true" || it->second == "1" || it->second == "yes") {
        return true;
    }
    if (it->second == "false" || it->second == "0" || it->second == "no") {
        return false;
    }
    throw ValidationError("config key '" + key + "' is not a boolean: '" + it->second + "'");
}

std::vector<std::string> Config::get_list(const std::string& key) const {
    std::vector<std::string> out;
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        return out;
    }
    std::stringstream ss(it->second);
    std::string field;
    while (std::getline(ss, field, ',')) {
        field = trim(field);
        if (!field.empty()) {
            out.push_back(field);
        }
    }
    return out;
}

std::vector<double> Config::get_double_list(const std::string& key) const {
    std::vector<double> out;
    for (const auto& s : get_list(key)) {
        try {
            out.push_back(std::stod(s));
        } catch (const std::exception&) {
            throw ValidationError("config key '" + key + "' holds a non-numeric entry '" + s + "'");
        }
    }
    return out;
}

ExperimentSpec Config::resolve() const {
    std::vector<std::string> problems;
    ExperimentSpec spec;

    const std::string policy = get("policy", "arp");
    if (policy == "arp") {
        spec.policy.kind = PolicySpec::Kind::Arp;
    } else if (policy == "marp") {
        spec.policy.kind = PolicySpec::Kind::Marp;
    } else if (policy == "full_transparency") {
        spec.policy.kind = PolicySpec::Kind::FullTransparency;
    } else if (policy == "first_best_elim") {
        spec.policy.kind = PolicySpec::Kind::FirstBestElim;
    } else if (policy == "even_dar_elim") {
        spec.policy.kind = PolicySpec::Kind::EvenDarElim;
    } else if (policy == "ucb") {
        spec.policy.kind = PolicySpec::Kind::Ucb;
    } else if (policy == "thompson") {
        spec.policy.kind = PolicySpec::Kind::Thompson;
    } else {
        problems.push_back("unknown policy '" + policy + "'");
    }

    spec.rewards.m = static_cast<std::size_t>(get_int("m", 5));
    spec.horizon = get_int("T", 5000);
    spec.replications = static_cast<int>(get_int("reps", 500));
    spec.base_seed = static_cast<std::uint64_t>(get_int("seed", 1));

    const std::string rewards = get("rewards", "gaussian");
    if (rewards == "gaussian") {
        spec.rewards.kind = RewardModel::Kind::TruncGaussian;
    } else if (rewards == "beta_arms") {
        spec.rewards.kind = RewardModel::Kind::BetaArms;
    } else if (rewards == "bernoulli_uplift") {
        spec.rewards.kind = RewardModel::Kind::BernoulliUplift;
    } else if (rewards == "fixed") {
        spec.rewards.kind = RewardModel::Kind::FixedMeans;
    } else {
        problems.push_back("unknown reward model '" + rewards + "'");
    }
    spec.rewards.gaussian_stdev = get_double("rewards.stdev", 0.1);
    spec.rewards.uplift_n = get_int("rewards.uplift_n", 100000);
    if (has("rewards.means")) {
        spec.rewards.fixed_means = get_double_list("rewards.means");
        if (!has("m")) {
            spec.rewards.m = spec.rewards.fixed_means.size();
        }
    }
    if (has("rewards.manifest")) {
        std::ifstream in(get("rewards.manifest", ""));
        if (!in) {
            problems.push_back("cannot open rewards.manifest file");
        } else {
            std::stringstream buf;
            buf << in.rdbuf();
            spec.rewards.fixed_means = criteo::means_from_manifest(buf.str());
            spec.rewards.m = spec.rewards.fixed_means.size();
        }
    }

    const std::string cost = get("cost", "constant");
    try {
        if (cost == "constant") {
            spec.costs = CostModel::constant_cost(get_double("cost.value", 0.25));
        } else if (cost == "beta") {
            spec.costs = CostModel::beta_cost(get_double("cost.a", 1.0), get_double("cost.b", 2.0));
        } else {
            problems.push_back("unknown cost model '" + cost + "'");
        }
    } catch (const ValidationError& e) {
        problems.push_back(e.what());
    }

    const std::string population = get("population", "fresh");
    if (population == "fresh") {
        spec.population.mode = AgentPopulation::Mode::FreshEveryRound;
    } else if (population == "pool") {
        spec.population.mode = AgentPopulation::Mode::ReturningPool;
        spec.population.pool_size = static_cast<std::size_t>(get_int("population.size", 10));
    } else {
        problems.push_back("unknown population mode '" + population + "'");
    }
    spec.population.prior_belief = get_double("b0", 0.5);

    const std::string gamma = get("gamma", "1.0");
    if (gamma == "per_agent") {
        spec.population.per_agent_tolerance = true;
    } else {
        try {
            spec.population.tolerance = std::stod(gamma);
        } catch (const std::exception&) {
            problems.push_back("gamma must be a number or 'per_agent'");
        }
        if (spec.population.tolerance < 0.0 || spec.population.tolerance > 1.0) {
            problems.push_back("gamma must lie in [0,1]");
        }
    }

    const std::string lambda = get("arp.lambda", "auto");
    spec.policy.lambda = lambda == "auto" ? -1.0 : get_double("arp.lambda", -1.0);
    spec.policy.tau = get_double("arp.tau", 0.2);
    spec.policy.k = get_int("arp.k", 10);
    spec.policy.mu1_margin = get_double("arp.margin", 0.1);
    const std::string min_prob = get("arp.min_prior_prob", "auto");
    spec.policy.min_prior_prob = min_prob == "auto" ? -1.0 : get_double("arp.min_prior_prob", -1.0);
    spec.policy.strict_k = get_bool("strict", false);

    const std::string eta = get("marp.eta", "fixed");
    if (eta == "fixed") {
        spec.policy.eta_anytime = false;
    } else if (eta == "anytime") {
        spec.policy.eta_anytime = true;
    } else {
        problems.push_back("marp.eta must be 'fixed' or 'anytime'");
    }
    spec.policy.full_information = get_bool("marp.full_information", false);
    spec.policy.elim_c = get_double("even_dar.c", 10.0);
    spec.policy.elim_delta = get_double("even_dar.delta", 0.05);

    if (!problems.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& p : problems) {
            msg += "\n  - " + p;
        }
        throw ValidationError(msg);
    }
    spec.validate();
    return spec;
}

std::map<std::string, std::string> Config::resolved_echo() const {
    const ExperimentSpec spec = resolve();
    std::map<std::string, std::string> echo = entries_;
    echo["policy"] = spec.policy.label();
    echo["m"] = std::to_string(spec.rewards.m);
    echo["T"] = std::to_string(spec.horizon);
    echo["reps"] = std::to_string(spec.replications);
    echo["seed"] = std::to_string(spec.base_seed);
    echo["rewards"] = spec.rewards.label();
    echo["cost"] = cost_spec_label(spec.costs);
    echo.emplace("gamma", "1.0");
    echo.emplace("b0", "0.5");
    return echo;
}

std::string cost_spec_label(const CostModel& costs) {
    if (costs.kind == CostModel::Kind::Constant) {
        std::ostringstream os;
        os << "constant:" << costs.constant;
        return os.str();
    }
    std::ostringstream os;
    os << "beta:" << costs.beta_a << ":" << costs.beta_b;
    return os.str();
}

std::vector<SweepCell> sweep_cells(const Config& cfg) {
    const auto policies = cfg.get_list("sweep.policies");
    auto ms = cfg.get_double_list("sweep.m");
    std::vector<std::string> costs;
    for (const auto& v : cfg.get_list("sweep.cost_values")) {
        costs.push_back("constant:" + v);
    }
    for (const auto& v : cfg.get_list("sweep.cost_betas")) {
        costs.push_back("beta:" + v);
    }
    if (policies.empty() || ms.empty() || costs.empty()) {
        throw ValidationError("sweep needs sweep.policies, sweep.m and sweep.cost_values/cost_betas");
    }
    std::vector<SweepCell> cells;
    for (const auto& p : policies) {
        for (double m : ms) {
            for (const auto& c : costs) {
                cells.push_back({p, static_cast<std::size_t>(m), c});
            }
        }
    }
    return cells;
}

Config config_for_cell(const Config& base, const SweepCell& cell) {
    Config cfg = base;
    cfg.apply_override("policy", cell.policy);
    cfg.apply_override("m", std::to_string(cell.m));
    const auto colon = cell.cost_spec.find(':');
    const std::string kind = cell.cost_spec.substr(0, colon);
    const std::string rest = cell.cost_spec.substr(colon + 1);
    if (kind == "constant") {
        cfg.apply_override("cost", "constant");
        cfg.apply_override("cost.value", rest);
    } else {
        const auto sep = rest.find(':');
        if (sep == std::string::npos) {
            throw ValidationError("beta cost spec must be 'a:b', got '" + rest + "'");
        }
        cfg.apply_override("cost", "beta");
        cfg.apply_override("cost.a", rest.substr(0, sep));
        cfg.apply_override("cost.b", rest.substr(sep + 1));
    }
    return cfg;
}

}  // namespace ibandit
