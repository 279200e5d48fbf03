#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ibandit/agents.hpp"
#include "ibandit/core.hpp"
#include "ibandit/policy.hpp"
#include "ibandit/rewards.hpp"

namespace ibandit {

// Per-round loss against the arm that is best in expectation: max_i mu_i minus
// the recommended arm's mean when followed, the full best mean otherwise.
double true_loss(const std::vector<double>& true_means, int arm, bool followed);

// Realized regret: cumulative loss minus the best single arm's loss under the
// same realized action sequence. Zero when every round is ignored.
double regret(const std::vector<RoundRecord>& records, const std::vector<double>& true_means);

// Cumulative loss against the zero-loss optimal-arm benchmark; this is the
// headline metric reported by experiment summaries, where rounds lost to
// ignored recommendations count at the full best mean.
double cumulative_loss(const std::vector<RoundRecord>& records, const std::vector<double>& true_means);

// Ex-post fairness check for one round, evaluated with the context the agent
// arrived with and the simulator's true means.
bool fairness_audit(const AgentContext& before, int arm, const std::vector<double>& true_means,
                    double cost, double gamma);

// splitmix64 mix of a base seed and a replication index.
std::uint64_t mix_seed(std::uint64_t base_seed, std::uint64_t replication);

// Empirical quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

struct EpisodeOptions {
    bool keep_records = false;
    bool keep_paths = false;
    bool keep_weights = false;
    bool keep_fairness_trajectory = false;
};

struct FairnessSample {
    std::int64_t agent_id = 0;
    std::int64_t round = 0;
    std::int64_t alpha = 0;
    std::int64_t beta = 0;
};

struct RunResult {
    std::vector<RoundRecord> records;             // filled only when requested
    std::vector<double> cumulative_regret_path;   // realized-regret running value
    std::vector<double> cumulative_loss_path;     // headline-metric running value
    std::vector<ProbabilityVector> weight_paths;  // per-round policy weights (optional)
    std::vector<FairnessSample> fairness_trajectory;
    std::vector<PhaseTransition> transitions;
    double realized_regret = 0.0;
    double loss_regret = 0.0;  // cumulative loss vs the optimal arm
    double follow_rate = 0.0;
    std::int64_t fairness_violations = 0;
    std::uint64_t seed = 0;
    std::vector<double> true_means;
};

// One full interaction protocol episode: per round the designer discloses and
// recommends, the agent decides, the reward lands iff followed, and fairness
// bookkeeping advances. Deterministic given the rng state.
RunResult run_episode(Policy& policy, const RewardModel& model, AgentPopulation& population,
                      std::int64_t horizon, Rng& rng, const EpisodeOptions& options = {});

// --- Declarative experiment description -----------------------------------

struct RewardModelSpec {
    RewardModel::Kind kind = RewardModel::Kind::TruncGaussian;
    std::size_t m = 5;
    std::vector<double> fixed_means;  // FixedMeans / uplift manifest means
    double gaussian_stdev = 0.1;
    std::int64_t uplift_n = 100000;

    // Draws a fresh environment realization (means) for one replication.
    RewardModel instantiate(Rng& rng) const;
    std::string label() const;
};

struct PolicySpec {
    enum class Kind { Arp, Marp, FullTransparency, FirstBestElim, EvenDarElim, Ucb, Thompson };

    Kind kind = Kind::Arp;
    // ARP and first-best parameters.
    double lambda = -1.0;  // <= 0 means auto: 0.99 * lambda_max
    double tau = 0.2;
    std::int64_t k = 10;
    bool strict_k = false;
    double min_prior_prob = -1.0;  // <= 0 means derive from the reward prior
    double mu1_margin = 0.1;       // clamp margin for the known arm
    // MARP parameters.
    bool eta_anytime = false;
    bool full_information = false;
    // Elimination baseline parameters.
    double elim_c = 10.0;
    double elim_delta = 0.05;

    bool needs_known_arm() const;
    std::string label() const;
};

struct PopulationSpec {
    AgentPopulation::Mode mode = AgentPopulation::Mode::FreshEveryRound;
    std::size_t pool_size = 10;
    double tolerance = 1.0;
    bool per_agent_tolerance = false;
    double prior_belief = 0.5;
};

struct ExperimentSpec {
    PolicySpec policy;
    RewardModelSpec rewards;
    CostModel costs = CostModel::constant_cost(0.25);
    PopulationSpec population;
    std::int64_t horizon = 5000;
    int replications = 500;
    std::uint64_t base_seed = 1;

    void validate() const;
    // Prior probability min_i P(mu_i - c >= tau) under the reward prior.
    double derived_min_prior_prob(double c_star, double tau) const;
};

// Environment plus policy for one replication, after clamping the known arm
// when the policy requires it.
struct Realization {
    RewardModel model;
    std::unique_ptr<Policy> policy;
    double theta = 0.0;
    double lambda = 0.0;
    std::int64_t k = 0;
};

Realization make_realization(const ExperimentSpec& spec, Rng& rng);

RunResult run_one_replication(const ExperimentSpec& spec, std::uint64_t seed,
                              const EpisodeOptions& options = {});

struct AggregateResult {
    double mean_regret = 0.0;  // headline (cumulative-loss) metric
    double ci_low = 0.0;
    double ci_high = 0.0;
    double mean_realized_regret = 0.0;
    double mean_follow_rate = 0.0;
    std::int64_t total_fairness_violations = 0;
    std::vector<double> per_replication;  // headline metric per replication
    std::vector<double> per_replication_realized;
    std::vector<RunResult> runs;              // filled when keep_runs
    std::vector<double> mean_loss_path;       // filled when keep_mean_path
};

struct ReplicateOptions {
    int jobs = 1;  // <= 0 means hardware concurrency
    bool keep_runs = false;
    bool keep_mean_path = false;
};

// Seed-derived replications, parallelizable and order-independent.
AggregateResult replicate(const ExperimentSpec& spec, int n_reps, const ReplicateOptions& options = {});

AggregateResult aggregate_from_values(std::vector<double> per_replication);

}  // namespace ibandit
