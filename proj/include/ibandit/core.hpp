#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "ibandit/errors.hpp"

namespace ibandit {

using Rng = std::mt19937_64;

// Distribution over arms used by randomized recommendation. Arms are 1-based
// throughout the public API; entries[j] is the probability of arm j+1.
class ProbabilityVector {
  public:
    // Validates entries (nonnegative, sum within 1e-9 of one, optional expected
    // length) and renormalizes exactly to sum one.
    static ProbabilityVector validate(std::vector<double> entries, std::size_t expected_len = 0);

    // Point mass on `arm` (1-based) out of m arms.
    static ProbabilityVector point_mass(int arm, std::size_t m);

    static ProbabilityVector uniform(std::size_t m);

    const std::vector<double>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    double operator[](std::size_t i) const { return entries_[i]; }
    // Probability of a 1-based arm index.
    double prob_of(int arm) const { return entries_[static_cast<std::size_t>(arm - 1)]; }

  private:
    explicit ProbabilityVector(std::vector<double> e) : entries_(std::move(e)) {}
    std::vector<double> entries_;
};

inline constexpr double kProbSumTolerance = 1e-9;

// Inverse-CDF sampling on the half-open partition of [0,1): returns the
// smallest 1-based arm j whose cumulative probability strictly exceeds u.
// Pure function of (p, u); u on a cumulative boundary selects the next arm.
int sample_arm(const ProbabilityVector& p, double u);

// Running per-arm statistics collected from followed rounds.
struct ArmStats {
    std::int64_t pulls = 0;
    double reward_sum = 0.0;
    double cum_est_loss = 0.0;

    void add_reward(double reward);
    bool has_mean() const { return pulls > 0; }
    double mean() const;
};

// One agent's private state: cost in (0,1), visit count, count of followed
// visits whose realized reward fell below her cost, and tolerance in [0,1].
struct AgentContext {
    double cost = 0.5;
    std::int64_t visits = 0;
    std::int64_t bad_outcomes = 0;
    double tolerance = 1.0;

    void check() const;
};

// Designer messages, one variant per policy phase. Histories contain only
// rewards from followed rounds and never arm identities of past rounds.
struct ArpInitialDisclosure {
    bool known_arm_exceeds_cost = true;
    double explore_rate = 0.0;
};

struct ArpStageDisclosure {
    double explore_rate = 0.0;
    // Followed rewards grouped by the sampling stage they were collected in,
    // frozen at the last stage boundary.
    std::vector<std::vector<double>> stage_rewards;
};

struct ArpExploreDisclosure {
    // Per-arm means of the fixed-size samples collected during sampling.
    std::vector<double> arm_sample_means;
    // Currently active arms (1-based), reconstructable from the published
    // elimination rule.
    std::vector<int> active_arms;
};

struct MarpRoundDisclosure {
    std::string policy_form = "exp-weights-over-cumulative-loss";
    // Shared view of the follower reward history; grows round by round, so
    // readers must consume it before the next observation lands.
    std::shared_ptr<const std::vector<double>> followed_rewards;

    const std::vector<double>& rewards() const {
        static const std::vector<double> empty;
        return followed_rewards ? *followed_rewards : empty;
    }
};

using Disclosure =
    std::variant<ArpInitialDisclosure, ArpStageDisclosure, ArpExploreDisclosure, MarpRoundDisclosure>;

// Immutable log entry for one round.
struct RoundRecord {
    std::int64_t round = 0;  // 1-based
    int arm = 1;             // 1-based, in [1, m]
    bool followed = false;
    std::optional<double> reward;  // present iff followed
    ProbabilityVector policy_probs = ProbabilityVector::uniform(1);
    std::string phase_label;

    void check(std::size_t m) const;
    // CSV row: round,policy,arm,followed,reward,phase (reward empty if ignored).
    std::string csv_row(const std::string& policy_name) const;
};

inline const char* kRoundRecordCsvHeader = "round,policy,arm,followed,reward,phase";

}  // namespace ibandit
