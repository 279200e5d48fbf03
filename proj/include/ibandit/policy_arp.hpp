#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "ibandit/policy.hpp"

namespace ibandit {

// Largest admissible exploration margin given the known arm's mean and the
// common cost; requires mu1 > c_star.
double lambda_max(double mu1, double c_star);

// Elimination scale parameter: 4 m^2 / (tau * min_i P(mu_i - c_star >= tau)).
double theta_tau(std::size_t m, double tau, double min_prior_prob);

// Theoretically sufficient per-arm sample size; used by strict validation.
std::int64_t k_theoretical(double lambda, std::size_t m, std::int64_t horizon, double theta);

// Adaptive exploration rate: lambda / (2(c_star - history_mean) + lambda) when
// the per-round history mean sits below the cost, otherwise 1.
double exploration_rate(double lambda, double c_star, double history_mean);

// Index (1-based) of the empirically best arm among candidate_means, ties
// broken uniformly at random. sample_count, when positive, enforces that each
// candidate carries exactly that many rewards.
int select_exploit_arm(const std::vector<double>& candidate_means, Rng& rng);

// One elimination round: keep arm i iff mean_i + sqrt(ln(T*theta)/(2q)) clears
// both the best active mean and the cost. If the cost would empty the set, the
// empirical best is retained and *cost_dominates is flagged.
std::vector<int> elimination_step(const std::vector<double>& means_by_arm, std::int64_t q,
                                  std::int64_t horizon, double theta, double c_star,
                                  const std::vector<int>& active, bool* cost_dominates = nullptr);

// Two-point randomized recommendation used in the sampling phase: explore with
// probability explore_rate when the fairness gate holds, otherwise exploit.
std::pair<int, ProbabilityVector> sampling_recommendation(int exploit_arm, int explore_arm,
                                                          double explore_rate, bool gate_holds,
                                                          double u, std::size_t m);

struct ArpParams {
    double lambda = 0.1;
    double tau = 0.2;
    double theta = 100.0;
    std::int64_t k = 10;
    double c_star = 0.25;
    double mu1 = 0.5;
    std::int64_t horizon = 5000;

    void check() const;
};

// Adaptive recommendation policy: per-arm sampling stages with an exploration
// rate adapted to the pooled reward history, confidence-radius elimination,
// then commitment to the surviving arm. The fairness gate applies every round;
// when it fails the current exploit choice is recommended deterministically.
class ArpPolicy final : public Policy {
  public:
    ArpPolicy(ArpParams params, std::size_t m);

    Recommendation recommend(const AgentContext& ctx, Rng& rng) override;
    void observe(const Recommendation& rec, bool followed, std::optional<double> reward) override;
    std::string name() const override { return "arp"; }
    std::vector<PhaseTransition> take_transitions() override;

    // Introspection for tests and trajectory dumps.
    enum class Phase { Sampling, Exploration, Exploitation };
    Phase phase() const { return phase_; }
    int stage() const { return stage_; }
    const std::vector<int>& active_arms() const { return active_; }
    int winner() const;
    double stage_history_mean() const { return stage_history_mean_; }
    double stage_explore_rate() const { return stage_explore_rate_; }
    bool cost_dominates_flagged() const { return cost_dominates_; }

  private:
    void begin_stage_lazily(Rng& rng);
    void finish_stage();
    void enter_exploration();
    void run_elimination();
    Disclosure stage_disclosure() const;
    Disclosure exploration_disclosure() const;
    int exploration_exploit_arm() const;

    ArpParams params_;
    std::size_t m_;
    Phase phase_ = Phase::Sampling;

    // Sampling state. stage_ is the explore arm index; exploit/rate/history
    // mean are frozen at the stage boundary.
    int stage_ = 1;
    bool stage_ready_ = false;
    std::int64_t stage_collected_ = 0;
    std::int64_t stage_rounds_ = 0;
    int stage_exploit_arm_ = 1;
    double stage_explore_rate_ = 0.0;
    double stage_history_mean_ = 0.0;

    // Rewards collected per stage for the exploit choice and messages.
    std::vector<std::vector<double>> stage_explore_rewards_;
    std::vector<std::vector<double>> stage_followed_rewards_;
    std::vector<double> sample_means_;  // per arm, frozen after its stage

    // Pooled history over every elapsed round (ignored rounds count in the
    // denominator).
    std::int64_t rounds_elapsed_ = 0;
    double followed_reward_sum_ = 0.0;

    // Exploration state: per-arm counts/sums synchronized at q rewards each.
    std::vector<int> active_;
    std::vector<std::int64_t> elim_counts_;
    std::vector<double> elim_sums_;
    std::int64_t q_ = 0;
    std::vector<int> pending_collect_;  // arms still owed a reward at this q
    bool cost_dominates_ = false;

    int winner_ = 1;
    std::vector<PhaseTransition> transitions_;
};

}  // namespace ibandit
