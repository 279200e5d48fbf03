#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "ibandit/policy.hpp"

namespace ibandit {

struct MarpParams {
    enum class EtaMode { Fixed, Anytime };

    EtaMode eta_mode = EtaMode::Fixed;
    std::int64_t horizon = 5000;
    // Sanity variant: feed exact per-arm losses (needs the simulator's true
    // means) instead of the importance-weighted estimator.
    bool full_information = false;

    void check() const;
};

// Learning rate: sqrt(8 ln m / T) in fixed mode, sqrt(8 ln m / t) anytime.
double marp_eta(const MarpParams& params, std::size_t m, std::int64_t t);

// Importance-weighted loss estimate for arm i: -reward/propensity on the
// followed recommended arm, zero otherwise.
double estimated_loss(int i, int recommended, bool followed, std::optional<double> reward, double p_i);

// Softmax of the negated scaled cumulative losses, stabilized by shifting the
// minimum loss to zero.
ProbabilityVector update_weights(const std::vector<double>& cum_losses, double eta);

// Exponential-weights recommendation over all arms with per-arm cumulative
// estimated loss as feedback; uniform on the first round; fairness gate falls
// back to the lowest-index cumulative-loss minimizer.
class MarpPolicy final : public Policy {
  public:
    MarpPolicy(MarpParams params, std::size_t m);

    // Full-information variant needs the environment's true means.
    void set_true_means(std::vector<double> means);

    Recommendation recommend(const AgentContext& ctx, Rng& rng) override;
    void observe(const Recommendation& rec, bool followed, std::optional<double> reward) override;
    std::string name() const override { return params_.full_information ? "marp_full_info" : "marp"; }
    std::optional<ProbabilityVector> current_weights() const override;

    const std::vector<double>& cumulative_losses() const { return cum_losses_; }
    std::int64_t round() const { return t_; }

  private:
    MarpParams params_;
    std::size_t m_;
    std::int64_t t_ = 1;  // round about to be played
    std::vector<double> cum_losses_;
    std::shared_ptr<std::vector<double>> followed_rewards_;
    std::vector<double> true_means_;
};

}  // namespace ibandit
