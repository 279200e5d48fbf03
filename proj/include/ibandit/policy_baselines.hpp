#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ibandit/policy.hpp"

namespace ibandit {

// Shared per-arm bookkeeping for the comparison policies; rewards land only on
// followed rounds.
struct BaselineArm {
    std::int64_t pulls = 0;
    double reward_sum = 0.0;

    bool pulled() const { return pulls > 0; }
    double mean() const { return reward_sum / static_cast<double>(pulls); }
};

// Greedy recommendation under full disclosure: best of the known arm's mean
// and all empirical means, recommended only while that value clears the cost.
class FullTransparencyPolicy final : public Policy {
  public:
    FullTransparencyPolicy(std::size_t m, double c_star, double mu1);

    Recommendation recommend(const AgentContext& ctx, Rng& rng) override;
    void observe(const Recommendation& rec, bool followed, std::optional<double> reward) override;
    std::string name() const override { return "full_transparency"; }

    // Test hook: overwrite an arm's statistics.
    void force_arm_stats(int arm, std::int64_t pulls, double reward_sum);
    void force_known_mean(double mu1) { mu1_ = mu1; }

  private:
    std::size_t m_;
    double c_star_;
    double mu1_;
    std::vector<BaselineArm> arms_;
};

// Round-robin over an active set with confidence-radius elimination against
// the best active arm; every arm starts from the known arm's mean as a prior
// estimate. Ignores incentives entirely.
class FirstBestElimPolicy final : public Policy {
  public:
    FirstBestElimPolicy(std::size_t m, std::int64_t horizon, double theta, double mu1);

    Recommendation recommend(const AgentContext& ctx, Rng& rng) override;
    void observe(const Recommendation& rec, bool followed, std::optional<double> reward) override;
    std::string name() const override { return "first_best_elim"; }

    const std::vector<int>& active_arms() const { return active_; }
    double estimate(int arm) const;

  private:
    void eliminate();

    std::size_t m_;
    std::int64_t horizon_;
    double theta_;
    double mu1_;
    std::vector<BaselineArm> arms_;
    std::vector<int> active_;
    std::vector<int> pending_;
    std::int64_t level_ = 0;  // synchronized reward count per active arm
};

// Action elimination with radius sqrt(ln(c n^2 m / delta) / (2n)): drop an arm
// once its mean falls more than two radii below the best.
class EvenDarElimPolicy final : public Policy {
  public:
    EvenDarElimPolicy(std::size_t m, double c_param = 10.0, double delta = 0.05);

    Recommendation recommend(const AgentContext& ctx, Rng& rng) override;
    void observe(const Recommendation& rec, bool followed, std::optional<double> reward) override;
    std::string name() const override { return "even_dar_elim"; }

    const std::vector<int>& active_arms() const { return active_; }
    double radius(std::int64_t n) const;

  private:
    void eliminate();

    std::size_t m_;
    double c_param_;
    double delta_;
    std::vector<BaselineArm> arms_;
    std::vector<int> active_;
    std::vector<int> pending_;
    std::int64_t level_ = 0;
};

// UCB1: pull every unpulled arm first, then the highest mean-plus-bonus index.
class UcbPolicy final : public Policy {
  public:
    explicit UcbPolicy(std::size_t m);

    Recommendation recommend(const AgentContext& ctx, Rng& rng) override;
    void observe(const Recommendation& rec, bool followed, std::optional<double> reward) override;
    std::string name() const override { return "ucb"; }

    double index_of(int arm) const;
    std::int64_t round() const { return t_; }

  private:
    std::size_t m_;
    std::int64_t t_ = 1;
    std::vector<BaselineArm> arms_;
};

// Beta-Bernoulli posterior sampling with fractional updates (a += reward,
// b += 1 - reward) on followed rounds only.
class ThompsonPolicy final : public Policy {
  public:
    explicit ThompsonPolicy(std::size_t m);

    Recommendation recommend(const AgentContext& ctx, Rng& rng) override;
    void observe(const Recommendation& rec, bool followed, std::optional<double> reward) override;
    std::string name() const override { return "thompson"; }

    std::pair<double, double> posterior(int arm) const;
    void force_posterior(int arm, double a, double b);

  private:
    std::size_t m_;
    std::vector<double> alpha_;
    std::vector<double> beta_;
    std::vector<BaselineArm> arms_;
};

}  // namespace ibandit
