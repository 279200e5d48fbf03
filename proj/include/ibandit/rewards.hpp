#pragma once

#include <cstdint>
#include <vector>

#include "ibandit/core.hpp"

namespace ibandit {

// Reward generator for one environment realization. true_means are the
// simulator-side expected rewards, always in [0,1]; sampled rewards always
// land in [0,1].
struct RewardModel {
    enum class Kind { TruncGaussian, BetaArms, BernoulliUplift, FixedMeans };

    Kind kind = Kind::FixedMeans;
    std::vector<double> true_means;
    double gaussian_stdev = 0.1;
    std::vector<double> beta_shapes;     // BetaArms: reward_i ~ Beta(1, beta_shapes[i])
    std::int64_t uplift_count = 100000;  // BernoulliUplift: mean of N Bernoulli draws

    std::size_t arms() const { return true_means.size(); }
    double best_mean() const;

    static RewardModel fixed(std::vector<double> means);
    static RewardModel trunc_gaussian(std::vector<double> means, double stdev = 0.1);
    static RewardModel beta_arms(std::vector<double> shapes);
    static RewardModel bernoulli_uplift(std::vector<double> means, std::int64_t n = 100000);
};

// Per-agent opportunity-cost generator.
struct CostModel {
    enum class Kind { Constant, BetaCost };

    Kind kind = Kind::Constant;
    double constant = 0.25;  // in (0,1)
    double beta_a = 1.0;
    double beta_b = 2.0;

    static CostModel constant_cost(double c);
    static CostModel beta_cost(double a, double b);
};

// m i.i.d. means uniform on [0, 0.6].
std::vector<double> gen_gaussian_means(std::size_t m, Rng& rng);

// Uniformly random permutation of {1,..,m}; induced means are 1/(1+shape).
std::vector<double> gen_beta_arm_shapes(std::size_t m, Rng& rng);

// m i.i.d. Beta(0.5, 3) means.
std::vector<double> gen_uplift_means(std::size_t m, Rng& rng);

// One reward draw for a 1-based arm.
double sample_reward(const RewardModel& model, int arm, Rng& rng);

// One cost draw, strictly inside (0,1).
double sample_cost(const CostModel& model, Rng& rng);

// General Beta(a,b) draw via two gamma variates.
double sample_beta(double a, double b, Rng& rng);

}  // namespace ibandit
