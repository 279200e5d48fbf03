#include "ibandit/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ibandit {

namespace {

void check_means(const std::vector<double>& means) {
    if (means.size() < 1) {
        throw ValidationError("reward model needs at least one arm mean");
    }
    for (double mu : means) {
        if (mu < 0.0 || mu > 1.0) {
            throw ValidationError("arm mean " + std::to_string(mu) + " outside [0,1]");
        }
    }
}

}  // namespace

double RewardModel::best_mean() const {
    return *std::max_element(true_means.begin(), true_means.end());
}

RewardModel RewardModel::fixed(std::vector<double> means) {
    check_means(means);
    RewardModel m;
    m.kind = Kind::FixedMeans;
    m.true_means = std::move(means);
    return m;
}

RewardModel RewardModel::trunc_gaussian(std::vector<double> means, double stdev) {
    check_means(means);
    RewardModel m;
    m.kind = Kind::TruncGaussian;
    m.true_means = std::move(means);
    m.gaussian_stdev = stdev;
    return m;
}

RewardModel RewardModel::beta_arms(std::vector<double> shapes) {
    RewardModel m;
    m.kind = Kind::BetaArms;
    m.beta_shapes = std::move(shapes);
    m.true_means.reserve(m.beta_shapes.size());
    for (double b : m.beta_shapes) {
        if (b <= 0.0) {
            throw ValidationError("beta arm shape must be positive");
        }
        m.true_means.push_back(1.0 / (1.0 + b));
    }
    check_means(m.true_means);
    return m;
}

RewardModel RewardModel::bernoulli_uplift(std::vector<double> means, std::int64_t n) {
    check_means(means);
    if (n < 1) {
        throw ValidationError("uplift averaging count must be >= 1");
    }
    RewardModel m;
    m.kind = Kind::BernoulliUplift;
    m.true_means = std::move(means);
    m.uplift_count = n;
    return m;
}

CostModel CostModel::constant_cost(double c) {
    if (!(c > 0.0 && c < 1.0)) {
        throw ValidationError("constant cost must lie strictly inside (0,1)");
    }
    CostModel m;
    m.kind = Kind::Constant;
    m.constant = c;
    return m;
}

CostModel CostModel::beta_cost(double a, double b) {
    if (a <= 0.0 || b <= 0.0) {
        throw ValidationError("beta cost parameters must be positive");
    }
    CostModel m;
    m.kind = Kind::BetaCost;
    m.beta_a = a;
    m.beta_b = b;
    return m;
}

std::vector<double> gen_gaussian_means(std::size_t m, Rng& rng) {
    if (m < 2) {
        throw ValidationError("need at least two arms");
    }
    std::uniform_real_distribution<double> u(0.0, 0.6);
    std::vector<double> means(m);
    for (double& mu : means) {
        mu = u(rng);
    }
    return means;
}

std::vector<double> gen_beta_arm_shapes(std::size_t m, Rng& rng) {
    if (m < 2) {
        throw ValidationError("need at least two arms");
    }
    std::vector<double> shapes(m);
    std::iota(shapes.begin(), shapes.end(), 1.0);
    for (std::size_t i = m; i-- > 1;) {
        std::uniform_int_distribution<std::size_t> pick(0, i);
        std::swap(shapes[i], shapes[pick(rng)]);
    }
    return shapes;
}

std::vector<double> gen_uplift_means(std::size_t m, Rng& rng) {
    if (m < 2) {
        throw ValidationError("need at least two arms");
    }
    std::vector<double> means(m);
    for (double& mu : means) {
        mu = sample_beta(0.5, 3.0, rng);
    }
    return means;
}

double sample_beta(double a, double b, Rng& rng) {
    std::gamma_distribution<double> ga(a, 1.0);
    std::gamma_distribution<double> gb(b, 1.0);
    double x = ga(rng);
    double y = gb(rng);
    double s = x + y;
    if (s <= 0.0) {
        return 0.5;  // double underflow of both gammas; vanishing probability
    }
    return x / s;
}

double sample_reward(const RewardModel& model, int arm, Rng& rng) {
    if (arm < 1 || arm > static_cast<int>(model.arms())) {
        throw Error("reward sample for out-of-range arm " + std::to_string(arm));
    }
    const double mu = model.true_means[static_cast<std::size_t>(arm - 1)];
    switch (model.kind) {
        case RewardModel::Kind::FixedMeans:
            return mu;
        case RewardModel::Kind::TruncGaussian: {
            // Rejection keeps the draw exactly inside [0,1]; acceptance is high
            // for means in [0,0.6] with stdev 0.1.
            std::normal_distribution<double> n(mu, model.gaussian_stdev);
            for (;;) {
                double x = n(rng);
                if (x >= 0.0 && x <= 1.0) {
                    return x;
                }
            }
        }
        case RewardModel::Kind::BetaArms: {
            const double b = model.beta_shapes[static_cast<std::size_t>(arm - 1)];
            // Beta(1, b) by inverse CDF.
            std::uniform_real_distribution<double> u(0.0, 1.0);
            double x = 1.0 - std::pow(1.0 - u(rng), 1.0 / b);
            return std::clamp(x, 0.0, 1.0);
        }
        case RewardModel::Kind::BernoulliUplift: {
            // Single binomial draw; same distribution as averaging N coins.
            std::binomial_distribution<std::int64_t> bin(model.uplift_count, mu);
            return static_cast<double>(bin(rng)) / static_cast<double>(model.uplift_count);
        }
    }
    throw Error("unreachable reward model kind");
}

double sample_cost(const CostModel& model, Rng& rng) {
    switch (model.kind) {
        case CostModel::Kind::Constant:
            return model.constant;
        case CostModel::Kind::BetaCost: {
            for (;;) {
                double c = sample_beta(model.beta_a, model.beta_b, rng);
                if (c > 0.0 && c < 1.0) {
                    return c;
                }
            }
        }
    }
    throw Error("unreachable cost model kind");
}

}  // namespace ibandit
