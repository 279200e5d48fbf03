#include "ibandit/policy_baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ibandit {

namespace {

Recommendation transparent_point(int arm, std::size_t m, const char* phase,
                                 std::optional<double> believed_mean) {
    Recommendation rec;
    rec.arm = arm;
    rec.probs = ProbabilityVector::point_mass(arm, m);
    rec.phase = phase;
    rec.transparent_belief = believed_mean;
    return rec;
}

}  // namespace

FullTransparencyPolicy::FullTransparencyPolicy(std::size_t m, double c_star, double mu1)
    : m_(m), c_star_(c_star), mu1_(mu1), arms_(m) {
    if (m_ < 2) {
        throw ValidationError("need at least two arms");
    }
}

Recommendation FullTransparencyPolicy::recommend(const AgentContext&, Rng&) {
    int best_arm = 1;
    double best = mu1_;
    for (std::size_t j = 1; j < m_; ++j) {
        if (arms_[j].pulled() && arms_[j].mean() > best) {
            best = arms_[j].mean();
            best_arm = static_cast<int>(j + 1);
        }
    }
    if (best < c_star_) {
        auto rec = transparent_point(best_arm, m_, "no_recommendation", std::nullopt);
        rec.no_recommend = true;
        return rec;
    }
    return transparent_point(best_arm, m_, "greedy", best);
}

void FullTransparencyPolicy::observe(const Recommendation& rec, bool followed, std::optional<double> reward) {
    if (followed) {
        auto& a = arms_[static_cast<std::size_t>(rec.arm - 1)];
        a.pulls += 1;
        a.reward_sum += *reward;
    }
}

void FullTransparencyPolicy::force_arm_stats(int arm, std::int64_t pulls, double reward_sum) {
    auto& a = arms_[static_cast<std::size_t>(arm - 1)];
    a.pulls = pulls;
    a.reward_sum = reward_sum;
}

FirstBestElimPolicy::FirstBestElimPolicy(std::size_t m, std::int64_t horizon, double theta, double mu1)
    : m_(m), horizon_(horizon), theta_(theta), mu1_(mu1), arms_(m) {
    if (m_ < 2) {
        throw ValidationError("need at least two arms");
    }
    active_.resize(m_);
    for (std::size_t j = 0; j < m_; ++j) {
        active_[j] = static_cast<int>(j + 1);
    }
    pending_ = active_;
}

double FirstBestElimPolicy::estimate(int arm) const {
    // Level-0 estimate for every arm is the known arm's mean.
    const auto& a = arms_[static_cast<std::size_t>(arm - 1)];
    return a.pulled() ? a.mean() : mu1_;
}

Recommendation FirstBestElimPolicy::recommend(const AgentContext&, Rng&) {
    const int arm = pending_.front();
    const auto& a = arms_[static_cast<std::size_t>(arm - 1)];
    return transparent_point(arm, m_, "elimination",
                             a.pulled() ? std::optional<double>(a.mean()) : std::nullopt);
}

void FirstBestElimPolicy::observe(const Recommendation& rec, bool followed, std::optional<double> reward) {
    if (!followed) {
        return;  // keep retrying this arm with the next agents
    }
    auto& a = arms_[static_cast<std::size_t>(rec.arm - 1)];
    a.pulls += 1;
    a.reward_sum += *reward;
    pending_.erase(std::find(pending_.begin(), pending_.end(), rec.arm));
    if (pending_.empty()) {
        level_ += 1;
        eliminate();
        pending_ = active_;
    }
}

void FirstBestElimPolicy::eliminate() {
    if (active_.size() <= 1) {
        return;
    }
    const double radius =
        std::sqrt(std::log(static_cast<double>(horizon_) * theta_) / (2.0 * static_cast<double>(level_)));
    double best = -1.0;
    for (int arm : active_) {
        best = std::max(best, estimate(arm));
    }
    std::vector<int> kept;
    for (int arm : active_) {
        if (estimate(arm) + radius >= best) {
            kept.push_back(arm);
        }
    }
    active_ = std::move(kept);
}

EvenDarElimPolicy::EvenDarElimPolicy(std::size_t m, double c_param, double delta)
    : m_(m), c_param_(c_param), delta_(delta), arms_(m) {
    if (m_ < 2) {
        throw ValidationError("need at least two arms");
    }
    if (c_param_ <= 0.0 || delta_ <= 0.0 || delta_ >= 1.0) {
        throw ValidationError("elimination needs c > 0 and delta in (0,1)");
    }
    active_.resize(m_);
    for (std::size_t j = 0; j < m_; ++j) {
        active_[j] = static_cast<int>(j + 1);
    }
    pending_ = active_;
}

double EvenDarElimPolicy::radius(std::int64_t n) const {
    const double arg = c_param_ * static_cast<double>(n) * static_cast<double>(n) *
                       static_cast<double>(m_) / delta_;
    return std::sqrt(std::log(arg) / (2.0 * static_cast<double>(n)));
}

Recommendation EvenDarElimPolicy::recommend(const AgentContext&, Rng&) {
    const int arm = pending_.front();
    const auto& a = arms_[static_cast<std::size_t>(arm - 1)];
    return transparent_point(arm, m_, "elimination",
                             a.pulled() ? std::optional<double>(a.mean()) : std::nullopt);
}

void EvenDarElimPolicy::observe(const Recommendation& rec, bool followed, std::optional<double> reward) {
    if (!followed) {
        return;
    }
    auto& a = arms_[static_cast<std::size_t>(rec.arm - 1)];
    a.pulls += 1;
    a.reward_sum += *reward;
    pending_.erase(std::find(pending_.begin(), pending_.end(), rec.arm));
    if (pending_.empty()) {
        level_ += 1;
        eliminate();
        pending_ = active_;
    }
}

void EvenDarElimPolicy::eliminate() {
    if (active_.size() <= 1) {
        return;
    }
    double best = -1.0;
    for (int arm : active_) {
        best = std::max(best, arms_[static_cast<std::size_t>(arm - 1)].mean());
    }
    const double r = radius(level_);
    std::vector<int> kept;
    for (int arm : active_) {
        if (arms_[static_cast<std::size_t>(arm - 1)].mean() >= best - 2.0 * r) {
            kept.push_back(arm);
        }
    }
    active_ = std::move(kept);
}

UcbPolicy::UcbPolicy(std::size_t m) : m_(m), arms_(m) {
    if (m_ < 2) {
        throw ValidationError("need at least two arms");
    }
}

double UcbPolicy::index_of(int arm) const {
    const auto& a = arms_[static_cast<std::size_t>(arm - 1)];
    if (!a.pulled()) {
        return std::numeric_limits<double>::infinity();
    }
    return a.mean() + std::sqrt(2.0 * std::log(static_cast<double>(t_)) / static_cast<double>(a.pulls));
}

Recommendation UcbPolicy::recommend(const AgentContext&, Rng&) {
    for (std::size_t j = 0; j < m_; ++j) {
        if (!arms_[j].pulled()) {
            return transparent_point(static_cast<int>(j + 1), m_, "ucb", std::nullopt);
        }
    }
    int best_arm = 1;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m_; ++j) {
        const double idx = index_of(static_cast<int>(j + 1));
        if (idx > best) {
            best = idx;
            best_arm = static_cast<int>(j + 1);
        }
    }
    return transparent_point(best_arm, m_, "ucb", arms_[static_cast<std::size_t>(best_arm - 1)].mean());
}

void UcbPolicy::observe(const Recommendation& rec, bool followed, std::optional<double> reward) {
    t_ += 1;
    if (followed) {
        auto& a = arms_[static_cast<std::size_t>(rec.arm - 1)];
        a.pulls += 1;
        a.reward_sum += *reward;
    }
}

ThompsonPolicy::ThompsonPolicy(std::size_t m) : m_(m), alpha_(m, 1.0), beta_(m, 1.0), arms_(m) {
    if (m_ < 2) {
        throw ValidationError("need at least two arms");
    }
}

std::pair<double, double> ThompsonPolicy::posterior(int arm) const {
    const auto idx = static_cast<std::size_t>(arm - 1);
    return {alpha_[idx], beta_[idx]};
}

void ThompsonPolicy::force_posterior(int arm, double a, double b) {
    const auto idx = static_cast<std::size_t>(arm - 1);
    alpha_[idx] = a;
    beta_[idx] = b;
}

Recommendation ThompsonPolicy::recommend(const AgentContext&, Rng& rng) {
    int best_arm = 1;
    double best = -1.0;
    for (std::size_t j = 0; j < m_; ++j) {
        std::gamma_distribution<double> ga(alpha_[j], 1.0);
        std::gamma_distribution<double> gb(beta_[j], 1.0);
        const double x = ga(rng);
        const double y = gb(rng);
        const double theta = x + y > 0.0 ? x / (x + y) : 0.5;
        if (theta > best) {
            best = theta;
            best_arm = static_cast<int>(j + 1);
        }
    }
    const auto& a = arms_[static_cast<std::size_t>(best_arm - 1)];
    return transparent_point(best_arm, m_, "thompson",
                             a.pulled() ? std::optional<double>(a.mean()) : std::nullopt);
}

void ThompsonPolicy::observe(const Recommendation& rec, bool followed, std::optional<double> reward) {
    if (!followed) {
        return;
    }
    const auto idx = static_cast<std::size_t>(rec.arm - 1);
    alpha_[idx] += *reward;
    beta_[idx] += 1.0 - *reward;
    auto& a = arms_[idx];
    a.pulls += 1;
    a.reward_sum += *reward;
}

}  // namespace ibandit
