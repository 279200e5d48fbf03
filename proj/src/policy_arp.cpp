#include "ibandit/policy_arp.hpp"

#include <algorithm>
#include <cmath>

namespace ibandit {

double lambda_max(double mu1, double c_star) {
    if (!(mu1 > c_star)) {
        throw AssumptionViolatedError("known arm mean must strictly exceed the cost");
    }
    return 0.75 * (mu1 - c_star);
}

double theta_tau(std::size_t m, double tau, double min_prior_prob) {
    if (!(tau > 0.0 && tau < 1.0)) {
        throw ValidationError("tau must lie in (0,1)");
    }
    if (min_prior_prob <= 0.0) {
        throw DegeneratePriorError("prior probability of clearing the cost margin is zero");
    }
    if (min_prior_prob > 1.0) {
        throw ValidationError("prior probability cannot exceed one");
    }
    return 4.0 * static_cast<double>(m * m) / (tau * min_prior_prob);
}

std::int64_t k_theoretical(double lambda, std::size_t m, std::int64_t horizon, double theta) {
    if (lambda <= 0.0 || theta <= 0.0 || horizon < 1) {
        throw ValidationError("k_theoretical needs positive lambda, theta and horizon");
    }
    const double first = 9.0 / (2.0 * lambda * lambda) * std::log(20.0 * static_cast<double>(m) / lambda);
    const double second = theta * theta * std::log(static_cast<double>(horizon) * theta);
    return static_cast<std::int64_t>(std::ceil(std::max(first, second)));
}

double exploration_rate(double lambda, double c_star, double history_mean) {
    if (lambda <= 0.0) {
        throw ValidationError("lambda must be positive");
    }
    if (history_mean >= c_star) {
        return 1.0;
    }
    return lambda / (2.0 * (c_star - history_mean) + lambda);
}

int select_exploit_arm(const std::vector<double>& candidate_means, Rng& rng) {
    if (candidate_means.empty()) {
        throw InsufficientSamplesError("no sampled arms to exploit");
    }
    const double best = *std::max_element(candidate_means.begin(), candidate_means.end());
    std::vector<int> argmax;
    for (std::size_t j = 0; j < candidate_means.size(); ++j) {
        if (candidate_means[j] == best) {
            argmax.push_back(static_cast<int>(j + 1));
        }
    }
    if (argmax.size() == 1) {
        return argmax.front();
    }
    std::uniform_int_distribution<std::size_t> pick(0, argmax.size() - 1);
    return argmax[pick(rng)];
}

std::vector<int> elimination_step(const std::vector<double>& means_by_arm, std::int64_t q,
                                  std::int64_t horizon, double theta, double c_star,
                                  const std::vector<int>& active, bool* cost_dominates) {
    if (active.empty()) {
        throw Error("elimination over an empty active set");
    }
    if (cost_dominates != nullptr) {
        *cost_dominates = false;
    }
    const double radius = std::sqrt(std::log(static_cast<double>(horizon) * theta) / (2.0 * static_cast<double>(q)));
    double best = -1.0;
    int best_arm = active.front();
    for (int arm : active) {
        const double mu = means_by_arm.at(static_cast<std::size_t>(arm - 1));
        if (mu > best) {
            best = mu;
            best_arm = arm;
        }
    }
    const double bar = std::max(best, c_star);
    std::vector<int> kept;
    for (int arm : active) {
        if (means_by_arm[static_cast<std::size_t>(arm - 1)] + radius >= bar) {
            kept.push_back(arm);
        }
    }
    if (kept.empty()) {
        // Every arm sits below the cost by more than the radius; keep the
        // empirical best and report that the cost dominates the market.
        if (cost_dominates != nullptr) {
            *cost_dominates = true;
        }
        kept.push_back(best_arm);
    }
    return kept;
}

std::pair<int, ProbabilityVector> sampling_recommendation(int exploit_arm, int explore_arm,
                                                          double explore_rate, bool gate_holds,
                                                          double u, std::size_t m) {
    if (!gate_holds) {
        return {exploit_arm, ProbabilityVector::point_mass(exploit_arm, m)};
    }
    std::vector<double> probs(m, 0.0);
    probs[static_cast<std::size_t>(explore_arm - 1)] += explore_rate;
    probs[static_cast<std::size_t>(exploit_arm - 1)] += 1.0 - explore_rate;
    auto p = ProbabilityVector::validate(std::move(probs), m);
    return {sample_arm(p, u), p};
}

bool fairness_gate(const AgentContext& ctx) {
    return static_cast<double>(ctx.bad_outcomes + 1) <= ctx.tolerance * static_cast<double>(ctx.visits + 1);
}

void ArpParams::check() const {
    if (!(mu1 > c_star)) {
        throw AssumptionViolatedError("known arm mean must strictly exceed the cost");
    }
    if (!(lambda > 0.0 && lambda <= lambda_max(mu1, c_star) + 1e-12)) {
        throw ValidationError("lambda outside (0, 3/4*(mu1-c_star)]");
    }
    if (!(tau > 0.0 && tau < 1.0 - c_star)) {
        throw ValidationError("tau outside (0, 1-c_star)");
    }
    if (theta <= 0.0 || k < 1 || horizon < 1) {
        throw ValidationError("theta, k and horizon must be positive");
    }
}

ArpPolicy::ArpPolicy(ArpParams params, std::size_t m) : params_(params), m_(m) {
    if (m_ < 2) {
        throw ValidationError("need at least two arms");
    }
    params_.check();
    stage_explore_rewards_.resize(m_);
    stage_followed_rewards_.resize(m_);
    sample_means_.assign(m_, 0.0);
    // Stage 1 recommends the known arm with zero exploration disclosed.
    stage_ready_ = true;
    stage_exploit_arm_ = 1;
    stage_explore_rate_ = 0.0;
    stage_history_mean_ = 0.0;
}

void ArpPolicy::begin_stage_lazily(Rng& rng) {
    if (stage_ready_) {
        return;
    }
    // Exploit arm for this stage: best sample mean among arms already sampled.
    std::vector<double> candidates(sample_means_.begin(), sample_means_.begin() + (stage_ - 1));
    stage_exploit_arm_ = select_exploit_arm(candidates, rng);
    stage_history_mean_ =
        rounds_elapsed_ > 0 ? followed_reward_sum_ / static_cast<double>(rounds_elapsed_) : 0.0;
    stage_explore_rate_ = exploration_rate(params_.lambda, params_.c_star, stage_history_mean_);
    stage_ready_ = true;
}

Disclosure ArpPolicy::stage_disclosure() const {
    if (stage_ == 1) {
        return ArpInitialDisclosure{true, 0.0};
    }
    ArpStageDisclosure d;
    d.explore_rate = stage_explore_rate_;
    d.stage_rewards.assign(stage_followed_rewards_.begin(), stage_followed_rewards_.begin() + (stage_ - 1));
    return d;
}

Disclosure ArpPolicy::exploration_disclosure() const {
    ArpExploreDisclosure d;
    d.arm_sample_means = sample_means_;
    d.active_arms = active_;
    return d;
}

int ArpPolicy::exploration_exploit_arm() const {
    int best_arm = active_.front();
    double best = -1.0;
    for (int arm : active_) {
        const double mu = elim_sums_[static_cast<std::size_t>(arm - 1)] /
                          static_cast<double>(elim_counts_[static_cast<std::size_t>(arm - 1)]);
        if (mu > best) {
            best = mu;
            best_arm = arm;
        }
    }
    return best_arm;
}

int ArpPolicy::winner() const {
    if (phase_ != Phase::Exploitation) {
        throw Error("winner undefined before exploitation");
    }
    return winner_;
}

Recommendation ArpPolicy::recommend(const AgentContext& ctx, Rng& rng) {
    Recommendation rec;
    const bool gate = fairness_gate(ctx);
    switch (phase_) {
        case Phase::Sampling: {
            begin_stage_lazily(rng);
            if (stage_ == 1) {
                rec.arm = 1;
                rec.probs = ProbabilityVector::point_mass(1, m_);
                rec.phase = "sampling:stage=1";
                rec.disclosure = stage_disclosure();
                return rec;
            }
            std::uniform_real_distribution<double> uni(0.0, 1.0);
            auto [arm, probs] =
                sampling_recommendation(stage_exploit_arm_, stage_, stage_explore_rate_, gate, uni(rng), m_);
            rec.arm = arm;
            rec.probs = probs;
            rec.propensity = probs.prob_of(arm);
            rec.phase = "sampling:stage=" + std::to_string(stage_);
            rec.disclosure = stage_disclosure();
            return rec;
        }
        case Phase::Exploration: {
            const int arm = gate ? pending_collect_.front() : exploration_exploit_arm();
            rec.arm = arm;
            rec.probs = ProbabilityVector::point_mass(arm, m_);
            rec.phase = "exploration";
            rec.disclosure = exploration_disclosure();
            return rec;
        }
        case Phase::Exploitation: {
            rec.arm = winner_;
            rec.probs = ProbabilityVector::point_mass(winner_, m_);
            rec.phase = "exploitation";
            rec.disclosure = exploration_disclosure();
            return rec;
        }
    }
    throw Error("unreachable policy phase");
}

void ArpPolicy::observe(const Recommendation& rec, bool followed, std::optional<double> reward) {
    if (followed != reward.has_value()) {
        throw Error("observation requires reward exactly when followed");
    }
    rounds_elapsed_ += 1;
    if (followed) {
        followed_reward_sum_ += *reward;
    }
    switch (phase_) {
        case Phase::Sampling: {
            stage_rounds_ += 1;
            if (followed) {
                stage_followed_rewards_[static_cast<std::size_t>(stage_ - 1)].push_back(*reward);
                if (rec.arm == stage_) {
                    stage_explore_rewards_[static_cast<std::size_t>(stage_ - 1)].push_back(*reward);
                    stage_collected_ += 1;
                    if (stage_collected_ == params_.k) {
                        finish_stage();
                    }
                }
            }
            return;
        }
        case Phase::Exploration: {
            if (followed && !pending_collect_.empty() && rec.arm == pending_collect_.front()) {
                const auto idx = static_cast<std::size_t>(rec.arm - 1);
                elim_counts_[idx] += 1;
                elim_sums_[idx] += *reward;
                pending_collect_.erase(pending_collect_.begin());
                if (pending_collect_.empty()) {
                    q_ += 1;
                    run_elimination();
                }
            }
            return;
        }
        case Phase::Exploitation:
            return;
    }
}

void ArpPolicy::finish_stage() {
    const auto idx = static_cast<std::size_t>(stage_ - 1);
    double s = 0.0;
    for (double r : stage_explore_rewards_[idx]) {
        s += r;
    }
    sample_means_[idx] = s / static_cast<double>(stage_explore_rewards_[idx].size());
    if (stage_ == static_cast<int>(m_)) {
        enter_exploration();
        return;
    }
    transitions_.push_back({rounds_elapsed_, "sampling:stage=" + std::to_string(stage_),
                            "sampling:stage=" + std::to_string(stage_ + 1)});
    stage_ += 1;
    stage_ready_ = false;
    stage_collected_ = 0;
    stage_rounds_ = 0;
}

void ArpPolicy::enter_exploration() {
    transitions_.push_back({rounds_elapsed_, "sampling:stage=" + std::to_string(stage_), "exploration"});
    phase_ = Phase::Exploration;
    active_.resize(m_);
    for (std::size_t j = 0; j < m_; ++j) {
        active_[j] = static_cast<int>(j + 1);
    }
    elim_counts_.assign(m_, params_.k);
    elim_sums_.assign(m_, 0.0);
    for (std::size_t j = 0; j < m_; ++j) {
        elim_sums_[j] = sample_means_[j] * static_cast<double>(params_.k);
    }
    q_ = params_.k;
    run_elimination();
}

void ArpPolicy::run_elimination() {
    std::vector<double> means(m_, 0.0);
    for (int arm : active_) {
        const auto idx = static_cast<std::size_t>(arm - 1);
        means[idx] = elim_sums_[idx] / static_cast<double>(elim_counts_[idx]);
    }
    bool dominated = false;
    active_ = elimination_step(means, q_, params_.horizon, params_.theta, params_.c_star, active_, &dominated);
    cost_dominates_ = cost_dominates_ || dominated;
    if (active_.size() == 1) {
        winner_ = active_.front();
        transitions_.push_back({rounds_elapsed_, "exploration", "exploitation"});
        phase_ = Phase::Exploitation;
        return;
    }
    pending_collect_ = active_;
}

std::vector<PhaseTransition> ArpPolicy::take_transitions() {
    auto out = std::move(transitions_);
    transitions_.clear();
    return out;
}

}  // namespace ibandit
