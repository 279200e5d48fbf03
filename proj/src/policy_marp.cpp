#include "ibandit/policy_marp.hpp"

#include <algorithm>
#include <cmath>

namespace ibandit {

void MarpParams::check() const {
    if (eta_mode == EtaMode::Fixed && horizon < 1) {
        throw ValidationError("fixed learning rate needs a horizon of at least one round");
    }
}

double marp_eta(const MarpParams& params, std::size_t m, std::int64_t t) {
    if (t < 1) {
        throw ValidationError("round index must be at least one");
    }
    const double lnm = std::log(static_cast<double>(m));
    if (params.eta_mode == MarpParams::EtaMode::Fixed) {
        return std::sqrt(8.0 * lnm / static_cast<double>(params.horizon));
    }
    return std::sqrt(8.0 * lnm / static_cast<double>(t));
}

double estimated_loss(int i, int recommended, bool followed, std::optional<double> reward, double p_i) {
    if (followed != reward.has_value()) {
        throw Error("estimated loss needs a reward exactly when followed");
    }
    if (i != recommended) {
        return 0.0;
    }
    if (!followed) {
        return 0.0;
    }
    if (p_i <= 0.0) {
        throw ZeroPropensityError("recommended arm has zero propensity");
    }
    return -(*reward) / p_i;
}

ProbabilityVector update_weights(const std::vector<double>& cum_losses, double eta) {
    if (eta <= 0.0) {
        throw ValidationError("eta must be positive");
    }
    if (cum_losses.empty()) {
        throw ValidationError("need at least one arm");
    }
    const double shift = *std::min_element(cum_losses.begin(), cum_losses.end());
    std::vector<double> w(cum_losses.size());
    double sum = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
        w[j] = std::exp(-eta * (cum_losses[j] - shift));
        sum += w[j];
    }
    for (double& x : w) {
        x /= sum;
    }
    return ProbabilityVector::validate(std::move(w), cum_losses.size());
}

MarpPolicy::MarpPolicy(MarpParams params, std::size_t m) : params_(params), m_(m) {
    if (m_ < 2) {
        throw ValidationError("need at least two arms");
    }
    params_.check();
    cum_losses_.assign(m_, 0.0);
    followed_rewards_ = std::make_shared<std::vector<double>>();
}

void MarpPolicy::set_true_means(std::vector<double> means) {
    if (means.size() != m_) {
        throw ValidationError("true means length must match the arm count");
    }
    true_means_ = std::move(means);
}

std::optional<ProbabilityVector> MarpPolicy::current_weights() const {
    if (t_ == 1) {
        return ProbabilityVector::uniform(m_);
    }
    return update_weights(cum_losses_, marp_eta(params_, m_, t_));
}

Recommendation MarpPolicy::recommend(const AgentContext& ctx, Rng& rng) {
    Recommendation rec;
    rec.phase = "marp";
    MarpRoundDisclosure d;
    d.followed_rewards = followed_rewards_;
    rec.disclosure = Disclosure{d};

    const ProbabilityVector probs =
        t_ == 1 ? ProbabilityVector::uniform(m_) : update_weights(cum_losses_, marp_eta(params_, m_, t_));
    if (fairness_gate(ctx)) {
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        rec.arm = sample_arm(probs, uni(rng));
        rec.probs = probs;
        rec.propensity = probs.prob_of(rec.arm);
    } else {
        // Deterministic exploitation: lowest-index minimizer of cumulative loss.
        const double best = *std::min_element(cum_losses_.begin(), cum_losses_.end());
        int arm = 1;
        for (std::size_t j = 0; j < m_; ++j) {
            if (cum_losses_[j] == best) {
                arm = static_cast<int>(j + 1);
                break;
            }
        }
        rec.arm = arm;
        rec.probs = ProbabilityVector::point_mass(arm, m_);
        rec.propensity = 1.0;
    }
    return rec;
}

void MarpPolicy::observe(const Recommendation& rec, bool followed, std::optional<double> reward) {
    if (followed != reward.has_value()) {
        throw Error("observation requires reward exactly when followed");
    }
    if (params_.full_information) {
        if (true_means_.empty()) {
            throw ValidationError("full-information variant needs true means");
        }
        const double best = *std::max_element(true_means_.begin(), true_means_.end());
        for (std::size_t j = 0; j < m_; ++j) {
            cum_losses_[j] += best - (followed ? true_means_[j] : 0.0);
        }
    } else {
        cum_losses_[static_cast<std::size_t>(rec.arm - 1)] +=
            estimated_loss(rec.arm, rec.arm, followed, reward, rec.propensity);
    }
    if (followed) {
        followed_rewards_->push_back(*reward);
    }
    t_ += 1;
}

}  // namespace ibandit
