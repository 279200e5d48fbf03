#include "ibandit/agents.hpp"

#include <algorithm>
#include <cmath>

namespace ibandit {

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) {
        s += x;
    }
    return s / static_cast<double>(v.size());
}

struct BeliefVisitor {
    double prior;

    double operator()(const ArpInitialDisclosure& d) const {
        // The message certifies a known good arm and zero exploration, so the
        // recommendation is the good arm for sure.
        return d.known_arm_exceeds_cost ? 1.0 : prior;
    }

    double operator()(const ArpStageDisclosure& d) const {
        // Explore/exploit blend: with probability explore_rate the arm is the
        // unknown one (worth the history mean), otherwise the best arm the
        // history supports.
        std::size_t count = 0;
        double sum = 0.0;
        double best_stage = -1.0;
        for (const auto& stage : d.stage_rewards) {
            if (stage.empty()) {
                continue;
            }
            for (double r : stage) {
                sum += r;
            }
            count += stage.size();
            best_stage = std::max(best_stage, mean_of(stage));
        }
        const double history_mean = count > 0 ? sum / static_cast<double>(count) : prior;
        const double exploit_value = best_stage >= 0.0 ? best_stage : prior;
        return d.explore_rate * history_mean + (1.0 - d.explore_rate) * exploit_value;
    }

    double operator()(const ArpExploreDisclosure& d) const {
        // Round-robin over the active set is uninformative beyond membership;
        // average the disclosed sample means over the active arms.
        if (d.active_arms.empty()) {
            return prior;
        }
        double s = 0.0;
        for (int arm : d.active_arms) {
            s += d.arm_sample_means.at(static_cast<std::size_t>(arm - 1));
        }
        return s / static_cast<double>(d.active_arms.size());
    }

    double operator()(const MarpRoundDisclosure& d) const {
        const auto& rewards = d.rewards();
        return rewards.empty() ? prior : mean_of(rewards);
    }
};

}  // namespace

double belief_from_disclosure(const Disclosure& d, double prior_belief) {
    return std::visit(BeliefVisitor{prior_belief}, d);
}

bool decide(double belief, double cost) {
    return belief >= cost;
}

bool decide(const Disclosure& d, double prior_belief, double cost) {
    return decide(belief_from_disclosure(d, prior_belief), cost);
}

AgentContext update_fairness(AgentContext ctx, bool followed, std::optional<double> reward, double cost) {
    if (followed != reward.has_value()) {
        throw Error("fairness update requires reward exactly when followed");
    }
    ctx.visits += 1;
    if (followed && *reward < cost) {
        ctx.bad_outcomes += 1;
    }
    return ctx;
}

AgentPopulation::AgentPopulation(Mode mode, std::size_t pool_size, CostModel cost_model, double tolerance,
                                 bool per_agent_tolerance, double prior_belief)
    : mode_(mode),
      pool_size_(pool_size),
      cost_model_(cost_model),
      tolerance_(tolerance),
      per_agent_tolerance_(per_agent_tolerance),
      prior_belief_(prior_belief) {
    if (mode_ == Mode::ReturningPool && pool_size_ < 1) {
        throw ValidationError("returning pool needs at least one member");
    }
    if (prior_belief_ < 0.0 || prior_belief_ > 1.0) {
        throw ValidationError("prior belief must lie in [0,1]");
    }
}

AgentContext AgentPopulation::fresh_context(Rng& rng) {
    AgentContext ctx;
    ctx.cost = sample_cost(cost_model_, rng);
    ctx.visits = 0;
    ctx.bad_outcomes = 0;
    if (per_agent_tolerance_) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        ctx.tolerance = u(rng);
    } else {
        ctx.tolerance = tolerance_;
    }
    ctx.check();
    return ctx;
}

SampledAgent AgentPopulation::next_agent(Rng& rng) {
    if (mode_ == Mode::FreshEveryRound) {
        return SampledAgent{fresh_context(rng), next_id_++, -1};
    }
    if (pool_.empty()) {
        pool_.reserve(pool_size_);
        for (std::size_t i = 0; i < pool_size_; ++i) {
            pool_.push_back(fresh_context(rng));
            pool_ids_.push_back(next_id_++);
        }
    }
    std::uniform_int_distribution<std::size_t> pick(0, pool_size_ - 1);
    const std::size_t slot = pick(rng);
    AgentContext& member = pool_[slot];
    // A member whose unsatisfactory rate already exceeds her tolerance does
    // not come back; a fresh agent takes the slot.
    if (member.visits > 0 &&
        static_cast<double>(member.bad_outcomes) > member.tolerance * static_cast<double>(member.visits)) {
        member = fresh_context(rng);
        pool_ids_[slot] = next_id_++;
    }
    return SampledAgent{member, pool_ids_[slot], static_cast<int>(slot)};
}

void AgentPopulation::record_outcome(const SampledAgent& agent, bool followed, std::optional<double> reward) {
    if (mode_ == Mode::FreshEveryRound) {
        return;
    }
    const auto slot = static_cast<std::size_t>(agent.pool_slot);
    pool_[slot] = update_fairness(pool_[slot], followed, reward, pool_[slot].cost);
}

}  // namespace ibandit
