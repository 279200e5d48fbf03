#pragma once

#include <optional>
#include <vector>

#include "ibandit/core.hpp"
#include "ibandit/rewards.hpp"

namespace ibandit {

// Belief an agent forms about the recommended arm's expected reward, given
// only the designer's message. prior_belief is the fallback when the message
// carries no usable history.
double belief_from_disclosure(const Disclosure& d, double prior_belief);

// Myopic decision: pull iff believed expected reward covers the cost.
bool decide(double belief, double cost);
bool decide(const Disclosure& d, double prior_belief, double cost);

// Post-round context update: one more visit; one more bad outcome iff the
// agent followed and the realized reward fell below her cost.
AgentContext update_fairness(AgentContext ctx, bool followed, std::optional<double> reward, double cost);

// Sampled agent for one round plus the pool slot it came from (slot < 0 for
// fresh-per-round populations).
struct SampledAgent {
    AgentContext ctx;
    std::int64_t agent_id = 0;
    int pool_slot = -1;
};

// Agent arrival process. FreshEveryRound creates a zero-history agent per
// round. ReturningPool keeps P persistent agents, sampled uniformly; a member
// whose history already exceeds her own tolerance (bad/visits > tolerance)
// leaves the market and is replaced by a fresh agent before the round.
class AgentPopulation {
  public:
    enum class Mode { FreshEveryRound, ReturningPool };

    // tolerance: fixed tolerance for every agent; if per_agent_tolerance is
    // set, each new agent instead draws tolerance uniformly from [0,1].
    AgentPopulation(Mode mode, std::size_t pool_size, CostModel cost_model, double tolerance,
                    bool per_agent_tolerance = false, double prior_belief = 0.5);

    SampledAgent next_agent(Rng& rng);
    void record_outcome(const SampledAgent& agent, bool followed, std::optional<double> reward);

    double prior_belief() const { return prior_belief_; }
    Mode mode() const { return mode_; }

  private:
    AgentContext fresh_context(Rng& rng);

    Mode mode_;
    std::size_t pool_size_;
    CostModel cost_model_;
    double tolerance_;
    bool per_agent_tolerance_;
    double prior_belief_;
    std::vector<AgentContext> pool_;
    std::vector<std::int64_t> pool_ids_;
    std::int64_t next_id_ = 0;
};

}  // namespace ibandit
