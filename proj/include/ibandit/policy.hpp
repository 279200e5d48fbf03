#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ibandit/core.hpp"

namespace ibandit {

struct PhaseTransition {
    std::int64_t round = 0;
    std::string from;
    std::string to;
};

// What a policy hands the engine for one round. ARP/MARP attach a Disclosure;
// fully transparent baselines instead expose the recommended arm's believed
// mean (empty when the arm has no data yet).
struct Recommendation {
    int arm = 1;  // 1-based
    ProbabilityVector probs = ProbabilityVector::uniform(1);
    std::string phase;
    std::optional<Disclosure> disclosure;
    std::optional<double> transparent_belief;
    // Probability the sampler assigned to the chosen arm (1 for deterministic
    // branches); importance-weighted loss estimation divides by this.
    double propensity = 1.0;
    // Full-transparency sentinel: the gate failed and nothing is recommended.
    bool no_recommend = false;
};

class Policy {
  public:
    virtual ~Policy() = default;
    virtual Recommendation recommend(const AgentContext& ctx, Rng& rng) = 0;
    virtual void observe(const Recommendation& rec, bool followed, std::optional<double> reward) = 0;
    virtual std::string name() const = 0;
    virtual std::vector<PhaseTransition> take_transitions() { return {}; }
    // Per-round probability vectors for trajectory dumps; empty by default.
    virtual std::optional<ProbabilityVector> current_weights() const { return std::nullopt; }
};

// Pre-recommendation fairness check H(t): the agent could absorb one more
// unsatisfactory recommendation within her tolerance.
bool fairness_gate(const AgentContext& ctx);

}  // namespace ibandit
