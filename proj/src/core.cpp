#include "ibandit/core.hpp"

#include <cmath>
#include <sstream>

namespace ibandit {

ProbabilityVector ProbabilityVector::validate(std::vector<double> entries, std::size_t expected_len) {
    if (entries.empty()) {
        throw WrongLengthError("probability vector must be nonempty");
    }
    if (expected_len != 0 && entries.size() != expected_len) {
        throw WrongLengthError("probability vector has length " + std::to_string(entries.size()) +
                               ", expected " + std::to_string(expected_len));
    }
    double sum = 0.0;
    for (double e : entries) {
        if (e < 0.0 || !std::isfinite(e)) {
            throw NegativeEntryError("probability entry " + std::to_string(e) + " is negative or non-finite");
        }
        sum += e;
    }
    if (std::abs(sum - 1.0) > kProbSumTolerance) {
        throw SumNotOneError("probabilities sum to " + std::to_string(sum));
    }
    for (double& e : entries) {
        e /= sum;
    }
    return ProbabilityVector(std::move(entries));
}

ProbabilityVector ProbabilityVector::point_mass(int arm, std::size_t m) {
    std::vector<double> e(m, 0.0);
    e.at(static_cast<std::size_t>(arm - 1)) = 1.0;
    return ProbabilityVector(std::move(e));
}

ProbabilityVector ProbabilityVector::uniform(std::size_t m) {
    return ProbabilityVector(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

int sample_arm(const ProbabilityVector& p, double u) {
    if (!(u >= 0.0 && u < 1.0)) {
        throw Error("sample_arm requires u in [0,1), got " + std::to_string(u));
    }
    double cum = 0.0;
    const auto& e = p.entries();
    for (std::size_t j = 0; j < e.size(); ++j) {
        cum += e[j];
        if (u < cum) {
            return static_cast<int>(j + 1);
        }
    }
    // Rounding can leave cum a hair below 1; fall back to the last arm with mass.
    for (std::size_t j = e.size(); j-- > 0;) {
        if (e[j] > 0.0) {
            return static_cast<int>(j + 1);
        }
    }
    return static_cast<int>(e.size());
}

void ArmStats::add_reward(double reward) {
    if (reward < 0.0 || reward > 1.0) {
        throw Error("reward " + std::to_string(reward) + " outside [0,1]");
    }
    ++pulls;
    reward_sum += reward;
}

double ArmStats::mean() const {
    if (pulls <= 0) {
        throw InsufficientSamplesError("empirical mean undefined with zero pulls");
    }
    return reward_sum / static_cast<double>(pulls);
}

void AgentContext::check() const {
    if (!(cost > 0.0 && cost < 1.0)) {
        throw Error("agent cost must lie strictly inside (0,1)");
    }
    if (tolerance < 0.0 || tolerance > 1.0) {
        throw Error("agent tolerance must lie in [0,1]");
    }
    if (visits < 0 || bad_outcomes < 0 || bad_outcomes > visits) {
        throw Error("agent context requires 0 <= bad_outcomes <= visits");
    }
}

void RoundRecord::check(std::size_t m) const {
    if (arm < 1 || arm > static_cast<int>(m)) {
        throw Error("round record arm index out of range");
    }
    if (reward.has_value() != followed) {
        throw Error("round record reward must be present exactly when followed");
    }
}

std::string RoundRecord::csv_row(const std::string& policy_name) const {
    std::ostringstream os;
    os << round << ',' << policy_name << ',' << arm << ',' << (followed ? 1 : 0) << ',';
    if (reward.has_value()) {
        os << *reward;
    }
    os << ',' << phase_label;
    return os.str();
}

}  // namespace ibandit
