#include "ibandit/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "ibandit/policy_arp.hpp"
#include "ibandit/policy_baselines.hpp"
#include "ibandit/policy_marp.hpp"

namespace ibandit {

double true_loss(const std::vector<double>& true_means, int arm, bool followed) {
    const double best = *std::max_element(true_means.begin(), true_means.end());
    const double mu = true_means.at(static_cast<std::size_t>(arm - 1));
    return best - (followed ? mu : 0.0);
}

double regret(const std::vector<RoundRecord>& records, const std::vector<double>& true_means) {
    const double best = *std::max_element(true_means.begin(), true_means.end());
    double realized = 0.0;
    std::int64_t follows = 0;
    for (const auto& r : records) {
        realized += true_loss(true_means, r.arm, r.followed);
        follows += r.followed ? 1 : 0;
    }
    // Benchmark arm i incurs T*best - mu_i * (number of follows); minimized by
    // the best arm under the same realized action sequence.
    const double benchmark =
        static_cast<double>(records.size()) * best - best * static_cast<double>(follows);
    return realized - benchmark;
}

double cumulative_loss(const std::vector<RoundRecord>& records, const std::vector<double>& true_means) {
    double total = 0.0;
    for (const auto& r : records) {
        total += true_loss(true_means, r.arm, r.followed);
    }
    return total;
}

bool fairness_audit(const AgentContext& before, int arm, const std::vector<double>& true_means,
                    double cost, double gamma) {
    const int unsatisfactory = true_means.at(static_cast<std::size_t>(arm - 1)) < cost ? 1 : 0;
    return static_cast<double>(before.bad_outcomes + unsatisfactory) <=
           gamma * static_cast<double>(before.visits + 1);
}

std::uint64_t mix_seed(std::uint64_t base_seed, std::uint64_t replication) {
    std::uint64_t z = base_seed + (replication + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) {
        throw Error("quantile of an empty sample");
    }
    std::sort(values.begin(), values.end());
    if (values.size() == 1) {
        return values.front();
    }
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

RunResult run_episode(Policy& policy, const RewardModel& model, AgentPopulation& population,
                      std::int64_t horizon, Rng& rng, const EpisodeOptions& options) {
    RunResult out;
    out.true_means = model.true_means;
    const double best = model.best_mean();
    const double b0 = population.prior_belief();

    double loss_sum = 0.0;
    double followed_mean_sum = 0.0;
    std::int64_t follows = 0;
    if (options.keep_paths) {
        out.cumulative_regret_path.reserve(static_cast<std::size_t>(horizon));
        out.cumulative_loss_path.reserve(static_cast<std::size_t>(horizon));
    }
    if (options.keep_records) {
        out.records.reserve(static_cast<std::size_t>(horizon));
    }

    for (std::int64_t t = 1; t <= horizon; ++t) {
        SampledAgent agent = population.next_agent(rng);
        Recommendation rec = policy.recommend(agent.ctx, rng);

        if (!fairness_audit(agent.ctx, rec.arm, model.true_means, agent.ctx.cost, agent.ctx.tolerance)) {
            out.fairness_violations += 1;
        }

        bool followed = false;
        if (!rec.no_recommend) {
            const double belief = rec.disclosure.has_value()
                                      ? belief_from_disclosure(*rec.disclosure, b0)
                                      : rec.transparent_belief.value_or(b0);
            followed = decide(belief, agent.ctx.cost);
        }
        std::optional<double> reward;
        if (followed) {
            reward = sample_reward(model, rec.arm, rng);
        }

        policy.observe(rec, followed, reward);
        population.record_outcome(agent, followed, reward);

        follows += followed ? 1 : 0;
        const double mu = model.true_means[static_cast<std::size_t>(rec.arm - 1)];
        followed_mean_sum += followed ? mu : 0.0;
        loss_sum += best - (followed ? mu : 0.0);
        if (options.keep_paths) {
            out.cumulative_loss_path.push_back(loss_sum);
            out.cumulative_regret_path.push_back(best * static_cast<double>(follows) - followed_mean_sum);
        }
        if (options.keep_records) {
            RoundRecord record;
            record.round = t;
            record.arm = rec.arm;
            record.followed = followed;
            record.reward = reward;
            record.policy_probs = rec.probs;
            record.phase_label = rec.phase;
            record.check(model.arms());
            out.records.push_back(std::move(record));
        }
        if (options.keep_weights) {
            if (auto w = policy.current_weights()) {
                out.weight_paths.push_back(*w);
            }
        }
        if (options.keep_fairness_trajectory) {
            out.fairness_trajectory.push_back(
                {agent.agent_id, t, agent.ctx.visits + 1,
                 agent.ctx.bad_outcomes + ((followed && reward && *reward < agent.ctx.cost) ? 1 : 0)});
        }
    }

    out.realized_regret = best * static_cast<double>(follows) - followed_mean_sum;
    out.loss_regret = loss_sum;
    out.follow_rate = horizon > 0 ? static_cast<double>(follows) / static_cast<double>(horizon) : 0.0;
    out.transitions = policy.take_transitions();
    return out;
}

RewardModel RewardModelSpec::instantiate(Rng& rng) const {
    switch (kind) {
        case RewardModel::Kind::TruncGaussian:
            return RewardModel::trunc_gaussian(gen_gaussian_means(m, rng), gaussian_stdev);
        case RewardModel::Kind::BetaArms:
            return RewardModel::beta_arms(gen_beta_arm_shapes(m, rng));
        case RewardModel::Kind::BernoulliUplift: {
            if (!fixed_means.empty()) {
                return RewardModel::bernoulli_uplift(fixed_means, uplift_n);
            }
            return RewardModel::bernoulli_uplift(gen_uplift_means(m, rng), uplift_n);
        }
        case RewardModel::Kind::FixedMeans:
            return RewardModel::fixed(fixed_means);
    }
    throw Error("unreachable reward spec kind");
}

std::string RewardModelSpec::label() const {
    switch (kind) {
        case RewardModel::Kind::TruncGaussian:
            return "gaussian";
        case RewardModel::Kind::BetaArms:
            return "beta_arms";
        case RewardModel::Kind::BernoulliUplift:
            return "bernoulli_uplift";
        case RewardModel::Kind::FixedMeans:
            return "fixed";
    }
    return "?";
}

bool PolicySpec::needs_known_arm() const {
    return kind == Kind::Arp || kind == Kind::FullTransparency || kind == Kind::FirstBestElim;
}

std::string PolicySpec::label() const {
    switch (kind) {
        case Kind::Arp:
            return "arp";
        case Kind::Marp:
            return full_information ? "marp_full_info" : (eta_anytime ? "marp_anytime" : "marp");
        case Kind::FullTransparency:
            return "full_transparency";
        case Kind::FirstBestElim:
            return "first_best_elim";
        case Kind::EvenDarElim:
            return "even_dar_elim";
        case Kind::Ucb:
            return "ucb";
        case Kind::Thompson:
            return "thompson";
    }
    return "?";
}

namespace {

// Closed-form CDF of Beta(0.5, 3); the uplift mean prior.
double beta_half_three_cdf(double x) {
    x = std::clamp(x, 0.0, 1.0);
    const double s = std::sqrt(x);
    const double raw = 2.0 * s - (4.0 / 3.0) * x * s + 0.4 * x * x * s;
    return raw / (16.0 / 15.0);
}

}  // namespace

double ExperimentSpec::derived_min_prior_prob(double c_star, double tau) const {
    const double bar = c_star + tau;
    switch (rewards.kind) {
        case RewardModel::Kind::TruncGaussian: {
            // Means uniform on [0, 0.6].
            return std::max(1.0 - bar / 0.6, 1e-6);
        }
        case RewardModel::Kind::BetaArms: {
            // Means are the fixed set {1/(1+b) : b = 1..m}, randomly assigned.
            std::size_t count = 0;
            for (std::size_t b = 1; b <= rewards.m; ++b) {
                if (1.0 / (1.0 + static_cast<double>(b)) >= bar) {
                    ++count;
                }
            }
            return std::max(static_cast<double>(count) / static_cast<double>(rewards.m), 1e-6);
        }
        case RewardModel::Kind::BernoulliUplift:
            return std::max(1.0 - beta_half_three_cdf(bar), 1e-6);
        case RewardModel::Kind::FixedMeans: {
            std::size_t count = 0;
            for (double mu : rewards.fixed_means) {
                if (mu >= bar) {
                    ++count;
                }
            }
            return std::max(static_cast<double>(count) / static_cast<double>(rewards.fixed_means.size()),
                            1e-6);
        }
    }
    return 1e-6;
}

void ExperimentSpec::validate() const {
    std::vector<std::string> problems;
    if (rewards.m < 2) {
        problems.push_back("need at least two arms");
    }
    if (rewards.kind == RewardModel::Kind::FixedMeans && rewards.fixed_means.size() != rewards.m) {
        problems.push_back("fixed means must match the arm count");
    }
    if (!rewards.fixed_means.empty() && rewards.fixed_means.size() != rewards.m) {
        problems.push_back("explicit means must match the arm count");
    }
    if (horizon < 1) {
        problems.push_back("horizon must be at least one round");
    }
    if (replications < 1) {
        problems.push_back("need at least one replication");
    }
    if (policy.needs_known_arm() && costs.kind != CostModel::Kind::Constant) {
        problems.push_back(policy.label() + " requires a known constant cost");
    }
    if (policy.kind == PolicySpec::Kind::Arp) {
        if (policy.k < 1) {
            problems.push_back("per-arm sample size k must be at least 1");
        }
        if (costs.kind == CostModel::Kind::Constant &&
            !(policy.tau > 0.0 && policy.tau < 1.0 - costs.constant)) {
            problems.push_back("tau must lie in (0, 1 - cost)");
        }
    }
    if (policy.kind == PolicySpec::Kind::EvenDarElim &&
        (policy.elim_c <= 0.0 || policy.elim_delta <= 0.0 || policy.elim_delta >= 1.0)) {
        problems.push_back("elimination baseline needs c > 0 and delta in (0,1)");
    }
    if (!problems.empty()) {
        std::string msg = "invalid experiment:";
        for (const auto& p : problems) {
            msg += "\n  - " + p;
        }
        throw ValidationError(msg);
    }
}

Realization make_realization(const ExperimentSpec& spec, Rng& rng) {
    Realization real{spec.rewards.instantiate(rng), nullptr, 0.0, 0.0, 0};
    const std::size_t m = real.model.arms();

    // The known-arm value is designer-side knowledge: policies that rely on it
    // use the drawn mean floored at cost + margin; the environment itself
    // stays exactly as drawn.
    const double mu1 = spec.policy.needs_known_arm()
                           ? std::max(real.model.true_means[0], spec.costs.constant + spec.policy.mu1_margin)
                           : real.model.true_means[0];

    switch (spec.policy.kind) {
        case PolicySpec::Kind::Arp: {
            const double c = spec.costs.constant;
            const double min_prob = spec.policy.min_prior_prob > 0.0
                                        ? spec.policy.min_prior_prob
                                        : spec.derived_min_prior_prob(c, spec.policy.tau);
            real.theta = theta_tau(m, spec.policy.tau, min_prob);
            real.lambda = spec.policy.lambda > 0.0 ? spec.policy.lambda : 0.99 * lambda_max(mu1, c);
            real.k = spec.policy.k;
            if (spec.policy.strict_k) {
                const std::int64_t bound = k_theoretical(real.lambda, m, spec.horizon, real.theta);
                real.k = std::max(real.k, bound);
            }
            ArpParams params;
            params.lambda = real.lambda;
            params.tau = spec.policy.tau;
            params.theta = real.theta;
            params.k = real.k;
            params.c_star = c;
            params.mu1 = mu1;
            params.horizon = spec.horizon;
            real.policy = std::make_unique<ArpPolicy>(params, m);
            return real;
        }
        case PolicySpec::Kind::Marp: {
            MarpParams params;
            params.eta_mode =
                spec.policy.eta_anytime ? MarpParams::EtaMode::Anytime : MarpParams::EtaMode::Fixed;
            params.horizon = spec.horizon;
            params.full_information = spec.policy.full_information;
            auto marp = std::make_unique<MarpPolicy>(params, m);
            if (params.full_information) {
                marp->set_true_means(real.model.true_means);
            }
            real.policy = std::move(marp);
            return real;
        }
        case PolicySpec::Kind::FullTransparency:
            real.policy = std::make_unique<FullTransparencyPolicy>(m, spec.costs.constant, mu1);
            return real;
        case PolicySpec::Kind::FirstBestElim: {
            const double c = spec.costs.constant;
            const double min_prob = spec.policy.min_prior_prob > 0.0
                                        ? spec.policy.min_prior_prob
                                        : spec.derived_min_prior_prob(c, spec.policy.tau);
            real.theta = theta_tau(m, spec.policy.tau, min_prob);
            real.policy = std::make_unique<FirstBestElimPolicy>(m, spec.horizon, real.theta, mu1);
            return real;
        }
        case PolicySpec::Kind::EvenDarElim:
            real.policy = std::make_unique<EvenDarElimPolicy>(m, spec.policy.elim_c, spec.policy.elim_delta);
            return real;
        case PolicySpec::Kind::Ucb:
            real.policy = std::make_unique<UcbPolicy>(m);
            return real;
        case PolicySpec::Kind::Thompson:
            real.policy = std::make_unique<ThompsonPolicy>(m);
            return real;
    }
    throw Error("unreachable policy spec kind");
}

RunResult run_one_replication(const ExperimentSpec& spec, std::uint64_t seed,
                              const EpisodeOptions& options) {
    Rng rng(seed);
    Realization real = make_realization(spec, rng);
    AgentPopulation population(spec.population.mode, spec.population.pool_size, spec.costs,
                               spec.population.tolerance, spec.population.per_agent_tolerance,
                               spec.population.prior_belief);
    RunResult result = run_episode(*real.policy, real.model, population, spec.horizon, rng, options);
    result.seed = seed;
    return result;
}

AggregateResult aggregate_from_values(std::vector<double> per_replication) {
    AggregateResult agg;
    agg.per_replication = std::move(per_replication);
    double sum = 0.0;
    for (double v : agg.per_replication) {
        sum += v;
    }
    agg.mean_regret = sum / static_cast<double>(agg.per_replication.size());
    agg.ci_low = quantile(agg.per_replication, 0.05);
    agg.ci_high = quantile(agg.per_replication, 0.95);
    return agg;
}

AggregateResult replicate(const ExperimentSpec& spec, int n_reps, const ReplicateOptions& options) {
    if (n_reps < 1) {
        throw ValidationError("need at least one replication");
    }
    spec.validate();

    std::vector<RunResult> runs(static_cast<std::size_t>(n_reps));
    int jobs = options.jobs;
    if (jobs <= 0) {
        jobs = static_cast<int>(std::thread::hardware_concurrency());
        if (jobs < 1) {
            jobs = 1;
        }
    }
    jobs = std::min(jobs, n_reps);

    EpisodeOptions ep;
    ep.keep_paths = options.keep_mean_path;

    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= n_reps) {
                return;
            }
            runs[static_cast<std::size_t>(r)] =
                run_one_replication(spec, mix_seed(spec.base_seed, static_cast<std::uint64_t>(r)), ep);
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int j = 0; j < jobs; ++j) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    std::vector<double> losses;
    losses.reserve(runs.size());
    AggregateResult agg;
    double realized_sum = 0.0;
    double follow_sum = 0.0;
    for (const auto& run : runs) {
        losses.push_back(run.loss_regret);
        realized_sum += run.realized_regret;
        follow_sum += run.follow_rate;
        agg.total_fairness_violations += run.fairness_violations;
    }
    const auto counts = aggregate_from_values(std::move(losses));
    agg.mean_regret = counts.mean_regret;
    agg.ci_low = counts.ci_low;
    agg.ci_high = counts.ci_high;
    agg.per_replication = counts.per_replication;
    agg.mean_realized_regret = realized_sum / static_cast<double>(n_reps);
    agg.mean_follow_rate = follow_sum / static_cast<double>(n_reps);
    for (const auto& run : runs) {
        agg.per_replication_realized.push_back(run.realized_regret);
    }
    if (options.keep_mean_path) {
        agg.mean_loss_path.assign(static_cast<std::size_t>(spec.horizon), 0.0);
        for (const auto& run : runs) {
            for (std::size_t t = 0; t < run.cumulative_loss_path.size(); ++t) {
                agg.mean_loss_path[t] += run.cumulative_loss_path[t] / static_cast<double>(n_reps);
            }
        }
    }
    if (options.keep_runs) {
        agg.runs = std::move(runs);
    }
    return agg;
}

}  // namespace ibandit
