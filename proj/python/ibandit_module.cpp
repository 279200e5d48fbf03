#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ibandit/agents.hpp"
#include "ibandit/config.hpp"
#include "ibandit/criteo.hpp"
#include "ibandit/engine.hpp"
#include "ibandit/policy_arp.hpp"
#include "ibandit/policy_marp.hpp"

namespace py = pybind11;
using namespace ibandit;

namespace {

// Deterministic engines seeded per call keep the python surface stateless.
Rng make_rng(std::uint64_t seed) { return Rng(seed); }

std::vector<RoundRecord> records_from_tuples(
    const std::vector<std::tuple<int, bool, double>>& rounds, std::size_t m) {
    std::vector<RoundRecord> records;
    std::int64_t t = 1;
    for (const auto& [arm, followed, reward] : rounds) {
        RoundRecord r;
        r.round = t++;
        r.arm = arm;
        r.followed = followed;
        if (followed) {
            r.reward = reward;
        }
        r.policy_probs = ProbabilityVector::point_mass(arm, m);
        r.check(m);
        records.push_back(std::move(r));
    }
    return records;
}

py::dict run_experiment(const std::string& config_text, int reps_override, int jobs) {
    Config cfg = Config::from_text(config_text);
    ExperimentSpec spec = cfg.resolve();
    const int reps = reps_override > 0 ? reps_override : spec.replications;
    ReplicateOptions opts;
    opts.jobs = jobs;
    const AggregateResult agg = replicate(spec, reps, opts);
    py::dict out;
    out["policy"] = spec.policy.label();
    out["mean_regret"] = agg.mean_regret;
    out["ci_low"] = agg.ci_low;
    out["ci_high"] = agg.ci_high;
    out["mean_realized_regret"] = agg.mean_realized_regret;
    out["mean_follow_rate"] = agg.mean_follow_rate;
    out["fairness_violations"] = agg.total_fairness_violations;
    out["per_replication"] = agg.per_replication;
    return out;
}

}  // namespace

PYBIND11_MODULE(_ibandit, m) {
    m.doc() = "Incentive-aware recommendation simulator";

    m.def("validate_prob_vector", [](const std::vector<double>& entries) {
        return ProbabilityVector::validate(entries).entries();
    });
    m.def("sample_arm", [](const std::vector<double>& probs, double u) {
        return sample_arm(ProbabilityVector::validate(probs), u);
    });

    m.def("gen_gaussian_means", [](std::size_t arms, std::uint64_t seed) {
        auto rng = make_rng(seed);
        return gen_gaussian_means(arms, rng);
    });
    m.def("gen_beta_arm_shapes", [](std::size_t arms, std::uint64_t seed) {
        auto rng = make_rng(seed);
        return gen_beta_arm_shapes(arms, rng);
    });
    m.def("gen_uplift_means", [](std::size_t arms, std::uint64_t seed) {
        auto rng = make_rng(seed);
        return gen_uplift_means(arms, rng);
    });

    m.def("lambda_max", &lambda_max);
    m.def("theta_tau", &theta_tau);
    m.def("k_theoretical", &k_theoretical);
    m.def("exploration_rate", &exploration_rate);
    m.def("fairness_gate", [](std::int64_t visits, std::int64_t bad, double tolerance) {
        AgentContext ctx;
        ctx.visits = visits;
        ctx.bad_outcomes = bad;
        ctx.tolerance = tolerance;
        return fairness_gate(ctx);
    });
    m.def("elimination_step",
          [](const std::vector<double>& means, std::int64_t q, std::int64_t horizon, double theta,
             double c_star, const std::vector<int>& active) {
              return elimination_step(means, q, horizon, theta, c_star, active);
          });

    m.def("marp_eta", [](std::size_t arms, std::int64_t horizon, bool anytime, std::int64_t t) {
        MarpParams p;
        p.eta_mode = anytime ? MarpParams::EtaMode::Anytime : MarpParams::EtaMode::Fixed;
        p.horizon = horizon;
        return marp_eta(p, arms, t);
    });
    m.def("estimated_loss", [](int i, int recommended, bool followed, double reward, double p_i) {
        return estimated_loss(i, recommended, followed,
                              followed ? std::optional<double>(reward) : std::nullopt, p_i);
    });
    m.def("update_weights", [](const std::vector<double>& cum_losses, double eta) {
        return update_weights(cum_losses, eta).entries();
    });

    m.def("true_loss", &true_loss);
    m.def("regret", [](const std::vector<std::tuple<int, bool, double>>& rounds,
                       const std::vector<double>& means) {
        return regret(records_from_tuples(rounds, means.size()), means);
    });
    m.def("cumulative_loss", [](const std::vector<std::tuple<int, bool, double>>& rounds,
                                const std::vector<double>& means) {
        return cumulative_loss(records_from_tuples(rounds, means.size()), means);
    });
    m.def("fairness_audit", [](std::int64_t visits, std::int64_t bad, int arm,
                               const std::vector<double>& means, double cost, double gamma) {
        AgentContext ctx;
        ctx.visits = visits;
        ctx.bad_outcomes = bad;
        return fairness_audit(ctx, arm, means, cost, gamma);
    });
    m.def("mix_seed", &mix_seed);
    m.def("quantile", &quantile);

    m.def("kmeans", [](const std::vector<std::vector<double>>& features,
                       const std::vector<int>& exposure, const std::vector<int>& visit, std::size_t k,
                       std::uint64_t seed) {
        std::vector<criteo::UpliftRow> rows(features.size());
        for (std::size_t r = 0; r < features.size(); ++r) {
            if (features[r].size() != criteo::kFeatureCount) {
                throw SchemaError("each row needs exactly 12 features");
            }
            std::copy(features[r].begin(), features[r].end(), rows[r].features.begin());
            rows[r].exposure = exposure.at(r);
            rows[r].visit = visit.at(r);
        }
        auto rng = make_rng(seed);
        const auto result = criteo::kmeans(rows, k, rng);
        py::dict out;
        out["assignment"] = result.assignment;
        out["inertia"] = result.inertia;
        out["arm_means"] = criteo::arm_means(rows, result.assignment, k);
        return out;
    });

    m.def("run_experiment", &run_experiment, py::arg("config_text"), py::arg("reps") = 0,
          py::arg("jobs") = 1);
}
