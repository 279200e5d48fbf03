#include <filesystem>
#include <fstream>
#include <iostream>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "ibandit/config.hpp"
#include "ibandit/criteo.hpp"
#include "ibandit/engine.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = "out";
    std::int64_t seed = -1;
    int jobs = 0;
    bool strict = false;
    bool dry_run = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config file");
    cmd->add_option("--set", args.overrides, "override config keys, key=value")->take_all();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "base seed override");
    cmd->add_option("--jobs", args.jobs, "parallel replications (0 = auto)");
    cmd->add_flag("--strict", args.strict, "enforce the theoretical per-arm sample bound");
    cmd->add_flag("--dry-run", args.dry_run, "print the resolved config and exit");
}

ibandit::Config load_config(const CommonArgs& args) {
    ibandit::Config cfg = args.config_path.empty() ? ibandit::Config::from_text("")
                                                   : ibandit::Config::from_file(args.config_path);
    cfg.apply_env_overrides();
    for (const auto& kv : args.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw ibandit::ValidationError("--set expects key=value, got '" + kv + "'");
        }
        cfg.apply_override(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (args.seed >= 0) {
        cfg.apply_override("seed", std::to_string(args.seed));
    }
    if (args.strict) {
        cfg.apply_override("strict", "true");
    }
    return cfg;
}

void print_resolved(const ibandit::Config& cfg) {
    for (const auto& [k, v] : cfg.resolved_echo()) {
        std::cout << k << " = " << v << "\n";
    }
}

std::string summary_row(const ibandit::ExperimentSpec& spec, int reps,
                        const ibandit::AggregateResult& agg) {
    std::ostringstream os;
    os << spec.policy.label() << ',' << spec.rewards.m << ',' << ibandit::cost_spec_label(spec.costs)
       << ',' << spec.rewards.label() << ',' << spec.horizon << ',' << reps << ',' << agg.mean_regret
       << ',' << agg.ci_low << ',' << agg.ci_high;
    return os.str();
}

const char* kSummaryHeader = "policy,m,cost_spec,reward_model,T,reps,mean_regret,ci_low,ci_high";

void write_manifest(std::ostream& out, const ibandit::Config& cfg, const ibandit::ExperimentSpec& spec,
                    const ibandit::AggregateResult& agg) {
    json header;
    header["type"] = "config";
    header["resolved"] = cfg.resolved_echo();
    out << header.dump() << "\n";
    for (std::size_t r = 0; r < agg.runs.size(); ++r) {
        const auto& run = agg.runs[r];
        json line;
        line["type"] = "replication";
        line["rep"] = r;
        line["seed"] = run.seed;
        line["true_means"] = run.true_means;
        line["regret"] = run.loss_regret;
        line["realized_regret"] = run.realized_regret;
        line["follow_rate"] = run.follow_rate;
        line["fairness_violations"] = run.fairness_violations;
        out << line.dump() << "\n";
    }
    json footer;
    footer["type"] = "summary";
    footer["policy"] = spec.policy.label();
    footer["mean_regret"] = agg.mean_regret;
    footer["ci_low"] = agg.ci_low;
    footer["ci_high"] = agg.ci_high;
    footer["mean_realized_regret"] = agg.mean_realized_regret;
    footer["mean_follow_rate"] = agg.mean_follow_rate;
    footer["fairness_violations"] = agg.total_fairness_violations;
    out << footer.dump() << "\n";
}

int cmd_run(const CommonArgs& args) {
    const ibandit::Config cfg = load_config(args);
    const ibandit::ExperimentSpec spec = cfg.resolve();
    if (args.dry_run) {
        print_resolved(cfg);
        return 0;
    }
    fs::create_directories(args.out_dir);
    if (!fs::exists(args.out_dir)) {
        std::cerr << "error: cannot create output directory " << args.out_dir << "\n";
        return 1;
    }

    ibandit::ReplicateOptions opts;
    opts.jobs = args.jobs;
    opts.keep_runs = true;
    opts.keep_mean_path = true;
    const auto agg = ibandit::replicate(spec, spec.replications, opts);

    std::ofstream summary(fs::path(args.out_dir) / "summary.csv");
    summary << kSummaryHeader << "\n" << summary_row(spec, spec.replications, agg) << "\n";

    std::ofstream path_csv(fs::path(args.out_dir) / "regret_path.csv");
    path_csv << "t,policy,mean_cum_regret\n";
    for (std::size_t t = 0; t < agg.mean_loss_path.size(); ++t) {
        path_csv << (t + 1) << ',' << spec.policy.label() << ',' << agg.mean_loss_path[t] << "\n";
    }

    std::ofstream manifest(fs::path(args.out_dir) / "manifest.jsonl");
    write_manifest(manifest, cfg, spec, agg);

    // Optional per-round logs, first replication only.
    if (cfg.get_bool("log.records", false) || cfg.get_bool("log.weights", false) ||
        cfg.get_bool("log.transitions", false) || cfg.get_bool("log.fairness", false)) {
        ibandit::EpisodeOptions ep;
        ep.keep_records = cfg.get_bool("log.records", false);
        ep.keep_weights = cfg.get_bool("log.weights", false);
        ep.keep_fairness_trajectory = cfg.get_bool("log.fairness", false);
        const auto run = ibandit::run_one_replication(spec, ibandit::mix_seed(spec.base_seed, 0), ep);
        if (ep.keep_records) {
            std::ofstream rec(fs::path(args.out_dir) / "rounds.csv");
            rec << ibandit::kRoundRecordCsvHeader << "\n";
            for (const auto& r : run.records) {
                rec << r.csv_row(spec.policy.label()) << "\n";
            }
        }
        if (ep.keep_weights && !run.weight_paths.empty()) {
            std::ofstream w(fs::path(args.out_dir) / "weights.csv");
            for (const auto& probs : run.weight_paths) {
                for (std::size_t j = 0; j < probs.size(); ++j) {
                    w << (j ? "," : "") << probs[j];
                }
                w << "\n";
            }
        }
        if (cfg.get_bool("log.transitions", false)) {
            std::ofstream tr(fs::path(args.out_dir) / "transitions.jsonl");
            for (const auto& t : run.transitions) {
                json line;
                line["round"] = t.round;
                line["from"] = t.from;
                line["to"] = t.to;
                tr << line.dump() << "\n";
            }
        }
        if (ep.keep_fairness_trajectory) {
            std::ofstream ftr(fs::path(args.out_dir) / "fairness.csv");
            ftr << "agent_id,round,alpha,beta\n";
            for (const auto& s : run.fairness_trajectory) {
                ftr << s.agent_id << ',' << s.round << ',' << s.alpha << ',' << s.beta << "\n";
            }
        }
    }

    std::cout << kSummaryHeader << "\n" << summary_row(spec, spec.replications, agg) << "\n";
    return 0;
}

int cmd_sweep(const CommonArgs& args) {
    const ibandit::Config base = load_config(args);
    const auto cells = ibandit::sweep_cells(base);
    if (args.dry_run) {
        for (const auto& cell : cells) {
            std::cout << cell.policy << " m=" << cell.m << " cost=" << cell.cost_spec << "\n";
        }
        return 0;
    }
    fs::create_directories(args.out_dir);
    std::ofstream summary(fs::path(args.out_dir) / "sweep.csv");
    summary << kSummaryHeader << "\n";
    int failures = 0;
    for (const auto& cell : cells) {
        try {
            const ibandit::Config cfg = ibandit::config_for_cell(base, cell);
            const ibandit::ExperimentSpec spec = cfg.resolve();
            ibandit::ReplicateOptions opts;
            opts.jobs = args.jobs;
            const auto agg = ibandit::replicate(spec, spec.replications, opts);
            const std::string row = summary_row(spec, spec.replications, agg);
            summary << row << "\n";
            std::cout << row << "\n";
        } catch (const std::exception& e) {
            ++failures;
            std::cerr << "cell " << cell.policy << " m=" << cell.m << " cost=" << cell.cost_spec
                      << " failed: " << e.what() << "\n";
        }
    }
    if (failures > 0) {
        std::cerr << failures << " sweep cells failed\n";
    }
    return 0;
}

int cmd_report(const std::string& manifest_path, const std::string& out_path) {
    std::ifstream in(manifest_path);
    if (!in) {
        std::cerr << "error: cannot open " << manifest_path << "\n";
        return 1;
    }
    std::vector<double> regrets;
    std::string policy = "?";
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        const auto j = json::parse(line);
        if (j["type"] == "replication") {
            regrets.push_back(j["regret"].get<double>());
        } else if (j["type"] == "summary") {
            policy = j.value("policy", "?");
        }
    }
    if (regrets.empty()) {
        std::cerr << "error: no replication lines in " << manifest_path << "\n";
        return 1;
    }
    const auto agg = ibandit::aggregate_from_values(regrets);
    std::ostringstream row;
    row << policy << ',' << regrets.size() << ',' << agg.mean_regret << ',' << agg.ci_low << ','
        << agg.ci_high;
    std::cout << "policy,reps,mean_regret,ci_low,ci_high\n" << row.str() << "\n";
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << "policy,reps,mean_regret,ci_low,ci_high\n" << row.str() << "\n";
    }
    return 0;
}

int cmd_ingest(const std::string& input, const std::string& output, std::size_t k, std::size_t max_rows,
               std::uint64_t seed) {
    ibandit::Rng rng(seed);
    const auto rows = ibandit::criteo::load_rows(input, max_rows, rng);
    if (k > rows.size()) {
        std::cerr << "error: K=" << k << " exceeds the " << rows.size() << " loaded rows\n";
        return 1;
    }
    const auto clusters = ibandit::criteo::kmeans(rows, k, rng);
    const auto means = ibandit::criteo::arm_means(rows, clusters.assignment, k);
    std::vector<std::int64_t> sizes(k, 0);
    for (int c : clusters.assignment) {
        sizes[static_cast<std::size_t>(c)] += 1;
    }
    const std::string manifest = ibandit::criteo::manifest_json(means, sizes);
    if (output.empty()) {
        std::cout << manifest << "\n";
    } else {
        std::ofstream out(output);
        if (!out) {
            std::cerr << "error: cannot write " << output << "\n";
            return 1;
        }
        out << manifest << "\n";
        std::cout << "wrote " << output << " (K=" << k << ", rows=" << rows.size() << ")\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"incentive-aware recommendation benchmark"};
    app.require_subcommand(1);

    CommonArgs run_args;
    auto* run = app.add_subcommand("run", "run one experiment and write summary outputs");
    add_common(run, run_args);

    CommonArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "run a policy x arms x cost grid");
    add_common(sweep, sweep_args);

    std::string report_manifest;
    std::string report_out;
    auto* report = app.add_subcommand("report", "re-aggregate an existing run manifest");
    report->add_option("manifest", report_manifest, "manifest.jsonl from a previous run")->required();
    report->add_option("--out", report_out, "optional output CSV path");

    std::string ingest_input;
    std::string ingest_output;
    std::size_t ingest_k = 20;
    std::size_t ingest_max_rows = 100000;
    std::int64_t ingest_seed = 1;
    auto* ingest = app.add_subcommand("ingest-criteo", "cluster an uplift CSV into arm means");
    ingest->add_option("input", ingest_input, "uplift CSV with 12 features, exposure, visit")->required();
    ingest->add_option("--out", ingest_output, "manifest JSON path (stdout if omitted)");
    ingest->add_option("--K", ingest_k, "cluster count");
    ingest->add_option("--max-rows", ingest_max_rows, "subsample size (0 = all)");
    ingest->add_option("--seed", ingest_seed, "subsampling / clustering seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(run_args);
        }
        if (sweep->parsed()) {
            return cmd_sweep(sweep_args);
        }
        if (report->parsed()) {
            return cmd_report(report_manifest, report_out);
        }
        if (ingest->parsed()) {
            return cmd_ingest(ingest_input, ingest_output, ingest_k, ingest_max_rows,
                              static_cast<std::uint64_t>(ingest_seed));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
