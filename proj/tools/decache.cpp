// decache: decentralized coded caching toolkit.
//
// Subcommands:
//   rate         exact zero-error and delta-corrected worst-case rates
//   certify      per-demand optimality certification (|B| = delivery = formula)
//   simulate     end-to-end placement/delivery/channel/decode trials
//   indexcoding  alpha, kappa and ECIC length bounds for an instance file

#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "decache/harness.hpp"

namespace {

using decache::harness::ExperimentConfig;

struct CommonFlags {
    std::string p = "1/2";
    std::string mode = "idealized";
    std::string demand = "worst-all";
    std::string channel = "random";
    std::string config_path;
};

void add_common(CLI::App* cmd, ExperimentConfig& cfg, CommonFlags& flags) {
    cmd->add_option("--scenario", cfg.scenario, "scenario label for the output records");
    cmd->add_option("--N", cfg.caching.num_files, "number of files");
    cmd->add_option("--K", cfg.caching.num_users, "number of users");
    cmd->add_option("--p", flags.p, "caching probability as a rational a/b");
    cmd->add_option("--F", cfg.caching.file_bits, "file size in bits");
    cmd->add_option("--delta", cfg.delta, "number of correctable transmission errors");
    cmd->add_option("--mode", flags.mode, "placement mode: idealized | bernoulli");
    cmd->add_option("--demand", flags.demand, "worst-all | explicit list '1,2,3' | random:COUNT");
    cmd->add_option("--channel", flags.channel, "random | adversarial-exhaustive");
    cmd->add_option("--seed", cfg.caching.seed, "master seed");
    cmd->add_option("--trials", cfg.trials, "trial count for simulate");
    cmd->add_option("--format", cfg.format, "output format: json | csv");
    cmd->add_option("--out", cfg.out_path, "write machine-readable output to this path");
    cmd->add_option("--config", flags.config_path, "key=value config file; overrides flags");
    cmd->add_flag("--timing", cfg.emit_timing, "include measured wall time in the output");
}

// flags first, then the config file on top
void finalize(ExperimentConfig& cfg, const CommonFlags& flags) {
    decache::harness::apply_config_entry(cfg, "p", flags.p);
    decache::harness::apply_config_entry(cfg, "mode", flags.mode);
    decache::harness::apply_config_entry(cfg, "demand", flags.demand);
    decache::harness::apply_config_entry(cfg, "channel", flags.channel);
    if (!flags.config_path.empty())
        for (const auto& [key, value] : decache::harness::parse_config_file(flags.config_path))
            decache::harness::apply_config_entry(cfg, key, value);
}

void emit(const ExperimentConfig& cfg, const std::vector<decache::harness::ResultRecord>& records,
          bool as_array) {
    const std::string text = decache::harness::render(cfg, records, as_array);
    std::cout << text;
    decache::harness::write_output(cfg, text);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"decentralized coded caching with error-correcting delivery"};
    app.require_subcommand(1);

    ExperimentConfig cfg;
    CommonFlags flags;

    auto* rate = app.add_subcommand("rate", "exact delivery rates");
    add_common(rate, cfg, flags);

    auto* certify = app.add_subcommand("certify", "optimality certification over demand vectors");
    add_common(certify, cfg, flags);

    auto* simulate = app.add_subcommand("simulate", "end-to-end decode trials over a noisy link");
    add_common(simulate, cfg, flags);

    auto* indexcoding = app.add_subcommand("indexcoding", "analyze an index coding instance file");
    std::string instance_path;
    indexcoding->add_option("instance", instance_path, "instance file")->required();
    std::size_t ic_delta = 0;
    indexcoding->add_option("--delta", ic_delta, "number of correctable transmission errors");

    CLI11_PARSE(app, argc, argv);

    try {
        if (rate->parsed()) {
            finalize(cfg, flags);
            emit(cfg, {decache::harness::cmd_rate(cfg)}, false);
            return 0;
        }
        if (certify->parsed()) {
            finalize(cfg, flags);
            const auto result = decache::harness::cmd_certify(cfg);
            emit(cfg, result.records, true);
            if (!result.all_certified) {
                for (const auto& r : result.records)
                    if (!r.certified) std::cerr << "certification failed for demand " << r.demand << "\n";
                return 1;
            }
            std::cerr << "certified " << result.records.size() << " demand vectors\n";
            return 0;
        }
        if (simulate->parsed()) {
            finalize(cfg, flags);
            const auto rec = decache::harness::cmd_simulate(cfg);
            emit(cfg, {rec}, false);
            if (rec.failures > 0) {
                std::cerr << rec.failures << " of " << rec.trials << " trials failed (seed "
                          << cfg.caching.seed << ")\n";
                return 1;
            }
            std::cerr << rec.trials << " trials, 0 failures\n";
            return 0;
        }
        if (indexcoding->parsed()) {
            std::ifstream in(instance_path);
            if (!in) {
                std::cerr << "cannot open instance file '" << instance_path << "'\n";
                return 2;
            }
            std::stringstream buf;
            buf << in.rdbuf();
            const auto inst = decache::indexcoding::parse_instance(buf.str());
            const auto rep = decache::harness::analyze_instance(inst, ic_delta);
            std::cout << "n = " << inst.n << ", receivers = " << inst.receivers.size() << "\n";
            std::cout << "alpha = " << rep.alpha << "\n";
            std::cout << "kappa = " << rep.kappa << "\n";
            std::cout << "alpha-bound N2[" << rep.alpha << "," << 2 * ic_delta + 1
                      << "] = " << rep.alpha_bound.n << (rep.alpha_bound.exact ? "" : " (upper bound)") << "\n";
            std::cout << "kappa-bound N2[" << rep.kappa << "," << 2 * ic_delta + 1
                      << "] = " << rep.kappa_bound.n << (rep.kappa_bound.exact ? "" : " (upper bound)") << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
