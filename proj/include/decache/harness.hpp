#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "decache/caching.hpp"
#include "decache/codes.hpp"
#include "decache/ecc.hpp"
#include "decache/indexcoding.hpp"
#include "decache/rational.hpp"

namespace decache::harness {

using nlohmann::json;
using rational::Rat;

/// How to pick demand vectors for a run.
struct DemandSpec {
    enum class Kind { worst_all, explicit_list, random_count } kind = Kind::worst_all;
    caching::DemandVector explicit_demand;
    std::size_t count = 0;  // random_count

    static DemandSpec parse(const std::string& s) {
        DemandSpec d;
        if (s.empty() || s == "worst-all") {
            d.kind = Kind::worst_all;
        } else if (s.rfind("random:", 0) == 0) {
            d.kind = Kind::random_count;
            d.count = std::stoul(s.substr(7));
            if (d.count == 0) throw std::invalid_argument("demand spec: random count must be positive");
        } else {
            d.kind = Kind::explicit_list;
            d.explicit_demand = caching::DemandVector::parse(s);
        }
        return d;
    }

    std::string to_string() const {
        switch (kind) {
            case Kind::worst_all: return "worst-all";
            case Kind::random_count: return "random:" + std::to_string(count);
            default: return explicit_demand.to_string();
        }
    }
};

struct ExperimentConfig {
    std::string scenario = "run";
    caching::CachingConfig caching;
    DemandSpec demand;
    std::size_t delta = 0;
    ecc::ChannelMode channel = ecc::ChannelMode::random;
    std::size_t trials = 100;
    std::size_t enumeration_cap = 10000;  // certify: full enumeration up to this many demands
    std::string format = "json";          // json | csv
    std::string out_path;                 // empty = stdout
    bool emit_timing = false;             // keep output files byte-identical by default
};

/// One row of machine-readable output. Fields that do not apply to a command
/// stay at their defaults (-1 / empty).
struct ResultRecord {
    std::string scenario;
    std::size_t N = 0, K = 0;
    std::string p;
    std::size_t F = 0;
    std::size_t delta = 0;
    std::string demand;
    long long kappa_units = -1;
    long long b_bits = -1;
    long long delivery_bits = -1;
    long long formula_bits = -1;
    std::string code;  // "[n,k,d]"
    std::string rate;
    double rate_decimal = 0.0;
    bool rate_exact = true;
    bool certified = false;
    long long trials = 0;
    long long failures = 0;
    double wall_ms = 0.0;
    std::string b_set;  // construct_B members as "file:mask;..." (1-based files)
};

inline void to_json(json& j, const ResultRecord& r) {
    j = json{{"scenario", r.scenario},
             {"N", r.N},
             {"K", r.K},
             {"p", r.p},
             {"F", r.F},
             {"delta", r.delta},
             {"demand", r.demand},
             {"kappa_units", r.kappa_units},
             {"b_bits", r.b_bits},
             {"delivery_bits", r.delivery_bits},
             {"formula_bits", r.formula_bits},
             {"code", r.code},
             {"rate", r.rate},
             {"rate_decimal", r.rate_decimal},
             {"rate_exact", r.rate_exact},
             {"certified", r.certified},
             {"trials", r.trials},
             {"failures", r.failures},
             {"wall_ms", r.wall_ms},
             {"b_set", r.b_set}};
}

inline void from_json(const json& j, ResultRecord& r) {
    j.at("scenario").get_to(r.scenario);
    j.at("N").get_to(r.N);
    j.at("K").get_to(r.K);
    j.at("p").get_to(r.p);
    j.at("F").get_to(r.F);
    j.at("delta").get_to(r.delta);
    j.at("demand").get_to(r.demand);
    j.at("kappa_units").get_to(r.kappa_units);
    j.at("b_bits").get_to(r.b_bits);
    j.at("delivery_bits").get_to(r.delivery_bits);
    j.at("formula_bits").get_to(r.formula_bits);
    j.at("code").get_to(r.code);
    j.at("rate").get_to(r.rate);
    j.at("rate_decimal").get_to(r.rate_decimal);
    j.at("rate_exact").get_to(r.rate_exact);
    j.at("certified").get_to(r.certified);
    j.at("trials").get_to(r.trials);
    j.at("failures").get_to(r.failures);
    j.at("wall_ms").get_to(r.wall_ms);
    j.at("b_set").get_to(r.b_set);
}

inline std::string csv_header() {
    return "scenario,N,K,p,F,delta,demand,kappa_units,b_bits,delivery_bits,formula_bits,code,rate,"
           "rate_decimal,rate_exact,certified,trials,failures,wall_ms,b_set";
}

inline std::string csv_row(const ResultRecord& r) {
    auto quote = [](const std::string& s) { return "\"" + s + "\""; };
    std::ostringstream os;
    os << quote(r.scenario) << "," << r.N << "," << r.K << "," << quote(r.p) << "," << r.F << "," << r.delta
       << "," << quote(r.demand) << "," << r.kappa_units << "," << r.b_bits << "," << r.delivery_bits << ","
       << r.formula_bits << "," << quote(r.code) << "," << quote(r.rate) << "," << r.rate_decimal << ","
       << (r.rate_exact ? 1 : 0) << "," << (r.certified ? 1 : 0) << "," << r.trials << "," << r.failures << ","
       << r.wall_ms << "," << quote(r.b_set);
    return os.str();
}

namespace detail {

inline double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

/// Per-trial RNG stream derived from the master seed (splitmix64 mix).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (trial + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

inline ResultRecord base_record(const ExperimentConfig& cfg) {
    ResultRecord r;
    r.scenario = cfg.scenario;
    r.N = cfg.caching.num_files;
    r.K = cfg.caching.num_users;
    r.p = std::to_string(cfg.caching.p_num) + "/" + std::to_string(cfg.caching.p_den);
    r.F = cfg.caching.file_bits;
    r.delta = cfg.delta;
    return r;
}

inline std::string code_label(const codes::LinearCode& c) {
    return "[" + std::to_string(c.n) + "," + std::to_string(c.k) + "," +
           (c.d ? std::to_string(*c.d) : "?") + "]";
}

inline std::string b_set_label(const std::vector<std::pair<std::size_t, std::uint32_t>>& members) {
    std::string s;
    for (const auto& [file, mask] : members) {
        if (!s.empty()) s += ";";
        s += std::to_string(file + 1) + ":" + std::to_string(mask);
    }
    return s;
}

/// All demand vectors with K pairwise-distinct entries, lexicographic order.
inline std::vector<caching::DemandVector> distinct_demands(std::size_t N, std::size_t K) {
    std::vector<caching::DemandVector> out;
    caching::DemandVector cur;
    std::vector<bool> used(N, false);
    auto rec = [&](auto&& self) -> void {
        if (cur.d.size() == K) {
            out.push_back(cur);
            return;
        }
        for (std::size_t f = 0; f < N; ++f) {
            if (used[f]) continue;
            used[f] = true;
            cur.d.push_back(f);
            self(self);
            cur.d.pop_back();
            used[f] = false;
        }
    };
    rec(rec);
    return out;
}

inline caching::SubfilePartition make_placement(const caching::CachingConfig& cfg, const caching::FileLibrary& lib) {
    return cfg.mode == caching::PlacementMode::idealized ? caching::place_idealized(cfg, lib)
                                                         : caching::place_bernoulli(cfg, lib);
}

}  // namespace detail

/// Exact zero-error rate plus the delta-corrected worst-case rate.
inline ResultRecord cmd_rate(const ExperimentConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    cfg.caching.validate();
    ResultRecord rec = detail::base_record(cfg);
    const ecc::WorstCaseRate wc = ecc::worst_case_rate(cfg.caching, cfg.delta);
    rec.kappa_units = static_cast<long long>(wc.kappa_units);
    // rendered over the natural denominator b^K (numerator = outer code length)
    rec.rate = wc.kappa_units == 0 ? "0"
                                   : std::to_string(wc.code_length) + "/" +
                                         std::to_string(cfg.caching.den_pow());
    rec.rate_decimal = rational::to_double(wc.rate);
    rec.rate_exact = wc.exact;
    if (wc.kappa_units > 0) {
        const auto built = codes::construct_code(wc.kappa_units, 2 * cfg.delta + 1);
        rec.code = detail::code_label(built.code);
    }
    rec.certified = true;
    rec.wall_ms = detail::elapsed_ms(start);
    return rec;
}

struct CertifyResult {
    std::vector<ResultRecord> records;
    bool all_certified = true;
};

/// Runs the sandwich certification over every distinct-demand vector (or a
/// seeded sample above the enumeration cap).
inline CertifyResult cmd_certify(const ExperimentConfig& cfg) {
    cfg.caching.validate();
    if (cfg.caching.mode != caching::PlacementMode::idealized)
        throw std::invalid_argument("certify: requires idealized placement mode");

    const caching::FileLibrary lib = caching::FileLibrary::random(cfg.caching, detail::derive_seed(cfg.caching.seed, 0));
    const caching::SubfilePartition part = caching::place_idealized(cfg.caching, lib);

    std::vector<caching::DemandVector> demands;
    if (cfg.demand.kind == DemandSpec::Kind::explicit_list) {
        demands.push_back(cfg.demand.explicit_demand);
    } else {
        demands = detail::distinct_demands(cfg.caching.num_files, cfg.caching.num_users);
        if (demands.size() > cfg.enumeration_cap) {
            std::mt19937_64 rng(cfg.caching.seed);
            std::shuffle(demands.begin(), demands.end(), rng);
            demands.resize(cfg.enumeration_cap);
        }
    }

    CertifyResult out;
    for (const auto& d : demands) {
        const auto start = std::chrono::steady_clock::now();
        ResultRecord rec = detail::base_record(cfg);
        rec.demand = d.to_string();
        const indexcoding::BConstruction b = indexcoding::construct_B(part, d);
        const indexcoding::SandwichReport rep = indexcoding::sandwich_check(part, d);
        rec.b_bits = rep.b_bits;
        rec.delivery_bits = rep.delivered_bits;
        rec.formula_bits = rep.formula_bits;
        rec.kappa_units = rep.delivered_bits / static_cast<long long>(cfg.caching.unit_bits());
        rec.certified = rep.certified;
        rec.rate = rational::to_string(caching::zero_error_rate(cfg.caching));
        rec.rate_decimal = rational::to_double(caching::zero_error_rate(cfg.caching));
        rec.b_set = detail::b_set_label(b.members);
        rec.wall_ms = detail::elapsed_ms(start);
        out.all_certified = out.all_certified && rec.certified;
        out.records.push_back(std::move(rec));
    }
    return out;
}

/// End-to-end trials: placement, delivery, outer code, channel, per-user
/// decode, exact comparison against the library. The `rate` field carries the
/// closed-form reference, `rate_decimal` the empirical mean.
inline ResultRecord cmd_simulate(const ExperimentConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    cfg.caching.validate();
    ResultRecord rec = detail::base_record(cfg);
    rec.demand = cfg.demand.to_string();

    std::mt19937_64 demand_rng(detail::derive_seed(cfg.caching.seed, 0x5eed));
    std::vector<caching::DemandVector> pool;
    switch (cfg.demand.kind) {
        case DemandSpec::Kind::explicit_list:
            pool.push_back(cfg.demand.explicit_demand);
            break;
        case DemandSpec::Kind::worst_all:
            pool = detail::distinct_demands(cfg.caching.num_files, cfg.caching.num_users);
            break;
        case DemandSpec::Kind::random_count:
            for (std::size_t i = 0; i < cfg.demand.count; ++i) {
                caching::DemandVector d;
                d.d.resize(cfg.caching.num_users);
                std::uniform_int_distribution<std::size_t> pick(0, cfg.caching.num_files - 1);
                for (auto& x : d.d) x = pick(demand_rng);
                pool.push_back(std::move(d));
            }
            break;
    }
    if (pool.empty()) throw std::invalid_argument("simulate: empty demand pool");

    long long failures = 0;
    long long trials_run = 0;
    double rate_sum = 0.0;
    std::string first_code;

    auto run_trial = [&](const caching::DemandVector& d, std::uint64_t trial_seed,
                         const ecc::Corruption* forced) {
        caching::CachingConfig ccfg = cfg.caching;
        ccfg.seed = trial_seed;
        const caching::FileLibrary lib = caching::FileLibrary::random(ccfg, detail::derive_seed(trial_seed, 1));
        const caching::SubfilePartition part = detail::make_placement(ccfg, lib);
        const ecc::BuiltScheme built = ecc::build_scheme(part, d, cfg.delta);
        if (first_code.empty() && built.scheme.kappa_units > 0)
            first_code = detail::code_label(built.scheme.code);
        long long base_bits = 0;
        for (std::size_t len : built.scheme.lengths) base_bits += static_cast<long long>(len);
        rate_sum += static_cast<double>(base_bits) / static_cast<double>(ccfg.file_bits);

        ecc::EncodedBatch received;
        if (forced) {
            received = ecc::apply_corruption(built.encoded, *forced);
        } else {
            ecc::ChannelSpec chan{cfg.delta, ecc::ChannelMode::random, detail::derive_seed(trial_seed, 2)};
            received = ecc::transmit(built.encoded, chan);
        }
        bool ok = true;
        for (std::size_t k = 0; k < ccfg.num_users && ok; ++k) {
            try {
                ok = ecc::correct_and_decode(received, built.scheme, part, d, k) == lib.files[d.d[k]];
            } catch (const codes::UncorrectableError&) {
                ok = false;
            }
        }
        ++trials_run;
        if (!ok) ++failures;
    };

    if (cfg.channel == ecc::ChannelMode::adversarial_exhaustive) {
        for (const auto& d : pool) {
            // probe once to size the corruption patterns
            caching::CachingConfig probe_cfg = cfg.caching;
            probe_cfg.seed = detail::derive_seed(cfg.caching.seed, 0);
            const caching::FileLibrary lib = caching::FileLibrary::random(probe_cfg, probe_cfg.seed);
            const ecc::BuiltScheme probe =
                ecc::build_scheme(detail::make_placement(probe_cfg, lib), d, cfg.delta);
            for (const auto& pattern :
                 ecc::adversarial_corruptions(probe.encoded.symbols.size(), probe.scheme.unit, cfg.delta))
                run_trial(d, detail::derive_seed(cfg.caching.seed, static_cast<std::uint64_t>(trials_run)),
                          &pattern);
        }
    } else {
        for (std::size_t t = 0; t < cfg.trials; ++t)
            run_trial(pool[t % pool.size()], detail::derive_seed(cfg.caching.seed, t), nullptr);
    }

    rec.trials = trials_run;
    rec.failures = failures;
    rec.certified = failures == 0;
    const Rat reference = cfg.caching.p_num > 0
                              ? caching::zero_error_rate(cfg.caching)
                              : Rat(static_cast<long long>(cfg.caching.num_users));
    rec.rate = rational::to_string(reference);
    rec.rate_exact = false;
    if (trials_run > 0) rec.rate_decimal = rate_sum / static_cast<double>(trials_run);
    rec.code = first_code;
    rec.wall_ms = detail::elapsed_ms(start);
    return rec;
}

struct IndexCodingReport {
    std::int64_t alpha = 0;
    std::size_t kappa = 0;
    codes::LengthBound alpha_bound;  // N_2[alpha, 2*delta+1]
    codes::LengthBound kappa_bound;  // N_2[kappa, 2*delta+1]
    std::size_t delta = 0;
};

/// alpha, kappa and the resulting optimal-ECIC length bounds for an instance.
inline IndexCodingReport analyze_instance(const indexcoding::IndexInstance& inst, std::size_t delta) {
    IndexCodingReport rep;
    rep.delta = delta;
    rep.alpha = indexcoding::alpha_brute(inst).alpha;
    rep.kappa = indexcoding::kappa_brute(inst);
    rep.alpha_bound = codes::best_known_length(static_cast<std::size_t>(rep.alpha), 2 * delta + 1);
    rep.kappa_bound = codes::best_known_length(rep.kappa, 2 * delta + 1);
    return rep;
}

/// Simple "key = value" configuration file; '#' starts a comment. Values
/// override whatever was already set on the config.
inline std::vector<std::pair<std::string, std::string>> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> kv;
    std::string line;
    auto strip = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (!key.empty()) kv.emplace_back(key, value);
    }
    return kv;
}

inline void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "scenario") cfg.scenario = value;
    else if (key == "N") cfg.caching.num_files = std::stoul(value);
    else if (key == "K") cfg.caching.num_users = std::stoul(value);
    else if (key == "p") {
        const Rat p = rational::parse(value);
        cfg.caching.p_num = p.numerator();
        cfg.caching.p_den = p.denominator();
    } else if (key == "F") cfg.caching.file_bits = std::stoul(value);
    else if (key == "mode") cfg.caching.mode = caching::placement_mode_from(value);
    else if (key == "seed") cfg.caching.seed = std::stoull(value);
    else if (key == "delta") cfg.delta = std::stoul(value);
    else if (key == "demand") cfg.demand = DemandSpec::parse(value);
    else if (key == "channel") {
        if (value == "random") cfg.channel = ecc::ChannelMode::random;
        else if (value == "adversarial-exhaustive") cfg.channel = ecc::ChannelMode::adversarial_exhaustive;
        else throw std::invalid_argument("unknown channel mode '" + value + "'");
    } else if (key == "trials") cfg.trials = std::stoul(value);
    else if (key == "format") cfg.format = value;
    else if (key == "out") cfg.out_path = value;
    else if (key == "timing") cfg.emit_timing = value == "1" || value == "true";
    else throw std::invalid_argument("unknown config key '" + key + "'");
}

/// Renders records in the requested format. Timing is zeroed unless
/// requested, so identical configurations produce byte-identical output.
inline std::string render(const ExperimentConfig& cfg, std::vector<ResultRecord> records, bool as_array) {
    if (!cfg.emit_timing)
        for (auto& r : records) r.wall_ms = 0.0;
    if (cfg.format == "csv") {
        std::ostringstream os;
        os << csv_header() << "\n";
        for (const auto& r : records) os << csv_row(r) << "\n";
        return os.str();
    }
    if (cfg.format != "json") throw std::invalid_argument("unknown output format '" + cfg.format + "'");
    if (!as_array && records.size() == 1) {
        json j = records[0];
        return j.dump(2) + "\n";
    }
    json j = json::array();
    for (const auto& r : records) j.push_back(r);
    return j.dump(2) + "\n";
}

inline void write_output(const ExperimentConfig& cfg, const std::string& text) {
    if (cfg.out_path.empty()) return;
    std::ofstream out(cfg.out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output file '" + cfg.out_path + "'");
    out << text;
}

}  // namespace decache::harness
