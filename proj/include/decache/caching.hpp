#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "decache/gf2.hpp"
#include "decache/rational.hpp"
#include "decache/subsets.hpp"

namespace decache::caching {

using rational::Rat;

enum class PlacementMode { idealized, bernoulli };

inline std::string to_string(PlacementMode m) { return m == PlacementMode::idealized ? "idealized" : "bernoulli"; }

inline PlacementMode placement_mode_from(const std::string& s) {
    if (s == "idealized") return PlacementMode::idealized;
    if (s == "bernoulli") return PlacementMode::bernoulli;
    throw std::invalid_argument("unknown placement mode '" + s + "'");
}

/// Problem parameters: N files of F bits, K users, per-bit caching
/// probability p = a/b. Idealized placement requires b^K | F so every
/// subfile gets its exact expected size.
struct CachingConfig {
    std::size_t num_files = 0;   // N
    std::size_t num_users = 0;   // K
    long long p_num = 0;         // a
    long long p_den = 1;         // b
    std::size_t file_bits = 0;   // F
    PlacementMode mode = PlacementMode::idealized;
    std::uint64_t seed = 0;

    void validate() const {
        if (num_users < 1 || num_files < num_users)
            throw std::invalid_argument("CachingConfig: requires N >= K >= 1");
        if (num_users > 25) throw std::invalid_argument("CachingConfig: K > 25 unsupported");
        if (p_den < 1 || p_num < 0 || p_num > p_den)
            throw std::invalid_argument("CachingConfig: p must be a rational in [0,1]");
        if (std::gcd(p_num, p_den) != 1) throw std::invalid_argument("CachingConfig: p must be in lowest terms");
        if (mode == PlacementMode::idealized && file_bits % den_pow() != 0)
            throw std::invalid_argument("CachingConfig: idealized mode requires F divisible by b^K = " +
                                        std::to_string(den_pow()));
    }

    Rat p() const { return Rat(p_num, p_den); }
    long long den_pow() const { return rational::checked_pow(p_den, static_cast<unsigned>(num_users)); }
    std::size_t num_subsets() const { return std::size_t{1} << num_users; }

    /// Bits of one unit symbol, F / b^K (idealized mode).
    std::size_t unit_bits() const { return file_bits / static_cast<std::size_t>(den_pow()); }

    /// Exact idealized subfile bit count for an owner set of size s:
    /// a^s (b-a)^(K-s) F / b^K.
    std::size_t subfile_bits(std::uint32_t mask) const {
        const unsigned s = subsets::popcount(mask);
        const long long units = subfile_units(s);
        return static_cast<std::size_t>(units) * unit_bits();
    }

    /// Same size expressed in units of F / b^K.
    long long subfile_units(unsigned owners) const {
        return rational::checked_pow(p_num, owners) *
               rational::checked_pow(p_den - p_num, static_cast<unsigned>(num_users) - owners);
    }
};

struct FileLibrary {
    std::vector<gf2::BitVector> files;

    static FileLibrary random(const CachingConfig& cfg, std::uint64_t seed) {
        FileLibrary lib;
        std::mt19937_64 rng(seed);
        lib.files.reserve(cfg.num_files);
        for (std::size_t i = 0; i < cfg.num_files; ++i) {
            gf2::BitVector f(cfg.file_bits);
            for (std::size_t t = 0; t < cfg.file_bits; ++t)
                if (rng() & 1) f.set(t, true);
            lib.files.push_back(std::move(f));
        }
        return lib;
    }

    void validate(const CachingConfig& cfg) const {
        if (files.size() != cfg.num_files) throw std::invalid_argument("FileLibrary: expected N files");
        for (const auto& f : files)
            if (f.size() != cfg.file_bits) throw std::invalid_argument("FileLibrary: every file must have F bits");
    }
};

/// Outcome of placement: payload[(i, S)] holds the bits of file i cached at
/// exactly the users in S. Bernoulli mode additionally keeps the per-bit
/// owner assignment so files can be reassembled in position order.
struct SubfilePartition {
    CachingConfig config;
    std::vector<std::vector<gf2::BitVector>> payload;    // [file][mask]
    std::vector<std::vector<std::uint32_t>> owner_mask;  // [file][bit], bernoulli only

    const gf2::BitVector& subfile(std::size_t file, std::uint32_t mask) const { return payload[file][mask]; }

    /// Bit length of subfile (file, mask) from shared placement metadata only.
    std::size_t subfile_size(std::size_t file, std::uint32_t mask) const {
        if (config.mode == PlacementMode::idealized) return config.subfile_bits(mask);
        std::size_t c = 0;
        for (std::uint32_t m : owner_mask[file])
            if (m == mask) ++c;
        return c;
    }

    /// Total bits cached by user k (idealized: N * F * a/b exactly).
    std::size_t cache_bits(std::size_t user) const {
        std::size_t total = 0;
        for (std::size_t i = 0; i < config.num_files; ++i)
            for (std::uint32_t m = 0; m < config.num_subsets(); ++m)
                if (m & (1u << user)) total += payload[i][m].size();
        return total;
    }
};

/// Per-user file requests, stored 0-based.
struct DemandVector {
    std::vector<std::size_t> d;

    void validate(const CachingConfig& cfg) const {
        if (d.size() != cfg.num_users) throw std::invalid_argument("DemandVector: expected K entries");
        for (std::size_t f : d)
            if (f >= cfg.num_files) throw std::invalid_argument("DemandVector: file index out of range");
    }

    bool distinct() const {
        for (std::size_t i = 0; i < d.size(); ++i)
            for (std::size_t j = i + 1; j < d.size(); ++j)
                if (d[i] == d[j]) return false;
        return true;
    }

    /// "1,2,3" with 1-based file indices.
    std::string to_string() const {
        std::string s;
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(d[i] + 1);
        }
        return s;
    }

    static DemandVector parse(const std::string& s) {
        DemandVector v;
        std::stringstream is(s);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            if (tok.empty()) continue;
            long val = std::stol(tok);
            if (val < 1) throw std::invalid_argument("DemandVector: indices are 1-based");
            v.d.push_back(static_cast<std::size_t>(val - 1));
        }
        return v;
    }
};

/// Ordered broadcast: one item per user subset S, labels size-descending and
/// lexicographic within a size, payload = XOR of the subfiles each member of
/// S is missing.
struct TransmissionBatch {
    struct Item {
        std::uint32_t label = 0;
        gf2::BitVector payload;
    };
    std::vector<Item> items;
    std::size_t unit = 0;  // bits per unit symbol; 0 in bernoulli mode

    std::size_t total_bits() const {
        std::size_t n = 0;
        for (const auto& it : items) n += it.payload.size();
        return n;
    }
};

/// Deterministic placement realizing the exact expected subfile sizes: file
/// bits are consumed sequentially in canonical subset order.
inline SubfilePartition place_idealized(const CachingConfig& cfg, const FileLibrary& lib) {
    cfg.validate();
    lib.validate(cfg);
    if (cfg.mode != PlacementMode::idealized)
        throw std::invalid_argument("place_idealized: config mode must be idealized");

    SubfilePartition part;
    part.config = cfg;
    part.payload.assign(cfg.num_files, std::vector<gf2::BitVector>(cfg.num_subsets()));
    const auto order = subsets::canonical_subsets(static_cast<unsigned>(cfg.num_users));
    for (std::size_t i = 0; i < cfg.num_files; ++i) {
        std::size_t pos = 0;
        for (std::uint32_t mask : order) {
            const std::size_t len = cfg.subfile_bits(mask);
            part.payload[i][mask] = lib.files[i].slice(pos, len);
            pos += len;
        }
        if (pos != cfg.file_bits) throw std::logic_error("place_idealized: sizes do not sum to F");
    }
    return part;
}

/// The random placement itself: every (bit, user) pair is cached
/// independently with probability a/b.
inline SubfilePartition place_bernoulli(const CachingConfig& cfg, const FileLibrary& lib) {
    cfg.validate();
    lib.validate(cfg);
    if (cfg.mode != PlacementMode::bernoulli)
        throw std::invalid_argument("place_bernoulli: config mode must be bernoulli");

    SubfilePartition part;
    part.config = cfg;
    part.payload.assign(cfg.num_files, std::vector<gf2::BitVector>(cfg.num_subsets()));
    part.owner_mask.assign(cfg.num_files, {});
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<long long> draw(0, cfg.p_den - 1);
    for (std::size_t i = 0; i < cfg.num_files; ++i) {
        part.owner_mask[i].resize(cfg.file_bits);
        for (std::size_t t = 0; t < cfg.file_bits; ++t) {
            std::uint32_t owners = 0;
            for (std::size_t k = 0; k < cfg.num_users; ++k)
                if (draw(rng) < cfg.p_num) owners |= 1u << k;
            part.owner_mask[i][t] = owners;
            part.payload[i][owners].push_back(lib.files[i].get(t));
        }
    }
    return part;
}

/// Delivery: for s = K..1 and each S of size s in lexicographic order,
/// broadcast XOR over k in S of X_{demand(k), S\{k}}. Operands of unequal
/// length (bernoulli mode) are right-padded with zeros; empty groups are
/// skipped.
inline TransmissionBatch deliver(const SubfilePartition& part, const DemandVector& d) {
    const CachingConfig& cfg = part.config;
    d.validate(cfg);

    TransmissionBatch batch;
    batch.unit = cfg.mode == PlacementMode::idealized ? cfg.unit_bits() : 0;
    for (std::uint32_t mask : subsets::canonical_subsets(static_cast<unsigned>(cfg.num_users))) {
        if (mask == 0) continue;
        std::size_t len = 0;
        for (std::size_t k = 0; k < cfg.num_users; ++k)
            if (mask & (1u << k)) len = std::max(len, part.subfile(d.d[k], mask & ~(1u << k)).size());
        if (len == 0) continue;
        gf2::BitVector payload(len);
        for (std::size_t k = 0; k < cfg.num_users; ++k)
            if (mask & (1u << k)) payload.xor_prefix(part.subfile(d.d[k], mask & ~(1u << k)));
        batch.items.push_back({mask, std::move(payload)});
    }
    return batch;
}

/// Exact zero-error delivery rate (1-p)(1/p)(1-(1-p)^K) for p > 0.
inline Rat zero_error_rate(const CachingConfig& cfg) {
    if (cfg.p_num == 0) throw std::invalid_argument("zero_error_rate: undefined at p = 0 (delivery rate is K)");
    const Rat p = cfg.p();
    const Rat q = Rat(1) - p;
    return q * (Rat(1) / p) * (Rat(1) - rational::pow(q, static_cast<unsigned>(cfg.num_users)));
}

/// Reconstructs file demand(k) for user k from its own cache plus the batch.
/// Reads only subfiles cached at user k; everything else comes from payloads
/// and shared placement metadata (sizes / owner assignment).
inline gf2::BitVector user_decode(const SubfilePartition& part, const TransmissionBatch& batch,
                                  const DemandVector& d, std::size_t user) {
    const CachingConfig& cfg = part.config;
    d.validate(cfg);
    if (user >= cfg.num_users) throw std::invalid_argument("user_decode: user index out of range");
    const std::size_t want = d.d[user];

    std::vector<const gf2::BitVector*> by_label(cfg.num_subsets(), nullptr);
    for (const auto& item : batch.items) by_label[item.label] = &item.payload;

    // recover every subfile of the demanded file not held in cache
    std::vector<gf2::BitVector> recovered(cfg.num_subsets());
    for (std::uint32_t m = 0; m < cfg.num_subsets(); ++m) {
        if (m & (1u << user)) continue;
        const std::size_t len = part.subfile_size(want, m);
        if (len == 0) continue;
        const std::uint32_t label = m | (1u << user);
        if (!by_label[label])
            throw std::runtime_error("user_decode: missing transmission for subset " +
                                     subsets::mask_to_string(label));
        gf2::BitVector acc = *by_label[label];
        for (std::size_t j = 0; j < cfg.num_users; ++j) {
            if (j == user || !(label & (1u << j))) continue;
            acc.xor_prefix(part.subfile(d.d[j], label & ~(1u << j)));  // cached: user is in that owner set
        }
        if (acc.size() < len) throw std::runtime_error("user_decode: transmission shorter than target subfile");
        recovered[m] = acc.prefix(len);
    }

    auto subfile_bits = [&](std::uint32_t m) -> const gf2::BitVector& {
        return (m & (1u << user)) ? part.subfile(want, m) : recovered[m];
    };

    gf2::BitVector file(cfg.file_bits);
    if (cfg.mode == PlacementMode::idealized) {
        std::size_t pos = 0;
        for (std::uint32_t m : subsets::canonical_subsets(static_cast<unsigned>(cfg.num_users))) {
            const gf2::BitVector& sub = subfile_bits(m);
            for (std::size_t t = 0; t < sub.size(); ++t)
                if (sub.get(t)) file.set(pos + t, true);
            pos += cfg.subfile_bits(m);
        }
    } else {
        std::vector<std::size_t> next(cfg.num_subsets(), 0);
        for (std::size_t t = 0; t < cfg.file_bits; ++t) {
            const std::uint32_t m = part.owner_mask[want][t];
            if (subfile_bits(m).get(next[m]++)) file.set(t, true);
        }
    }
    return file;
}

/// Splits an idealized batch into unit symbols of F / b^K bits each.
inline std::vector<gf2::BitVector> unit_split(const TransmissionBatch& batch) {
    if (batch.unit == 0) throw std::invalid_argument("unit_split: batch has no unit (bernoulli mode)");
    std::vector<gf2::BitVector> symbols;
    for (const auto& item : batch.items) {
        if (item.payload.size() % batch.unit != 0)
            throw std::invalid_argument("unit_split: payload not aligned to unit " + std::to_string(batch.unit));
        for (std::size_t off = 0; off < item.payload.size(); off += batch.unit)
            symbols.push_back(item.payload.slice(off, batch.unit));
    }
    return symbols;
}

/// Text export: header "N K a b F mode", one line per nonempty subfile.
inline std::string export_partition(const SubfilePartition& part) {
    const CachingConfig& cfg = part.config;
    std::ostringstream os;
    os << cfg.num_files << " " << cfg.num_users << " " << cfg.p_num << " " << cfg.p_den << " " << cfg.file_bits
       << " " << to_string(cfg.mode) << "\n";
    for (std::size_t i = 0; i < cfg.num_files; ++i)
        for (std::uint32_t m : subsets::canonical_subsets(static_cast<unsigned>(cfg.num_users)))
            if (!part.payload[i][m].empty())
                os << (i + 1) << " " << m << " " << part.payload[i][m].to_hex() << "\n";
    return os.str();
}

inline std::string export_batch(const TransmissionBatch& batch) {
    std::ostringstream os;
    for (const auto& item : batch.items) os << item.label << " " << item.payload.to_hex() << "\n";
    return os.str();
}

}  // namespace decache::caching
