#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "decache/caching.hpp"
#include "decache/codes.hpp"
#include "decache/gf2.hpp"
#include "decache/rational.hpp"

namespace decache::ecc {

using rational::Rat;

/// Delivery batch concatenated with an outer [n, kappa, >=2*delta+1] block
/// code, applied column-wise: bit position j across the kappa clean symbols
/// forms one message, so symbol-level channel errors become coordinate errors
/// of the outer code.
struct ConcatenatedScheme {
    std::size_t kappa_units = 0;  // clean symbol count (outer code dimension)
    codes::LinearCode code;       // k == kappa_units
    codes::SyndromeTable table;   // bounded-distance decoder for `code`
    std::size_t unit = 0;         // bits per transmitted symbol
    std::size_t delta = 0;
    bool exact_length = true;     // code.n is a known-optimal length

    // structure of the clean batch, for reassembly after correction
    std::vector<std::uint32_t> labels;
    std::vector<std::size_t> lengths;
    caching::PlacementMode mode = caching::PlacementMode::idealized;
};

struct EncodedBatch {
    std::vector<gf2::BitVector> symbols;  // code.n symbols of scheme.unit bits
};

enum class ChannelMode { random, adversarial_exhaustive };

/// Channel corrupting at most delta whole symbol transmissions per use.
struct ChannelSpec {
    std::size_t delta = 0;
    ChannelMode mode = ChannelMode::random;
    std::uint64_t seed = 0;
};

namespace detail {

inline std::vector<gf2::BitVector> clean_symbols(const caching::TransmissionBatch& batch,
                                                 std::size_t& unit_out) {
    if (batch.unit != 0) {
        unit_out = batch.unit;
        return caching::unit_split(batch);
    }
    // bernoulli batches: one symbol per broadcast item, right-padded to the
    // longest payload
    std::size_t unit = 0;
    for (const auto& item : batch.items) unit = std::max(unit, item.payload.size());
    unit_out = unit;
    std::vector<gf2::BitVector> symbols;
    for (const auto& item : batch.items) {
        gf2::BitVector s(unit);
        s.xor_prefix(item.payload);
        symbols.push_back(std::move(s));
    }
    return symbols;
}

}  // namespace detail

struct BuiltScheme {
    ConcatenatedScheme scheme;
    EncodedBatch encoded;
};

/// Runs delivery, splits it into symbols, picks the shortest available
/// [n, kappa, 2*delta+1] outer code and encodes column-wise. delta = 0 keeps
/// the batch untouched (identity code).
inline BuiltScheme build_scheme(const caching::SubfilePartition& part, const caching::DemandVector& d,
                                std::size_t delta) {
    const caching::TransmissionBatch batch = caching::deliver(part, d);

    BuiltScheme out;
    ConcatenatedScheme& sch = out.scheme;
    sch.delta = delta;
    sch.mode = part.config.mode;
    for (const auto& item : batch.items) {
        sch.labels.push_back(item.label);
        sch.lengths.push_back(item.payload.size());
    }

    std::vector<gf2::BitVector> symbols = detail::clean_symbols(batch, sch.unit);
    sch.kappa_units = symbols.size();
    if (sch.kappa_units == 0) return out;  // fully cached; nothing to send

    codes::ConstructedCode built = [&] {
        try {
            return codes::construct_code(sch.kappa_units, 2 * delta + 1);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("build_scheme: no outer code for dimension " +
                                        std::to_string(sch.kappa_units) + ", distance " +
                                        std::to_string(2 * delta + 1) + " (" + e.what() + ")");
        }
    }();
    sch.code = std::move(built.code);
    sch.exact_length = built.exact;
    sch.table = codes::build_syndrome_table(sch.code, delta);

    // out_t = XOR of clean symbols s with G[s][t] = 1
    out.encoded.symbols.assign(sch.code.n, gf2::BitVector(sch.unit));
    for (std::size_t s = 0; s < sch.kappa_units; ++s)
        for (std::size_t t = 0; t < sch.code.n; ++t)
            if (sch.code.G.get(s, t)) out.encoded.symbols[t].xor_with(symbols[s]);
    return out;
}

/// Random-mode channel: corrupts exactly min(delta, n) distinct symbols with
/// nonzero XOR masks, so every corrupted symbol actually differs.
inline EncodedBatch transmit(const EncodedBatch& batch, const ChannelSpec& chan) {
    if (chan.mode != ChannelMode::random)
        throw std::invalid_argument("transmit: exhaustive mode is driven via adversarial_corruptions");
    EncodedBatch received = batch;
    if (batch.symbols.empty() || chan.delta == 0) return received;
    std::mt19937_64 rng(chan.seed);
    const std::size_t n = batch.symbols.size();
    const std::size_t unit = batch.symbols[0].size();
    std::vector<std::size_t> positions(n);
    for (std::size_t i = 0; i < n; ++i) positions[i] = i;
    for (std::size_t i = 0; i < std::min(chan.delta, n); ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(positions[i], positions[pick(rng)]);
        gf2::BitVector mask(unit);
        while (!mask.any() && unit > 0) {
            for (std::size_t t = 0; t < unit; ++t) mask.set(t, rng() & 1);
        }
        received.symbols[positions[i]].xor_with(mask);
    }
    return received;
}

/// One adversarial corruption: per-position replacement values.
struct Corruption {
    std::vector<std::pair<std::size_t, gf2::BitVector>> replacements;
};

/// All corruption patterns touching at most delta positions: all-ones
/// replacement in general, every possible replacement value when the symbol
/// is at most 4 bits wide.
inline std::vector<Corruption> adversarial_corruptions(std::size_t n_symbols, std::size_t unit,
                                                       std::size_t delta) {
    std::vector<gf2::BitVector> pool;
    if (unit <= 4) {
        for (std::uint32_t v = 0; v < (std::uint32_t{1} << unit); ++v) {
            gf2::BitVector b(unit);
            for (std::size_t t = 0; t < unit; ++t)
                if ((v >> t) & 1) b.set(t, true);
            pool.push_back(std::move(b));
        }
    } else {
        gf2::BitVector ones(unit);
        for (std::size_t t = 0; t < unit; ++t) ones.set(t, true);
        pool.push_back(std::move(ones));
    }

    std::vector<Corruption> out;
    out.push_back({});  // the empty pattern (no corruption)
    std::vector<std::size_t> positions;
    auto expand_values = [&](auto&& self, std::size_t vi, Corruption cur) -> void {
        if (vi == positions.size()) {
            out.push_back(cur);
            return;
        }
        for (const auto& v : pool) {
            Corruption next = cur;
            next.replacements.emplace_back(positions[vi], v);
            self(self, vi + 1, std::move(next));
        }
    };
    auto choose = [&](auto&& self, std::size_t start, std::size_t remaining) -> void {
        if (remaining == 0) return;
        for (std::size_t p = start; p < n_symbols; ++p) {
            positions.push_back(p);
            expand_values(expand_values, 0, {});
            self(self, p + 1, remaining - 1);
            positions.pop_back();
        }
    };
    choose(choose, 0, delta);
    return out;
}

inline EncodedBatch apply_corruption(const EncodedBatch& batch, const Corruption& c) {
    EncodedBatch out = batch;
    for (const auto& [pos, value] : c.replacements) {
        if (pos >= out.symbols.size()) throw std::invalid_argument("apply_corruption: position out of range");
        if (value.size() != out.symbols[pos].size())
            throw std::invalid_argument("apply_corruption: replacement length must match the symbol");
        out.symbols[pos] = value;
    }
    return out;
}

namespace detail {

/// Register-width column decoder for codes with n <= 64; avoids per-column
/// allocation so wide units (bernoulli mode) stay cheap.
struct ColumnDecoder {
    std::size_t n, k;
    std::vector<std::uint64_t> h_rows, t_rows, pivot_bits;
    std::unordered_map<std::uint64_t, std::uint64_t> leaders;

    explicit ColumnDecoder(const codes::SyndromeTable& table) {
        const codes::LinearCode& c = table.code;
        n = c.n;
        k = c.k;
        auto pack = [&](const gf2::BitVector& v) {
            std::uint64_t w = 0;
            for (std::size_t i = 0; i < v.size(); ++i)
                if (v.get(i)) w |= std::uint64_t{1} << i;
            return w;
        };
        for (std::size_t r = 0; r < n - k; ++r) h_rows.push_back(pack(c.H.row(r)));
        for (std::size_t r = 0; r < k; ++r) t_rows.push_back(pack(c.T.row(r)));
        for (std::size_t i = 0; i < k; ++i) pivot_bits.push_back(std::uint64_t{1} << c.pivots[i]);
        for (const auto& [syn, e] : table.leaders) leaders.emplace(syn, pack(e));
    }

    std::uint64_t decode(std::uint64_t column, std::size_t delta) const {
        std::uint64_t syn = 0;
        for (std::size_t r = 0; r < h_rows.size(); ++r)
            if (std::popcount(h_rows[r] & column) & 1) syn |= std::uint64_t{1} << r;
        const auto it = leaders.find(syn);
        if (it == leaders.end())
            throw codes::UncorrectableError("decode: uncorrectable error (weight exceeds delta=" +
                                            std::to_string(delta) + ")");
        const std::uint64_t codeword = column ^ it->second;
        std::uint64_t msg = 0;
        for (std::size_t i = 0; i < k; ++i)
            if (codeword & pivot_bits[i]) msg ^= t_rows[i];
        return msg;
    }
};

}  // namespace detail

/// Channel correction alone: per-bit-column syndrome decoding of the outer
/// code, then reassembly of the clean broadcast items.
inline caching::TransmissionBatch correct_batch(const EncodedBatch& received, const ConcatenatedScheme& scheme) {
    caching::TransmissionBatch clean;
    clean.unit = scheme.mode == caching::PlacementMode::idealized ? scheme.unit : 0;
    if (scheme.kappa_units == 0) return clean;

    if (received.symbols.size() != scheme.code.n)
        throw std::invalid_argument("correct_batch: expected " + std::to_string(scheme.code.n) + " symbols");
    std::vector<gf2::BitVector> symbols(scheme.kappa_units, gf2::BitVector(scheme.unit));
    if (scheme.code.n <= 64) {
        const detail::ColumnDecoder dec(scheme.table);
        for (std::size_t j = 0; j < scheme.unit; ++j) {
            std::uint64_t column = 0;
            for (std::size_t t = 0; t < scheme.code.n; ++t)
                if (received.symbols[t].get(j)) column |= std::uint64_t{1} << t;
            const std::uint64_t msg = dec.decode(column, scheme.delta);
            for (std::size_t s = 0; s < scheme.kappa_units; ++s)
                if ((msg >> s) & 1) symbols[s].set(j, true);
        }
    } else {
        gf2::BitVector column(scheme.code.n);
        for (std::size_t j = 0; j < scheme.unit; ++j) {
            for (std::size_t t = 0; t < scheme.code.n; ++t) column.set(t, received.symbols[t].get(j));
            const gf2::BitVector msg = codes::decode(scheme.table, column);
            for (std::size_t s = 0; s < scheme.kappa_units; ++s)
                if (msg.get(s)) symbols[s].set(j, true);
        }
    }
    // reassemble broadcast items from the corrected symbols
    std::size_t next = 0;
    for (std::size_t i = 0; i < scheme.labels.size(); ++i) {
        gf2::BitVector payload;
        if (scheme.mode == caching::PlacementMode::idealized) {
            payload = gf2::BitVector(scheme.lengths[i]);
            for (std::size_t off = 0; off < scheme.lengths[i]; off += scheme.unit) {
                const gf2::BitVector& sym = symbols[next++];
                for (std::size_t t = 0; t < scheme.unit; ++t)
                    if (sym.get(t)) payload.set(off + t, true);
            }
        } else {
            payload = symbols[next++].prefix(scheme.lengths[i]);
        }
        clean.items.push_back({scheme.labels[i], std::move(payload)});
    }
    return clean;
}

/// Corrects the channel and runs the cache-aided decode for user k. Succeeds
/// for every error pattern touching at most delta symbols.
inline gf2::BitVector correct_and_decode(const EncodedBatch& received, const ConcatenatedScheme& scheme,
                                         const caching::SubfilePartition& part, const caching::DemandVector& d,
                                         std::size_t user) {
    return caching::user_decode(part, correct_batch(received, scheme), d, user);
}

struct WorstCaseRate {
    Rat rate;
    bool exact = true;  // false when the code length is only an upper bound
    std::size_t kappa_units = 0;
    std::size_t code_length = 0;
};

/// Worst-case delivery rate with delta-error correction:
/// N_2[kappa, 2*delta+1] * unit / F, with kappa the clean unit count.
inline WorstCaseRate worst_case_rate(const caching::CachingConfig& cfg, std::size_t delta) {
    cfg.validate();
    if (cfg.p_num == 0) throw std::invalid_argument("worst_case_rate: requires p > 0");
    const long long bk = cfg.den_pow();
    const long long qk = rational::checked_pow(cfg.p_den - cfg.p_num, static_cast<unsigned>(cfg.num_users));
    const long long kappa = (cfg.p_den - cfg.p_num) * (bk - qk) / cfg.p_num;

    WorstCaseRate out;
    out.kappa_units = static_cast<std::size_t>(kappa);
    if (kappa == 0) {
        out.rate = Rat(0);
        return out;
    }
    const codes::LengthBound len = codes::best_known_length(out.kappa_units, 2 * delta + 1);
    out.code_length = len.n;
    out.exact = len.exact;
    out.rate = Rat(static_cast<long long>(len.n), bk);
    return out;
}

/// Serialization: scheme header "kappa n d delta unit", then one record per
/// encoded symbol: index, hex payload.
inline std::string serialize_encoded(const ConcatenatedScheme& scheme, const EncodedBatch& batch) {
    std::ostringstream os;
    os << scheme.kappa_units << " " << scheme.code.n << " " << (scheme.code.d ? *scheme.code.d : 0) << " "
       << scheme.delta << " " << scheme.unit << "\n";
    for (std::size_t i = 0; i < batch.symbols.size(); ++i)
        os << i << " " << batch.symbols[i].to_hex() << "\n";
    return os.str();
}

}  // namespace decache::ecc
