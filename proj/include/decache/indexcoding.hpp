#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "decache/caching.hpp"
#include "decache/gf2.hpp"
#include "decache/rational.hpp"
#include "decache/subsets.hpp"

namespace decache::indexcoding {

using rational::Rat;

/// One receiver: demands message `demand`, already holds the messages whose
/// indices are set in `side`.
struct Receiver {
    std::size_t demand = 0;
    gf2::BitVector side;  // length n bitset
};

/// Index coding instance: n messages with positive unit weights, receivers
/// with demands and side information.
struct IndexInstance {
    std::size_t n = 0;
    std::vector<std::int64_t> weights;  // per message, >= 1
    std::vector<Receiver> receivers;

    void validate() const {
        if (weights.size() != n) throw std::invalid_argument("IndexInstance: need one weight per message");
        for (std::int64_t w : weights)
            if (w < 1) throw std::invalid_argument("IndexInstance: weights must be >= 1");
        for (const auto& r : receivers) {
            if (r.demand >= n) throw std::invalid_argument("IndexInstance: demand out of range");
            if (r.side.size() != n) throw std::invalid_argument("IndexInstance: side bitset must have length n");
            if (r.side.get(r.demand))
                throw std::invalid_argument("IndexInstance: a receiver cannot hold its own demand");
        }
    }

    bool unit_weights() const {
        for (std::int64_t w : weights)
            if (w != 1) return false;
        return true;
    }

    std::int64_t total_side_size() const {
        std::int64_t s = 0;
        for (const auto& r : receivers) s += static_cast<std::int64_t>(r.side.weight());
        return s;
    }
};

/// Membership in J(I): true iff some receiver demands an element of C and
/// holds none of the rest of C as side information.
inline bool in_J(const IndexInstance& inst, const std::vector<std::size_t>& C) {
    if (C.empty()) throw std::invalid_argument("in_J: C must be nonempty");
    for (std::size_t x : C)
        if (x >= inst.n) throw std::invalid_argument("in_J: index out of range");
    for (const auto& r : inst.receivers) {
        bool has_demand = false, overlaps = false;
        for (std::size_t x : C) {
            if (x == r.demand) has_demand = true;
            if (r.side.get(x)) {
                overlaps = true;
                break;
            }
        }
        if (has_demand && !overlaps) return true;
    }
    return false;
}

inline constexpr std::size_t kSubsetCheckLimit = 25;
inline constexpr std::size_t kAlphaLimit = 20;
inline constexpr std::size_t kKappaBudgetBits = 24;

/// True iff every nonempty subset of H lies in J(I).
inline bool is_generalized_independent(const IndexInstance& inst, const std::vector<std::size_t>& H,
                                       std::size_t limit = kSubsetCheckLimit) {
    if (H.size() > limit)
        throw std::invalid_argument("is_generalized_independent: |H|=" + std::to_string(H.size()) +
                                    " exceeds subset-check limit " + std::to_string(limit));
    if (H.empty()) return true;
    {
        std::vector<std::size_t> sorted = H;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("is_generalized_independent: H contains duplicates");
        if (sorted.back() >= inst.n) throw std::invalid_argument("is_generalized_independent: index out of range");
    }

    // per receiver: positions of H it holds, and which element of H it demands
    const std::size_t h = H.size();
    std::vector<std::uint32_t> side_mask(inst.receivers.size(), 0);
    std::vector<std::int64_t> demand_pos(inst.receivers.size(), -1);
    for (std::size_t r = 0; r < inst.receivers.size(); ++r) {
        for (std::size_t i = 0; i < h; ++i) {
            if (inst.receivers[r].side.get(H[i])) side_mask[r] |= 1u << i;
            if (inst.receivers[r].demand == H[i]) demand_pos[r] = static_cast<std::int64_t>(i);
        }
    }
    for (std::uint32_t sub = 1; sub < (std::uint32_t{1} << h); ++sub) {
        bool ok = false;
        for (std::size_t r = 0; r < inst.receivers.size(); ++r) {
            if (demand_pos[r] >= 0 && (sub >> demand_pos[r]) & 1 && (sub & side_mask[r]) == 0) {
                ok = true;
                break;
            }
        }
        if (!ok) return false;
    }
    return true;
}

/// Witness for a generalized independent set and its weighted size.
struct GenIndepCertificate {
    std::vector<std::size_t> members;
    std::int64_t weighted_size = 0;
};

struct AlphaResult {
    std::int64_t alpha = 0;  // maximum weighted size
    GenIndepCertificate certificate;
};

/// Exhaustive generalized independence number. A set is good iff it lies in
/// J(I) and all its one-element-removed subsets are good, so a subset DP over
/// the 2^n masks visits each J membership exactly once.
inline AlphaResult alpha_brute(const IndexInstance& inst, std::size_t limit = kAlphaLimit) {
    inst.validate();
    if (inst.n > limit)
        throw std::invalid_argument("alpha_brute: n=" + std::to_string(inst.n) + " exceeds limit " +
                                    std::to_string(limit));

    std::vector<std::uint32_t> demand_bit(inst.receivers.size()), side_bits(inst.receivers.size());
    for (std::size_t r = 0; r < inst.receivers.size(); ++r) {
        demand_bit[r] = 1u << inst.receivers[r].demand;
        std::uint32_t m = 0;
        for (std::size_t i = 0; i < inst.n; ++i)
            if (inst.receivers[r].side.get(i)) m |= 1u << i;
        side_bits[r] = m;
    }
    const std::size_t total = std::size_t{1} << inst.n;
    std::vector<std::uint8_t> good(total, 0);
    good[0] = 1;
    AlphaResult best;
    for (std::uint32_t mask = 1; mask < total; ++mask) {
        bool ok = true;
        for (std::uint32_t rest = mask; rest && ok; rest &= rest - 1)
            ok = good[mask & ~(rest & -rest)];
        if (ok) {
            ok = false;
            for (std::size_t r = 0; r < inst.receivers.size() && !ok; ++r)
                ok = (mask & demand_bit[r]) && (mask & side_bits[r]) == 0;
        }
        if (!ok) continue;
        good[mask] = 1;
        std::int64_t w = 0;
        for (std::uint32_t rest = mask; rest; rest &= rest - 1)
            w += inst.weights[static_cast<std::size_t>(std::countr_zero(rest))];
        if (w > best.alpha) {
            best.alpha = w;
            best.certificate.members.clear();
            for (std::uint32_t rest = mask; rest; rest &= rest - 1)
                best.certificate.members.push_back(static_cast<std::size_t>(std::countr_zero(rest)));
            best.certificate.weighted_size = w;
        }
    }
    return best;
}

/// Exhaustive min-rank over GF(2): minimum rank of the stacked rows
/// v_i + e_{f(i)} over all side-information-supported choices v_i.
/// Requires unit weights; weighted instances must be expanded first.
inline std::size_t kappa_brute(const IndexInstance& inst, std::size_t budget_bits = kKappaBudgetBits) {
    inst.validate();
    if (!inst.unit_weights())
        throw std::invalid_argument("kappa_brute: weights must be 1 (expand_to_units first)");
    if (inst.n > 63) throw std::invalid_argument("kappa_brute: n > 63 unsupported");
    const std::int64_t side_total = inst.total_side_size();
    if (side_total > static_cast<std::int64_t>(budget_bits))
        throw std::invalid_argument("kappa_brute: enumeration size 2^" + std::to_string(side_total) +
                                    " exceeds budget 2^" + std::to_string(budget_bits));

    struct Rec {
        std::uint64_t demand_bit;
        std::vector<std::size_t> support;
    };
    std::vector<Rec> recs;
    for (const auto& r : inst.receivers) {
        Rec rec;
        rec.demand_bit = std::uint64_t{1} << r.demand;
        for (std::size_t i = 0; i < inst.n; ++i)
            if (r.side.get(i)) rec.support.push_back(i);
        recs.push_back(std::move(rec));
    }

    std::size_t best = recs.empty() ? 0 : inst.n + 1;
    std::vector<std::uint64_t> basis;  // xor-basis, one row per pivot
    auto reduce = [&](std::uint64_t row) {
        for (std::uint64_t b : basis) row = std::min(row, row ^ b);
        return row;
    };
    auto dfs = [&](auto&& self, std::size_t level) -> void {
        if (basis.size() >= best) return;  // rank can only grow
        if (level == recs.size()) {
            best = basis.size();
            return;
        }
        const Rec& rec = recs[level];
        const std::size_t choices = std::size_t{1} << rec.support.size();
        for (std::size_t c = 0; c < choices; ++c) {
            std::uint64_t row = rec.demand_bit;
            for (std::size_t t = 0; t < rec.support.size(); ++t)
                if ((c >> t) & 1) row ^= std::uint64_t{1} << rec.support[t];
            const std::uint64_t reduced = reduce(row);
            if (reduced == 0) {
                self(self, level + 1);
            } else {
                basis.push_back(reduced);
                self(self, level + 1);
                basis.pop_back();
            }
        }
    };
    dfs(dfs, 0);
    return best;
}

/// Unit-granularity expansion: a message of weight w becomes w unit messages,
/// each demanded by its own receiver; side information expands to all units.
inline IndexInstance expand_to_units(const IndexInstance& inst) {
    inst.validate();
    std::vector<std::size_t> first(inst.n);
    std::size_t units = 0;
    for (std::size_t m = 0; m < inst.n; ++m) {
        first[m] = units;
        units += static_cast<std::size_t>(inst.weights[m]);
    }
    IndexInstance out;
    out.n = units;
    out.weights.assign(units, 1);
    for (const auto& r : inst.receivers) {
        gf2::BitVector side(units);
        for (std::size_t m = 0; m < inst.n; ++m)
            if (r.side.get(m))
                for (std::int64_t u = 0; u < inst.weights[m]; ++u) side.set(first[m] + u, true);
        for (std::int64_t u = 0; u < inst.weights[r.demand]; ++u)
            out.receivers.push_back({first[r.demand] + static_cast<std::size_t>(u), side});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bridge from caching problems to index coding instances.

/// Canonical enumeration of the nonempty subfiles of a partition: file-major,
/// subsets in canonical order. Message ids are shared between
/// induced_instance and construct_B.
struct MessageIndex {
    std::vector<std::vector<std::int64_t>> id;  // [file][mask] -> id or -1
    std::vector<std::pair<std::size_t, std::uint32_t>> ref;  // id -> (file, mask)
    std::vector<std::int64_t> weight;                        // id -> units

    static MessageIndex build(const caching::CachingConfig& cfg) {
        MessageIndex mi;
        mi.id.assign(cfg.num_files, std::vector<std::int64_t>(cfg.num_subsets(), -1));
        for (std::size_t i = 0; i < cfg.num_files; ++i)
            for (std::uint32_t m : subsets::canonical_subsets(static_cast<unsigned>(cfg.num_users))) {
                const std::int64_t w = cfg.subfile_units(subsets::popcount(m));
                if (w == 0) continue;
                mi.id[i][m] = static_cast<std::int64_t>(mi.ref.size());
                mi.ref.emplace_back(i, m);
                mi.weight.push_back(w);
            }
        return mi;
    }
};

/// The index coding problem induced by a fixed idealized placement and
/// demand: one message per nonempty subfile weighted in units, one receiver
/// per (user, missing subfile of its demand), side information = the user's
/// cache.
inline IndexInstance induced_instance(const caching::SubfilePartition& part, const caching::DemandVector& d) {
    const caching::CachingConfig& cfg = part.config;
    d.validate(cfg);
    if (cfg.mode != caching::PlacementMode::idealized)
        throw std::invalid_argument("induced_instance: bernoulli placement has no unit weights");

    const MessageIndex mi = MessageIndex::build(cfg);
    IndexInstance inst;
    inst.n = mi.ref.size();
    inst.weights = mi.weight;

    // cache bitset per user
    std::vector<gf2::BitVector> cache(cfg.num_users, gf2::BitVector(inst.n));
    for (std::size_t id = 0; id < mi.ref.size(); ++id)
        for (std::size_t k = 0; k < cfg.num_users; ++k)
            if (mi.ref[id].second & (1u << k)) cache[k].set(id, true);

    for (std::size_t k = 0; k < cfg.num_users; ++k)
        for (std::uint32_t m : subsets::canonical_subsets(static_cast<unsigned>(cfg.num_users))) {
            if (m & (1u << k)) continue;
            const std::int64_t id = mi.id[d.d[k]][m];
            if (id < 0) continue;
            inst.receivers.push_back({static_cast<std::size_t>(id), cache[k]});
        }
    return inst;
}

/// Result of the constructive generalized independent set B: for each user i
/// (in position order) it contributes the subfiles of its demand owned only
/// by later users.
struct BConstruction {
    GenIndepCertificate certificate;  // message ids + weighted size in units
    std::vector<std::pair<std::size_t, std::uint32_t>> members;  // (file, mask)
    long long bits = 0;
};

/// Pairwise ordering argument: the receiver demanding the earlier-indexed
/// member must hold no other member as side information.
inline bool verify_b_ordering(const std::vector<std::pair<std::size_t, std::uint32_t>>& members,
                              const std::vector<std::size_t>& member_user) {
    for (std::size_t x = 0; x < members.size(); ++x)
        for (std::size_t y = 0; y < members.size(); ++y)
            if (x != y && member_user[x] <= member_user[y] &&
                (members[y].second >> member_user[x]) & 1)
                return false;  // receiver of member x caches member y
    return true;
}

inline BConstruction construct_B(const caching::SubfilePartition& part, const caching::DemandVector& d) {
    const caching::CachingConfig& cfg = part.config;
    d.validate(cfg);
    if (cfg.mode != caching::PlacementMode::idealized)
        throw std::invalid_argument("construct_B: requires idealized placement");
    if (!d.distinct()) throw std::invalid_argument("construct_B: demands must be distinct (worst case)");

    const MessageIndex mi = MessageIndex::build(cfg);
    BConstruction out;
    std::vector<std::size_t> member_user;
    for (std::size_t i = 0; i < cfg.num_users; ++i) {
        // subsets of {i+1, .., K-1}: masks over the high bits only
        const std::uint32_t high = static_cast<std::uint32_t>(((1u << cfg.num_users) - 1) & ~((1u << (i + 1)) - 1));
        for (std::uint32_t m : subsets::canonical_subsets(static_cast<unsigned>(cfg.num_users))) {
            if ((m & ~high) != 0) continue;  // must avoid users 1..i
            const std::int64_t id = mi.id[d.d[i]][m];
            if (id < 0) continue;
            out.certificate.members.push_back(static_cast<std::size_t>(id));
            out.certificate.weighted_size += mi.weight[id];
            out.members.emplace_back(d.d[i], m);
            member_user.push_back(i);
        }
    }
    out.bits = out.certificate.weighted_size * static_cast<long long>(cfg.unit_bits());
    if (!verify_b_ordering(out.members, member_user))
        throw std::logic_error("construct_B: ordering argument violated");
    return out;
}

/// Optimality certification for one demand: the constructive lower bound |B|,
/// the achieved delivery bit count, and the closed-form value must coincide.
struct SandwichReport {
    long long b_bits = 0;         // alpha lower bound, in bits
    long long delivered_bits = 0; // kappa upper bound via the achievable scheme
    long long formula_bits = 0;   // (1-p)(1/p)(1-(1-p)^K) F
    bool certified = false;
};

inline SandwichReport sandwich_check(const caching::SubfilePartition& part, const caching::DemandVector& d) {
    const caching::CachingConfig& cfg = part.config;
    if (cfg.p_num == 0) throw std::invalid_argument("sandwich_check: requires p > 0");
    SandwichReport rep;
    rep.b_bits = construct_B(part, d).bits;
    rep.delivered_bits = static_cast<long long>(caching::deliver(part, d).total_bits());
    rep.formula_bits =
        rational::to_integer(caching::zero_error_rate(cfg) * Rat(static_cast<long long>(cfg.file_bits)));
    rep.certified = rep.b_bits == rep.delivered_bits && rep.delivered_bits == rep.formula_bits;
    return rep;
}

// ---------------------------------------------------------------------------
// Instance text format: line 1 "n", line 2 the n weights, then one line per
// receiver "f | x1 x2 ..." with 1-based message indices.

inline IndexInstance parse_instance(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    auto next_line = [&](std::string& out) {
        while (std::getline(is, out)) {
            if (!out.empty() && out.back() == '\r') out.pop_back();
            if (!out.empty() && out[0] != '#') return true;
        }
        return false;
    };
    IndexInstance inst;
    if (!next_line(line)) throw std::invalid_argument("parse_instance: missing message count");
    inst.n = std::stoul(line);
    if (!next_line(line)) throw std::invalid_argument("parse_instance: missing weights line");
    {
        std::istringstream ws(line);
        std::int64_t w;
        while (ws >> w) inst.weights.push_back(w);
    }
    if (inst.weights.size() != inst.n) throw std::invalid_argument("parse_instance: expected n weights");
    while (next_line(line)) {
        auto bar = line.find('|');
        if (bar == std::string::npos) throw std::invalid_argument("parse_instance: receiver line needs '|'");
        Receiver r;
        r.side = gf2::BitVector(inst.n);
        std::istringstream fs(line.substr(0, bar));
        long f = 0;
        if (!(fs >> f) || f < 1 || static_cast<std::size_t>(f) > inst.n)
            throw std::invalid_argument("parse_instance: bad demand index");
        r.demand = static_cast<std::size_t>(f - 1);
        std::istringstream xs(line.substr(bar + 1));
        long x = 0;
        while (xs >> x) {
            if (x < 1 || static_cast<std::size_t>(x) > inst.n)
                throw std::invalid_argument("parse_instance: side index out of range");
            r.side.set(static_cast<std::size_t>(x - 1), true);
        }
        inst.receivers.push_back(std::move(r));
    }
    inst.validate();
    return inst;
}

inline std::string format_instance(const IndexInstance& inst) {
    std::ostringstream os;
    os << inst.n << "\n";
    for (std::size_t i = 0; i < inst.n; ++i) os << (i ? " " : "") << inst.weights[i];
    os << "\n";
    for (const auto& r : inst.receivers) {
        os << (r.demand + 1) << " |";
        for (std::size_t i = 0; i < inst.n; ++i)
            if (r.side.get(i)) os << " " << (i + 1);
        os << "\n";
    }
    return os.str();
}

}  // namespace decache::indexcoding
