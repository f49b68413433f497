#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "decache/gf2.hpp"

namespace decache::codes {

/// Raised when a received word's syndrome has no coset leader of weight <= delta.
struct UncorrectableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Binary linear [n,k,d] code defined by a generator matrix. The parity check
/// matrix and the message-recovery transform are derived on construction.
struct LinearCode {
    std::size_t n = 0;
    std::size_t k = 0;
    gf2::BitMatrix G;                 // k x n, full row rank
    gf2::BitMatrix H;                 // (n-k) x n, G * H^T = 0
    std::optional<std::size_t> d;     // minimum distance, once known

    // rref(G) = T * G; pivot coordinates of a codeword yield its coefficients
    // over the rref rows, so message = coeffs * T. Supports non-systematic G.
    gf2::BitMatrix rrefG;
    std::vector<std::size_t> pivots;
    gf2::BitMatrix T;

    static LinearCode from_generator(gf2::BitMatrix gen, std::optional<std::size_t> dist = std::nullopt) {
        LinearCode c;
        c.k = gen.rows();
        c.n = gen.cols();
        c.G = std::move(gen);
        c.d = dist;

        // Gauss-Jordan on [G | I_k]; the augment accumulates the transform T.
        gf2::BitMatrix aug(c.k, c.n + c.k);
        for (std::size_t r = 0; r < c.k; ++r) {
            for (std::size_t col = 0; col < c.n; ++col)
                if (c.G.get(r, col)) aug.set(r, col, true);
            aug.set(r, c.n + r, true);
        }
        std::size_t rank = 0;
        std::vector<std::size_t> piv;
        for (std::size_t col = 0; col < c.n && rank < c.k; ++col) {
            std::size_t p = rank;
            while (p < c.k && !aug.get(p, col)) ++p;
            if (p == c.k) continue;
            aug.swap_rows(rank, p);
            for (std::size_t r = 0; r < c.k; ++r)
                if (r != rank && aug.get(r, col)) aug.xor_row_into(rank, r);
            piv.push_back(col);
            ++rank;
        }
        if (rank != c.k) throw std::invalid_argument("LinearCode: generator rows are linearly dependent");

        c.pivots = std::move(piv);
        c.rrefG = gf2::BitMatrix(c.k, c.n);
        c.T = gf2::BitMatrix(c.k, c.k);
        for (std::size_t r = 0; r < c.k; ++r)
            for (std::size_t col = 0; col < c.n + c.k; ++col)
                if (aug.get(r, col)) {
                    if (col < c.n)
                        c.rrefG.set(r, col, true);
                    else
                        c.T.set(r, col - c.n, true);
                }

        // Parity rows: one per non-pivot column j, with a 1 at j and the rref
        // column entries at the pivot coordinates.
        c.H = gf2::BitMatrix(c.n - c.k, c.n);
        std::size_t hr = 0;
        std::vector<bool> is_pivot(c.n, false);
        for (std::size_t p2 : c.pivots) is_pivot[p2] = true;
        for (std::size_t j = 0; j < c.n; ++j) {
            if (is_pivot[j]) continue;
            c.H.set(hr, j, true);
            for (std::size_t i = 0; i < c.k; ++i)
                if (c.rrefG.get(i, j)) c.H.set(hr, c.pivots[i], true);
            ++hr;
        }
        return c;
    }

    /// Coefficients of codeword c over G, i.e. the message y with y*G = c.
    gf2::BitVector message_of(const gf2::BitVector& codeword) const {
        gf2::BitVector coeffs(k);
        for (std::size_t i = 0; i < k; ++i) coeffs.set(i, codeword.get(pivots[i]));
        return gf2::mat_vec_mul(coeffs, T);
    }

    /// Syndrome of v as a word (n-k <= 64 always holds for this library's codes).
    std::uint64_t syndrome(const gf2::BitVector& v) const {
        if (n - k > 64) throw std::invalid_argument("LinearCode::syndrome: redundancy over 64 bits");
        std::uint64_t s = 0;
        const std::size_t nwords = std::min(v.words().size(), H.words_per_row());
        for (std::size_t r = 0; r < n - k; ++r) {
            const std::uint64_t* hrow = H.row_data(r);
            std::uint64_t acc = 0;
            for (std::size_t w = 0; w < nwords; ++w) acc ^= hrow[w] & v.words()[w];
            if (std::popcount(acc) & 1) s |= std::uint64_t{1} << r;
        }
        return s;
    }
};

inline gf2::BitVector encode(const LinearCode& code, const gf2::BitVector& msg) {
    if (msg.size() != code.k) throw std::invalid_argument("encode: message length must equal k");
    return gf2::mat_vec_mul(msg, code.G);
}

inline constexpr std::size_t kExhaustiveLimit = 24;

/// Minimum weight over all nonzero codewords, by Gray-code enumeration of the
/// 2^k - 1 nonzero messages.
inline std::size_t min_distance(const LinearCode& code, std::size_t limit = kExhaustiveLimit) {
    if (code.k > limit)
        throw std::invalid_argument("min_distance: k=" + std::to_string(code.k) +
                                    " exceeds exhaustive limit " + std::to_string(limit));
    if (code.k == 0) throw std::invalid_argument("min_distance: zero-dimensional code");
    gf2::BitVector acc(code.n);
    std::size_t best = std::numeric_limits<std::size_t>::max();
    const std::uint64_t total = std::uint64_t{1} << code.k;
    for (std::uint64_t m = 1; m < total; ++m) {
        const unsigned flip = static_cast<unsigned>(std::countr_zero(m));
        acc.xor_with(code.G.row(flip));
        best = std::min(best, acc.weight());
    }
    return best;
}

/// [k+r, k, 3] code with r the least integer satisfying 2^r - r - 1 >= k.
/// Built from the Hamming parity-check matrix of all nonzero r-bit columns,
/// dropping the highest-valued message columns first, message coordinates
/// ahead of parity coordinates. Optimal length for distance 3 at every k.
inline LinearCode shortened_hamming(std::size_t k) {
    if (k < 1) throw std::invalid_argument("shortened_hamming: k must be >= 1");
    unsigned r = 2;
    while (((std::uint64_t{1} << r) - r - 1) < k) ++r;

    std::vector<std::uint64_t> message_cols;
    for (std::uint64_t c = 3; c < (std::uint64_t{1} << r); ++c)
        if (std::popcount(c) > 1) message_cols.push_back(c);
    message_cols.resize(k);  // ascending order == delete highest-index first

    const std::size_t n = k + r;
    gf2::BitMatrix G(k, n);
    for (std::size_t i = 0; i < k; ++i) {
        G.set(i, i, true);
        for (unsigned j = 0; j < r; ++j)
            if ((message_cols[i] >> j) & 1) G.set(i, k + j, true);
    }
    LinearCode code = LinearCode::from_generator(std::move(G), 3);
    if (k <= kExhaustiveLimit && min_distance(code) != 3)
        throw std::logic_error("shortened_hamming: constructed distance is not 3");
    return code;
}

/// Greedy lexicographic code of length n and distance >= d: candidate words
/// are scanned in increasing numeric order and kept as basis vectors whenever
/// the enlarged span still has minimum weight >= d.
inline LinearCode greedy_lexicode(std::size_t n, std::size_t d, std::size_t limit = kExhaustiveLimit) {
    if (n > limit)
        throw std::invalid_argument("greedy_lexicode: n=" + std::to_string(n) + " exceeds limit " +
                                    std::to_string(limit));
    if (n == 0 || d == 0) throw std::invalid_argument("greedy_lexicode: n and d must be positive");
    std::vector<std::uint64_t> basis;
    std::vector<std::uint64_t> span{0};
    for (std::uint64_t v = 1; v < (std::uint64_t{1} << n); ++v) {
        bool ok = true;
        for (std::uint64_t w : span)
            if (static_cast<std::size_t>(std::popcount(v ^ w)) < d) {
                ok = false;
                break;
            }
        if (!ok) continue;
        basis.push_back(v);
        const std::size_t old = span.size();
        span.reserve(old * 2);
        for (std::size_t i = 0; i < old; ++i) span.push_back(span[i] ^ v);
    }
    if (basis.empty())
        throw std::invalid_argument("greedy_lexicode: no codeword of length " + std::to_string(n) +
                                    " reaches distance " + std::to_string(d));
    std::size_t dmin = std::numeric_limits<std::size_t>::max();
    for (std::uint64_t w : span)
        if (w) dmin = std::min(dmin, static_cast<std::size_t>(std::popcount(w)));
    gf2::BitMatrix G(basis.size(), n);
    for (std::size_t i = 0; i < basis.size(); ++i)
        for (std::size_t j = 0; j < n; ++j)
            if ((basis[i] >> j) & 1) G.set(i, j, true);
    return LinearCode::from_generator(std::move(G), dmin);
}

struct LengthBound {
    std::size_t n = 0;
    bool exact = false;
};

struct ConstructedCode {
    LinearCode code;
    bool exact = false;  // true when code.n is a known-optimal length
};

/// Shortest binary code of dimension k and distance d this library can build.
/// d=1,2,3 resolve constructively and optimally; selected d=5 lengths come
/// from published code tables and are realized by lexicodes; anything else
/// falls back to a lexicode search and is flagged as an upper bound.
inline ConstructedCode construct_code(std::size_t k, std::size_t d) {
    if (k == 0) return {LinearCode{}, true};  // zero-dimensional: length 0
    if (d == 0) throw std::invalid_argument("construct_code: d must be >= 1");
    if (d == 1) return {LinearCode::from_generator(gf2::BitMatrix::identity(k), 1), true};
    if (d == 2) {
        // even-weight code [k+1, k, 2]
        gf2::BitMatrix G(k, k + 1);
        for (std::size_t i = 0; i < k; ++i) {
            G.set(i, i, true);
            G.set(i, k, true);
        }
        return {LinearCode::from_generator(std::move(G), 2), true};
    }
    if (d == 3) return {shortened_hamming(k), true};
    if (k == 1) {
        // repetition [d, 1, d]
        gf2::BitMatrix G(1, d);
        for (std::size_t j = 0; j < d; ++j) G.set(0, j, true);
        return {LinearCode::from_generator(std::move(G), d), true};
    }

    // Published optimal lengths realized by greedy lexicodes.
    static const std::unordered_map<std::uint64_t, std::size_t> kKnownLengths = {
        {(std::uint64_t{2} << 32) | 5, 8},   // dimension 2, distance 5
        {(std::uint64_t{3} << 32) | 5, 10},  // dimension 3, distance 5
    };
    const auto known = kKnownLengths.find((std::uint64_t{k} << 32) | d);

    for (std::size_t n = std::max(d, k); n <= kExhaustiveLimit; ++n) {
        LinearCode c = greedy_lexicode(n, d);
        if (c.k < k) continue;
        if (c.k > k) {
            // keep the first k basis rows; distance of a subcode cannot drop
            gf2::BitMatrix G(k, n);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (c.G.get(i, j)) G.set(i, j, true);
            c = LinearCode::from_generator(std::move(G));
            c.d = min_distance(c);
        }
        const bool exact = known != kKnownLengths.end() && known->second == n;
        return {std::move(c), exact};
    }
    throw std::invalid_argument("construct_code: no construction for dimension " + std::to_string(k) +
                                " at distance " + std::to_string(d));
}

/// N_2[k,d] when known exactly, otherwise the best constructive length,
/// flagged as an upper bound.
inline LengthBound best_known_length(std::size_t k, std::size_t d) {
    auto built = construct_code(k, d);
    return {built.code.n, built.exact};
}

/// Coset-leader table for bounded-distance syndrome decoding up to delta errors.
struct SyndromeTable {
    LinearCode code;
    std::size_t delta = 0;
    std::unordered_map<std::uint64_t, gf2::BitVector> leaders;
};

inline SyndromeTable build_syndrome_table(LinearCode code, std::size_t delta) {
    if (!code.d) code.d = min_distance(code);
    if (2 * delta + 1 > *code.d)
        throw std::invalid_argument("build_syndrome_table: delta=" + std::to_string(delta) +
                                    " needs distance >= " + std::to_string(2 * delta + 1) + ", code has d=" +
                                    std::to_string(*code.d));
    SyndromeTable t;
    t.code = std::move(code);
    t.delta = delta;

    // every pattern of weight <= delta has a distinct syndrome when 2*delta+1 <= d
    gf2::BitVector zero(t.code.n);
    t.leaders.emplace(0, zero);
    std::vector<std::size_t> positions;
    auto enumerate = [&](auto&& self, std::size_t start, std::size_t remaining) -> void {
        if (remaining == 0) return;
        for (std::size_t p = start; p < t.code.n; ++p) {
            positions.push_back(p);
            gf2::BitVector e(t.code.n);
            for (std::size_t q : positions) e.set(q, true);
            t.leaders.emplace(t.code.syndrome(e), e);
            self(self, p + 1, remaining - 1);
            positions.pop_back();
        }
    };
    enumerate(enumerate, 0, delta);
    return t;
}

/// Bounded-distance decode: strips the coset leader and returns the message.
inline gf2::BitVector decode(const SyndromeTable& table, const gf2::BitVector& received) {
    if (received.size() != table.code.n) throw std::invalid_argument("decode: received length must equal n");
    const std::uint64_t s = table.code.syndrome(received);
    const auto it = table.leaders.find(s);
    if (it == table.leaders.end())
        throw UncorrectableError("decode: uncorrectable error (weight exceeds delta=" +
                                 std::to_string(table.delta) + ")");
    gf2::BitVector codeword = received;
    codeword.xor_with(it->second);
    return table.code.message_of(codeword);
}

/// Text form: first line "n k", then k rows of n '0'/'1' characters.
inline std::string format_generator(const LinearCode& code) {
    std::ostringstream os;
    os << code.n << " " << code.k << "\n";
    for (std::size_t r = 0; r < code.k; ++r) os << code.G.row(r).to_string() << "\n";
    return os.str();
}

inline LinearCode parse_generator(const std::string& text) {
    std::istringstream is(text);
    std::size_t n = 0, k = 0;
    if (!(is >> n >> k)) throw std::invalid_argument("parse_generator: expected header 'n k'");
    std::vector<std::string> rows;
    std::string line;
    while (rows.size() < k && is >> line) {
        if (line.size() != n) throw std::invalid_argument("parse_generator: row length must equal n");
        rows.push_back(line);
    }
    if (rows.size() != k) throw std::invalid_argument("parse_generator: expected k rows");
    return LinearCode::from_generator(gf2::BitMatrix::from_rows(rows));
}

}  // namespace decache::codes
