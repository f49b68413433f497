#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace decache::subsets {

/// Subsets of {0,..,k-1} of size s as bitmasks, in lexicographic order of the
/// sorted element lists ({0,1} before {0,2} before {1,2}).
inline std::vector<std::uint32_t> subsets_of_size(unsigned k, unsigned s) {
    std::vector<std::uint32_t> out;
    if (s > k) return out;
    std::vector<unsigned> idx(s);
    for (unsigned i = 0; i < s; ++i) idx[i] = i;
    while (true) {
        std::uint32_t mask = 0;
        for (unsigned i : idx) mask |= 1u << i;
        out.push_back(mask);
        // advance to the lexicographic successor
        int pos = static_cast<int>(s) - 1;
        while (pos >= 0 && idx[pos] == k - s + pos) --pos;
        if (pos < 0) break;
        ++idx[pos];
        for (unsigned i = pos + 1; i < s; ++i) idx[i] = idx[i - 1] + 1;
    }
    return out;
}

/// Canonical subset order used throughout: size-descending, lexicographic
/// within each size. The full set comes first, the empty set last.
inline std::vector<std::uint32_t> canonical_subsets(unsigned k) {
    std::vector<std::uint32_t> out;
    out.reserve(std::size_t{1} << k);
    for (unsigned s = k + 1; s-- > 0;)
        for (std::uint32_t m : subsets_of_size(k, s)) out.push_back(m);
    return out;
}

inline unsigned popcount(std::uint32_t m) { return static_cast<unsigned>(std::popcount(m)); }

/// "{1,3}" with 1-based element labels; "{}" for the empty set.
inline std::string mask_to_string(std::uint32_t mask) {
    std::string s = "{";
    bool first = true;
    for (unsigned i = 0; i < 32; ++i) {
        if (mask & (1u << i)) {
            if (!first) s += ",";
            s += std::to_string(i + 1);
            first = false;
        }
    }
    return s + "}";
}

}  // namespace decache::subsets
