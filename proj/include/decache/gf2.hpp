#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace decache::gf2 {

/// Dynamically sized bit string, packed LSB-first into 64-bit words.
/// Bit 0 is the first bit of the string.
class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t len) : len_(len), words_(word_count(len), 0) {}

    static BitVector from_string(std::string_view bits) {
        BitVector v(bits.size());
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (bits[i] == '1') {
                v.set(i, true);
            } else if (bits[i] != '0') {
                throw std::invalid_argument("BitVector::from_string: expected '0'/'1'");
            }
        }
        return v;
    }

    /// Inverse of to_hex: each hex digit carries four bits, first bit in the
    /// digit's most significant position. `len` restores the exact bit length.
    static BitVector from_hex(std::string_view hex, std::size_t len) {
        if (hex.size() * 4 < len) throw std::invalid_argument("BitVector::from_hex: hex too short");
        BitVector v(len);
        for (std::size_t i = 0; i < len; ++i) {
            char c = hex[i / 4];
            int nibble = (c >= '0' && c <= '9')   ? c - '0'
                         : (c >= 'a' && c <= 'f') ? c - 'a' + 10
                         : (c >= 'A' && c <= 'F') ? c - 'A' + 10
                                                  : -1;
            if (nibble < 0) throw std::invalid_argument("BitVector::from_hex: bad digit");
            v.set(i, (nibble >> (3 - (i % 4))) & 1);
        }
        return v;
    }

    std::size_t size() const { return len_; }
    bool empty() const { return len_ == 0; }

    bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }

    void set(std::size_t i, bool b) {
        const std::uint64_t m = std::uint64_t{1} << (i & 63);
        if (b)
            words_[i >> 6] |= m;
        else
            words_[i >> 6] &= ~m;
    }

    void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    /// XOR with a vector of the same length.
    void xor_with(const BitVector& other) {
        if (other.len_ != len_) throw std::invalid_argument("BitVector::xor_with: length mismatch");
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
    }

    /// XOR with a (possibly shorter) vector, treating it as right-padded with zeros.
    void xor_prefix(const BitVector& other) {
        if (other.len_ > len_) throw std::invalid_argument("BitVector::xor_prefix: operand longer");
        for (std::size_t w = 0; w < other.words_.size(); ++w) words_[w] ^= other.words_[w];
    }

    /// XOR packed words in place (caller guarantees the layout matches).
    void xor_words(const std::uint64_t* words, std::size_t nwords) {
        for (std::size_t w = 0; w < nwords && w < words_.size(); ++w) words_[w] ^= words[w];
    }

    std::size_t weight() const {
        std::size_t c = 0;
        for (std::uint64_t w : words_) c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    bool any() const {
        for (std::uint64_t w : words_)
            if (w) return true;
        return false;
    }

    BitVector slice(std::size_t pos, std::size_t n) const {
        if (pos + n > len_) throw std::out_of_range("BitVector::slice");
        BitVector out(n);
        for (std::size_t i = 0; i < n; ++i) out.set(i, get(pos + i));
        return out;
    }

    BitVector prefix(std::size_t n) const { return slice(0, n); }

    void append(const BitVector& other) {
        std::size_t old = len_;
        resize(len_ + other.len_);
        for (std::size_t i = 0; i < other.len_; ++i)
            if (other.get(i)) set(old + i, true);
    }

    void push_back(bool b) {
        resize(len_ + 1);
        if (b) set(len_ - 1, true);
    }

    void resize(std::size_t len) {
        words_.resize(word_count(len), 0);
        len_ = len;
        trim();
    }

    std::string to_string() const {
        std::string s(len_, '0');
        for (std::size_t i = 0; i < len_; ++i)
            if (get(i)) s[i] = '1';
        return s;
    }

    /// Hex rendering: 4 bits per digit, first bit as the digit's MSB; the last
    /// digit is zero-padded when the length is not a multiple of 4.
    std::string to_hex() const {
        static const char digits[] = "0123456789abcdef";
        std::string s((len_ + 3) / 4, '0');
        for (std::size_t d = 0; d < s.size(); ++d) {
            int nibble = 0;
            for (std::size_t j = 0; j < 4 && d * 4 + j < len_; ++j)
                if (get(d * 4 + j)) nibble |= 8 >> j;
            s[d] = digits[nibble];
        }
        return s;
    }

    friend bool operator==(const BitVector& a, const BitVector& b) {
        return a.len_ == b.len_ && a.words_ == b.words_;
    }

    const std::vector<std::uint64_t>& words() const { return words_; }

private:
    static std::size_t word_count(std::size_t len) { return (len + 63) / 64; }

    void trim() {
        if (len_ & 63) words_.back() &= (std::uint64_t{1} << (len_ & 63)) - 1;
        // resize down can leave the tail word dirty otherwise
    }

    std::size_t len_ = 0;
    std::vector<std::uint64_t> words_;
};

/// Dense GF(2) matrix; rows packed contiguously, bit layout as in BitVector.
class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), wpr_((cols + 63) / 64), words_(rows * wpr_, 0) {}

    static BitMatrix identity(std::size_t n) {
        BitMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
        return m;
    }

    static BitMatrix from_rows(const std::vector<std::string>& rows) {
        BitMatrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != m.cols_) throw std::invalid_argument("BitMatrix::from_rows: ragged rows");
            for (std::size_t c = 0; c < m.cols_; ++c) {
                if (rows[r][c] == '1')
                    m.set(r, c, true);
                else if (rows[r][c] != '0')
                    throw std::invalid_argument("BitMatrix::from_rows: expected '0'/'1'");
            }
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    bool get(std::size_t r, std::size_t c) const { return (words_[r * wpr_ + (c >> 6)] >> (c & 63)) & 1; }

    void set(std::size_t r, std::size_t c, bool b) {
        const std::uint64_t m = std::uint64_t{1} << (c & 63);
        if (b)
            words_[r * wpr_ + (c >> 6)] |= m;
        else
            words_[r * wpr_ + (c >> 6)] &= ~m;
    }

    BitVector row(std::size_t r) const {
        BitVector v(cols_);
        for (std::size_t c = 0; c < cols_; ++c)
            if (get(r, c)) v.set(c, true);
        return v;
    }

    void set_row(std::size_t r, const BitVector& v) {
        if (v.size() != cols_) throw std::invalid_argument("BitMatrix::set_row: length mismatch");
        for (std::size_t w = 0; w < wpr_; ++w) words_[r * wpr_ + w] = w < v.words().size() ? v.words()[w] : 0;
    }

    void xor_row_into(std::size_t src, std::size_t dst) {
        for (std::size_t w = 0; w < wpr_; ++w) words_[dst * wpr_ + w] ^= words_[src * wpr_ + w];
    }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t w = 0; w < wpr_; ++w) std::swap(words_[a * wpr_ + w], words_[b * wpr_ + w]);
    }

    void append_row(const BitVector& v) {
        if (rows_ == 0 && cols_ == 0) {
            cols_ = v.size();
            wpr_ = (cols_ + 63) / 64;
        }
        words_.resize((rows_ + 1) * wpr_, 0);
        ++rows_;
        set_row(rows_ - 1, v);
    }

    friend bool operator==(const BitMatrix& a, const BitMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.words_ == b.words_;
    }

    const std::uint64_t* row_data(std::size_t r) const { return words_.data() + r * wpr_; }
    std::size_t words_per_row() const { return wpr_; }

private:
    std::size_t rows_ = 0, cols_ = 0, wpr_ = 0;
    std::vector<std::uint64_t> words_;

    friend struct RowOps;
};

/// Word-level row elimination shared by rank/rref. Operates on a copy.
struct RowOps {
    static int find_pivot(const BitMatrix& m, std::size_t col, std::size_t from) {
        for (std::size_t r = from; r < m.rows_; ++r)
            if (m.get(r, col)) return static_cast<int>(r);
        return -1;
    }
};

struct RrefResult {
    BitMatrix matrix;
    std::vector<std::size_t> pivots;
};

/// Reduced row echelon form over GF(2); preserves the row space.
inline RrefResult rref(BitMatrix m) {
    std::vector<std::size_t> pivots;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < m.cols() && rank < m.rows(); ++col) {
        int piv = RowOps::find_pivot(m, col, rank);
        if (piv < 0) continue;
        m.swap_rows(rank, static_cast<std::size_t>(piv));
        for (std::size_t r = 0; r < m.rows(); ++r)
            if (r != rank && m.get(r, col)) m.xor_row_into(rank, r);
        pivots.push_back(col);
        ++rank;
    }
    return {std::move(m), std::move(pivots)};
}

/// GF(2) row rank. Empty matrices have rank 0.
inline std::size_t rank(const BitMatrix& m) { return rref(m).pivots.size(); }

/// Row vector times matrix: result[j] = XOR over i of v[i] & m[i][j].
inline BitVector mat_vec_mul(const BitVector& v, const BitMatrix& m) {
    if (v.size() != m.rows()) throw std::invalid_argument("mat_vec_mul: v.len must equal m.rows");
    BitVector out(m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        if (v.get(i)) out.xor_words(m.row_data(i), m.words_per_row());
    return out;
}

/// True iff v is a GF(2) combination of the rows of m.
inline bool in_row_space(const BitVector& v, const BitMatrix& m) {
    if (v.size() != m.cols()) throw std::invalid_argument("in_row_space: v.len must equal m.cols");
    auto [r, pivots] = rref(m);
    BitVector rem = v;
    for (std::size_t i = 0; i < pivots.size(); ++i)
        if (rem.get(pivots[i])) rem.xor_with(r.row(i));
    return !rem.any();
}

}  // namespace decache::gf2
