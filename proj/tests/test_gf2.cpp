#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "decache/gf2.hpp"

using decache::gf2::BitMatrix;
using decache::gf2::BitVector;

TEST_CASE("rank of basic matrices") {
    CHECK(decache::gf2::rank(BitMatrix::identity(3)) == 3);
    CHECK(decache::gf2::rank(BitMatrix(2, 5)) == 0);
    CHECK(decache::gf2::rank(BitMatrix::from_rows({"110", "011", "101"})) == 2);
    CHECK(decache::gf2::rank(BitMatrix()) == 0);
    CHECK(decache::gf2::rank(BitMatrix(0, 4)) == 0);
    CHECK(decache::gf2::rank(BitMatrix(4, 0)) == 0);
}

TEST_CASE("rref basics") {
    auto [ident, piv] = decache::gf2::rref(BitMatrix::identity(3));
    CHECK(ident == BitMatrix::identity(3));
    CHECK(piv == std::vector<std::size_t>{0, 1, 2});

    auto [dup, piv2] = decache::gf2::rref(BitMatrix::from_rows({"11", "11"}));
    CHECK(dup == BitMatrix::from_rows({"11", "00"}));
    CHECK(piv2 == std::vector<std::size_t>{0});

    auto [swapped, piv3] = decache::gf2::rref(BitMatrix::from_rows({"01", "10"}));
    CHECK(swapped == BitMatrix::from_rows({"10", "01"}));
    CHECK(piv3 == std::vector<std::size_t>{0, 1});
}

TEST_CASE("mat_vec_mul") {
    const auto ident = BitMatrix::identity(3);
    CHECK(decache::gf2::mat_vec_mul(BitVector::from_string("100"), ident) == BitVector::from_string("100"));
    CHECK(decache::gf2::mat_vec_mul(BitVector::from_string("111"), ident) == BitVector::from_string("111"));
    const auto m = BitMatrix::from_rows({"101", "011"});
    CHECK(decache::gf2::mat_vec_mul(BitVector::from_string("11"), m) == BitVector::from_string("110"));
    CHECK_THROWS_AS(decache::gf2::mat_vec_mul(BitVector::from_string("101"), m), std::invalid_argument);
}

TEST_CASE("in_row_space") {
    const auto m = BitMatrix::from_rows({"100", "010"});
    CHECK(decache::gf2::in_row_space(BitVector::from_string("000"), m));
    CHECK(decache::gf2::in_row_space(BitVector::from_string("110"), m));
    CHECK_FALSE(decache::gf2::in_row_space(BitVector::from_string("001"), m));
    CHECK_THROWS_AS(decache::gf2::in_row_space(BitVector::from_string("1010"), m), std::invalid_argument);
}

namespace {

BitMatrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
    BitMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            if (rng() & 1) m.set(r, c, true);
    return m;
}

}  // namespace

TEST_CASE("rank equals pivot count and is invariant under row operations") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t rows = 1 + rng() % 8, cols = 1 + rng() % 10;
        const BitMatrix m = random_matrix(rng, rows, cols);
        const auto base = decache::gf2::rref(m);
        CHECK(decache::gf2::rank(m) == base.pivots.size());

        // row space preserved by rref
        for (std::size_t r = 0; r < rows; ++r) CHECK(decache::gf2::in_row_space(m.row(r), base.matrix));

        // permute rows
        BitMatrix perm = m;
        for (std::size_t r = rows; r > 1; --r) perm.swap_rows(r - 1, rng() % r);
        CHECK(decache::gf2::rank(perm) == base.pivots.size());

        // add one row into another
        if (rows >= 2) {
            BitMatrix added = m;
            const std::size_t src = rng() % rows;
            std::size_t dst = rng() % rows;
            if (dst == src) dst = (dst + 1) % rows;
            added.xor_row_into(src, dst);
            CHECK(decache::gf2::rank(added) == base.pivots.size());
        }

        // every row lies in its own row space
        for (std::size_t r = 0; r < rows; ++r) CHECK(decache::gf2::in_row_space(m.row(r), m));
    }
}

TEST_CASE("bit vector string and hex round trips") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t len = rng() % 90;
        BitVector v(len);
        for (std::size_t i = 0; i < len; ++i)
            if (rng() & 1) v.set(i, true);
        CHECK(BitVector::from_string(v.to_string()) == v);
        CHECK(BitVector::from_hex(v.to_hex(), len) == v);
    }
    CHECK(BitVector::from_string("1010").to_hex() == "a");
    CHECK(BitVector::from_string("10001").to_hex() == "88");
}

TEST_CASE("xor and slicing") {
    BitVector a = BitVector::from_string("110101");
    a.xor_with(BitVector::from_string("011100"));
    CHECK(a == BitVector::from_string("101001"));
    a.xor_prefix(BitVector::from_string("101"));
    CHECK(a == BitVector::from_string("000001"));
    CHECK(a.slice(3, 3) == BitVector::from_string("001"));
    CHECK(a.weight() == 1);

    BitVector b = BitVector::from_string("10");
    b.append(BitVector::from_string("11"));
    CHECK(b == BitVector::from_string("1011"));
}
