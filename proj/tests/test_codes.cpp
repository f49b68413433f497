#include <catch2/catch_amalgamated.hpp>

#include <bit>
#include <random>

#include "decache/codes.hpp"

using decache::codes::LinearCode;
using decache::gf2::BitMatrix;
using decache::gf2::BitVector;

namespace {

// the published [6,3,3] generator used throughout
LinearCode hexacode() {
    return LinearCode::from_generator(BitMatrix::from_rows({"100110", "010101", "001011"}));
}

// independent oracle: XOR the generator rows selected by the message
BitVector encode_by_row_xor(const LinearCode& c, const BitVector& msg) {
    BitVector out(c.n);
    for (std::size_t i = 0; i < c.k; ++i)
        if (msg.get(i)) out.xor_with(c.G.row(i));
    return out;
}

}  // namespace

TEST_CASE("encode") {
    const LinearCode c = hexacode();
    CHECK(decache::codes::encode(c, BitVector(3)) == BitVector(6));
    CHECK(decache::codes::encode(c, BitVector::from_string("100")) == BitVector::from_string("100110"));
    // XOR of the three rows
    CHECK(encode_by_row_xor(c, BitVector::from_string("111")) == BitVector::from_string("111000"));
    CHECK(decache::codes::encode(c, BitVector::from_string("111")) == BitVector::from_string("111000"));
    CHECK_THROWS_AS(decache::codes::encode(c, BitVector::from_string("1011")), std::invalid_argument);
}

TEST_CASE("encode is linear") {
    const LinearCode c = hexacode();
    std::mt19937_64 rng(3);
    for (int t = 0; t < 50; ++t) {
        BitVector a(3), b(3);
        for (int i = 0; i < 3; ++i) {
            if (rng() & 1) a.set(i, true);
            if (rng() & 1) b.set(i, true);
        }
        BitVector sum = a;
        sum.xor_with(b);
        BitVector lhs = decache::codes::encode(c, a);
        lhs.xor_with(decache::codes::encode(c, b));
        CHECK(lhs == decache::codes::encode(c, sum));
    }
}

TEST_CASE("generator/parity consistency") {
    const LinearCode c = hexacode();
    REQUIRE(c.H.rows() == 3);
    for (std::size_t r = 0; r < c.k; ++r)
        for (std::size_t s = 0; s < c.H.rows(); ++s) {
            int dot = 0;
            for (std::size_t j = 0; j < c.n; ++j) dot ^= (c.G.get(r, j) && c.H.get(s, j)) ? 1 : 0;
            CHECK(dot == 0);
        }
    CHECK(decache::gf2::rank(c.G) == c.k);
    CHECK(decache::gf2::rank(c.H) == c.n - c.k);
    CHECK_THROWS_AS(LinearCode::from_generator(BitMatrix::from_rows({"110", "110"})), std::invalid_argument);
}

TEST_CASE("min_distance") {
    LinearCode rep3 = LinearCode::from_generator(BitMatrix::from_rows({"111"}));
    CHECK(decache::codes::min_distance(rep3) == 3);
    CHECK(decache::codes::min_distance(hexacode()) == 3);
    CHECK(decache::codes::min_distance(LinearCode::from_generator(BitMatrix::identity(5))) == 1);

    LinearCode wide = LinearCode::from_generator(BitMatrix::identity(30));
    CHECK_THROWS_WITH(decache::codes::min_distance(wide), Catch::Matchers::ContainsSubstring("exhaustive limit"));
}

TEST_CASE("shortened hamming family") {
    // k=1: no [2,1,3] code exists (exhaustive over the 3 nonzero length-2 words)
    for (std::uint32_t g = 1; g < 4; ++g) CHECK(std::popcount(g) < 3);
    CHECK(decache::codes::shortened_hamming(1).n == 3);

    const LinearCode six = decache::codes::shortened_hamming(3);
    CHECK(six.n == 6);
    CHECK(six.G == BitMatrix::from_rows({"100110", "010101", "001011"}));  // the published generator
    CHECK(decache::codes::shortened_hamming(111).n == 118);
    CHECK(decache::codes::shortened_hamming(4).n == 7);

    std::size_t prev = 0;
    for (std::size_t k = 1; k <= 40; ++k) {
        const LinearCode c = decache::codes::shortened_hamming(k);
        CHECK(c.n >= prev);  // non-decreasing length
        prev = c.n;
        if (k <= 10) CHECK(decache::codes::min_distance(c) == 3);
    }
}

TEST_CASE("greedy lexicode") {
    CHECK(decache::codes::greedy_lexicode(3, 3).k == 1);  // repetition
    CHECK(decache::codes::greedy_lexicode(8, 5).k == 2);
    CHECK(decache::codes::greedy_lexicode(10, 5).k == 3);
    CHECK(decache::codes::greedy_lexicode(5, 1).k == 5);  // whole space
    CHECK_THROWS_AS(decache::codes::greedy_lexicode(30, 3), std::invalid_argument);
}

TEST_CASE("best known lengths") {
    auto check = [](std::size_t k, std::size_t d, std::size_t n, bool exact) {
        const auto got = decache::codes::best_known_length(k, d);
        CHECK(got.n == n);
        CHECK(got.exact == exact);
    };
    check(2, 5, 8, true);
    check(3, 5, 10, true);
    check(111, 3, 118, true);
    check(3, 3, 6, true);
    check(7, 3, 11, true);
    check(4, 1, 4, true);
    check(4, 2, 5, true);
    check(1, 7, 7, true);  // repetition
    CHECK_THROWS_WITH(decache::codes::best_known_length(40, 5),
                      Catch::Matchers::ContainsSubstring("no construction"));
}

TEST_CASE("syndrome table sizes") {
    const auto six = decache::codes::build_syndrome_table(hexacode(), 1);
    CHECK(six.leaders.size() == 7);  // zero plus six single-bit patterns, 8 syndromes exist

    const auto trivial = decache::codes::build_syndrome_table(hexacode(), 0);
    CHECK(trivial.leaders.size() == 1);

    const auto rep = decache::codes::build_syndrome_table(
        LinearCode::from_generator(BitMatrix::from_rows({"111"})), 1);
    CHECK(rep.leaders.size() == 4);  // all syndromes covered

    CHECK_THROWS_AS(decache::codes::build_syndrome_table(hexacode(), 2), std::invalid_argument);
}

TEST_CASE("decode round trips") {
    const auto codes_under_test = {
        decache::codes::shortened_hamming(3),
        decache::codes::shortened_hamming(4),
        LinearCode::from_generator(BitMatrix::from_rows({"111"})),
        decache::codes::greedy_lexicode(8, 5),
    };
    for (const LinearCode& c : codes_under_test) {
        const std::size_t delta = (decache::codes::min_distance(c) - 1) / 2;
        const auto table = decache::codes::build_syndrome_table(c, delta);
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << c.k); ++m) {
            BitVector msg(c.k);
            for (std::size_t i = 0; i < c.k; ++i)
                if ((m >> i) & 1) msg.set(i, true);
            const BitVector codeword = decache::codes::encode(c, msg);
            CHECK(decache::codes::decode(table, codeword) == msg);

            // exhaustive error patterns of weight <= delta (n <= 12 here)
            std::vector<std::vector<std::size_t>> patterns;
            for (std::size_t i = 0; i < c.n; ++i) {
                patterns.push_back({i});
                if (delta >= 2)
                    for (std::size_t j = i + 1; j < c.n; ++j) patterns.push_back({i, j});
            }
            for (const auto& pat : patterns) {
                BitVector noisy = codeword;
                for (std::size_t pos : pat) noisy.flip(pos);
                CHECK(decache::codes::decode(table, noisy) == msg);
            }
        }
    }
}

TEST_CASE("sampled decode round trips on a longer code") {
    // n = 21 is past the exhaustive sweep range; sample messages and errors
    const LinearCode c = decache::codes::shortened_hamming(16);
    REQUIRE(c.n == 21);
    const auto table = decache::codes::build_syndrome_table(c, 1);
    std::mt19937_64 rng(99);
    for (int t = 0; t < 300; ++t) {
        BitVector msg(c.k);
        for (std::size_t i = 0; i < c.k; ++i)
            if (rng() & 1) msg.set(i, true);
        BitVector noisy = decache::codes::encode(c, msg);
        if (t % 3 > 0) noisy.flip(rng() % c.n);  // two thirds carry one error
        CHECK(decache::codes::decode(table, noisy) == msg);
    }
}

TEST_CASE("flip-and-decode on the published code") {
    const LinearCode c = hexacode();
    const auto table = decache::codes::build_syndrome_table(c, 1);
    BitVector noisy = BitVector::from_string("100110");
    noisy.flip(0);
    CHECK(decache::codes::decode(table, noisy) == BitVector::from_string("100"));

    // majority decode of the repetition code
    const auto rep = decache::codes::build_syndrome_table(
        LinearCode::from_generator(BitMatrix::from_rows({"111"})), 1);
    CHECK(decache::codes::decode(rep, BitVector::from_string("110")) == BitVector::from_string("1"));
}

TEST_CASE("uncorrectable syndrome is reported") {
    const LinearCode c = hexacode();
    const auto table = decache::codes::build_syndrome_table(c, 1);
    // find a weight-2 error whose syndrome is the one not covered by the table
    bool found = false;
    for (std::size_t i = 0; i < c.n && !found; ++i)
        for (std::size_t j = i + 1; j < c.n && !found; ++j) {
            BitVector e(c.n);
            e.set(i, true);
            e.set(j, true);
            if (!table.leaders.contains(c.syndrome(e))) {
                found = true;
                BitVector noisy = decache::codes::encode(c, BitVector::from_string("101"));
                noisy.xor_with(e);
                CHECK_THROWS_AS(decache::codes::decode(table, noisy), decache::codes::UncorrectableError);
            }
        }
    CHECK(found);
}

TEST_CASE("generator text round trip") {
    const LinearCode c = decache::codes::shortened_hamming(4);
    const LinearCode back = decache::codes::parse_generator(decache::codes::format_generator(c));
    CHECK(back.G == c.G);
    CHECK(back.n == c.n);
    CHECK(back.k == c.k);
    CHECK_THROWS_AS(decache::codes::parse_generator("3 2\n111\n"), std::invalid_argument);

    // a non-systematic import still decodes
    const LinearCode odd = decache::codes::parse_generator("5 2\n11010\n01101\n");
    const auto table = decache::codes::build_syndrome_table(odd, 0);
    for (std::uint64_t m = 0; m < 4; ++m) {
        BitVector msg(2);
        if (m & 1) msg.set(0, true);
        if (m & 2) msg.set(1, true);
        CHECK(decache::codes::decode(table, decache::codes::encode(odd, msg)) == msg);
    }
}
