#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "decache/indexcoding.hpp"

using namespace decache;
using caching::DemandVector;
using caching::FileLibrary;
using indexcoding::IndexInstance;
using rational::Rat;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

IndexInstance cycle5() { return indexcoding::parse_instance(read_file(std::string(DECACHE_DATA_DIR) + "/cycle5.txt")); }

caching::SubfilePartition make_partition(std::size_t N, std::size_t K, long long a, long long b, std::size_t F) {
    caching::CachingConfig cfg;
    cfg.num_files = N;
    cfg.num_users = K;
    cfg.p_num = a;
    cfg.p_den = b;
    cfg.file_bits = F;
    cfg.mode = caching::PlacementMode::idealized;
    return caching::place_idealized(cfg, FileLibrary::random(cfg, 13));
}

// one receiver per message, no side information
IndexInstance bare_instance(std::size_t n) {
    IndexInstance inst;
    inst.n = n;
    inst.weights.assign(n, 1);
    for (std::size_t i = 0; i < n; ++i) inst.receivers.push_back({i, gf2::BitVector(n)});
    return inst;
}

}  // namespace

TEST_CASE("J membership on the 5-cycle") {
    const IndexInstance inst = cycle5();
    CHECK(indexcoding::in_J(inst, {0, 2, 3}));        // {1,3,4}
    CHECK_FALSE(indexcoding::in_J(inst, {0, 1}));     // {1,2}
    CHECK(indexcoding::in_J(inst, {inst.receivers[0].demand}));
    CHECK_THROWS_AS(indexcoding::in_J(inst, {}), std::invalid_argument);

    // the full J(I) family for this instance, from its published listing
    const std::set<std::set<std::size_t>> expected = {
        {0}, {0, 2}, {0, 3}, {0, 2, 3}, {1}, {1, 3}, {1, 4}, {1, 3, 4},
        {2}, {2, 4}, {0, 2, 4}, {3}, {0, 1, 3}, {4}, {1, 2, 4},
    };
    for (std::uint32_t mask = 1; mask < 32; ++mask) {
        std::vector<std::size_t> C;
        std::set<std::size_t> Cset;
        for (std::size_t i = 0; i < 5; ++i)
            if ((mask >> i) & 1) {
                C.push_back(i);
                Cset.insert(i);
            }
        CHECK(indexcoding::in_J(inst, C) == expected.contains(Cset));
    }
}

TEST_CASE("generalized independence on the 5-cycle") {
    const IndexInstance inst = cycle5();
    CHECK(indexcoding::is_generalized_independent(inst, {0, 2}));  // {1,3}
    CHECK(indexcoding::is_generalized_independent(inst, {}));
    // exhaustive: no 3-subset is generalized independent
    for (std::size_t a = 0; a < 5; ++a)
        for (std::size_t b = a + 1; b < 5; ++b)
            for (std::size_t c = b + 1; c < 5; ++c)
                CHECK_FALSE(indexcoding::is_generalized_independent(inst, {a, b, c}));
    CHECK_THROWS_AS(
        indexcoding::is_generalized_independent(bare_instance(3), {0, 1, 2}, 2),
        std::invalid_argument);
}

TEST_CASE("alpha on small instances") {
    const auto r = indexcoding::alpha_brute(cycle5());
    CHECK(r.alpha == 2);
    CHECK(r.certificate.weighted_size == 2);
    CHECK(indexcoding::is_generalized_independent(cycle5(), r.certificate.members));

    CHECK(indexcoding::alpha_brute(bare_instance(6)).alpha == 6);
    CHECK(indexcoding::alpha_brute(bare_instance(1)).alpha == 1);

    IndexInstance big = bare_instance(21);
    CHECK_THROWS_AS(indexcoding::alpha_brute(big), std::invalid_argument);
}

TEST_CASE("kappa on small instances") {
    CHECK(indexcoding::kappa_brute(cycle5()) == 3);
    CHECK(indexcoding::kappa_brute(bare_instance(5)) == 5);

    // over-budget report carries the enumeration size
    IndexInstance fat = bare_instance(8);
    for (auto& r : fat.receivers)
        for (std::size_t i = 0; i < 8; ++i)
            if (i != r.demand) r.side.set(i, true);
    CHECK_THROWS_WITH(indexcoding::kappa_brute(fat), Catch::Matchers::ContainsSubstring("2^56"));

    IndexInstance weighted = bare_instance(3);
    weighted.weights = {2, 1, 1};
    CHECK_THROWS_AS(indexcoding::kappa_brute(weighted), std::invalid_argument);
    CHECK(indexcoding::kappa_brute(indexcoding::expand_to_units(weighted)) == 4);
}

TEST_CASE("induced instance of the 2-user problem") {
    const auto part = make_partition(2, 2, 1, 2, 4);
    const auto inst = indexcoding::induced_instance(part, DemandVector{{0, 1}});
    CHECK(inst.n == 8);
    CHECK(inst.unit_weights());
    REQUIRE(inst.receivers.size() == 4);
    for (const auto& r : inst.receivers) CHECK(r.side.weight() == 4);

    // unit-granularity min-rank equals the 3 delivered units
    CHECK(indexcoding::kappa_brute(inst) == 3);
    CHECK(indexcoding::alpha_brute(inst).alpha == 3);
}

TEST_CASE("induced instance weights for the 3-user problem") {
    const auto part = make_partition(4, 3, 1, 4, 64);
    const auto inst = indexcoding::induced_instance(part, DemandVector{{0, 1, 2}});
    CHECK(inst.n == 32);
    std::multiset<std::int64_t> per_file;
    for (std::size_t i = 0; i < 8; ++i) per_file.insert(inst.weights[i]);
    CHECK(per_file == std::multiset<std::int64_t>{27, 9, 9, 9, 3, 3, 3, 1});
    // receivers: per user, one per missing subfile of its demand
    CHECK(inst.receivers.size() == 3 * 4);
}

TEST_CASE("single user induced instance") {
    const auto part = make_partition(2, 1, 1, 2, 2);
    const auto inst = indexcoding::induced_instance(part, DemandVector{{1}});
    // the demanded file has one uncached subfile at K=1
    CHECK(inst.receivers.size() == 1);
    CHECK(indexcoding::in_J(inst, {inst.receivers[0].demand}));
}

TEST_CASE("construct_B reproduces the published 2-user sets") {
    const auto part = make_partition(2, 2, 1, 2, 4);
    using Members = std::set<std::pair<std::size_t, std::uint32_t>>;

    const auto b12 = indexcoding::construct_B(part, DemandVector{{0, 1}});
    CHECK(Members(b12.members.begin(), b12.members.end()) ==
          Members{{0, 0b00}, {0, 0b10}, {1, 0b00}});  // X1phi, X1{2}, X2phi

    const auto b21 = indexcoding::construct_B(part, DemandVector{{1, 0}});
    CHECK(Members(b21.members.begin(), b21.members.end()) ==
          Members{{1, 0b00}, {1, 0b10}, {0, 0b00}});  // X2phi, X2{2}, X1phi

    CHECK(b12.bits == 3);  // 3F/4 at F=4
    CHECK(b12.bits == b21.bits);

    CHECK_THROWS_AS(indexcoding::construct_B(part, DemandVector{{0, 0}}), std::invalid_argument);
}

TEST_CASE("construct_B matches the 3-user table rows") {
    const auto part = make_partition(4, 3, 1, 4, 64);
    using Members = std::set<std::pair<std::size_t, std::uint32_t>>;

    const auto b = indexcoding::construct_B(part, DemandVector{{1, 0, 2}});  // demand (2,1,3)
    CHECK(Members(b.members.begin(), b.members.end()) ==
          Members{{1, 0b000}, {1, 0b010}, {1, 0b100}, {1, 0b110}, {0, 0b000}, {0, 0b100}, {2, 0b000}});
    CHECK(b.bits == 111);  // 111F/64 at F=64

    // weighted size equals the geometric series for every distinct demand
    const auto cfg = part.config;
    std::vector<std::size_t> files{0, 1, 2, 3};
    std::vector<long long> sizes;
    do {
        DemandVector d{{files[0], files[1], files[2]}};
        const auto bb = indexcoding::construct_B(part, d);
        Rat series(0);
        for (unsigned n = 1; n <= cfg.num_users; ++n)
            series += rational::pow(Rat(cfg.p_den - cfg.p_num, cfg.p_den), n);
        CHECK(Rat(bb.bits) == series * Rat(static_cast<long long>(cfg.file_bits)));
        sizes.push_back(bb.bits);
    } while (std::next_permutation(files.begin(), files.end()));
    CHECK(sizes.size() == 24);
    CHECK(std::set<long long>(sizes.begin(), sizes.end()).size() == 1);  // all equal
}

TEST_CASE("construct_B certificates are generalized independent") {
    for (std::size_t K = 2; K <= 4; ++K) {
        const auto part = make_partition(K + 1, K, 1, 2, std::size_t{1} << K);
        DemandVector d;
        for (std::size_t k = 0; k < K; ++k) d.d.push_back(K - k);  // distinct, shuffled
        const auto b = indexcoding::construct_B(part, d);
        const auto inst = indexcoding::induced_instance(part, d);
        CHECK(indexcoding::is_generalized_independent(inst, b.certificate.members));
    }
}

TEST_CASE("sandwich certification") {
    const auto p22 = make_partition(2, 2, 1, 2, 4);
    const auto rep = indexcoding::sandwich_check(p22, DemandVector{{0, 1}});
    CHECK(rep.certified);
    CHECK(rep.b_bits == 3);
    CHECK(rep.delivered_bits == 3);
    CHECK(rep.formula_bits == 3);

    const auto p43 = make_partition(4, 3, 1, 4, 64);
    const auto rep43 = indexcoding::sandwich_check(p43, DemandVector{{0, 1, 2}});
    CHECK(rep43.certified);
    CHECK(rep43.formula_bits == 111);

    // N=5, K=4, p=1/2: all three equal 15F/16
    const auto p54 = make_partition(5, 4, 1, 2, 16);
    const auto rep54 = indexcoding::sandwich_check(p54, DemandVector{{4, 2, 0, 1}});
    CHECK(rep54.certified);
    CHECK(rep54.b_bits == 15);
}

TEST_CASE("alpha is at most kappa on random instances") {
    std::mt19937_64 rng(2024);
    int checked = 0;
    while (checked < 60) {
        const std::size_t n = 2 + rng() % 7;  // up to 8 messages
        IndexInstance inst;
        inst.n = n;
        inst.weights.assign(n, 1);
        const std::size_t R = 1 + rng() % n;
        std::int64_t side_total = 0;
        for (std::size_t i = 0; i < R; ++i) {
            indexcoding::Receiver r;
            r.demand = rng() % n;
            r.side = gf2::BitVector(n);
            const std::size_t picks = rng() % 5;  // |X_i| <= 4
            for (std::size_t t = 0; t < picks; ++t) {
                const std::size_t x = rng() % n;
                if (x != r.demand) r.side.set(x, true);
            }
            side_total += static_cast<std::int64_t>(r.side.weight());
            inst.receivers.push_back(std::move(r));
        }
        if (side_total > 16) continue;
        const auto a = indexcoding::alpha_brute(inst);
        const auto k = indexcoding::kappa_brute(inst);
        CHECK(a.alpha <= static_cast<std::int64_t>(k));
        ++checked;
    }
}

TEST_CASE("instance text round trip") {
    const IndexInstance inst = cycle5();
    const IndexInstance back = indexcoding::parse_instance(indexcoding::format_instance(inst));
    CHECK(back.n == inst.n);
    CHECK(back.weights == inst.weights);
    REQUIRE(back.receivers.size() == inst.receivers.size());
    for (std::size_t i = 0; i < back.receivers.size(); ++i) {
        CHECK(back.receivers[i].demand == inst.receivers[i].demand);
        CHECK(back.receivers[i].side == inst.receivers[i].side);
    }
    CHECK_THROWS_AS(indexcoding::parse_instance("2\n1 1\n1 | 1\n"), std::invalid_argument);  // holds own demand
}
