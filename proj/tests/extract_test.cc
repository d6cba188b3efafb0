#include "msdi/extract.h"

#include <bit>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "msdi/errors.h"
#include "msdi/random.h"

using namespace msdi;

namespace {

// Dense Toeplitz oracle.
std::uint64_t toeplitz_oracle(std::uint64_t x, std::uint64_t seed, int n, int m) {
    std::uint64_t out = 0;
    for (int j = 0; j < m; j++) {
        int bit = 0;
        for (int i = 0; i < n; i++) {
            bit ^= static_cast<int>(((seed >> (i - j + m - 1)) & 1) & ((x >> i) & 1));
        }
        out |= std::uint64_t(bit) << j;
    }
    return out;
}

// Exact distance oracle in integers: sum over seeds and outputs of |count * 2^m - |X||.
Rational distance_oracle(const std::vector<std::uint64_t> &xs, int n, int m) {
    int t = n + m - 1;
    std::int64_t acc = 0;
    for (std::uint64_t s = 0; s < (1u << t); s++) {
        std::vector<std::int64_t> c(1u << m, 0);
        for (auto x : xs) {
            c[toeplitz_oracle(x, s, n, m)]++;
        }
        for (auto v : c) {
            acc += std::llabs(v * (1 << m) - static_cast<std::int64_t>(xs.size()));
        }
    }
    return Rational(acc, static_cast<std::int64_t>(xs.size()) * (1 << m) * (std::int64_t{1} << t));
}

int tri_oracle(unsigned a, unsigned b, unsigned c) {
    return (std::popcount(a & b) + std::popcount(b & c) + std::popcount(c & a)) & 1;
}

std::vector<unsigned> subsets_of_size(unsigned universe, int size) {
    std::vector<unsigned> out;
    for (unsigned s = 0; s < (1u << universe); s++) {
        if (std::popcount(s) == size) {
            out.push_back(s);
        }
    }
    return out;
}

std::vector<std::uint64_t> members(unsigned mask) {
    std::vector<std::uint64_t> out;
    for (unsigned v = 0; v < 32; v++) {
        if ((mask >> v) & 1) {
            out.push_back(v);
        }
    }
    return out;
}

}  // namespace

TEST(SeededExtract, Trivial) {
    SeededRandom r(1);
    auto seed = r.bits(toeplitz_seed_length(10, 3));
    EXPECT_FALSE(seeded_extract(BitVec(10), seed, 3).any());
    EXPECT_FALSE(seeded_extract(r.bits(10), BitVec(12), 3).any());
    EXPECT_THROW(seeded_extract(BitVec(10), BitVec(10), 3), SeedLengthMismatch);
}

TEST(SeededExtract, MatchesDenseToeplitz) {
    for (int n = 1; n <= 6; n++) {
        for (int m = 1; m <= 3; m++) {
            int t = n + m - 1;
            for (std::uint64_t s = 0; s < (1u << t); s += 3) {
                for (std::uint64_t x = 0; x < (1u << n); x++) {
                    auto out = seeded_extract(BitVec::from_u64(x, n), BitVec::from_u64(s, t), m);
                    EXPECT_EQ(out.to_u64(), toeplitz_oracle(x, s, n, m));
                }
            }
        }
    }
}

TEST(SeededExtract, SingleBitIsInnerProduct) {
    SeededRandom r(2);
    for (int i = 0; i < 100; i++) {
        auto x = r.bits(40), s = r.bits(40);
        EXPECT_EQ(seeded_extract(x, s, 1).get(0), x.dot(s));
    }
}

TEST(SeededExtract, FlatSourcesOnFourBits) {
    // Every flat source with 2^3 points in {0,1}^4, one output bit.
    Rational worst = 0;
    for (unsigned mask : subsets_of_size(16, 8)) {
        std::vector<std::uint64_t> xs;
        for (unsigned v = 0; v < 16; v++) {
            if ((mask >> v) & 1) {
                xs.push_back(v);
            }
        }
        auto d = strong_extractor_distance(xs, 4, 1);
        worst = std::max(worst, d);
        ASSERT_LE(to_double(d), leftover_hash_ceiling(3, 1));
    }
    EXPECT_LE(to_double(worst), std::pow(2.0, -1.0));
}

TEST(SeededExtract, ExactDistanceMatchesOracle) {
    SeededRandom r(5);
    for (int rep = 0; rep < 40; rep++) {
        int n = 3 + static_cast<int>(r.uniform(4));
        int m = 1 + static_cast<int>(r.uniform(2));
        std::vector<std::uint64_t> xs;
        for (std::uint64_t v = 0; v < (1u << n); v++) {
            if (r.bit()) {
                xs.push_back(v);
            }
        }
        if (xs.empty()) {
            continue;
        }
        EXPECT_EQ(strong_extractor_distance(xs, n, m), distance_oracle(xs, n, m));
    }
}

TEST(Ext3, Examples) {
    EXPECT_FALSE(ext3(BitVec(3), BitVec(3), BitVec(3)));
    EXPECT_TRUE(ext3(BitVec::from_string("100"), BitVec::from_string("100"), BitVec::from_string("000")));
    EXPECT_THROW(ext3(BitVec(3), BitVec(4), BitVec(3)), LengthMismatch);
    EXPECT_THROW(make_ext3("li"), ConfigError);
}

TEST(Ext3, IsParityOfMajorities) {
    SeededRandom r(3);
    for (int i = 0; i < 200; i++) {
        auto a = r.bits(30), b = r.bits(30), c = r.bits(30);
        int maj = 0;
        for (int j = 0; j < 30; j++) {
            maj ^= (a.get(j) + b.get(j) + c.get(j)) >= 2;
        }
        EXPECT_EQ(ext3(a, b, c), maj == 1);
    }
}

TEST(Ext3, FlatSourceBiasPinned) {
    // Independent flat sources with min-entropy m - 1 on m bits, all support triples.
    for (auto [m, pinned] : {std::pair<int, Rational>{2, Rational(1)}, std::pair<int, Rational>{3, Rational(7, 16)}}) {
        auto sups = subsets_of_size(1u << m, 1 << (m - 1));
        Rational worst = 0;
        for (unsigned s1 : sups) {
            for (unsigned s2 : sups) {
                for (unsigned s3 : sups) {
                    std::int64_t ones = 0, total = 0;
                    for (auto a : members(s1)) {
                        for (auto b : members(s2)) {
                            for (auto c : members(s3)) {
                                ones += tri_oracle(unsigned(a), unsigned(b), unsigned(c));
                                total++;
                            }
                        }
                    }
                    worst = std::max(worst, Rational(std::llabs(2 * ones - total), total));
                }
            }
        }
        EXPECT_EQ(worst, pinned) << "m=" << m;
    }
}

TEST(Ext3, LibraryDistanceMatchesOracle) {
    SeededRandom r(4);
    TrilinearExtractor ext;
    for (int rep = 0; rep < 30; rep++) {
        std::vector<BitVec> s[3];
        std::vector<unsigned> raw[3];
        for (int k = 0; k < 3; k++) {
            for (unsigned v = 0; v < 16; v++) {
                if (r.bit()) {
                    s[k].push_back(BitVec::from_u64(v, 4));
                    raw[k].push_back(v);
                }
            }
            if (s[k].empty()) {
                s[k].push_back(BitVec(4));
                raw[k].push_back(0);
            }
        }
        std::int64_t ones = 0, total = 0;
        for (auto a : raw[0])
            for (auto b : raw[1])
                for (auto c : raw[2]) {
                    ones += tri_oracle(a, b, c);
                    total++;
                }
        EXPECT_EQ(ext3_distance(ext, s[0], s[1], s[2]), Rational(std::llabs(2 * ones - total), total));
    }
}

TEST(DistributionJson, ExactEntriesAsStrings) {
    ExactDistribution d({"v"});
    d.add({0}, Rational(1, 3));
    d.add({1}, Rational(2, 3));
    auto j = distribution_to_json(d);
    EXPECT_EQ(j["entries"][0]["p"], "1/3");
    EXPECT_EQ(j["vars"][0], "v");
}
