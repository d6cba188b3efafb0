#include "msdi/distribution.h"

#include <gtest/gtest.h>

#include "msdi/random.h"

using namespace msdi;

namespace {

Distribution random_dist(SeededRandom &r, int k) {
    Distribution d({"v"});
    double t = 0;
    std::vector<double> w(k);
    for (auto &x : w) {
        x = r.unit();
        t += x;
    }
    for (int i = 0; i < k; i++) {
        d.add({i}, w[i] / t);
    }
    return d;
}

}  // namespace

TEST(OneNorm, PointMassVsUniformBit) {
    Distribution p({"b"}), q({"b"});
    p.add({0}, 1.0);
    q.add({0}, 0.5);
    q.add({1}, 0.5);
    EXPECT_DOUBLE_EQ(one_norm(p, q), 1.0);
    EXPECT_DOUBLE_EQ(one_norm(p, p), 0.0);
}

TEST(OneNorm, MatchesDirectSum) {
    SeededRandom r(11);
    for (int rep = 0; rep < 20; rep++) {
        auto p = random_dist(r, 6);
        auto q = random_dist(r, 6);
        double direct = 0;
        for (int i = 0; i < 6; i++) {
            direct += std::abs(p.prob({i}) - q.prob({i}));
        }
        EXPECT_NEAR(one_norm(p, q), direct, 1e-15);
    }
}

TEST(OneNorm, TriangleAndDataProcessing) {
    SeededRandom r(12);
    for (int rep = 0; rep < 50; rep++) {
        auto p = random_dist(r, 8);
        auto q = random_dist(r, 8);
        auto s = random_dist(r, 8);
        EXPECT_LE(one_norm(p, s), one_norm(p, q) + one_norm(q, s) + 1e-12);
        auto f = [](const Distribution::Outcome &o) { return Distribution::Outcome{o[0] % 3}; };
        EXPECT_LE(one_norm(p.transform({"v"}, f), q.transform({"v"}, f)), one_norm(p, q) + 1e-12);
    }
}

TEST(OneNorm, RejectsDifferentVariables) {
    Distribution p({"a"}), q({"b"});
    EXPECT_THROW(one_norm(p, q), SupportMismatch);
}

TEST(MinEntropy, UniformAndPointMass) {
    ExactDistribution u({"v"});
    for (int i = 0; i < 8; i++) {
        u.add({i}, Rational(1, 8));
    }
    EXPECT_DOUBLE_EQ(min_entropy(u), 3.0);
    ExactDistribution pm({"v"});
    pm.add({5}, 1);
    EXPECT_DOUBLE_EQ(min_entropy(pm), 0.0);
}

TEST(MinEntropy, ConditioningOnNullEventThrows) {
    ExactDistribution d({"a", "b"});
    d.add({0, 0}, 1);
    EXPECT_THROW(min_entropy_given(d, {{"b", 1}}), ZeroProbabilityEvent);
}

TEST(Markov, ProductIsMarkov) {
    ExactDistribution a({"a"}), c({"c"}), d({"d"});
    a.add({0}, Rational(1, 3));
    a.add({1}, Rational(2, 3));
    c.add({0}, Rational(1, 2));
    c.add({1}, Rational(1, 2));
    d.add({0}, Rational(1, 5));
    d.add({1}, Rational(4, 5));
    auto j = a.product(c).product(d);
    EXPECT_TRUE(is_markov(j, {"a"}, {"c"}, {"d"}));
}

TEST(Markov, NoisyCopyIsNotMarkov) {
    ExactDistribution j({"a", "c", "d"});
    Rational noise(1, 20);
    for (int a = 0; a < 2; a++) {
        for (int c = 0; c < 2; c++) {
            for (int f = 0; f < 2; f++) {
                j.add({a, c, a ^ f}, Rational(1, 4) * (f ? noise : 1 - noise));
            }
        }
    }
    EXPECT_FALSE(is_markov(j, {"a"}, {"c"}, {"d"}));
    EXPECT_GT(conditional_mutual_information(j, {"a"}, {"d"}, {"c"}), 0.5);
}

// A chain AB - C - D also satisfies B - AC - D.
TEST(Markov, ChainImpliesRefinedChain) {
    SeededRandom r(5);
    for (int rep = 0; rep < 10; rep++) {
        std::vector<double> pc(3), pab_c(12), pd_c(6);
        for (auto &v : pc) v = 0.1 + r.unit();
        for (auto &v : pab_c) v = 0.1 + r.unit();
        for (auto &v : pd_c) v = 0.1 + r.unit();
        Distribution j({"a", "b", "c", "d"});
        for (int c = 0; c < 3; c++) {
            double sab = 0, sd = 0;
            for (int k = 0; k < 4; k++) sab += pab_c[c * 4 + k];
            for (int k = 0; k < 2; k++) sd += pd_c[c * 2 + k];
            for (int a = 0; a < 2; a++)
                for (int b = 0; b < 2; b++)
                    for (int d = 0; d < 2; d++)
                        j.add({a, b, c, d}, pc[c] * pab_c[c * 4 + a * 2 + b] / sab * pd_c[c * 2 + d] / sd);
        }
        j = j.normalized();
        EXPECT_TRUE(is_markov(j, {"a", "b"}, {"c"}, {"d"}, 1e-9));
        EXPECT_TRUE(is_markov(j, {"b"}, {"a", "c"}, {"d"}, 1e-9));
    }
}

TEST(Distribution, ConditionDropsVariables) {
    ExactDistribution d({"x", "y"});
    d.add({0, 0}, Rational(1, 4));
    d.add({0, 1}, Rational(1, 4));
    d.add({1, 1}, Rational(1, 2));
    auto c = d.condition({{"y", 1}});
    ASSERT_EQ(c.vars(), std::vector<std::string>{"x"});
    EXPECT_EQ(c.prob({0}), Rational(1, 3));
    EXPECT_EQ(c.prob({1}), Rational(2, 3));
}
