#include "msdi/random.h"

#include <map>

#include <gtest/gtest.h>

#include "msdi/errors.h"

using namespace msdi;

TEST(SeededRandom, SameSeedSameStream) {
    SeededRandom a(7), b(7);
    for (int i = 0; i < 100; i++) {
        EXPECT_EQ(a.uniform(1000), b.uniform(1000));
    }
}

TEST(SeededRandom, DerivedSeedsDiffer) {
    EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
    EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

TEST(SeededRandom, ChooseSkipsZeroWeights) {
    SeededRandom r(3);
    std::vector<double> w{0, 1, 0, 2};
    for (int i = 0; i < 200; i++) {
        auto k = r.choose(w);
        EXPECT_TRUE(k == 1 || k == 3);
    }
}

TEST(PathEnumerator, WeightsSumToOne) {
    PathEnumerator e;
    Rational total = 0;
    std::map<int, Rational> law;
    do {
        int a = static_cast<int>(e.uniform(3));
        std::vector<double> w{0.25, 0.75};
        int b = a == 0 ? static_cast<int>(e.choose(w)) : 0;
        law[a * 2 + b] += e.weight();
        total += e.weight();
    } while (e.next());
    EXPECT_EQ(total, 1);
    EXPECT_EQ(law[0], Rational(1, 12));
    EXPECT_EQ(law[1], Rational(1, 4));
    EXPECT_EQ(law[2], Rational(1, 3));
    EXPECT_EQ(e.paths_visited(), 4u);
}

TEST(PathEnumerator, BudgetIsEnforced) {
    PathEnumerator e(10);
    EXPECT_THROW(
        {
            do {
                e.uniform(4);
                e.uniform(4);
            } while (e.next());
        },
        ExactModeTooLarge);
}
