#include "msdi/bits.h"

#include <gtest/gtest.h>

using msdi::BitVec;

TEST(BitVec, StringRoundTrip) {
    auto v = BitVec::from_string("1011000001");
    EXPECT_EQ(v.size(), 10u);
    EXPECT_TRUE(v.get(0));
    EXPECT_FALSE(v.get(1));
    EXPECT_EQ(v.str(), "1011000001");
    EXPECT_EQ(v.weight(), 4u);
}

TEST(BitVec, HexIsMsbFirst) {
    auto v = BitVec::from_string("10000000" "01");
    EXPECT_EQ(v.hex(), "8040");
    EXPECT_EQ(BitVec::from_hex("8040", 10), v);
}

TEST(BitVec, CrossesWordBoundary) {
    BitVec v(130);
    v.set(63, true);
    v.set(64, true);
    v.set(129, true);
    EXPECT_EQ(v.weight(), 3u);
    auto s = v.slice(60, 10);
    EXPECT_EQ(s.str(), "0001100000");
}

TEST(BitVec, DotIsParity) {
    auto a = BitVec::from_string("1101");
    auto b = BitVec::from_string("1011");
    EXPECT_FALSE(a.dot(b));
    EXPECT_TRUE(a.dot(BitVec::from_string("1000")));
    EXPECT_EQ(msdi::hamming_distance(a, b), 2u);
}
