#include "msdi/bc.h"

#include <gtest/gtest.h>

#include "msdi/errors.h"

using namespace msdi;

namespace {

std::shared_ptr<const DeviceTable> ideal() {
    static auto t = std::make_shared<const DeviceTable>(ideal_table());
    return t;
}

BCConfig config(const std::string &code, double eps_r = 1e-3) {
    return BCConfig::make(std::make_shared<const LinearCode>(make_code(code)), eps_r);
}

// Blocks Alice would commit to, read off a record.
std::array<BitVec, 3> committed(const BCConfig &cfg, const BCCommitRecord &rec) {
    return bc_blocks(cfg, rec.a, rec.y);
}

}  // namespace

TEST(BCConfig, Validation) {
    auto cfg = config("bch:5:1:30");
    EXPECT_EQ(cfg.n, 90u);
    EXPECT_EQ(cfg.block(), 30u);
    EXPECT_NEAR(cfg.reveal_threshold(), 1.5 * std::pow(1e-3, 1.0 / 6) * 30, 1e-9);
    EXPECT_TRUE(cfg.validate().empty());
    cfg.n = 91;
    EXPECT_THROW(cfg.validate(), ConfigError);
    auto small = config("hamming74");
    EXPECT_EQ(small.validate().size(), 1u);
    auto bad = config("bch:5:1:30");
    bad.codes[1] = std::make_shared<const LinearCode>(make_code("hamming74"));
    EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(BCRun, IdealDevicesRevealCommittedBit) {
    auto cfg = config("bch:5:1:30");
    for (std::uint64_t seed = 0; seed < 100; seed++) {
        bool d = seed & 1;
        auto bank = DeviceBank::uniform(cfg.n, ideal());
        auto out = bc_run_honest(cfg, d, bank, seed);
        EXPECT_TRUE(out.commit_a.is_empty());
        EXPECT_TRUE(out.commit_b.is_empty());
        EXPECT_TRUE(out.o_a.is_empty());
        ASSERT_TRUE(out.o_b.is_bit());
        EXPECT_EQ(out.o_b.value(), d);
        EXPECT_FALSE(out.transcript.aborted());
    }
}

TEST(BCRun, TranscriptShape) {
    auto cfg = config("bch:5:1:30");
    auto bank = DeviceBank::uniform(cfg.n, ideal());
    auto out = bc_run_honest(cfg, true, bank, 11);
    int delay = *out.transcript.delay_round();
    auto from_bob = out.transcript.messages_from(PartyId::Bob);
    ASSERT_EQ(from_bob.size(), 1u);
    EXPECT_EQ(from_bob[0]->body->kind(), "bc.y");
    EXPECT_GT(from_bob[0]->round, delay);
    auto from_alice = out.transcript.messages_from(PartyId::Alice);
    ASSERT_EQ(from_alice.size(), 2u);
    EXPECT_EQ(from_alice[0]->body->kind(), "bc.commit");
    EXPECT_EQ(from_alice[1]->body->kind(), "bc.reveal");
    EXPECT_LT(from_bob[0]->round, from_alice[0]->round);
    auto line = out.to_json();
    EXPECT_EQ(line["protocol"], "bc");
    EXPECT_EQ(line["outcome"]["reveal"]["O_B"], "1");
    EXPECT_EQ(line["messages"][1]["phase"], "commit");
    EXPECT_EQ(line["messages"][2]["phase"], "reveal");
    for (int j = 0; j < 3; j++) {
        auto rj = block_bits(out.a, out.y, j, cfg.block());
        EXPECT_EQ(out.commit->w[j], cfg.codes[j]->syndrome(rj));
    }
}

TEST(BCRun, MissingRevealAborts) {
    struct Silent : BCAliceStrategy {
        std::shared_ptr<BCRevealMessage> reveal(const BCConfig &, bool, const std::vector<Trit> &,
                                                const std::vector<AnswerA> &, const std::vector<Trit> &,
                                                const BCCommitMessage &, Randomness &) override {
            return nullptr;
        }
    };
    // A null reveal is not sent; Bob's deadline passes.
    auto cfg = config("bch:5:1:30");
    auto bank = DeviceBank::uniform(cfg.n, ideal());
    Silent s;
    SeededRun run(4);
    auto out = bc_run(cfg, false, bank, run.view(), s);
    EXPECT_TRUE(out.commit_b.is_empty());
    EXPECT_TRUE(out.o_b.is_bottom());
    EXPECT_TRUE(out.transcript.aborted());
}

TEST(BCReveal, TamperedRevealRejected) {
    auto cfg = config("bch:5:1:30");
    auto bank = DeviceBank::uniform(cfg.n, ideal());
    SeededRun run(7);
    auto rec = bc_commit_honest(cfg, true, bank, run.view());
    EXPECT_EQ(bc_reveal_honest(cfg, rec), Token::bit(true));

    BCRevealMessage rev;
    rev.x = rec.x;
    rev.a = rec.a;
    rev.r = rec.r;
    auto flipped = rev;
    flipped.r[0].flip(0);
    EXPECT_TRUE(bc_reveal_check(cfg, rec.y, rec.b, *rec.commit, flipped).is_bottom());

    // Consistent R and A but W no longer matches.
    auto wrong_w = *rec.commit;
    wrong_w.w[2].flip(0);
    EXPECT_TRUE(bc_reveal_check(cfg, rec.y, rec.b, wrong_w, rev).is_bottom());

    // Flipping C alone flips the revealed bit.
    auto flip_c = *rec.commit;
    flip_c.c = !flip_c.c;
    EXPECT_EQ(bc_reveal_check(cfg, rec.y, rec.b, flip_c, rev), Token::bit(false));

    auto short_x = rev;
    short_x.x.pop_back();
    EXPECT_TRUE(bc_reveal_check(cfg, rec.y, rec.b, *rec.commit, short_x).is_bottom());
}

TEST(BCReveal, MismatchThreshold) {
    // Binding parameters tolerate no mismatch at all.
    auto cfg = config("bch:5:6:30", 1e-10);
    EXPECT_LT(cfg.reveal_threshold(), 1.0);
    auto bank = DeviceBank::uniform(cfg.n, ideal());
    SeededRun run(9);
    auto rec = bc_commit_honest(cfg, false, bank, run.view());
    EXPECT_EQ(bc_reveal_honest(cfg, rec), Token::bit(false));
    // Change one of Bob's answers at a coordinate in block 2 so its checked bit flips.
    auto b = rec.b;
    std::size_t i = cfg.block() + 3;
    int bit = rec.x[i].value();
    b[i] = AnswerB::from_mask(b[i].mask() ^ ((1 << bit) | (1 << ((bit + 1) % 3))));
    BCRevealMessage rev;
    rev.x = rec.x;
    rev.a = rec.a;
    rev.r = rec.r;
    EXPECT_TRUE(bc_reveal_check(cfg, rec.y, b, *rec.commit, rev).is_bottom());
}

TEST(BCClassify, HonestCommitsFollowCommittedBit) {
    auto cfg = config("bch:5:1:30");
    for (std::uint64_t seed = 0; seed < 40; seed++) {
        bool d = seed & 1;
        auto bank = DeviceBank::uniform(cfg.n, ideal());
        SeededRun run(seed);
        auto rec = bc_commit_honest(cfg, d, bank, run.view());
        auto cls = classify_commit(cfg, committed(cfg, rec), *rec.commit);
        EXPECT_EQ(cls.cls, d ? CommitClass::D1 : CommitClass::D0);
        EXPECT_EQ(cls.e(), !d);
        for (int j = 0; j < 3; j++) {
            EXPECT_EQ(*cls.closest[j], rec.r[j]);
        }
    }
}

TEST(BCClassify, ClosestWithinRadius) {
    auto code = make_code("bch:5:1:30");
    BitVec r = BitVec::from_string("101100111000101010111100001111");
    auto w = code.syndrome(r);
    BitVec near = r;
    near.flip(17);
    EXPECT_EQ(*closest(near, w, code), r);
    // Weight-2 offsets are outside the radius; closest finds some other string or none, never r.
    near.flip(4);
    auto c = closest(near, w, code);
    if (c) {
        EXPECT_NE(*c, r);
        EXPECT_EQ(code.syndrome(*c), w);
        EXPECT_LE(hamming_distance(*c, near), code.radius());
    }
}

TEST(BCClassify, UndecodableSyndromeIsBottom) {
    auto cfg = config("bch:5:6:30");
    auto bank = DeviceBank::uniform(cfg.n, ideal());
    SeededRun run(2);
    auto rec = bc_commit_honest(cfg, false, bank, run.view());
    auto r = committed(cfg, rec);
    auto code = cfg.codes[1];
    Syndrome far;
    for (std::uint64_t s = 1;; s++) {
        far = BitVec::from_u64(s, code->redundancy());
        if (!code->decode(far)) {
            break;
        }
    }
    auto commit = *rec.commit;
    commit.w[1] = commit.w[1] ^ far;
    auto cls = classify_commit(cfg, r, commit);
    EXPECT_EQ(cls.cls, CommitClass::DBottom);
    EXPECT_TRUE(cls.e());
    EXPECT_FALSE(cls.closest[1].has_value());
}

TEST(BCRun, BottomRateGrowsWithNoise) {
    auto cfg = config("bch:5:6:30", 1e-10);
    double prev = -1;
    for (double eps : {0.0, 0.002, 0.01, 0.05}) {
        auto table = std::make_shared<const DeviceTable>(robust_table(eps));
        int bottoms = 0;
        for (std::uint64_t seed = 0; seed < 300; seed++) {
            auto bank = DeviceBank::uniform(cfg.n, table);
            bottoms += bc_run_honest(cfg, seed & 1, bank, seed).o_b.is_bottom();
        }
        double rate = bottoms / 300.0;
        EXPECT_GE(rate, prev);
        prev = rate;
    }
    EXPECT_GT(prev, 0.5);
}

TEST(BCRun, WireRoundTripOfMessages) {
    auto cfg = config("bch:5:1:30");
    auto bank = DeviceBank::uniform(cfg.n, ideal());
    auto out = bc_run_honest(cfg, true, bank, 5);
    for (const MessageBody *m : {static_cast<const MessageBody *>(out.commit.get()),
                                 static_cast<const MessageBody *>(out.reveal.get())}) {
        auto back = decode_message(m->kind(), m->to_json());
        EXPECT_EQ(back->kind(), m->kind());
        EXPECT_EQ(back->to_json(), m->to_json());
    }
}
