#include "msdi/ot.h"

#include <gtest/gtest.h>

#include "msdi/errors.h"
#include "msdi/extract.h"

using namespace msdi;

namespace {

std::shared_ptr<const DeviceTable> ideal() {
    static auto t = std::make_shared<const DeviceTable>(ideal_table());
    return t;
}

OTConfig config(const std::string &code) {
    return OTConfig::make(std::make_shared<const LinearCode>(make_code(code)));
}

}  // namespace

TEST(OTConfig, ThresholdChecked) {
    auto cfg = config("bch:7:2:105");
    EXPECT_EQ(cfg.n, 105u);
    EXPECT_NEAR(cfg.delta(), 5.0 / 105, 1e-12);
    cfg.eps_r = 0.02;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.eps_r = 1e-3;
    cfg.seed_len = 10;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(OTRun, IdealDevicesAlwaysDeliverChosenBit) {
    auto cfg = config("bch:6:1:60");
    std::uint64_t seed = 0;
    for (int in = 0; in < 8; in++) {
        bool s0 = in & 1, s1 = in & 2, d = in & 4;
        for (int rep = 0; rep < 50; rep++) {
            auto bank = DeviceBank::uniform(cfg.n, ideal());
            auto out = ot_run_honest(cfg, s0, s1, d, bank, seed++);
            ASSERT_TRUE(out.o_b.is_bit());
            EXPECT_EQ(out.o_b.value(), d ? s1 : s0);
            EXPECT_TRUE(out.o_a.is_empty());
        }
    }
}

TEST(OTRun, TranscriptShape) {
    auto cfg = config("hamming74");
    auto bank = DeviceBank::uniform(cfg.n, ideal());
    auto out = ot_run_honest(cfg, false, true, true, bank, 3);
    auto from_alice = out.transcript.messages_from(PartyId::Alice);
    ASSERT_EQ(from_alice.size(), 1u);
    EXPECT_GT(from_alice[0]->round, *out.transcript.delay_round());
    EXPECT_TRUE(out.transcript.messages_from(PartyId::Bob).empty());
    EXPECT_EQ(out.to_json()["outcome"]["O_B"], "1");
    auto line = out.to_json();
    for (const char *f : {"seeds", "inputs", "X", "Y", "A", "B", "messages", "outcome"}) {
        EXPECT_TRUE(line.contains(f)) << f;
    }
}

TEST(OTRun, AliceViewIndependentOfChoice) {
    auto cfg = config("bch:5:1:30");
    auto table = std::make_shared<const DeviceTable>(robust_table(0.01));
    for (std::uint64_t seed = 0; seed < 200; seed++) {
        auto b0 = DeviceBank::uniform(cfg.n, table);
        auto b1 = DeviceBank::uniform(cfg.n, table);
        auto o0 = ot_run_honest(cfg, true, false, false, b0, seed);
        auto o1 = ot_run_honest(cfg, true, false, true, b1, seed);
        EXPECT_EQ(o0.x, o1.x);
        EXPECT_EQ(o0.a, o1.a);
        EXPECT_EQ(o0.msg->to_json(), o1.msg->to_json());
    }
}

TEST(OTRun, WireModeIsTransparent) {
    auto cfg = config("hamming74");
    auto b0 = DeviceBank::uniform(cfg.n, ideal());
    auto b1 = DeviceBank::uniform(cfg.n, ideal());
    SeededRun r0(9), r1(9);
    auto o0 = ot_run_honest(cfg, false, true, false, b0, r0.view(), false);
    auto o1 = ot_run_honest(cfg, false, true, false, b1, r1.view(), true);
    EXPECT_EQ(o0.transcript.to_json(), o1.transcript.to_json());
}

TEST(OTDecode, CorrectsWithinRadiusOnly) {
    auto cfg = config("bch:7:2:105");
    SeededRandom rng(1);
    OTSenderState st;
    st.x = random_trits(cfg.n, rng);
    for (std::size_t i = 0; i < cfg.n; i++) {
        st.a.push_back(AnswerA::from_index(static_cast<int>(rng.uniform(4))));
    }
    st.r0 = BitVec(cfg.n);
    st.r1 = BitVec(cfg.n);
    for (std::size_t i = 0; i < cfg.n; i++) {
        st.r0.set(i, st.a[i].bit(0));
        st.r1.set(i, st.a[i].bit(1));
    }
    auto msg = ot_sender_message(cfg, true, false, st, rng);
    // Bob answers consistent with R_0 at every common coordinate.
    auto bob_for = [&](const BitVec &target) {
        std::vector<AnswerB> b;
        for (std::size_t i = 0; i < cfg.n; i++) {
            int x = st.x[i].value();
            for (int k = 0; k < 4; k++) {
                if (AnswerB::from_index(k).bit(x) == target.get(i)) {
                    b.push_back(AnswerB::from_index(k));
                    break;
                }
            }
        }
        return b;
    };
    EXPECT_EQ(ot_bob_decode(cfg, *msg, bob_for(st.r0), false), Token::bit(true));
    BitVec noisy = st.r0;
    noisy.flip(3);
    noisy.flip(77);
    EXPECT_EQ(ot_bob_decode(cfg, *msg, bob_for(noisy), false), Token::bit(true));
    // A syndrome difference outside every radius-2 ball gives bottom.
    auto undecodable = [&] {
        for (std::uint64_t s = 1;; s++) {
            auto syn = BitVec::from_u64(s, cfg.code->redundancy());
            if (!cfg.code->decode(syn)) {
                return syn;
            }
        }
    }();
    BitVec far = st.r0 ^ cfg.code->particular_solution(undecodable);
    EXPECT_TRUE(ot_bob_decode(cfg, *msg, bob_for(far), false).is_bottom());
}

TEST(OTRun, BottomRateGrowsWithNoise) {
    // Most syndromes of this code lie outside every radius-2 ball, so heavy noise shows up as bottom.
    auto cfg = config("bch:7:2:105");
    double prev = -1;
    for (double eps : {0.0, 0.01, 0.03, 0.08}) {
        auto table = std::make_shared<const DeviceTable>(robust_table(eps));
        int bottoms = 0;
        for (std::uint64_t seed = 0; seed < 400; seed++) {
            auto bank = DeviceBank::uniform(cfg.n, table);
            bottoms += ot_run_honest(cfg, false, true, seed & 1, bank, seed).o_b.is_bottom();
        }
        double rate = bottoms / 400.0;
        EXPECT_GE(rate, prev);
        prev = rate;
    }
    EXPECT_GT(prev, 0.1);
}

TEST(TestPhase, IdealPassesAndFaultyAborts) {
    auto ideal_t = ideal();
    auto faulty = std::make_shared<const DeviceTable>(robust_table(0.2));
    int ideal_pass = 0, faulty_abort = 0;
    for (std::uint64_t seed = 0; seed < 50; seed++) {
        SeededRun r(seed);
        auto a = DeviceBank::uniform(300, ideal_t), b = DeviceBank::uniform(300, ideal_t);
        auto res = ot_test_phase(a, b, 0.05, r.view());
        ideal_pass += res.passed();
        EXPECT_EQ(res.alice_failures, 0u);
        auto fa = DeviceBank::uniform(300, faulty), fb = DeviceBank::uniform(300, faulty);
        faulty_abort += !ot_test_phase(fa, fb, 0.05, r.view()).passed();
    }
    EXPECT_EQ(ideal_pass, 50);
    EXPECT_EQ(faulty_abort, 50);
}

TEST(TestPhase, WithRunMatchesHonestOnIdeal) {
    auto cfg = config("hamming74");
    SeededRun r(4);
    auto a = DeviceBank::uniform(30, ideal()), b = DeviceBank::uniform(30, ideal());
    auto run = DeviceBank::uniform(cfg.n, ideal());
    auto out = ot_with_test(cfg, 0.05, true, false, false, a, b, run, r.view());
    ASSERT_TRUE(out.run.has_value());
    EXPECT_EQ(out.o_b(), Token::bit(true));
}
