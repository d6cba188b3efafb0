#include "msdi/adversary.h"

#include <gtest/gtest.h>

#include "msdi/errors.h"
#include "msdi/extract.h"

using namespace msdi;

namespace {

std::shared_ptr<const DeviceTable> ideal() {
    static auto t = std::make_shared<const DeviceTable>(ideal_table());
    return t;
}

std::shared_ptr<const DeviceTable> robust(double eps) {
    return std::make_shared<const DeviceTable>(robust_table(eps));
}

std::shared_ptr<const LinearCode> code(const std::string &spec) {
    return std::make_shared<const LinearCode>(make_code(spec));
}

std::vector<std::unique_ptr<AdaptiveBobStrategy>> all_bobs() {
    std::vector<std::unique_ptr<AdaptiveBobStrategy>> v;
    for (const char *s : {"ascending:0", "ascending:2", "honest", "shuffled", "greedy", "shifted:1"}) {
        v.push_back(make_bob_strategy(s));
    }
    return v;
}

struct RepeatBox final : AdaptiveBobStrategy {
    std::string name() const override { return "repeat"; }
    BobMove next_move(const BobHistory &, std::size_t, Randomness &) override { return {0, Trit(0)}; }
};

}  // namespace

TEST(AdaptivePlay, FiresEveryBoxOnce) {
    for (auto &s : all_bobs()) {
        auto bank = DeviceBank::uniform(12, ideal());
        SeededRun run(1);
        auto play = adaptive_bob_play(bank, *s, run.view().bob, run.view().device);
        std::vector<std::size_t> order = play.order;
        std::sort(order.begin(), order.end());
        for (std::size_t i = 0; i < 12; i++) {
            EXPECT_EQ(order[i], i) << s->name();
        }
        EXPECT_EQ(play.z.size(), 12u);
    }
    RepeatBox bad;
    auto bank = DeviceBank::uniform(3, ideal());
    SeededRun run(1);
    EXPECT_THROW(adaptive_bob_play(bank, bad, run.view().bob, run.view().device), DuplicateBoxIndex);
}

TEST(AdaptivePlay, AscendingZeroMarginalIsUniform) {
    AscendingBob s(Trit(0));
    auto law = adaptive_joint_law(ideal(), s, 1);
    auto b = law.marginal({"b0"});
    ASSERT_EQ(b.size(), 4u);
    for (const auto &[o, p] : b.entries()) {
        EXPECT_EQ(p, Rational(1, 4));
    }
    EXPECT_EQ(b.prob({0b111}), Rational(1, 4));
}

TEST(AdaptivePlay, TwoBoxLawIsProductOfMarginals) {
    for (auto &s : all_bobs()) {
        auto law = adaptive_joint_law(ideal(), *s, 2);
        auto joint = law.marginal({"b0", "b1"});
        auto m0 = law.marginal({"b0"});
        auto m1 = law.marginal({"b1"});
        EXPECT_EQ(one_norm(joint, m0.product(m1)), Rational(0)) << s->name();
    }
}

TEST(AdaptivePlay, ZConditionalIsQuarterOnIdeal) {
    for (auto &s : all_bobs()) {
        for (std::size_t n : {1u, 2u, 3u}) {
            auto zs = z_conditionals(ideal(), *s, n);
            EXPECT_FALSE(zs.empty());
            for (const auto &z : zs) {
                EXPECT_EQ(z.expectation, Rational(1, 4)) << s->name() << " step " << z.step;
            }
        }
    }
    GreedyBob g;
    EXPECT_THROW(z_conditionals(ideal(), g, 5), ExactModeTooLarge);
}

TEST(AdaptivePlay, FactorizationHoldsForAdaptiveBob) {
    for (auto &s : all_bobs()) {
        EXPECT_TRUE(factorizes_per_box(adaptive_joint_law(ideal(), *s, 2), 2)) << s->name();
    }
    GreedyBob g;
    EXPECT_TRUE(factorizes_per_box(adaptive_joint_law(ideal(), g, 3), 3));
    EXPECT_TRUE(factorizes_per_box(adaptive_joint_law(robust(0.05), g, 2), 2));
    // Alice's two answers forced equal: not a product.
    ExactDistribution bad({"x0", "x1", "y0", "y1", "a0", "a1", "b0", "b1"});
    bad.add({0, 0, 0, 0, 0b000, 0b000, 0b001, 0b001}, Rational(1, 2));
    bad.add({0, 0, 0, 0, 0b011, 0b011, 0b001, 0b001}, Rational(1, 2));
    EXPECT_FALSE(factorizes_per_box(bad, 2));
}

TEST(Good, Thresholds) {
    std::vector<AnswerB> none(18, AnswerB::parse("001"));
    EXPECT_TRUE(good_btilde(none, 18, GoodThreshold::ProofBound_n9));
    EXPECT_TRUE(good_btilde(none, 18, GoodThreshold::PaperDef_n18));
    auto b = none;
    for (std::size_t i : {0u, 1u, 6u, 7u, 12u}) {
        b[i] = AnswerB::parse("111");
    }
    auto c = block_111_counts(b);
    EXPECT_EQ(c, (std::array<std::size_t, 3>{2, 2, 1}));
    EXPECT_TRUE(good_btilde(b, 18, GoodThreshold::ProofBound_n9));
    EXPECT_FALSE(good_btilde(b, 18, GoodThreshold::PaperDef_n18));
    b[2] = AnswerB::parse("111");
    EXPECT_FALSE(good_btilde(b, 18, GoodThreshold::ProofBound_n9));
    EXPECT_THROW(good_btilde(b, 17, GoodThreshold::ProofBound_n9), ConfigError);
}

TEST(Good, TailMatchesBruteForce) {
    // n = 6: blocks of 2, limit 0; Pr(block clean) = (3/4)^2.
    Rational q(1, 4);
    Rational clean = Rational(9, 16);
    EXPECT_EQ(not_good_probability(6, 0, q), 1 - clean * clean * clean);
    // Enumerate 4^6 answer strings directly for n = 6, limit 1.
    Rational bad = 0;
    for (int s = 0; s < (1 << 12); s++) {
        std::vector<AnswerB> b(6);
        Rational w = 1;
        for (int i = 0; i < 6; i++) {
            b[i] = AnswerB::from_index((s >> (2 * i)) & 3);
            w *= Rational(1, 4);
        }
        auto c = block_111_counts(b);
        if (c[0] > 1 || c[1] > 1 || c[2] > 1) {
            bad += w;
        }
    }
    EXPECT_EQ(not_good_probability(6, 1, q), bad);
}

TEST(Good, MonteCarloNearTail) {
    HonestBob s;
    auto rep = eval_good_concentration(36, ideal(), s, 2000, 3);
    double tail = to_double(not_good_probability(36, 4, Rational(1, 4)));
    EXPECT_NEAR(rep.fraction(), tail, 0.03);
    EXPECT_NEAR(rep.mean_block_count, 3.0, 0.1);
}

TEST(CommonBits, IdealNeverMismatches) {
    std::size_t t = 20;
    std::vector<std::shared_ptr<const DeviceTable>> tables(t, ideal());
    SeededRandom rng(5);
    std::vector<AnswerA> a(t);
    std::vector<Trit> x(t), y(t);
    for (std::size_t i = 0; i < t; i++) {
        a[i] = AnswerA::from_index(static_cast<int>(rng.uniform(4)));
        x[i] = Trit(static_cast<int>(rng.uniform(3)));
        y[i] = Trit(static_cast<int>(rng.uniform(3)));
    }
    auto h = common_bit_hamming(tables, a, x, y, 500, rng);
    EXPECT_EQ(h[0], 500u);
}

TEST(CommonBits, MismatchIsOneMinusWin) {
    auto t = robust_table(0.04);
    for (int x = 0; x < 3; x++) {
        for (int y = 0; y < 3; y++) {
            for (int ai = 0; ai < 4; ai++) {
                double win = 0, total = 0;
                for (int bi = 0; bi < 4; bi++) {
                    double p = t.at(x, y, ai, bi);
                    total += p;
                    win += ms_predicate(AnswerA::from_index(ai), AnswerB::from_index(bi), Trit(x), Trit(y)) ? p : 0;
                }
                EXPECT_NEAR(mismatch_probability(t, AnswerA::from_index(ai), Trit(x), Trit(y)), 1 - win / total,
                            1e-15);
            }
        }
    }
    auto forced = to_double_table(forced_111_table_exact());
    // a_y = 0 never occurs with the forced table.
    EXPECT_THROW(mismatch_probability(forced, AnswerA::parse("000"), Trit(0), Trit(0)), ZeroProbabilityEvent);
}

TEST(CommonBits, RobustHistogramMean) {
    std::size_t t = 105;
    double eps = 0.02;
    auto tab = robust(eps);
    std::vector<std::shared_ptr<const DeviceTable>> tables(t, tab);
    std::vector<AnswerA> a(t, AnswerA::parse("011"));
    std::vector<Trit> x(t, Trit(1)), y(t, Trit(2));
    double q = mismatch_probability(*tab, a[0], x[0], y[0]);
    SeededRandom rng(8);
    auto h = common_bit_hamming(tables, a, x, y, 3000, rng);
    double mean = 0;
    for (std::size_t d = 0; d < h.size(); d++) {
        mean += static_cast<double>(d * h[d]) / 3000;
    }
    EXPECT_NEAR(mean, q * static_cast<double>(t), 0.15);
    EXPECT_GT(q, 0);
}

// ---- OT sender security -------------------------------------------------------

namespace {

/// With y = 0^n on ideal devices R_1 is uniform and independent of everything
/// Bob sees except W_1, so the masked-bit distance is
/// 2^-n sum_{t,w} |2^-n sum_{r : Hr = w} (-1)^<t,r>|.
Rational ot_zero_y_oracle(const LinearCode &c) {
    std::size_t n = c.n();
    Rational total = 0;
    std::uint64_t size = std::uint64_t{1} << n;
    for (std::uint64_t t = 0; t < size; t++) {
        std::map<std::uint64_t, long long> acc;
        for (std::uint64_t r = 0; r < size; r++) {
            auto tv = BitVec::from_u64(t, n), rv = BitVec::from_u64(r, n);
            acc[c.syndrome(rv).to_u64()] += tv.dot(rv) ? -1 : 1;
        }
        for (const auto &[w, s] : acc) {
            total += Rational(std::abs(s));
        }
    }
    return total / Rational(static_cast<long long>(size * size));
}

}  // namespace

TEST(OTSecurity, ExactZeroStrategyMatchesOracle) {
    auto cfg = OTConfig::make(code("repetition:3"));
    AscendingBob s(Trit(0));
    auto rep = eval_ot_sender_security(cfg, ideal(), s, EvalMode::ExactTinyN, 0, 0);
    EXPECT_EQ(rep.choice1_rate, 0.0);  // Bob's choice is 0, index 1 protected
    ASSERT_TRUE(rep.masked_distance_exact);
    EXPECT_EQ(*rep.masked_distance_exact, ot_zero_y_oracle(*cfg.code));
    EXPECT_EQ(*rep.masked_distance_exact, Rational(1, 2));
    ASSERT_EQ(rep.box_guess_prob.size(), 3u);
    for (const auto &g : rep.box_guess_prob) {
        EXPECT_LE(g, Rational(5, 6));
        EXPECT_EQ(g, Rational(1, 2));
    }
    EXPECT_NEAR(rep.min_entropy, 3.0, 1e-12);
    auto j = rep.to_json();
    EXPECT_EQ(j["masked_distance_exact"], "1/2");
}

TEST(OTSecurity, ExactModeGuardsSize) {
    auto cfg = OTConfig::make(code("hamming74"));
    AscendingBob s(Trit(0));
    EXPECT_THROW(eval_ot_sender_security(cfg, ideal(), s, EvalMode::ExactTinyN, 0, 0), ExactModeTooLarge);
}

TEST(OTSecurity, BayesGuesserMatchesExactAtTinyN) {
    auto cfg = OTConfig::make(code("repetition:2"));
    for (const char *name : {"ascending:0", "honest", "greedy"}) {
        auto s = make_bob_strategy(name);
        auto ex = eval_ot_sender_security(cfg, ideal(), *s, EvalMode::ExactTinyN, 0, 0);
        auto mc = eval_ot_sender_security(cfg, ideal(), *s, EvalMode::MonteCarlo, 4000, 11);
        // Mean |posterior bias| estimates the exact distance.
        EXPECT_NEAR(mc.masked_distance, ex.masked_distance, 0.03) << name;
        EXPECT_NEAR(mc.advantage, ex.masked_distance / 2, 0.03) << name;
    }
}

TEST(OTSecurity, HonestBobStillDecodes) {
    auto cfg = OTConfig::make(code("bch:6:1:60"));
    for (int d = 0; d < 2; d++) {
        AscendingBob s{Trit(d)};
        auto rep = eval_ot_sender_security(cfg, ideal(), s, EvalMode::MonteCarlo, 40, 2);
        EXPECT_EQ(rep.choice1_rate, static_cast<double>(d));
        EXPECT_EQ(rep.choice_decoded, 40u);
        EXPECT_LT(rep.bayes_advantage, 1e-6);
    }
}

TEST(OTSecurity, PosteriorBiasSeesLinearLeak) {
    // If T_p lies in the row space of H the mask is a function of W_p.
    auto cfg = OTConfig::make(code("hamming74"));
    auto bank = DeviceBank::uniform(cfg.n, ideal());
    SeededRun run(3);
    AscendingBob s(Trit(0));
    auto play = adaptive_bob_play(bank, s, run.view().bob, run.view().device);
    OTSenderState st;
    st.x = random_trits(cfg.n, run.view().alice);
    st.a.resize(cfg.n);
    st.r0 = BitVec(cfg.n);
    st.r1 = BitVec(cfg.n);
    for (std::size_t i = 0; i < cfg.n; i++) {
        st.a[i] = bank.fire_alice(i, st.x[i], run.view().device);
        st.r0.set(i, st.a[i].bit(0));
        st.r1.set(i, st.a[i].bit(1));
    }
    auto msg = ot_sender_message(cfg, false, false, st, run.view().alice);
    msg->t1 = cfg.code->rows()[0];
    double beta = ot_posterior_bias(cfg, *ideal(), play.y, play.b, *msg, 1, std::nullopt);
    bool e = cfg.code->rows()[0].dot(st.r1);
    EXPECT_NEAR(beta, e ? -1.0 : 1.0, 1e-9);
    msg->t1 = BitVec::from_string("1000000");
    EXPECT_NEAR(ot_posterior_bias(cfg, *ideal(), play.y, play.b, *msg, 1, std::nullopt), 0.0, 1e-9);
}

// ---- BC hiding ---------------------------------------------------------------

namespace {

/// n = 3, honest Bob, ideal devices: R_j = b_j(x_j) with x_j uniform, so
/// Pr(R_j = 1 | b_j) = weight(b_j)/3 and Ext3 is the majority bit.
Rational bc_tiny_oracle() {
    Rational total = 0;
    for (int s = 0; s < 64; s++) {
        std::array<Rational, 3> p;
        for (int j = 0; j < 3; j++) {
            AnswerB b = AnswerB::from_index((s >> (2 * j)) & 3);
            p[j] = Rational(static_cast<long long>(std::popcount(b.mask())), 3);
        }
        Rational one = p[0] * p[1] * p[2] + (1 - p[0]) * p[1] * p[2] + p[0] * (1 - p[1]) * p[2] +
                       p[0] * p[1] * (1 - p[2]);
        total += abs_value(Rational(1 - 2 * one)) / 64;
    }
    return total;
}

BCConfig tiny_bc() {
    return BCConfig::make(code("repetition:1"));
}

}  // namespace

TEST(BCHiding, ExactTinyMatchesOracle) {
    HonestBob s;
    auto rep = eval_bc_hiding(tiny_bc(), ideal(), s, EvalMode::ExactTinyN, 0, 0);
    ASSERT_TRUE(rep.distance_exact);
    EXPECT_EQ(*rep.distance_exact, bc_tiny_oracle());
}

TEST(BCHiding, ForcedAllOnesRevealsBit) {
    auto forced = std::make_shared<const DeviceTable>(to_double_table(forced_111_table_exact()));
    HonestBob s;
    auto rep = eval_bc_hiding(tiny_bc(), forced, s, EvalMode::ExactTinyN, 0, 0);
    EXPECT_EQ(*rep.distance_exact, Rational(1));
    auto cfg = BCConfig::make(code("bch:5:1:30"));
    auto mc = eval_bc_hiding(cfg, forced, s, EvalMode::MonteCarlo, 50, 1);
    EXPECT_EQ(mc.successes, 50u);
}

TEST(BCHiding, BayesGuesserMatchesExactAtTinyN) {
    for (const char *name : {"honest", "ascending:1", "shifted:1", "greedy"}) {
        auto s = make_bob_strategy(name);
        auto ex = eval_bc_hiding(tiny_bc(), ideal(), *s, EvalMode::ExactTinyN, 0, 0);
        auto mc = eval_bc_hiding(tiny_bc(), ideal(), *s, EvalMode::MonteCarlo, 6000, 4);
        EXPECT_NEAR(mc.distance, ex.distance, 0.03) << name;
        EXPECT_NEAR(mc.advantage, ex.distance / 2, 0.03) << name;
    }
}

TEST(BCHiding, ExactModeGuardsSize) {
    HonestBob s;
    EXPECT_THROW(eval_bc_hiding(BCConfig::make(code("hamming74")), ideal(), s, EvalMode::ExactTinyN, 0, 0),
                 ExactModeTooLarge);
}

TEST(BCHiding, SmallAdvantageAtNinety) {
    auto cfg = BCConfig::make(code("bch:5:1:30"));
    HonestBob s;
    auto rep = eval_bc_hiding(cfg, ideal(), s, EvalMode::MonteCarlo, 300, 9);
    EXPECT_LT(rep.bayes_advantage, 0.02);
}

// ---- BC binding ------------------------------------------------------------

namespace {

BCConfig binding_cfg() {
    return BCConfig::make(code("bch:5:6:30"), 1e-10);
}

}  // namespace

TEST(BCBinding, LightCodewordsSorted) {
    auto c = make_code("bch:5:6:30");
    auto words = light_codewords(c);
    ASSERT_EQ(words.size(), 31u);
    EXPECT_EQ(words.front().weight(), c.d());
    for (const auto &w : words) {
        EXPECT_TRUE(c.is_codeword(w));
    }
}

TEST(BCBinding, ShiftedRevealIsConsistent) {
    auto cfg = binding_cfg();
    auto bank = DeviceBank::uniform(cfg.n, ideal());
    SeededRun run(6);
    auto rec = bc_commit_honest(cfg, false, bank, run.view());
    BitVec delta(cfg.block());
    delta.set(2, true);
    delta.set(9, true);
    auto rev = shifted_reveal(cfg, rec.x, rec.a, rec.y, 1, delta, run.view().alice);
    EXPECT_EQ(rev->r[1], rec.r[1] ^ delta);
    EXPECT_EQ(rev->r[0], rec.r[0]);
    for (int j = 0; j < 3; j++) {
        EXPECT_EQ(rev->r[j], block_bits(rev->a, rec.y, j, cfg.block()));
    }
    EXPECT_NE(rev->x[cfg.block() + 2], rec.x[cfg.block() + 2]);
}

TEST(BCBinding, HonestStrategyNeverFlips) {
    auto cfg = binding_cfg();
    BCAliceStrategy honest;
    auto rep = eval_bc_binding(cfg, ideal(), honest, 100, 1);
    EXPECT_EQ(rep.in_e, 100u);
    EXPECT_EQ(rep.d0_in_e, 100u);
    EXPECT_EQ(rep.accept_flipped(), 0.0);
}

TEST(BCBinding, StrategiesFailAgainstStrongCode) {
    auto cfg = binding_cfg();
    for (const char *name : {"honest-then-flip", "far-rbar", "syndrome-forge"}) {
        auto s = make_alice_strategy(name);
        auto rep = eval_bc_binding(cfg, ideal(), *s, 300, 2);
        EXPECT_LE(rep.accept_flipped(), 0.01) << name;
        EXPECT_EQ(rep.in_e + rep.in_ec, 300u);
        if (std::string(name) != "syndrome-forge") {
            EXPECT_GE(rep.bottom_rate(), 0.99) << name;
        }
    }
}

TEST(BCBinding, WeakCodeIsBroken) {
    // Distance 3 and one tolerated mismatch: flipping needs two of three guesses.
    auto cfg = BCConfig::make(code("repetition:3"));
    HonestThenFlip s;
    auto rep = eval_bc_binding(cfg, ideal(), s, 400, 3);
    EXPECT_GT(rep.accept_flipped(), 0.15);
}

TEST(BCBinding, ForgedSyndromeTags) {
    auto cfg = binding_cfg();
    auto bank = DeviceBank::uniform(cfg.n, ideal());
    SeededRun run(12);
    SyndromeForge s;
    auto out = bc_run(cfg, false, bank, run.view(), s);
    auto cls = classify_commit(cfg, bc_blocks(cfg, out.a, out.y), *out.commit);
    // Weight 8 is past the radius 7 of a distance-15 code.
    if (cls.closest[0]) {
        EXPECT_NE(*cls.closest[0], bc_blocks(cfg, out.a, out.y)[0]);
    }
    EXPECT_TRUE(cls.closest[1].has_value());
}

TEST(OTSecurity, UncommonBitGuessBoundedOnIdeal) {
    auto cfg = OTConfig::make(code("repetition:3"));
    for (const char *name : {"ascending:0", "greedy"}) {
        auto s = make_bob_strategy(name);
        auto rep = eval_ot_sender_security(cfg, ideal(), *s, EvalMode::ExactTinyN, 0, 0);
        ASSERT_EQ(rep.box_uncommon_guess_prob.size(), 3u);
        for (const auto &g : rep.box_uncommon_guess_prob) {
            if (g) {
                EXPECT_LE(*g, Rational(5, 6)) << name;
            }
        }
    }
}
