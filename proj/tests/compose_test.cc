#include "msdi/compose.h"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "msdi/errors.h"

using namespace msdi;

namespace {

std::shared_ptr<const DeviceTable> ideal() {
    static auto t = std::make_shared<const DeviceTable>(ideal_table());
    return t;
}

std::shared_ptr<const LinearCode> code(const std::string &spec) {
    return std::make_shared<const LinearCode>(make_code(spec));
}

OTConfig tiny_ot() {
    return OTConfig::make(code("repetition:2"));
}

OTConfig one_box_ot() {
    return OTConfig::make(code("repetition:1"));
}

BCConfig tiny_bc() {
    return BCConfig::make(code("repetition:1"));
}

std::vector<Token> tokens(std::initializer_list<int> v) {
    std::vector<Token> t;
    for (int b : v) {
        t.push_back(b == 2 ? Token::empty() : Token::bit(b == 1));
    }
    return t;
}

ExactEndLaw law_of(std::vector<std::pair<EndState, Rational>> v) {
    ExactEndLaw l({"O_A", "O_B"});
    for (auto &[s, p] : v) {
        l.add(s, p);
    }
    return l;
}

}  // namespace

TEST(Functionality, IdealOTDeliversChosenString) {
    auto f = ideal_ot();
    for (int s0 = 0; s0 < 2; s0++) {
        for (int s1 = 0; s1 < 2; s1++) {
            for (int d = 0; d < 2; d++) {
                auto s = f.open();
                auto [oa, ob] = s.call(0, tokens({s0, s1}), tokens({d}));
                EXPECT_TRUE(oa.is_empty());
                EXPECT_EQ(ob, Token::bit(d ? s1 : s0));
            }
        }
    }
}

TEST(Functionality, IdealBCOpensCommittedBit) {
    auto f = ideal_bc();
    for (int d = 0; d < 2; d++) {
        auto s = f.open();
        auto [ca, cb] = s.call(0, tokens({d}), {});
        EXPECT_TRUE(ca.is_empty());
        EXPECT_TRUE(cb.is_empty());
        auto [ra, rb] = s.call(1, {}, {});
        EXPECT_TRUE(ra.is_empty());
        EXPECT_EQ(rb, Token::bit(d == 1));
    }
}

TEST(Functionality, AbortPropagatesToLaterPhases) {
    auto f = ideal_bc();
    auto s = f.open();
    auto [ca, cb] = s.call(0, tokens({1}), {}, Token::bottom());
    EXPECT_TRUE(ca.is_empty());
    EXPECT_TRUE(cb.is_bottom());
    EXPECT_TRUE(s.call(1, {}, {}).second.is_bottom());
}

TEST(Functionality, MalformedInputsGiveBottom) {
    auto f = ideal_ot();
    auto s = f.open();
    auto [oa, ob] = s.call(0, tokens({0}), tokens({1}));
    EXPECT_TRUE(oa.is_bottom());
    EXPECT_TRUE(ob.is_bottom());
    auto s2 = f.open();
    EXPECT_TRUE(s2.call(0, tokens({0, 2}), tokens({1})).second.is_bottom());
}

TEST(Functionality, PhasesRunInOrderOnce) {
    auto f = ideal_bc();
    auto s = f.open();
    EXPECT_THROW(s.call(1, {}, {}), OracleProtocolViolation);
    s.call(0, tokens({0}), {});
    EXPECT_THROW(s.call(0, tokens({0}), {}), OracleProtocolViolation);
    s.call(1, {}, {});
    EXPECT_THROW(s.call(2, {}, {}), OracleProtocolViolation);
}

TEST(EndStates, DistanceIsAMetric) {
    EndState x{{"O_A", "eps"}, {"O_B", "0"}}, y{{"O_A", "eps"}, {"O_B", "1"}}, z{{"O_A", "eps"}, {"O_B", "bot"}};
    auto p = law_of({{x, Rational(1, 2)}, {y, Rational(1, 2)}});
    auto q = law_of({{x, Rational(1, 4)}, {y, Rational(1, 4)}, {z, Rational(1, 2)}});
    auto r = law_of({{y, Rational(1)}});
    std::vector<std::string> regs{"O_A", "O_B"};
    EXPECT_EQ(end_state_distance(p, p, regs), 0);
    EXPECT_EQ(end_state_distance(p, q, regs), end_state_distance(q, p, regs));
    EXPECT_EQ(end_state_distance(p, q, regs), Rational(1));
    EXPECT_EQ(end_state_distance(p, r, regs), Rational(1));
    EXPECT_LE(end_state_distance(q, r, regs), end_state_distance(q, p, regs) + end_state_distance(p, r, regs));
    // On O_A alone the laws agree.
    EXPECT_EQ(end_state_distance(p, q, {"O_A"}), 0);
}

TEST(EndStates, MissingRegisterThrows) {
    ExactEndLaw l({"O_A", "O_B"});
    EXPECT_THROW(l.add({{"O_A", "eps"}}, Rational(1)), RegisterMismatch);
    EXPECT_THROW(end_state_distance(l, l, {"G"}), RegisterMismatch);
    EXPECT_THROW(registers_of("nope"), RegisterMismatch);
    for (const auto &name : register_registry()) {
        EXPECT_FALSE(registers_of(name).summary.empty()) << name;
    }
}

TEST(EndStates, ExactLawSumsToOne) {
    auto law = exact_end_law(
        [](RunRandomness r) {
            return EndState{{"O_A", std::to_string(r.alice.uniform(3))}, {"O_B", r.bob.bit() ? "1" : "0"}};
        },
        {"O_A", "O_B"});
    EXPECT_EQ(law.total(), 1);
    EXPECT_EQ(law.entries().size(), 6u);
}

TEST(Composition, SubstituteChecksSignature) {
    ComposedProtocol pgf(make_outer("toy-g"));
    EXPECT_EQ(pgf.concrete_calls(), 0u);
    auto pg = substitute(pgf, std::make_shared<OTImplementation>(tiny_ot(), ideal()));
    EXPECT_EQ(pg.concrete_calls(), 1u);
    struct WrongOT final : Implementation {
        std::string name() const override { return "wrong"; }
        std::string implements() const override { return "ot"; }
        std::vector<PhaseSignature> signature() const override { return {{"transfer", 1, 1}}; }
        std::unique_ptr<OracleSession> open(RunRandomness, Transcript &) const override { return nullptr; }
    };
    EXPECT_THROW(substitute(pgf, std::make_shared<WrongOT>()), InterfaceMismatch);
    SeededRun run(1);
    EXPECT_THROW(pgf.run({true}, {false}, run.view()), InterfaceMismatch);
}

TEST(Composition, HonestOTRealizesIdealExactly) {
    OTImplementation pf(tiny_ot(), ideal());
    auto [d, exact] = implementation_distance(pf, EvalMode::ExactTinyN, 0, 0);
    ASSERT_TRUE(exact);
    EXPECT_EQ(*exact, 0);
    EXPECT_EQ(d, 0.0);
}

TEST(Composition, NoCallsMeansNoDistance) {
    auto rep = compose_check("none", std::make_shared<OTImplementation>(tiny_ot(), ideal()), EvalMode::ExactTinyN, 0,
                             0, 0.0);
    EXPECT_EQ(rep.calls, 0u);
    EXPECT_EQ(rep.distance, 0.0);
    EXPECT_TRUE(rep.pass());
}

TEST(Composition, SequentialCallsWithinBudget) {
    for (const char *outer : {"toy-g", "toy-g2"}) {
        auto rep = compose_check(outer, std::make_shared<OTImplementation>(one_box_ot(), ideal()), EvalMode::ExactTinyN,
                                 0, 0, 0.0);
        EXPECT_EQ(rep.calls, std::string(outer) == "toy-g" ? 1u : 2u);
        ASSERT_TRUE(rep.distance_exact);
        EXPECT_EQ(*rep.distance_exact, 0) << outer;
        EXPECT_TRUE(rep.pass());
    }
    auto bc = compose_check("toy-commit", std::make_shared<BCImplementation>(tiny_bc(), ideal()),
                            EvalMode::ExactTinyN, 0, 0, 0.0);
    EXPECT_EQ(bc.calls, 1u);
    EXPECT_EQ(*bc.distance_exact, 0);
}

TEST(Composition, NoisyDevicesStayWithinBudget) {
    auto noisy = std::make_shared<const DeviceTable>(robust_table(0.1));
    auto rep = compose_check("toy-g2", std::make_shared<OTImplementation>(one_box_ot(), noisy), EvalMode::ExactTinyN, 0,
                             0, 0.0);
    EXPECT_GT(rep.per_call_distance, 0.0);
    EXPECT_GT(rep.distance, 0.0);
    EXPECT_LE(rep.distance, rep.budget() + 1e-12);
    auto j = rep.to_json();
    EXPECT_EQ(j["calls"], 2);
}

TEST(Composition, MonteCarloMatchesExactOnNoisyDevices) {
    auto noisy = std::make_shared<const DeviceTable>(robust_table(0.1));
    auto inner = std::make_shared<OTImplementation>(one_box_ot(), noisy);
    auto ex = compose_check("toy-g", inner, EvalMode::ExactTinyN, 0, 0, 0.0);
    auto mc = compose_check("toy-g", inner, EvalMode::MonteCarlo, 4000, 3, 0.05);
    EXPECT_NEAR(mc.distance, ex.distance, 0.06);
    EXPECT_TRUE(mc.pass());
}

TEST(Simulator, GuardRejectsOutOfOrderQueries) {
    auto f = ideal_bc();
    Transcript log;
    OracleGuard g(f, PartyId::Bob, {tokens({1}), {}}, log);
    EXPECT_THROW(g.query(1, {}), OracleProtocolViolation);
    EXPECT_TRUE(g.query(0, {}).is_empty());
    EXPECT_THROW(g.query(1, {}, Token::bottom()), OracleProtocolViolation);
    EXPECT_EQ(g.query(1, {}), Token::bit(true));
    EXPECT_THROW(g.query(2, {}), OracleProtocolViolation);
    EXPECT_EQ(g.queries(), 2u);
    EXPECT_EQ(log.events().size(), 2u);
}

TEST(Simulator, OTCorruptAliceHonestStrategiesAreSimulated) {
    for (const char *name : {"honest", "zero-x", "swap", "flip-c", "silent"}) {
        auto c = ot_corrupt_alice_case(one_box_ot(), ideal(), make_ot_alice_strategy(name));
        auto rep = compare_with_simulator(c, EvalMode::ExactTinyN, 0, 0);
        ASSERT_TRUE(rep.distance_exact);
        EXPECT_EQ(*rep.distance_exact, 0) << name;
        EXPECT_EQ(rep.per_point.size(), 8u);
    }
    auto c = ot_corrupt_alice_case(tiny_ot(), ideal(), make_ot_alice_strategy("honest"));
    EXPECT_EQ(*compare_with_simulator(c, EvalMode::ExactTinyN, 0, 0).distance_exact, 0);
}

TEST(Simulator, OTSelectiveFailureIsNotSimulated) {
    auto c = ot_corrupt_alice_case(tiny_ot(), ideal(), make_ot_alice_strategy("selective-w0"));
    auto rep = compare_with_simulator(c, EvalMode::ExactTinyN, 0, 0);
    EXPECT_GT(rep.distance, 0.0);
}

TEST(Simulator, OTCorruptBobMatchesMaskedDistance) {
    auto cfg = tiny_ot();
    for (const char *name : {"ascending:0", "honest"}) {
        std::shared_ptr<AdaptiveBobStrategy> s = make_bob_strategy(name);
        auto rep = compare_with_simulator(ot_corrupt_bob_case(cfg, ideal(), s), EvalMode::ExactTinyN, 0, 0);
        auto oracle = eval_ot_sender_security(cfg, ideal(), *s, EvalMode::ExactTinyN, 0, 0);
        ASSERT_TRUE(rep.distance_exact);
        EXPECT_NEAR(rep.distance, to_double(*oracle.masked_distance_exact), 1e-12) << name;
    }
}

TEST(Simulator, BCCorruptBobMatchesHiding) {
    auto cfg = tiny_bc();
    std::shared_ptr<AdaptiveBobStrategy> s = make_bob_strategy("ascending:0");
    auto rep = compare_with_simulator(bc_corrupt_bob_case(cfg, ideal(), s), EvalMode::ExactTinyN, 0, 0);
    auto oracle = eval_bc_hiding(cfg, ideal(), *s, EvalMode::ExactTinyN, 0, 0);
    EXPECT_NEAR(rep.distance, to_double(*oracle.distance_exact), 1e-12);
}

TEST(Simulator, BCCorruptAliceFlipIsCaught) {
    auto cfg = tiny_bc();
    auto honest = compare_with_simulator(bc_corrupt_alice_case(cfg, ideal(), make_alice_strategy("honest")),
                                         EvalMode::ExactTinyN, 0, 0);
    EXPECT_EQ(*honest.distance_exact, 0);
    // One box per block: the flipped reveal passes when the guessed input
    // avoids the checked port, 3/4 of the time, and then opens 1 half the time.
    auto c = bc_corrupt_alice_case(cfg, ideal(), make_alice_strategy("honest-then-flip"));
    c.grid.resize(1);
    auto flip = compare_with_simulator(c, EvalMode::ExactTinyN, 0, 0);
    EXPECT_NEAR(flip.distance, 0.75, 1e-12);
}

TEST(Simulator, MonteCarloSummaryNearZeroForHonest) {
    auto cfg = OTConfig::make(code("repetition:3"));
    auto c = ot_corrupt_alice_case(cfg, ideal(), make_ot_alice_strategy("honest"));
    auto rep = compare_with_simulator(c, EvalMode::MonteCarlo, 2000, 5);
    EXPECT_EQ(rep.registers, (std::vector<std::string>{"IN", "O_B_rel"}));
    EXPECT_LT(rep.distance, 0.15);
    EXPECT_THROW(compare_with_simulator(c, EvalMode::MonteCarlo, 0, 5), DegenerateParameters);
    auto j = rep.to_json();
    EXPECT_EQ(j["mode"], "monte_carlo");
}

TEST(Simulator, PosteriorOpeningHitsTarget) {
    auto cfg = tiny_bc();
    SeededRun run(4);
    auto bank = DeviceBank::uniform(cfg.n, ideal());
    HonestBob s;
    auto play = adaptive_bob_play(bank, s, run.view().bob, run.view().device);
    auto x = random_trits(cfg.n, run.view().alice);
    std::vector<AnswerA> a(cfg.n);
    for (std::size_t i = 0; i < cfg.n; i++) {
        a[i] = bank.fire_alice(i, x[i], run.view().device);
    }
    auto commit = bc_commit_message(cfg, false, bc_blocks(cfg, a, play.y));
    for (bool target : {false, true}) {
        auto [x2, a2] =
            bc_posterior_opening(cfg, *ideal(), play.y, play.b, play.y, *commit, target, x, a, run.view().alice);
        auto r = bc_blocks(cfg, a2, play.y);
        EXPECT_EQ((*cfg.ext)(r[0], r[1], r[2]), target);
        BCRevealMessage rev;
        rev.x = x2;
        rev.a = a2;
        rev.r = r;
        EXPECT_EQ(bc_reveal_check(cfg, play.y, play.b, *commit, rev), Token::bit(commit->c ^ target));
    }
}
