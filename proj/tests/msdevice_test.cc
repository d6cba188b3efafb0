#include "msdi/msdevice.h"

#include <cmath>
#include <map>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "msdi/errors.h"

using namespace msdi;

namespace {

// Oracle working on the text form only: answer strings, char i is bit i.
const char *kA[4] = {"000", "011", "101", "110"};
const char *kB[4] = {"001", "010", "100", "111"};

bool oracle_win(const std::string &a, const std::string &b, int x, int y) {
    return a[y] == b[x];
}

}  // namespace

TEST(Answers, ParseAndParity) {
    for (int i = 0; i < 4; i++) {
        EXPECT_EQ(AnswerA::parse(kA[i]).str(), kA[i]);
        EXPECT_EQ(AnswerB::parse(kB[i]).str(), kB[i]);
    }
    EXPECT_THROW(AnswerA::parse("001"), std::invalid_argument);
    EXPECT_THROW(AnswerB::parse("011"), std::invalid_argument);
    EXPECT_THROW(Trit(3), std::invalid_argument);
    EXPECT_TRUE(AnswerB::parse("111").all_ones());
}

TEST(Predicate, Examples) {
    EXPECT_TRUE(ms_predicate(AnswerA::parse("000"), AnswerB::parse("001"), Trit(0), Trit(0)));
    EXPECT_TRUE(ms_predicate(AnswerA::parse("110"), AnswerB::parse("111"), Trit(2), Trit(1)));
    EXPECT_FALSE(ms_predicate(AnswerA::parse("011"), AnswerB::parse("100"), Trit(1), Trit(2)));
}

TEST(IdealTable, MatchesTextOracle) {
    auto t = ideal_table_exact();
    for (int x = 0; x < 3; x++) {
        for (int y = 0; y < 3; y++) {
            Rational s = 0;
            for (int i = 0; i < 4; i++) {
                for (int j = 0; j < 4; j++) {
                    auto p = t.at(Trit(x), Trit(y), AnswerA::parse(kA[i]), AnswerB::parse(kB[j]));
                    EXPECT_EQ(p, oracle_win(kA[i], kB[j], x, y) ? Rational(1, 8) : Rational(0));
                    s += p;
                }
            }
            EXPECT_EQ(s, 1);
        }
    }
    EXPECT_EQ(t.at(Trit(0), Trit(0), AnswerA::parse("000"), AnswerB::parse("001")), Rational(1, 8));
    EXPECT_EQ(t.at(Trit(1), Trit(2), AnswerA::parse("011"), AnswerB::parse("100")), 0);
}

TEST(GameValue, IdealUniformAndMix) {
    EXPECT_EQ(game_value(ideal_table_exact()), 1);
    EXPECT_EQ(game_value(uniform_valid_table_exact()), Rational(1, 2));
    auto mix = mix_tables(ideal_table_exact(), uniform_valid_table_exact(), Rational(1, 10));
    EXPECT_EQ(game_value(mix), Rational(95, 100));
    EXPECT_EQ(game_value(robust_table_exact(Rational(1, 1000))), Rational(999, 1000));
}

TEST(SupDistance, Examples) {
    auto ideal = ideal_table_exact();
    EXPECT_EQ(sup_distance(ideal, ideal), 0);
    auto mix = mix_tables(ideal, uniform_valid_table_exact(), Rational(16, 100));
    EXPECT_EQ(sup_distance(ideal, mix), Rational(1, 100));
    auto bumped = to_double_table(ideal);
    bumped.at(0, 0, 0, 0) += 0.003;
    bumped.at(0, 0, 1, 1) -= 0.003;
    EXPECT_NEAR(sup_distance(to_double_table(ideal), bumped), 0.003, 1e-15);
}

TEST(Perturb, UniformMix) {
    SeededRandom r(1);
    auto ideal = ideal_table();
    auto same = perturb_table(ideal, 0, PerturbMode::EntryNoise, r);
    EXPECT_EQ(sup_distance(ideal, same), 0);
    auto t = perturb_table(ideal, 0.01, PerturbMode::UniformMix, r);
    EXPECT_LE(sup_distance(ideal, t), 0.01 + 1e-15);
    EXPECT_NEAR(game_value(t), 1 - 8 * 0.01, 1e-12);
    EXPECT_LT(signalling_gap(t), 1e-15);
    EXPECT_THROW(perturb_table(ideal, 1.5, PerturbMode::UniformMix, r), std::invalid_argument);
}

TEST(Perturb, EntryNoiseIsBoundedAndDeterministic) {
    SeededRandom r1(9), r2(9);
    auto a = perturb_table(ideal_table(), 0.02, PerturbMode::EntryNoise, r1);
    auto b = perturb_table(ideal_table(), 0.02, PerturbMode::EntryNoise, r2);
    EXPECT_EQ(a.raw(), b.raw());
    validate_table(a);
    EXPECT_LE(sup_distance(ideal_table(), a), 0.02);
    EXPECT_LE(signalling_gap(a), 4 * 0.02);
}

TEST(Conditionals, CommonBitSide) {
    auto t = ideal_table_exact();
    Given g;
    g.b = AnswerB::parse("001");
    g.y = Trit(0);
    auto c = conditional(t, g).marginal({"a"});
    for (int i = 0; i < 4; i++) {
        auto a = AnswerA::parse(kA[i]);
        EXPECT_EQ(c.prob({a.mask()}), kA[i][0] == '1' ? Rational(1, 6) : Rational(2, 6)) << kA[i];
    }
}

TEST(Conditionals, UncommonBitIsHalf) {
    auto t = ideal_table_exact();
    Given g;
    g.y = Trit(0);
    g.a = AnswerA::parse("000");
    g.x = Trit(1);
    auto c = conditional(t, g);
    Rational p0 = 0;
    for (const auto &[o, p] : c.entries()) {
        if (!AnswerB::from_mask(static_cast<unsigned>(o[0])).bit(2)) {
            p0 += p;
        }
    }
    EXPECT_EQ(p0, Rational(1, 2));
}

TEST(Conditionals, NoSignalling) {
    auto t = ideal_table_exact();
    for (int x = 0; x < 3; x++) {
        for (int y1 = 0; y1 < 3; y1++) {
            Given g1, g2;
            g1.x = Trit(x);
            g1.y = Trit(y1);
            g2.x = Trit(x);
            g2.y = Trit((y1 + 1) % 3);
            EXPECT_EQ(one_norm(conditional(t, g1).marginal({"a"}), conditional(t, g2).marginal({"a"})), 0);
            EXPECT_EQ(one_norm(conditional(t, g1).marginal({"b"}), conditional(t, g2).marginal({"b"})), 0);
        }
    }
    EXPECT_EQ(signalling_gap(t), 0);
    EXPECT_GT(signalling_gap(forced_111_table_exact()), 0);
}

TEST(Conditionals, ZeroProbabilityThrows) {
    Given g;
    g.x = Trit(1);
    g.y = Trit(2);
    g.a = AnswerA::parse("011");
    g.b = AnswerB::parse("100");
    EXPECT_THROW(conditional(ideal_table_exact(), g), ZeroProbabilityEvent);
}

TEST(ClassicalValue, EightNinths) {
    // Independent search over the text oracle.
    int best = 0;
    for (int sa = 0; sa < 64; sa++) {
        for (int sb = 0; sb < 64; sb++) {
            int won = 0;
            for (int x = 0; x < 3; x++) {
                for (int y = 0; y < 3; y++) {
                    won += oracle_win(kA[(sa >> (2 * x)) & 3], kB[(sb >> (2 * y)) & 3], x, y);
                }
            }
            best = std::max(best, won);
        }
    }
    auto cv = classical_value_oracle();
    EXPECT_EQ(cv.value, Rational(best, 9));
    EXPECT_EQ(cv.value, Rational(8, 9));
    EXPECT_EQ(game_value(deterministic_table(cv.witness)), Rational(8, 9));
    ClassicalStrategy constant;
    EXPECT_LE(game_value(deterministic_table(constant)), Rational(8, 9));
}

TEST(JointLaw, TwoIdealDevices) {
    auto t = ideal_table_exact();
    auto law = joint_law({t, t}, {{Trit(0), Trit(0)}, {Trit(1), Trit(1)}});
    EXPECT_EQ(law.size(), 64u);
    for (const auto &[o, p] : law.entries()) {
        EXPECT_EQ(p, Rational(1, 64));
    }
}

TEST(JointLaw, SingleDeviceIsTable) {
    auto t = robust_table_exact(Rational(1, 50));
    auto law = joint_law({t}, {{Trit(2), Trit(1)}});
    for (int i = 0; i < 4; i++) {
        for (int j = 0; j < 4; j++) {
            EXPECT_EQ(law.prob({AnswerA::kMasks[i], AnswerB::kMasks[j]}), t.at(2, 1, i, j));
        }
    }
}

TEST(JointLaw, FactorizesAndIsMarkov) {
    auto t1 = robust_table_exact(Rational(1, 20));
    auto t2 = ideal_table_exact();
    auto t3 = mix_tables(ideal_table_exact(), forced_111_table_exact(), Rational(1, 3));
    auto law = joint_law({t1, t2, t3}, {{Trit(0), Trit(2)}, {Trit(1), Trit(1)}, {Trit(2), Trit(0)}});
    auto a = law.marginal({"a0", "a1", "a2"});
    for (const auto &[o, p] : law.entries()) {
        Rational pa = a.prob({o[0], o[2], o[4]});
        Rational prod = 1;
        const std::pair<int, int> in[3] = {{0, 2}, {1, 1}, {2, 0}};
        const ExactTable *ts[3] = {&t1, &t2, &t3};
        for (int i = 0; i < 3; i++) {
            int ai = AnswerA::from_mask(static_cast<unsigned>(o[2 * i])).index();
            int bi = AnswerB::from_mask(static_cast<unsigned>(o[2 * i + 1])).index();
            Rational pai = 0;
            for (int k = 0; k < 4; k++) {
                pai += ts[i]->at(in[i].first, in[i].second, ai, k);
            }
            prod *= ts[i]->at(in[i].first, in[i].second, ai, bi) / pai;
        }
        EXPECT_EQ(p / pa, prod);
    }
    EXPECT_LT(conditional_mutual_information(law, {"a0"}, {"b1", "b2"}, {"b0"}), 1e-10);
    EXPECT_TRUE(is_markov(law, {"a0"}, {"b0"}, {"b1", "b2"}, 0));
}

TEST(JointLaw, SupportGuard) {
    std::vector<ExactTable> ts(7, ideal_table_exact());
    std::vector<std::pair<Trit, Trit>> in(7);
    EXPECT_THROW(joint_law(ts, in), SupportTooLarge);
}

TEST(Bank, BothSidesUniformOverEightPairs) {
    SeededRandom r(4);
    auto table = std::make_shared<const DeviceTable>(ideal_table());
    std::map<std::pair<int, int>, int> counts;
    const int kRuns = 80000;
    for (int i = 0; i < kRuns; i++) {
        auto bank = DeviceBank::uniform(1, table);
        auto [a, b] = bank.fire_both(0, Trit(0), Trit(0), r);
        counts[{a.index(), b.index()}]++;
        EXPECT_EQ(a.bit(0), b.bit(0));
    }
    EXPECT_EQ(counts.size(), 8u);
    // Hoeffding at 99% with a union bound over 8 cells.
    double tol = std::sqrt(std::log(2 * 8 / 0.01) / (2.0 * kRuns));
    for (const auto &[k, c] : counts) {
        EXPECT_NEAR(c / double(kRuns), 0.125, tol);
    }
}

TEST(Bank, SplitSideJointMatchesTable) {
    SeededRandom r(8);
    auto exact = robust_table_exact(Rational(1, 10));
    auto table = std::make_shared<const DeviceTable>(to_double_table(exact));
    const int kRuns = 100000;
    std::map<std::pair<int, int>, int> counts;
    for (int i = 0; i < kRuns; i++) {
        auto bank = DeviceBank::uniform(1, table);
        // Alice fires before Bob has chosen his input.
        auto a = bank.fire_alice(0, Trit(1), r);
        auto b = bank.fire_bob(0, Trit(2), r);
        counts[{a.index(), b.index()}]++;
    }
    double tol = std::sqrt(std::log(2 * 16 / 0.01) / (2.0 * kRuns));
    for (int i = 0; i < 4; i++) {
        for (int j = 0; j < 4; j++) {
            double freq = counts[std::make_pair(i, j)] / double(kRuns);
            EXPECT_NEAR(freq, to_double(exact.at(1, 2, i, j)), tol);
        }
    }
}

TEST(Bank, OneShotAndDelay) {
    SeededRandom r(2);
    auto bank = DeviceBank::uniform(3, std::make_shared<const DeviceTable>(ideal_table()));
    bank.fire_both(0, Trit(1), Trit(1), r);
    EXPECT_THROW(bank.fire_alice(0, Trit(0), r), AlreadyFired);
    bank.input_alice(1, Trit(2));
    bank.tick_delay();
    EXPECT_THROW(bank.tick_delay(), DoubleTick);
    EXPECT_EQ(bank.device(0).state, DeviceState::Fired);
    EXPECT_EQ(bank.device(1).state, DeviceState::Fired);
    EXPECT_EQ(bank.device(2).state, DeviceState::Decohered);
    // Bob never input on device 1 before DELAY: his effective input is 0.
    auto b = bank.fire_bob(1, Trit(2), r);
    EXPECT_EQ(bank.device(1).y->value(), 0);
    auto a = bank.read_alice(1, r);
    EXPECT_EQ(a.bit(0), b.bit(2));
    // Decohered device sampled by Alice only: joint drawn with y = 0.
    bank.fire_alice(2, Trit(1), r);
    EXPECT_EQ(bank.device(2).y->value(), 0);
    EXPECT_EQ(bank.device(2).x->value(), 0);
    EXPECT_EQ(bank.device(2).state, DeviceState::Fired);
}

TEST(TableJson, ExactRoundTrip) {
    auto t = robust_table_exact(Rational(1, 7));
    auto j = table_to_json(t);
    EXPECT_EQ(j["blocks"]["0,0"].size(), 16u);
    auto back = exact_table_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(back.raw(), t.raw());
    auto d = table_from_json(table_to_json(ideal_table()));
    EXPECT_EQ(d.raw(), ideal_table().raw());
}
