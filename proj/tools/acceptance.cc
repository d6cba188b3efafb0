// Acceptance suite: one verdict line per criterion.
//
//   msdi_acceptance [--criterion N ...] [--out DIR]
//
// Exits 0 iff every selected criterion passes.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "commands.h"
#include "msdi/compose.h"
#include "msdi/extract.h"

using namespace msdi;
namespace fs = std::filesystem;

namespace {

// ---- pinned tolerances -----------------------------------------------------------

constexpr double kRateCeiling = 1e-2;        // C4, C7, C9, C10
constexpr double kGuessAdvantage = 0.02;     // C6, C8
constexpr double kRateFloor = 0.99;          // C9 far reveal, C11
constexpr double kSimulatorMC = 0.05;        // C12
constexpr double kFloatMatch = 1e-12;        // exact values routed through double tables
constexpr std::uint64_t kSeed = 20240601;

// Exact distances pinned from the oracles below at the time of writing.
const Rational kBcHidingAscendingN3(13, 32);

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

ClaimResult exact_claim(std::string name, int criterion, const std::string &stat, const Rational &got,
                        const Rational &want) {
    auto c = make_claim(std::move(name), criterion, stat, to_double(got), "==", to_double(want));
    c.pass = got == want;
    c.detail = to_string(got) + " vs " + to_string(want);
    return c;
}

ClaimResult near_claim(std::string name, int criterion, const std::string &stat, double got, double want) {
    auto c = make_claim(std::move(name), criterion, stat, std::abs(got - want), "<=", kFloatMatch);
    c.detail = "value " + std::to_string(got) + " expected " + std::to_string(want);
    return c;
}

ClaimResult count_claim(std::string name, int criterion, const std::string &stat, std::size_t bad,
                        std::size_t checked) {
    auto c = make_claim(std::move(name), criterion, stat, static_cast<double>(bad), "==", 0);
    c.trials = checked;
    return c;
}

std::vector<ClaimResult> via_cli(cli::CommandResult (*cmd)(const cli::CommandOptions &), RunConfig cfg,
                                 std::string expect = "pass", std::string corrupt = "") {
    cli::CommandOptions o;
    cfg.validate();
    o.cfg = std::move(cfg);
    o.expect = std::move(expect);
    o.corrupt = std::move(corrupt);
    return cmd(o).report.claims;
}

// Re-judges claims with the given statistic against this file's pinned threshold.
std::vector<ClaimResult> pin(std::vector<ClaimResult> claims, const std::string &stat, double threshold) {
    for (auto &c : claims) {
        if (c.statistic == stat) {
            c.threshold = threshold;
            c.pass = compare(c.value, c.comparator, threshold);
        }
    }
    return claims;
}

RunConfig base(const std::string &protocol, const std::string &code_spec, std::size_t trials) {
    RunConfig c;
    c.protocol = protocol;
    c.code = code_spec;
    c.trials = trials;
    c.seed = kSeed;
    return c;
}

// ---- oracles ---------------------------------------------------------------------
// Written against text forms and dense integer arithmetic, not the library types.

const char *kAliceRows[4] = {"000", "011", "101", "110"};
const char *kBobCols[4] = {"001", "010", "100", "111"};

Rational classical_value_by_search() {
    int best = 0;
    for (int sa = 0; sa < 64; sa++) {
        for (int sb = 0; sb < 64; sb++) {
            int wins = 0;
            for (int x = 0; x < 3; x++) {
                for (int y = 0; y < 3; y++) {
                    const char *a = kAliceRows[(sa >> (2 * x)) & 3];
                    const char *b = kBobCols[(sb >> (2 * y)) & 3];
                    wins += a[y] == b[x];
                }
            }
            best = std::max(best, wins);
        }
    }
    return Rational(best, 9);
}

struct Dense {
    int n = 0;
    std::vector<std::uint64_t> cols;
};

Dense dense(const LinearCode &c) {
    Dense d;
    d.n = static_cast<int>(c.n());
    for (std::size_t j = 0; j < c.n(); j++) {
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < c.rows().size(); i++) {
            v |= std::uint64_t(c.rows()[i].get(j)) << i;
        }
        d.cols.push_back(v);
    }
    return d;
}

std::uint64_t dense_syndrome(const Dense &d, std::uint64_t v) {
    std::uint64_t s = 0;
    for (int j = 0; j < d.n; j++) {
        if ((v >> j) & 1) {
            s ^= d.cols[j];
        }
    }
    return s;
}

int dense_distance(const Dense &d) {
    int best = d.n + 1;
    for (std::uint64_t v = 1; v < (std::uint64_t{1} << d.n); v++) {
        if (dense_syndrome(d, v) == 0) {
            best = std::min(best, std::popcount(v));
        }
    }
    return best;
}

// Masked-bit distance for Bob playing y = 0 on ideal devices: R_1 uniform, Bob sees W_1 and T_1.
Rational ot_zero_y_oracle(const LinearCode &c) {
    auto d = dense(c);
    std::uint64_t size = std::uint64_t{1} << d.n;
    long long total = 0;
    for (std::uint64_t t = 0; t < size; t++) {
        std::map<std::uint64_t, long long> acc;
        for (std::uint64_t r = 0; r < size; r++) {
            acc[dense_syndrome(d, r)] += std::popcount(t & r) % 2 ? -1 : 1;
        }
        for (const auto &[w, s] : acc) {
            total += std::llabs(s);
        }
    }
    return Rational(total, static_cast<long long>(size * size));
}

// n = 3, honest Bob, ideal devices: R_j = b_j(x_j), Pr(R_j = 1 | b_j) = weight(b_j)/3, Ext3 = majority.
Rational bc_tiny_oracle() {
    Rational total = 0;
    for (int s = 0; s < 64; s++) {
        std::array<Rational, 3> p;
        for (int j = 0; j < 3; j++) {
            std::string b = kBobCols[(s >> (2 * j)) & 3];
            p[j] = Rational(static_cast<long long>(std::count(b.begin(), b.end(), '1')), 3);
        }
        Rational one = p[0] * p[1] * p[2] + (1 - p[0]) * p[1] * p[2] + p[0] * (1 - p[1]) * p[2] +
                       p[0] * p[1] * (1 - p[2]);
        Rational gap = 1 - 2 * one;
        total += (gap < 0 ? -gap : gap) / 64;
    }
    return total;
}

// Pr(some third-block has more than n/9 answers 111), each 111 independently with probability 1/4.
double good_tail_oracle(std::size_t n) {
    std::size_t m = n / 3, limit = n / 9;
    double within = 0;
    for (std::size_t k = 0; k <= limit; k++) {
        within += std::exp(std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0) +
                           k * std::log(0.25) + (m - k) * std::log(0.75));
    }
    return 1 - std::pow(within, 3);
}

// Dense Toeplitz distance: sum over seeds and outputs of |count 2^m - |X||, normalized.
Rational extractor_oracle(const std::vector<std::uint64_t> &xs, int n, int m) {
    int t = n + m - 1;
    long long acc = 0;
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << t); s++) {
        std::vector<long long> c(std::size_t{1} << m, 0);
        for (auto x : xs) {
            std::uint64_t out = 0;
            for (int j = 0; j < m; j++) {
                int bit = 0;
                for (int i = 0; i < n; i++) {
                    bit ^= static_cast<int>(((s >> (i - j + m - 1)) & 1) & ((x >> i) & 1));
                }
                out |= std::uint64_t(bit) << j;
            }
            c[out]++;
        }
        for (auto v : c) {
            acc += std::llabs(v * (1LL << m) - static_cast<long long>(xs.size()));
        }
    }
    return Rational(acc, static_cast<long long>(xs.size()) * (1LL << m) * (1LL << t));
}

// ---- criteria --------------------------------------------------------------------

std::vector<ClaimResult> c1_magic_square() {
    auto all = ms_fact_checks();
    std::vector<ClaimResult> out;
    for (auto &c : all) {
        if (c.criterion == 1) {
            out.push_back(c);
        }
    }
    // Entries against the text-form predicate.
    auto t = ideal_table_exact();
    std::size_t bad = 0;
    for (int x = 0; x < 3; x++) {
        for (int y = 0; y < 3; y++) {
            for (int ai = 0; ai < 4; ai++) {
                for (int bi = 0; bi < 4; bi++) {
                    auto a = AnswerA::parse(kAliceRows[ai]);
                    auto b = AnswerB::parse(kBobCols[bi]);
                    bool win = kAliceRows[ai][y] == kBobCols[bi][x];
                    bad += t.at(Trit(x), Trit(y), a, b) != (win ? Rational(1, 8) : Rational(0));
                }
            }
        }
    }
    out.push_back(count_claim("ideal_entries_text_oracle", 1, "mismatches", bad, 144));
    return out;
}

std::vector<ClaimResult> c2_classical_value() {
    return {exact_claim("classical_value", 2, "value", classical_value_oracle().value, classical_value_by_search()),
            exact_claim("classical_value_is_8/9", 2, "value", classical_value_by_search(), Rational(8, 9))};
}

std::vector<ClaimResult> c3_factorization() {
    std::vector<ClaimResult> out;
    std::size_t checked = 0, bad = 0;
    for (std::size_t n : {2u, 3u}) {
        // Strategies with random inputs multiply the n = 3 law by 27; they run at n = 2 only.
        std::vector<std::string> names{"ascending:0", "ascending:2", "greedy"};
        if (n == 2) {
            names.insert(names.end(), {"honest", "shuffled", "shifted:1"});
        }
        for (const auto &s : names) {
            auto strat = make_bob_strategy(s);
            checked++;
            bad += !factorizes_per_box(adaptive_joint_law(ideal(), *strat, n), n);
        }
    }
    // Noisy tables carry long binary fractions; n = 3 would take about a minute.
    auto greedy = make_bob_strategy("greedy");
    checked++;
    bad += !factorizes_per_box(adaptive_joint_law(robust(0.05), *greedy, 2), 2);
    out.push_back(count_claim("adaptive_bob_factorizes", 3, "non_factorizing_laws", bad, checked));

    // Fixed inputs: every entry of the joint law is the product of table entries, and the mass is 1.
    auto t = ideal_table_exact();
    checked = bad = 0;
    for (std::size_t n : {2u, 3u}) {
        std::size_t grid = n == 2 ? 81 : 729;
        for (std::size_t code = 0; code < grid; code++) {
            std::vector<std::pair<Trit, Trit>> in;
            for (std::size_t i = 0, c = code; i < n; i++, c /= 9) {
                in.emplace_back(Trit(static_cast<int>(c % 3)), Trit(static_cast<int>(c / 3 % 3)));
            }
            auto joint = joint_law(std::vector<ExactTable>(n, t), in);
            Rational mass = 0;
            bool ok = true;
            for (const auto &[o, p] : joint.entries()) {
                Rational prod = 1;
                for (std::size_t i = 0; i < n; i++) {
                    prod *= t.at(in[i].first, in[i].second, AnswerA::from_mask(static_cast<unsigned>(o[2 * i])),
                                 AnswerB::from_mask(static_cast<unsigned>(o[2 * i + 1])));
                }
                ok = ok && p == prod;
                mass += p;
            }
            checked++;
            bad += !ok || mass != 1;
        }
    }
    out.push_back(count_claim("fixed_input_product", 3, "non_product_laws", bad, checked));
    return out;
}

std::vector<ClaimResult> c4_ot_correctness() {
    auto ideal_cfg = base("ot", "bch:7:2:105", 10000);
    auto out = via_cli(cli::ot_run, ideal_cfg);
    auto noisy = base("ot", "bch:7:2:105", 1000);
    noisy.device = "robust:0.001";
    noisy.eps_r = 1e-3;
    for (auto &c : pin(via_cli(cli::ot_run, noisy), "failure_rate", kRateCeiling)) {
        c.claim += "_eps_r_1e-3";
        out.push_back(c);
    }
    return out;
}

std::vector<ClaimResult> c5_ot_receiver_structural() {
    std::size_t runs = 0, bob_msgs = 0, view_diff = 0;
    for (const char *spec : {"hamming74", "bch:5:1:30"}) {
        auto cfg = OTConfig::make(code(spec));
        for (auto table : {ideal(), robust(0.01)}) {
            for (std::uint64_t seed = 0; seed < 250; seed++) {
                bool s0 = seed & 1, s1 = (seed >> 1) & 1;
                auto b0 = DeviceBank::uniform(cfg.n, table);
                auto b1 = DeviceBank::uniform(cfg.n, table);
                auto o0 = ot_run_honest(cfg, s0, s1, false, b0, derive_seed(kSeed, seed));
                auto o1 = ot_run_honest(cfg, s0, s1, true, b1, derive_seed(kSeed, seed));
                for (const auto *o : {&o0, &o1}) {
                    runs++;
                    bob_msgs += o->transcript.messages_from(PartyId::Bob).size();
                }
                // Alice's view: her inputs, answers, message and output.
                view_diff += o0.x != o1.x || o0.a != o1.a || o0.msg->to_json() != o1.msg->to_json() ||
                             o0.o_a != o1.o_a;
            }
        }
    }
    return {count_claim("bob_to_alice_channel_empty", 5, "bob_messages", bob_msgs, runs),
            count_claim("alice_view_independent_of_d", 5, "differing_views", view_diff, runs / 2)};
}

std::vector<ClaimResult> c6_ot_sender_security() {
    std::vector<ClaimResult> out;
    auto cfg = OTConfig::make(code("repetition:3"));
    double floor = std::log2(6.0 / 5.0);
    for (const char *s : {"ascending:0", "ascending:1", "honest", "greedy"}) {
        auto strat = make_bob_strategy(s);
        auto rep = eval_ot_sender_security(cfg, ideal(), *strat, EvalMode::ExactTinyN, 0, 0);
        // Boxes whose bit is common reveal it to Bob by design; the bound is on the uncommon ones.
        Rational g(0);
        for (const auto &u : rep.box_uncommon_guess_prob) {
            if (u && *u > g) g = *u;
        }
        double worst = -std::log2(to_double(g));
        auto c = make_claim(std::string("uncommon_box_min_entropy:") + s, 6, "min_uncommon_box_min_entropy_bits",
                            worst, ">=", floor - kFloatMatch);
        c.detail = "max_guess=" + to_string(g);
        out.push_back(c);
        if (std::string(s) == "ascending:0") {
            out.push_back(exact_claim("masked_distance:ascending:0", 6, "masked_distance",
                                      *rep.masked_distance_exact, ot_zero_y_oracle(*cfg.code)));
        }
    }
    auto mc = base("ot", "bch:6:1:60", 10000);
    mc.strategy = "honest";
    for (auto &c : pin(via_cli(cli::ot_security, mc), "advantage", kGuessAdvantage)) {
        out.push_back(c);
    }
    mc.strategy = "greedy";
    for (auto &c : pin(via_cli(cli::ot_security, mc), "advantage", kGuessAdvantage)) {
        c.claim += ":greedy";
        out.push_back(c);
    }
    return out;
}

std::vector<ClaimResult> c7_bc_correctness() {
    auto ideal_cfg = base("bc", "bch:5:3:30", 1000);
    auto out = via_cli(cli::bc_run, ideal_cfg);
    auto noisy = base("bc", "bch:5:3:30", 1000);
    noisy.device = "robust:0.001";
    for (auto &c : pin(via_cli(cli::bc_run, noisy), "bottom_rate", kRateCeiling)) {
        c.claim += "_eps_r_1e-3";
        out.push_back(c);
    }
    return out;
}

std::vector<ClaimResult> c8_bc_hiding() {
    std::vector<ClaimResult> out;
    auto tiny = BCConfig::make(code("repetition:1"));
    HonestBob honest;
    auto h = eval_bc_hiding(tiny, ideal(), honest, EvalMode::ExactTinyN, 0, 0);
    out.push_back(exact_claim("hiding_exact:honest", 8, "distance", *h.distance_exact, bc_tiny_oracle()));
    AscendingBob asc(Trit(0));
    auto a = eval_bc_hiding(tiny, ideal(), asc, EvalMode::ExactTinyN, 0, 0);
    out.push_back(exact_claim("hiding_exact:ascending:0", 8, "distance", *a.distance_exact, kBcHidingAscendingN3));

    auto forced = std::make_shared<const DeviceTable>(to_double_table(forced_111_table_exact()));
    auto f = eval_bc_hiding(tiny, forced, honest, EvalMode::ExactTinyN, 0, 0);
    out.push_back(exact_claim("hiding_forced_111", 8, "distance", *f.distance_exact, Rational(1)));

    auto mc = base("bc", "bch:5:1:30", 10000);
    for (const char *s : {"honest", "greedy"}) {
        mc.strategy = s;
        for (auto &c : pin(via_cli(cli::bc_hiding, mc), "advantage", kGuessAdvantage)) {
            c.claim += std::string(":") + s;
            out.push_back(c);
        }
    }
    return out;
}

std::vector<ClaimResult> c9_bc_binding() {
    auto cfg = base("bc", "bch:5:6:30", 1000);
    cfg.eps_r = 1e-10;
    cfg.strategy = "all";
    return pin(pin(via_cli(cli::bc_binding, cfg), "accepted_flipped_rate", kRateCeiling), "bottom_rate", kRateFloor);
}

std::vector<ClaimResult> c10_good_concentration() {
    std::vector<ClaimResult> out;
    const std::size_t n = 180, trials = 10000;
    double tail = good_tail_oracle(n);
    std::size_t passing_n = n;
    while (good_tail_oracle(passing_n) > kRateCeiling) {
        passing_n += 9;
    }
    auto lib_tail = to_double(not_good_probability(n, n / 9, Rational(1, 4)));
    out.push_back(near_claim("good_tail_matches_oracle", 10, "abs_diff", lib_tail, tail));
    std::uint64_t stream = 0;
    for (const auto &[label, table] :
         std::vector<std::pair<std::string, std::shared_ptr<const DeviceTable>>>{{"ideal", ideal()},
                                                                               {"robust:0.001", robust(0.001)}}) {
        for (const char *s : {"ascending:0", "greedy"}) {
            auto strat = make_bob_strategy(s);
            auto rep = eval_good_concentration(n, table, *strat, trials, derive_seed(kSeed, stream++));
            auto c = rate_claim("not_good:" + std::string(s) + ":" + label, 10, "fraction_outside_good",
                                rep.not_good, rep.trials, "<=", kRateCeiling);
            std::ostringstream os;
            os.precision(4);
            os << "exact tail at n=" << n << " is " << tail << "; first n with tail <= 0.01 is " << passing_n;
            c.detail = os.str();
            out.push_back(c);
        }
    }
    std::size_t checked = 0, bad = 0;
    for (const char *s : {"ascending:0", "honest", "greedy", "shifted:1"}) {
        for (std::size_t k = 1; k <= 3; k++) {
            auto strat = make_bob_strategy(s);
            for (const auto &z : z_conditionals(ideal(), *strat, k)) {
                checked++;
                bad += z.expectation != Rational(1, 4);
            }
        }
    }
    out.push_back(count_claim("z_conditional_quarter", 10, "histories_not_1/4", bad, checked));
    return out;
}

std::vector<ClaimResult> c11_test_phase() {
    RunConfig cfg;
    cfg.protocol = "test-phase";
    cfg.n = 300;
    cfg.trials = 1000;
    cfg.seed = kSeed;
    cfg.eps_dd = 0.05;
    cfg.device = "robust:0.05";
    auto out = pin(via_cli(cli::test_phase, cfg, "pass"), "pass_rate", kRateFloor);
    cfg.device = "robust:0.2";
    for (auto &c : pin(via_cli(cli::test_phase, cfg, "abort"), "abort_rate", kRateFloor)) {
        out.push_back(c);
    }
    return out;
}

std::vector<ClaimResult> c12_composition() {
    std::vector<ClaimResult> out;
    auto ot2 = OTConfig::make(code("repetition:2"));
    auto bc1 = BCConfig::make(code("repetition:1"));

    OTImplementation honest_ot(ot2, ideal());
    auto [d, dx] = implementation_distance(honest_ot, EvalMode::ExactTinyN, 0, kSeed);
    out.push_back(exact_claim("ideal_ot_vs_honest_ot", 12, "distance", *dx, Rational(0)));

    auto cmp = [&](SimulationCase c, const Rational &want, const std::string &label) {
        auto rep = compare_with_simulator(c, EvalMode::ExactTinyN, 0, kSeed);
        out.push_back(near_claim("simulator_exact:" + label, 12, "abs_diff", rep.distance, to_double(want)));
    };
    cmp(ot_corrupt_alice_case(ot2, ideal(), std::shared_ptr<OTAliceStrategy>(make_ot_alice_strategy("honest"))),
        Rational(0), "ot.corrupt_alice:honest");
    // Disjoint supports: at d = 0 Bob's output is always the wrong string.
    cmp(ot_corrupt_alice_case(ot2, ideal(),
                              std::shared_ptr<OTAliceStrategy>(make_ot_alice_strategy("selective-w0"))),
        Rational(2), "ot.corrupt_alice:selective-w0");
    cmp(ot_corrupt_bob_case(ot2, ideal(), std::shared_ptr<AdaptiveBobStrategy>(make_bob_strategy("ascending:0"))),
        ot_zero_y_oracle(*ot2.code), "ot.corrupt_bob:ascending:0");
    cmp(bc_corrupt_bob_case(bc1, ideal(), std::shared_ptr<AdaptiveBobStrategy>(make_bob_strategy("honest"))),
        bc_tiny_oracle(), "bc.corrupt_bob:honest");
    cmp(bc_corrupt_alice_case(bc1, ideal(), std::shared_ptr<BCAliceStrategy>(make_alice_strategy("honest"))),
        Rational(0), "bc.corrupt_alice:honest");

    auto mc = [&](const std::string &inner, const std::string &corrupt, const std::string &code_spec,
                  const std::string &strategy, double eps_r) {
        auto cfg = base("compose", code_spec, 10000);
        cfg.inner = inner;
        cfg.strategy = strategy;
        cfg.eps_r = eps_r;
        for (auto &c : pin(via_cli(cli::compose_check, cfg, "pass", corrupt), "end_state_distance", kSimulatorMC)) {
            c.claim += ":" + strategy + ":mc";
            out.push_back(c);
        }
    };
    mc("ot", "alice", "bch:6:1:60", "honest", 1e-3);
    mc("ot", "bob", "bch:6:1:60", "honest", 1e-3);
    mc("bc", "bob", "bch:5:1:20", "honest", 1e-3);
    mc("bc", "alice", "bch:5:3:20", "honest", 1e-10);

    for (const char *device : {"ideal", "robust:0.1"}) {
        auto cfg = base("compose", "repetition:2", 0);
        cfg.mode = EvalMode::ExactTinyN;
        cfg.inner = "ot";
        cfg.outer = "toy-g";
        cfg.device = device;
        for (auto &c : via_cli(cli::compose_check, cfg)) {
            c.claim += std::string(":") + device;
            out.push_back(c);
        }
    }
    return out;
}

std::vector<ClaimResult> c13_coding_extractor() {
    std::vector<ClaimResult> out;
    const std::vector<std::string> shipped{"hamming74",  "repetition:1", "repetition:2", "repetition:3",
                                           "repetition:5", "bch:4:1:15", "bch:4:2:15",   "bch:4:3:15",
                                           "bch:5:1:20", "bch:5:3:20", "random:20:14:1", "random:12:4:3",
                                           "random:16:8:2"};
    std::size_t checked = 0, bad = 0, distance_bad = 0;
    for (const auto &spec : shipped) {
        auto c = make_code(spec);
        auto dn = dense(c);
        distance_bad += dense_distance(dn) != static_cast<int>(c.d());
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << c.n()); v++) {
            if (2 * static_cast<std::size_t>(std::popcount(v)) >= c.d()) {
                continue;
            }
            checked++;
            auto e = c.decode(c.syndrome(BitVec::from_u64(v, c.n())));
            bad += !e || e->to_u64() != v;
        }
    }
    out.push_back(count_claim("code_distance_matches_dense", 13, "mismatches", distance_bad, shipped.size()));
    out.push_back(count_claim("decode_all_correctable", 13, "failed_decodes", bad, checked));

    // Flat sources: every subset of size 2^k for n <= 4; for 5 <= n <= 8 subcubes,
    // prefix intervals and seeded random subsets.
    std::size_t sources = 0, over = 0, oracle_checked = 0, oracle_bad = 0;
    SeededRandom rng(kSeed);
    auto check = [&](const std::vector<std::uint64_t> &xs, int n, int k) {
        for (int m = 1; m <= 2 && m <= k; m++) {
            auto dist = strong_extractor_distance(xs, n, m);
            sources++;
            over += to_double(dist) > leftover_hash_ceiling(k, m);
            if (n <= 4 ? sources % 97 == 0 : sources % 7 == 0) {
                oracle_checked++;
                oracle_bad += dist != extractor_oracle(xs, n, m);
            }
        }
    };
    for (int n = 1; n <= 4; n++) {
        for (int k = 1; k < n; k++) {
            for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (1 << n)); mask++) {
                if (std::popcount(mask) != (1 << k)) {
                    continue;
                }
                std::vector<std::uint64_t> xs;
                for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); v++) {
                    if ((mask >> v) & 1) {
                        xs.push_back(v);
                    }
                }
                check(xs, n, k);
            }
        }
    }
    for (int n = 5; n <= 8; n++) {
        for (int k = 1; k < n; k++) {
            std::vector<std::uint64_t> cube, prefix;
            for (std::uint64_t v = 0; v < (std::uint64_t{1} << k); v++) {
                cube.push_back(v << (n - k));  // free high bits, low bits fixed to 0
                prefix.push_back(v);
            }
            check(cube, n, k);
            check(prefix, n, k);
            for (int rep = 0; rep < 20; rep++) {
                std::vector<std::uint64_t> all(std::size_t{1} << n);
                for (std::size_t i = 0; i < all.size(); i++) {
                    all[i] = i;
                }
                for (std::size_t i = 0; i < (std::size_t{1} << k); i++) {
                    std::swap(all[i], all[i + rng.uniform(all.size() - i)]);
                }
                all.resize(std::size_t{1} << k);
                check(all, n, k);
            }
        }
    }
    out.push_back(count_claim("extractor_within_leftover_hash", 13, "sources_over_ceiling", over, sources));
    out.push_back(count_claim("extractor_distance_matches_oracle", 13, "mismatches", oracle_bad, oracle_checked));
    return out;
}

struct Criterion {
    int id;
    const char *title;
    double budget_s;
    std::function<std::vector<ClaimResult>()> run;
};

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<int> only;
    std::string out_dir;
    app.add_option("--criterion", only, "criteria to run (default all)");
    app.add_option("--out", out_dir, "directory for JSON-lines and CSV");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, "Magic Square facts", 1, c1_magic_square},
        {2, "classical value", 1, c2_classical_value},
        {3, "multi-device factorization", 10, c3_factorization},
        {4, "OT correctness", 120, c4_ot_correctness},
        {5, "OT receiver security (structural)", 10, c5_ot_receiver_structural},
        {6, "OT sender security", 300, c6_ot_sender_security},
        {7, "BC correctness", 120, c7_bc_correctness},
        {8, "BC hiding", 300, c8_bc_hiding},
        {9, "BC binding", 300, c9_bc_binding},
        {10, "GOOD concentration", 180, c10_good_concentration},
        {11, "test phase", 120, c11_test_phase},
        {12, "composition and simulators", 300, c12_composition},
        {13, "coding and extractor oracles", 120, c13_coding_extractor},
    };

    Report report;
    bool all = true;
    for (const auto &cr : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), cr.id) == only.end()) {
            continue;
        }
        auto start = std::chrono::steady_clock::now();
        std::vector<ClaimResult> claims;
        std::string error;
        try {
            claims = cr.run();
        } catch (const std::exception &e) {
            error = e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool pass = error.empty() && !claims.empty();
        for (auto &c : claims) {
            c.runtime_s = secs;
            pass = pass && c.pass;
            std::cout << "  " << cli::claim_line(c) << '\n';
        }
        bool in_budget = secs <= cr.budget_s;
        auto verdict = make_claim("criterion_" + std::to_string(cr.id), cr.id, "runtime_s", secs, "<=", cr.budget_s);
        verdict.pass = pass && in_budget;
        verdict.detail = error.empty() ? cr.title : std::string(cr.title) + ": error: " + error;
        report.claims.insert(report.claims.end(), claims.begin(), claims.end());
        report.claims.push_back(verdict);
        all = all && verdict.pass;
        std::printf("criterion %2d %-36s %s  (%.1f s, budget %.0f s)%s\n", cr.id, cr.title,
                    verdict.pass ? "PASS" : "FAIL", secs, cr.budget_s,
                    error.empty() ? "" : (" error: " + error).c_str());
        std::fflush(stdout);
    }
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        std::ofstream jl(fs::path(out_dir) / "acceptance.jsonl");
        report.write_jsonl(jl);
        std::ofstream(fs::path(out_dir) / "acceptance_summary.csv") << report.summary_csv();
    }
    return all ? 0 : 1;
}
