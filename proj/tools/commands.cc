#include "commands.h"

#include <chrono>
#include <limits>
#include <cmath>
#include <sstream>

#include "msdi/compose.h"
#include "msdi/errors.h"
#include "msdi/parallel.h"

namespace msdi::cli {

namespace {

class Stopwatch {
   public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

   private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void stamp(Report &r, double seconds) {
    for (auto &c : r.claims) {
        c.runtime_s = seconds;
    }
}

bool ideal_device(const RunConfig &cfg) {
    return cfg.device_spec().kind == DeviceSpec::Kind::Ideal;
}

}  // namespace

std::string claim_line(const ClaimResult &c) {
    std::ostringstream os;
    os.precision(6);
    os << (c.pass ? "[pass] " : "[FAIL] ") << "criterion " << c.criterion << "  " << c.claim << ": " << c.statistic
       << " = " << c.value;
    if (c.ci_lo && c.ci_hi) {
        os << " [" << *c.ci_lo << ", " << *c.ci_hi << "]";
    }
    os << " (" << c.comparator << " " << c.threshold << ")";
    if (c.trials) {
        os << "  trials=" << c.trials;
    }
    if (!c.detail.empty()) {
        os << "  " << c.detail;
    }
    return os.str();
}

CommandResult ms_facts(const CommandOptions &) {
    Stopwatch sw;
    CommandResult r;
    r.report.claims = ms_fact_checks();
    stamp(r.report, sw.seconds());
    return r;
}

CommandResult ot_run(const CommandOptions &o) {
    Stopwatch sw;
    const auto &cfg = o.cfg;
    auto ot = cfg.ot_config();
    auto spec = cfg.device_spec();
    auto tables = spec.tables(ot.n, cfg.seed);

    struct Trial {
        bool fail = false, bottom = false;
        nlohmann::json log;
    };
    auto trials = parallel_trials<Trial>(
        cfg.trials,
        [&](std::size_t t) {
            // Cycles through all eight (s0, s1, d).
            bool s0 = t & 1, s1 = (t >> 1) & 1, d = (t >> 2) & 1;
            DeviceBank bank(tables);
            auto out = ot_run_honest(ot, s0, s1, d, bank, derive_seed(cfg.seed, t));
            Trial tr;
            tr.fail = out.o_b != Token::bit(d ? s1 : s0) || !out.o_a.is_empty();
            tr.bottom = out.o_b.is_bottom();
            if (o.log_runs) {
                tr.log = out.to_json();
            }
            return tr;
        },
        cfg.workers);

    CommandResult r;
    std::size_t fails = 0, bottoms = 0;
    for (auto &t : trials) {
        fails += t.fail;
        bottoms += t.bottom;
        if (o.log_runs) {
            r.runs.push_back(std::move(t.log));
        }
    }
    double threshold = ideal_device(cfg) ? 0 : 0.01;
    auto c = rate_claim("ot_correctness", 4, "failure_rate", fails, cfg.trials, ideal_device(cfg) ? "==" : "<=",
                        threshold);
    c.detail = "n=" + std::to_string(ot.n) + " device=" + cfg.device + " bottoms=" + std::to_string(bottoms);
    r.report.claims.push_back(c);
    r.report.points.push_back(PlotPoint::from_counts("ot_failure_rate", static_cast<double>(ot.n), fails, cfg.trials));
    r.detail = {{"n", ot.n}, {"code", ot.code->name()}, {"d", ot.code->d()}, {"trials", cfg.trials},
                {"failures", fails}, {"bottoms", bottoms}};
    stamp(r.report, sw.seconds());
    return r;
}

CommandResult ot_security(const CommandOptions &o) {
    Stopwatch sw;
    const auto &cfg = o.cfg;
    auto ot = cfg.ot_config();
    auto strat = make_bob_strategy(cfg.strategy);
    auto rep = eval_ot_sender_security(ot, cfg.device_spec().table(cfg.seed), *strat, cfg.mode, cfg.trials, cfg.seed);

    CommandResult r;
    r.detail = rep.to_json();
    if (cfg.mode == EvalMode::ExactTinyN) {
        double floor = std::log2(6.0 / 5.0);
        Rational g(0);
        for (const auto &u : rep.box_uncommon_guess_prob) {
            if (u && *u > g) g = *u;
        }
        double worst = g == 0 ? std::numeric_limits<double>::infinity() : -std::log2(to_double(g));
        auto c = make_claim("ot_uncommon_box_min_entropy", 6, "min_uncommon_box_min_entropy_bits", worst, ">=",
                            floor - 1e-12);
        c.detail = "max_guess=" + to_string(g) +
                   " masked_distance=" + (rep.masked_distance_exact ? to_string(*rep.masked_distance_exact) : "?");
        r.report.claims.push_back(c);
        r.report.points.push_back({"ot_masked_distance", static_cast<double>(ot.n), rep.masked_distance,
                                   rep.masked_distance, rep.masked_distance, {}, {}});
    } else {
        auto c = rate_claim("ot_guess_advantage", 6, "success_rate", rep.successes, rep.trials, "<=", 0.52);
        c.value = rep.advantage;
        c.statistic = "advantage";
        c.threshold = 0.02;
        *c.ci_lo -= 0.5;
        *c.ci_hi -= 0.5;
        c.pass = rep.advantage <= 0.02;
        c.detail = "strategy=" + cfg.strategy + " n=" + std::to_string(ot.n);
        r.report.claims.push_back(c);
        r.report.points.push_back(
            PlotPoint::from_counts("ot_guess_success", static_cast<double>(ot.n), rep.successes, rep.trials));
    }
    stamp(r.report, sw.seconds());
    return r;
}

CommandResult bc_run(const CommandOptions &o) {
    Stopwatch sw;
    const auto &cfg = o.cfg;
    auto bc = cfg.bc_config();
    auto tables = cfg.device_spec().tables(bc.n, cfg.seed);

    struct Trial {
        bool wrong = false, bottom = false;
        nlohmann::json log;
    };
    auto trials = parallel_trials<Trial>(
        cfg.trials,
        [&](std::size_t t) {
            bool d = t & 1;
            DeviceBank bank(tables);
            auto out = bc_run_honest(bc, d, bank, derive_seed(cfg.seed, t));
            Trial tr;
            tr.wrong = out.o_b == Token::bit(!d);
            tr.bottom = out.o_b.is_bottom();
            if (o.log_runs) {
                tr.log = out.to_json();
            }
            return tr;
        },
        cfg.workers);

    CommandResult r;
    std::size_t wrong = 0, bottoms = 0;
    for (auto &t : trials) {
        wrong += t.wrong;
        bottoms += t.bottom;
        if (o.log_runs) {
            r.runs.push_back(std::move(t.log));
        }
    }
    bool ideal = ideal_device(cfg);
    auto b = rate_claim("bc_correctness_bottom", 7, "bottom_rate", bottoms, cfg.trials, ideal ? "==" : "<=",
                        ideal ? 0 : 0.01);
    b.detail = "n=" + std::to_string(bc.n) + " device=" + cfg.device;
    r.report.claims.push_back(b);
    auto w = make_claim("bc_correctness_flip", 7, "opened_other_bit", static_cast<double>(wrong), "==", 0);
    w.trials = cfg.trials;
    r.report.claims.push_back(w);
    r.report.points.push_back(PlotPoint::from_counts("bc_bottom_rate", static_cast<double>(bc.n), bottoms, cfg.trials));
    r.detail = {{"n", bc.n}, {"code", bc.codes[0]->name()}, {"trials", cfg.trials}, {"bottoms", bottoms},
                {"flipped", wrong}};
    stamp(r.report, sw.seconds());
    return r;
}

CommandResult bc_hiding(const CommandOptions &o) {
    Stopwatch sw;
    const auto &cfg = o.cfg;
    auto bc = cfg.bc_config();
    auto strat = make_bob_strategy(cfg.strategy);
    auto rep = eval_bc_hiding(bc, cfg.device_spec().table(cfg.seed), *strat, cfg.mode, cfg.trials, cfg.seed);

    CommandResult r;
    r.detail = rep.to_json();
    if (cfg.mode == EvalMode::ExactTinyN) {
        // Exact distances are reported, not judged: the pinned values live in the acceptance suite.
        r.report.points.push_back(
            {"bc_hiding_distance", static_cast<double>(bc.n), rep.distance, rep.distance, rep.distance, {}, {}});
    } else {
        auto c = rate_claim("bc_guess_advantage", 8, "success_rate", rep.successes, rep.trials, "<=", 0.52);
        c.value = rep.advantage;
        c.statistic = "advantage";
        c.threshold = 0.02;
        *c.ci_lo -= 0.5;
        *c.ci_hi -= 0.5;
        c.pass = rep.advantage <= 0.02;
        c.detail = "strategy=" + cfg.strategy + " n=" + std::to_string(bc.n);
        r.report.claims.push_back(c);
        r.report.points.push_back(
            PlotPoint::from_counts("bc_guess_success", static_cast<double>(bc.n), rep.successes, rep.trials));
    }
    stamp(r.report, sw.seconds());
    return r;
}

CommandResult bc_binding(const CommandOptions &o) {
    Stopwatch sw;
    const auto &cfg = o.cfg;
    auto bc = cfg.bc_config();
    auto table = cfg.device_spec().table(cfg.seed);
    std::vector<std::string> family{cfg.strategy};
    if (cfg.strategy == "all" || cfg.strategy == "honest") {
        family = {"honest-then-flip", "far-rbar", "syndrome-forge"};
    }

    CommandResult r;
    r.detail = nlohmann::json::array();
    for (std::size_t i = 0; i < family.size(); i++) {
        auto strat = make_alice_strategy(family[i]);
        auto rep = eval_bc_binding(bc, table, *strat, cfg.trials, derive_seed(cfg.seed, i));
        r.detail.push_back(rep.to_json());
        std::size_t flipped = rep.d1_in_e + rep.d0_in_ec;
        auto c = rate_claim("bc_binding:" + family[i], 9, "accepted_flipped_rate", flipped, rep.trials, "<=", 0.01);
        c.detail = "n=" + std::to_string(bc.n);
        r.report.claims.push_back(c);
        r.report.points.push_back(PlotPoint::from_counts("bc_binding_accept:" + family[i],
                                                         static_cast<double>(bc.n), flipped, rep.trials));
        if (family[i] == "far-rbar") {
            r.report.claims.push_back(
                rate_claim("bc_binding_far_bottom", 9, "bottom_rate", rep.bottoms, rep.trials, ">=", 0.99));
        }
    }
    stamp(r.report, sw.seconds());
    return r;
}

CommandResult test_phase(const CommandOptions &o) {
    Stopwatch sw;
    const auto &cfg = o.cfg;
    if (o.expect != "pass" && o.expect != "abort") {
        throw ConfigError("expect must be pass or abort");
    }
    std::size_t n = cfg.n ? cfg.n : 300;
    auto tables = cfg.device_spec().tables(n, cfg.seed);

    auto passed = parallel_trials<char>(
        cfg.trials,
        [&](std::size_t t) {
            DeviceBank alice(tables), bob(tables);
            SeededRun run(derive_seed(cfg.seed, t));
            return static_cast<char>(ot_test_phase(alice, bob, cfg.eps_dd, run.view()).passed());
        },
        cfg.workers);

    std::size_t pass_count = 0;
    for (char p : passed) {
        pass_count += p;
    }
    bool want_pass = o.expect == "pass";
    std::size_t hits = want_pass ? pass_count : cfg.trials - pass_count;
    CommandResult r;
    auto c = rate_claim(want_pass ? "test_phase_good_pass" : "test_phase_bad_abort", 11,
                        want_pass ? "pass_rate" : "abort_rate", hits, cfg.trials, ">=", 0.99);
    c.detail = "n=" + std::to_string(n) + " device=" + cfg.device + " eps_dd=" + std::to_string(cfg.eps_dd);
    r.report.claims.push_back(c);
    r.report.points.push_back(PlotPoint::from_counts("test_phase_pass_rate", static_cast<double>(n), pass_count,
                                                     cfg.trials));
    r.detail = {{"n", n}, {"device", cfg.device}, {"eps_dd", cfg.eps_dd}, {"trials", cfg.trials},
                {"passed", pass_count}};
    stamp(r.report, sw.seconds());
    return r;
}

CommandResult compose_check(const CommandOptions &o) {
    Stopwatch sw;
    const auto &cfg = o.cfg;
    auto table = cfg.device_spec().table(cfg.seed);
    CommandResult r;

    if (!o.corrupt.empty()) {
        SimulationCase c;
        if (cfg.inner == "ot" && o.corrupt == "alice") {
            c = ot_corrupt_alice_case(cfg.ot_config(), table,
                                      std::shared_ptr<OTAliceStrategy>(make_ot_alice_strategy(cfg.strategy)));
        } else if (cfg.inner == "ot" && o.corrupt == "bob") {
            c = ot_corrupt_bob_case(cfg.ot_config(), table,
                                    std::shared_ptr<AdaptiveBobStrategy>(make_bob_strategy(cfg.strategy)));
        } else if (cfg.inner == "bc" && o.corrupt == "alice") {
            c = bc_corrupt_alice_case(cfg.bc_config(), table,
                                      std::shared_ptr<BCAliceStrategy>(make_alice_strategy(cfg.strategy)));
        } else if (cfg.inner == "bc" && o.corrupt == "bob") {
            c = bc_corrupt_bob_case(cfg.bc_config(), table,
                                    std::shared_ptr<AdaptiveBobStrategy>(make_bob_strategy(cfg.strategy)));
        } else {
            throw ConfigError("corrupt must be alice or bob, inner ot or bc");
        }
        auto rep = compare_with_simulator(c, cfg.mode, cfg.trials, cfg.seed);
        r.detail = rep.to_json();
        if (cfg.mode == EvalMode::ExactTinyN) {
            // At tiny n the exact distance is the protocol's own finite-size gap; it is reported, not judged.
            r.report.points.push_back({"simulator_distance:" + c.name, static_cast<double>(rep.n), rep.distance,
                                       rep.distance, rep.distance, {}, {}});
            stamp(r.report, sw.seconds());
            return r;
        }
        auto claim = make_claim("simulator:" + c.name, 12, "end_state_distance", rep.distance, "<=", 0.05);
        claim.trials = rep.trials;
        claim.detail = "strategy=" + cfg.strategy + " n=" + std::to_string(rep.n);
        r.report.claims.push_back(claim);
        stamp(r.report, sw.seconds());
        return r;
    }

    std::shared_ptr<const Implementation> impl;
    if (cfg.inner == "ot") {
        impl = std::make_shared<OTImplementation>(cfg.ot_config(), table);
    } else if (cfg.inner == "bc") {
        impl = std::make_shared<BCImplementation>(cfg.bc_config(), table);
    } else {
        throw ConfigError("inner must be ot or bc");
    }
    // Monte Carlo estimates of two one-norms each carry plug-in noise; exact mode needs none.
    double tol = cfg.mode == EvalMode::ExactTinyN ? 0 : 0.05;
    auto rep = msdi::compose_check(cfg.outer, impl, cfg.mode, cfg.trials, cfg.seed, tol);
    r.detail = rep.to_json();
    auto c = make_claim("compose:" + cfg.outer + "/" + cfg.inner, 12, "end_state_distance", rep.distance, "<=",
                        rep.budget());
    c.trials = rep.trials;
    c.detail = "per_call=" + std::to_string(rep.per_call_distance) + " calls=" + std::to_string(rep.calls);
    r.report.claims.push_back(c);
    r.report.points.push_back({"compose_distance", static_cast<double>(rep.calls), rep.distance, rep.distance,
                               rep.distance, {}, {}});
    stamp(r.report, sw.seconds());
    return r;
}

}  // namespace msdi::cli
