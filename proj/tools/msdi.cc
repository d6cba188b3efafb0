#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "commands.h"
#include "msdi/errors.h"

namespace fs = std::filesystem;
using namespace msdi;
using namespace msdi::cli;

namespace {

struct Flags {
    std::string config, mode, out, device, code, extractor, strategy, inner, outer;
    std::uint64_t seed = 0;
    std::size_t trials = 0, n = 0, workers = 0;
    double eps_r = 0, c_r = 0, eps_dd = 0;
    bool assert_verdicts = false;
    CommandOptions opts;
    std::vector<std::string> inputs;
};

void write_outputs(const std::string &dir, const std::string &name, const CommandResult &r) {
    fs::create_directories(dir);
    std::ofstream jl(fs::path(dir) / (name + ".jsonl"));
    r.report.write_jsonl(jl);
    std::ofstream(fs::path(dir) / (name + ".json")) << r.detail.dump(2) << '\n';
    std::ofstream(fs::path(dir) / "summary.csv") << r.report.summary_csv();
    std::ofstream(fs::path(dir) / "plot.csv") << r.report.plot_csv();
    if (!r.runs.empty()) {
        std::ofstream runs(fs::path(dir) / (name + ".runs.jsonl"));
        for (const auto &j : r.runs) {
            runs << j.dump() << '\n';
        }
    }
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Magic Square device-independent OT and bit commitment toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    Flags f;

    std::map<std::string, CLI::Option *> opt;
    opt["config"] = app.add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
    opt["seed"] = app.add_option("--seed", f.seed, "master seed");
    opt["trials"] = app.add_option("--trials", f.trials, "Monte Carlo trials");
    opt["mode"] = app.add_option("--mode", f.mode, "exact | mc");
    opt["out"] = app.add_option("--out", f.out, "output directory for JSON-lines and CSV");
    opt["n"] = app.add_option("--n", f.n, "number of devices");
    opt["device"] = app.add_option("--device", f.device, "ideal | eps_near:E[:uniform|noise] | robust:E | "
                                                         "iid_table:PATH | raw_table:PATH");
    opt["code"] = app.add_option("--code", f.code, "code spec, or auto");
    opt["extractor"] = app.add_option("--extractor", f.extractor, "BC three-source extractor");
    opt["eps_r"] = app.add_option("--eps-r", f.eps_r, "device error rate the protocol tolerates");
    opt["c_r"] = app.add_option("--c-r", f.c_r, "reveal slack factor");
    opt["eps_dd"] = app.add_option("--eps-dd", f.eps_dd, "test-phase error threshold");
    opt["strategy"] = app.add_option("--strategy", f.strategy, "adversary strategy");
    opt["inner"] = app.add_option("--inner", f.inner, "ot | bc");
    opt["outer"] = app.add_option("--outer", f.outer, "toy-g | toy-g2 | toy-commit | no-calls");
    opt["workers"] = app.add_option("--workers", f.workers, "worker threads");
    app.add_flag("--assert", f.assert_verdicts, "exit 1 if any verdict fails");
    app.add_option("--expect", f.opts.expect, "test-phase: pass | abort")->check(CLI::IsMember({"pass", "abort"}));
    app.add_option("--corrupt", f.opts.corrupt, "compose-check: alice | bob")->check(CLI::IsMember({"alice", "bob"}));
    app.add_flag("--log-runs", f.opts.log_runs, "write per-run records");

    using Command = CommandResult (*)(const CommandOptions &);
    std::map<std::string, std::pair<std::string, Command>> commands{
        {"ms-facts", {"ms-facts", cli::ms_facts}},
        {"ot-run", {"ot", cli::ot_run}},
        {"ot-security", {"ot", cli::ot_security}},
        {"bc-run", {"bc", cli::bc_run}},
        {"bc-hiding", {"bc", cli::bc_hiding}},
        {"bc-binding", {"bc", cli::bc_binding}},
        {"test-phase", {"test-phase", cli::test_phase}},
        {"compose-check", {"compose", cli::compose_check}},
    };
    std::map<std::string, std::string> help{
        {"ms-facts", "exact checks of the ideal Magic Square device and the classical value"},
        {"ot-run", "honest OT runs over all inputs; failure rate"},
        {"ot-security", "sender security against an adaptive Bob"},
        {"bc-run", "honest commit and reveal; bottom and flip rates"},
        {"bc-hiding", "hiding against an adaptive Bob"},
        {"bc-binding", "binding against cheating-Alice strategies"},
        {"test-phase", "device test pass or abort rate"},
        {"compose-check", "end-state distance of a composed protocol or a simulator"},
    };
    for (const auto &[name, _] : commands) {
        app.add_subcommand(name, help[name]);
    }
    auto *report = app.add_subcommand("report", "merge JSON-lines reports into CSV summaries");
    report->add_option("inputs", f.inputs, "JSON-lines files")->required()->check(CLI::ExistingFile);

    CLI11_PARSE(app, argc, argv);

    try {
        if (report->parsed()) {
            Report merged;
            for (const auto &path : f.inputs) {
                std::ifstream in(path);
                merged.merge_jsonl(in);
            }
            for (const auto &c : merged.claims) {
                std::cout << claim_line(c) << '\n';
            }
            if (!f.out.empty()) {
                fs::create_directories(f.out);
                std::ofstream(fs::path(f.out) / "summary.csv") << merged.summary_csv();
                std::ofstream(fs::path(f.out) / "plot.csv") << merged.plot_csv();
                std::ofstream jl(fs::path(f.out) / "merged.jsonl");
                merged.write_jsonl(jl);
            } else {
                std::cout << merged.summary_csv() << merged.plot_csv();
            }
            return f.assert_verdicts && !merged.all_pass() ? 1 : 0;
        }

        std::string sub = app.get_subcommands().front()->get_name();
        const auto &[protocol, run] = commands.at(sub);
        RunConfig &cfg = f.opts.cfg;
        if (!f.config.empty()) {
            cfg = RunConfig::from_json(nlohmann::json::parse(std::ifstream(f.config)));
        }
        cfg.protocol = protocol;
        auto given = [&](const char *k) { return opt.at(k)->count() > 0; };
        if (given("seed")) cfg.seed = f.seed;
        if (given("trials")) cfg.trials = f.trials;
        if (given("mode")) cfg.mode = parse_mode(f.mode);
        if (given("out")) cfg.out = f.out;
        if (given("n")) cfg.n = f.n;
        if (given("device")) cfg.device = f.device;
        if (given("code")) cfg.code = f.code;
        else if (given("n") && f.config.empty()) cfg.code = "auto";
        if (given("extractor")) cfg.extractor = f.extractor;
        if (given("eps_r")) cfg.eps_r = f.eps_r;
        if (given("c_r")) cfg.c_r = f.c_r;
        if (given("eps_dd")) cfg.eps_dd = f.eps_dd;
        if (given("strategy")) cfg.strategy = f.strategy;
        if (given("inner")) cfg.inner = f.inner;
        if (given("outer")) cfg.outer = f.outer;
        if (given("workers")) cfg.workers = f.workers;
        cfg.validate();

        auto result = run(f.opts);
        for (const auto &c : result.report.claims) {
            std::cout << claim_line(c) << '\n';
        }
        for (const auto &p : result.report.points) {
            std::cout << "point " << p.claim << " x=" << p.x << " y=" << p.y << " [" << p.ci_lo << ", " << p.ci_hi
                      << "]\n";
        }
        if (!cfg.out.empty()) {
            write_outputs(cfg.out, sub, result);
            std::ofstream(fs::path(cfg.out) / (sub + ".config.json")) << cfg.to_json().dump(2) << '\n';
        }
        return f.assert_verdicts && !result.report.all_pass() ? 1 : 0;
    } catch (const ConfigError &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
