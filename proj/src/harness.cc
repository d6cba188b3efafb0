#include "msdi/harness.h"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <boost/math/distributions/binomial.hpp>

#include "msdi/errors.h"
#include "msdi/extract.h"

namespace msdi {

// ---- sizing ---------------------------------------------------------------------

double chernoff_bound(double epsilon, double mu) {
    return 2 * std::exp(-epsilon * epsilon * mu / 3);
}

std::size_t chernoff_trials(double epsilon, double mu_rate, double confidence) {
    auto open_unit = [](double v) { return v > 0 && v < 1; };
    if (!open_unit(epsilon) || !open_unit(mu_rate) || !open_unit(confidence)) {
        throw DegenerateParameters("chernoff_trials: epsilon, mu_rate and confidence must lie in (0, 1)");
    }
    double need = 3 * std::log(2 / (1 - confidence)) / (epsilon * epsilon * mu_rate);
    auto t = static_cast<std::size_t>(std::ceil(need));
    // Guard the rounding of the closed form.
    while (t > 1 && chernoff_bound(epsilon, mu_rate * static_cast<double>(t - 1)) <= 1 - confidence) {
        t--;
    }
    while (chernoff_bound(epsilon, mu_rate * static_cast<double>(t)) > 1 - confidence) {
        t++;
    }
    return std::max<std::size_t>(t, 1);
}

double azuma_bound(double s, std::size_t n, double c) {
    if (!(s >= 0) || n == 0 || !(c > 0)) {
        throw DegenerateParameters("azuma_bound: needs s >= 0, n >= 1, c > 0");
    }
    return std::exp(-s * s / (2 * static_cast<double>(n) * c * c));
}

std::pair<double, double> rate_interval(std::size_t successes, std::size_t trials, double confidence) {
    if (trials == 0 || successes > trials || !(confidence > 0 && confidence < 1)) {
        throw DegenerateParameters("rate_interval: needs 0 <= successes <= trials, trials > 0");
    }
    using boost::math::binomial_distribution;
    double alpha = (1 - confidence) / 2;
    auto n = static_cast<double>(trials), k = static_cast<double>(successes);
    double lo = successes == 0 ? 0.0 : binomial_distribution<>::find_lower_bound_on_p(n, k, alpha);
    double hi = successes == trials ? 1.0 : binomial_distribution<>::find_upper_bound_on_p(n, k, alpha);
    return {lo, hi};
}

// ---- devices ----------------------------------------------------------------------

DeviceSpec DeviceSpec::parse(const std::string &text) {
    DeviceSpec d;
    auto colon = text.find(':');
    std::string head = text.substr(0, colon);
    std::string rest = colon == std::string::npos ? "" : text.substr(colon + 1);
    auto number = [&](const std::string &s) {
        try {
            std::size_t used = 0;
            double v = std::stod(s, &used);
            if (used != s.size()) {
                throw std::invalid_argument(s);
            }
            return v;
        } catch (const std::exception &) {
            throw ConfigError("device '" + text + "': bad number '" + s + "'");
        }
    };
    if (head == "ideal" && rest.empty()) {
        return d;
    }
    if (head == "eps_near") {
        d.kind = Kind::EpsNear;
        auto c2 = rest.find(':');
        d.epsilon = number(rest.substr(0, c2));
        if (c2 != std::string::npos) {
            std::string m = rest.substr(c2 + 1);
            if (m == "noise") {
                d.mode = PerturbMode::EntryNoise;
            } else if (m != "uniform") {
                throw ConfigError("device '" + text + "': mode must be uniform or noise");
            }
        }
        if (!(d.epsilon >= 0 && d.epsilon <= 1)) {
            throw ConfigError("device '" + text + "': epsilon outside [0, 1]");
        }
        return d;
    }
    if (head == "robust") {
        d.kind = Kind::Robust;
        d.epsilon = number(rest);
        if (!(d.epsilon >= 0 && d.epsilon <= 0.5)) {
            throw ConfigError("device '" + text + "': eps_r outside [0, 1/2]");
        }
        return d;
    }
    if ((head == "iid_table" || head == "raw_table") && !rest.empty()) {
        d.kind = head == "iid_table" ? Kind::IidTable : Kind::RawTable;
        d.path = rest;
        return d;
    }
    throw ConfigError("unknown device '" + text + "'");
}

std::string DeviceSpec::str() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Ideal:
            return "ideal";
        case Kind::EpsNear:
            os << "eps_near:" << epsilon << (mode == PerturbMode::EntryNoise ? ":noise" : "");
            return os.str();
        case Kind::Robust:
            os << "robust:" << epsilon;
            return os.str();
        case Kind::IidTable:
            return "iid_table:" + path;
        case Kind::RawTable:
            return "raw_table:" + path;
    }
    return "";
}

namespace {

nlohmann::json read_json(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open " + path);
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::shared_ptr<const DeviceTable> checked_table(const nlohmann::json &j, const std::string &where) {
    try {
        auto t = table_from_json(j);
        validate_table(t, 1e-9);
        return std::make_shared<const DeviceTable>(t);
    } catch (const std::exception &e) {
        throw ConfigError(where + ": " + e.what());
    }
}

}  // namespace

std::shared_ptr<const DeviceTable> DeviceSpec::table(std::uint64_t seed) const {
    switch (kind) {
        case Kind::Ideal:
            return std::make_shared<const DeviceTable>(ideal_table());
        case Kind::EpsNear: {
            SeededRandom rng(seed);
            return std::make_shared<const DeviceTable>(perturb_table(ideal_table(), epsilon, mode, rng));
        }
        case Kind::Robust:
            return std::make_shared<const DeviceTable>(robust_table(epsilon));
        case Kind::IidTable:
            return checked_table(read_json(path), path);
        case Kind::RawTable:
            break;
    }
    throw ConfigError("raw_table devices differ per box; this command needs an iid device");
}

std::vector<std::shared_ptr<const DeviceTable>> DeviceSpec::tables(std::size_t n, std::uint64_t seed) const {
    if (iid()) {
        return std::vector<std::shared_ptr<const DeviceTable>>(n, table(seed));
    }
    auto j = read_json(path);
    if (!j.is_array() || j.size() != n) {
        throw ConfigError(path + ": expected an array of " + std::to_string(n) + " tables");
    }
    std::vector<std::shared_ptr<const DeviceTable>> out;
    for (std::size_t i = 0; i < n; i++) {
        out.push_back(checked_table(j[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
}

DeviceBank DeviceSpec::bank(std::size_t n, std::uint64_t seed) const {
    return DeviceBank(tables(n, seed));
}

// ---- run configuration --------------------------------------------------------------

EvalMode parse_mode(const std::string &s) {
    if (s == "exact") {
        return EvalMode::ExactTinyN;
    }
    if (s == "mc" || s == "monte_carlo") {
        return EvalMode::MonteCarlo;
    }
    throw ConfigError("mode must be exact or mc, got '" + s + "'");
}

RunConfig RunConfig::from_json(const nlohmann::json &j) {
    RunConfig c;
    try {
        c.version = j.at("version").get<int>();
        if (c.version != kSchemaVersion) {
            throw ConfigError("unsupported config version " + std::to_string(c.version));
        }
        auto get = [&](const char *key, auto &field) {
            if (j.contains(key)) {
                j.at(key).get_to(field);
            }
        };
        get("protocol", c.protocol);
        get("n", c.n);
        get("device", c.device);
        get("code", c.code);
        get("extractor", c.extractor);
        get("strategy", c.strategy);
        get("inner", c.inner);
        get("outer", c.outer);
        get("trials", c.trials);
        get("seed", c.seed);
        get("out", c.out);
        get("workers", c.workers);
        get("c_r", c.c_r);
        get("eps_dd", c.eps_dd);
        // Rates may be given as exact rational strings.
        for (auto [key, field] : {std::pair{"eps_r", &c.eps_r}, std::pair{"c_r", &c.c_r},
                                  std::pair{"eps_dd", &c.eps_dd}}) {
            if (j.contains(key)) {
                const auto &v = j.at(key);
                *field = v.is_string() ? to_double(parse_rational(v.get<std::string>())) : v.get<double>();
            }
        }
        if (j.contains("mode")) {
            c.mode = parse_mode(j.at("mode").get<std::string>());
        }
        if (j.contains("lambda") && !j.at("lambda").is_null()) {
            c.lambda = j.at("lambda").get<double>();
        }
        for (const auto &[key, v] : j.items()) {
            static const std::vector<std::string> known{
                "version", "protocol", "n",      "device",  "code",    "extractor", "eps_r",  "c_r",  "eps_dd",
                "strategy", "inner",   "outer",  "trials",  "seed",    "mode",      "out",    "workers", "lambda"};
            if (std::find(known.begin(), known.end(), key) == known.end()) {
                throw ConfigError("unknown config key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception &e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

RunConfig RunConfig::load(const std::string &path) {
    auto c = from_json(read_json(path));
    c.validate();
    return c;
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j{{"version", version}, {"protocol", protocol}, {"n", n},           {"device", device},
                     {"code", code},       {"extractor", extractor}, {"eps_r", eps_r}, {"c_r", c_r},
                     {"eps_dd", eps_dd},   {"strategy", strategy},   {"inner", inner}, {"outer", outer},
                     {"trials", trials},   {"seed", seed},           {"mode", mode == EvalMode::ExactTinyN ? "exact" : "mc"},
                     {"out", out},         {"workers", workers}};
    j["lambda"] = lambda ? nlohmann::json(*lambda) : nlohmann::json(nullptr);
    return j;
}

std::string auto_code(std::size_t len, double eps_r, double c_r) {
    if (len == 0) {
        throw ConfigError("auto code needs length >= 1");
    }
    std::size_t m = 1;
    while ((std::size_t{1} << m) - 1 < len) {
        m++;
    }
    for (std::size_t t = 1; 2 * t < len; t++) {
        std::string spec = "bch:" + std::to_string(m) + ":" + std::to_string(t) + ":" + std::to_string(len);
        LinearCode c = make_code(spec);
        if (c.k() == 0) {
            break;
        }
        if ((1 + c_r) * eps_r < static_cast<double>(c.d()) / (2 * static_cast<double>(len))) {
            return spec;
        }
    }
    // Too short for a BCH code with rate; repetition has the largest distance.
    if ((1 + c_r) * eps_r < 0.5) {
        return "repetition:" + std::to_string(len);
    }
    throw ConfigError("no BCH code of length " + std::to_string(len) + " meets the threshold for eps_r = " +
                      std::to_string(eps_r));
}

OTConfig RunConfig::ot_config() const {
    if (code == "auto" && n == 0) {
        throw ConfigError("code auto needs n");
    }
    auto spec = code == "auto" ? auto_code(n, eps_r, c_r) : code;
    auto cfg = OTConfig::make(std::make_shared<const LinearCode>(make_code(spec)), eps_r, c_r);
    if (n != 0 && n != cfg.n) {
        throw ConfigError("n = " + std::to_string(n) + " but code " + code + " has length " + std::to_string(cfg.n));
    }
    cfg.validate();
    return cfg;
}

BCConfig RunConfig::bc_config() const {
    if (code == "auto" && (n == 0 || n % 3 != 0)) {
        throw ConfigError("code auto needs n divisible by 3");
    }
    auto spec = code == "auto" ? auto_code(n / 3, eps_r, c_r) : code;
    auto cfg = BCConfig::make(std::make_shared<const LinearCode>(make_code(spec)), eps_r, c_r);
    cfg.ext = make_ext3(extractor);
    if (n != 0 && n != cfg.n) {
        throw ConfigError("n = " + std::to_string(n) + " but three blocks of " + code + " give " +
                          std::to_string(cfg.n));
    }
    cfg.validate();
    return cfg;
}

void RunConfig::validate() const {
    if (version != kSchemaVersion) {
        throw ConfigError("unsupported config version " + std::to_string(version));
    }
    device_spec();
    if (!(eps_r >= 0 && eps_r < 1) || !(c_r >= 0) || !(eps_dd > 0 && eps_dd < 0.5)) {
        throw ConfigError("rates out of range: need 0 <= eps_r < 1, c_r >= 0, 0 < eps_dd < 1/2");
    }
    if (mode == EvalMode::MonteCarlo && trials == 0) {
        throw ConfigError("Monte Carlo runs need trials > 0");
    }
    try {
        if (protocol == "ot") {
            ot_config();
        } else if (protocol == "bc") {
            bc_config();
        } else if (protocol == "compose") {
            if (inner == "ot") {
                ot_config();
            } else if (inner == "bc") {
                bc_config();
            } else {
                throw ConfigError("inner must be ot or bc");
            }
        } else if (protocol != "test-phase" && protocol != "ms-facts") {
            throw ConfigError("unknown protocol '" + protocol + "'");
        }
    } catch (const ConfigError &) {
        throw;
    } catch (const std::exception &e) {
        throw ConfigError(e.what());
    }
}

// ---- reports ------------------------------------------------------------------------

bool compare(double value, const std::string &cmp, double threshold) {
    if (cmp == "<=") {
        return value <= threshold;
    }
    if (cmp == "<") {
        return value < threshold;
    }
    if (cmp == ">=") {
        return value >= threshold;
    }
    if (cmp == ">") {
        return value > threshold;
    }
    if (cmp == "==") {
        return value == threshold;
    }
    throw std::invalid_argument("unknown comparator " + cmp);
}

ClaimResult make_claim(std::string claim, int criterion, std::string statistic, double value, std::string comparator,
                       double threshold) {
    ClaimResult c;
    c.claim = std::move(claim);
    c.criterion = criterion;
    c.statistic = std::move(statistic);
    c.value = value;
    c.comparator = std::move(comparator);
    c.threshold = threshold;
    c.pass = compare(value, c.comparator, threshold);
    return c;
}

ClaimResult rate_claim(std::string claim, int criterion, std::string statistic, std::size_t successes,
                       std::size_t trials, std::string comparator, double threshold) {
    auto c = make_claim(std::move(claim), criterion, std::move(statistic),
                        static_cast<double>(successes) / static_cast<double>(trials), std::move(comparator),
                        threshold);
    std::tie(c.ci_lo, c.ci_hi) = rate_interval(successes, trials);
    c.trials = trials;
    return c;
}

nlohmann::json ClaimResult::to_json() const {
    nlohmann::json j{{"claim", claim},       {"criterion", criterion}, {"statistic", statistic},
                     {"value", value},       {"comparator", comparator}, {"threshold", threshold},
                     {"verdict", pass ? "pass" : "fail"}, {"trials", trials}, {"runtime_s", runtime_s}};
    j["ci_lo"] = ci_lo ? nlohmann::json(*ci_lo) : nlohmann::json(nullptr);
    j["ci_hi"] = ci_hi ? nlohmann::json(*ci_hi) : nlohmann::json(nullptr);
    if (!detail.empty()) {
        j["detail"] = detail;
    }
    return j;
}

ClaimResult ClaimResult::from_json(const nlohmann::json &j) {
    ClaimResult c;
    c.claim = j.at("claim").get<std::string>();
    c.criterion = j.at("criterion").get<int>();
    c.statistic = j.at("statistic").get<std::string>();
    c.value = j.at("value").get<double>();
    c.comparator = j.at("comparator").get<std::string>();
    c.threshold = j.at("threshold").get<double>();
    c.pass = j.at("verdict").get<std::string>() == "pass";
    c.trials = j.value("trials", std::size_t{0});
    c.runtime_s = j.value("runtime_s", 0.0);
    if (j.contains("ci_lo") && !j["ci_lo"].is_null()) {
        c.ci_lo = j["ci_lo"].get<double>();
    }
    if (j.contains("ci_hi") && !j["ci_hi"].is_null()) {
        c.ci_hi = j["ci_hi"].get<double>();
    }
    c.detail = j.value("detail", std::string());
    return c;
}

nlohmann::json PlotPoint::to_json() const {
    nlohmann::json j{{"claim", claim}, {"x", x}, {"y", y}, {"ci_lo", ci_lo}, {"ci_hi", ci_hi}};
    if (successes && trials) {
        j["successes"] = *successes;
        j["trials"] = *trials;
    }
    return j;
}

PlotPoint PlotPoint::from_json(const nlohmann::json &j) {
    PlotPoint p;
    p.claim = j.at("claim").get<std::string>();
    p.x = j.at("x").get<double>();
    if (j.contains("successes") && j.contains("trials")) {
        return from_counts(p.claim, p.x, j["successes"].get<std::size_t>(), j["trials"].get<std::size_t>());
    }
    p.y = j.at("y").get<double>();
    p.ci_lo = j.value("ci_lo", p.y);
    p.ci_hi = j.value("ci_hi", p.y);
    return p;
}

PlotPoint PlotPoint::from_counts(std::string claim, double x, std::size_t successes, std::size_t trials) {
    PlotPoint p;
    p.claim = std::move(claim);
    p.x = x;
    p.successes = successes;
    p.trials = trials;
    p.y = static_cast<double>(successes) / static_cast<double>(trials);
    std::tie(p.ci_lo, p.ci_hi) = rate_interval(successes, trials);
    return p;
}

bool Report::all_pass() const {
    return std::all_of(claims.begin(), claims.end(), [](const ClaimResult &c) { return c.pass; });
}

void Report::write_jsonl(std::ostream &os) const {
    for (const auto &c : claims) {
        auto j = c.to_json();
        j["type"] = "claim";
        os << j.dump() << '\n';
    }
    for (const auto &p : points) {
        auto j = p.to_json();
        j["type"] = "point";
        os << j.dump() << '\n';
    }
}

void Report::merge_jsonl(std::istream &is) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        lineno++;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
            auto type = j.at("type").get<std::string>();
            if (type == "claim") {
                claims.push_back(ClaimResult::from_json(j));
                continue;
            }
            if (type != "point") {
                throw ConfigError("unknown record type '" + type + "'");
            }
        } catch (const nlohmann::json::exception &e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
        auto p = PlotPoint::from_json(j);
        auto same = std::find_if(points.begin(), points.end(), [&](const PlotPoint &q) {
            return q.claim == p.claim && q.x == p.x && q.trials && p.trials;
        });
        if (same != points.end()) {
            *same = PlotPoint::from_counts(p.claim, p.x, *same->successes + *p.successes, *same->trials + *p.trials);
        } else {
            points.push_back(p);
        }
    }
    std::sort(points.begin(), points.end(), [](const PlotPoint &a, const PlotPoint &b) {
        return std::tie(a.claim, a.x) < std::tie(b.claim, b.x);
    });
}

namespace {

std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char ch : s) {
        out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    }
    return out + "\"";
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

}  // namespace

std::string Report::summary_csv() const {
    std::string out = "claim,criterion,statistic,value,ci_lo,ci_hi,comparator,threshold,trials,runtime_s,verdict\n";
    for (const auto &c : claims) {
        out += csv_field(c.claim) + "," + std::to_string(c.criterion) + "," + csv_field(c.statistic) + "," +
               num(c.value) + "," + (c.ci_lo ? num(*c.ci_lo) : "") + "," + (c.ci_hi ? num(*c.ci_hi) : "") + "," +
               c.comparator + "," + num(c.threshold) + "," + std::to_string(c.trials) + "," + num(c.runtime_s) + "," +
               (c.pass ? "pass" : "fail") + "\n";
    }
    return out;
}

std::string Report::plot_csv() const {
    std::string out = "claim,x,y,ci_lo,ci_hi\n";
    for (const auto &p : points) {
        out += csv_field(p.claim) + "," + num(p.x) + "," + num(p.y) + "," + num(p.ci_lo) + "," + num(p.ci_hi) + "\n";
    }
    return out;
}

// ---- Magic Square checks ----------------------------------------------------------

std::vector<ClaimResult> ms_fact_checks() {
    auto t = ideal_table_exact();
    std::vector<ClaimResult> out;
    auto exact_claim = [&](std::string name, int criterion, std::size_t checked, std::size_t bad) {
        auto c = make_claim(std::move(name), criterion, "mismatches", static_cast<double>(bad), "==", 0);
        c.trials = checked;
        out.push_back(c);
    };

    std::size_t checked = 0, bad = 0;
    for (int x = 0; x < 3; x++) {
        for (int y = 0; y < 3; y++) {
            for (int ai = 0; ai < 4; ai++) {
                for (int bi = 0; bi < 4; bi++) {
                    bool win = ms_predicate(AnswerA::from_index(ai), AnswerB::from_index(bi), Trit(x), Trit(y));
                    checked++;
                    bad += t.at(x, y, ai, bi) != (win ? Rational(1, 8) : Rational(0));
                }
            }
        }
    }
    exact_claim("ideal_entries", 1, checked, bad);

    checked = bad = 0;
    for (int fixed = 0; fixed < 3; fixed++) {
        for (int o1 = 0; o1 < 3; o1++) {
            for (int o2 = o1 + 1; o2 < 3; o2++) {
                Given a1, a2, b1, b2;
                a1.x = a2.x = Trit(fixed);
                a1.y = Trit(o1);
                a2.y = Trit(o2);
                b1.y = b2.y = Trit(fixed);
                b1.x = Trit(o1);
                b2.x = Trit(o2);
                checked += 2;
                bad += one_norm(conditional(t, a1).marginal({"a"}), conditional(t, a2).marginal({"a"})) != 0;
                bad += one_norm(conditional(t, b1).marginal({"b"}), conditional(t, b2).marginal({"b"})) != 0;
            }
        }
    }
    exact_claim("no_signalling_marginals", 1, checked, bad);

    checked = bad = 0;
    for (int y = 0; y < 3; y++) {
        for (int bi = 0; bi < 4; bi++) {
            AnswerB b = AnswerB::from_index(bi);
            if (b.all_ones()) {
                continue;
            }
            Given g;
            g.y = Trit(y);
            g.b = b;
            auto m = conditional(t, g).marginal({"a"});
            for (int ai = 0; ai < 4; ai++) {
                AnswerA a = AnswerA::from_index(ai);
                checked++;
                bad += m.prob({static_cast<std::int64_t>(a.mask())}) != (a.bit(y) ? Rational(1, 6) : Rational(2, 6));
            }
        }
    }
    exact_claim("common_bit_conditionals", 1, checked, bad);

    checked = bad = 0;
    for (int x = 0; x < 3; x++) {
        for (int y = 0; y < 3; y++) {
            for (int i = 0; i < 4; i++) {
                Given ga;
                ga.x = Trit(x);
                ga.y = Trit(y);
                ga.a = AnswerA::from_index(i);
                Given gb = ga;
                gb.a.reset();
                gb.b = AnswerB::from_index(i);
                auto cb = conditional(t, ga);
                auto ca = conditional(t, gb);
                for (int other = 0; other < 3; other++) {
                    if (other != x) {
                        Rational zero = 0;
                        for (const auto &[o, p] : cb.entries()) {
                            zero += AnswerB::from_mask(static_cast<unsigned>(o[0])).bit(other) ? Rational(0) : p;
                        }
                        checked++;
                        bad += zero != Rational(1, 2);
                    }
                    if (other != y) {
                        Rational zero = 0;
                        for (const auto &[o, p] : ca.entries()) {
                            zero += AnswerA::from_mask(static_cast<unsigned>(o[0])).bit(other) ? Rational(0) : p;
                        }
                        checked++;
                        bad += zero != Rational(1, 2);
                    }
                }
            }
        }
    }
    exact_claim("uncommon_bit_half", 1, checked, bad);

    auto cv = classical_value_oracle();
    auto c = make_claim("classical_value", 2, "value", to_double(cv.value), "==", 8.0 / 9.0);
    c.pass = cv.value == Rational(8, 9);
    c.detail = "exact " + to_string(cv.value);
    out.push_back(c);
    return out;
}

}  // namespace msdi
