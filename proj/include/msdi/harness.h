#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "msdi/adversary.h"
#include "msdi/bc.h"
#include "msdi/msdevice.h"
#include "msdi/ot.h"

namespace msdi {

// ---- sizing ---------------------------------------------------------------------

/// 2 exp(-eps^2 mu / 3).
double chernoff_bound(double epsilon, double mu);
/// Smallest T with 2 exp(-eps^2 (mu_rate T) / 3) <= 1 - confidence.
/// DegenerateParameters unless all three lie in (0, 1).
std::size_t chernoff_trials(double epsilon, double mu_rate, double confidence);
/// exp(-s^2 / (2 n c^2)); 1 at s = 0. DegenerateParameters on s < 0, n = 0 or c <= 0.
double azuma_bound(double s, std::size_t n, double c);

/// Two-sided Clopper-Pearson interval for a binomial rate.
std::pair<double, double> rate_interval(std::size_t successes, std::size_t trials, double confidence = 0.95);

// ---- devices ----------------------------------------------------------------------

/// ideal | eps_near:E[:uniform|noise] | robust:E | iid_table:PATH | raw_table:PATH.
/// eps_near is sup-norm distance E from ideal; robust has game value 1 - E;
/// iid_table reads one table used on every box; raw_table reads a JSON array
/// holding one table per box.
struct DeviceSpec {
    enum class Kind { Ideal, EpsNear, Robust, IidTable, RawTable };
    Kind kind = Kind::Ideal;
    double epsilon = 0;
    PerturbMode mode = PerturbMode::UniformMix;
    std::string path;

    static DeviceSpec parse(const std::string &text);
    std::string str() const;
    bool iid() const { return kind != Kind::RawTable; }
    /// Table shared by every box; `seed` drives noise perturbation. ConfigError for raw_table.
    std::shared_ptr<const DeviceTable> table(std::uint64_t seed = 0) const;
    std::vector<std::shared_ptr<const DeviceTable>> tables(std::size_t n, std::uint64_t seed = 0) const;
    DeviceBank bank(std::size_t n, std::uint64_t seed = 0) const;
};

// ---- run configuration --------------------------------------------------------------

struct RunConfig {
    static constexpr int kSchemaVersion = 1;

    int version = kSchemaVersion;
    /// ot | bc | test-phase | compose | ms-facts
    std::string protocol = "ot";
    /// 0 means the code's length (OT) or three times it (BC).
    std::size_t n = 0;
    std::string device = "ideal";
    /// Code spec, or "auto" for the lightest BCH code meeting the OT threshold at length n (n/3 for BC).
    std::string code = "hamming74";
    /// BC only; OT always hashes with Toeplitz matrices.
    std::string extractor = "trilinear";
    double eps_r = 1e-3;
    double c_r = 0.5;
    /// Test-phase error threshold.
    double eps_dd = 0.05;
    std::string strategy = "honest";
    std::string inner = "ot", outer = "toy-g";
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    EvalMode mode = EvalMode::MonteCarlo;
    std::string out;
    std::size_t workers = 1;
    /// Security parameter, carried into reports only.
    std::optional<double> lambda;

    static RunConfig from_json(const nlohmann::json &j);
    static RunConfig load(const std::string &path);
    nlohmann::json to_json() const;

    /// ConfigError on any inconsistency, including the OT/BC parameter inequalities.
    void validate() const;
    OTConfig ot_config() const;
    BCConfig bc_config() const;
    DeviceSpec device_spec() const { return DeviceSpec::parse(device); }
};

EvalMode parse_mode(const std::string &s);

/// "bch:M:T:len" with the smallest T such that (1 + c_r) eps_r < d / (2 len); "repetition:len" when no
/// BCH code of positive dimension qualifies. ConfigError if neither does.
std::string auto_code(std::size_t len, double eps_r, double c_r);

// ---- reports ------------------------------------------------------------------------

struct ClaimResult {
    std::string claim;
    /// Acceptance criterion this verdict addresses.
    int criterion = 0;
    std::string statistic;
    double value = 0;
    std::optional<double> ci_lo, ci_hi;
    std::string comparator = "<=";
    double threshold = 0;
    bool pass = false;
    std::size_t trials = 0;
    double runtime_s = 0;
    std::string detail;

    nlohmann::json to_json() const;
    static ClaimResult from_json(const nlohmann::json &j);
};

/// value <cmp> threshold for cmp in <=, <, >=, >, ==.
bool compare(double value, const std::string &cmp, double threshold);
ClaimResult make_claim(std::string claim, int criterion, std::string statistic, double value, std::string comparator,
                       double threshold);
/// Claim on a rate successes/trials with its Clopper-Pearson interval.
ClaimResult rate_claim(std::string claim, int criterion, std::string statistic, std::size_t successes,
                       std::size_t trials, std::string comparator, double threshold);

/// One row of plot-ready output. Rows carrying counts merge by summing them.
struct PlotPoint {
    std::string claim;
    double x = 0, y = 0, ci_lo = 0, ci_hi = 0;
    std::optional<std::size_t> successes, trials;

    nlohmann::json to_json() const;
    static PlotPoint from_json(const nlohmann::json &j);
    static PlotPoint from_counts(std::string claim, double x, std::size_t successes, std::size_t trials);
};

struct Report {
    std::vector<ClaimResult> claims;
    std::vector<PlotPoint> points;

    bool all_pass() const;
    /// One JSON object per line: {"type":"claim",...} or {"type":"point",...}.
    void write_jsonl(std::ostream &os) const;
    /// Adds every record of a JSON-lines stream. Points with counts and the
    /// same (claim, x) are merged, so the result does not depend on the order
    /// or grouping of the inputs.
    void merge_jsonl(std::istream &is);
    std::string summary_csv() const;
    std::string plot_csv() const;
};

// ---- Magic Square checks ----------------------------------------------------------

/// Exact checks of the ideal device: entries, no-signalling marginals,
/// common-bit conditionals, uncommon-bit entropy and the classical value.
std::vector<ClaimResult> ms_fact_checks();

}  // namespace msdi
