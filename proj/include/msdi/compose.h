#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "msdi/adversary.h"
#include "msdi/bc.h"
#include "msdi/distribution.h"
#include "msdi/ot.h"
#include "msdi/transport.h"

namespace msdi {

// ---- end states -------------------------------------------------------------

/// Register name -> printed value.
using EndState = std::map<std::string, std::string>;

/// Law of end states restricted to a fixed register list.
template <class P>
class EndStateLaw {
   public:
    using Key = std::vector<std::string>;

    EndStateLaw() = default;
    explicit EndStateLaw(std::vector<std::string> registers) : regs_(std::move(registers)) {
    }

    const std::vector<std::string> &registers() const { return regs_; }
    const std::map<Key, P> &entries() const { return probs_; }

    void add(const EndState &s, const P &p) {
        Key k;
        k.reserve(regs_.size());
        for (const auto &r : regs_) {
            auto it = s.find(r);
            if (it == s.end()) {
                throw RegisterMismatch("end state has no register " + r);
            }
            k.push_back(it->second);
        }
        add_key(std::move(k), p);
    }

    P total() const {
        P t = 0;
        for (const auto &[k, p] : probs_) {
            t += p;
        }
        return t;
    }

    EndStateLaw restrict_to(const std::vector<std::string> &keep) const {
        std::vector<std::size_t> idx;
        for (const auto &r : keep) {
            auto it = std::find(regs_.begin(), regs_.end(), r);
            if (it == regs_.end()) {
                throw RegisterMismatch("law has no register " + r);
            }
            idx.push_back(static_cast<std::size_t>(it - regs_.begin()));
        }
        EndStateLaw out(keep);
        for (const auto &[k, p] : probs_) {
            Key kk;
            for (auto i : idx) {
                kk.push_back(k[i]);
            }
            out.add_key(std::move(kk), p);
        }
        return out;
    }

    EndStateLaw normalized() const {
        P t = total();
        if (t == 0) {
            throw ZeroProbabilityEvent("normalizing an empty end-state law");
        }
        EndStateLaw out(regs_);
        for (const auto &[k, p] : probs_) {
            out.probs_.emplace(k, p / t);
        }
        return out;
    }

   private:
    void add_key(Key k, const P &p) {
        if (p == 0) {
            return;
        }
        auto [it, inserted] = probs_.try_emplace(std::move(k), p);
        if (!inserted) {
            it->second += p;
        }
    }
    std::vector<std::string> regs_;
    std::map<Key, P> probs_;
};

using ExactEndLaw = EndStateLaw<Rational>;
using EmpiricalEndLaw = EndStateLaw<double>;

/// One-norm between the two laws restricted to `registers`.
template <class P>
P end_state_distance(const EndStateLaw<P> &a, const EndStateLaw<P> &b, const std::vector<std::string> &registers) {
    auto ra = a.restrict_to(registers);
    auto rb = b.restrict_to(registers);
    P acc = 0;
    auto i = ra.entries().begin(), j = rb.entries().begin();
    auto ie = ra.entries().end(), je = rb.entries().end();
    while (i != ie || j != je) {
        if (j == je || (i != ie && i->first < j->first)) {
            acc += abs_value(i->second);
            ++i;
        } else if (i == ie || j->first < i->first) {
            acc += abs_value(j->second);
            ++j;
        } else {
            acc += abs_value(P(i->second - j->second));
            ++i;
            ++j;
        }
    }
    return acc;
}

/// Exact law of f's end state, enumerating every path of its randomness.
ExactEndLaw exact_end_law(const std::function<EndState(RunRandomness)> &f, const std::vector<std::string> &registers);
/// Empirical law over `trials` runs seeded from derive_seed(seed, t).
EmpiricalEndLaw sampled_end_law(const std::function<EndState(RunRandomness)> &f,
                                const std::vector<std::string> &registers, std::size_t trials, std::uint64_t seed);

/// Declared registers of a protocol or simulation case. `full` is compared in
/// exact mode; `summary` (low-dimensional, derived from the full record) in
/// Monte Carlo mode.
struct RegisterSet {
    std::vector<std::string> full;
    std::vector<std::string> summary;
};
/// "ot", "bc", "toy", "ot.corrupt_alice", "ot.corrupt_bob", "bc.corrupt_alice", "bc.corrupt_bob".
const RegisterSet &registers_of(const std::string &name);
std::vector<std::string> register_registry();

// ---- functionalities ----------------------------------------------------------

struct PhaseSignature {
    std::string name;
    std::size_t alice_inputs = 0;  // bits
    std::size_t bob_inputs = 0;
    bool operator==(const PhaseSignature &) const = default;
};

class Functionality {
   public:
    /// (phase, Alice's inputs, Bob's inputs, memory) -> (O_A, O_B); inputs are already checked.
    using Rule = std::function<std::pair<Token, Token>(std::size_t, const std::vector<bool> &,
                                                       const std::vector<bool> &, std::vector<bool> &)>;

    Functionality(std::string name, std::vector<PhaseSignature> phases, Rule rule)
        : name_(std::move(name)), phases_(std::move(phases)), rule_(std::move(rule)) {
    }
    const std::string &name() const { return name_; }
    const std::vector<PhaseSignature> &phases() const { return phases_; }

    /// One use of the functionality; phases are called in order, once each.
    class Session {
       public:
        explicit Session(const Functionality &f) : f_(&f) {
        }
        /// Malformed inputs give (bot, bot). If alice_abort is bot, O_B = bot in
        /// this and every later phase.
        std::pair<Token, Token> call(std::size_t phase, const std::vector<Token> &alice,
                                     const std::vector<Token> &bob, Token alice_abort = Token::empty());
        std::size_t next_phase() const { return next_; }

       private:
        const Functionality *f_;
        std::size_t next_ = 0;
        bool aborted_ = false;
        std::vector<bool> memory_;
    };
    Session open() const { return Session(*this); }

   private:
    std::string name_;
    std::vector<PhaseSignature> phases_;
    Rule rule_;
};

/// Single phase: Alice (s0, s1), Bob d; O_A = eps, O_B = s_d.
Functionality ideal_ot();
/// Commit: Alice d, both get eps. Reveal: no inputs, O_A = eps, O_B = d.
Functionality ideal_bc();
/// "ot" or "bc".
Functionality functionality_by_name(const std::string &name);

std::vector<Token> bits_to_tokens(const std::vector<bool> &bits);

// ---- oracle-aided protocols ------------------------------------------------------

/// Serves one oracle call site for one run.
class OracleSession {
   public:
    virtual ~OracleSession() = default;
    virtual std::pair<Token, Token> call(std::size_t phase, const std::vector<Token> &alice,
                                         const std::vector<Token> &bob) = 0;
};

/// Something that can stand in for IDEAL(f): the functionality itself or a concrete protocol.
class Implementation {
   public:
    virtual ~Implementation() = default;
    virtual std::string name() const = 0;
    /// Name of the functionality it realizes.
    virtual std::string implements() const = 0;
    virtual std::vector<PhaseSignature> signature() const = 0;
    virtual bool concrete() const { return true; }
    /// Events of concrete runs are appended to `log`.
    virtual std::unique_ptr<OracleSession> open(RunRandomness rng, Transcript &log) const = 0;
};

class IdealImplementation final : public Implementation {
   public:
    explicit IdealImplementation(Functionality f) : f_(std::move(f)) {
    }
    std::string name() const override { return "ideal_" + f_.name(); }
    std::string implements() const override { return f_.name(); }
    std::vector<PhaseSignature> signature() const override { return f_.phases(); }
    bool concrete() const override { return false; }
    std::unique_ptr<OracleSession> open(RunRandomness rng, Transcript &log) const override;

   private:
    Functionality f_;
};

/// Honest OT over the transport, fresh devices per call.
class OTImplementation final : public Implementation {
   public:
    OTImplementation(OTConfig cfg, std::shared_ptr<const DeviceTable> table)
        : cfg_(std::move(cfg)), table_(std::move(table)) {
    }
    std::string name() const override { return "ot_protocol"; }
    std::string implements() const override { return "ot"; }
    std::vector<PhaseSignature> signature() const override { return ideal_ot().phases(); }
    std::unique_ptr<OracleSession> open(RunRandomness rng, Transcript &log) const override;
    const OTConfig &config() const { return cfg_; }

   private:
    OTConfig cfg_;
    std::shared_ptr<const DeviceTable> table_;
};

/// Honest BC, fresh devices per call.
class BCImplementation final : public Implementation {
   public:
    BCImplementation(BCConfig cfg, std::shared_ptr<const DeviceTable> table)
        : cfg_(std::move(cfg)), table_(std::move(table)) {
    }
    std::string name() const override { return "bc_protocol"; }
    std::string implements() const override { return "bc"; }
    std::vector<PhaseSignature> signature() const override { return ideal_bc().phases(); }
    std::unique_ptr<OracleSession> open(RunRandomness rng, Transcript &log) const override;
    const BCConfig &config() const { return cfg_; }

   private:
    BCConfig cfg_;
    std::shared_ptr<const DeviceTable> table_;
};

struct CallSite {
    std::string functionality;
    std::vector<PhaseSignature> signature;
};

/// Gives the protocol body access to its call sites.
class OracleAccess {
   public:
    virtual ~OracleAccess() = default;
    virtual OracleSession &site(std::size_t i) = 0;
};

/// A two-party protocol that uses ideal functionalities as subroutines.
class OracleAidedProtocol {
   public:
    virtual ~OracleAidedProtocol() = default;
    virtual std::string name() const = 0;
    virtual std::size_t alice_inputs() const = 0;
    virtual std::size_t bob_inputs() const = 0;
    virtual std::vector<CallSite> call_sites() const = 0;
    /// End state with at least O_A and O_B.
    virtual EndState run(const std::vector<bool> &alice, const std::vector<bool> &bob, OracleAccess &oracle,
                         RunRandomness rng) const = 0;
};

/// "toy-g" (one OT call, Bob outputs the result), "toy-g2" (two sequential OT
/// calls, second with swapped strings), "toy-commit" (commit to a bit and open
/// it), "none" (no calls, Bob echoes d).
std::shared_ptr<const OracleAidedProtocol> make_outer(const std::string &name);

struct ProtocolRun {
    Transcript transcript;
    EndState end_state;
};

/// An oracle-aided protocol with a provider for every call site.
class ComposedProtocol {
   public:
    /// Every call site served by its ideal functionality.
    explicit ComposedProtocol(std::shared_ptr<const OracleAidedProtocol> outer);
    const OracleAidedProtocol &outer() const { return *outer_; }
    const std::vector<std::shared_ptr<const Implementation>> &providers() const { return providers_; }
    std::size_t concrete_calls() const;
    ProtocolRun run(const std::vector<bool> &alice, const std::vector<bool> &bob, RunRandomness rng) const;

   private:
    friend ComposedProtocol substitute(const ComposedProtocol &, std::shared_ptr<const Implementation>);
    std::shared_ptr<const OracleAidedProtocol> outer_;
    std::vector<std::shared_ptr<const Implementation>> providers_;
};

/// Replaces every call site of pf's functionality by pf. InterfaceMismatch if
/// the phase signatures disagree.
ComposedProtocol substitute(const ComposedProtocol &pgf, std::shared_ptr<const Implementation> pf);

// ---- simulators -----------------------------------------------------------------

/// Ideal-world oracle for a simulator: the honest party's inputs are fixed,
/// the simulator supplies the corrupted party's inputs and sees its outputs.
class OracleGuard {
   public:
    OracleGuard(const Functionality &f, PartyId corrupted, std::vector<std::vector<Token>> honest_inputs,
                Transcript &log);
    /// Next phase only. OracleProtocolViolation on a repeated, skipped or extra
    /// phase, or an abort request from a corrupted Bob.
    Token query(std::size_t phase, const std::vector<Token> &inputs, Token alice_abort = Token::empty());
    const std::vector<Token> &honest_outputs() const { return honest_out_; }
    std::size_t queries() const { return queries_; }

   private:
    Functionality::Session session_;
    const Functionality &f_;
    PartyId corrupted_;
    std::vector<std::vector<Token>> honest_in_;
    std::vector<Token> honest_out_;
    Transcript &log_;
    std::size_t queries_ = 0;
};

struct InputPoint {
    std::vector<bool> alice, bob;
    std::string str() const;
};

class Simulator {
   public:
    virtual ~Simulator() = default;
    virtual std::string name() const = 0;
    virtual PartyId replaces() const = 0;
    virtual std::string functionality() const = 0;
    /// Corrupted party's registers. `own` holds the corrupted party's inputs.
    virtual EndState simulate(OracleGuard &oracle, const std::vector<bool> &own, RunRandomness rng) = 0;
};

/// Ideal-world run; the end state holds the simulator's registers plus the
/// honest party's outputs (O_A or O_B, per phase O_A1, O_B2, ... for BC).
ProtocolRun run_with_simulator(Simulator &sim, const Functionality &f, const InputPoint &inputs, RunRandomness rng);

/// Cheating sender strategy for OT.
class OTAliceStrategy {
   public:
    virtual ~OTAliceStrategy() = default;
    virtual std::string name() const { return "honest"; }
    virtual std::vector<Trit> choose_x(const OTConfig &cfg, Randomness &rng) { return random_trits(cfg.n, rng); }
    /// Null means Alice stays silent.
    virtual std::shared_ptr<OTSenderMessage> message(const OTConfig &cfg, bool s0, bool s1, const OTSenderState &st,
                                                     Randomness &rng);
};
/// honest, zero-x (X = 0^n), swap (sends s1, s0), flip-c (flips both C),
/// silent, selective-w0 (W0 off by one column, so only a d = 0 receiver can fail).
std::unique_ptr<OTAliceStrategy> make_ot_alice_strategy(const std::string &name);

/// Bob's answer on box i given Alice's (x, a) and his y, drawn from the table's conditional.
AnswerB sample_b_given_a(const DeviceTable &t, Trit x, AnswerA a, Trit y, Randomness &rng);

/// Alice's (x, a) drawn from the posterior given Bob's (y, b), Y-bar, the commit
/// syndromes and Ext3(R) = target. R is enumerated exactly for n <= 15, else
/// rejection sampled. Boxes whose bit of R is unchanged keep their (x, a).
std::pair<std::vector<Trit>, std::vector<AnswerA>> bc_posterior_opening(
    const BCConfig &cfg, const DeviceTable &t, const std::vector<Trit> &y, const std::vector<AnswerB> &b,
    const std::vector<Trit> &ybar, const BCCommitMessage &commit, bool target, std::vector<Trit> x,
    std::vector<AnswerA> a, Randomness &rng);

/// Real-world run and simulator for one corrupted party.
struct SimulationCase {
    std::string name;  // register registry key
    std::string functionality;
    std::string strategy;
    std::size_t n = 0;
    std::vector<InputPoint> grid;
    std::function<ProtocolRun(const InputPoint &, RunRandomness)> real;
    std::function<std::unique_ptr<Simulator>()> make_sim;
    /// Adds summary registers computed from the inputs and the full record.
    std::function<void(EndState &, const InputPoint &)> derive;
};

SimulationCase ot_corrupt_alice_case(const OTConfig &cfg, std::shared_ptr<const DeviceTable> table,
                                     std::shared_ptr<OTAliceStrategy> strat);
SimulationCase ot_corrupt_bob_case(const OTConfig &cfg, std::shared_ptr<const DeviceTable> table,
                                   std::shared_ptr<AdaptiveBobStrategy> strat);
SimulationCase bc_corrupt_alice_case(const BCConfig &cfg, std::shared_ptr<const DeviceTable> table,
                                     std::shared_ptr<BCAliceStrategy> strat);
SimulationCase bc_corrupt_bob_case(const BCConfig &cfg, std::shared_ptr<const DeviceTable> table,
                                   std::shared_ptr<AdaptiveBobStrategy> strat);

struct SimulationReport {
    std::string name, strategy;
    EvalMode mode = EvalMode::ExactTinyN;
    std::size_t n = 0, trials = 0;
    std::vector<std::string> registers;
    /// Exact mode: distance per grid point; the reported distance is the maximum.
    std::vector<std::pair<std::string, Rational>> per_point;
    std::optional<Rational> distance_exact;
    double distance = 0;
    nlohmann::json to_json() const;
};

/// Exact mode compares full registers per grid point; Monte Carlo mode draws a
/// grid point per trial and compares the summary registers of independent
/// real and ideal samples (plug-in one-norm).
SimulationReport compare_with_simulator(const SimulationCase &c, EvalMode mode, std::size_t trials,
                                        std::uint64_t seed);

// ---- composition check ----------------------------------------------------------

struct CompositionReport {
    std::string outer, inner;
    EvalMode mode = EvalMode::ExactTinyN;
    std::size_t trials = 0;
    std::size_t calls = 0;
    /// Max over the inner functionality's input grid of ||pf - IDEAL(f)||_1 on its outputs.
    double per_call_distance = 0;
    /// Max over the outer input grid of ||end(pg) - end(pgf)||_1 on O_A, O_B.
    double distance = 0;
    std::optional<Rational> per_call_exact, distance_exact;
    double tolerance = 0;
    double budget() const { return per_call_distance * static_cast<double>(calls) + tolerance; }
    bool pass() const { return distance <= budget(); }
    nlohmann::json to_json() const;
};

/// Exact grid (mode exact) or `trials` runs per grid point.
CompositionReport compose_check(const std::string &outer, std::shared_ptr<const Implementation> inner,
                                EvalMode mode, std::size_t trials, std::uint64_t seed, double tolerance);

/// Per-call distance of pf from its functionality: max over the input grid.
std::pair<double, std::optional<Rational>> implementation_distance(const Implementation &pf, EvalMode mode,
                                                                   std::size_t trials, std::uint64_t seed);

}  // namespace msdi
