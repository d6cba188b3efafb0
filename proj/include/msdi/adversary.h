#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "msdi/bc.h"
#include "msdi/distribution.h"
#include "msdi/msdevice.h"
#include "msdi/ot.h"

namespace msdi {

// ---- adaptive Bob -------------------------------------------------------

struct BoxEvent {
    std::size_t index = 0;
    Trit y;
    AnswerB b;
};
using BobHistory = std::vector<BoxEvent>;

struct BobMove {
    std::size_t index = 0;
    Trit y;
};

/// Bob fires his ports one at a time before DELAY, choosing each box and
/// input from what he has seen so far.
class AdaptiveBobStrategy {
   public:
    virtual ~AdaptiveBobStrategy() = default;
    virtual std::string name() const = 0;
    virtual BobMove next_move(const BobHistory &h, std::size_t n, Randomness &rng) = 0;
    /// Y-bar announced in the commit phase of BC; by default the inputs used.
    virtual std::vector<Trit> announce(const BobHistory &h, std::size_t n, Randomness &rng);
};

/// Boxes in index order, every input y.
class AscendingBob final : public AdaptiveBobStrategy {
   public:
    explicit AscendingBob(Trit y) : y_(y) {
    }
    std::string name() const override { return "ascending:" + std::to_string(y_.value()); }
    BobMove next_move(const BobHistory &h, std::size_t n, Randomness &rng) override;

   private:
    Trit y_;
};

/// Index order, uniform inputs: the honest BC receiver.
class HonestBob final : public AdaptiveBobStrategy {
   public:
    std::string name() const override { return "honest"; }
    BobMove next_move(const BobHistory &h, std::size_t n, Randomness &rng) override;
};

/// Uniform random unfired box, uniform input.
class ShuffledBob final : public AdaptiveBobStrategy {
   public:
    std::string name() const override { return "shuffled"; }
    BobMove next_move(const BobHistory &h, std::size_t n, Randomness &rng) override;
};

/// Fires into the third-block with the most 111 answers so far (ties to the
/// lowest block); the input after a 111 is 2, otherwise the previous input + 1.
class GreedyBob final : public AdaptiveBobStrategy {
   public:
    std::string name() const override { return "greedy"; }
    BobMove next_move(const BobHistory &h, std::size_t n, Randomness &rng) override;
};

/// Honest firing, but announces Y-bar_i = y_i + shift (mod 3).
class ShiftedAnnounceBob final : public AdaptiveBobStrategy {
   public:
    explicit ShiftedAnnounceBob(int shift) : shift_(shift) {
    }
    std::string name() const override { return "shifted:" + std::to_string(shift_); }
    BobMove next_move(const BobHistory &h, std::size_t n, Randomness &rng) override;
    std::vector<Trit> announce(const BobHistory &h, std::size_t n, Randomness &rng) override;

   private:
    int shift_;
};

/// ascending:Y, honest, shuffled, greedy, shifted:S.
std::unique_ptr<AdaptiveBobStrategy> make_bob_strategy(const std::string &spec);

struct AdaptivePlay {
    std::vector<std::size_t> order;
    std::vector<Trit> y;     // by box index
    std::vector<AnswerB> b;  // by box index
    std::vector<int> z;      // by step: 1 iff that step's answer was 111
    BobHistory history;
};

/// Fires every Bob port once in the strategy's order. Throws DuplicateBoxIndex
/// on a repeated or out-of-range box.
AdaptivePlay adaptive_bob_play(DeviceBank &bank, AdaptiveBobStrategy &strat, Randomness &strategy_rng,
                               Randomness &device_rng);

// ---- GOOD ---------------------------------------------------------------

enum class GoodThreshold { PaperDef_n18, ProofBound_n9 };
const char *good_threshold_name(GoodThreshold t);

std::array<std::size_t, 3> block_111_counts(const std::vector<AnswerB> &b);
/// Every third-block has at most n/18 (PaperDef) or n/9 (ProofBound) answers 111.
bool good_btilde(const std::vector<AnswerB> &b, std::size_t n, GoodThreshold mode);

struct GoodReport {
    std::string strategy;
    std::string device;
    std::size_t n = 0, trials = 0, not_good = 0;
    GoodThreshold mode = GoodThreshold::ProofBound_n9;
    double mean_block_count = 0;
    double fraction() const { return trials ? static_cast<double>(not_good) / static_cast<double>(trials) : 0; }
    nlohmann::json to_json() const;
};
GoodReport eval_good_concentration(std::size_t n, std::shared_ptr<const DeviceTable> table,
                                   AdaptiveBobStrategy &strat, std::size_t trials, std::uint64_t seed,
                                   GoodThreshold mode = GoodThreshold::ProofBound_n9);

/// Exact Pr(some third-block count > limit) when every answer is 111 independently
/// with probability q; block length n/3.
Rational not_good_probability(std::size_t n, std::size_t limit, const Rational &q);

/// E[Z_j | Bob's history before step j] for every reachable history prefix.
struct ZConditional {
    std::size_t step = 0;
    BobHistory prefix;
    Rational prefix_prob;
    Rational expectation;
};
std::vector<ZConditional> z_conditionals(std::shared_ptr<const DeviceTable> table, AdaptiveBobStrategy &strat,
                                         std::size_t n);

/// Exact law of (x_i, y_i, a_i, b_i)_i with Bob playing `strat` first and Alice
/// firing uniform inputs afterwards. Variables x0.., y0.., a0.., b0.. (answer masks).
ExactDistribution adaptive_joint_law(std::shared_ptr<const DeviceTable> table, AdaptiveBobStrategy &strat,
                                     std::size_t n);
/// Pr(a | b x y) = prod_i Pr(a_i | b_i x_i y_i), checked with exact equality.
bool factorizes_per_box(const ExactDistribution &joint, std::size_t n);

// ---- common bits ----------------------------------------------------------

/// Per-box probability that b_x != a_y given Alice's (a, x) and Bob's y.
double mismatch_probability(const DeviceTable &t, AnswerA a, Trit x, Trit y);
/// Histogram (index = distance) of d_H(B(x), a(y)) with B drawn from the
/// per-box conditional given (a, x, y). ZeroProbabilityEvent if some a is impossible.
std::vector<std::size_t> common_bit_hamming(const std::vector<std::shared_ptr<const DeviceTable>> &tables,
                                            const std::vector<AnswerA> &a, const std::vector<Trit> &x,
                                            const std::vector<Trit> &y, std::size_t trials, Randomness &rng);

// ---- Bayes guessers ------------------------------------------------------

/// Posterior bias E[(-1)^e | view] of the protected OT mask e = <T_p, R_p>,
/// where R_p = A(p); Bob knows the other mask (s_{1-p} known).
double ot_posterior_bias(const OTConfig &cfg, const DeviceTable &table, const std::vector<Trit> &y,
                         const std::vector<AnswerB> &b, const OTSenderMessage &msg, int p,
                         std::optional<bool> other_mask);

/// Posterior bias E[(-1)^{Ext3(R)} | y, b, Y-bar, W] for the trilinear extractor.
double bc_posterior_bias(const BCConfig &cfg, const DeviceTable &table, const std::vector<Trit> &y,
                         const std::vector<AnswerB> &b, const std::vector<Trit> &ybar, const BCCommitMessage &commit);

// ---- evaluators ---------------------------------------------------------

enum class EvalMode { ExactTinyN, MonteCarlo };
const char *eval_mode_name(EvalMode m);

/// Paper rule: Bob's effective choice is 1 iff |{i : y_i = 0}| <= n/2; the other index is protected.
int ot_choice_bit(const std::vector<Trit> &y);

struct OTSecurityReport {
    std::string strategy;
    EvalMode mode = EvalMode::MonteCarlo;
    std::size_t n = 0, trials = 0;
    /// Trials (or probability mass, exact mode) with choice bit 1.
    double choice1_rate = 0;
    /// || P(view, e_p) - P(view) x U ||_1; Monte Carlo: mean |posterior bias|.
    double masked_distance = 0;
    std::optional<Rational> masked_distance_exact;
    /// Exact mode: H_min(R_p | X, B, Y) in bits, and per box.
    double min_entropy = 0;
    std::vector<double> box_min_entropy;
    std::vector<Rational> box_guess_prob;
    /// Same per box, conditioned on y_i != p (the protected bit is box i's uncommon bit);
    /// empty when that event has probability 0.
    std::vector<std::optional<Rational>> box_uncommon_guess_prob;
    /// Monte Carlo guessing game for s_p.
    std::size_t successes = 0;
    double advantage = 0;
    double bayes_advantage = 0;
    /// Honest-decode success of s_choice (sanity).
    std::size_t choice_decoded = 0;
    nlohmann::json to_json() const;
};
OTSecurityReport eval_ot_sender_security(const OTConfig &cfg, std::shared_ptr<const DeviceTable> table,
                                         AdaptiveBobStrategy &strat, EvalMode mode, std::size_t trials,
                                         std::uint64_t seed);

struct HidingReport {
    std::string strategy;
    EvalMode mode = EvalMode::MonteCarlo;
    std::size_t n = 0, trials = 0;
    /// || P(view, C) - P(view) x U ||_1 (half the d=0 vs d=1 distance).
    double distance = 0;
    std::optional<Rational> distance_exact;
    std::size_t successes = 0;
    double advantage = 0;
    double bayes_advantage = 0;
    nlohmann::json to_json() const;
};
HidingReport eval_bc_hiding(const BCConfig &cfg, std::shared_ptr<const DeviceTable> table,
                            AdaptiveBobStrategy &strat, EvalMode mode, std::size_t trials, std::uint64_t seed);

// ---- cheating Alice ------------------------------------------------------

/// Commits honestly to 0, then reveals the blocks shifted by the lightest
/// codeword that flips Ext3, guessing Bob's answer on the touched boxes.
class HonestThenFlip final : public BCAliceStrategy {
   public:
    std::string name() const override { return "honest-then-flip"; }
    std::shared_ptr<BCCommitMessage> commit(const BCConfig &cfg, bool d, const std::vector<Trit> &x,
                                            const std::vector<AnswerA> &a, const std::vector<Trit> &y,
                                            Randomness &rng) override;
    std::shared_ptr<BCRevealMessage> reveal(const BCConfig &cfg, bool d, const std::vector<Trit> &x,
                                            const std::vector<AnswerA> &a, const std::vector<Trit> &y,
                                            const BCCommitMessage &commit, Randomness &rng) override;
};

/// Reveals block 1 shifted by a random nonzero codeword (distance >= d),
/// syndrome-consistent, with guessed inputs on the touched boxes.
class FarReveal final : public BCAliceStrategy {
   public:
    std::string name() const override { return "far-rbar"; }
    std::shared_ptr<BCCommitMessage> commit(const BCConfig &cfg, bool d, const std::vector<Trit> &x,
                                            const std::vector<AnswerA> &a, const std::vector<Trit> &y,
                                            Randomness &rng) override;
    std::shared_ptr<BCRevealMessage> reveal(const BCConfig &cfg, bool d, const std::vector<Trit> &x,
                                            const std::vector<AnswerA> &a, const std::vector<Trit> &y,
                                            const BCCommitMessage &commit, Randomness &rng) override;
};

/// Commits W-tilde_1 to r_1 + e with weight(e) = ceil(d/2), just outside the
/// decoding radius, and C so that revealing r_1 + e opens 1.
class SyndromeForge final : public BCAliceStrategy {
   public:
    std::string name() const override { return "syndrome-forge"; }
    std::shared_ptr<BCCommitMessage> commit(const BCConfig &cfg, bool d, const std::vector<Trit> &x,
                                            const std::vector<AnswerA> &a, const std::vector<Trit> &y,
                                            Randomness &rng) override;
    std::shared_ptr<BCRevealMessage> reveal(const BCConfig &cfg, bool d, const std::vector<Trit> &x,
                                            const std::vector<AnswerA> &a, const std::vector<Trit> &y,
                                            const BCCommitMessage &commit, Randomness &rng) override;

   private:
    BitVec e_;
};

/// honest, honest-then-flip, far-rbar, syndrome-forge.
std::unique_ptr<BCAliceStrategy> make_alice_strategy(const std::string &name);

/// Alice's reveal with block j replaced by r_j + delta: answers adjusted to
/// stay consistent, inputs on touched boxes guessed uniformly among the other two.
std::shared_ptr<BCRevealMessage> shifted_reveal(const BCConfig &cfg, const std::vector<Trit> &x,
                                                const std::vector<AnswerA> &a, const std::vector<Trit> &y,
                                                std::size_t j, const BitVec &delta, Randomness &rng);

struct BindingReport {
    std::string strategy;
    std::size_t n = 0, trials = 0;
    std::size_t in_e = 0, in_ec = 0;          // commit tags
    std::size_t d1_in_e = 0, d0_in_ec = 0;    // accepted reveals against the tag
    std::size_t d0_in_e = 0, d1_in_ec = 0;
    std::size_t bottoms = 0;
    double rate_d1_given_e() const { return in_e ? static_cast<double>(d1_in_e) / static_cast<double>(in_e) : 0; }
    double rate_d0_given_ec() const { return in_ec ? static_cast<double>(d0_in_ec) / static_cast<double>(in_ec) : 0; }
    double accept_flipped() const {
        return trials ? static_cast<double>(d1_in_e + d0_in_ec) / static_cast<double>(trials) : 0;
    }
    double bottom_rate() const { return trials ? static_cast<double>(bottoms) / static_cast<double>(trials) : 0; }
    nlohmann::json to_json() const;
};
/// Runs the strategy (with d = 0) against honest Bob and tallies reveal outcomes by commit tag.
BindingReport eval_bc_binding(const BCConfig &cfg, std::shared_ptr<const DeviceTable> table, BCAliceStrategy &strat,
                              std::size_t trials, std::uint64_t seed);

/// Nonzero codewords, lightest first; all of them when k <= 16, else from
/// the generator rows and their pairwise sums.
std::vector<BitVec> light_codewords(const LinearCode &code);

}  // namespace msdi
