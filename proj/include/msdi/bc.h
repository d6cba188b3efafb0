#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "msdi/coding.h"
#include "msdi/extract.h"
#include "msdi/msdevice.h"
#include "msdi/ot.h"
#include "msdi/transport.h"

namespace msdi {

struct BCConfig {
    std::size_t n = 0;
    std::array<std::shared_ptr<const LinearCode>, 3> codes;
    double eps_r = 1e-3;
    double c_r = 0.5;
    std::shared_ptr<const ThreeSourceExtractor> ext = std::make_shared<TrilinearExtractor>();

    /// Same code on all three blocks; n = 3 * code length.
    static BCConfig make(std::shared_ptr<const LinearCode> code, double eps_r = 1e-3, double c_r = 0.5);
    std::size_t block() const { return n / 3; }
    /// Reveal rejects a block with at least this many mismatches: (1 + c_r) eps_r^{1/6} n/3.
    double reveal_threshold() const;
    /// Throws ConfigError on inconsistent lengths; returns warnings.
    std::vector<std::string> validate() const;
};

class BCYMessage final : public MessageBody {
   public:
    static constexpr const char *kKind = "bc.y";
    std::vector<Trit> y;
    std::string kind() const override { return kKind; }
    nlohmann::json to_json() const override;
};

class BCCommitMessage final : public MessageBody {
   public:
    static constexpr const char *kKind = "bc.commit";
    bool c = false;
    std::array<Syndrome, 3> w;
    std::string kind() const override { return kKind; }
    nlohmann::json to_json() const override;
};

class BCRevealMessage final : public MessageBody {
   public:
    static constexpr const char *kKind = "bc.reveal";
    std::vector<Trit> x;
    std::vector<AnswerA> a;
    std::array<BitVec, 3> r;
    std::string kind() const override { return kKind; }
    nlohmann::json to_json() const override;
};

/// Bits a_i(y_i) over block j (indices [j n/3, (j+1) n/3)).
BitVec block_bits(const std::vector<AnswerA> &a, const std::vector<Trit> &y, std::size_t j, std::size_t block);
/// Bits b_i(x_i) over block j.
BitVec block_bits(const std::vector<AnswerB> &b, const std::vector<Trit> &x, std::size_t j, std::size_t block);

/// Alice's honest commit from her device outputs and Bob's announced Y.
std::shared_ptr<BCCommitMessage> bc_commit_message(const BCConfig &cfg, bool d, const std::array<BitVec, 3> &r);
std::array<BitVec, 3> bc_blocks(const BCConfig &cfg, const std::vector<AnswerA> &a, const std::vector<Trit> &y);

/// Bob's reveal checks; bottom on any failure, else C xor Ext3(R).
Token bc_reveal_check(const BCConfig &cfg, const std::vector<Trit> &y, const std::vector<AnswerB> &b,
                      const BCCommitMessage &commit, const BCRevealMessage &reveal);

/// The string within the unique-decoding radius of r with syndrome w, if any.
std::optional<BitVec> closest(const BitVec &r, const Syndrome &w, const LinearCode &code);

enum class CommitClass { DBottom, D0, D1 };
struct CommitClassification {
    CommitClass cls = CommitClass::DBottom;
    /// E = D0 or DBottom.
    bool e() const { return cls != CommitClass::D1; }
    std::array<std::optional<BitVec>, 3> closest;
};
/// Tags a commit transcript from Alice's committed blocks r~_j = a~_i(y_i), w~ and c~.
CommitClassification classify_commit(const BCConfig &cfg, const std::array<BitVec, 3> &r_tilde,
                                     const BCCommitMessage &commit);
const char *commit_class_name(CommitClass c);

/// Alice's behaviour; the default is honest.
class BCAliceStrategy {
   public:
    virtual ~BCAliceStrategy() = default;
    virtual std::string name() const { return "honest"; }
    virtual std::vector<Trit> choose_x(const BCConfig &cfg, Randomness &rng) { return random_trits(cfg.n, rng); }
    virtual std::shared_ptr<BCCommitMessage> commit(const BCConfig &cfg, bool d, const std::vector<Trit> &x,
                                                    const std::vector<AnswerA> &a, const std::vector<Trit> &y,
                                                    Randomness &rng);
    virtual std::shared_ptr<BCRevealMessage> reveal(const BCConfig &cfg, bool d, const std::vector<Trit> &x,
                                                    const std::vector<AnswerA> &a, const std::vector<Trit> &y,
                                                    const BCCommitMessage &commit, Randomness &rng);
};

class BCAlice final : public Party {
   public:
    BCAlice(const BCConfig &cfg, bool d, BCAliceStrategy &strategy) : cfg_(cfg), d_(d), strat_(strategy) {
    }
    void step(RoundContext &ctx) override;
    const std::vector<Trit> &x() const { return x_; }
    const std::vector<AnswerA> &a() const { return a_; }
    std::shared_ptr<const BCCommitMessage> commit() const { return commit_; }
    std::shared_ptr<const BCRevealMessage> reveal() const { return reveal_; }

   private:
    const BCConfig &cfg_;
    bool d_;
    BCAliceStrategy &strat_;
    std::vector<Trit> x_, y_;
    std::vector<AnswerA> a_;
    std::shared_ptr<const BCCommitMessage> commit_;
    std::shared_ptr<const BCRevealMessage> reveal_;
};

class BCBob final : public Party {
   public:
    explicit BCBob(const BCConfig &cfg) : cfg_(cfg) {
    }
    void step(RoundContext &ctx) override;
    const std::vector<Trit> &y() const { return y_; }
    const std::vector<AnswerB> &b() const { return b_; }
    std::shared_ptr<const BCCommitMessage> commit() const { return commit_; }

   private:
    const BCConfig &cfg_;
    std::vector<Trit> y_;
    std::vector<AnswerB> b_;
    std::shared_ptr<const BCCommitMessage> commit_;
};

struct BCOutcome {
    bool d = false;
    Token commit_a = Token::bottom(), commit_b = Token::bottom();
    /// Reveal-phase outputs; o_b is D-hat.
    Token o_a = Token::bottom(), o_b = Token::bottom();
    std::vector<Trit> x, y;
    std::vector<AnswerA> a;
    std::vector<AnswerB> b;
    std::shared_ptr<const BCCommitMessage> commit;
    std::shared_ptr<const BCRevealMessage> reveal;
    Transcript transcript;
    std::optional<std::uint64_t> seed;

    nlohmann::json to_json() const;
};

BCOutcome bc_run(const BCConfig &cfg, bool d, DeviceBank &bank, RunRandomness rng, BCAliceStrategy &alice);
BCOutcome bc_run_honest(const BCConfig &cfg, bool d, DeviceBank &bank, RunRandomness rng);
BCOutcome bc_run_honest(const BCConfig &cfg, bool d, DeviceBank &bank, std::uint64_t seed);

/// Commit phase without the transport, for evaluators: both sides fire,
/// DELAY, Alice commits to Bob's Y.
struct BCCommitRecord {
    std::vector<Trit> x, y;
    std::vector<AnswerA> a;
    std::vector<AnswerB> b;
    std::array<BitVec, 3> r;
    std::shared_ptr<BCCommitMessage> commit;
};
BCCommitRecord bc_commit_honest(const BCConfig &cfg, bool d, DeviceBank &bank, RunRandomness rng);
/// Bob's checks on Alice's honest reveal of a commit record.
Token bc_reveal_honest(const BCConfig &cfg, const BCCommitRecord &rec);

}  // namespace msdi
