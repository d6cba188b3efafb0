#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "msdi/coding.h"
#include "msdi/msdevice.h"
#include "msdi/transport.h"

namespace msdi {

std::string trits_str(const std::vector<Trit> &v);
std::vector<Trit> parse_trits(const std::string &s);
std::vector<Trit> random_trits(std::size_t n, Randomness &rng);

struct OTConfig {
    std::size_t n = 0;
    std::shared_ptr<const LinearCode> code;
    /// Toeplitz seed length for one output bit; must be n.
    std::size_t seed_len = 0;
    double eps_r = 1e-3;
    double c_r = 0.5;

    static OTConfig make(std::shared_ptr<const LinearCode> code, double eps_r = 1e-3, double c_r = 0.5);
    double delta() const { return static_cast<double>(code->d()) / static_cast<double>(n); }
    /// Throws ConfigError unless lengths agree and (1 + c_r) eps_r < delta / 2.
    void validate() const;
};

/// Alice's single post-DELAY batch: C0, C1, T0, T1, X, W0, W1.
class OTSenderMessage final : public MessageBody {
   public:
    static constexpr const char *kKind = "ot.sender";
    bool c0 = false, c1 = false;
    BitVec t0, t1;
    std::vector<Trit> x;
    Syndrome w0, w1;

    std::string kind() const override { return kKind; }
    nlohmann::json to_json() const override;
    static std::shared_ptr<OTSenderMessage> from_json(const nlohmann::json &j);
};

/// Inputs or outputs of a party's devices, recorded in the transcript.
class DeviceBatch final : public MessageBody {
   public:
    enum class What : std::uint8_t { Inputs, OutputsA, OutputsB };
    What what = What::Inputs;
    std::vector<Trit> inputs;
    std::vector<AnswerA> a;
    std::vector<AnswerB> b;

    std::string kind() const override { return "device.batch"; }
    nlohmann::json to_json() const override;
};

/// What Alice computes after DELAY; shared by the honest party and the simulators.
struct OTSenderState {
    std::vector<Trit> x;
    std::vector<AnswerA> a;
    BitVec r0, r1;
};
std::shared_ptr<OTSenderMessage> ot_sender_message(const OTConfig &cfg, bool s0, bool s1, const OTSenderState &st,
                                                   Randomness &rng);

/// Bob's output from Alice's message and his device outputs.
Token ot_bob_decode(const OTConfig &cfg, const OTSenderMessage &msg, const std::vector<AnswerB> &b, bool d);

class OTAlice final : public Party {
   public:
    OTAlice(const OTConfig &cfg, bool s0, bool s1) : cfg_(cfg), s0_(s0), s1_(s1) {
    }
    void step(RoundContext &ctx) override;
    const OTSenderState &state() const { return st_; }
    std::shared_ptr<const OTSenderMessage> sent() const { return sent_; }

   private:
    const OTConfig &cfg_;
    bool s0_, s1_;
    OTSenderState st_;
    std::shared_ptr<const OTSenderMessage> sent_;
};

class OTBob final : public Party {
   public:
    OTBob(const OTConfig &cfg, bool d) : cfg_(cfg), d_(d) {
    }
    void step(RoundContext &ctx) override;
    const std::vector<Trit> &y() const { return y_; }
    const std::vector<AnswerB> &b() const { return b_; }

   private:
    const OTConfig &cfg_;
    bool d_;
    std::vector<Trit> y_;
    std::vector<AnswerB> b_;
};

struct OTOutcome {
    bool s0 = false, s1 = false, d = false;
    Token o_a = Token::empty();
    Token o_b = Token::bottom();
    std::vector<Trit> x, y;
    std::vector<AnswerA> a;
    std::vector<AnswerB> b;
    std::shared_ptr<const OTSenderMessage> msg;
    Transcript transcript;
    std::optional<std::uint64_t> seed;

    /// One JSON-lines record: seeds, inputs, X, Y, A, B, messages, outcome.
    nlohmann::json to_json() const;
};

OTOutcome ot_run_honest(const OTConfig &cfg, bool s0, bool s1, bool d, DeviceBank &bank, RunRandomness rng,
                        bool wire = false);
/// Seeded convenience form.
OTOutcome ot_run_honest(const OTConfig &cfg, bool s0, bool s1, bool d, DeviceBank &bank, std::uint64_t seed);

enum class TestVerdict { Pass, Abort };

struct TestPhaseResult {
    TestVerdict alice = TestVerdict::Pass;
    TestVerdict bob = TestVerdict::Pass;
    std::size_t alice_failures = 0, bob_failures = 0;
    bool passed() const { return alice == TestVerdict::Pass && bob == TestVerdict::Pass; }
};

/// Each party plays its own test bank with uniform inputs on both ports and
/// aborts iff its failure count is at least 2 eps_dd n.
TestPhaseResult ot_test_phase(DeviceBank &alice_test, DeviceBank &bob_test, double eps_dd, RunRandomness rng);

struct OTWithTestOutcome {
    TestPhaseResult test;
    std::optional<OTOutcome> run;
    Token o_a() const { return run ? run->o_a : Token::bottom(); }
    Token o_b() const { return run ? run->o_b : Token::bottom(); }
};

OTWithTestOutcome ot_with_test(const OTConfig &cfg, double eps_dd, bool s0, bool s1, bool d, DeviceBank &alice_test,
                               DeviceBank &bob_test, DeviceBank &run_bank, RunRandomness rng);

}  // namespace msdi
