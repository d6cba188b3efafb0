#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "msdi/msdevice.h"
#include "msdi/random.h"

namespace msdi {

enum class PartyId : std::uint8_t { Alice = 0, Bob = 1 };
const char *party_name(PartyId p);

/// Party output: the empty-string token, abort, or a bit.
class Token {
   public:
    enum class Kind : std::uint8_t { Empty, Bottom, Bit };
    static Token empty() { return Token(Kind::Empty, false); }
    static Token bottom() { return Token(Kind::Bottom, false); }
    static Token bit(bool b) { return Token(Kind::Bit, b); }
    static Token parse(const std::string &s);

    Kind kind() const { return kind_; }
    bool is_bit() const { return kind_ == Kind::Bit; }
    bool is_bottom() const { return kind_ == Kind::Bottom; }
    bool is_empty() const { return kind_ == Kind::Empty; }
    bool value() const { return bit_; }
    /// "eps", "bot", "0" or "1".
    std::string str() const;
    /// Small integer code for distributions: 0, 1, 2 = empty, 3 = bottom.
    int code() const;
    bool operator==(const Token &) const = default;

   private:
    Token(Kind k, bool b) : kind_(k), bit_(b) {
    }
    Kind kind_;
    bool bit_;
};

/// Payload of a message or transcript event.
class MessageBody {
   public:
    virtual ~MessageBody() = default;
    virtual std::string kind() const = 0;
    virtual nlohmann::json to_json() const = 0;
};
using MessagePtr = std::shared_ptr<const MessageBody>;

using MessageDecoder = std::function<MessagePtr(const nlohmann::json &)>;
void register_decoder(const std::string &kind, MessageDecoder decoder);
MessagePtr decode_message(const std::string &kind, const nlohmann::json &body);

/// Body holding plain JSON, used for ad hoc events and unknown kinds.
class JsonBody final : public MessageBody {
   public:
    JsonBody(std::string kind, nlohmann::json body) : kind_(std::move(kind)), body_(std::move(body)) {
    }
    std::string kind() const override { return kind_; }
    nlohmann::json to_json() const override { return body_; }

   private:
    std::string kind_;
    nlohmann::json body_;
};

/// Frame: 4-byte big-endian length of the rest, round byte, sender byte,
/// then {"kind":..., "body":...} as JSON text.
std::vector<std::uint8_t> encode_frame(int round, PartyId from, const MessageBody &body);
struct Frame {
    int round;
    PartyId from;
    MessagePtr body;
};
Frame decode_frame(const std::vector<std::uint8_t> &bytes);

enum class EventType : std::uint8_t { Send, Device, Delay, Abort, Output };
const char *event_name(EventType t);

struct Event {
    int round = 0;
    PartyId party = PartyId::Alice;
    EventType type = EventType::Send;
    MessagePtr body;  // message, device batch, or output token; may be null
};

class Transcript {
   public:
    void add(Event e) { events_.push_back(std::move(e)); }
    const std::vector<Event> &events() const { return events_; }
    std::vector<const Event *> messages_from(PartyId p) const;
    std::optional<int> delay_round() const;
    bool aborted() const;
    nlohmann::json to_json() const;
    static Transcript from_json(const nlohmann::json &j);

   private:
    std::vector<Event> events_;
};

/// Randomness seen by one run. In Monte Carlo mode the three streams are
/// independent generators; in exact mode all three are one PathEnumerator.
struct RunRandomness {
    Randomness &alice;
    Randomness &bob;
    Randomness &device;
    Randomness &of(PartyId p) const { return p == PartyId::Alice ? alice : bob; }
};

/// Owns three seeded streams derived from one seed.
class SeededRun {
   public:
    explicit SeededRun(std::uint64_t seed)
        : alice_(derive_seed(seed, 1)), bob_(derive_seed(seed, 2)), device_(derive_seed(seed, 3)) {
    }
    RunRandomness view() { return {alice_, bob_, device_}; }

   private:
    SeededRandom alice_, bob_, device_;
};

class RoundContext;

/// Party as a state machine stepped once per round.
class Party {
   public:
    virtual ~Party() = default;
    virtual void step(RoundContext &ctx) = 0;

    bool done() const { return done_; }
    /// Outputs, one per phase.
    const std::vector<Token> &outputs() const { return outputs_; }
    Token last_output() const { return outputs_.empty() ? Token::bottom() : outputs_.back(); }

   protected:
    void emit(Token t) { outputs_.push_back(t); }
    void finish() { done_ = true; }

   private:
    friend class Transport;
    friend class RoundContext;
    void abort() {
        outputs_.push_back(Token::bottom());
        done_ = true;
    }
    std::vector<Token> outputs_;
    bool done_ = false;
};

class RoundContext {
   public:
    int round() const { return round_; }
    PartyId self() const { return self_; }
    Randomness &rng() const { return *rng_; }
    Randomness &device_rng() const { return *device_rng_; }
    DeviceBank &bank() const { return *bank_; }
    bool post_delay() const { return bank_->clock() == Clock::PostDelay; }

    /// Message of the given kind delivered this round, if any.
    MessagePtr receive(const std::string &kind) const;
    template <class T>
    std::shared_ptr<const T> receive_as(const std::string &kind) const {
        return std::dynamic_pointer_cast<const T>(receive(kind));
    }
    const std::vector<MessagePtr> &inbox() const { return *inbox_; }

    void send(MessagePtr body);
    /// The run aborts for this party unless a message of this kind arrives by `deadline`.
    void expect(const std::string &kind, int deadline);
    /// Adds a device batch or other event to the transcript.
    void record(MessagePtr body);
    /// Phase output; also recorded.
    void output(Party &p, Token t);

   private:
    friend class Transport;
    int round_ = 0;
    PartyId self_ = PartyId::Alice;
    Randomness *rng_ = nullptr;
    Randomness *device_rng_ = nullptr;
    DeviceBank *bank_ = nullptr;
    const std::vector<MessagePtr> *inbox_ = nullptr;
    class Transport *transport_ = nullptr;
};

struct TransportOptions {
    /// DELAY elapses after every party has stepped in this round.
    int delay_after_round = 0;
    int max_rounds = 32;
    /// Round-trip every message through encode_frame / decode_frame.
    bool wire = false;
};

/// Steps two parties in lockstep. Messages sent in round r arrive in round r+1.
class Transport {
   public:
    Transport(DeviceBank &bank, RunRandomness rng, TransportOptions opts = {});
    Transcript run(Party &alice, Party &bob);
    std::size_t wire_bytes() const { return wire_bytes_; }

   private:
    friend class RoundContext;
    struct Expectation {
        PartyId who;
        std::string kind;
        int deadline;
        bool met = false;
    };
    DeviceBank &bank_;
    RunRandomness rng_;
    TransportOptions opts_;
    Transcript transcript_;
    std::vector<MessagePtr> outgoing_[2];
    std::vector<Expectation> expectations_;
    std::size_t wire_bytes_ = 0;
    int round_ = 0;
};

}  // namespace msdi
