#include "msdi/transport.h"

#include <gtest/gtest.h>

using namespace msdi;

namespace {

class Note final : public MessageBody {
   public:
    explicit Note(int v) : v(v) {
    }
    std::string kind() const override { return "test.note"; }
    nlohmann::json to_json() const override { return {{"v", v}}; }
    int v;
};

const bool kRegistered = [] {
    register_decoder("test.note", [](const nlohmann::json &j) { return std::make_shared<Note>(j.at("v").get<int>()); });
    return true;
}();

// Sends one note in round `send_round` unless told to stall.
class Sender final : public Party {
   public:
    Sender(int send_round, bool stall) : send_round_(send_round), stall_(stall) {
    }
    void step(RoundContext &ctx) override {
        if (ctx.round() == 0) {
            ctx.bank().input_alice(0, Trit(1));
        }
        if (ctx.round() == send_round_) {
            if (!stall_) {
                ctx.send(std::make_shared<Note>(static_cast<int>(ctx.rng().uniform(100))));
            }
            ctx.output(*this, Token::empty());
            finish();
        }
    }

   private:
    int send_round_;
    bool stall_;
};

class Receiver final : public Party {
   public:
    void step(RoundContext &ctx) override {
        if (ctx.round() == 0) {
            ctx.expect("test.note", 2);
        }
        if (auto m = ctx.receive_as<Note>("test.note")) {
            got = m->v;
            ctx.output(*this, Token::bit(m->v % 2));
            finish();
        }
    }
    int got = -1;
};

Transcript run_once(std::uint64_t seed, bool stall, bool wire, Receiver &bob) {
    DeviceBank bank = DeviceBank::uniform(1, std::make_shared<const DeviceTable>(ideal_table()));
    SeededRun rng(seed);
    Sender alice(1, stall);
    TransportOptions opts;
    opts.wire = wire;
    Transport t(bank, rng.view(), opts);
    return t.run(alice, bob);
}

}  // namespace

TEST(Token, RoundTrip) {
    for (auto t : {Token::empty(), Token::bottom(), Token::bit(false), Token::bit(true)}) {
        EXPECT_EQ(Token::parse(t.str()), t);
    }
    EXPECT_NE(Token::empty(), Token::bottom());
}

TEST(Frame, HeaderLayout) {
    Note n(7);
    auto bytes = encode_frame(3, PartyId::Bob, n);
    std::uint32_t len = (bytes[0] << 24) | (bytes[1] << 16) | (bytes[2] << 8) | bytes[3];
    EXPECT_EQ(len + 4, bytes.size());
    EXPECT_EQ(bytes[4], 3);
    EXPECT_EQ(bytes[5], 1);
    auto f = decode_frame(bytes);
    EXPECT_EQ(f.round, 3);
    EXPECT_EQ(f.from, PartyId::Bob);
    EXPECT_EQ(f.body->to_json(), n.to_json());
    EXPECT_NE(std::dynamic_pointer_cast<const Note>(f.body), nullptr);
    bytes.pop_back();
    EXPECT_THROW(decode_frame(bytes), std::invalid_argument);
}

TEST(Transport, DeliversNextRound) {
    Receiver bob;
    auto t = run_once(1, false, false, bob);
    EXPECT_GE(bob.got, 0);
    EXPECT_FALSE(t.aborted());
    EXPECT_EQ(t.messages_from(PartyId::Alice).size(), 1u);
    EXPECT_EQ(t.messages_from(PartyId::Bob).size(), 0u);
    EXPECT_EQ(t.delay_round(), 0);
}

TEST(Transport, StallMeansBottom) {
    Receiver bob;
    auto t = run_once(1, true, false, bob);
    EXPECT_TRUE(t.aborted());
    EXPECT_TRUE(bob.last_output().is_bottom());
}

TEST(Transport, DeterministicAndWireTransparent) {
    Receiver b1, b2, b3;
    auto t1 = run_once(42, false, false, b1);
    auto t2 = run_once(42, false, false, b2);
    auto t3 = run_once(42, false, true, b3);
    EXPECT_EQ(t1.to_json().dump(), t2.to_json().dump());
    EXPECT_EQ(t1.to_json().dump(), t3.to_json().dump());
}

TEST(Transcript, JsonRoundTrip) {
    Receiver bob;
    auto t = run_once(5, false, false, bob);
    auto j = t.to_json();
    EXPECT_EQ(Transcript::from_json(nlohmann::json::parse(j.dump())).to_json(), j);
}
