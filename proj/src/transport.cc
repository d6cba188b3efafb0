#include "msdi/transport.h"

#include <map>
#include <mutex>

#include "msdi/errors.h"

namespace msdi {

const char *party_name(PartyId p) {
    return p == PartyId::Alice ? "alice" : "bob";
}

Token Token::parse(const std::string &s) {
    if (s == "eps") {
        return empty();
    }
    if (s == "bot") {
        return bottom();
    }
    if (s == "0" || s == "1") {
        return bit(s == "1");
    }
    throw std::invalid_argument("unknown token '" + s + "'");
}

std::string Token::str() const {
    switch (kind_) {
        case Kind::Empty:
            return "eps";
        case Kind::Bottom:
            return "bot";
        case Kind::Bit:
            return bit_ ? "1" : "0";
    }
    return "?";
}

int Token::code() const {
    switch (kind_) {
        case Kind::Empty:
            return 2;
        case Kind::Bottom:
            return 3;
        case Kind::Bit:
            return bit_ ? 1 : 0;
    }
    return -1;
}

namespace {

struct Registry {
    std::mutex mu;
    std::map<std::string, MessageDecoder> decoders;
};

Registry &registry() {
    static Registry r;
    return r;
}

}  // namespace

void register_decoder(const std::string &kind, MessageDecoder decoder) {
    auto &r = registry();
    std::lock_guard lock(r.mu);
    r.decoders[kind] = std::move(decoder);
}

MessagePtr decode_message(const std::string &kind, const nlohmann::json &body) {
    MessageDecoder dec;
    {
        auto &r = registry();
        std::lock_guard lock(r.mu);
        auto it = r.decoders.find(kind);
        if (it != r.decoders.end()) {
            dec = it->second;
        }
    }
    if (dec) {
        return dec(body);
    }
    return std::make_shared<JsonBody>(kind, body);
}

std::vector<std::uint8_t> encode_frame(int round, PartyId from, const MessageBody &body) {
    if (round < 0 || round > 255) {
        throw std::out_of_range("frame round tag must fit in one byte");
    }
    std::string payload = nlohmann::json{{"kind", body.kind()}, {"body", body.to_json()}}.dump();
    std::uint32_t len = static_cast<std::uint32_t>(payload.size() + 2);
    std::vector<std::uint8_t> out;
    out.reserve(len + 4);
    for (int s = 24; s >= 0; s -= 8) {
        out.push_back(static_cast<std::uint8_t>(len >> s));
    }
    out.push_back(static_cast<std::uint8_t>(round));
    out.push_back(static_cast<std::uint8_t>(from));
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

Frame decode_frame(const std::vector<std::uint8_t> &bytes) {
    if (bytes.size() < 6) {
        throw std::invalid_argument("frame shorter than its header");
    }
    std::uint32_t len = 0;
    for (int i = 0; i < 4; i++) {
        len = (len << 8) | bytes[static_cast<std::size_t>(i)];
    }
    if (len + 4 != bytes.size()) {
        throw std::invalid_argument("frame length prefix does not match its size");
    }
    if (bytes[5] > 1) {
        throw std::invalid_argument("bad sender tag");
    }
    auto j = nlohmann::json::parse(bytes.begin() + 6, bytes.end());
    return {bytes[4], static_cast<PartyId>(bytes[5]), decode_message(j.at("kind"), j.at("body"))};
}

const char *event_name(EventType t) {
    switch (t) {
        case EventType::Send:
            return "send";
        case EventType::Device:
            return "device";
        case EventType::Delay:
            return "delay";
        case EventType::Abort:
            return "abort";
        case EventType::Output:
            return "output";
    }
    return "?";
}

std::vector<const Event *> Transcript::messages_from(PartyId p) const {
    std::vector<const Event *> out;
    for (const auto &e : events_) {
        if (e.type == EventType::Send && e.party == p) {
            out.push_back(&e);
        }
    }
    return out;
}

std::optional<int> Transcript::delay_round() const {
    for (const auto &e : events_) {
        if (e.type == EventType::Delay) {
            return e.round;
        }
    }
    return std::nullopt;
}

bool Transcript::aborted() const {
    for (const auto &e : events_) {
        if (e.type == EventType::Abort) {
            return true;
        }
    }
    return false;
}

nlohmann::json Transcript::to_json() const {
    nlohmann::json events = nlohmann::json::array();
    for (const auto &e : events_) {
        nlohmann::json j{{"round", e.round}, {"party", party_name(e.party)}, {"type", event_name(e.type)}};
        if (e.body) {
            j["kind"] = e.body->kind();
            j["body"] = e.body->to_json();
        }
        events.push_back(std::move(j));
    }
    return {{"events", events}};
}

Transcript Transcript::from_json(const nlohmann::json &j) {
    static const std::map<std::string, EventType> kTypes{{"send", EventType::Send},
                                                         {"device", EventType::Device},
                                                         {"delay", EventType::Delay},
                                                         {"abort", EventType::Abort},
                                                         {"output", EventType::Output}};
    Transcript t;
    for (const auto &ej : j.at("events")) {
        Event e;
        e.round = ej.at("round").get<int>();
        e.party = ej.at("party").get<std::string>() == "alice" ? PartyId::Alice : PartyId::Bob;
        e.type = kTypes.at(ej.at("type").get<std::string>());
        if (ej.contains("kind")) {
            e.body = decode_message(ej.at("kind").get<std::string>(), ej.at("body"));
        }
        t.add(std::move(e));
    }
    return t;
}

MessagePtr RoundContext::receive(const std::string &kind) const {
    for (const auto &m : *inbox_) {
        if (m->kind() == kind) {
            return m;
        }
    }
    return nullptr;
}

void RoundContext::send(MessagePtr body) {
    Transport &t = *transport_;
    if (t.opts_.wire) {
        auto bytes = encode_frame(round_, self_, *body);
        t.wire_bytes_ += bytes.size();
        body = decode_frame(bytes).body;
    }
    t.transcript_.add({round_, self_, EventType::Send, body});
    t.outgoing_[static_cast<int>(self_)].push_back(std::move(body));
}

void RoundContext::expect(const std::string &kind, int deadline) {
    transport_->expectations_.push_back({self_, kind, deadline});
}

void RoundContext::record(MessagePtr body) {
    transport_->transcript_.add({round_, self_, EventType::Device, std::move(body)});
}

void RoundContext::output(Party &p, Token t) {
    transport_->transcript_.add({round_, self_, EventType::Output, std::make_shared<JsonBody>("token", t.str())});
    p.emit(t);
}

Transport::Transport(DeviceBank &bank, RunRandomness rng, TransportOptions opts)
    : bank_(bank), rng_(rng), opts_(opts) {
}

Transcript Transport::run(Party &alice, Party &bob) {
    Party *parties[2] = {&alice, &bob};
    std::vector<MessagePtr> inbox[2];
    for (round_ = 0; round_ < opts_.max_rounds; round_++) {
        // Deliver what the other side sent last round.
        for (int p = 0; p < 2; p++) {
            inbox[p] = std::move(outgoing_[1 - p]);
            outgoing_[1 - p].clear();
            for (auto &ex : expectations_) {
                if (static_cast<int>(ex.who) == p) {
                    for (const auto &m : inbox[p]) {
                        ex.met = ex.met || m->kind() == ex.kind;
                    }
                }
            }
        }
        for (int p = 0; p < 2; p++) {
            if (parties[p]->done()) {
                continue;
            }
            RoundContext ctx;
            ctx.round_ = round_;
            ctx.self_ = static_cast<PartyId>(p);
            ctx.rng_ = &rng_.of(ctx.self_);
            ctx.device_rng_ = &rng_.device;
            ctx.bank_ = &bank_;
            ctx.inbox_ = &inbox[p];
            ctx.transport_ = this;
            parties[p]->step(ctx);
        }
        if (round_ == opts_.delay_after_round) {
            bank_.tick_delay();
            transcript_.add({round_, PartyId::Alice, EventType::Delay, nullptr});
        }
        bool stop = false;
        for (auto &ex : expectations_) {
            if (ex.deadline == round_ && !ex.met) {
                Party &who = *parties[static_cast<int>(ex.who)];
                transcript_.add({round_, ex.who, EventType::Abort, std::make_shared<JsonBody>("missing", ex.kind)});
                transcript_.add(
                    {round_, ex.who, EventType::Output, std::make_shared<JsonBody>("token", Token::bottom().str())});
                who.abort();
                stop = true;
            }
        }
        if (stop || (alice.done() && bob.done())) {
            break;
        }
    }
    return std::move(transcript_);
}

}  // namespace msdi
