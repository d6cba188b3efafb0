#include "msdi/ot.h"

#include "msdi/errors.h"
#include "msdi/extract.h"

namespace msdi {

std::string trits_str(const std::vector<Trit> &v) {
    std::string s(v.size(), '0');
    for (std::size_t i = 0; i < v.size(); i++) {
        s[i] = static_cast<char>('0' + v[i].value());
    }
    return s;
}

std::vector<Trit> parse_trits(const std::string &s) {
    std::vector<Trit> v;
    v.reserve(s.size());
    for (char c : s) {
        v.emplace_back(c - '0');
    }
    return v;
}

std::vector<Trit> random_trits(std::size_t n, Randomness &rng) {
    std::vector<Trit> v;
    v.reserve(n);
    for (std::size_t i = 0; i < n; i++) {
        v.emplace_back(static_cast<int>(rng.uniform(3)));
    }
    return v;
}

OTConfig OTConfig::make(std::shared_ptr<const LinearCode> code, double eps_r, double c_r) {
    OTConfig cfg;
    cfg.n = code->n();
    cfg.seed_len = toeplitz_seed_length(cfg.n, 1);
    cfg.code = std::move(code);
    cfg.eps_r = eps_r;
    cfg.c_r = c_r;
    cfg.validate();
    return cfg;
}

void OTConfig::validate() const {
    if (!code) {
        throw ConfigError("OT config has no code");
    }
    if (n == 0 || code->n() != n) {
        throw ConfigError("OT code length " + std::to_string(code->n()) + " != n = " + std::to_string(n));
    }
    if (seed_len != toeplitz_seed_length(n, 1)) {
        throw ConfigError("OT seed length must be n for a one-bit Toeplitz hash");
    }
    if (!(eps_r >= 0) || !(c_r >= 0)) {
        throw ConfigError("eps_r and c_r must be nonnegative");
    }
    if (!((1 + c_r) * eps_r < delta() / 2)) {
        throw ConfigError("threshold violated: (1 + c_r) eps_r = " + std::to_string((1 + c_r) * eps_r) +
                          " is not below delta / 2 = " + std::to_string(delta() / 2));
    }
}

namespace {

nlohmann::json answers_json(const std::vector<AnswerA> &a) {
    nlohmann::json j = nlohmann::json::array();
    for (auto v : a) {
        j.push_back(v.str());
    }
    return j;
}

nlohmann::json answers_json(const std::vector<AnswerB> &b) {
    nlohmann::json j = nlohmann::json::array();
    for (auto v : b) {
        j.push_back(v.str());
    }
    return j;
}

const bool kRegistered = [] {
    register_decoder(OTSenderMessage::kKind, [](const nlohmann::json &j) { return OTSenderMessage::from_json(j); });
    return true;
}();

}  // namespace

nlohmann::json OTSenderMessage::to_json() const {
    return {{"C0", c0 ? 1 : 0}, {"C1", c1 ? 1 : 0}, {"T0", t0.str()}, {"T1", t1.str()},
            {"X", trits_str(x)},  {"W0", w0.str()},   {"W1", w1.str()}};
}

std::shared_ptr<OTSenderMessage> OTSenderMessage::from_json(const nlohmann::json &j) {
    auto m = std::make_shared<OTSenderMessage>();
    m->c0 = j.at("C0").get<int>() != 0;
    m->c1 = j.at("C1").get<int>() != 0;
    m->t0 = BitVec::from_string(j.at("T0").get<std::string>());
    m->t1 = BitVec::from_string(j.at("T1").get<std::string>());
    m->x = parse_trits(j.at("X").get<std::string>());
    m->w0 = BitVec::from_string(j.at("W0").get<std::string>());
    m->w1 = BitVec::from_string(j.at("W1").get<std::string>());
    return m;
}

nlohmann::json DeviceBatch::to_json() const {
    switch (what) {
        case What::Inputs:
            return {{"inputs", trits_str(inputs)}};
        case What::OutputsA:
            return {{"a", answers_json(a)}};
        case What::OutputsB:
            return {{"b", answers_json(b)}};
    }
    return nullptr;
}

std::shared_ptr<OTSenderMessage> ot_sender_message(const OTConfig &cfg, bool s0, bool s1, const OTSenderState &st,
                                                   Randomness &rng) {
    auto m = std::make_shared<OTSenderMessage>();
    m->t0 = rng.bits(cfg.seed_len);
    m->t1 = rng.bits(cfg.seed_len);
    m->x = st.x;
    m->w0 = cfg.code->syndrome(st.r0);
    m->w1 = cfg.code->syndrome(st.r1);
    m->c0 = s0 ^ seeded_extract(st.r0, m->t0, 1).get(0);
    m->c1 = s1 ^ seeded_extract(st.r1, m->t1, 1).get(0);
    return m;
}

Token ot_bob_decode(const OTConfig &cfg, const OTSenderMessage &msg, const std::vector<AnswerB> &b, bool d) {
    if (b.size() != cfg.n || msg.x.size() != cfg.n) {
        throw LengthMismatch("ot_bob_decode: lengths do not match n");
    }
    BitVec r(cfg.n);
    for (std::size_t i = 0; i < cfg.n; i++) {
        r.set(i, b[i].bit(msg.x[i].value()));
    }
    const Syndrome &w = d ? msg.w1 : msg.w0;
    auto e = cfg.code->decode(cfg.code->syndrome(r) ^ w);
    if (!e) {
        return Token::bottom();
    }
    const BitVec &t = d ? msg.t1 : msg.t0;
    bool c = d ? msg.c1 : msg.c0;
    return Token::bit(c ^ seeded_extract(r ^ *e, t, 1).get(0));
}

void OTAlice::step(RoundContext &ctx) {
    DeviceBank &bank = ctx.bank();
    if (ctx.round() == 0) {
        st_.x = random_trits(cfg_.n, ctx.rng());
        for (std::size_t i = 0; i < cfg_.n; i++) {
            bank.input_alice(i, st_.x[i]);
        }
        auto batch = std::make_shared<DeviceBatch>();
        batch->inputs = st_.x;
        ctx.record(batch);
        return;
    }
    if (!ctx.post_delay()) {
        return;
    }
    st_.a.resize(cfg_.n);
    st_.r0 = BitVec(cfg_.n);
    st_.r1 = BitVec(cfg_.n);
    for (std::size_t i = 0; i < cfg_.n; i++) {
        st_.a[i] = bank.read_alice(i, ctx.device_rng());
        st_.r0.set(i, st_.a[i].bit(0));
        st_.r1.set(i, st_.a[i].bit(1));
    }
    auto batch = std::make_shared<DeviceBatch>();
    batch->what = DeviceBatch::What::OutputsA;
    batch->a = st_.a;
    ctx.record(batch);
    sent_ = ot_sender_message(cfg_, s0_, s1_, st_, ctx.rng());
    ctx.send(sent_);
    ctx.output(*this, Token::empty());
    finish();
}

void OTBob::step(RoundContext &ctx) {
    DeviceBank &bank = ctx.bank();
    if (ctx.round() == 0) {
        y_.assign(cfg_.n, Trit(d_ ? 1 : 0));
        for (std::size_t i = 0; i < cfg_.n; i++) {
            bank.input_bob(i, y_[i]);
        }
        auto batch = std::make_shared<DeviceBatch>();
        batch->inputs = y_;
        ctx.record(batch);
        // Alice sends right after DELAY; one round of slack for delivery.
        ctx.expect(OTSenderMessage::kKind, 2);
        return;
    }
    auto msg = ctx.receive_as<OTSenderMessage>(OTSenderMessage::kKind);
    if (!msg) {
        return;
    }
    b_.resize(cfg_.n);
    for (std::size_t i = 0; i < cfg_.n; i++) {
        b_[i] = bank.read_bob(i, ctx.device_rng());
    }
    auto batch = std::make_shared<DeviceBatch>();
    batch->what = DeviceBatch::What::OutputsB;
    batch->b = b_;
    ctx.record(batch);
    ctx.output(*this, ot_bob_decode(cfg_, *msg, b_, d_));
    finish();
}

nlohmann::json OTOutcome::to_json() const {
    nlohmann::json msgs = nlohmann::json::array();
    for (const auto *e : transcript.messages_from(PartyId::Alice)) {
        msgs.push_back({{"round", e->round}, {"from", "alice"}, {"kind", e->body->kind()}, {"body", e->body->to_json()}});
    }
    for (const auto *e : transcript.messages_from(PartyId::Bob)) {
        msgs.push_back({{"round", e->round}, {"from", "bob"}, {"kind", e->body->kind()}, {"body", e->body->to_json()}});
    }
    nlohmann::json j{{"protocol", "ot"},
                     {"inputs", {{"s0", s0 ? 1 : 0}, {"s1", s1 ? 1 : 0}, {"d", d ? 1 : 0}}},
                     {"X", trits_str(x)},
                     {"Y", trits_str(y)},
                     {"A", answers_json(a)},
                     {"B", answers_json(b)},
                     {"messages", msgs},
                     {"outcome", {{"O_A", o_a.str()}, {"O_B", o_b.str()}}}};
    j["seeds"] = seed ? nlohmann::json{{"run", *seed}} : nlohmann::json(nullptr);
    return j;
}

OTOutcome ot_run_honest(const OTConfig &cfg, bool s0, bool s1, bool d, DeviceBank &bank, RunRandomness rng,
                        bool wire) {
    if (bank.size() != cfg.n) {
        throw ConfigError("OT bank has " + std::to_string(bank.size()) + " devices, expected " + std::to_string(cfg.n));
    }
    OTAlice alice(cfg, s0, s1);
    OTBob bob(cfg, d);
    TransportOptions opts;
    opts.wire = wire;
    Transport t(bank, rng, opts);
    OTOutcome out;
    out.transcript = t.run(alice, bob);
    out.s0 = s0;
    out.s1 = s1;
    out.d = d;
    out.o_a = alice.last_output();
    out.o_b = bob.last_output();
    out.x = alice.state().x;
    out.a = alice.state().a;
    out.y = bob.y();
    out.b = bob.b();
    out.msg = alice.sent();
    return out;
}

OTOutcome ot_run_honest(const OTConfig &cfg, bool s0, bool s1, bool d, DeviceBank &bank, std::uint64_t seed) {
    SeededRun run(seed);
    auto out = ot_run_honest(cfg, s0, s1, d, bank, run.view());
    out.seed = seed;
    return out;
}

namespace {

std::size_t test_failures(DeviceBank &bank, Randomness &party, Randomness &device) {
    std::size_t f = 0;
    for (std::size_t i = 0; i < bank.size(); i++) {
        Trit x(static_cast<int>(party.uniform(3)));
        Trit y(static_cast<int>(party.uniform(3)));
        auto [a, b] = bank.fire_both(i, x, y, device);
        f += ms_predicate(a, b, x, y) ? 0 : 1;
    }
    return f;
}

}  // namespace

TestPhaseResult ot_test_phase(DeviceBank &alice_test, DeviceBank &bob_test, double eps_dd, RunRandomness rng) {
    TestPhaseResult r;
    r.alice_failures = test_failures(alice_test, rng.alice, rng.device);
    r.bob_failures = test_failures(bob_test, rng.bob, rng.device);
    double ta = 2 * eps_dd * static_cast<double>(alice_test.size());
    double tb = 2 * eps_dd * static_cast<double>(bob_test.size());
    r.alice = static_cast<double>(r.alice_failures) >= ta ? TestVerdict::Abort : TestVerdict::Pass;
    r.bob = static_cast<double>(r.bob_failures) >= tb ? TestVerdict::Abort : TestVerdict::Pass;
    return r;
}

OTWithTestOutcome ot_with_test(const OTConfig &cfg, double eps_dd, bool s0, bool s1, bool d, DeviceBank &alice_test,
                               DeviceBank &bob_test, DeviceBank &run_bank, RunRandomness rng) {
    OTWithTestOutcome out;
    out.test = ot_test_phase(alice_test, bob_test, eps_dd, rng);
    if (out.test.passed()) {
        out.run = ot_run_honest(cfg, s0, s1, d, run_bank, rng);
    }
    return out;
}

}  // namespace msdi
