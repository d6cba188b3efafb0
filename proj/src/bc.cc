#include "msdi/bc.h"

#include <cmath>

#include "msdi/errors.h"

namespace msdi {

BCConfig BCConfig::make(std::shared_ptr<const LinearCode> code, double eps_r, double c_r) {
    BCConfig cfg;
    cfg.n = 3 * code->n();
    cfg.codes = {code, code, code};
    cfg.eps_r = eps_r;
    cfg.c_r = c_r;
    cfg.validate();
    return cfg;
}

double BCConfig::reveal_threshold() const {
    return (1 + c_r) * std::pow(eps_r, 1.0 / 6.0) * static_cast<double>(block());
}

std::vector<std::string> BCConfig::validate() const {
    if (n == 0 || n % 3 != 0) {
        throw ConfigError("BC needs n divisible by 3, got " + std::to_string(n));
    }
    for (std::size_t j = 0; j < 3; j++) {
        if (!codes[j]) {
            throw ConfigError("BC block " + std::to_string(j + 1) + " has no code");
        }
        if (codes[j]->n() != block()) {
            throw ConfigError("BC block " + std::to_string(j + 1) + " code length " + std::to_string(codes[j]->n()) +
                              " != n/3 = " + std::to_string(block()));
        }
    }
    if (!ext) {
        throw ConfigError("BC config has no three-source extractor");
    }
    if (!(eps_r >= 0) || !(c_r >= 0)) {
        throw ConfigError("eps_r and c_r must be nonnegative");
    }
    std::vector<std::string> warn;
    if (block() < 9) {
        warn.push_back("block length " + std::to_string(block()) + " < 9: the trilinear extractor has large bias");
    }
    return warn;
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

std::shared_ptr<MessageBody> y_from_json(const nlohmann::json &j) {
    auto m = std::make_shared<BCYMessage>();
    m->y = parse_trits(j.at("Y").get<std::string>());
    return m;
}

std::shared_ptr<MessageBody> commit_from_json(const nlohmann::json &j) {
    auto m = std::make_shared<BCCommitMessage>();
    m->c = j.at("C").get<int>() != 0;
    for (std::size_t k = 0; k < 3; k++) {
        m->w[k] = BitVec::from_string(j.at("W" + std::to_string(k + 1)).get<std::string>());
    }
    return m;
}

std::shared_ptr<MessageBody> reveal_from_json(const nlohmann::json &j) {
    auto m = std::make_shared<BCRevealMessage>();
    m->x = parse_trits(j.at("X").get<std::string>());
    for (const auto &s : j.at("A")) {
        m->a.push_back(AnswerA::parse(s.get<std::string>()));
    }
    for (std::size_t k = 0; k < 3; k++) {
        m->r[k] = BitVec::from_string(j.at("R" + std::to_string(k + 1)).get<std::string>());
    }
    return m;
}

const bool kRegistered = [] {
    register_decoder(BCYMessage::kKind, y_from_json);
    register_decoder(BCCommitMessage::kKind, commit_from_json);
    register_decoder(BCRevealMessage::kKind, reveal_from_json);
    return true;
}();

}  // namespace

nlohmann::json BCYMessage::to_json() const {
    return {{"Y", trits_str(y)}};
}

nlohmann::json BCCommitMessage::to_json() const {
    return {{"C", c ? 1 : 0}, {"W1", w[0].str()}, {"W2", w[1].str()}, {"W3", w[2].str()}};
}

nlohmann::json BCRevealMessage::to_json() const {
    return {{"X", trits_str(x)}, {"A", answers_json(a)}, {"R1", r[0].str()}, {"R2", r[1].str()}, {"R3", r[2].str()}};
}

BitVec block_bits(const std::vector<AnswerA> &a, const std::vector<Trit> &y, std::size_t j, std::size_t block) {
    if (a.size() < (j + 1) * block || y.size() < (j + 1) * block) {
        throw LengthMismatch("block_bits: answers or inputs shorter than block range");
    }
    BitVec r(block);
    for (std::size_t i = 0; i < block; i++) {
        std::size_t k = j * block + i;
        r.set(i, a[k].bit(y[k].value()));
    }
    return r;
}

BitVec block_bits(const std::vector<AnswerB> &b, const std::vector<Trit> &x, std::size_t j, std::size_t block) {
    if (b.size() < (j + 1) * block || x.size() < (j + 1) * block) {
        throw LengthMismatch("block_bits: answers or inputs shorter than block range");
    }
    BitVec r(block);
    for (std::size_t i = 0; i < block; i++) {
        std::size_t k = j * block + i;
        r.set(i, b[k].bit(x[k].value()));
    }
    return r;
}

std::array<BitVec, 3> bc_blocks(const BCConfig &cfg, const std::vector<AnswerA> &a, const std::vector<Trit> &y) {
    return {block_bits(a, y, 0, cfg.block()), block_bits(a, y, 1, cfg.block()), block_bits(a, y, 2, cfg.block())};
}

std::shared_ptr<BCCommitMessage> bc_commit_message(const BCConfig &cfg, bool d, const std::array<BitVec, 3> &r) {
    auto m = std::make_shared<BCCommitMessage>();
    for (std::size_t j = 0; j < 3; j++) {
        m->w[j] = cfg.codes[j]->syndrome(r[j]);
    }
    m->c = d ^ (*cfg.ext)(r[0], r[1], r[2]);
    return m;
}

Token bc_reveal_check(const BCConfig &cfg, const std::vector<Trit> &y, const std::vector<AnswerB> &b,
                      const BCCommitMessage &commit, const BCRevealMessage &reveal) {
    if (reveal.x.size() != cfg.n || reveal.a.size() != cfg.n) {
        return Token::bottom();
    }
    double tau = cfg.reveal_threshold();
    for (std::size_t j = 0; j < 3; j++) {
        if (reveal.r[j].size() != cfg.block() || commit.w[j].size() != cfg.codes[j]->redundancy()) {
            return Token::bottom();
        }
        if (reveal.r[j] != block_bits(reveal.a, y, j, cfg.block())) {
            return Token::bottom();
        }
        if (commit.w[j] != cfg.codes[j]->syndrome(reveal.r[j])) {
            return Token::bottom();
        }
        auto mismatches = hamming_distance(reveal.r[j], block_bits(b, reveal.x, j, cfg.block()));
        if (static_cast<double>(mismatches) >= tau) {
            return Token::bottom();
        }
    }
    return Token::bit(commit.c ^ (*cfg.ext)(reveal.r[0], reveal.r[1], reveal.r[2]));
}

std::optional<BitVec> closest(const BitVec &r, const Syndrome &w, const LinearCode &code) {
    auto e = code.decode(code.syndrome(r) ^ w);
    if (!e) {
        return std::nullopt;
    }
    return r ^ *e;
}

CommitClassification classify_commit(const BCConfig &cfg, const std::array<BitVec, 3> &r_tilde,
                                     const BCCommitMessage &commit) {
    CommitClassification out;
    bool all = true;
    for (std::size_t j = 0; j < 3; j++) {
        out.closest[j] = closest(r_tilde[j], commit.w[j], *cfg.codes[j]);
        all = all && out.closest[j].has_value();
    }
    if (!all) {
        out.cls = CommitClass::DBottom;
        return out;
    }
    bool b = commit.c ^ (*cfg.ext)(*out.closest[0], *out.closest[1], *out.closest[2]);
    out.cls = b ? CommitClass::D1 : CommitClass::D0;
    return out;
}

const char *commit_class_name(CommitClass c) {
    switch (c) {
        case CommitClass::DBottom:
            return "D_bot";
        case CommitClass::D0:
            return "D_0";
        case CommitClass::D1:
            return "D_1";
    }
    return "?";
}

std::shared_ptr<BCCommitMessage> BCAliceStrategy::commit(const BCConfig &cfg, bool d, const std::vector<Trit> &,
                                                         const std::vector<AnswerA> &a, const std::vector<Trit> &y,
                                                         Randomness &) {
    return bc_commit_message(cfg, d, bc_blocks(cfg, a, y));
}

std::shared_ptr<BCRevealMessage> BCAliceStrategy::reveal(const BCConfig &cfg, bool, const std::vector<Trit> &x,
                                                         const std::vector<AnswerA> &a, const std::vector<Trit> &y,
                                                         const BCCommitMessage &, Randomness &) {
    auto m = std::make_shared<BCRevealMessage>();
    m->x = x;
    m->a = a;
    m->r = bc_blocks(cfg, a, y);
    return m;
}

// Schedule: 0 fire, DELAY, 1 Bob sends Y, 2 Alice commits, 3 Bob accepts the
// commit, 4 Alice reveals, 5 Bob checks.

void BCAlice::step(RoundContext &ctx) {
    DeviceBank &bank = ctx.bank();
    if (ctx.round() == 0) {
        x_ = strat_.choose_x(cfg_, ctx.rng());
        for (std::size_t i = 0; i < cfg_.n; i++) {
            bank.input_alice(i, x_[i]);
        }
        auto batch = std::make_shared<DeviceBatch>();
        batch->inputs = x_;
        ctx.record(batch);
        ctx.expect(BCYMessage::kKind, 2);
        return;
    }
    if (!commit_) {
        auto y = ctx.receive_as<BCYMessage>(BCYMessage::kKind);
        if (!y) {
            return;
        }
        if (y->y.size() != cfg_.n) {
            ctx.output(*this, Token::bottom());
            finish();
            return;
        }
        y_ = y->y;
        a_.resize(cfg_.n);
        for (std::size_t i = 0; i < cfg_.n; i++) {
            a_[i] = bank.read_alice(i, ctx.device_rng());
        }
        auto batch = std::make_shared<DeviceBatch>();
        batch->what = DeviceBatch::What::OutputsA;
        batch->a = a_;
        ctx.record(batch);
        auto c = strat_.commit(cfg_, d_, x_, a_, y_, ctx.rng());
        commit_ = c;
        ctx.send(c);
        ctx.output(*this, Token::empty());
        return;
    }
    if (ctx.round() < 4) {
        return;
    }
    auto r = strat_.reveal(cfg_, d_, x_, a_, y_, *commit_, ctx.rng());
    reveal_ = r;
    if (r) {
        ctx.send(r);
    }
    ctx.output(*this, Token::empty());
    finish();
}

void BCBob::step(RoundContext &ctx) {
    DeviceBank &bank = ctx.bank();
    if (ctx.round() == 0) {
        y_ = random_trits(cfg_.n, ctx.rng());
        for (std::size_t i = 0; i < cfg_.n; i++) {
            bank.input_bob(i, y_[i]);
        }
        auto batch = std::make_shared<DeviceBatch>();
        batch->inputs = y_;
        ctx.record(batch);
        return;
    }
    if (ctx.round() == 1) {
        b_.resize(cfg_.n);
        for (std::size_t i = 0; i < cfg_.n; i++) {
            b_[i] = bank.read_bob(i, ctx.device_rng());
        }
        auto batch = std::make_shared<DeviceBatch>();
        batch->what = DeviceBatch::What::OutputsB;
        batch->b = b_;
        ctx.record(batch);
        auto m = std::make_shared<BCYMessage>();
        m->y = y_;
        ctx.send(m);
        ctx.expect(BCCommitMessage::kKind, 3);
        return;
    }
    if (!commit_) {
        auto c = ctx.receive_as<BCCommitMessage>(BCCommitMessage::kKind);
        if (!c) {
            return;
        }
        commit_ = c;
        ctx.output(*this, Token::empty());
        ctx.expect(BCRevealMessage::kKind, 5);
        return;
    }
    auto r = ctx.receive_as<BCRevealMessage>(BCRevealMessage::kKind);
    if (!r) {
        return;
    }
    ctx.output(*this, bc_reveal_check(cfg_, y_, b_, *commit_, *r));
    finish();
}

nlohmann::json BCOutcome::to_json() const {
    nlohmann::json msgs = nlohmann::json::array();
    for (const auto &e : transcript.events()) {
        if (e.type != EventType::Send) {
            continue;
        }
        const char *phase = e.round <= 3 ? "commit" : "reveal";
        msgs.push_back({{"round", e.round},
                        {"phase", phase},
                        {"from", party_name(e.party)},
                        {"kind", e.body->kind()},
                        {"body", e.body->to_json()}});
    }
    nlohmann::json j{{"protocol", "bc"},
                     {"inputs", {{"d", d ? 1 : 0}}},
                     {"X", trits_str(x)},
                     {"Y", trits_str(y)},
                     {"A", answers_json(a)},
                     {"B", answers_json(b)},
                     {"messages", msgs},
                     {"outcome",
                      {{"commit", {{"O_A", commit_a.str()}, {"O_B", commit_b.str()}}},
                       {"reveal", {{"O_A", o_a.str()}, {"O_B", o_b.str()}}}}}};
    j["seeds"] = seed ? nlohmann::json{{"run", *seed}} : nlohmann::json(nullptr);
    return j;
}

BCOutcome bc_run(const BCConfig &cfg, bool d, DeviceBank &bank, RunRandomness rng, BCAliceStrategy &strategy) {
    if (bank.size() != cfg.n) {
        throw ConfigError("BC bank has " + std::to_string(bank.size()) + " devices, expected " + std::to_string(cfg.n));
    }
    BCAlice alice(cfg, d, strategy);
    BCBob bob(cfg);
    Transport t(bank, rng, TransportOptions{});
    BCOutcome out;
    out.transcript = t.run(alice, bob);
    out.d = d;
    // A run that aborts in the commit phase leaves bottom in both slots.
    const auto &oa = alice.outputs();
    const auto &ob = bob.outputs();
    if (!oa.empty()) {
        out.commit_a = oa[0];
    }
    if (oa.size() > 1) {
        out.o_a = oa[1];
    }
    if (!ob.empty()) {
        out.commit_b = ob[0];
    }
    if (ob.size() > 1) {
        out.o_b = ob[1];
    }
    out.x = alice.x();
    out.a = alice.a();
    out.y = bob.y();
    out.b = bob.b();
    out.commit = alice.commit();
    out.reveal = alice.reveal();
    return out;
}

BCOutcome bc_run_honest(const BCConfig &cfg, bool d, DeviceBank &bank, RunRandomness rng) {
    BCAliceStrategy honest;
    return bc_run(cfg, d, bank, rng, honest);
}

BCOutcome bc_run_honest(const BCConfig &cfg, bool d, DeviceBank &bank, std::uint64_t seed) {
    SeededRun run(seed);
    auto out = bc_run_honest(cfg, d, bank, run.view());
    out.seed = seed;
    return out;
}

BCCommitRecord bc_commit_honest(const BCConfig &cfg, bool d, DeviceBank &bank, RunRandomness rng) {
    if (bank.size() != cfg.n) {
        throw ConfigError("BC bank has " + std::to_string(bank.size()) + " devices, expected " + std::to_string(cfg.n));
    }
    BCCommitRecord rec;
    rec.x = random_trits(cfg.n, rng.alice);
    rec.y = random_trits(cfg.n, rng.bob);
    rec.a.resize(cfg.n);
    rec.b.resize(cfg.n);
    for (std::size_t i = 0; i < cfg.n; i++) {
        auto [a, b] = bank.fire_both(i, rec.x[i], rec.y[i], rng.device);
        rec.a[i] = a;
        rec.b[i] = b;
    }
    bank.tick_delay();
    rec.r = bc_blocks(cfg, rec.a, rec.y);
    rec.commit = bc_commit_message(cfg, d, rec.r);
    return rec;
}

Token bc_reveal_honest(const BCConfig &cfg, const BCCommitRecord &rec) {
    BCRevealMessage rev;
    rev.x = rec.x;
    rev.a = rec.a;
    rev.r = rec.r;
    return bc_reveal_check(cfg, rec.y, rec.b, *rec.commit, rev);
}

}  // namespace msdi
