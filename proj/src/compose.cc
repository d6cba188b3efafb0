#include "msdi/compose.h"

#include <nlohmann/json.hpp>

namespace msdi {

namespace {

std::string answers_str(const std::vector<AnswerA> &a) {
    std::string s;
    for (auto v : a) {
        s += static_cast<char>('0' + v.index());
    }
    return s;
}

std::string answers_str(const std::vector<AnswerB> &b) {
    std::string s;
    for (auto v : b) {
        s += static_cast<char>('0' + v.index());
    }
    return s;
}

std::string order_str(const std::vector<std::size_t> &order) {
    std::string s;
    for (auto i : order) {
        s += std::to_string(i) + ".";
    }
    return s;
}

std::string ot_msg_str(const OTSenderMessage *m) {
    if (!m) {
        return "none";
    }
    return std::string(m->c0 ? "1" : "0") + (m->c1 ? "1" : "0") + "|" + m->t0.str() + "|" + m->t1.str() + "|" +
           trits_str(m->x) + "|" + m->w0.str() + "|" + m->w1.str();
}

std::string commit_str(const BCCommitMessage *m) {
    if (!m) {
        return "none";
    }
    return std::string(m->c ? "1" : "0") + "|" + m->w[0].str() + "|" + m->w[1].str() + "|" + m->w[2].str();
}

std::string reveal_str(const BCRevealMessage *m) {
    if (!m) {
        return "none";
    }
    return trits_str(m->x) + "|" + answers_str(m->a) + "|" + m->r[0].str() + "|" + m->r[1].str() + "|" +
           m->r[2].str();
}

bool tokens_to_bits(const std::vector<Token> &t, std::size_t want, std::vector<bool> &out) {
    if (t.size() != want) {
        return false;
    }
    out.clear();
    for (const auto &v : t) {
        if (!v.is_bit()) {
            return false;
        }
        out.push_back(v.value());
    }
    return true;
}

/// Appends events with rounds shifted past the log's last round.
void append_shifted(Transcript &log, const Transcript &t) {
    int base = log.events().empty() ? 0 : log.events().back().round + 1;
    for (auto e : t.events()) {
        e.round += base;
        log.add(std::move(e));
    }
}

std::vector<InputPoint> full_grid(std::size_t alice_bits, std::size_t bob_bits) {
    std::vector<InputPoint> grid;
    std::size_t total = alice_bits + bob_bits;
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << total); v++) {
        InputPoint p;
        for (std::size_t i = 0; i < alice_bits; i++) {
            p.alice.push_back((v >> (total - 1 - i)) & 1);
        }
        for (std::size_t i = 0; i < bob_bits; i++) {
            p.bob.push_back((v >> (bob_bits - 1 - i)) & 1);
        }
        grid.push_back(p);
    }
    return grid;
}

/// "O_A"/"O_B" for one phase, "O_A1", "O_B1", ... otherwise.
std::string output_register(PartyId p, std::size_t phase, std::size_t phases) {
    std::string s = p == PartyId::Alice ? "O_A" : "O_B";
    return phases == 1 ? s : s + std::to_string(phase + 1);
}

std::string bit_str(bool b) {
    return b ? "1" : "0";
}

}  // namespace

// ---- end states -------------------------------------------------------------------

ExactEndLaw exact_end_law(const std::function<EndState(RunRandomness)> &f, const std::vector<std::string> &registers) {
    ExactEndLaw law(registers);
    PathEnumerator e;
    do {
        RunRandomness r{e, e, e};
        auto s = f(r);
        law.add(s, e.weight());
    } while (e.next());
    return law;
}

EmpiricalEndLaw sampled_end_law(const std::function<EndState(RunRandomness)> &f,
                                const std::vector<std::string> &registers, std::size_t trials, std::uint64_t seed) {
    if (trials == 0) {
        throw DegenerateParameters("sampled_end_law needs at least one trial");
    }
    EmpiricalEndLaw law(registers);
    double w = 1.0 / static_cast<double>(trials);
    for (std::size_t t = 0; t < trials; t++) {
        SeededRun run(derive_seed(seed, t));
        law.add(f(run.view()), w);
    }
    return law;
}

const RegisterSet &registers_of(const std::string &name) {
    static const std::map<std::string, RegisterSet> registry{
        {"ot", {{"O_A", "O_B"}, {"O_A", "O_B"}}},
        {"bc", {{"O_A1", "O_B1", "O_A2", "O_B2"}, {"O_A1", "O_B1", "O_A2", "O_B2"}}},
        {"toy", {{"O_A", "O_B"}, {"O_A", "O_B"}}},
        {"ot.corrupt_alice", {{"A_hat", "O_A", "O_B"}, {"O_B_rel"}}},
        {"ot.corrupt_bob", {{"B_hat", "O_A"}, {"G_rel"}}},
        {"bc.corrupt_alice", {{"A_hat", "O_B1", "O_B2"}, {"O_B2"}}},
        {"bc.corrupt_bob", {{"B_hat", "O_A1", "O_A2"}, {"G_rel"}}},
    };
    auto it = registry.find(name);
    if (it == registry.end()) {
        throw RegisterMismatch("no registers declared for '" + name + "'");
    }
    return it->second;
}

std::vector<std::string> register_registry() {
    return {"ot", "bc", "toy", "ot.corrupt_alice", "ot.corrupt_bob", "bc.corrupt_alice", "bc.corrupt_bob"};
}

// ---- functionalities -----------------------------------------------------------------

std::pair<Token, Token> Functionality::Session::call(std::size_t phase, const std::vector<Token> &alice,
                                                     const std::vector<Token> &bob, Token alice_abort) {
    const auto &phases = f_->phases_;
    if (phase != next_ || phase >= phases.size()) {
        throw OracleProtocolViolation(f_->name_ + ": phase " + std::to_string(phase) + " called, expected " +
                                      std::to_string(next_));
    }
    next_++;
    std::vector<bool> a, b;
    if (!tokens_to_bits(alice, phases[phase].alice_inputs, a) || !tokens_to_bits(bob, phases[phase].bob_inputs, b)) {
        aborted_ = true;
        return {Token::bottom(), Token::bottom()};
    }
    auto out = f_->rule_(phase, a, b, memory_);
    if (alice_abort.is_bottom()) {
        aborted_ = true;
    }
    if (aborted_) {
        out.second = Token::bottom();
    }
    return out;
}

Functionality ideal_ot() {
    return Functionality("ot", {{"transfer", 2, 1}},
                         [](std::size_t, const std::vector<bool> &a, const std::vector<bool> &b, std::vector<bool> &) {
                             return std::make_pair(Token::empty(), Token::bit(a[b[0] ? 1 : 0]));
                         });
}

Functionality ideal_bc() {
    return Functionality("bc", {{"commit", 1, 0}, {"reveal", 0, 0}},
                         [](std::size_t phase, const std::vector<bool> &a, const std::vector<bool> &,
                            std::vector<bool> &mem) {
                             if (phase == 0) {
                                 mem = {a[0]};
                                 return std::make_pair(Token::empty(), Token::empty());
                             }
                             return std::make_pair(Token::empty(), Token::bit(mem.at(0)));
                         });
}

Functionality functionality_by_name(const std::string &name) {
    if (name == "ot") {
        return ideal_ot();
    }
    if (name == "bc") {
        return ideal_bc();
    }
    throw ConfigError("unknown functionality '" + name + "'");
}

std::vector<Token> bits_to_tokens(const std::vector<bool> &bits) {
    std::vector<Token> t;
    for (bool b : bits) {
        t.push_back(Token::bit(b));
    }
    return t;
}

// ---- implementations ---------------------------------------------------------------

namespace {

class IdealSession final : public OracleSession {
   public:
    explicit IdealSession(const Functionality &f) : s_(f.open()) {
    }
    std::pair<Token, Token> call(std::size_t phase, const std::vector<Token> &alice,
                                 const std::vector<Token> &bob) override {
        return s_.call(phase, alice, bob);
    }

   private:
    Functionality::Session s_;
};

class OTSession final : public OracleSession {
   public:
    OTSession(const OTConfig &cfg, std::shared_ptr<const DeviceTable> table, RunRandomness rng, Transcript &log)
        : cfg_(cfg), table_(std::move(table)), rng_(rng), log_(log) {
    }
    std::pair<Token, Token> call(std::size_t phase, const std::vector<Token> &alice,
                                 const std::vector<Token> &bob) override {
        if (phase != 0 || used_) {
            throw OracleProtocolViolation("OT protocol has a single phase");
        }
        used_ = true;
        std::vector<bool> a, b;
        if (!tokens_to_bits(alice, 2, a) || !tokens_to_bits(bob, 1, b)) {
            return {Token::bottom(), Token::bottom()};
        }
        auto bank = DeviceBank::uniform(cfg_.n, table_);
        auto out = ot_run_honest(cfg_, a[0], a[1], b[0], bank, rng_);
        append_shifted(log_, out.transcript);
        return {out.o_a, out.o_b};
    }

   private:
    OTConfig cfg_;
    std::shared_ptr<const DeviceTable> table_;
    RunRandomness rng_;
    Transcript &log_;
    bool used_ = false;
};

class BCSession final : public OracleSession {
   public:
    BCSession(const BCConfig &cfg, std::shared_ptr<const DeviceTable> table, RunRandomness rng, Transcript &log)
        : cfg_(cfg), bank_(DeviceBank::uniform(cfg.n, std::move(table))), rng_(rng), log_(log) {
    }
    std::pair<Token, Token> call(std::size_t phase, const std::vector<Token> &alice,
                                 const std::vector<Token> &bob) override {
        if (phase != next_ || phase > 1) {
            throw OracleProtocolViolation("BC protocol phases run commit then reveal, once each");
        }
        next_++;
        std::vector<bool> a, b;
        if (phase == 0) {
            if (!tokens_to_bits(alice, 1, a) || !bob.empty()) {
                failed_ = true;
                return {Token::bottom(), Token::bottom()};
            }
            rec_ = bc_commit_honest(cfg_, a[0], bank_, rng_);
            log_.add({0, PartyId::Alice, EventType::Send, rec_.commit});
            return {Token::empty(), Token::empty()};
        }
        if (failed_ || !alice.empty() || !bob.empty()) {
            return {Token::bottom(), Token::bottom()};
        }
        return {Token::empty(), bc_reveal_honest(cfg_, rec_)};
    }

   private:
    BCConfig cfg_;
    DeviceBank bank_;
    RunRandomness rng_;
    Transcript &log_;
    BCCommitRecord rec_;
    std::size_t next_ = 0;
    bool failed_ = false;
};

}  // namespace

std::unique_ptr<OracleSession> IdealImplementation::open(RunRandomness, Transcript &) const {
    return std::make_unique<IdealSession>(f_);
}

std::unique_ptr<OracleSession> OTImplementation::open(RunRandomness rng, Transcript &log) const {
    return std::make_unique<OTSession>(cfg_, table_, rng, log);
}

std::unique_ptr<OracleSession> BCImplementation::open(RunRandomness rng, Transcript &log) const {
    return std::make_unique<BCSession>(cfg_, table_, rng, log);
}

// ---- outer protocols ----------------------------------------------------------------

namespace {

class ToyG final : public OracleAidedProtocol {
   public:
    std::string name() const override { return "toy-g"; }
    std::size_t alice_inputs() const override { return 2; }
    std::size_t bob_inputs() const override { return 1; }
    std::vector<CallSite> call_sites() const override { return {{"ot", ideal_ot().phases()}}; }
    EndState run(const std::vector<bool> &alice, const std::vector<bool> &bob, OracleAccess &oracle,
                 RunRandomness) const override {
        auto [oa, ob] = oracle.site(0).call(0, bits_to_tokens(alice), bits_to_tokens(bob));
        return {{"O_A", oa.str()}, {"O_B", ob.str()}};
    }
};

class ToyG2 final : public OracleAidedProtocol {
   public:
    std::string name() const override { return "toy-g2"; }
    std::size_t alice_inputs() const override { return 2; }
    std::size_t bob_inputs() const override { return 1; }
    std::vector<CallSite> call_sites() const override {
        return {{"ot", ideal_ot().phases()}, {"ot", ideal_ot().phases()}};
    }
    EndState run(const std::vector<bool> &alice, const std::vector<bool> &bob, OracleAccess &oracle,
                 RunRandomness) const override {
        auto [oa1, ob1] = oracle.site(0).call(0, bits_to_tokens(alice), bits_to_tokens(bob));
        if (ob1.is_bottom()) {
            return {{"O_A", oa1.str()}, {"O_B", "bot"}};
        }
        auto [oa2, ob2] = oracle.site(1).call(0, bits_to_tokens({alice[1], alice[0]}), bits_to_tokens(bob));
        return {{"O_A", oa1.str() + "," + oa2.str()}, {"O_B", ob1.str() + "," + ob2.str()}};
    }
};

class ToyCommit final : public OracleAidedProtocol {
   public:
    std::string name() const override { return "toy-commit"; }
    std::size_t alice_inputs() const override { return 1; }
    std::size_t bob_inputs() const override { return 0; }
    std::vector<CallSite> call_sites() const override { return {{"bc", ideal_bc().phases()}}; }
    EndState run(const std::vector<bool> &alice, const std::vector<bool> &, OracleAccess &oracle,
                 RunRandomness) const override {
        auto &s = oracle.site(0);
        auto [ca, cb] = s.call(0, bits_to_tokens(alice), {});
        if (cb.is_bottom()) {
            return {{"O_A", ca.str()}, {"O_B", "bot"}};
        }
        auto [ra, rb] = s.call(1, {}, {});
        return {{"O_A", ra.str()}, {"O_B", rb.str()}};
    }
};

class NoCalls final : public OracleAidedProtocol {
   public:
    std::string name() const override { return "none"; }
    std::size_t alice_inputs() const override { return 2; }
    std::size_t bob_inputs() const override { return 1; }
    std::vector<CallSite> call_sites() const override { return {}; }
    EndState run(const std::vector<bool> &, const std::vector<bool> &bob, OracleAccess &,
                 RunRandomness) const override {
        return {{"O_A", "eps"}, {"O_B", bit_str(bob[0])}};
    }
};

class Access final : public OracleAccess {
   public:
    Access(const std::vector<std::shared_ptr<const Implementation>> &providers, RunRandomness rng, Transcript &log)
        : providers_(providers), sessions_(providers.size()), rng_(rng), log_(log) {
    }
    OracleSession &site(std::size_t i) override {
        if (i >= providers_.size()) {
            throw OracleProtocolViolation("no call site " + std::to_string(i));
        }
        if (!sessions_[i]) {
            sessions_[i] = providers_[i]->open(rng_, log_);
        }
        return *sessions_[i];
    }

   private:
    const std::vector<std::shared_ptr<const Implementation>> &providers_;
    std::vector<std::unique_ptr<OracleSession>> sessions_;
    RunRandomness rng_;
    Transcript &log_;
};

}  // namespace

std::shared_ptr<const OracleAidedProtocol> make_outer(const std::string &name) {
    if (name == "toy-g") {
        return std::make_shared<ToyG>();
    }
    if (name == "toy-g2") {
        return std::make_shared<ToyG2>();
    }
    if (name == "toy-commit") {
        return std::make_shared<ToyCommit>();
    }
    if (name == "none") {
        return std::make_shared<NoCalls>();
    }
    throw ConfigError("unknown outer protocol '" + name + "'");
}

ComposedProtocol::ComposedProtocol(std::shared_ptr<const OracleAidedProtocol> outer) : outer_(std::move(outer)) {
    for (const auto &site : outer_->call_sites()) {
        providers_.push_back(std::make_shared<IdealImplementation>(functionality_by_name(site.functionality)));
    }
}

std::size_t ComposedProtocol::concrete_calls() const {
    std::size_t c = 0;
    for (const auto &p : providers_) {
        c += p->concrete() ? 1 : 0;
    }
    return c;
}

ProtocolRun ComposedProtocol::run(const std::vector<bool> &alice, const std::vector<bool> &bob,
                                  RunRandomness rng) const {
    if (alice.size() != outer_->alice_inputs() || bob.size() != outer_->bob_inputs()) {
        throw InterfaceMismatch(outer_->name() + ": wrong number of inputs");
    }
    ProtocolRun run;
    Access access(providers_, rng, run.transcript);
    run.end_state = outer_->run(alice, bob, access, rng);
    return run;
}

ComposedProtocol substitute(const ComposedProtocol &pgf, std::shared_ptr<const Implementation> pf) {
    ComposedProtocol out = pgf;
    auto sites = pgf.outer_->call_sites();
    for (std::size_t i = 0; i < sites.size(); i++) {
        if (sites[i].functionality != pf->implements()) {
            continue;
        }
        if (sites[i].signature != pf->signature()) {
            throw InterfaceMismatch(pf->name() + " does not match the phase signature of call site " +
                                    std::to_string(i) + " (" + sites[i].functionality + ")");
        }
        out.providers_[i] = pf;
    }
    return out;
}

// ---- simulators --------------------------------------------------------------------

std::string InputPoint::str() const {
    std::string s = "a=";
    for (bool b : alice) {
        s += bit_str(b);
    }
    s += ",b=";
    for (bool b : bob) {
        s += bit_str(b);
    }
    return s;
}

OracleGuard::OracleGuard(const Functionality &f, PartyId corrupted, std::vector<std::vector<Token>> honest_inputs,
                         Transcript &log)
    : session_(f.open()), f_(f), corrupted_(corrupted), honest_in_(std::move(honest_inputs)), log_(log) {
}

Token OracleGuard::query(std::size_t phase, const std::vector<Token> &inputs, Token alice_abort) {
    if (phase != session_.next_phase() || phase >= f_.phases().size()) {
        throw OracleProtocolViolation("simulator queried phase " + std::to_string(phase) + " of " + f_.name() +
                                      ", expected " + std::to_string(session_.next_phase()));
    }
    if (corrupted_ == PartyId::Bob && !alice_abort.is_empty()) {
        throw OracleProtocolViolation("only a corrupted Alice can abort");
    }
    queries_++;
    const auto &honest = honest_in_.at(phase);
    bool alice_corrupt = corrupted_ == PartyId::Alice;
    auto out = session_.call(phase, alice_corrupt ? inputs : honest, alice_corrupt ? honest : inputs, alice_abort);
    honest_out_.push_back(alice_corrupt ? out.second : out.first);
    nlohmann::json j{{"phase", phase}, {"abort", alice_abort.str()}};
    log_.add({static_cast<int>(phase), corrupted_, EventType::Send, std::make_shared<JsonBody>("oracle.query", j)});
    return alice_corrupt ? out.first : out.second;
}

ProtocolRun run_with_simulator(Simulator &sim, const Functionality &f, const InputPoint &inputs, RunRandomness rng) {
    if (sim.functionality() != f.name()) {
        throw InterfaceMismatch(sim.name() + " simulates " + sim.functionality() + ", not " + f.name());
    }
    PartyId corrupted = sim.replaces();
    PartyId honest = corrupted == PartyId::Alice ? PartyId::Bob : PartyId::Alice;
    const auto &hbits = honest == PartyId::Alice ? inputs.alice : inputs.bob;
    std::vector<std::vector<Token>> per_phase;
    std::size_t k = 0;
    for (const auto &ph : f.phases()) {
        std::size_t want = honest == PartyId::Alice ? ph.alice_inputs : ph.bob_inputs;
        if (k + want > hbits.size()) {
            throw InterfaceMismatch("too few honest inputs for " + f.name());
        }
        per_phase.push_back(bits_to_tokens(std::vector<bool>(hbits.begin() + k, hbits.begin() + k + want)));
        k += want;
    }
    ProtocolRun run;
    OracleGuard guard(f, corrupted, per_phase, run.transcript);
    run.end_state = sim.simulate(guard, corrupted == PartyId::Alice ? inputs.alice : inputs.bob, rng);
    std::size_t phases = f.phases().size();
    for (std::size_t p = 0; p < phases; p++) {
        // A phase the simulator never reached times out for the honest party.
        Token t = p < guard.honest_outputs().size() ? guard.honest_outputs()[p] : Token::bottom();
        run.end_state[output_register(honest, p, phases)] = t.str();
    }
    return run;
}

std::shared_ptr<OTSenderMessage> OTAliceStrategy::message(const OTConfig &cfg, bool s0, bool s1,
                                                          const OTSenderState &st, Randomness &rng) {
    return ot_sender_message(cfg, s0, s1, st, rng);
}

namespace {

class ZeroXAlice final : public OTAliceStrategy {
   public:
    std::string name() const override { return "zero-x"; }
    std::vector<Trit> choose_x(const OTConfig &cfg, Randomness &) override {
        return std::vector<Trit>(cfg.n, Trit(0));
    }
};

class SwapAlice final : public OTAliceStrategy {
   public:
    std::string name() const override { return "swap"; }
    std::shared_ptr<OTSenderMessage> message(const OTConfig &cfg, bool s0, bool s1, const OTSenderState &st,
                                             Randomness &rng) override {
        return ot_sender_message(cfg, s1, s0, st, rng);
    }
};

class FlipCAlice final : public OTAliceStrategy {
   public:
    std::string name() const override { return "flip-c"; }
    std::shared_ptr<OTSenderMessage> message(const OTConfig &cfg, bool s0, bool s1, const OTSenderState &st,
                                             Randomness &rng) override {
        auto m = ot_sender_message(cfg, s0, s1, st, rng);
        m->c0 = !m->c0;
        m->c1 = !m->c1;
        return m;
    }
};

class SilentAlice final : public OTAliceStrategy {
   public:
    std::string name() const override { return "silent"; }
    std::shared_ptr<OTSenderMessage> message(const OTConfig &, bool, bool, const OTSenderState &,
                                             Randomness &) override {
        return nullptr;
    }
};

class SelectiveW0Alice final : public OTAliceStrategy {
   public:
    std::string name() const override { return "selective-w0"; }
    std::shared_ptr<OTSenderMessage> message(const OTConfig &cfg, bool s0, bool s1, const OTSenderState &st,
                                             Randomness &rng) override {
        auto m = ot_sender_message(cfg, s0, s1, st, rng);
        m->w0 ^= cfg.code->column(0);
        return m;
    }
};

/// Sender party driven by an OTAliceStrategy.
class StrategyOTAlice final : public Party {
   public:
    StrategyOTAlice(const OTConfig &cfg, bool s0, bool s1, OTAliceStrategy &strat)
        : cfg_(cfg), s0_(s0), s1_(s1), strat_(strat) {
    }
    void step(RoundContext &ctx) override {
        DeviceBank &bank = ctx.bank();
        if (ctx.round() == 0) {
            st_.x = strat_.choose_x(cfg_, ctx.rng());
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
        sent_ = strat_.message(cfg_, s0_, s1_, st_, ctx.rng());
        if (sent_) {
            ctx.send(sent_);
        }
        ctx.output(*this, Token::empty());
        finish();
    }
    const OTSenderState &state() const { return st_; }
    std::shared_ptr<const OTSenderMessage> sent() const { return sent_; }

   private:
    OTConfig cfg_;
    bool s0_, s1_;
    OTAliceStrategy &strat_;
    OTSenderState st_;
    std::shared_ptr<const OTSenderMessage> sent_;
};

std::string ot_alice_record(const OTSenderState &st, const OTSenderMessage *m) {
    return trits_str(st.x) + "|" + answers_str(st.a) + "|" + ot_msg_str(m);
}

OTSenderState fire_ot_sender(const OTConfig &cfg, DeviceBank &bank, std::vector<Trit> x, Randomness &device) {
    OTSenderState st;
    st.x = std::move(x);
    st.a.resize(cfg.n);
    st.r0 = BitVec(cfg.n);
    st.r1 = BitVec(cfg.n);
    for (std::size_t i = 0; i < cfg.n; i++) {
        st.a[i] = bank.fire_alice(i, st.x[i], device);
        st.r0.set(i, st.a[i].bit(0));
        st.r1.set(i, st.a[i].bit(1));
    }
    bank.tick_delay();
    return st;
}

class OTCorruptAliceSim final : public Simulator {
   public:
    OTCorruptAliceSim(const OTConfig &cfg, std::shared_ptr<const DeviceTable> table,
                      std::shared_ptr<OTAliceStrategy> strat)
        : cfg_(cfg), table_(std::move(table)), strat_(std::move(strat)) {
    }
    std::string name() const override { return "ot.corrupt_alice"; }
    PartyId replaces() const override { return PartyId::Alice; }
    std::string functionality() const override { return "ot"; }
    EndState simulate(OracleGuard &oracle, const std::vector<bool> &own, RunRandomness rng) override {
        // The simulator holds every device: Alice's ports through the bank,
        // Bob's for both possible choices through the conditional law.
        auto bank = DeviceBank::uniform(cfg_.n, table_);
        auto x = strat_->choose_x(cfg_, rng.alice);
        auto st = fire_ot_sender(cfg_, bank, x, rng.device);
        auto msg = strat_->message(cfg_, own.at(0), own.at(1), st, rng.alice);
        Token oa = Token::empty();
        if (!msg) {
            oa = oracle.query(0, {Token::bit(false), Token::bit(false)}, Token::bottom());
        } else {
            std::array<Token, 2> dec{Token::bottom(), Token::bottom()};
            for (int d = 0; d < 2; d++) {
                std::vector<AnswerB> b(cfg_.n);
                for (std::size_t i = 0; i < cfg_.n; i++) {
                    b[i] = sample_b_given_a(*table_, st.x[i], st.a[i], Trit(d), rng.device);
                }
                dec[d] = ot_bob_decode(cfg_, *msg, b, d == 1);
            }
            if (dec[0].is_bottom() && dec[1].is_bottom()) {
                oa = oracle.query(0, {Token::bit(false), Token::bit(false)}, Token::bottom());
            } else {
                // A one-sided decoding failure has no ideal counterpart; 0 stands in.
                oa = oracle.query(0, {Token::bit(dec[0].is_bit() && dec[0].value()),
                                      Token::bit(dec[1].is_bit() && dec[1].value())});
            }
        }
        return {{"A_hat", ot_alice_record(st, msg.get())}, {"O_A", oa.str()}};
    }

   private:
    OTConfig cfg_;
    std::shared_ptr<const DeviceTable> table_;
    std::shared_ptr<OTAliceStrategy> strat_;
};

/// Cheating Bob's guess of the protected string from his view.
std::pair<int, bool> ot_bob_guess(const OTConfig &cfg, const DeviceTable &table, const std::vector<Trit> &y,
                                  const std::vector<AnswerB> &b, const OTSenderMessage &msg) {
    int choice = ot_choice_bit(y);
    int p = 1 - choice;
    Token dec = ot_bob_decode(cfg, msg, b, choice == 1);
    std::optional<bool> other;
    if (dec.is_bit()) {
        other = (choice ? msg.c1 : msg.c0) ^ dec.value();
    }
    double beta = ot_posterior_bias(cfg, table, y, b, msg, p, other);
    bool cp = p == 0 ? msg.c0 : msg.c1;
    return {p, cp ^ (beta < 0)};
}

EndState ot_bob_registers(const OTConfig &cfg, const DeviceTable &table, const AdaptivePlay &play,
                          const OTSenderMessage &msg) {
    auto [p, g] = ot_bob_guess(cfg, table, play.y, play.b, msg);
    return {{"B_hat", order_str(play.order) + "|" + trits_str(play.y) + "|" + answers_str(play.b) + "|" +
                          ot_msg_str(&msg)},
            {"P", std::to_string(p)},
            {"G", bit_str(g)}};
}

class OTCorruptBobSim final : public Simulator {
   public:
    OTCorruptBobSim(const OTConfig &cfg, std::shared_ptr<const DeviceTable> table,
                    std::shared_ptr<AdaptiveBobStrategy> strat)
        : cfg_(cfg), table_(std::move(table)), strat_(std::move(strat)) {
    }
    std::string name() const override { return "ot.corrupt_bob"; }
    PartyId replaces() const override { return PartyId::Bob; }
    std::string functionality() const override { return "ot"; }
    EndState simulate(OracleGuard &oracle, const std::vector<bool> &, RunRandomness rng) override {
        auto bank = DeviceBank::uniform(cfg_.n, table_);
        auto play = adaptive_bob_play(bank, *strat_, rng.bob, rng.device);
        int choice = ot_choice_bit(play.y);
        Token got = oracle.query(0, {Token::bit(choice == 1)});
        auto st = fire_ot_sender(cfg_, bank, random_trits(cfg_.n, rng.alice), rng.device);
        // The string Bob did not choose is replaced by a fresh uniform bit.
        bool u = rng.alice.bit();
        bool s = got.is_bit() && got.value();
        auto msg = choice ? ot_sender_message(cfg_, u, s, st, rng.alice) : ot_sender_message(cfg_, s, u, st, rng.alice);
        return ot_bob_registers(cfg_, *table_, play, *msg);
    }

   private:
    OTConfig cfg_;
    std::shared_ptr<const DeviceTable> table_;
    std::shared_ptr<AdaptiveBobStrategy> strat_;
};

std::string bc_alice_record(const std::vector<Trit> &x, const std::vector<AnswerA> &a, const std::vector<Trit> &y,
                            const BCCommitMessage *commit, const BCRevealMessage *reveal) {
    return trits_str(x) + "|" + answers_str(a) + "|" + trits_str(y) + "|" + commit_str(commit) + "|" +
           reveal_str(reveal);
}

class BCCorruptAliceSim final : public Simulator {
   public:
    BCCorruptAliceSim(const BCConfig &cfg, std::shared_ptr<const DeviceTable> table,
                      std::shared_ptr<BCAliceStrategy> strat)
        : cfg_(cfg), table_(std::move(table)), strat_(std::move(strat)) {
    }
    std::string name() const override { return "bc.corrupt_alice"; }
    PartyId replaces() const override { return PartyId::Alice; }
    std::string functionality() const override { return "bc"; }
    EndState simulate(OracleGuard &oracle, const std::vector<bool> &own, RunRandomness rng) override {
        bool d = own.at(0);
        auto y = random_trits(cfg_.n, rng.bob);
        auto x = strat_->choose_x(cfg_, rng.alice);
        auto bank = DeviceBank::uniform(cfg_.n, table_);
        std::vector<AnswerA> a(cfg_.n);
        std::vector<AnswerB> b(cfg_.n);
        for (std::size_t i = 0; i < cfg_.n; i++) {
            std::tie(a[i], b[i]) = bank.fire_both(i, x[i], y[i], rng.device);
        }
        bank.tick_delay();
        auto commit = strat_->commit(cfg_, d, x, a, y, rng.alice);
        if (!commit) {
            oracle.query(0, {Token::bit(false)}, Token::bottom());
            return {{"A_hat", bc_alice_record(x, a, y, nullptr, nullptr)}};
        }
        // Extract the committed bit from Alice's device outputs; an
        // undecodable commit is recorded as 0 and can only be opened by luck.
        auto cls = classify_commit(cfg_, bc_blocks(cfg_, a, y), *commit);
        oracle.query(0, {Token::bit(cls.cls == CommitClass::D1)});
        auto reveal = strat_->reveal(cfg_, d, x, a, y, *commit, rng.alice);
        if (!reveal) {
            oracle.query(1, {}, Token::bottom());
        } else {
            Token check = bc_reveal_check(cfg_, y, b, *commit, *reveal);
            oracle.query(1, {}, check.is_bit() ? Token::empty() : Token::bottom());
        }
        return {{"A_hat", bc_alice_record(x, a, y, commit.get(), reveal.get())}};
    }

   private:
    BCConfig cfg_;
    std::shared_ptr<const DeviceTable> table_;
    std::shared_ptr<BCAliceStrategy> strat_;
};

EndState bc_bob_registers(const BCConfig &cfg, const DeviceTable &table, const AdaptivePlay &play,
                          const std::vector<Trit> &ybar, const BCCommitMessage &commit,
                          const BCRevealMessage &reveal) {
    double beta = bc_posterior_bias(cfg, table, play.y, play.b, ybar, commit);
    bool g = commit.c ^ (beta < 0);
    return {{"B_hat", order_str(play.order) + "|" + trits_str(play.y) + "|" + answers_str(play.b) + "|" +
                          trits_str(ybar) + "|" + commit_str(&commit) + "|" + reveal_str(&reveal)},
            {"G", bit_str(g)}};
}

class BCCorruptBobSim final : public Simulator {
   public:
    BCCorruptBobSim(const BCConfig &cfg, std::shared_ptr<const DeviceTable> table,
                    std::shared_ptr<AdaptiveBobStrategy> strat)
        : cfg_(cfg), table_(std::move(table)), strat_(std::move(strat)) {
    }
    std::string name() const override { return "bc.corrupt_bob"; }
    PartyId replaces() const override { return PartyId::Bob; }
    std::string functionality() const override { return "bc"; }
    EndState simulate(OracleGuard &oracle, const std::vector<bool> &, RunRandomness rng) override {
        auto bank = DeviceBank::uniform(cfg_.n, table_);
        auto play = adaptive_bob_play(bank, *strat_, rng.bob, rng.device);
        auto ybar = strat_->announce(play.history, cfg_.n, rng.bob);
        auto x = random_trits(cfg_.n, rng.alice);
        std::vector<AnswerA> a(cfg_.n);
        for (std::size_t i = 0; i < cfg_.n; i++) {
            a[i] = bank.fire_alice(i, x[i], rng.device);
        }
        bank.tick_delay();
        // Commit to a fresh uniform bit; W and C then carry no information on d.
        bool c0 = rng.alice.bit();
        auto commit = bc_commit_message(cfg_, c0, bc_blocks(cfg_, a, ybar));
        oracle.query(0, {});
        Token d = oracle.query(1, {});
        BCRevealMessage reveal;
        if (d.is_bit() && d.value() != c0) {
            try {
                std::tie(x, a) = bc_posterior_opening(cfg_, *table_, play.y, play.b, ybar, *commit,
                                                      commit->c ^ d.value(), x, a, rng.alice);
            } catch (const ZeroProbabilityEvent &) {
                // Bob's view fixes Ext3(R); no opening of d exists and the
                // simulation fails exactly on the mass hiding charges for.
            }
        }
        reveal.x = x;
        reveal.a = a;
        reveal.r = bc_blocks(cfg_, a, ybar);
        return bc_bob_registers(cfg_, *table_, play, ybar, *commit, reveal);
    }

   private:
    BCConfig cfg_;
    std::shared_ptr<const DeviceTable> table_;
    std::shared_ptr<AdaptiveBobStrategy> strat_;
};

}  // namespace

std::unique_ptr<OTAliceStrategy> make_ot_alice_strategy(const std::string &name) {
    if (name == "honest") {
        return std::make_unique<OTAliceStrategy>();
    }
    if (name == "zero-x") {
        return std::make_unique<ZeroXAlice>();
    }
    if (name == "swap") {
        return std::make_unique<SwapAlice>();
    }
    if (name == "flip-c") {
        return std::make_unique<FlipCAlice>();
    }
    if (name == "silent") {
        return std::make_unique<SilentAlice>();
    }
    if (name == "selective-w0") {
        return std::make_unique<SelectiveW0Alice>();
    }
    throw ConfigError("unknown OT sender strategy '" + name + "'");
}

AnswerB sample_b_given_a(const DeviceTable &t, Trit x, AnswerA a, Trit y, Randomness &rng) {
    std::array<double, 4> w{};
    double sum = 0;
    for (int bi = 0; bi < 4; bi++) {
        w[bi] = t.at(x.value(), y.value(), a.index(), bi);
        sum += w[bi];
    }
    if (sum <= 0) {
        throw ZeroProbabilityEvent("Alice's answer " + a.str() + " is impossible on this box");
    }
    return AnswerB::from_index(static_cast<int>(rng.choose(w)));
}

std::pair<std::vector<Trit>, std::vector<AnswerA>> bc_posterior_opening(
    const BCConfig &cfg, const DeviceTable &t, const std::vector<Trit> &y, const std::vector<AnswerB> &b,
    const std::vector<Trit> &ybar, const BCCommitMessage &commit, bool target, std::vector<Trit> x,
    std::vector<AnswerA> a, Randomness &rng) {
    std::size_t n = cfg.n, blk = cfg.block();
    // Per-box prior weight of r_i = a_i(ybar_i) given (y_i, b_i), x uniform.
    std::vector<std::array<double, 2>> pi(n);
    for (std::size_t i = 0; i < n; i++) {
        pi[i] = {0, 0};
        for (int x = 0; x < 3; x++) {
            for (int ai = 0; ai < 4; ai++) {
                int v = AnswerA::from_index(ai).bit(ybar[i].value()) ? 1 : 0;
                pi[i][v] += t.at(x, y[i].value(), ai, b[i].index());
            }
        }
    }
    auto consistent = [&](const std::array<BitVec, 3> &r) {
        for (std::size_t j = 0; j < 3; j++) {
            if (cfg.codes[j]->syndrome(r[j]) != commit.w[j]) {
                return false;
            }
        }
        return (*cfg.ext)(r[0], r[1], r[2]) == target;
    };
    std::array<BitVec, 3> r{BitVec(blk), BitVec(blk), BitVec(blk)};
    if (n <= 15) {
        std::vector<double> w(std::size_t{1} << n, 0.0);
        for (std::uint64_t v = 0; v < w.size(); v++) {
            std::array<BitVec, 3> cand{BitVec(blk), BitVec(blk), BitVec(blk)};
            double p = 1;
            for (std::size_t i = 0; i < n; i++) {
                int bit = (v >> i) & 1;
                cand[i / blk].set(i % blk, bit == 1);
                p *= pi[i][bit];
            }
            if (p > 0 && consistent(cand)) {
                w[v] = p;
            }
        }
        bool any = std::any_of(w.begin(), w.end(), [](double p) { return p > 0; });
        if (!any) {
            throw ZeroProbabilityEvent("no opening is consistent with the commit");
        }
        std::uint64_t v = rng.choose(w);
        for (std::size_t i = 0; i < n; i++) {
            r[i / blk].set(i % blk, (v >> i) & 1);
        }
    } else {
        constexpr std::size_t kMaxAttempts = 1'000'000;
        bool found = false;
        for (std::size_t attempt = 0; attempt < kMaxAttempts && !found; attempt++) {
            for (std::size_t j = 0; j < 3; j++) {
                std::size_t tries = 0;
                do {
                    if (++tries > kMaxAttempts) {
                        throw ZeroProbabilityEvent("rejection sampling of a block opening did not terminate");
                    }
                    for (std::size_t k = 0; k < blk; k++) {
                        r[j].set(k, rng.choose(pi[j * blk + k]) == 1);
                    }
                } while (cfg.codes[j]->syndrome(r[j]) != commit.w[j]);
            }
            found = (*cfg.ext)(r[0], r[1], r[2]) == target;
        }
        if (!found) {
            throw ZeroProbabilityEvent("rejection sampling of an opening did not terminate");
        }
    }
    if (x.size() != n || a.size() != n) {
        throw LengthMismatch("opening has the wrong number of boxes");
    }
    for (std::size_t i = 0; i < n; i++) {
        bool ri = r[i / blk].get(i % blk);
        if (a[i].bit(ybar[i].value()) == ri) {
            continue;
        }
        std::array<double, 12> w{};
        for (int xv = 0; xv < 3; xv++) {
            for (int ai = 0; ai < 4; ai++) {
                if (AnswerA::from_index(ai).bit(ybar[i].value()) == ri) {
                    w[xv * 4 + ai] = t.at(xv, y[i].value(), ai, b[i].index());
                }
            }
        }
        std::size_t k = rng.choose(w);
        x[i] = Trit(static_cast<int>(k / 4));
        a[i] = AnswerA::from_index(static_cast<int>(k % 4));
    }
    return {x, a};
}

SimulationCase ot_corrupt_alice_case(const OTConfig &cfg, std::shared_ptr<const DeviceTable> table,
                                     std::shared_ptr<OTAliceStrategy> strat) {
    cfg.validate();
    SimulationCase c;
    c.name = "ot.corrupt_alice";
    c.functionality = "ot";
    c.strategy = strat->name();
    c.n = cfg.n;
    c.grid = full_grid(2, 1);
    auto cfgp = std::make_shared<OTConfig>(cfg);
    c.real = [cfgp, table, strat](const InputPoint &in, RunRandomness rng) {
        auto bank = DeviceBank::uniform(cfgp->n, table);
        StrategyOTAlice alice(*cfgp, in.alice.at(0), in.alice.at(1), *strat);
        OTBob bob(*cfgp, in.bob.at(0));
        Transport t(bank, rng);
        ProtocolRun run;
        run.transcript = t.run(alice, bob);
        run.end_state = {{"A_hat", ot_alice_record(alice.state(), alice.sent().get())},
                         {"O_A", alice.last_output().str()},
                         {"O_B", bob.last_output().str()}};
        return run;
    };
    c.make_sim = [cfgp, table, strat]() { return std::make_unique<OTCorruptAliceSim>(*cfgp, table, strat); };
    c.derive = [](EndState &s, const InputPoint &in) {
        const std::string &ob = s.at("O_B");
        if (ob == "bot") {
            s["O_B_rel"] = "bot";
        } else {
            bool sd = in.alice.at(in.bob.at(0) ? 1 : 0);
            s["O_B_rel"] = ob == bit_str(sd) ? "eq" : "ne";
        }
    };
    return c;
}

SimulationCase ot_corrupt_bob_case(const OTConfig &cfg, std::shared_ptr<const DeviceTable> table,
                                   std::shared_ptr<AdaptiveBobStrategy> strat) {
    cfg.validate();
    SimulationCase c;
    c.name = "ot.corrupt_bob";
    c.functionality = "ot";
    c.strategy = strat->name();
    c.n = cfg.n;
    c.grid = full_grid(2, 0);
    c.real = [cfg, table, strat](const InputPoint &in, RunRandomness rng) {
        auto bank = DeviceBank::uniform(cfg.n, table);
        auto play = adaptive_bob_play(bank, *strat, rng.bob, rng.device);
        auto st = fire_ot_sender(cfg, bank, random_trits(cfg.n, rng.alice), rng.device);
        auto msg = ot_sender_message(cfg, in.alice.at(0), in.alice.at(1), st, rng.alice);
        ProtocolRun run;
        run.end_state = ot_bob_registers(cfg, *table, play, *msg);
        run.end_state["O_A"] = Token::empty().str();
        return run;
    };
    c.make_sim = [cfg, table, strat]() { return std::make_unique<OTCorruptBobSim>(cfg, table, strat); };
    c.derive = [](EndState &s, const InputPoint &in) {
        bool sp = in.alice.at(s.at("P") == "1" ? 1 : 0);
        s["G_rel"] = s.at("G") == bit_str(sp) ? "eq" : "ne";
    };
    return c;
}

SimulationCase bc_corrupt_alice_case(const BCConfig &cfg, std::shared_ptr<const DeviceTable> table,
                                     std::shared_ptr<BCAliceStrategy> strat) {
    cfg.validate();
    SimulationCase c;
    c.name = "bc.corrupt_alice";
    c.functionality = "bc";
    c.strategy = strat->name();
    c.n = cfg.n;
    c.grid = full_grid(1, 0);
    c.real = [cfg, table, strat](const InputPoint &in, RunRandomness rng) {
        auto bank = DeviceBank::uniform(cfg.n, table);
        auto out = bc_run(cfg, in.alice.at(0), bank, rng, *strat);
        ProtocolRun run;
        run.transcript = out.transcript;
        run.end_state = {{"A_hat", bc_alice_record(out.x, out.a, out.y, out.commit.get(), out.reveal.get())},
                         {"O_B1", out.commit_b.str()},
                         {"O_B2", out.o_b.str()}};
        return run;
    };
    c.make_sim = [cfg, table, strat]() { return std::make_unique<BCCorruptAliceSim>(cfg, table, strat); };
    c.derive = [](EndState &, const InputPoint &) {};
    return c;
}

SimulationCase bc_corrupt_bob_case(const BCConfig &cfg, std::shared_ptr<const DeviceTable> table,
                                   std::shared_ptr<AdaptiveBobStrategy> strat) {
    cfg.validate();
    SimulationCase c;
    c.name = "bc.corrupt_bob";
    c.functionality = "bc";
    c.strategy = strat->name();
    c.n = cfg.n;
    c.grid = full_grid(1, 0);
    c.real = [cfg, table, strat](const InputPoint &in, RunRandomness rng) {
        auto bank = DeviceBank::uniform(cfg.n, table);
        auto play = adaptive_bob_play(bank, *strat, rng.bob, rng.device);
        auto ybar = strat->announce(play.history, cfg.n, rng.bob);
        BCRevealMessage reveal;
        reveal.x = random_trits(cfg.n, rng.alice);
        reveal.a.resize(cfg.n);
        for (std::size_t i = 0; i < cfg.n; i++) {
            reveal.a[i] = bank.fire_alice(i, reveal.x[i], rng.device);
        }
        bank.tick_delay();
        reveal.r = bc_blocks(cfg, reveal.a, ybar);
        auto commit = bc_commit_message(cfg, in.alice.at(0), reveal.r);
        ProtocolRun run;
        run.end_state = bc_bob_registers(cfg, *table, play, ybar, *commit, reveal);
        run.end_state["O_A1"] = Token::empty().str();
        run.end_state["O_A2"] = Token::empty().str();
        return run;
    };
    c.make_sim = [cfg, table, strat]() { return std::make_unique<BCCorruptBobSim>(cfg, table, strat); };
    c.derive = [](EndState &s, const InputPoint &in) {
        s["G_rel"] = s.at("G") == bit_str(in.alice.at(0)) ? "eq" : "ne";
    };
    return c;
}

nlohmann::json SimulationReport::to_json() const {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto &[pt, d] : per_point) {
        pts.push_back({{"point", pt}, {"distance", to_double(d)}, {"distance_exact", to_string(d)}});
    }
    nlohmann::json j{{"case", name},           {"strategy", strategy}, {"mode", eval_mode_name(mode)},
                     {"n", n},                 {"trials", trials},     {"registers", registers},
                     {"per_point", pts},       {"distance", distance}};
    if (distance_exact) {
        j["distance_exact"] = to_string(*distance_exact);
    }
    return j;
}

SimulationReport compare_with_simulator(const SimulationCase &c, EvalMode mode, std::size_t trials,
                                        std::uint64_t seed) {
    SimulationReport rep;
    rep.name = c.name;
    rep.strategy = c.strategy;
    rep.mode = mode;
    rep.n = c.n;
    const auto &regs = registers_of(c.name);
    Functionality f = functionality_by_name(c.functionality);
    auto real_state = [&](const InputPoint &pt, RunRandomness r) {
        auto run = c.real(pt, r);
        c.derive(run.end_state, pt);
        return run.end_state;
    };
    auto ideal_state = [&](const InputPoint &pt, RunRandomness r) {
        auto sim = c.make_sim();
        auto run = run_with_simulator(*sim, f, pt, r);
        c.derive(run.end_state, pt);
        return run.end_state;
    };
    if (mode == EvalMode::ExactTinyN) {
        rep.registers = regs.full;
        Rational worst = 0;
        for (const auto &pt : c.grid) {
            auto real = exact_end_law([&](RunRandomness r) { return real_state(pt, r); }, regs.full);
            auto ideal = exact_end_law([&](RunRandomness r) { return ideal_state(pt, r); }, regs.full);
            Rational d = end_state_distance(real, ideal, regs.full);
            rep.per_point.emplace_back(pt.str(), d);
            worst = std::max(worst, d);
        }
        rep.distance_exact = worst;
        rep.distance = to_double(worst);
        return rep;
    }
    if (trials == 0) {
        throw DegenerateParameters("Monte Carlo comparison needs at least one trial");
    }
    rep.trials = trials;
    rep.registers = {"IN"};
    rep.registers.insert(rep.registers.end(), regs.summary.begin(), regs.summary.end());
    EmpiricalEndLaw real(rep.registers), ideal(rep.registers);
    double w = 1.0 / static_cast<double>(trials);
    for (std::size_t t = 0; t < trials; t++) {
        SeededRandom pick(derive_seed(seed, 2 * trials + t));
        const auto &pt = c.grid[pick.uniform(c.grid.size())];
        SeededRun rr(derive_seed(seed, 2 * t)), ri(derive_seed(seed, 2 * t + 1));
        auto sr = real_state(pt, rr.view());
        auto si = ideal_state(pt, ri.view());
        sr["IN"] = si["IN"] = pt.str();
        real.add(sr, w);
        ideal.add(si, w);
    }
    rep.distance = end_state_distance(real, ideal, rep.registers);
    return rep;
}

// ---- composition check ----------------------------------------------------------

namespace {

/// Inputs split per phase, then every phase called in order.
EndState run_phases(OracleSession &s, const std::vector<PhaseSignature> &phases, const InputPoint &in) {
    EndState out;
    std::size_t ka = 0, kb = 0;
    for (std::size_t p = 0; p < phases.size(); p++) {
        std::vector<bool> a(in.alice.begin() + ka, in.alice.begin() + ka + phases[p].alice_inputs);
        std::vector<bool> b(in.bob.begin() + kb, in.bob.begin() + kb + phases[p].bob_inputs);
        ka += phases[p].alice_inputs;
        kb += phases[p].bob_inputs;
        auto [oa, ob] = s.call(p, bits_to_tokens(a), bits_to_tokens(b));
        out[output_register(PartyId::Alice, p, phases.size())] = oa.str();
        out[output_register(PartyId::Bob, p, phases.size())] = ob.str();
    }
    return out;
}

/// Max over the grid of the distance between two run functions.
std::pair<double, std::optional<Rational>> grid_distance(
    const std::vector<InputPoint> &grid, const std::vector<std::string> &regs,
    const std::function<EndState(const InputPoint &, RunRandomness)> &lhs,
    const std::function<EndState(const InputPoint &, RunRandomness)> &rhs, EvalMode mode, std::size_t trials,
    std::uint64_t seed) {
    if (mode == EvalMode::ExactTinyN) {
        Rational worst = 0;
        for (const auto &pt : grid) {
            auto l = exact_end_law([&](RunRandomness r) { return lhs(pt, r); }, regs);
            auto h = exact_end_law([&](RunRandomness r) { return rhs(pt, r); }, regs);
            worst = std::max(worst, end_state_distance(l, h, regs));
        }
        return {to_double(worst), worst};
    }
    double worst = 0;
    for (std::size_t p = 0; p < grid.size(); p++) {
        const auto &pt = grid[p];
        auto l = sampled_end_law([&](RunRandomness r) { return lhs(pt, r); }, regs, trials, derive_seed(seed, 2 * p));
        auto h =
            sampled_end_law([&](RunRandomness r) { return rhs(pt, r); }, regs, trials, derive_seed(seed, 2 * p + 1));
        worst = std::max(worst, end_state_distance(l, h, regs));
    }
    return {worst, std::nullopt};
}

std::vector<std::string> phase_registers(std::size_t phases) {
    std::vector<std::string> regs;
    for (std::size_t p = 0; p < phases; p++) {
        regs.push_back(output_register(PartyId::Alice, p, phases));
        regs.push_back(output_register(PartyId::Bob, p, phases));
    }
    return regs;
}

}  // namespace

std::pair<double, std::optional<Rational>> implementation_distance(const Implementation &pf, EvalMode mode,
                                                                   std::size_t trials, std::uint64_t seed) {
    IdealImplementation ideal(functionality_by_name(pf.implements()));
    auto phases = ideal.signature();
    if (pf.signature() != phases) {
        throw InterfaceMismatch(pf.name() + " does not match the phases of " + ideal.name());
    }
    std::size_t na = 0, nb = 0;
    for (const auto &p : phases) {
        na += p.alice_inputs;
        nb += p.bob_inputs;
    }
    auto runner = [&phases](const Implementation &impl) {
        return [&impl, &phases](const InputPoint &in, RunRandomness r) {
            Transcript log;
            auto s = impl.open(r, log);
            return run_phases(*s, phases, in);
        };
    };
    return grid_distance(full_grid(na, nb), phase_registers(phases.size()), runner(pf), runner(ideal), mode, trials,
                         seed);
}

nlohmann::json CompositionReport::to_json() const {
    nlohmann::json j{{"outer", outer},
                     {"inner", inner},
                     {"mode", eval_mode_name(mode)},
                     {"trials", trials},
                     {"calls", calls},
                     {"per_call_distance", per_call_distance},
                     {"distance", distance},
                     {"tolerance", tolerance},
                     {"budget", budget()},
                     {"pass", pass()}};
    if (per_call_exact) {
        j["per_call_exact"] = to_string(*per_call_exact);
    }
    if (distance_exact) {
        j["distance_exact"] = to_string(*distance_exact);
    }
    return j;
}

CompositionReport compose_check(const std::string &outer, std::shared_ptr<const Implementation> inner,
                                EvalMode mode, std::size_t trials, std::uint64_t seed, double tolerance) {
    if (mode == EvalMode::MonteCarlo && trials == 0) {
        throw DegenerateParameters("Monte Carlo composition check needs at least one trial");
    }
    auto g = make_outer(outer);
    ComposedProtocol pgf(g);
    ComposedProtocol pg = substitute(pgf, inner);
    CompositionReport rep;
    rep.outer = outer;
    rep.inner = inner->name();
    rep.mode = mode;
    rep.trials = mode == EvalMode::MonteCarlo ? trials : 0;
    rep.calls = pg.concrete_calls();
    rep.tolerance = tolerance;
    std::tie(rep.per_call_distance, rep.per_call_exact) =
        implementation_distance(*inner, mode, trials, derive_seed(seed, 0));
    auto runner = [](const ComposedProtocol &proto) {
        return [&proto](const InputPoint &in, RunRandomness r) { return proto.run(in.alice, in.bob, r).end_state; };
    };
    std::tie(rep.distance, rep.distance_exact) =
        grid_distance(full_grid(g->alice_inputs(), g->bob_inputs()), registers_of("toy").full, runner(pg),
                      runner(pgf), mode, trials, derive_seed(seed, 1));
    return rep;
}

}  // namespace msdi
