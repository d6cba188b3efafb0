#include "msdi/msdevice.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "msdi/errors.h"

namespace msdi {

Trit::Trit(int v) {
    if (v < 0 || v > 2) {
        throw std::invalid_argument("Trit value outside {0,1,2}");
    }
    v_ = static_cast<std::uint8_t>(v);
}

namespace {

template <class T>
T answer_from_mask(unsigned mask, const char *what) {
    for (int i = 0; i < 4; i++) {
        if (T::kMasks[i] == mask) {
            return T::from_index(i);
        }
    }
    throw std::invalid_argument(std::string("mask is not a valid ") + what);
}

unsigned parse_mask(std::string_view s) {
    if (s.size() != 3) {
        throw std::invalid_argument("answer must have three bits");
    }
    unsigned m = 0;
    for (int i = 0; i < 3; i++) {
        if (s[i] == '1') {
            m |= 1u << i;
        } else if (s[i] != '0') {
            throw std::invalid_argument("answer contains a non-bit character");
        }
    }
    return m;
}

std::string mask_str(unsigned m) {
    std::string s = "000";
    for (int i = 0; i < 3; i++) {
        if ((m >> i) & 1) {
            s[i] = '1';
        }
    }
    return s;
}

}  // namespace

AnswerA AnswerA::from_mask(unsigned mask) {
    return answer_from_mask<AnswerA>(mask, "AnswerA (even parity)");
}
AnswerA AnswerA::from_index(int i) {
    if (i < 0 || i > 3) {
        throw std::invalid_argument("AnswerA index outside 0..3");
    }
    AnswerA a;
    a.index_ = static_cast<std::uint8_t>(i);
    return a;
}
AnswerA AnswerA::parse(std::string_view s) {
    return from_mask(parse_mask(s));
}
std::string AnswerA::str() const {
    return mask_str(mask());
}

AnswerB AnswerB::from_mask(unsigned mask) {
    return answer_from_mask<AnswerB>(mask, "AnswerB (odd parity)");
}
AnswerB AnswerB::from_index(int i) {
    if (i < 0 || i > 3) {
        throw std::invalid_argument("AnswerB index outside 0..3");
    }
    AnswerB b;
    b.index_ = static_cast<std::uint8_t>(i);
    return b;
}
AnswerB AnswerB::parse(std::string_view s) {
    return from_mask(parse_mask(s));
}
std::string AnswerB::str() const {
    return mask_str(mask());
}

bool ms_predicate(AnswerA a, AnswerB b, Trit x, Trit y) {
    return a.bit(y.value()) == b.bit(x.value());
}

namespace {

bool wins(int x, int y, int ai, int bi) {
    return ms_predicate(AnswerA::from_index(ai), AnswerB::from_index(bi), Trit(x), Trit(y));
}

template <class P>
BasicDeviceTable<P> make_ideal() {
    BasicDeviceTable<P> t;
    for (int x = 0; x < 3; x++) {
        for (int y = 0; y < 3; y++) {
            for (int ai = 0; ai < 4; ai++) {
                for (int bi = 0; bi < 4; bi++) {
                    t.at(x, y, ai, bi) = wins(x, y, ai, bi) ? P(1) / P(8) : P(0);
                }
            }
        }
    }
    return t;
}

template <class P>
BasicDeviceTable<P> make_uniform_valid() {
    BasicDeviceTable<P> t;
    for (auto &v : t.raw()) {
        v = P(1) / P(16);
    }
    return t;
}

template <class P>
P value_of(const BasicDeviceTable<P> &t) {
    P acc = 0;
    for (int x = 0; x < 3; x++) {
        for (int y = 0; y < 3; y++) {
            for (int ai = 0; ai < 4; ai++) {
                for (int bi = 0; bi < 4; bi++) {
                    if (wins(x, y, ai, bi)) {
                        acc += t.at(x, y, ai, bi);
                    }
                }
            }
        }
    }
    return acc / P(9);
}

template <class P>
P sup_of(const BasicDeviceTable<P> &a, const BasicDeviceTable<P> &b) {
    P m = 0;
    for (std::size_t i = 0; i < 144; i++) {
        P d = abs_value(P(a.raw()[i] - b.raw()[i]));
        if (d > m) {
            m = d;
        }
    }
    return m;
}

template <class P>
BasicDistribution<P> joint_of(const BasicDeviceTable<P> &t) {
    BasicDistribution<P> d({"x", "y", "a", "b"});
    for (int x = 0; x < 3; x++) {
        for (int y = 0; y < 3; y++) {
            for (int ai = 0; ai < 4; ai++) {
                for (int bi = 0; bi < 4; bi++) {
                    d.add({x, y, AnswerA::kMasks[ai], AnswerB::kMasks[bi]}, t.at(x, y, ai, bi) / P(9));
                }
            }
        }
    }
    return d;
}

template <class P>
BasicDistribution<P> conditional_of(const BasicDeviceTable<P> &t, const Given &g) {
    typename BasicDistribution<P>::Given given;
    if (g.x) {
        given.emplace_back("x", g.x->value());
    }
    if (g.y) {
        given.emplace_back("y", g.y->value());
    }
    if (g.a) {
        given.emplace_back("a", g.a->mask());
    }
    if (g.b) {
        given.emplace_back("b", g.b->mask());
    }
    return joint_of(t).condition(given);
}

template <class P>
P gap_of(const BasicDeviceTable<P> &t) {
    P m = 0;
    for (int own = 0; own < 3; own++) {
        for (int ans = 0; ans < 4; ans++) {
            for (int o1 = 0; o1 < 3; o1++) {
                for (int o2 = o1 + 1; o2 < 3; o2++) {
                    P pa1 = 0, pa2 = 0, pb1 = 0, pb2 = 0;
                    for (int k = 0; k < 4; k++) {
                        pa1 += t.at(own, o1, ans, k);
                        pa2 += t.at(own, o2, ans, k);
                        pb1 += t.at(o1, own, k, ans);
                        pb2 += t.at(o2, own, k, ans);
                    }
                    m = std::max(m, abs_value(P(pa1 - pa2)));
                    m = std::max(m, abs_value(P(pb1 - pb2)));
                }
            }
        }
    }
    return m;
}

}  // namespace

void validate_table(const DeviceTable &t, double tol) {
    for (int x = 0; x < 3; x++) {
        for (int y = 0; y < 3; y++) {
            double s = 0;
            for (double v : t.block(x, y)) {
                if (!(v >= 0) || v > 1 + tol) {
                    throw std::invalid_argument("device table entry outside [0,1]");
                }
                s += v;
            }
            if (std::abs(s - 1) > tol) {
                throw std::invalid_argument("device table block does not sum to 1");
            }
        }
    }
}

void validate_table(const ExactTable &t) {
    for (int x = 0; x < 3; x++) {
        for (int y = 0; y < 3; y++) {
            Rational s = 0;
            for (const auto &v : t.block(x, y)) {
                if (v < 0) {
                    throw std::invalid_argument("device table entry is negative");
                }
                s += v;
            }
            if (s != 1) {
                throw std::invalid_argument("device table block does not sum to 1");
            }
        }
    }
}

ExactTable ideal_table_exact() {
    return make_ideal<Rational>();
}
DeviceTable ideal_table() {
    return make_ideal<double>();
}
ExactTable uniform_valid_table_exact() {
    return make_uniform_valid<Rational>();
}
DeviceTable uniform_valid_table() {
    return make_uniform_valid<double>();
}

DeviceTable to_double_table(const ExactTable &t) {
    DeviceTable r;
    for (std::size_t i = 0; i < 144; i++) {
        r.raw()[i] = to_double(t.raw()[i]);
    }
    return r;
}

ExactTable to_exact_table(const DeviceTable &t) {
    ExactTable r;
    for (std::size_t i = 0; i < 144; i++) {
        r.raw()[i] = exact_from_double(t.raw()[i]);
    }
    return r;
}

DeviceTable mix_tables(const DeviceTable &a, const DeviceTable &b, double p) {
    DeviceTable r;
    for (std::size_t i = 0; i < 144; i++) {
        r.raw()[i] = (1 - p) * a.raw()[i] + p * b.raw()[i];
    }
    return r;
}

ExactTable mix_tables(const ExactTable &a, const ExactTable &b, const Rational &p) {
    ExactTable r;
    for (std::size_t i = 0; i < 144; i++) {
        r.raw()[i] = (1 - p) * a.raw()[i] + p * b.raw()[i];
    }
    return r;
}

double game_value(const DeviceTable &t) {
    return value_of(t);
}
Rational game_value(const ExactTable &t) {
    return value_of(t);
}
double sup_distance(const DeviceTable &a, const DeviceTable &b) {
    return sup_of(a, b);
}
Rational sup_distance(const ExactTable &a, const ExactTable &b) {
    return sup_of(a, b);
}
double signalling_gap(const DeviceTable &t) {
    return gap_of(t);
}
Rational signalling_gap(const ExactTable &t) {
    return gap_of(t);
}

DeviceTable perturb_table(const DeviceTable &base, double epsilon, PerturbMode mode, Randomness &rng) {
    if (!(epsilon >= 0 && epsilon <= 1)) {
        throw std::invalid_argument("perturb_table: epsilon outside [0,1]");
    }
    if (epsilon == 0) {
        return base;
    }
    if (mode == PerturbMode::UniformMix) {
        // Each entry moves by p * |base - 1/16| <= p * (1 - 1/16); choose p so the
        // largest movement equals epsilon (capped at a full mix).
        auto uniform = uniform_valid_table();
        double worst = sup_distance(base, uniform);
        double p = worst > 0 ? std::min(1.0, epsilon / worst) : 0.0;
        return mix_tables(base, uniform, p);
    }
    for (int attempt = 0; attempt < 1000; attempt++) {
        DeviceTable t = base;
        double amp = epsilon / (attempt < 100 ? 1.0 : 2.0);
        for (int x = 0; x < 3; x++) {
            for (int y = 0; y < 3; y++) {
                double s = 0;
                for (int k = 0; k < 16; k++) {
                    double &v = t.at(x, y, k / 4, k % 4);
                    double u = (static_cast<double>(rng.uniform(1u << 20)) / (1u << 20)) * 2 - 1;
                    v = std::max(0.0, v + amp * u);
                    s += v;
                }
                for (int k = 0; k < 16; k++) {
                    t.at(x, y, k / 4, k % 4) /= s;
                }
            }
        }
        if (sup_distance(base, t) <= epsilon) {
            return t;
        }
    }
    throw std::runtime_error("perturb_table: EntryNoise draws kept exceeding epsilon");
}

DeviceTable robust_table(double eps_r) {
    if (!(eps_r >= 0 && eps_r <= 0.5)) {
        throw std::invalid_argument("robust_table: eps_r outside [0, 1/2]");
    }
    // Value of the mix is 1 - p/2.
    return mix_tables(ideal_table(), uniform_valid_table(), 2 * eps_r);
}

ExactTable robust_table_exact(const Rational &eps_r) {
    if (eps_r < 0 || eps_r > Rational(1, 2)) {
        throw std::invalid_argument("robust_table: eps_r outside [0, 1/2]");
    }
    return mix_tables(ideal_table_exact(), uniform_valid_table_exact(), 2 * eps_r);
}

ExactTable forced_111_table_exact() {
    ExactTable t;
    for (int x = 0; x < 3; x++) {
        for (int y = 0; y < 3; y++) {
            for (int ai = 0; ai < 4; ai++) {
                if (AnswerA::from_index(ai).bit(y)) {
                    t.at(x, y, ai, AnswerB::kAllOnes) = Rational(1, 2);
                }
            }
        }
    }
    return t;
}

ExactDistribution device_joint(const ExactTable &t) {
    return joint_of(t);
}
Distribution device_joint(const DeviceTable &t) {
    return joint_of(t);
}
ExactDistribution conditional(const ExactTable &t, const Given &g) {
    return conditional_of(t, g);
}
Distribution conditional(const DeviceTable &t, const Given &g) {
    return conditional_of(t, g);
}

ExactTable deterministic_table(const ClassicalStrategy &s) {
    ExactTable t;
    for (int x = 0; x < 3; x++) {
        for (int y = 0; y < 3; y++) {
            t.at(x, y, s.alice[x].index(), s.bob[y].index()) = 1;
        }
    }
    return t;
}

ClassicalValue classical_value_oracle() {
    int best = -1;
    ClassicalStrategy witness;
    for (int sa = 0; sa < 64; sa++) {
        for (int sb = 0; sb < 64; sb++) {
            int won = 0;
            for (int x = 0; x < 3; x++) {
                for (int y = 0; y < 3; y++) {
                    int ai = (sa >> (2 * x)) & 3;
                    int bi = (sb >> (2 * y)) & 3;
                    won += wins(x, y, ai, bi) ? 1 : 0;
                }
            }
            if (won > best) {
                best = won;
                for (int i = 0; i < 3; i++) {
                    witness.alice[i] = AnswerA::from_index((sa >> (2 * i)) & 3);
                    witness.bob[i] = AnswerB::from_index((sb >> (2 * i)) & 3);
                }
            }
        }
    }
    return {Rational(best, 9), witness};
}

ExactDistribution joint_law(const std::vector<ExactTable> &tables, const std::vector<std::pair<Trit, Trit>> &inputs) {
    if (tables.size() != inputs.size()) {
        throw LengthMismatch("joint_law: one input pair per device required");
    }
    std::size_t n = tables.size();
    double support = std::pow(16.0, static_cast<double>(n));
    if (support > 1e8) {
        throw SupportTooLarge("joint_law: support exceeds 10^8 outcomes");
    }
    std::vector<std::string> vars;
    for (std::size_t i = 0; i < n; i++) {
        vars.push_back("a" + std::to_string(i));
        vars.push_back("b" + std::to_string(i));
    }
    ExactDistribution law(vars);
    std::vector<std::int64_t> o(2 * n);
    std::size_t total = static_cast<std::size_t>(support);
    for (std::size_t code = 0; code < total; code++) {
        Rational p = 1;
        std::size_t c = code;
        for (std::size_t i = 0; i < n && p != 0; i++) {
            int ai = static_cast<int>(c % 4);
            int bi = static_cast<int>((c / 4) % 4);
            c /= 16;
            p *= tables[i].at(inputs[i].first.value(), inputs[i].second.value(), ai, bi);
            o[2 * i] = AnswerA::kMasks[ai];
            o[2 * i + 1] = AnswerB::kMasks[bi];
        }
        if (p != 0) {
            law.add(o, p);
        }
    }
    return law;
}

DeviceBank::DeviceBank(std::vector<std::shared_ptr<const DeviceTable>> tables) {
    devices_.resize(tables.size());
    for (std::size_t i = 0; i < tables.size(); i++) {
        devices_[i].index = i;
        devices_[i].table = std::move(tables[i]);
    }
}

DeviceBank DeviceBank::uniform(std::size_t n, std::shared_ptr<const DeviceTable> table) {
    return DeviceBank(std::vector<std::shared_ptr<const DeviceTable>>(n, std::move(table)));
}

void DeviceBank::input_alice(std::size_t i, Trit x) {
    DeviceHandle &d = devices_.at(i);
    if (d.alice_queried) {
        throw AlreadyFired("device " + std::to_string(i) + " already used by Alice");
    }
    d.alice_queried = true;
    if (clock_ == Clock::PreDelay) {
        d.x = x;
        d.state = DeviceState::Fired;
    }
}

void DeviceBank::input_bob(std::size_t i, Trit y) {
    DeviceHandle &d = devices_.at(i);
    if (d.bob_queried) {
        throw AlreadyFired("device " + std::to_string(i) + " already used by Bob");
    }
    d.bob_queried = true;
    if (clock_ == Clock::PreDelay) {
        d.y = y;
        d.state = DeviceState::Fired;
    }
}

void DeviceBank::draw_joint(DeviceHandle &d, Randomness &rng) {
    // Alice's half from its marginal, then Bob's half given it. Same joint law
    // as one draw over the block, and Alice's half ignores y when the table
    // does not signal.
    const DeviceTable &t = *d.table;
    int x = d.x->value(), y = d.y->value();
    std::array<double, 4> wa{};
    for (int ai = 0; ai < 4; ai++) {
        wa[ai] = (t.at(x, y, ai, 0) + t.at(x, y, ai, 1)) + (t.at(x, y, ai, 2) + t.at(x, y, ai, 3));
    }
    int ai = static_cast<int>(rng.choose(wa));
    std::array<double, 4> wb{};
    for (int bi = 0; bi < 4; bi++) {
        wb[bi] = t.at(x, y, ai, bi);
    }
    d.a = AnswerA::from_index(ai);
    d.b = AnswerB::from_index(static_cast<int>(rng.choose(wb)));
    d.a_known = d.b_known = d.drawn = true;
}

AnswerA DeviceBank::read_alice(std::size_t i, Randomness &rng) {
    DeviceHandle &d = devices_.at(i);
    if (!d.alice_queried) {
        throw std::logic_error("read_alice before input_alice");
    }
    if (d.a_known) {
        return d.a;
    }
    if (d.state == DeviceState::Decohered) {
        d.state = DeviceState::Fired;
    }
    const DeviceTable &t = *d.table;
    if (d.b_known) {
        // Partner half already fixed: conditional of a given b.
        std::array<double, 4> w{};
        double s = 0;
        for (int ai = 0; ai < 4; ai++) {
            w[ai] = t.at(d.x->value(), d.y->value(), ai, d.b.index());
            s += w[ai];
        }
        if (s <= 0) {
            for (int ai = 0; ai < 4; ai++) {
                for (int bi = 0; bi < 4; bi++) {
                    w[ai] += t.at(d.x->value(), d.y->value(), ai, bi);
                }
            }
        }
        d.a = AnswerA::from_index(static_cast<int>(rng.choose(w)));
        d.a_known = d.drawn = true;
        return d.a;
    }
    if (d.y) {
        draw_joint(d, rng);
        return d.a;
    }
    // Partner input unknown: marginal averaged over the partner's inputs.
    std::array<double, 4> w{};
    for (int y = 0; y < 3; y++) {
        for (int ai = 0; ai < 4; ai++) {
            for (int bi = 0; bi < 4; bi++) {
                w[ai] += t.at(d.x->value(), y, ai, bi) / 3;
            }
        }
    }
    d.a = AnswerA::from_index(static_cast<int>(rng.choose(w)));
    d.a_known = true;
    return d.a;
}

AnswerB DeviceBank::read_bob(std::size_t i, Randomness &rng) {
    DeviceHandle &d = devices_.at(i);
    if (!d.bob_queried) {
        throw std::logic_error("read_bob before input_bob");
    }
    if (d.b_known) {
        return d.b;
    }
    if (d.state == DeviceState::Decohered) {
        d.state = DeviceState::Fired;
    }
    const DeviceTable &t = *d.table;
    if (d.a_known) {
        std::array<double, 4> w{};
        double s = 0;
        for (int bi = 0; bi < 4; bi++) {
            w[bi] = t.at(d.x->value(), d.y->value(), d.a.index(), bi);
            s += w[bi];
        }
        if (s <= 0) {
            for (int ai = 0; ai < 4; ai++) {
                for (int bi = 0; bi < 4; bi++) {
                    w[bi] += t.at(d.x->value(), d.y->value(), ai, bi);
                }
            }
        }
        d.b = AnswerB::from_index(static_cast<int>(rng.choose(w)));
        d.b_known = d.drawn = true;
        return d.b;
    }
    if (d.x) {
        draw_joint(d, rng);
        return d.b;
    }
    std::array<double, 4> w{};
    for (int x = 0; x < 3; x++) {
        for (int ai = 0; ai < 4; ai++) {
            for (int bi = 0; bi < 4; bi++) {
                w[bi] += t.at(x, d.y->value(), ai, bi) / 3;
            }
        }
    }
    d.b = AnswerB::from_index(static_cast<int>(rng.choose(w)));
    d.b_known = true;
    return d.b;
}

AnswerA DeviceBank::fire_alice(std::size_t i, Trit x, Randomness &rng) {
    input_alice(i, x);
    return read_alice(i, rng);
}

AnswerB DeviceBank::fire_bob(std::size_t i, Trit y, Randomness &rng) {
    input_bob(i, y);
    return read_bob(i, rng);
}

std::pair<AnswerA, AnswerB> DeviceBank::fire_both(std::size_t i, Trit x, Trit y, Randomness &rng) {
    input_alice(i, x);
    input_bob(i, y);
    DeviceHandle &d = devices_.at(i);
    if (d.state == DeviceState::Decohered) {
        d.state = DeviceState::Fired;
    }
    draw_joint(d, rng);
    return {d.a, d.b};
}

void DeviceBank::tick_delay() {
    if (clock_ == Clock::PostDelay) {
        throw DoubleTick("DELAY already elapsed for this bank");
    }
    clock_ = Clock::PostDelay;
    for (auto &d : devices_) {
        if (d.state == DeviceState::Fresh) {
            d.state = DeviceState::Decohered;
        }
        if (!d.x) {
            d.x = Trit(0);
        }
        if (!d.y) {
            d.y = Trit(0);
        }
    }
}

BankOutcome bank_sample(DeviceBank &bank, Side side, std::size_t index, Trit input, Randomness &rng) {
    BankOutcome r;
    switch (side) {
        case Side::Alice:
            r.a = bank.fire_alice(index, input, rng);
            break;
        case Side::Bob:
            r.b = bank.fire_bob(index, input, rng);
            break;
        case Side::Both: {
            auto [a, b] = bank.fire_both(index, input, input, rng);
            r.a = a;
            r.b = b;
            break;
        }
    }
    return r;
}

namespace {

nlohmann::json order_json() {
    nlohmann::json order = nlohmann::json::array();
    for (int ai = 0; ai < 4; ai++) {
        for (int bi = 0; bi < 4; bi++) {
            order.push_back(AnswerA::from_index(ai).str() + "," + AnswerB::from_index(bi).str());
        }
    }
    return order;
}

std::string block_key(int x, int y) {
    return std::to_string(x) + "," + std::to_string(y);
}

}  // namespace

nlohmann::json table_to_json(const DeviceTable &t) {
    nlohmann::json j;
    j["format"] = "msdi.device_table";
    j["exact"] = false;
    j["order"] = order_json();
    for (int x = 0; x < 3; x++) {
        for (int y = 0; y < 3; y++) {
            auto b = t.block(x, y);
            j["blocks"][block_key(x, y)] = std::vector<double>(b.begin(), b.end());
        }
    }
    return j;
}

nlohmann::json table_to_json(const ExactTable &t) {
    nlohmann::json j;
    j["format"] = "msdi.device_table";
    j["exact"] = true;
    j["order"] = order_json();
    for (int x = 0; x < 3; x++) {
        for (int y = 0; y < 3; y++) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto &v : t.block(x, y)) {
                arr.push_back(to_string(v));
            }
            j["blocks"][block_key(x, y)] = arr;
        }
    }
    return j;
}

ExactTable exact_table_from_json(const nlohmann::json &j) {
    ExactTable t;
    for (int x = 0; x < 3; x++) {
        for (int y = 0; y < 3; y++) {
            const auto &arr = j.at("blocks").at(block_key(x, y));
            if (arr.size() != 16) {
                throw std::invalid_argument("device table block must have 16 entries");
            }
            for (int k = 0; k < 16; k++) {
                const auto &v = arr[k];
                t.at(x, y, k / 4, k % 4) =
                    v.is_string() ? parse_rational(v.get<std::string>()) : exact_from_double(v.get<double>());
            }
        }
    }
    validate_table(t);
    return t;
}

DeviceTable table_from_json(const nlohmann::json &j) {
    DeviceTable t;
    for (int x = 0; x < 3; x++) {
        for (int y = 0; y < 3; y++) {
            const auto &arr = j.at("blocks").at(block_key(x, y));
            if (arr.size() != 16) {
                throw std::invalid_argument("device table block must have 16 entries");
            }
            for (int k = 0; k < 16; k++) {
                const auto &v = arr[k];
                t.at(x, y, k / 4, k % 4) = v.is_string() ? to_double(parse_rational(v.get<std::string>()))
                                                         : v.get<double>();
            }
        }
    }
    validate_table(t, 1e-9);
    return t;
}

}  // namespace msdi
