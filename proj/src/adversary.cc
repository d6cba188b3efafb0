#include "msdi/adversary.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "msdi/errors.h"
#include "msdi/extract.h"

namespace msdi {

// ---- strategies -------------------------------------------------------------

namespace {

std::vector<bool> fired_mask(const BobHistory &h, std::size_t n) {
    std::vector<bool> f(n, false);
    for (const auto &e : h) {
        if (e.index < n) {
            f[e.index] = true;
        }
    }
    return f;
}

bool is_111(AnswerB b) {
    return b.mask() == 0b111;
}

}  // namespace

std::vector<Trit> AdaptiveBobStrategy::announce(const BobHistory &h, std::size_t n, Randomness &) {
    std::vector<Trit> y(n, Trit(0));
    for (const auto &e : h) {
        y.at(e.index) = e.y;
    }
    return y;
}

BobMove AscendingBob::next_move(const BobHistory &h, std::size_t, Randomness &) {
    return {h.size(), y_};
}

BobMove HonestBob::next_move(const BobHistory &h, std::size_t, Randomness &rng) {
    return {h.size(), Trit(static_cast<int>(rng.uniform(3)))};
}

BobMove ShuffledBob::next_move(const BobHistory &h, std::size_t n, Randomness &rng) {
    auto fired = fired_mask(h, n);
    std::size_t pick = rng.uniform(n - h.size());
    for (std::size_t i = 0; i < n; i++) {
        if (!fired[i] && pick-- == 0) {
            return {i, Trit(static_cast<int>(rng.uniform(3)))};
        }
    }
    throw std::logic_error("shuffled: no unfired box");
}

BobMove GreedyBob::next_move(const BobHistory &h, std::size_t n, Randomness &) {
    auto fired = fired_mask(h, n);
    std::size_t block = std::max<std::size_t>(1, n / 3);
    std::array<std::size_t, 3> count{}, left{};
    for (std::size_t i = 0; i < n; i++) {
        left[std::min<std::size_t>(2, i / block)] += fired[i] ? 0 : 1;
    }
    for (const auto &e : h) {
        count[std::min<std::size_t>(2, e.index / block)] += is_111(e.b) ? 1 : 0;
    }
    int best = -1;
    for (int j = 0; j < 3; j++) {
        if (left[j] > 0 && (best < 0 || count[j] > count[best])) {
            best = j;
        }
    }
    int y = 0;
    if (!h.empty()) {
        y = is_111(h.back().b) ? 2 : (h.back().y.value() + 1) % 3;
    }
    for (std::size_t i = static_cast<std::size_t>(best) * block; i < n; i++) {
        if (!fired[i]) {
            return {i, Trit(y)};
        }
    }
    throw std::logic_error("greedy: no unfired box");
}

BobMove ShiftedAnnounceBob::next_move(const BobHistory &h, std::size_t, Randomness &rng) {
    return {h.size(), Trit(static_cast<int>(rng.uniform(3)))};
}

std::vector<Trit> ShiftedAnnounceBob::announce(const BobHistory &h, std::size_t n, Randomness &rng) {
    auto y = AdaptiveBobStrategy::announce(h, n, rng);
    for (auto &t : y) {
        t = Trit((t.value() + shift_) % 3);
    }
    return y;
}

std::unique_ptr<AdaptiveBobStrategy> make_bob_strategy(const std::string &spec) {
    auto colon = spec.find(':');
    std::string kind = spec.substr(0, colon);
    int arg = colon == std::string::npos ? 0 : std::stoi(spec.substr(colon + 1));
    if (kind == "ascending") {
        return std::make_unique<AscendingBob>(Trit(arg));
    }
    if (kind == "honest") {
        return std::make_unique<HonestBob>();
    }
    if (kind == "shuffled") {
        return std::make_unique<ShuffledBob>();
    }
    if (kind == "greedy") {
        return std::make_unique<GreedyBob>();
    }
    if (kind == "shifted") {
        return std::make_unique<ShiftedAnnounceBob>(arg);
    }
    throw ConfigError("unknown Bob strategy '" + spec + "'");
}

AdaptivePlay adaptive_bob_play(DeviceBank &bank, AdaptiveBobStrategy &strat, Randomness &strategy_rng,
                               Randomness &device_rng) {
    std::size_t n = bank.size();
    AdaptivePlay p;
    p.y.assign(n, Trit(0));
    p.b.resize(n);
    std::vector<bool> fired(n, false);
    for (std::size_t step = 0; step < n; step++) {
        BobMove m = strat.next_move(p.history, n, strategy_rng);
        if (m.index >= n || fired[m.index]) {
            throw DuplicateBoxIndex("strategy " + strat.name() + " chose box " + std::to_string(m.index) +
                                    (m.index >= n ? " out of range" : " twice"));
        }
        fired[m.index] = true;
        AnswerB b = bank.fire_bob(m.index, m.y, device_rng);
        p.order.push_back(m.index);
        p.y[m.index] = m.y;
        p.b[m.index] = b;
        p.z.push_back(is_111(b) ? 1 : 0);
        p.history.push_back({m.index, m.y, b});
    }
    return p;
}

// ---- GOOD -------------------------------------------------------------------

const char *good_threshold_name(GoodThreshold t) {
    return t == GoodThreshold::PaperDef_n18 ? "PaperDef_n18" : "ProofBound_n9";
}

std::array<std::size_t, 3> block_111_counts(const std::vector<AnswerB> &b) {
    std::size_t block = b.size() / 3;
    std::array<std::size_t, 3> c{};
    for (std::size_t i = 0; i < 3 * block; i++) {
        c[i / block] += is_111(b[i]) ? 1 : 0;
    }
    return c;
}

bool good_btilde(const std::vector<AnswerB> &b, std::size_t n, GoodThreshold mode) {
    if (n % 3 != 0 || b.size() != n) {
        throw ConfigError("good_btilde needs n divisible by 3 and n answers");
    }
    // Counts are integers, so "<= n/18" is "<= floor(n/18)".
    std::size_t limit = mode == GoodThreshold::PaperDef_n18 ? n / 18 : n / 9;
    for (auto c : block_111_counts(b)) {
        if (c > limit) {
            return false;
        }
    }
    return true;
}

nlohmann::json GoodReport::to_json() const {
    return {{"claim", "good_concentration"},
            {"strategy", strategy},
            {"device", device},
            {"n", n},
            {"trials", trials},
            {"threshold", good_threshold_name(mode)},
            {"not_good", not_good},
            {"fraction", fraction()},
            {"mean_block_count", mean_block_count}};
}

GoodReport eval_good_concentration(std::size_t n, std::shared_ptr<const DeviceTable> table,
                                   AdaptiveBobStrategy &strat, std::size_t trials, std::uint64_t seed,
                                   GoodThreshold mode) {
    GoodReport r;
    r.strategy = strat.name();
    r.n = n;
    r.trials = trials;
    r.mode = mode;
    double total = 0;
    for (std::size_t t = 0; t < trials; t++) {
        SeededRun run(derive_seed(seed, t));
        auto bank = DeviceBank::uniform(n, table);
        auto play = adaptive_bob_play(bank, strat, run.view().bob, run.view().device);
        r.not_good += good_btilde(play.b, n, mode) ? 0 : 1;
        for (auto c : block_111_counts(play.b)) {
            total += static_cast<double>(c);
        }
    }
    r.mean_block_count = trials ? total / (3.0 * static_cast<double>(trials)) : 0;
    return r;
}

Rational not_good_probability(std::size_t n, std::size_t limit, const Rational &q) {
    std::size_t m = n / 3;
    // Pr(Bin(m, q) <= limit), then the three blocks are independent.
    Rational within = 0;
    Rational binom = 1;
    for (std::size_t k = 0; k <= std::min(limit, m); k++) {
        if (k > 0) {
            binom = binom * Rational(static_cast<long long>(m - k + 1)) / Rational(static_cast<long long>(k));
        }
        Rational term = binom;
        for (std::size_t i = 0; i < k; i++) {
            term *= q;
        }
        for (std::size_t i = k; i < m; i++) {
            term *= 1 - q;
        }
        within += term;
    }
    return 1 - within * within * within;
}

std::vector<ZConditional> z_conditionals(std::shared_ptr<const DeviceTable> table, AdaptiveBobStrategy &strat,
                                         std::size_t n) {
    if (n > 4) {
        throw ExactModeTooLarge("z_conditionals enumerates histories only for n <= 4");
    }
    struct Acc {
        BobHistory prefix;
        Rational mass = 0, ones = 0;
    };
    // Keyed by step and the visible history before it.
    std::map<std::vector<int>, Acc> acc;
    PathEnumerator e;
    do {
        auto bank = DeviceBank::uniform(n, table);
        auto play = adaptive_bob_play(bank, strat, e, e);
        Rational w = e.weight();
        std::vector<int> key;
        for (std::size_t j = 0; j < n; j++) {
            std::vector<int> k = key;
            k.insert(k.begin(), static_cast<int>(j));
            auto &a = acc[k];
            if (a.mass == 0) {
                a.prefix.assign(play.history.begin(), play.history.begin() + static_cast<long>(j));
            }
            a.mass += w;
            if (play.z[j]) {
                a.ones += w;
            }
            const auto &ev = play.history[j];
            key.push_back(static_cast<int>(ev.index));
            key.push_back(ev.y.value());
            key.push_back(ev.b.index());
        }
    } while (e.next());
    std::vector<ZConditional> out;
    for (auto &[k, a] : acc) {
        out.push_back({static_cast<std::size_t>(k[0]), a.prefix, a.mass, a.ones / a.mass});
    }
    return out;
}

ExactDistribution adaptive_joint_law(std::shared_ptr<const DeviceTable> table, AdaptiveBobStrategy &strat,
                                     std::size_t n) {
    if (n > 3) {
        throw ExactModeTooLarge("adaptive_joint_law supports n <= 3");
    }
    std::vector<std::string> vars;
    for (const char *v : {"x", "y", "a", "b"}) {
        for (std::size_t i = 0; i < n; i++) {
            vars.push_back(v + std::to_string(i));
        }
    }
    ExactDistribution law(vars);
    PathEnumerator e;
    do {
        auto bank = DeviceBank::uniform(n, table);
        auto play = adaptive_bob_play(bank, strat, e, e);
        auto x = random_trits(n, e);
        ExactDistribution::Outcome o(4 * n);
        for (std::size_t i = 0; i < n; i++) {
            AnswerA a = bank.fire_alice(i, x[i], e);
            o[i] = x[i].value();
            o[n + i] = play.y[i].value();
            o[2 * n + i] = static_cast<std::int64_t>(a.mask());
            o[3 * n + i] = static_cast<std::int64_t>(play.b[i].mask());
        }
        law.add(o, e.weight());
    } while (e.next());
    return law;
}

bool factorizes_per_box(const ExactDistribution &joint, std::size_t n) {
    // Pr(a, b, x, y) * prod_i Pr(b_i x_i y_i) == Pr(b, x, y) * prod_i Pr(a_i b_i x_i y_i)
    std::vector<std::string> bxy;
    for (const char *v : {"x", "y", "b"}) {
        for (std::size_t i = 0; i < n; i++) {
            bxy.push_back(v + std::to_string(i));
        }
    }
    auto p_bxy = joint.marginal(bxy);
    std::vector<ExactDistribution> box_abxy, box_bxy;
    for (std::size_t i = 0; i < n; i++) {
        std::string s = std::to_string(i);
        box_abxy.push_back(joint.marginal({"x" + s, "y" + s, "a" + s, "b" + s}));
        box_bxy.push_back(joint.marginal({"x" + s, "y" + s, "b" + s}));
    }
    // Every a-combination, including ones with zero joint mass.
    std::vector<std::vector<std::int64_t>> a_support(n);
    for (std::size_t i = 0; i < n; i++) {
        for (const auto &[o, p] : box_abxy[i].entries()) {
            if (std::find(a_support[i].begin(), a_support[i].end(), o[2]) == a_support[i].end()) {
                a_support[i].push_back(o[2]);
            }
        }
    }
    for (const auto &[o, pb] : p_bxy.entries()) {
        std::vector<std::size_t> pick(n, 0);
        while (true) {
            ExactDistribution::Outcome full(4 * n);
            Rational rhs = pb;
            Rational lhs = 1;
            for (std::size_t i = 0; i < n; i++) {
                std::int64_t xi = o[i], yi = o[n + i], bi = o[2 * n + i], ai = a_support[i][pick[i]];
                full[i] = xi;
                full[n + i] = yi;
                full[2 * n + i] = ai;
                full[3 * n + i] = bi;
                rhs *= box_abxy[i].prob({xi, yi, ai, bi});
                lhs *= box_bxy[i].prob({xi, yi, bi});
            }
            lhs *= joint.prob(full);
            if (lhs != rhs) {
                return false;
            }
            std::size_t i = 0;
            while (i < n && ++pick[i] == a_support[i].size()) {
                pick[i++] = 0;
            }
            if (i == n) {
                break;
            }
        }
    }
    return true;
}

// ---- common bits ---------------------------------------------------------------

double mismatch_probability(const DeviceTable &t, AnswerA a, Trit x, Trit y) {
    double total = 0, bad = 0;
    for (int bi = 0; bi < 4; bi++) {
        double p = t.at(x.value(), y.value(), a.index(), bi);
        total += p;
        if (AnswerB::from_index(bi).bit(x.value()) != a.bit(y.value())) {
            bad += p;
        }
    }
    if (total <= 0) {
        throw ZeroProbabilityEvent("answer " + a.str() + " impossible for inputs (" + std::to_string(x.value()) +
                                   "," + std::to_string(y.value()) + ")");
    }
    return bad / total;
}

std::vector<std::size_t> common_bit_hamming(const std::vector<std::shared_ptr<const DeviceTable>> &tables,
                                            const std::vector<AnswerA> &a, const std::vector<Trit> &x,
                                            const std::vector<Trit> &y, std::size_t trials, Randomness &rng) {
    std::size_t t = tables.size();
    if (a.size() != t || x.size() != t || y.size() != t) {
        throw LengthMismatch("common_bit_hamming: lengths differ");
    }
    std::vector<double> q(t);
    for (std::size_t i = 0; i < t; i++) {
        q[i] = mismatch_probability(*tables[i], a[i], x[i], y[i]);
    }
    std::vector<std::size_t> hist(t + 1, 0);
    for (std::size_t r = 0; r < trials; r++) {
        std::size_t dist = 0;
        for (std::size_t i = 0; i < t; i++) {
            std::array<double, 4> w{};
            for (int bi = 0; bi < 4; bi++) {
                w[bi] = tables[i]->at(x[i].value(), y[i].value(), a[i].index(), bi);
            }
            AnswerB b = AnswerB::from_index(static_cast<int>(rng.choose(w)));
            dist += b.bit(x[i].value()) != a[i].bit(y[i].value()) ? 1 : 0;
        }
        hist[dist]++;
    }
    return hist;
}

// ---- Fourier posterior -------------------------------------------------------------

namespace {

/// Each coordinate i carries a local variable v in [0, 2^L) with prior pi_i,
/// a constraint image M_i v in GF(2)^K and a sign bit sigma_i(v). Computes
/// Z = Pr(sum M_i v_i = s) and B = E[(-1)^{sum sigma_i} ; sum M_i v_i = s],
/// both scaled by 2^K, by summing over the characters u of GF(2)^K.
class FourierPosterior {
   public:
    FourierPosterior(std::size_t coords, int l, int k) : n_(coords), l_(l), k_(k), flips_(static_cast<std::size_t>(k)) {
        if (k > 26) {
            throw ExactModeTooLarge("Bayes guesser needs 2^" + std::to_string(k) + " characters");
        }
    }
    /// Character bit k toggles tau_i by mask.
    void add_flip(int k, std::size_t i, std::uint8_t mask) { flips_[static_cast<std::size_t>(k)].push_back({i, mask}); }

    std::pair<double, double> run(const std::vector<std::array<double, 8>> &prior,
                                  const std::vector<std::array<std::uint8_t, 8>> &sign, const BitVec &s) const {
        std::size_t nv = std::size_t{1} << l_;
        std::vector<std::array<double, 8>> phi(n_), psi(n_);
        for (std::size_t i = 0; i < n_; i++) {
            for (std::size_t tau = 0; tau < nv; tau++) {
                double f = 0, g = 0;
                for (std::size_t v = 0; v < nv; v++) {
                    double c = (std::popcount(tau & v) & 1) ? -prior[i][v] : prior[i][v];
                    f += c;
                    g += sign[i][v] ? -c : c;
                }
                phi[i][tau] = f;
                psi[i][tau] = g;
            }
        }
        std::vector<std::uint8_t> tau(n_, 0);
        double z = 0, b = 0;
        bool sgn = false;
        std::uint64_t total = std::uint64_t{1} << k_;
        for (std::uint64_t g = 0; g < total; g++) {
            if (g > 0) {
                auto k = static_cast<std::size_t>(std::countr_zero(g));
                for (const auto &[i, m] : flips_[k]) {
                    tau[i] ^= m;
                }
                sgn ^= s.get(k);
            }
            double pz = 1, pb = 1;
            for (std::size_t i = 0; i < n_; i++) {
                pz *= phi[i][tau[i]];
                pb *= psi[i][tau[i]];
            }
            z += sgn ? -pz : pz;
            b += sgn ? -pb : pb;
        }
        return {z, b};
    }

   private:
    std::size_t n_;
    int l_, k_;
    std::vector<std::vector<std::pair<std::size_t, std::uint8_t>>> flips_;
};

/// Pr(a | x, y, b) over answer indices; x averaged out when unknown.
std::array<double, 4> answer_posterior(const DeviceTable &t, std::optional<Trit> x, Trit y, AnswerB b) {
    std::array<double, 4> w{};
    double s = 0;
    for (int xi = 0; xi < 3; xi++) {
        if (x && x->value() != xi) {
            continue;
        }
        for (int ai = 0; ai < 4; ai++) {
            w[ai] += t.at(xi, y.value(), ai, b.index());
        }
    }
    for (double v : w) {
        s += v;
    }
    if (s <= 0) {
        throw ZeroProbabilityEvent("Bob's answer " + b.str() + " is impossible under the device table");
    }
    for (double &v : w) {
        v /= s;
    }
    return w;
}

double clamp_bias(double z, double b) {
    if (!(z > 0)) {
        return 0;
    }
    return std::clamp(b / z, -1.0, 1.0);
}

}  // namespace

double ot_posterior_bias(const OTConfig &cfg, const DeviceTable &table, const std::vector<Trit> &y,
                         const std::vector<AnswerB> &b, const OTSenderMessage &msg, int p,
                         std::optional<bool> other_mask) {
    std::size_t n = cfg.n;
    const LinearCode &code = *cfg.code;
    int m = static_cast<int>(code.redundancy());
    int o = 1 - p;
    int k = 2 * m + (other_mask ? 1 : 0);
    FourierPosterior fp(n, 2, k);
    const BitVec &tp = p == 0 ? msg.t0 : msg.t1;
    const BitVec &to = p == 0 ? msg.t1 : msg.t0;
    BitVec tp_eff = tp.slice(0, n), to_eff = to.slice(0, n);
    for (int r = 0; r < m; r++) {
        const BitVec &row = code.rows()[static_cast<std::size_t>(r)];
        for (std::size_t i = 0; i < n; i++) {
            if (row.get(i)) {
                fp.add_flip(r, i, 1);
                fp.add_flip(m + r, i, 2);
            }
        }
    }
    if (other_mask) {
        for (std::size_t i = 0; i < n; i++) {
            if (to_eff.get(i)) {
                fp.add_flip(2 * m, i, 2);
            }
        }
    }
    std::vector<std::array<double, 8>> prior(n);
    std::vector<std::array<std::uint8_t, 8>> sign(n);
    for (std::size_t i = 0; i < n; i++) {
        auto post = answer_posterior(table, msg.x[i], y[i], b[i]);
        prior[i].fill(0);
        sign[i].fill(0);
        for (int ai = 0; ai < 4; ai++) {
            AnswerA a = AnswerA::from_index(ai);
            int v = (a.bit(p) ? 1 : 0) | (a.bit(o) ? 2 : 0);
            prior[i][static_cast<std::size_t>(v)] += post[static_cast<std::size_t>(ai)];
        }
        for (int v = 0; v < 4; v++) {
            sign[i][static_cast<std::size_t>(v)] = tp_eff.get(i) && (v & 1);
        }
    }
    BitVec s(static_cast<std::size_t>(k));
    const Syndrome &wp = p == 0 ? msg.w0 : msg.w1;
    const Syndrome &wo = p == 0 ? msg.w1 : msg.w0;
    for (int r = 0; r < m; r++) {
        s.set(static_cast<std::size_t>(r), wp.get(static_cast<std::size_t>(r)));
        s.set(static_cast<std::size_t>(m + r), wo.get(static_cast<std::size_t>(r)));
    }
    if (other_mask) {
        s.set(static_cast<std::size_t>(2 * m), *other_mask);
    }
    auto [z, bb] = fp.run(prior, sign, s);
    return clamp_bias(z, bb);
}

double bc_posterior_bias(const BCConfig &cfg, const DeviceTable &table, const std::vector<Trit> &y,
                         const std::vector<AnswerB> &b, const std::vector<Trit> &ybar, const BCCommitMessage &commit) {
    if (cfg.ext->name() != "trilinear") {
        throw ConfigError("the BC Bayes guesser needs the trilinear extractor");
    }
    std::size_t blk = cfg.block();
    int k = 0;
    std::array<int, 3> off{};
    for (int j = 0; j < 3; j++) {
        off[static_cast<std::size_t>(j)] = k;
        k += static_cast<int>(cfg.codes[static_cast<std::size_t>(j)]->redundancy());
    }
    FourierPosterior fp(blk, 3, k);
    BitVec s(static_cast<std::size_t>(k));
    for (std::size_t j = 0; j < 3; j++) {
        const auto &rows = cfg.codes[j]->rows();
        for (std::size_t r = 0; r < rows.size(); r++) {
            for (std::size_t i = 0; i < blk; i++) {
                if (rows[r].get(i)) {
                    fp.add_flip(off[j] + static_cast<int>(r), i, static_cast<std::uint8_t>(1u << j));
                }
            }
            s.set(static_cast<std::size_t>(off[j]) + r, commit.w[j].get(r));
        }
    }
    std::vector<std::array<double, 8>> prior(blk);
    std::vector<std::array<std::uint8_t, 8>> sign(blk);
    for (std::size_t i = 0; i < blk; i++) {
        std::array<std::array<double, 2>, 3> marg{};
        for (std::size_t j = 0; j < 3; j++) {
            std::size_t box = j * blk + i;
            auto post = answer_posterior(table, std::nullopt, y[box], b[box]);
            for (int ai = 0; ai < 4; ai++) {
                marg[j][AnswerA::from_index(ai).bit(ybar[box].value()) ? 1 : 0] += post[static_cast<std::size_t>(ai)];
            }
        }
        for (std::size_t v = 0; v < 8; v++) {
            prior[i][v] = marg[0][v & 1] * marg[1][(v >> 1) & 1] * marg[2][(v >> 2) & 1];
            sign[i][v] = std::popcount(v) >= 2;
        }
    }
    auto [z, bb] = fp.run(prior, sign, s);
    return clamp_bias(z, bb);
}

// ---- OT sender security -----------------------------------------------------------

const char *eval_mode_name(EvalMode m) {
    return m == EvalMode::ExactTinyN ? "exact" : "monte_carlo";
}

int ot_choice_bit(const std::vector<Trit> &y) {
    std::size_t l0 = 0;
    for (auto t : y) {
        l0 += t.value() == 0 ? 1 : 0;
    }
    return 2 * l0 <= y.size() ? 1 : 0;
}

namespace {

std::string rational_str(const std::optional<Rational> &r) {
    return r ? to_string(*r) : std::string();
}

/// Sum over views of max_r Pr(view, r): the average guessing probability.
Rational guess_probability(const std::map<std::vector<std::int64_t>, std::map<std::int64_t, Rational>> &m) {
    Rational g = 0;
    for (const auto &[v, rs] : m) {
        Rational best = 0;
        for (const auto &[r, p] : rs) {
            best = std::max(best, p);
        }
        g += best;
    }
    return g;
}

double bits_of(const Rational &guess) {
    return -std::log2(to_double(guess));
}

void exact_ot(const OTConfig &cfg, std::shared_ptr<const DeviceTable> table, AdaptiveBobStrategy &strat,
              OTSecurityReport &rep) {
    std::size_t n = cfg.n;
    if (n > 4) {
        throw ExactModeTooLarge("exact OT sender security needs n <= 4, got " + std::to_string(n));
    }
    std::size_t sl = cfg.seed_len;
    if (2 * sl > 16) {
        throw ExactModeTooLarge("exact OT sender security: seed space too large");
    }
    // view -> (rp, ro) -> weight
    std::map<std::vector<std::int64_t>, std::map<std::pair<std::uint64_t, std::uint64_t>, Rational>> groups;
    std::map<std::vector<std::int64_t>, std::map<std::int64_t, Rational>> whole;
    std::vector<std::map<std::vector<std::int64_t>, std::map<std::int64_t, Rational>>> per_box(n), uncommon(n);
    std::vector<Rational> uncommon_mass(n, Rational(0));
    Rational choice1 = 0;
    Rational seed_w = Rational(1) / Rational(static_cast<long long>(1) << (2 * sl));
    PathEnumerator e;
    do {
        auto bank = DeviceBank::uniform(n, table);
        auto play = adaptive_bob_play(bank, strat, e, e);
        OTSenderState st;
        st.x = random_trits(n, e);
        st.a.resize(n);
        st.r0 = BitVec(n);
        st.r1 = BitVec(n);
        for (std::size_t i = 0; i < n; i++) {
            st.a[i] = bank.fire_alice(i, st.x[i], e);
            st.r0.set(i, st.a[i].bit(0));
            st.r1.set(i, st.a[i].bit(1));
        }
        bank.tick_delay();
        Rational w = e.weight();
        int choice = ot_choice_bit(play.y);
        int p = 1 - choice;
        if (choice) {
            choice1 += w;
        }
        const BitVec &rp = p == 0 ? st.r0 : st.r1;
        const BitVec &ro = p == 0 ? st.r1 : st.r0;
        std::vector<std::int64_t> base;
        for (auto i : play.order) {
            base.push_back(static_cast<std::int64_t>(i));
        }
        for (std::size_t i = 0; i < n; i++) {
            base.push_back(play.y[i].value());
            base.push_back(play.b[i].index());
            base.push_back(st.x[i].value());
        }
        whole[base][static_cast<std::int64_t>(rp.to_u64())] += w;
        for (std::size_t i = 0; i < n; i++) {
            per_box[i][base][rp.get(i) ? 1 : 0] += w;
            if (play.y[i].value() != p) {
                uncommon[i][base][rp.get(i) ? 1 : 0] += w;
                uncommon_mass[i] += w;
            }
        }
        groups[base][{rp.to_u64(), ro.to_u64()}] += w;
    } while (e.next());
    // Seeds are independent of the path, so sum them per (view, rp, ro) group.
    std::size_t ns = std::size_t{1} << sl;
    std::vector<BitVec> seeds;
    for (std::uint64_t t = 0; t < ns; t++) {
        seeds.push_back(BitVec::from_u64(t, sl));
    }
    Rational dist = 0;
    for (const auto &[base, rs] : groups) {
        for (std::size_t tp = 0; tp < ns; tp++) {
            for (std::size_t to = 0; to < ns; to++) {
                // (wp, wo, eo) -> Pr[e=0] - Pr[e=1]
                std::map<std::array<std::uint64_t, 3>, Rational> diff;
                for (const auto &[rr, w] : rs) {
                    BitVec rp = BitVec::from_u64(rr.first, n), ro = BitVec::from_u64(rr.second, n);
                    bool ep = seeded_extract(rp, seeds[tp], 1).get(0);
                    bool eo = seeded_extract(ro, seeds[to], 1).get(0);
                    std::array<std::uint64_t, 3> key{cfg.code->syndrome(rp).to_u64(), cfg.code->syndrome(ro).to_u64(),
                                                     eo ? 1u : 0u};
                    if (ep) {
                        diff[key] -= w;
                    } else {
                        diff[key] += w;
                    }
                }
                for (const auto &[k, v] : diff) {
                    dist += abs_value(v);
                }
            }
        }
    }
    dist *= seed_w;
    rep.masked_distance_exact = dist;
    rep.masked_distance = to_double(dist);
    rep.choice1_rate = to_double(choice1);
    rep.min_entropy = bits_of(guess_probability(whole));
    for (std::size_t i = 0; i < n; i++) {
        Rational g = guess_probability(per_box[i]);
        rep.box_guess_prob.push_back(g);
        rep.box_min_entropy.push_back(bits_of(g));
        if (uncommon_mass[i] == 0) {
            rep.box_uncommon_guess_prob.emplace_back();
        } else {
            rep.box_uncommon_guess_prob.emplace_back(guess_probability(uncommon[i]) / uncommon_mass[i]);
        }
    }
    rep.trials = e.paths_visited();
}

}  // namespace

nlohmann::json OTSecurityReport::to_json() const {
    nlohmann::json j{{"claim", "ot_sender_security"},
                     {"strategy", strategy},
                     {"mode", eval_mode_name(mode)},
                     {"n", n},
                     {"trials", trials},
                     {"choice1_rate", choice1_rate},
                     {"masked_distance", masked_distance}};
    if (masked_distance_exact) {
        j["masked_distance_exact"] = rational_str(masked_distance_exact);
    }
    if (mode == EvalMode::ExactTinyN) {
        j["min_entropy"] = min_entropy;
        j["box_min_entropy"] = box_min_entropy;
        nlohmann::json g = nlohmann::json::array();
        for (const auto &r : box_guess_prob) {
            g.push_back(to_string(r));
        }
        j["box_guess_prob"] = g;
        nlohmann::json u = nlohmann::json::array();
        for (const auto &r : box_uncommon_guess_prob) {
            u.push_back(r ? nlohmann::json(to_string(*r)) : nlohmann::json(nullptr));
        }
        j["box_uncommon_guess_prob"] = u;
    } else {
        j["successes"] = successes;
        j["advantage"] = advantage;
        j["bayes_advantage"] = bayes_advantage;
        j["choice_decoded"] = choice_decoded;
    }
    return j;
}

OTSecurityReport eval_ot_sender_security(const OTConfig &cfg, std::shared_ptr<const DeviceTable> table,
                                         AdaptiveBobStrategy &strat, EvalMode mode, std::size_t trials,
                                         std::uint64_t seed) {
    cfg.validate();
    OTSecurityReport rep;
    rep.strategy = strat.name();
    rep.mode = mode;
    rep.n = cfg.n;
    if (mode == EvalMode::ExactTinyN) {
        exact_ot(cfg, table, strat, rep);
        return rep;
    }
    rep.trials = trials;
    double bias_sum = 0;
    std::size_t choice1 = 0;
    for (std::size_t t = 0; t < trials; t++) {
        SeededRun run(derive_seed(seed, t));
        auto rng = run.view();
        auto bank = DeviceBank::uniform(cfg.n, table);
        auto play = adaptive_bob_play(bank, strat, rng.bob, rng.device);
        OTSenderState st;
        st.x = random_trits(cfg.n, rng.alice);
        st.a.resize(cfg.n);
        st.r0 = BitVec(cfg.n);
        st.r1 = BitVec(cfg.n);
        for (std::size_t i = 0; i < cfg.n; i++) {
            st.a[i] = bank.fire_alice(i, st.x[i], rng.device);
            st.r0.set(i, st.a[i].bit(0));
            st.r1.set(i, st.a[i].bit(1));
        }
        bank.tick_delay();
        bool s0 = rng.alice.bit(), s1 = rng.alice.bit();
        auto msg = ot_sender_message(cfg, s0, s1, st, rng.alice);
        int choice = ot_choice_bit(play.y);
        int p = 1 - choice;
        choice1 += static_cast<std::size_t>(choice);
        bool so = p == 0 ? s1 : s0;
        bool co = p == 0 ? msg->c1 : msg->c0;
        double beta = ot_posterior_bias(cfg, *table, play.y, play.b, *msg, p, co ^ so);
        bias_sum += std::abs(beta);
        bool e_guess = beta < 0;
        bool cp = p == 0 ? msg->c0 : msg->c1;
        bool sp = p == 0 ? s0 : s1;
        rep.successes += (cp ^ e_guess) == sp ? 1 : 0;
        rep.choice_decoded += ot_bob_decode(cfg, *msg, play.b, choice == 1) == Token::bit(choice ? s1 : s0) ? 1 : 0;
    }
    double tr = static_cast<double>(std::max<std::size_t>(1, trials));
    rep.choice1_rate = static_cast<double>(choice1) / tr;
    rep.masked_distance = bias_sum / tr;
    rep.advantage = static_cast<double>(rep.successes) / tr - 0.5;
    rep.bayes_advantage = rep.masked_distance / 2;
    return rep;
}

// ---- BC hiding ------------------------------------------------------------------

nlohmann::json HidingReport::to_json() const {
    nlohmann::json j{{"claim", "bc_hiding"}, {"strategy", strategy}, {"mode", eval_mode_name(mode)},
                     {"n", n},              {"trials", trials},     {"distance", distance}};
    if (distance_exact) {
        j["distance_exact"] = rational_str(distance_exact);
    }
    if (mode == EvalMode::MonteCarlo) {
        j["successes"] = successes;
        j["advantage"] = advantage;
        j["bayes_advantage"] = bayes_advantage;
    }
    return j;
}

HidingReport eval_bc_hiding(const BCConfig &cfg, std::shared_ptr<const DeviceTable> table,
                            AdaptiveBobStrategy &strat, EvalMode mode, std::size_t trials, std::uint64_t seed) {
    cfg.validate();
    HidingReport rep;
    rep.strategy = strat.name();
    rep.mode = mode;
    rep.n = cfg.n;
    if (mode == EvalMode::ExactTinyN) {
        if (cfg.n != 3) {
            throw ExactModeTooLarge("exact BC hiding enumerates n = 3 only, got " + std::to_string(cfg.n));
        }
        std::map<std::vector<std::int64_t>, std::array<Rational, 2>> law;
        PathEnumerator e;
        do {
            auto bank = DeviceBank::uniform(cfg.n, table);
            auto play = adaptive_bob_play(bank, strat, e, e);
            auto ybar = strat.announce(play.history, cfg.n, e);
            auto x = random_trits(cfg.n, e);
            std::vector<AnswerA> a(cfg.n);
            for (std::size_t i = 0; i < cfg.n; i++) {
                a[i] = bank.fire_alice(i, x[i], e);
            }
            bank.tick_delay();
            auto r = bc_blocks(cfg, a, ybar);
            std::vector<std::int64_t> key;
            for (auto i : play.order) {
                key.push_back(static_cast<std::int64_t>(i));
            }
            for (std::size_t i = 0; i < cfg.n; i++) {
                key.push_back(play.y[i].value());
                key.push_back(play.b[i].index());
                key.push_back(ybar[i].value());
            }
            for (std::size_t j = 0; j < 3; j++) {
                key.push_back(static_cast<std::int64_t>(cfg.codes[j]->syndrome(r[j]).to_u64()));
            }
            law[key][(*cfg.ext)(r[0], r[1], r[2]) ? 1 : 0] += e.weight();
        } while (e.next());
        Rational dist = 0;
        for (const auto &[k, pr] : law) {
            dist += abs_value(Rational(pr[0] - pr[1]));
        }
        rep.distance_exact = dist;
        rep.distance = to_double(dist);
        rep.trials = e.paths_visited();
        return rep;
    }
    rep.trials = trials;
    double bias_sum = 0;
    for (std::size_t t = 0; t < trials; t++) {
        SeededRun run(derive_seed(seed, t));
        auto rng = run.view();
        auto bank = DeviceBank::uniform(cfg.n, table);
        auto play = adaptive_bob_play(bank, strat, rng.bob, rng.device);
        auto ybar = strat.announce(play.history, cfg.n, rng.bob);
        auto x = random_trits(cfg.n, rng.alice);
        std::vector<AnswerA> a(cfg.n);
        for (std::size_t i = 0; i < cfg.n; i++) {
            a[i] = bank.fire_alice(i, x[i], rng.device);
        }
        bank.tick_delay();
        bool d = rng.alice.bit();
        auto commit = bc_commit_message(cfg, d, bc_blocks(cfg, a, ybar));
        double beta = bc_posterior_bias(cfg, *table, play.y, play.b, ybar, *commit);
        bias_sum += std::abs(beta);
        bool guess = commit->c ^ (beta < 0);
        rep.successes += guess == d ? 1 : 0;
    }
    double tr = static_cast<double>(std::max<std::size_t>(1, trials));
    rep.distance = bias_sum / tr;
    rep.advantage = static_cast<double>(rep.successes) / tr - 0.5;
    rep.bayes_advantage = rep.distance / 2;
    return rep;
}

// ---- cheating Alice ----------------------------------------------------------------

std::vector<BitVec> light_codewords(const LinearCode &code) {
    const auto &g = code.generator();
    std::vector<BitVec> out;
    if (g.size() <= 16) {
        for (std::uint64_t c = 1; c < (std::uint64_t{1} << g.size()); c++) {
            BitVec w(code.n());
            for (std::size_t i = 0; i < g.size(); i++) {
                if ((c >> i) & 1) {
                    w ^= g[i];
                }
            }
            out.push_back(w);
        }
    } else {
        for (std::size_t i = 0; i < g.size(); i++) {
            out.push_back(g[i]);
            for (std::size_t j = i + 1; j < g.size(); j++) {
                out.push_back(g[i] ^ g[j]);
            }
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const BitVec &a, const BitVec &b) { return a.weight() < b.weight(); });
    return out;
}

std::shared_ptr<BCRevealMessage> shifted_reveal(const BCConfig &cfg, const std::vector<Trit> &x,
                                                const std::vector<AnswerA> &a, const std::vector<Trit> &y,
                                                std::size_t j, const BitVec &delta, Randomness &rng) {
    auto m = std::make_shared<BCRevealMessage>();
    m->x = x;
    m->a = a;
    std::size_t blk = cfg.block();
    for (std::size_t i = 0; i < blk; i++) {
        if (!delta.get(i)) {
            continue;
        }
        std::size_t k = j * blk + i;
        int yv = y[k].value();
        // Flip a_y and one more bit so the parity stays even.
        unsigned mask = a[k].mask() ^ (1u << yv) ^ (1u << ((yv + 1) % 3));
        m->a[k] = AnswerA::from_mask(mask);
        m->x[k] = Trit((x[k].value() + 1 + static_cast<int>(rng.uniform(2))) % 3);
    }
    m->r = bc_blocks(cfg, m->a, y);
    return m;
}

std::shared_ptr<BCCommitMessage> HonestThenFlip::commit(const BCConfig &cfg, bool, const std::vector<Trit> &,
                                                        const std::vector<AnswerA> &a, const std::vector<Trit> &y,
                                                        Randomness &) {
    return bc_commit_message(cfg, false, bc_blocks(cfg, a, y));
}

std::shared_ptr<BCRevealMessage> HonestThenFlip::reveal(const BCConfig &cfg, bool, const std::vector<Trit> &x,
                                                        const std::vector<AnswerA> &a, const std::vector<Trit> &y,
                                                        const BCCommitMessage &, Randomness &rng) {
    auto r = bc_blocks(cfg, a, y);
    // Lightest codeword per block that changes Ext3; codewords keep W valid.
    std::optional<std::pair<std::size_t, BitVec>> best;
    for (std::size_t j = 0; j < 3; j++) {
        for (const auto &c : light_codewords(*cfg.codes[j])) {
            if ((*cfg.ext)(j == 0 ? r[0] ^ c : r[0], j == 1 ? r[1] ^ c : r[1], j == 2 ? r[2] ^ c : r[2]) !=
                (*cfg.ext)(r[0], r[1], r[2])) {
                if (!best || c.weight() < best->second.weight()) {
                    best = {j, c};
                }
                break;
            }
        }
    }
    if (!best) {
        // No codeword flips the output; reveal honestly.
        return BCAliceStrategy::reveal(cfg, false, x, a, y, BCCommitMessage{}, rng);
    }
    return shifted_reveal(cfg, x, a, y, best->first, best->second, rng);
}

std::shared_ptr<BCCommitMessage> FarReveal::commit(const BCConfig &cfg, bool, const std::vector<Trit> &,
                                                   const std::vector<AnswerA> &a, const std::vector<Trit> &y,
                                                   Randomness &) {
    return bc_commit_message(cfg, false, bc_blocks(cfg, a, y));
}

std::shared_ptr<BCRevealMessage> FarReveal::reveal(const BCConfig &cfg, bool, const std::vector<Trit> &x,
                                                   const std::vector<AnswerA> &a, const std::vector<Trit> &y,
                                                   const BCCommitMessage &, Randomness &rng) {
    const auto &g = cfg.codes[0]->generator();
    BitVec c(cfg.block());
    while (!c.any()) {
        for (const auto &row : g) {
            if (rng.bit()) {
                c ^= row;
            }
        }
    }
    return shifted_reveal(cfg, x, a, y, 0, c, rng);
}

std::shared_ptr<BCCommitMessage> SyndromeForge::commit(const BCConfig &cfg, bool, const std::vector<Trit> &,
                                                       const std::vector<AnswerA> &a, const std::vector<Trit> &y,
                                                       Randomness &rng) {
    auto r = bc_blocks(cfg, a, y);
    std::size_t blk = cfg.block();
    std::size_t wt = std::min(blk, (cfg.codes[0]->d() + 1) / 2);
    // Random support of size wt.
    std::vector<std::size_t> idx(blk);
    for (std::size_t i = 0; i < blk; i++) {
        idx[i] = i;
    }
    e_ = BitVec(blk);
    for (std::size_t i = 0; i < wt; i++) {
        std::size_t j = i + rng.uniform(blk - i);
        std::swap(idx[i], idx[j]);
        e_.set(idx[i], true);
    }
    std::array<BitVec, 3> forged = r;
    forged[0] ^= e_;
    auto m = bc_commit_message(cfg, true, forged);
    return m;
}

std::shared_ptr<BCRevealMessage> SyndromeForge::reveal(const BCConfig &cfg, bool, const std::vector<Trit> &x,
                                                       const std::vector<AnswerA> &a, const std::vector<Trit> &y,
                                                       const BCCommitMessage &, Randomness &rng) {
    return shifted_reveal(cfg, x, a, y, 0, e_, rng);
}

std::unique_ptr<BCAliceStrategy> make_alice_strategy(const std::string &name) {
    if (name == "honest") {
        return std::make_unique<BCAliceStrategy>();
    }
    if (name == "honest-then-flip") {
        return std::make_unique<HonestThenFlip>();
    }
    if (name == "far-rbar") {
        return std::make_unique<FarReveal>();
    }
    if (name == "syndrome-forge") {
        return std::make_unique<SyndromeForge>();
    }
    throw ConfigError("unknown Alice strategy '" + name + "'");
}

nlohmann::json BindingReport::to_json() const {
    return {{"claim", "bc_binding"},
            {"strategy", strategy},
            {"n", n},
            {"trials", trials},
            {"in_E", in_e},
            {"in_Ec", in_ec},
            {"D1_in_E", d1_in_e},
            {"D0_in_Ec", d0_in_ec},
            {"D0_in_E", d0_in_e},
            {"D1_in_Ec", d1_in_ec},
            {"bottoms", bottoms},
            {"pr_D1_given_E", rate_d1_given_e()},
            {"pr_D0_given_Ec", rate_d0_given_ec()},
            {"accept_flipped", accept_flipped()},
            {"bottom_rate", bottom_rate()}};
}

BindingReport eval_bc_binding(const BCConfig &cfg, std::shared_ptr<const DeviceTable> table, BCAliceStrategy &strat,
                              std::size_t trials, std::uint64_t seed) {
    cfg.validate();
    BindingReport rep;
    rep.strategy = strat.name();
    rep.n = cfg.n;
    rep.trials = trials;
    for (std::size_t t = 0; t < trials; t++) {
        SeededRun run(derive_seed(seed, t));
        auto bank = DeviceBank::uniform(cfg.n, table);
        auto out = bc_run(cfg, false, bank, run.view(), strat);
        if (!out.commit) {
            rep.bottoms++;
            continue;
        }
        auto cls = classify_commit(cfg, bc_blocks(cfg, out.a, out.y), *out.commit);
        bool e = cls.e();
        (e ? rep.in_e : rep.in_ec)++;
        if (!out.o_b.is_bit()) {
            rep.bottoms++;
        } else if (out.o_b.value()) {
            (e ? rep.d1_in_e : rep.d1_in_ec)++;
        } else {
            (e ? rep.d0_in_e : rep.d0_in_ec)++;
        }
    }
    return rep;
}

}  // namespace msdi
