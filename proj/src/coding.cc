#include "msdi/coding.h"

#include <bit>
#include <cmath>
#include <functional>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "msdi/errors.h"
#include "msdi/random.h"

namespace msdi {

namespace {

double binomial(std::size_t n, std::size_t k) {
    if (k > n) {
        return 0;
    }
    double r = 1;
    for (std::size_t i = 0; i < k; i++) {
        r = r * static_cast<double>(n - i) / static_cast<double>(i + 1);
    }
    return r;
}

// Calls f(sum, subset) for every h-subset of the columns.
void for_each_subset(const std::vector<BitVec> &cols, std::size_t h,
                     const std::function<bool(const BitVec &, const std::vector<std::size_t> &)> &f) {
    std::size_t n = cols.size();
    std::size_t r = n ? cols[0].size() : 0;
    std::vector<std::size_t> idx;
    std::vector<BitVec> partial(h + 1, BitVec(r));
    std::function<bool(std::size_t)> rec = [&](std::size_t start) -> bool {
        if (idx.size() == h) {
            return f(partial[h], idx);
        }
        for (std::size_t j = start; j + (h - idx.size()) <= n; j++) {
            partial[idx.size() + 1] = partial[idx.size()] ^ cols[j];
            idx.push_back(j);
            bool stop = rec(j + 1);
            idx.pop_back();
            if (stop) {
                return true;
            }
        }
        return false;
    };
    rec(0);
}

std::size_t distance_by_enumeration(const std::vector<BitVec> &gen, std::size_t n) {
    BitVec cur(n);
    std::size_t best = n + 1;
    std::uint64_t total = std::uint64_t{1} << gen.size();
    for (std::uint64_t i = 1; i < total; i++) {
        cur ^= gen[static_cast<std::size_t>(std::countr_zero(i))];
        best = std::min(best, cur.weight());
    }
    return best;
}

// Smallest w such that some w columns XOR to zero. Two distinct subsets with
// equal sums give a codeword; scanning w upward makes the first hit exact.
std::size_t distance_by_column_sums(const std::vector<BitVec> &cols, std::size_t max_w) {
    std::size_t n = cols.size();
    for (std::size_t w = 1; w <= max_w; w++) {
        std::size_t h2 = w / 2;
        std::size_t h1 = w - h2;
        if (binomial(n, h1) + binomial(n, h2) > LinearCode::kDistanceBudget) {
            throw DistanceSearchTooLarge("minimum distance search exceeds budget at weight " + std::to_string(w));
        }
        std::unordered_set<BitVec, BitVecHash> sums;
        bool found = false;
        if (h1 == h2) {
            for_each_subset(cols, h1, [&](const BitVec &s, const std::vector<std::size_t> &) {
                found = !sums.insert(s).second;
                return found;
            });
        } else {
            for_each_subset(cols, h2, [&](const BitVec &s, const std::vector<std::size_t> &) {
                sums.insert(s);
                return false;
            });
            for_each_subset(cols, h1, [&](const BitVec &s, const std::vector<std::size_t> &) {
                found = sums.count(s) > 0;
                return found;
            });
        }
        if (found) {
            return w;
        }
    }
    throw std::logic_error("no codeword found within the Singleton bound");
}

}  // namespace

LinearCode LinearCode::from_parity_check(const std::vector<BitVec> &rows, std::string name) {
    if (rows.empty()) {
        throw ConfigError("parity-check matrix needs at least one row to fix n");
    }
    LinearCode c;
    c.name_ = std::move(name);
    c.n_ = rows[0].size();
    // Greedy independent subset: keep a row iff it is not in the span so far.
    std::vector<BitVec> basis;
    std::vector<std::size_t> lead;
    for (const auto &row : rows) {
        if (row.size() != c.n_) {
            throw LengthMismatch("parity-check rows have different lengths");
        }
        BitVec v = row;
        for (std::size_t i = 0; i < basis.size(); i++) {
            if (v.get(lead[i])) {
                v ^= basis[i];
            }
        }
        if (!v.any()) {
            continue;
        }
        std::size_t p = 0;
        while (!v.get(p)) {
            p++;
        }
        for (std::size_t i = 0; i < basis.size(); i++) {
            if (basis[i].get(p)) {
                basis[i] ^= v;
            }
        }
        basis.push_back(v);
        lead.push_back(p);
        c.h_.push_back(row);
    }
    if (c.h_.size() == c.n_ && c.n_ > 0) {
        // Only the zero codeword. A one-coordinate code with an all-zero row is allowed.
        throw RankDeficient("parity-check matrix has full column rank; the code is trivial");
    }
    c.build();
    return c;
}

void LinearCode::build() {
    std::size_t r = h_.size();
    cols_.assign(n_, BitVec(r));
    for (std::size_t i = 0; i < r; i++) {
        for (std::size_t j = 0; j < n_; j++) {
            if (h_[i].get(j)) {
                cols_[j].set(i, true);
            }
        }
    }
    // RREF with transform.
    std::vector<BitVec> red = h_;
    transform_.assign(r, BitVec(r));
    for (std::size_t i = 0; i < r; i++) {
        transform_[i].set(i, true);
    }
    pivots_.clear();
    std::size_t row = 0;
    for (std::size_t col = 0; col < n_ && row < r; col++) {
        std::size_t sel = row;
        while (sel < r && !red[sel].get(col)) {
            sel++;
        }
        if (sel == r) {
            continue;
        }
        std::swap(red[sel], red[row]);
        std::swap(transform_[sel], transform_[row]);
        for (std::size_t i = 0; i < r; i++) {
            if (i != row && red[i].get(col)) {
                red[i] ^= red[row];
                transform_[i] ^= transform_[row];
            }
        }
        pivots_.push_back(col);
        row++;
    }
    for (std::size_t i = 0; i < r; i++) {
        if (red[i].weight() == 1) {
            throw ConfigError("code " + name_ + " never uses coordinate " + std::to_string(pivots_[i]));
        }
    }
    std::vector<bool> is_pivot(n_, false);
    for (auto p : pivots_) {
        is_pivot[p] = true;
    }
    gen_.clear();
    for (std::size_t f = 0; f < n_; f++) {
        if (is_pivot[f]) {
            continue;
        }
        BitVec g(n_);
        g.set(f, true);
        for (std::size_t i = 0; i < r; i++) {
            if (red[i].get(f)) {
                g.set(pivots_[i], true);
            }
        }
        gen_.push_back(g);
    }
    // A zero column is a weight-one codeword.
    bool zero_col = false;
    for (const auto &c : cols_) {
        zero_col = zero_col || !c.any();
    }
    if (zero_col) {
        d_ = 1;
    } else if (gen_.size() <= 24) {
        d_ = distance_by_enumeration(gen_, n_);
    } else {
        d_ = distance_by_column_sums(cols_, r + 1);
    }

    std::size_t t = radius();
    double cost_patterns = 0;
    for (std::size_t w = 0; w <= t; w++) {
        cost_patterns += binomial(n_, w);
    }
    double cost_coset = std::ldexp(1.0, static_cast<int>(k()));
    table_.clear();
    if (cost_patterns <= double(1 << 21)) {
        method_ = Method::Table;
        for (std::size_t w = 0; w <= t; w++) {
            for_each_subset(cols_, w, [&](const BitVec &s, const std::vector<std::size_t> &idx) {
                BitVec e(n_);
                for (auto j : idx) {
                    e.set(j, true);
                }
                table_.emplace(s, e);
                return false;
            });
        }
    } else if (cost_coset <= cost_patterns && k() <= 30) {
        method_ = Method::Coset;
    } else {
        method_ = Method::Patterns;
    }
}

Syndrome LinearCode::syndrome(const BitVec &v) const {
    if (v.size() != n_) {
        throw LengthMismatch("syndrome: vector length " + std::to_string(v.size()) + " != n = " + std::to_string(n_));
    }
    Syndrome s(h_.size());
    for (std::size_t i = 0; i < h_.size(); i++) {
        if (h_[i].dot(v)) {
            s.set(i, true);
        }
    }
    return s;
}

BitVec LinearCode::particular_solution(const Syndrome &s) const {
    if (s.size() != h_.size()) {
        throw LengthMismatch("syndrome length does not match n - k");
    }
    BitVec e(n_);
    for (std::size_t i = 0; i < pivots_.size(); i++) {
        if (transform_[i].dot(s)) {
            e.set(pivots_[i], true);
        }
    }
    return e;
}

std::optional<BitVec> LinearCode::decode_by_table(const Syndrome &s) const {
    auto it = table_.find(s);
    if (it == table_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::optional<BitVec> LinearCode::decode_by_coset(const Syndrome &s) const {
    BitVec cur = particular_solution(s);
    BitVec best = cur;
    std::size_t best_w = cur.weight();
    std::uint64_t total = std::uint64_t{1} << gen_.size();
    for (std::uint64_t i = 1; i < total && best_w > 0; i++) {
        cur ^= gen_[static_cast<std::size_t>(std::countr_zero(i))];
        std::size_t w = cur.weight();
        if (w < best_w) {
            best_w = w;
            best = cur;
        }
    }
    if (best_w > radius()) {
        return std::nullopt;
    }
    return best;
}

std::optional<BitVec> LinearCode::decode_by_patterns(const Syndrome &s) const {
    std::optional<BitVec> out;
    for (std::size_t w = 0; w <= radius() && !out; w++) {
        for_each_subset(cols_, w, [&](const BitVec &sum, const std::vector<std::size_t> &idx) {
            if (sum != s) {
                return false;
            }
            BitVec e(n_);
            for (auto j : idx) {
                e.set(j, true);
            }
            out = e;
            return true;
        });
    }
    return out;
}

std::optional<BitVec> LinearCode::decode(const Syndrome &s) const {
    if (s.size() != h_.size()) {
        throw LengthMismatch("syndrome length does not match n - k");
    }
    std::optional<BitVec> e;
    switch (method_) {
        case Method::Table:
            e = decode_by_table(s);
            break;
        case Method::Coset:
            e = decode_by_coset(s);
            break;
        case Method::Patterns:
            e = decode_by_patterns(s);
            break;
    }
    if (e && (e->weight() > radius() || syndrome(*e) != s)) {
        return std::nullopt;
    }
    return e;
}

nlohmann::json LinearCode::to_json() const {
    BitVec packed(h_.size() * n_);
    for (std::size_t i = 0; i < h_.size(); i++) {
        for (std::size_t j = 0; j < n_; j++) {
            if (h_[i].get(j)) {
                packed.set(i * n_ + j, true);
            }
        }
    }
    return {{"name", name_}, {"n", n_}, {"k", k()}, {"d", d_}, {"H", packed.hex()}};
}

LinearCode LinearCode::from_json(const nlohmann::json &j) {
    std::size_t n = j.at("n").get<std::size_t>();
    std::size_t k = j.at("k").get<std::size_t>();
    std::size_t r = n - k;
    BitVec packed = BitVec::from_hex(j.at("H").get<std::string>(), r * n);
    std::vector<BitVec> rows(r, BitVec(n));
    for (std::size_t i = 0; i < r; i++) {
        for (std::size_t c = 0; c < n; c++) {
            if (packed.get(i * n + c)) {
                rows[i].set(c, true);
            }
        }
    }
    LinearCode code = from_parity_check(rows, j.value("name", std::string("custom")));
    if (code.k() != k) {
        throw RankDeficient("serialized parity-check matrix is not full rank");
    }
    if (j.contains("d") && j.at("d").get<std::size_t>() != code.d()) {
        throw ConfigError("serialized minimum distance does not match the matrix");
    }
    return code;
}

std::vector<BitVec> bch_parity_rows(int m, int t, std::size_t len, bool even) {
    static const unsigned kPoly[] = {0, 0, 0, 0b1011, 0b10011, 0b100101, 0b1000011, 0b10000011, 0b100011101};
    if (m < 3 || m > 8) {
        throw ConfigError("BCH field degree must be in 3..8");
    }
    std::size_t order = (std::size_t{1} << m) - 1;
    if (len < 2 || len > order || t < 1) {
        throw ConfigError("BCH length must be in 2..2^m-1 and t >= 1");
    }
    std::vector<unsigned> exp(order);
    unsigned v = 1;
    for (std::size_t i = 0; i < order; i++) {
        exp[i] = v;
        v <<= 1;
        if (v >> m) {
            v ^= kPoly[m];
        }
    }
    std::vector<BitVec> rows;
    for (int j = 1; j <= 2 * t - 1; j += 2) {
        for (int b = 0; b < m; b++) {
            BitVec row(len);
            for (std::size_t i = 0; i < len; i++) {
                if ((exp[(static_cast<std::size_t>(j) * i) % order] >> b) & 1) {
                    row.set(i, true);
                }
            }
            rows.push_back(row);
        }
    }
    if (even) {
        BitVec ones(len);
        for (std::size_t i = 0; i < len; i++) {
            ones.set(i, true);
        }
        rows.push_back(ones);
    }
    return rows;
}

namespace {

std::vector<std::string> split(const std::string &s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) {
        out.push_back(part);
    }
    return out;
}

}  // namespace

CodeSpec CodeSpec::parse(const std::string &text) {
    auto parts = split(text, ':');
    CodeSpec s;
    auto num = [&](std::size_t i) -> std::uint64_t {
        if (i >= parts.size()) {
            throw ConfigError("code spec '" + text + "' is missing fields");
        }
        return std::stoull(parts[i]);
    };
    if (parts.empty()) {
        throw ConfigError("empty code spec");
    }
    if (parts[0] == "hamming74") {
        s.kind = CodeKind::Hamming74;
    } else if (parts[0] == "repetition") {
        s.kind = CodeKind::Repetition;
        s.n = num(1);
        s.k = 1;
    } else if (parts[0] == "random") {
        s.kind = CodeKind::RandomLinear;
        s.n = num(1);
        s.k = num(2);
        s.seed = num(3);
    } else if (parts[0] == "bch") {
        s.kind = CodeKind::BCH;
        s.m = static_cast<int>(num(1));
        s.t = static_cast<int>(num(2));
        s.n = num(3);
        s.even = parts.size() > 4 && parts[4] == "even";
        s.k = 0;
    } else {
        throw ConfigError("unknown code kind '" + parts[0] + "'");
    }
    return s;
}

std::string CodeSpec::str() const {
    switch (kind) {
        case CodeKind::Hamming74:
            return "hamming74";
        case CodeKind::Repetition:
            return "repetition:" + std::to_string(n);
        case CodeKind::RandomLinear:
            return "random:" + std::to_string(n) + ":" + std::to_string(k) + ":" + std::to_string(seed);
        case CodeKind::BCH:
            return "bch:" + std::to_string(m) + ":" + std::to_string(t) + ":" + std::to_string(n) + (even ? ":even" : "");
    }
    return "?";
}

LinearCode make_code(const CodeSpec &spec) {
    switch (spec.kind) {
        case CodeKind::Hamming74: {
            std::vector<BitVec> rows(3, BitVec(7));
            for (int b = 0; b < 3; b++) {
                for (int j = 0; j < 7; j++) {
                    rows[b].set(j, ((j + 1) >> b) & 1);
                }
            }
            return LinearCode::from_parity_check(rows, spec.str());
        }
        case CodeKind::Repetition: {
            if (spec.n == 0) {
                throw ConfigError("repetition code needs n >= 1");
            }
            std::vector<BitVec> rows;
            for (std::size_t i = 1; i < spec.n; i++) {
                BitVec r(spec.n);
                r.set(0, true);
                r.set(i, true);
                rows.push_back(r);
            }
            if (rows.empty()) {
                rows.emplace_back(1);
            }
            return LinearCode::from_parity_check(rows, spec.str());
        }
        case CodeKind::RandomLinear: {
            if (spec.k == 0 || spec.k >= spec.n) {
                throw ConfigError("random code needs 0 < k < n");
            }
            for (std::uint64_t attempt = 0; attempt < 100; attempt++) {
                SeededRandom rng(derive_seed(spec.seed, attempt));
                std::vector<BitVec> rows;
                for (std::size_t i = 0; i < spec.n - spec.k; i++) {
                    rows.push_back(rng.bits(spec.n));
                }
                try {
                    auto code = LinearCode::from_parity_check(rows, spec.str());
                    if (code.k() == spec.k) {
                        return code;
                    }
                } catch (const ConfigError &) {
                    // unused coordinate: redraw
                }
            }
            throw RankDeficient("random code " + spec.str() + ": no full-rank draw in 100 attempts");
        }
        case CodeKind::BCH:
            return LinearCode::from_parity_check(bch_parity_rows(spec.m, spec.t, spec.n, spec.even), spec.str());
    }
    throw ConfigError("unknown code kind");
}

LinearCode make_code(const std::string &text) {
    return make_code(CodeSpec::parse(text));
}

}  // namespace msdi
