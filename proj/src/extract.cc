#include "msdi/extract.h"

#include <cmath>

#include <nlohmann/json.hpp>

#include "msdi/errors.h"

namespace msdi {

BitVec seeded_extract(const BitVec &source, const BitVec &seed, std::size_t out_len) {
    std::size_t n = source.size();
    if (out_len == 0) {
        throw std::invalid_argument("seeded_extract: out_len must be positive");
    }
    if (seed.size() != toeplitz_seed_length(n, out_len)) {
        throw SeedLengthMismatch("seed has " + std::to_string(seed.size()) + " bits, expected " +
                                 std::to_string(toeplitz_seed_length(n, out_len)));
    }
    BitVec out(out_len);
    for (std::size_t j = 0; j < out_len; j++) {
        // Row j is the seed window starting at out_len - 1 - j.
        BitVec row = seed.slice(out_len - 1 - j, n);
        out.set(j, row.dot(source));
    }
    return out;
}

bool TrilinearExtractor::operator()(const BitVec &r1, const BitVec &r2, const BitVec &r3) const {
    if (r1.size() != r2.size() || r2.size() != r3.size()) {
        throw LengthMismatch("ext3 sources must have equal length");
    }
    return r1.dot(r2) ^ r2.dot(r3) ^ r3.dot(r1);
}

bool ext3(const BitVec &r1, const BitVec &r2, const BitVec &r3) {
    return TrilinearExtractor()(r1, r2, r3);
}

std::shared_ptr<const ThreeSourceExtractor> make_ext3(const std::string &name) {
    if (name == "trilinear") {
        return std::make_shared<TrilinearExtractor>();
    }
    throw ConfigError("unknown three-source extractor '" + name + "'");
}

Rational strong_extractor_distance(const std::vector<std::uint64_t> &support, std::size_t n, std::size_t out_len) {
    if (support.empty()) {
        throw ZeroProbabilityEvent("empty source support");
    }
    std::size_t t = toeplitz_seed_length(n, out_len);
    if (t > 20 || out_len > 16) {
        throw ExactModeTooLarge("strong_extractor_distance: seed space too large");
    }
    std::size_t outs = std::size_t{1} << out_len;
    std::vector<BitVec> sources;
    for (auto v : support) {
        sources.push_back(BitVec::from_u64(v, n));
    }
    Rational total = 0;
    std::vector<std::int64_t> counts(outs);
    const auto size = static_cast<std::int64_t>(support.size());
    for (std::uint64_t s = 0; s < (std::uint64_t{1} << t); s++) {
        BitVec seed = BitVec::from_u64(s, t);
        std::fill(counts.begin(), counts.end(), 0);
        for (const auto &x : sources) {
            counts[seeded_extract(x, seed, out_len).to_u64()]++;
        }
        // sum_z |c_z/|X| - 1/outs| with common denominator |X| * outs.
        std::int64_t acc = 0;
        for (auto c : counts) {
            acc += std::llabs(c * static_cast<std::int64_t>(outs) - size);
        }
        total += Rational(acc, size * static_cast<std::int64_t>(outs));
    }
    return total / Rational(std::int64_t{1} << t);
}

double leftover_hash_ceiling(double k, std::size_t out_len) {
    return std::pow(2.0, -(k - static_cast<double>(out_len)) / 2.0);
}

Rational ext3_distance(const ThreeSourceExtractor &ext, const std::vector<BitVec> &s1, const std::vector<BitVec> &s2,
                       const std::vector<BitVec> &s3) {
    if (s1.empty() || s2.empty() || s3.empty()) {
        throw ZeroProbabilityEvent("empty source support");
    }
    std::int64_t ones = 0;
    for (const auto &a : s1) {
        for (const auto &b : s2) {
            for (const auto &c : s3) {
                ones += ext(a, b, c) ? 1 : 0;
            }
        }
    }
    auto total = static_cast<std::int64_t>(s1.size() * s2.size() * s3.size());
    // |p1 - 1/2| + |p0 - 1/2| = |2 p1 - 1|.
    return Rational(std::llabs(2 * ones - total), total);
}

namespace {

template <class P, class F>
nlohmann::json dist_json(const BasicDistribution<P> &d, F value) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto &[o, p] : d.entries()) {
        entries.push_back({{"o", o}, {"p", value(p)}});
    }
    return {{"vars", d.vars()}, {"entries", entries}};
}

}  // namespace

nlohmann::json distribution_to_json(const Distribution &d) {
    return dist_json(d, [](double p) { return p; });
}

nlohmann::json distribution_to_json(const ExactDistribution &d) {
    return dist_json(d, [](const Rational &p) { return to_string(p); });
}

}  // namespace msdi
