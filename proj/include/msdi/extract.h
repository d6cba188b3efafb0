#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "msdi/bits.h"
#include "msdi/distribution.h"
#include "msdi/rational.h"

namespace msdi {

/// Seed length of the Toeplitz hash from n source bits to out_len bits.
inline std::size_t toeplitz_seed_length(std::size_t n, std::size_t out_len) {
    return n + out_len - 1;
}

/// Toeplitz hash: output bit j = sum_i seed[i - j + out_len - 1] * source[i].
/// Throws SeedLengthMismatch.
BitVec seeded_extract(const BitVec &source, const BitVec &seed, std::size_t out_len);

/// Seedless extractor from three equal-length sources to one bit.
class ThreeSourceExtractor {
   public:
    virtual ~ThreeSourceExtractor() = default;
    virtual bool operator()(const BitVec &r1, const BitVec &r2, const BitVec &r3) const = 0;
    virtual std::string name() const = 0;
};

/// <r1,r2> + <r2,r3> + <r3,r1> over GF(2); equals the parity of the
/// coordinatewise majorities.
class TrilinearExtractor final : public ThreeSourceExtractor {
   public:
    bool operator()(const BitVec &r1, const BitVec &r2, const BitVec &r3) const override;
    std::string name() const override { return "trilinear"; }
};

bool ext3(const BitVec &r1, const BitVec &r2, const BitVec &r3);
std::shared_ptr<const ThreeSourceExtractor> make_ext3(const std::string &name);

/// Exact one-norm between (Ext(X,S), S) and (U, S) for X uniform on `support`
/// (n-bit values) and S a uniform Toeplitz seed.
Rational strong_extractor_distance(const std::vector<std::uint64_t> &support, std::size_t n, std::size_t out_len);

/// Leftover-hash ceiling 2^{-(k - out_len)/2} on that distance for a flat
/// source with 2^k points.
double leftover_hash_ceiling(double k, std::size_t out_len);

/// Exact one-norm of the output bit from uniform, for independent sources
/// uniform on the given supports.
Rational ext3_distance(const ThreeSourceExtractor &ext, const std::vector<BitVec> &s1, const std::vector<BitVec> &s2,
                       const std::vector<BitVec> &s3);

nlohmann::json distribution_to_json(const Distribution &d);
nlohmann::json distribution_to_json(const ExactDistribution &d);

}  // namespace msdi
