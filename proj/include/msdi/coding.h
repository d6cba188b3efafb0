#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "msdi/bits.h"

namespace msdi {

using Syndrome = BitVec;

/// Binary linear code given by a full-rank parity-check matrix.
/// Immutable after construction.
class LinearCode {
   public:
    /// Drops linearly dependent rows (keeping the first independent ones in
    /// order), checks every coordinate is used, and computes d exactly.
    static LinearCode from_parity_check(const std::vector<BitVec> &rows, std::string name = "custom");
    static LinearCode from_json(const nlohmann::json &j);

    /// Above this many column subsets the distance search gives up.
    static constexpr double kDistanceBudget = 5e7;

    std::size_t n() const { return n_; }
    std::size_t k() const { return n_ - h_.size(); }
    std::size_t redundancy() const { return h_.size(); }
    std::size_t d() const { return d_; }
    /// Unique-decoding radius floor((d-1)/2).
    std::size_t radius() const { return (d_ - 1) / 2; }
    const std::string &name() const { return name_; }
    const std::vector<BitVec> &rows() const { return h_; }
    const BitVec &column(std::size_t j) const { return cols_.at(j); }
    /// Basis of the code itself (one vector per free coordinate).
    const std::vector<BitVec> &generator() const { return gen_; }

    Syndrome syndrome(const BitVec &v) const;
    bool is_codeword(const BitVec &v) const { return !syndrome(v).any(); }
    /// The unique e with weight(e) <= radius() and syndrome(e) = s, if any.
    std::optional<BitVec> decode(const Syndrome &s) const;
    /// Some e with syndrome(e) = s (zero on non-pivot coordinates).
    BitVec particular_solution(const Syndrome &s) const;

    nlohmann::json to_json() const;

   private:
    LinearCode() = default;
    void build();
    std::optional<BitVec> decode_by_table(const Syndrome &s) const;
    std::optional<BitVec> decode_by_coset(const Syndrome &s) const;
    std::optional<BitVec> decode_by_patterns(const Syndrome &s) const;

    std::string name_;
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::vector<BitVec> h_;     // rows, length n
    std::vector<BitVec> cols_;  // columns, length n-k
    std::vector<BitVec> gen_;
    // Reduced row echelon form R = T * H, used to solve H e = s.
    std::vector<BitVec> transform_;  // rows of T, length n-k
    std::vector<std::size_t> pivots_;
    std::unordered_map<BitVec, BitVec, BitVecHash> table_;
    enum class Method { Table, Coset, Patterns } method_ = Method::Patterns;
};

enum class CodeKind { Hamming74, Repetition, RandomLinear, BCH };

struct CodeSpec {
    CodeKind kind = CodeKind::Hamming74;
    std::size_t n = 7;
    std::size_t k = 4;
    std::uint64_t seed = 0;
    // BCH: field degree, designed correction t, shortened length, extra parity row.
    int m = 0;
    int t = 0;
    bool even = false;

    static CodeSpec parse(const std::string &text);
    std::string str() const;
};

/// "hamming74", "repetition:N", "random:N:K:SEED", "bch:M:T:LEN[:even]".
LinearCode make_code(const CodeSpec &spec);
LinearCode make_code(const std::string &text);

/// Parity-check rows of a narrow-sense binary BCH code over GF(2^m),
/// shortened to `len` coordinates; rank is not reduced here.
std::vector<BitVec> bch_parity_rows(int m, int t, std::size_t len, bool even);

}  // namespace msdi
