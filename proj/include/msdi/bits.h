#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace msdi {

/// Fixed-length bit string. Index 0 is the leftmost character of the text form.
class BitVec {
   public:
    BitVec() = default;
    explicit BitVec(std::size_t n);

    static BitVec from_string(std::string_view s);
    static BitVec from_u64(std::uint64_t v, std::size_t n);
    static BitVec from_hex(std::string_view hex, std::size_t n);

    std::size_t size() const { return n_; }
    bool empty() const { return n_ == 0; }

    bool get(std::size_t i) const { return (w_[i >> 6] >> (i & 63)) & 1u; }
    void set(std::size_t i, bool v) {
        std::uint64_t m = std::uint64_t{1} << (i & 63);
        if (v) {
            w_[i >> 6] |= m;
        } else {
            w_[i >> 6] &= ~m;
        }
    }
    void flip(std::size_t i) { w_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    std::size_t weight() const;
    bool any() const;
    /// Parity of the bitwise AND, i.e. the GF(2) inner product.
    bool dot(const BitVec &o) const;
    BitVec slice(std::size_t begin, std::size_t len) const;
    std::uint64_t to_u64() const;

    BitVec &operator^=(const BitVec &o);
    friend BitVec operator^(BitVec a, const BitVec &b) { return a ^= b; }
    bool operator==(const BitVec &o) const { return n_ == o.n_ && w_ == o.w_; }
    bool operator!=(const BitVec &o) const { return !(*this == o); }
    bool operator<(const BitVec &o) const;

    std::string str() const;
    /// Bits packed MSB-first into bytes, lowercase hex.
    std::string hex() const;

    const std::vector<std::uint64_t> &words() const { return w_; }
    std::vector<std::uint64_t> &words() { return w_; }

   private:
    std::size_t n_ = 0;
    std::vector<std::uint64_t> w_;
};

std::size_t hamming_distance(const BitVec &a, const BitVec &b);

struct BitVecHash {
    std::size_t operator()(const BitVec &v) const;
};

}  // namespace msdi
