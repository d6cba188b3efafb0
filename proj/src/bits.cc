#include "msdi/bits.h"

#include <bit>
#include <stdexcept>

namespace msdi {

BitVec::BitVec(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {
}

BitVec BitVec::from_string(std::string_view s) {
    BitVec r(s.size());
    for (std::size_t i = 0; i < s.size(); i++) {
        if (s[i] == '1') {
            r.set(i, true);
        } else if (s[i] != '0') {
            throw std::invalid_argument("bit string contains a character other than 0/1");
        }
    }
    return r;
}

BitVec BitVec::from_u64(std::uint64_t v, std::size_t n) {
    if (n > 64) {
        throw std::invalid_argument("from_u64 supports at most 64 bits");
    }
    BitVec r(n);
    if (n > 0) {
        r.w_[0] = n == 64 ? v : (v & ((std::uint64_t{1} << n) - 1));
    }
    return r;
}

BitVec BitVec::from_hex(std::string_view hex, std::size_t n) {
    BitVec r(n);
    if (hex.size() != 2 * ((n + 7) / 8)) {
        throw std::invalid_argument("hex length does not match bit count");
    }
    for (std::size_t i = 0; i < n; i++) {
        char c = hex[(i / 8) * 2 + ((i % 8) < 4 ? 0 : 1)];
        int nib;
        if (c >= '0' && c <= '9') {
            nib = c - '0';
        } else if (c >= 'a' && c <= 'f') {
            nib = c - 'a' + 10;
        } else if (c >= 'A' && c <= 'F') {
            nib = c - 'A' + 10;
        } else {
            throw std::invalid_argument("bad hex digit");
        }
        int shift = 3 - static_cast<int>(i % 4);
        r.set(i, (nib >> shift) & 1);
    }
    return r;
}

std::size_t BitVec::weight() const {
    std::size_t c = 0;
    for (auto w : w_) {
        c += static_cast<std::size_t>(std::popcount(w));
    }
    return c;
}

bool BitVec::any() const {
    for (auto w : w_) {
        if (w) {
            return true;
        }
    }
    return false;
}

bool BitVec::dot(const BitVec &o) const {
    if (o.n_ != n_) {
        throw std::invalid_argument("dot: length mismatch");
    }
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < w_.size(); i++) {
        acc ^= w_[i] & o.w_[i];
    }
    return std::popcount(acc) & 1;
}

BitVec BitVec::slice(std::size_t begin, std::size_t len) const {
    if (begin + len > n_) {
        throw std::out_of_range("slice out of range");
    }
    BitVec r(len);
    for (std::size_t i = 0; i < len; i++) {
        if (get(begin + i)) {
            r.set(i, true);
        }
    }
    return r;
}

std::uint64_t BitVec::to_u64() const {
    if (n_ > 64) {
        throw std::out_of_range("to_u64 on more than 64 bits");
    }
    return w_.empty() ? 0 : w_[0];
}

BitVec &BitVec::operator^=(const BitVec &o) {
    if (o.n_ != n_) {
        throw std::invalid_argument("xor: length mismatch");
    }
    for (std::size_t i = 0; i < w_.size(); i++) {
        w_[i] ^= o.w_[i];
    }
    return *this;
}

bool BitVec::operator<(const BitVec &o) const {
    if (n_ != o.n_) {
        return n_ < o.n_;
    }
    return w_ < o.w_;
}

std::string BitVec::str() const {
    std::string s(n_, '0');
    for (std::size_t i = 0; i < n_; i++) {
        if (get(i)) {
            s[i] = '1';
        }
    }
    return s;
}

std::string BitVec::hex() const {
    static const char *digits = "0123456789abcdef";
    std::size_t bytes = (n_ + 7) / 8;
    std::string s(2 * bytes, '0');
    for (std::size_t b = 0; b < bytes; b++) {
        int v = 0;
        for (int j = 0; j < 8; j++) {
            std::size_t i = b * 8 + j;
            v = (v << 1) | (i < n_ && get(i) ? 1 : 0);
        }
        s[2 * b] = digits[v >> 4];
        s[2 * b + 1] = digits[v & 15];
    }
    return s;
}

std::size_t hamming_distance(const BitVec &a, const BitVec &b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("hamming_distance: length mismatch");
    }
    std::size_t c = 0;
    for (std::size_t i = 0; i < a.words().size(); i++) {
        c += static_cast<std::size_t>(std::popcount(a.words()[i] ^ b.words()[i]));
    }
    return c;
}

std::size_t BitVecHash::operator()(const BitVec &v) const {
    std::uint64_t h = v.size() * 0x9e3779b97f4a7c15ULL;
    for (auto w : v.words()) {
        h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
}

}  // namespace msdi
