#include "msdi/random.h"

#include "msdi/errors.h"

#include <stdexcept>

namespace msdi {

BitVec Randomness::bits(std::size_t n) {
    BitVec r(n);
    for (std::size_t i = 0; i < n; i++) {
        r.set(i, bit());
    }
    return r;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return splitmix64(master ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

double SeededRandom::unit() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

std::size_t SeededRandom::uniform(std::size_t k) {
    if (k == 0) {
        throw std::invalid_argument("uniform(0)");
    }
    // Lemire's multiply-shift with rejection; exact and platform independent.
    std::uint64_t range = k;
    unsigned __int128 m = static_cast<unsigned __int128>(eng_()) * range;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < range) {
        std::uint64_t threshold = (0 - range) % range;
        while (lo < threshold) {
            m = static_cast<unsigned __int128>(eng_()) * range;
            lo = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::size_t>(m >> 64);
}

std::size_t SeededRandom::choose(std::span<const double> weights) {
    double total = 0;
    for (double w : weights) {
        total += w;
    }
    if (!(total > 0)) {
        throw std::invalid_argument("choose: no positive weight");
    }
    double u = unit() * total;
    std::size_t last = 0;
    for (std::size_t i = 0; i < weights.size(); i++) {
        if (weights[i] <= 0) {
            continue;
        }
        last = i;
        if (u < weights[i]) {
            return i;
        }
        u -= weights[i];
    }
    return last;
}

Rational PathEnumerator::prob_of(const Node &node, std::size_t i) const {
    if (!node.probs) {
        return Rational(1, static_cast<long long>(node.arity));
    }
    return (*node.probs)[i];
}

std::size_t PathEnumerator::push(const std::vector<Rational> *probs, std::size_t arity) {
    if (depth_ < stack_.size()) {
        const Node &node = stack_[depth_];
        if (node.arity != arity) {
            throw std::logic_error("PathEnumerator: program is not deterministic given its draws");
        }
        return stack_[depth_++].choice;
    }
    Node node;
    node.probs = probs;
    node.arity = arity;
    node.choice = arity;
    for (std::size_t i = 0; i < arity; i++) {
        if (prob_of(node, i) != 0) {
            node.choice = i;
            break;
        }
    }
    if (node.choice == arity) {
        throw std::invalid_argument("choose: no positive weight");
    }
    Rational prev = stack_.empty() ? Rational(1) : stack_.back().prefix;
    node.prefix = prev * prob_of(node, node.choice);
    stack_.push_back(std::move(node));
    depth_++;
    return stack_.back().choice;
}

std::size_t PathEnumerator::choose(std::span<const double> weights) {
    if (depth_ < stack_.size()) {
        return push(nullptr, weights.size());
    }
    std::vector<double> key(weights.begin(), weights.end());
    auto it = normalized_.find(key);
    if (it == normalized_.end()) {
        std::vector<Rational> probs;
        probs.reserve(weights.size());
        Rational total = 0;
        for (double w : weights) {
            probs.push_back(w > 0 ? exact_from_double(w) : Rational(0));
            total += probs.back();
        }
        if (total == 0) {
            throw std::invalid_argument("choose: no positive weight");
        }
        for (auto &p : probs) {
            p /= total;
        }
        it = normalized_.emplace(std::move(key), std::move(probs)).first;
    }
    return push(&it->second, weights.size());
}

std::size_t PathEnumerator::uniform(std::size_t k) {
    if (k == 0) {
        throw std::invalid_argument("uniform(0)");
    }
    return push(nullptr, k);
}

Rational PathEnumerator::weight() const {
    if (depth_ == 0) {
        return Rational(1);
    }
    return stack_[depth_ - 1].prefix;
}

bool PathEnumerator::next() {
    if (depth_ != stack_.size()) {
        throw std::logic_error("PathEnumerator: path ended before replaying its prefix");
    }
    if (++paths_ > max_paths_) {
        throw ExactModeTooLarge("PathEnumerator: path budget exceeded");
    }
    depth_ = 0;
    while (!stack_.empty()) {
        Node &node = stack_.back();
        std::size_t i = node.choice + 1;
        while (i < node.arity && prob_of(node, i) == 0) {
            i++;
        }
        if (i < node.arity) {
            node.choice = i;
            Rational prev = stack_.size() >= 2 ? stack_[stack_.size() - 2].prefix : Rational(1);
            node.prefix = prev * prob_of(node, i);
            return true;
        }
        stack_.pop_back();
    }
    return false;
}

}  // namespace msdi
