#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

#include "msdi/bits.h"
#include "msdi/rational.h"

namespace msdi {

/// Source of all protocol randomness. Protocol code only asks for draws
/// through this interface, so the same code runs under a seeded generator
/// (Monte Carlo) or under PathEnumerator (exact laws).
class Randomness {
   public:
    virtual ~Randomness() = default;
    /// Index drawn with probability proportional to `weights`.
    virtual std::size_t choose(std::span<const double> weights) = 0;
    /// Uniform index in [0, k).
    virtual std::size_t uniform(std::size_t k) = 0;

    bool bit() { return uniform(2) == 1; }
    BitVec bits(std::size_t n);
};

std::uint64_t splitmix64(std::uint64_t x);
/// Independent per-stream seed, used to give every trial its own generator.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

class SeededRandom final : public Randomness {
   public:
    explicit SeededRandom(std::uint64_t seed) : eng_(seed) {
    }
    std::size_t choose(std::span<const double> weights) override;
    std::size_t uniform(std::size_t k) override;
    double unit();
    std::uint64_t next_u64() { return eng_(); }

   private:
    std::mt19937_64 eng_;
};

/// Walks every execution path of a deterministic program whose only
/// nondeterminism comes from this object, in depth-first order.
///
///     PathEnumerator e;
///     do { auto out = program(e); law.add(out, e.weight()); } while (e.next());
class PathEnumerator final : public Randomness {
   public:
    explicit PathEnumerator(std::size_t max_paths = 20'000'000) : max_paths_(max_paths) {
    }
    std::size_t choose(std::span<const double> weights) override;
    std::size_t uniform(std::size_t k) override;

    /// Probability of the path just executed.
    Rational weight() const;
    /// Moves to the next path. Returns false once all paths were visited.
    bool next();
    std::size_t paths_visited() const { return paths_; }

   private:
    struct Node {
        const std::vector<Rational> *probs = nullptr;  // null for uniform nodes
        std::size_t arity = 0;
        std::size_t choice = 0;
        Rational prefix;  // path probability including this choice
    };
    std::size_t push(const std::vector<Rational> *probs, std::size_t arity);
    Rational prob_of(const Node &node, std::size_t i) const;

    std::vector<Node> stack_;
    /// Normalized exact weights per distinct weight vector.
    std::map<std::vector<double>, std::vector<Rational>> normalized_;
    std::size_t depth_ = 0;
    std::size_t paths_ = 0;
    std::size_t max_paths_;
};

}  // namespace msdi
