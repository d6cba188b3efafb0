#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "msdi/distribution.h"
#include "msdi/random.h"
#include "msdi/rational.h"

namespace msdi {

class Trit {
   public:
    constexpr Trit() = default;
    explicit Trit(int v);
    int value() const { return v_; }
    bool operator==(const Trit &) const = default;

   private:
    std::uint8_t v_ = 0;
};

/// Alice's answer: three bits with even parity. mask bit i holds a_i.
class AnswerA {
   public:
    /// Masks of 000, 011, 101, 110 in that order.
    static constexpr std::array<std::uint8_t, 4> kMasks{0b000, 0b110, 0b101, 0b011};

    constexpr AnswerA() = default;
    static AnswerA from_mask(unsigned mask);
    static AnswerA from_index(int i);
    static AnswerA parse(std::string_view s);

    int index() const { return index_; }
    std::uint8_t mask() const { return kMasks[index_]; }
    bool bit(int i) const { return (mask() >> i) & 1; }
    std::string str() const;
    bool operator==(const AnswerA &) const = default;

   private:
    std::uint8_t index_ = 0;
};

/// Bob's answer: three bits with odd parity.
class AnswerB {
   public:
    /// Masks of 001, 010, 100, 111 in that order.
    static constexpr std::array<std::uint8_t, 4> kMasks{0b100, 0b010, 0b001, 0b111};
    static constexpr int kAllOnes = 3;

    constexpr AnswerB() = default;
    static AnswerB from_mask(unsigned mask);
    static AnswerB from_index(int i);
    static AnswerB parse(std::string_view s);

    int index() const { return index_; }
    std::uint8_t mask() const { return kMasks[index_]; }
    bool bit(int i) const { return (mask() >> i) & 1; }
    bool all_ones() const { return index_ == kAllOnes; }
    std::string str() const;
    bool operator==(const AnswerB &) const = default;

   private:
    std::uint8_t index_ = 0;
};

bool ms_predicate(AnswerA a, AnswerB b, Trit x, Trit y);

/// Pr(a,b|x,y) for all 9 input pairs and 16 answer pairs.
template <class P>
class BasicDeviceTable {
   public:
    static constexpr std::size_t kBlock = 16;

    static std::size_t offset(int x, int y, int ai, int bi) {
        return static_cast<std::size_t>(((x * 3 + y) * 4 + ai) * 4 + bi);
    }

    P &at(int x, int y, int ai, int bi) { return p_[offset(x, y, ai, bi)]; }
    const P &at(int x, int y, int ai, int bi) const { return p_[offset(x, y, ai, bi)]; }
    P &at(Trit x, Trit y, AnswerA a, AnswerB b) { return at(x.value(), y.value(), a.index(), b.index()); }
    const P &at(Trit x, Trit y, AnswerA a, AnswerB b) const {
        return at(x.value(), y.value(), a.index(), b.index());
    }
    /// The 16 entries of block (x,y), indexed by ai * 4 + bi.
    std::span<const P, kBlock> block(int x, int y) const {
        return std::span<const P, kBlock>(p_.data() + offset(x, y, 0, 0), kBlock);
    }

    const std::array<P, 144> &raw() const { return p_; }
    std::array<P, 144> &raw() { return p_; }

   private:
    std::array<P, 144> p_{};
};

using DeviceTable = BasicDeviceTable<double>;
using ExactTable = BasicDeviceTable<Rational>;

/// Throws std::invalid_argument unless every block is a probability vector.
void validate_table(const DeviceTable &t, double tol = 1e-12);
void validate_table(const ExactTable &t);

ExactTable ideal_table_exact();
DeviceTable ideal_table();
ExactTable uniform_valid_table_exact();
DeviceTable uniform_valid_table();
DeviceTable to_double_table(const ExactTable &t);
ExactTable to_exact_table(const DeviceTable &t);

/// (1-p) * a + p * b.
DeviceTable mix_tables(const DeviceTable &a, const DeviceTable &b, double p);
ExactTable mix_tables(const ExactTable &a, const ExactTable &b, const Rational &p);

double game_value(const DeviceTable &t);
Rational game_value(const ExactTable &t);
double sup_distance(const DeviceTable &a, const DeviceTable &b);
Rational sup_distance(const ExactTable &a, const ExactTable &b);

enum class PerturbMode { UniformMix, EntryNoise };

DeviceTable perturb_table(const DeviceTable &base, double epsilon, PerturbMode mode, Randomness &rng);

/// Ideal table mixed with uniform-over-valid so that the game value is exactly 1 - eps_r.
DeviceTable robust_table(double eps_r);
ExactTable robust_table_exact(const Rational &eps_r);
/// Bob always answers 111 and Alice answers uniformly among answers with
/// a_y = 1. Wins every round but signals on Alice's side; adversarial sanity table.
ExactTable forced_111_table_exact();

/// Largest change of a marginal of one side when the other side's input changes.
double signalling_gap(const DeviceTable &t);
Rational signalling_gap(const ExactTable &t);

/// Partial assignment of the four device variables.
struct Given {
    std::optional<Trit> x, y;
    std::optional<AnswerA> a;
    std::optional<AnswerB> b;
};

/// Joint law of (x, y, a, b) with uniform inputs. Variables "x","y","a","b";
/// answers are labeled by their bit masks.
ExactDistribution device_joint(const ExactTable &t);
Distribution device_joint(const DeviceTable &t);

/// Distribution of the free variables given the assignment; inputs carry a uniform prior.
ExactDistribution conditional(const ExactTable &t, const Given &g);
Distribution conditional(const DeviceTable &t, const Given &g);

struct ClassicalStrategy {
    std::array<AnswerA, 3> alice;  // answer per x
    std::array<AnswerB, 3> bob;    // answer per y
};
ExactTable deterministic_table(const ClassicalStrategy &s);
struct ClassicalValue {
    Rational value;
    ClassicalStrategy witness;
};
ClassicalValue classical_value_oracle();

/// Exact product law of independent devices under fixed inputs; variables
/// a0,b0,a1,b1,... labeled by masks.
ExactDistribution joint_law(const std::vector<ExactTable> &tables, const std::vector<std::pair<Trit, Trit>> &inputs);

enum class DeviceState { Fresh, Fired, Decohered };
enum class Side { Alice, Bob, Both };
enum class Clock { PreDelay, PostDelay };

struct DeviceHandle {
    std::size_t index = 0;
    std::shared_ptr<const DeviceTable> table;
    DeviceState state = DeviceState::Fresh;
    std::optional<Trit> x, y;  // effective inputs
    bool alice_queried = false, bob_queried = false;
    bool drawn = false;  // joint outcome fixed
    AnswerA a;
    AnswerB b;
    bool a_known = false, b_known = false;  // halves fixed so far
};

/// Ordered collection of independent one-shot devices with a DELAY clock.
///
/// A side can register its input (`input_*`) and read its answer later
/// (`read_*`), or do both at once (`fire_*`). An answer is drawn when first
/// read: jointly if both inputs are known, otherwise the reader's half is
/// drawn from its marginal and the partner's half later from the conditional.
class DeviceBank {
   public:
    DeviceBank() = default;
    explicit DeviceBank(std::vector<std::shared_ptr<const DeviceTable>> tables);
    static DeviceBank uniform(std::size_t n, std::shared_ptr<const DeviceTable> table);

    std::size_t size() const { return devices_.size(); }
    Clock clock() const { return clock_; }
    const DeviceHandle &device(std::size_t i) const { return devices_.at(i); }

    void input_alice(std::size_t i, Trit x);
    void input_bob(std::size_t i, Trit y);
    AnswerA read_alice(std::size_t i, Randomness &rng);
    AnswerB read_bob(std::size_t i, Randomness &rng);
    AnswerA fire_alice(std::size_t i, Trit x, Randomness &rng);
    AnswerB fire_bob(std::size_t i, Trit y, Randomness &rng);
    std::pair<AnswerA, AnswerB> fire_both(std::size_t i, Trit x, Trit y, Randomness &rng);

    void tick_delay();

   private:
    void draw_joint(DeviceHandle &d, Randomness &rng);
    std::vector<DeviceHandle> devices_;
    Clock clock_ = Clock::PreDelay;
};

struct BankOutcome {
    std::optional<AnswerA> a;
    std::optional<AnswerB> b;
};
/// Single-call sampling entry point; for Side::Both the input is used on both ports.
BankOutcome bank_sample(DeviceBank &bank, Side side, std::size_t index, Trit input, Randomness &rng);

nlohmann::json table_to_json(const DeviceTable &t);
nlohmann::json table_to_json(const ExactTable &t);
DeviceTable table_from_json(const nlohmann::json &j);
ExactTable exact_table_from_json(const nlohmann::json &j);

}  // namespace msdi
