#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "optsample/ddg.hpp"

namespace optsample {

// Stream of fair bits. next_bit() returns nullopt when the source has no more
// bits; samplers propagate that as "need more bits" rather than failing.
class BitSource {
 public:
  virtual ~BitSource() = default;
  std::optional<int> next_bit() {
    std::optional<int> b = generate();
    if (b.has_value()) ++bits_consumed_;
    return b;
  }
  uint64_t bits_consumed() const { return bits_consumed_; }

 protected:
  virtual std::optional<int> generate() = 0;

 private:
  uint64_t bits_consumed_ = 0;
};

// splitmix64 words, emitted MSB first. Never exhausts.
class SplitMix64Source final : public BitSource {
 public:
  explicit SplitMix64Source(uint64_t seed) : state_(seed) {}
  uint64_t words_drawn() const { return words_drawn_; }
  static uint64_t next_word(uint64_t& state);

 protected:
  std::optional<int> generate() override {
    if (remaining_ == 0) {
      word_ = next_word(state_);
      ++words_drawn_;
      remaining_ = 64;
    }
    const int b = static_cast<int>(word_ >> 63);
    word_ <<= 1;
    --remaining_;
    return b;
  }

 private:
  uint64_t state_;
  uint64_t word_ = 0;
  int remaining_ = 0;
  uint64_t words_drawn_ = 0;
};

// Replays a fixed bit string, then reports exhaustion.
class FixedBitsSource final : public BitSource {
 public:
  explicit FixedBitsSource(std::vector<uint8_t> bits) : bits_(std::move(bits)) {}
  // The low `count` bits of `word`, MSB first.
  FixedBitsSource(uint64_t word, uint32_t count);

 protected:
  std::optional<int> generate() override {
    if (pos_ >= bits_.size()) return std::nullopt;
    return static_cast<int>(bits_[pos_++]);
  }

 private:
  std::vector<uint8_t> bits_;
  size_t pos_ = 0;
};

// Walks the packed cells: flip a bit, move to enc[c + b], report the leaf's
// 0-based outcome. A one-cell leaf encoding consumes zero bits. Returns
// nullopt when the source runs dry mid-walk.
std::optional<uint32_t> sample_encoding(const LinearEncoding& e, BitSource& src);

// Walks the matrix directly, tracking the row scan position instead of a
// materialized tree; the column index wraps from k-1 back to l.
std::optional<uint32_t> sample_matrix(const ProbabilityMatrix& pm, BitSource& src);

struct EnumerationReport {
  std::vector<Rational> masses;      // mass absorbed by each outcome within k bits
  Rational unresolved_mass;          // strings that still need more bits
  Rational expected_bits_truncated;  // E[min(bits to halt, k)]
};

// Runs the sampler on all 2^k bit strings of length k and tallies exact
// dyadic masses. Guarded to k <= 24.
EnumerationReport enumerate_outcomes(
    const std::function<std::optional<uint32_t>(BitSource&)>& sampler, size_t n,
    uint32_t k);

}  // namespace optsample
