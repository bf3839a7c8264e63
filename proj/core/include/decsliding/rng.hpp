#ifndef DECSLIDING_RNG_HPP
#define DECSLIDING_RNG_HPP

#include <cstdint>
#include <random>

namespace decsliding {

using Rng = std::mt19937_64;

/// Named substreams derived from one root seed. The activation stream and
/// the oracle stream of outer iteration k are independent engines, so
/// changing inner budgets never shifts the activation sequence.
class RngStreams {
 public:
  explicit RngStreams(std::uint64_t root) : root_(root) {}

  std::uint64_t root() const noexcept { return root_; }

  Rng activation() const { return derive(kActivationTag, 0); }
  Rng oracle(std::int64_t outer_iteration) const {
    return derive(kOracleTag, static_cast<std::uint64_t>(outer_iteration));
  }
  Rng auxiliary(std::uint64_t tag) const { return derive(kAuxTag, tag); }

 private:
  static constexpr std::uint32_t kActivationTag = 0x41435456u;
  static constexpr std::uint32_t kOracleTag = 0x4f52434cu;
  static constexpr std::uint32_t kAuxTag = 0x41555858u;

  Rng derive(std::uint32_t tag, std::uint64_t index) const {
    std::seed_seq seq{static_cast<std::uint32_t>(root_), static_cast<std::uint32_t>(root_ >> 32),
                      tag, static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    return Rng(seq);
  }

  std::uint64_t root_;
};

}  // namespace decsliding

#endif
