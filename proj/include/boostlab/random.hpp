// Seed derivation, the project-wide random engine, and content hashing.

#ifndef BOOSTLAB_RANDOM_HPP
#define BOOSTLAB_RANDOM_HPP

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace boostlab {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Counter-based derivation: the child seed depends only on the parent seed
/// and the path of counters, so streams never perturb each other.
std::uint64_t derive_seed(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> path);

inline Rng make_rng(std::uint64_t seed,
                    std::initializer_list<std::uint64_t> path = {}) {
  return Rng(derive_seed(seed, path));
}

/// 64-bit FNV-1a.
class Fnv1a {
 public:
  void add_bytes(const void* data, std::size_t n);
  template <typename T>
  void add(const T& value) {
    add_bytes(&value, sizeof(T));
  }
  template <typename T>
  void add_span(std::span<const T> values) {
    add_bytes(values.data(), values.size_bytes());
  }
  std::uint64_t value() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace boostlab

#endif  // BOOSTLAB_RANDOM_HPP
