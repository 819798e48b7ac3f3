#ifndef DSGDLAB_RNG_HPP
#define DSGDLAB_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dsgdlab {

// SplitMix64 finalizer (Steele, Lea, Flood / Vigna). Used only to derive
// well-separated seeds for std::mt19937_64 streams; not used as a generator.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic seed derivation from a master seed plus an index path,
// e.g. derive_seed(master, {run_index, user_index}). Every stream in the
// project is derived this way, so results never depend on scheduling or
// worker count.
inline std::uint64_t derive_seed(std::uint64_t master,
                                 std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = splitmix64(master);
  for (std::uint64_t idx : path) s = splitmix64(s ^ splitmix64(idx + 0x632be59bd9b4e019ULL));
  return s;
}

inline std::mt19937_64 make_engine(std::uint64_t master,
                                   std::initializer_list<std::uint64_t> path) {
  return std::mt19937_64(derive_seed(master, path));
}

}  // namespace dsgdlab

#endif  // DSGDLAB_RNG_HPP
