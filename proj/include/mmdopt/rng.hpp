#pragma once

#include <cstdint>

namespace mmdopt {

// SplitMix64 step; decorrelates seeds derived from a common base so separate
// consumers (draw set, validation set, CEM iterations, ...) get disjoint
// streams.
inline uint64_t derive_seed(uint64_t base, uint64_t stream) {
  uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace mmdopt
