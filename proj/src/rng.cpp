#include "tomolab/rng.hpp"

namespace tomolab {

std::uint64_t RngStream::mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  key_ = mix(mix(seed ^ 0x6a09e667f3bcc909ULL) + mix(stream_id + 0xbb67ae8584caa73bULL) * kGamma);
}

RngStream RngStream::split(std::uint64_t child) const {
  // Child ids live in a different region of the id space than user stream ids.
  return RngStream(seed_, mix(stream_id_ ^ 0x3c6ef372fe94f82bULL) + mix(child + 1) * kGamma);
}

}  // namespace tomolab
