#include "lsam/rng.hpp"

namespace lsam {

std::uint64_t derive_seed(std::uint64_t root, std::string_view stream,
                          std::uint64_t index) {
  // FNV-1a over the stream name, then mixed with root and index.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : stream) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return mix_seed(mix_seed(root, h), index);
}

ParamVec standard_normal_vec(std::uint64_t seed, Eigen::Index dim) {
  Rng rng(seed);
  return rng.normal_vec(dim);
}

}  // namespace lsam
