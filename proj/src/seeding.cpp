#include "falqon/seeding.hpp"

namespace falqon {

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t size, std::uint64_t index,
                          SeedPurpose purpose) {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ size);
  h = mix64(h ^ index);
  return mix64(h ^ static_cast<std::uint64_t>(purpose));
}

}  // namespace falqon
