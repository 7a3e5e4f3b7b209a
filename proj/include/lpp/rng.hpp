#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace lpp {

using Engine = std::mt19937_64;

/// Counter-based stream split. A stream is addressed by (master seed, label,
/// index); the label is hashed (FNV-1a) so that adding a new stage with a new
/// label never shifts the streams of existing stages.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t index);

inline Engine make_stream(std::uint64_t master, std::string_view label,
                          std::uint64_t index) {
  return Engine(derive_seed(master, label, index));
}

}  // namespace lpp
