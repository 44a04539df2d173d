#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

#include "goci/builtins.hpp"
#include "goci/domain.hpp"
#include "goci/logic.hpp"

namespace goci {

/// Compressor-imperfection tolerance; also the excess of the failure sentinel.
inline constexpr double kNcdTolerance = 0.15;
inline constexpr double kDistanceSentinel = 1.0 + kNcdTolerance;

/// LZSS, 4096-byte window, matches of 3 or more, greedy parse.
/// Layout: 4-byte little-endian length, then groups of up to eight tokens
/// led by a flag byte (bit set = match). A literal is one byte. A match is
/// two bytes, 12 bits of offset-1 and 4 bits of length-3; a length nibble
/// of 15 is followed by one byte extending the length.
std::string lzss_compress(std::string_view data);
std::string lzss_decompress(std::string_view packed);

using Compressor = std::function<std::size_t(std::string_view)>;

std::size_t compressed_size(std::string_view data);

struct DistanceReport {
  double ncd = kDistanceSentinel;
  std::size_t c_a = 0, c_b = 0, c_ab = 0;
  std::size_t len_a = 0, len_b = 0;
  bool failed = false;
  std::string failure;
};

/// (min(C(a\nb), C(b\na)) - min(C(a), C(b))) / max(C(a), C(b)). Throws std::domain_error
/// when both plans are empty.
DistanceReport ncd(std::string_view a, std::string_view b, const Compressor& c = compressed_size);

/// Precomputed plan of one example, reused across candidate theories.
struct DistanceTarget {
  const GroundExample* example = nullptr;
  const Domain* domain = nullptr;
  const BuiltinRegistry* builtins = &BuiltinRegistry::standard();
  std::string plan;

  DistanceTarget(const GroundExample& x, const Domain& d,
                 const BuiltinRegistry& reg = BuiltinRegistry::standard());
};

/// Smallest NCD between the plan of some clause grounded on the example and
/// the example's own plan. Numeric variables the theory leaves unconstrained
/// ground to an unknown marker; a clause that cannot be grounded or expanded
/// at all scores the sentinel 1 + tolerance.
DistanceReport conceptual_distance(const Theory& t, const DistanceTarget& target);
DistanceReport conceptual_distance(const Theory& t, const GroundExample& x, const Domain& d,
                                   const BuiltinRegistry& reg = BuiltinRegistry::standard());

}  // namespace goci
