#pragma once

#include <cstdint>
#include <string>

#include "sigjoin/relation.hpp"

namespace sigjoin {

/// Parameters of a synthetic R/S pair.
struct GenSpec {
  std::size_t card_r = 10000;
  std::size_t card_s = 20000;
  std::size_t attr_len = 100;
  /// Expected result cardinality divided by card_r * card_s.
  double selectivity = 1.5 / 20000.0;
  std::size_t row_bytes = 128;
  std::uint64_t seed = 1;

  /// Throws std::invalid_argument unless 1 <= card_r <= card_s, attr_len >= 1
  /// and 0 <= selectivity <= 1.
  void validate() const;

  /// selectivity * card_r * card_s, rounded to the nearest integer.
  std::uint64_t target_matches() const;

  /// Selectivity giving about 1.5 result rows per tuple of the larger relation.
  static double default_selectivity(std::size_t card_r, std::size_t card_s);
};

struct GeneratedPair {
  Relation r;
  Relation s;
  /// Exact number of (r, s) pairs with equal keys.
  std::uint64_t planted_matches = 0;
};

/// Column layout of generated relations: id:integer, grade:character,
/// jkey:string (the join key), created:date, pad:string (filler).
Schema generated_schema();
inline constexpr const char* kGeneratedKeyColumn = "jkey";

/// Deterministic for a fixed spec. Join keys are printable ASCII strings of
/// exactly attr_len bytes. Matches are planted explicitly: S rows either copy an
/// R key or receive a key absent from R, chosen so the exact match count equals
/// target_matches() whenever the key space allows it. `planted_matches` always
/// holds the exact count.
GeneratedPair generate_pair(const GenSpec& spec);

}  // namespace sigjoin
