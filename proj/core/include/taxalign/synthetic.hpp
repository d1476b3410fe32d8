#ifndef TAXALIGN_SYNTHETIC_HPP_
#define TAXALIGN_SYNTHETIC_HPP_

#include <cstdint>
#include <optional>
#include <string_view>

#include "taxalign/model.hpp"

namespace taxalign {

enum class SyntheticPattern { kIncluded, kCongruent };

std::optional<SyntheticPattern> parse_pattern(std::string_view name);

struct SyntheticSpec {
  int depth = 2;
  int branch = 2;
  SyntheticPattern pattern = SyntheticPattern::kIncluded;
  std::uint64_t seed = 0;
  std::size_t max_concepts = 100'000;  // per taxonomy
};

// Two identical balanced trees articulated so that exactly one possible world
// remains. `included` relates every leaf to the counterpart's parent by
// proper inclusion (both directions) and pins leaves apart from their
// counterparts' siblings with `disjoint`; `congruent` uses leafwise
// `equals`. The seed only permutes the articulation order.
//
// Throws std::invalid_argument for depth < 1, branch < 2 or an oversized
// tree, and std::logic_error if the result does not have exactly one world.
Alignment generate_synthetic(const SyntheticSpec& spec);

}  // namespace taxalign

#endif  // TAXALIGN_SYNTHETIC_HPP_
