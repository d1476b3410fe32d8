#ifndef TAXALIGN_RELATIONS_HPP_
#define TAXALIGN_RELATIONS_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace taxalign {

// The five RCC-5 base relations. The enumerator value is the bit position
// used by RelationMask, so the order (==, <, >, ><, !) is part of every
// serialized format.
enum class BaseRelation : std::uint8_t {
  kEquals = 0,
  kIsIncludedIn = 1,
  kIncludes = 2,
  kOverlaps = 3,
  kDisjoint = 4,
};

inline constexpr std::array<BaseRelation, 5> kAllBaseRelations = {
    BaseRelation::kEquals, BaseRelation::kIsIncludedIn, BaseRelation::kIncludes,
    BaseRelation::kOverlaps, BaseRelation::kDisjoint};

constexpr int to_index(BaseRelation r) { return static_cast<int>(r); }

constexpr BaseRelation converse(BaseRelation r) {
  switch (r) {
    case BaseRelation::kIsIncludedIn:
      return BaseRelation::kIncludes;
    case BaseRelation::kIncludes:
      return BaseRelation::kIsIncludedIn;
    default:
      return r;
  }
}

std::string_view long_name(BaseRelation r);
std::string_view short_name(BaseRelation r);

// Accepts both the long (`is_included_in`) and short (`<`) spellings.
std::optional<BaseRelation> parse_relation_token(std::string_view token);

// A subset of the base relations packed into five bits.
class RelationMask {
 public:
  constexpr RelationMask() = default;
  constexpr RelationMask(BaseRelation r) : bits_(bit(r)) {}  // NOLINT(implicit)
  constexpr RelationMask(std::initializer_list<BaseRelation> rs) {
    for (auto r : rs) bits_ |= bit(r);
  }

  static constexpr RelationMask from_bits(std::uint8_t bits) {
    RelationMask m;
    m.bits_ = bits & kFullBits;
    return m;
  }
  static constexpr RelationMask full() { return from_bits(kFullBits); }
  static constexpr RelationMask none() { return {}; }

  constexpr std::uint8_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool is_full() const { return bits_ == kFullBits; }
  constexpr bool contains(BaseRelation r) const { return (bits_ & bit(r)) != 0; }
  constexpr bool contains(RelationMask other) const {
    return (bits_ & other.bits_) == other.bits_;
  }
  constexpr int size() const {
    int n = 0;
    for (std::uint8_t b = bits_; b != 0; b &= b - 1) ++n;
    return n;
  }
  constexpr bool is_single() const { return size() == 1; }

  // Only meaningful when is_single().
  constexpr BaseRelation single() const {
    for (auto r : kAllBaseRelations)
      if (contains(r)) return r;
    return BaseRelation::kEquals;
  }

  std::vector<BaseRelation> relations() const;

  constexpr RelationMask operator|(RelationMask o) const { return from_bits(bits_ | o.bits_); }
  constexpr RelationMask operator&(RelationMask o) const { return from_bits(bits_ & o.bits_); }
  constexpr RelationMask operator~() const { return from_bits(~bits_); }
  constexpr RelationMask& operator|=(RelationMask o) {
    bits_ = (bits_ | o.bits_) & kFullBits;
    return *this;
  }
  constexpr RelationMask& operator&=(RelationMask o) {
    bits_ &= o.bits_;
    return *this;
  }
  constexpr bool operator==(const RelationMask&) const = default;
  constexpr auto operator<=>(const RelationMask&) const = default;

  // `equals` for singletons, `{equals is_included_in}` otherwise.
  std::string to_string() const;
  // `==` / `{== <}`.
  std::string to_short_string() const;

 private:
  static constexpr std::uint8_t kFullBits = 0x1f;
  static constexpr std::uint8_t bit(BaseRelation r) {
    return static_cast<std::uint8_t>(1u << to_index(r));
  }
  std::uint8_t bits_ = 0;
};

RelationMask converse(RelationMask m);

// RCC-5 composition over nonempty sets.
RelationMask compose(BaseRelation a, BaseRelation b);
RelationMask compose(RelationMask a, RelationMask b);

// Classifies two nonempty sets from the emptiness of their three Venn
// regions. Throws std::invalid_argument if either set would be empty.
BaseRelation classify_regions(bool intersection, bool left_only, bool right_only);

// Throws std::invalid_argument on an empty input set.
BaseRelation base_relation_of(const std::set<int>& a, const std::set<int>& b);

}  // namespace taxalign

#endif  // TAXALIGN_RELATIONS_HPP_
