#include "taxalign/relations.hpp"

#include <algorithm>
#include <stdexcept>

namespace taxalign {

namespace {

constexpr std::array<std::string_view, 5> kLongNames = {
    "equals", "is_included_in", "includes", "overlaps", "disjoint"};
constexpr std::array<std::string_view, 5> kShortNames = {"==", "<", ">", "><", "!"};

// Rows: left relation, columns: right relation, both in bit order
// (==, <, >, ><, !). Verified against subset enumeration in relations_test.
constexpr std::uint8_t kCompositionBits[5][5] = {
    {0x01, 0x02, 0x04, 0x08, 0x10},
    {0x02, 0x02, 0x1f, 0x1a, 0x10},
    {0x04, 0x0f, 0x04, 0x0c, 0x1c},
    {0x08, 0x0a, 0x1c, 0x1f, 0x1c},
    {0x10, 0x1a, 0x10, 0x1a, 0x1f},
};

}  // namespace

std::string_view long_name(BaseRelation r) { return kLongNames[to_index(r)]; }
std::string_view short_name(BaseRelation r) { return kShortNames[to_index(r)]; }

std::optional<BaseRelation> parse_relation_token(std::string_view token) {
  for (auto r : kAllBaseRelations) {
    if (token == long_name(r) || token == short_name(r)) return r;
  }
  return std::nullopt;
}

std::vector<BaseRelation> RelationMask::relations() const {
  std::vector<BaseRelation> out;
  for (auto r : kAllBaseRelations)
    if (contains(r)) out.push_back(r);
  return out;
}

namespace {

template <typename NameFn>
std::string render_mask(RelationMask m, NameFn name) {
  if (m.is_single()) return std::string(name(m.single()));
  std::string out = "{";
  bool first = true;
  for (auto r : m.relations()) {
    if (!first) out += ' ';
    out += name(r);
    first = false;
  }
  out += '}';
  return out;
}

}  // namespace

std::string RelationMask::to_string() const {
  return render_mask(*this, [](BaseRelation r) { return long_name(r); });
}

std::string RelationMask::to_short_string() const {
  return render_mask(*this, [](BaseRelation r) { return short_name(r); });
}

RelationMask converse(RelationMask m) {
  RelationMask out;
  for (auto r : m.relations()) out |= converse(r);
  return out;
}

RelationMask compose(BaseRelation a, BaseRelation b) {
  return RelationMask::from_bits(kCompositionBits[to_index(a)][to_index(b)]);
}

RelationMask compose(RelationMask a, RelationMask b) {
  RelationMask out;
  for (auto ra : a.relations())
    for (auto rb : b.relations()) out |= compose(ra, rb);
  return out;
}

BaseRelation classify_regions(bool intersection, bool left_only, bool right_only) {
  if (!intersection && !left_only) throw std::invalid_argument("left set is empty");
  if (!intersection && !right_only) throw std::invalid_argument("right set is empty");
  if (!intersection) return BaseRelation::kDisjoint;
  if (left_only && right_only) return BaseRelation::kOverlaps;
  if (left_only) return BaseRelation::kIncludes;
  if (right_only) return BaseRelation::kIsIncludedIn;
  return BaseRelation::kEquals;
}

BaseRelation base_relation_of(const std::set<int>& a, const std::set<int>& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("base_relation_of: empty set");
  bool intersection = false;
  bool left_only = false;
  for (int x : a) {
    if (b.count(x) != 0)
      intersection = true;
    else
      left_only = true;
  }
  bool right_only = std::any_of(b.begin(), b.end(), [&](int x) { return a.count(x) == 0; });
  return classify_regions(intersection, left_only, right_only);
}

}  // namespace taxalign
