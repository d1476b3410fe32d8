#include "taxalign/model.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace taxalign {

std::string concept_key(int taxonomy_id, std::string_view name) {
  std::string key = std::to_string(taxonomy_id);
  key += '.';
  key += name;
  return key;
}

std::optional<std::pair<int, std::string>> split_concept_key(std::string_view key) {
  auto dot = key.find('.');
  if (dot == std::string_view::npos || dot == 0 || dot + 1 == key.size()) return std::nullopt;
  int id = 0;
  auto [ptr, ec] = std::from_chars(key.data(), key.data() + dot, id);
  if (ec != std::errc() || ptr != key.data() + dot) return std::nullopt;
  return std::make_pair(id, std::string(key.substr(dot + 1)));
}

bool Taxonomy::add_concept(const std::string& name) {
  auto [it, inserted] = parent_.try_emplace(name, std::nullopt);
  if (inserted) children_[name];
  return inserted;
}

bool Taxonomy::add_edge(const std::string& parent, const std::string& child) {
  add_concept(parent);
  add_concept(child);
  auto& slot = parent_.find(child)->second;
  if (slot.has_value()) return false;
  slot = parent;
  children_[parent].insert(child);
  return true;
}

bool Taxonomy::contains(std::string_view name) const { return parent_.find(name) != parent_.end(); }

std::vector<std::string> Taxonomy::concepts() const {
  std::vector<std::string> out;
  out.reserve(parent_.size());
  for (const auto& [name, _] : parent_) out.push_back(name);
  return out;
}

std::optional<std::string> Taxonomy::parent(const std::string& name) const {
  auto it = parent_.find(name);
  if (it == parent_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> Taxonomy::children(const std::string& name) const {
  auto it = children_.find(name);
  if (it == children_.end()) return {};
  return {it->second.begin(), it->second.end()};
}

std::vector<std::string> Taxonomy::roots() const {
  std::vector<std::string> out;
  for (const auto& [name, parent] : parent_)
    if (!parent) out.push_back(name);
  return out;
}

std::string Taxonomy::root() const {
  auto r = roots();
  if (r.size() != 1) throw std::logic_error("taxonomy " + std::to_string(id_) + " has no unique root");
  return r.front();
}

bool Taxonomy::is_leaf(const std::string& name) const {
  auto it = children_.find(name);
  return it == children_.end() || it->second.empty();
}

std::vector<std::string> Taxonomy::leaves() const {
  std::vector<std::string> out;
  for (const auto& [name, kids] : children_)
    if (kids.empty()) out.push_back(name);
  return out;
}

bool Taxonomy::is_descendant_or_self(const std::string& descendant, const std::string& ancestor) const {
  std::optional<std::string> cur = descendant;
  for (std::size_t steps = 0; cur && steps <= parent_.size(); ++steps) {
    if (*cur == ancestor) return true;
    cur = parent(*cur);
  }
  return false;
}

std::vector<std::string> Taxonomy::ancestors_or_self(const std::string& name) const {
  std::vector<std::string> out;
  std::optional<std::string> cur = name;
  while (cur && out.size() <= parent_.size()) {
    out.push_back(*cur);
    cur = parent(*cur);
  }
  return out;
}

std::vector<std::string> Taxonomy::find_cycle() const {
  // 0 = unvisited, 1 = on current walk, 2 = done
  std::map<std::string, int, std::less<>> state;
  for (const auto& [start, _] : parent_) {
    if (state[start] != 0) continue;
    std::vector<std::string> walk;
    std::optional<std::string> cur = start;
    while (cur && state[*cur] == 0) {
      state[*cur] = 1;
      walk.push_back(*cur);
      cur = parent(*cur);
    }
    if (cur && state[*cur] == 1) {
      auto from = std::find(walk.begin(), walk.end(), *cur);
      return {from, walk.end()};
    }
    for (const auto& n : walk) state[n] = 2;
  }
  return {};
}

bool Taxonomy::operator==(const Taxonomy& other) const {
  return id_ == other.id_ && label_ == other.label_ && parent_ == other.parent_;
}

std::string Articulation::text() const {
  return "[" + concept_key(1, left) + " " + mask.to_string() + " " + concept_key(2, right) + "]";
}

const Articulation* Alignment::find_articulation(std::size_t index) const {
  for (const auto& art : articulations)
    if (art.index == index) return &art;
  return nullptr;
}

Alignment Alignment::keeping(std::span<const std::size_t> indices) const {
  Alignment out{first, second, {}, flags};
  for (const auto& art : articulations)
    if (std::find(indices.begin(), indices.end(), art.index) != indices.end())
      out.articulations.push_back(art);
  return out;
}

Alignment Alignment::without(std::span<const std::size_t> indices) const {
  Alignment out{first, second, {}, flags};
  for (const auto& art : articulations)
    if (std::find(indices.begin(), indices.end(), art.index) == indices.end())
      out.articulations.push_back(art);
  return out;
}

std::vector<std::size_t> Alignment::articulation_indices() const {
  std::vector<std::size_t> out;
  out.reserve(articulations.size());
  for (const auto& art : articulations) out.push_back(art.index);
  return out;
}

PairGrid PairGrid::of(const Alignment& a) { return {a.first.concepts(), a.second.concepts()}; }

std::optional<std::size_t> PairGrid::find(std::string_view left_name, std::string_view right_name) const {
  auto li = std::lower_bound(left.begin(), left.end(), left_name);
  auto ri = std::lower_bound(right.begin(), right.end(), right_name);
  if (li == left.end() || *li != left_name || ri == right.end() || *ri != right_name)
    return std::nullopt;
  return index(static_cast<std::size_t>(li - left.begin()), static_cast<std::size_t>(ri - right.begin()));
}

std::string_view to_string(Violation::Kind kind) {
  switch (kind) {
    case Violation::Kind::kBadTaxonomyId:
      return "bad-taxonomy-id";
    case Violation::Kind::kEmptyTaxonomy:
      return "empty-taxonomy";
    case Violation::Kind::kNoRoot:
      return "no-root";
    case Violation::Kind::kMultipleRoots:
      return "multiple-roots";
    case Violation::Kind::kCycle:
      return "cycle";
    case Violation::Kind::kUnknownConcept:
      return "unknown-concept";
    case Violation::Kind::kEmptyMask:
      return "empty-mask";
    case Violation::Kind::kUnsupportedFlag:
      return "unsupported-flag";
  }
  return "unknown";
}

namespace {

void validate_taxonomy(const Taxonomy& t, int expected_id, std::vector<Violation>& out) {
  std::string entity = "taxonomy " + std::to_string(t.id());
  if (t.id() != expected_id) {
    out.push_back({Violation::Kind::kBadTaxonomyId, entity,
                   "expected taxonomy id " + std::to_string(expected_id)});
  }
  if (t.size() == 0) {
    out.push_back({Violation::Kind::kEmptyTaxonomy, entity, "taxonomy has no concepts"});
    return;
  }
  if (auto cycle = t.find_cycle(); !cycle.empty()) {
    std::string members;
    for (const auto& c : cycle) members += (members.empty() ? "" : " ") + concept_key(t.id(), c);
    out.push_back({Violation::Kind::kCycle, concept_key(t.id(), cycle.front()), "is_a cycle: " + members});
  }
  auto roots = t.roots();
  if (roots.empty()) {
    out.push_back({Violation::Kind::kNoRoot, entity, "taxonomy has no root"});
  } else if (roots.size() > 1) {
    std::string names;
    for (const auto& r : roots) names += (names.empty() ? "" : " ") + concept_key(t.id(), r);
    out.push_back({Violation::Kind::kMultipleRoots, entity, "multiple roots: " + names});
  }
}

}  // namespace

std::vector<Violation> validate(const Alignment& a) {
  std::vector<Violation> out;
  validate_taxonomy(a.first, 1, out);
  validate_taxonomy(a.second, 2, out);
  if (!a.flags.sibling_disjointness || !a.flags.non_emptiness) {
    out.push_back({Violation::Kind::kUnsupportedFlag, "flags",
                   "sibling disjointness and non-emptiness cannot be disabled"});
  }
  for (const auto& art : a.articulations) {
    std::string entity = "articulation " + std::to_string(art.index);
    if (!a.first.contains(art.left)) {
      out.push_back({Violation::Kind::kUnknownConcept, concept_key(1, art.left),
                     entity + " references unknown concept " + concept_key(1, art.left)});
    }
    if (!a.second.contains(art.right)) {
      out.push_back({Violation::Kind::kUnknownConcept, concept_key(2, art.right),
                     entity + " references unknown concept " + concept_key(2, art.right)});
    }
    if (art.mask.empty()) out.push_back({Violation::Kind::kEmptyMask, entity, "empty relation mask"});
  }
  return out;
}

}  // namespace taxalign
