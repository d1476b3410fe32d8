#ifndef TAXALIGN_MODEL_HPP_
#define TAXALIGN_MODEL_HPP_

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "taxalign/relations.hpp"

namespace taxalign {

// "1.A" style key.
std::string concept_key(int taxonomy_id, std::string_view name);

// Splits "1.A" into (1, "A"). Only the first dot separates; names may contain
// further dots. Returns nullopt if the prefix is not an integer.
std::optional<std::pair<int, std::string>> split_concept_key(std::string_view key);

struct SourceSpan {
  std::size_t line = 0;          // 1-based; 0 means "not from a file"
  std::size_t column_begin = 0;  // 1-based, inclusive
  std::size_t column_end = 0;    // 1-based, exclusive
  std::string text;
};

struct Concept {
  int taxonomy_id = 0;
  std::string name;

  std::string key() const { return concept_key(taxonomy_id, name); }
  bool operator==(const Concept&) const = default;
  auto operator<=>(const Concept&) const = default;
};

// A rooted is_a tree. Concepts are kept in lexicographic order of name.
class Taxonomy {
 public:
  Taxonomy() = default;
  Taxonomy(int id, std::string label) : id_(id), label_(std::move(label)) {}

  int id() const { return id_; }
  const std::string& label() const { return label_; }

  // Returns false if the concept was already present.
  bool add_concept(const std::string& name);
  // Records `child is_a parent`, declaring both. Returns false (and changes
  // nothing) if the child already has a parent.
  bool add_edge(const std::string& parent, const std::string& child);

  bool contains(std::string_view name) const;
  std::size_t size() const { return parent_.size(); }
  std::vector<std::string> concepts() const;
  std::optional<std::string> parent(const std::string& name) const;
  std::vector<std::string> children(const std::string& name) const;
  std::vector<std::string> roots() const;
  // Throws std::logic_error unless there is exactly one root.
  std::string root() const;
  bool is_leaf(const std::string& name) const;
  std::vector<std::string> leaves() const;
  bool is_descendant_or_self(const std::string& descendant, const std::string& ancestor) const;
  // Path from `name` up to its root, inclusive on both ends.
  std::vector<std::string> ancestors_or_self(const std::string& name) const;
  // Empty when the parent map is acyclic; otherwise the concepts on one cycle.
  std::vector<std::string> find_cycle() const;

  bool operator==(const Taxonomy& other) const;

 private:
  int id_ = 0;
  std::string label_;
  std::map<std::string, std::optional<std::string>, std::less<>> parent_;
  std::map<std::string, std::set<std::string>, std::less<>> children_;
};

// Articulations are always stored directed from taxonomy 1 to taxonomy 2.
struct Articulation {
  std::size_t index = 0;  // position in the input
  std::string left;       // concept name in taxonomy 1
  std::string right;      // concept name in taxonomy 2
  RelationMask mask;
  std::string source;
  SourceSpan span;

  std::string text() const;  // canonical "[1.A {equals is_included_in} 2.B]"

  // Structural equality: spans and source text are not compared.
  bool operator==(const Articulation& o) const {
    return index == o.index && left == o.left && right == o.right && mask == o.mask;
  }
};

struct ConstraintFlags {
  bool coverage = true;
  bool sibling_disjointness = true;
  bool non_emptiness = true;

  bool operator==(const ConstraintFlags&) const = default;
};

struct Alignment {
  Taxonomy first;
  Taxonomy second;
  std::vector<Articulation> articulations;
  ConstraintFlags flags;

  const Taxonomy& taxonomy(int id) const { return id == 1 ? first : second; }
  const Articulation* find_articulation(std::size_t index) const;

  // Copy keeping only the articulations whose index is (not) listed.
  // Articulation indices are preserved.
  Alignment keeping(std::span<const std::size_t> indices) const;
  Alignment without(std::span<const std::size_t> indices) const;

  std::vector<std::size_t> articulation_indices() const;

  bool operator==(const Alignment&) const = default;
};

// The cross-taxonomy pair grid: taxonomy 1 concepts x taxonomy 2 concepts,
// both in lexicographic order, flattened row-major.
struct PairGrid {
  std::vector<std::string> left;
  std::vector<std::string> right;

  static PairGrid of(const Alignment& a);

  std::size_t size() const { return left.size() * right.size(); }
  std::size_t index(std::size_t i, std::size_t j) const { return i * right.size() + j; }
  const std::string& left_of(std::size_t pair) const { return left[pair / right.size()]; }
  const std::string& right_of(std::size_t pair) const { return right[pair % right.size()]; }
  std::optional<std::size_t> find(std::string_view left_name, std::string_view right_name) const;

  bool operator==(const PairGrid&) const = default;
};

struct World {
  std::size_t id = 0;
  std::vector<BaseRelation> relations;  // indexed by PairGrid pair index
  std::vector<std::size_t> witness;     // inhabited region-grid cells, ascending

  bool operator==(const World&) const = default;
};

struct WorldSet {
  PairGrid pairs;
  std::vector<World> worlds;
  bool truncated = false;
};

struct MirEntry {
  std::string left;
  std::string right;
  RelationMask mask;
  std::array<std::size_t, 5> counts{};  // per base relation, bit order
};

struct MirTable {
  std::vector<MirEntry> entries;  // PairGrid order
  std::size_t total = 0;          // number of worlds
};

struct Diagnosis {
  bool consistent = true;
  std::vector<std::size_t> mus;
  // Every minimal conflict, sorted; absent for large inputs.
  std::optional<std::vector<std::vector<std::size_t>>> all_conflicts;
  std::vector<std::size_t> repairs;
  // is_a facts (child key, parent key) that connect the MUS endpoints.
  std::vector<std::pair<std::string, std::string>> structural_facts;
};

struct Violation {
  enum class Kind {
    kBadTaxonomyId,
    kEmptyTaxonomy,
    kNoRoot,
    kMultipleRoots,
    kCycle,
    kUnknownConcept,
    kEmptyMask,
    kUnsupportedFlag,
  };
  Kind kind;
  std::string entity;
  std::string message;
};

std::string_view to_string(Violation::Kind kind);

std::vector<Violation> validate(const Alignment& a);

}  // namespace taxalign

#endif  // TAXALIGN_MODEL_HPP_
