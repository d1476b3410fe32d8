#ifndef TAXALIGN_ENGINE_HPP_
#define TAXALIGN_ENGINE_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "taxalign/cell_set.hpp"
#include "taxalign/model.hpp"

namespace taxalign {

// One grid cell: the deepest point of each taxonomy containing an element,
// or nullopt for "outside that taxonomy".
struct Cell {
  std::optional<std::string> first;
  std::optional<std::string> second;
};

// The canonical finite universe for an alignment. Points are the leaves of
// each taxonomy when coverage holds and all nodes otherwise; cells are
// (points1 + outside) x (points2 + outside) without (outside, outside).
class RegionGrid {
 public:
  std::size_t cell_count() const { return cells_.size(); }
  const Cell& cell(std::size_t i) const { return cells_[i]; }
  std::string cell_label(std::size_t i) const;  // "(B,E)", "(B,_)"

  const std::vector<std::string>& points(int taxonomy_id) const { return points_[taxonomy_id - 1]; }

  // Concept ids: taxonomy 1 concepts in lexicographic order, then taxonomy 2.
  std::size_t concept_count() const { return concepts_.size(); }
  std::size_t first_count() const { return first_count_; }
  const Concept& concept_at(std::size_t id) const { return concepts_[id]; }
  // Throws std::out_of_range for unknown concepts.
  std::size_t concept_id(int taxonomy_id, const std::string& name) const;

  const CellSet& ext(std::size_t concept_id) const { return ext_[concept_id]; }
  CellSet empty_set() const { return CellSet(cells_.size()); }
  CellSet cells_of(std::span<const std::size_t> indices) const;

  friend RegionGrid build_grid(const Alignment& a);

 private:
  std::vector<std::string> points_[2];
  std::vector<Cell> cells_;
  std::vector<Concept> concepts_;
  std::size_t first_count_ = 0;
  std::vector<CellSet> ext_;
};

RegionGrid build_grid(const Alignment& a);

struct CellPrimitive {
  enum class Kind { kAllEmpty, kSomeInhabited };
  Kind kind;
  CellSet cells;
};

struct Disjunct {
  BaseRelation relation;
  std::vector<CellPrimitive> primitives;
};

struct DisjunctGroup {
  std::size_t articulation_index = 0;
  std::size_t left = 0;   // concept id in the grid
  std::size_t right = 0;  // concept id in the grid
  std::vector<Disjunct> disjuncts;
};

struct CellConstraintSet {
  std::vector<CellPrimitive> global;  // non-emptiness of every concept
  std::vector<DisjunctGroup> groups;  // one per articulation
};

// Primitives for `x r y` over the grid. Empty AllEmpty primitives are omitted.
std::vector<CellPrimitive> relation_primitives(const RegionGrid& g, std::size_t x, std::size_t y, BaseRelation r);

CellConstraintSet encode(const Alignment& a, const RegionGrid& g);

struct SolverOptions {
  std::size_t branch_budget = 1'000'000;
  std::size_t world_limit = 10'000;
};

struct SolverStats {
  std::size_t branches = 0;
  std::size_t propagations = 0;
  std::size_t realizability_checks = 0;
  double wall_ms = 0.0;
};

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(const std::string& what, SolverStats stats) : std::runtime_error(what), stats_(stats) {}
  const SolverStats& stats() const { return stats_; }

 private:
  SolverStats stats_;
};

// Extra per-pair restriction conjoined with the articulations. The mask may be
// empty, which makes the problem trivially inconsistent.
struct PairRestriction {
  std::string left;
  std::string right;
  RelationMask mask;
};

struct ConsistencyResult {
  bool consistent = false;
  std::vector<std::size_t> witness;  // inhabited cells of the maximal witness
  SolverStats stats;
};

struct Enumeration {
  WorldSet worlds;
  SolverStats stats;
};

// Throws BudgetExceeded when the branch budget runs out.
ConsistencyResult check_consistency(const Alignment& a, const SolverOptions& options = {},
                                    std::span<const PairRestriction> extra = {});

// All distinct relation maps realizable under the alignment, sorted
// lexicographically and numbered from 0. Stops after `limit` worlds with
// `truncated` set. Throws BudgetExceeded when the branch budget runs out.
Enumeration enumerate_worlds(const Alignment& a, std::size_t limit, const SolverOptions& options = {});
Enumeration enumerate_worlds(const Alignment& a, const SolverOptions& options = {});

// Cross-taxonomy relation map (PairGrid order) induced by a set of inhabited
// cells. Throws std::invalid_argument if some concept is left empty.
std::vector<BaseRelation> relation_map_of(std::span<const std::size_t> witness, const RegionGrid& g);

// Relation between any two concepts (either taxonomy) under a witness.
BaseRelation relation_between(const CellSet& inhabited, const RegionGrid& g, std::size_t x, std::size_t y);

}  // namespace taxalign

#endif  // TAXALIGN_ENGINE_HPP_
