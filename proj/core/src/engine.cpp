#include "taxalign/engine.hpp"

#include <algorithm>
#include <chrono>
#include <map>

namespace taxalign {

std::string RegionGrid::cell_label(std::size_t i) const {
  const Cell& c = cells_[i];
  return "(" + c.first.value_or("_") + "," + c.second.value_or("_") + ")";
}

std::size_t RegionGrid::concept_id(int taxonomy_id, const std::string& name) const {
  auto begin = concepts_.begin() + (taxonomy_id == 1 ? 0 : static_cast<std::ptrdiff_t>(first_count_));
  auto end = taxonomy_id == 1 ? concepts_.begin() + static_cast<std::ptrdiff_t>(first_count_) : concepts_.end();
  auto it = std::lower_bound(begin, end, name, [](const Concept& c, const std::string& n) { return c.name < n; });
  if (it == end || it->name != name) throw std::out_of_range("unknown concept " + concept_key(taxonomy_id, name));
  return static_cast<std::size_t>(it - concepts_.begin());
}

CellSet RegionGrid::cells_of(std::span<const std::size_t> indices) const {
  CellSet out(cells_.size());
  for (auto i : indices) out.set(i);
  return out;
}

RegionGrid build_grid(const Alignment& a) {
  RegionGrid g;
  const Taxonomy* taxa[2] = {&a.first, &a.second};
  for (int t = 0; t < 2; ++t)
    g.points_[t] = a.flags.coverage ? taxa[t]->leaves() : taxa[t]->concepts();

  // Outside-the-taxonomy sorts last in each coordinate.
  auto coords = [](const std::vector<std::string>& pts) {
    std::vector<std::optional<std::string>> out(pts.begin(), pts.end());
    out.emplace_back(std::nullopt);
    return out;
  };
  for (const auto& p1 : coords(g.points_[0])) {
    for (const auto& p2 : coords(g.points_[1])) {
      if (!p1 && !p2) continue;
      g.cells_.push_back({p1, p2});
    }
  }

  for (int t = 0; t < 2; ++t)
    for (const auto& name : taxa[t]->concepts()) g.concepts_.push_back({t + 1, name});
  g.first_count_ = a.first.size();

  for (const auto& c : g.concepts_) {
    const Taxonomy& tax = *taxa[c.taxonomy_id - 1];
    CellSet ext(g.cells_.size());
    for (std::size_t i = 0; i < g.cells_.size(); ++i) {
      const auto& coord = c.taxonomy_id == 1 ? g.cells_[i].first : g.cells_[i].second;
      if (coord && tax.is_descendant_or_self(*coord, c.name)) ext.set(i);
    }
    g.ext_.push_back(std::move(ext));
  }
  return g;
}

std::vector<CellPrimitive> relation_primitives(const RegionGrid& g, std::size_t x, std::size_t y, BaseRelation r) {
  const CellSet& ex = g.ext(x);
  const CellSet& ey = g.ext(y);
  std::vector<CellPrimitive> out;
  auto empty = [&](CellSet cells) {
    if (cells.any()) out.push_back({CellPrimitive::Kind::kAllEmpty, std::move(cells)});
  };
  auto inhabited = [&](CellSet cells) { out.push_back({CellPrimitive::Kind::kSomeInhabited, std::move(cells)}); };
  switch (r) {
    case BaseRelation::kEquals:
      empty((ex - ey) | (ey - ex));
      break;
    case BaseRelation::kIsIncludedIn:
      empty(ex - ey);
      inhabited(ey - ex);
      break;
    case BaseRelation::kIncludes:
      empty(ey - ex);
      inhabited(ex - ey);
      break;
    case BaseRelation::kDisjoint:
      empty(ex & ey);
      break;
    case BaseRelation::kOverlaps:
      inhabited(ex & ey);
      inhabited(ex - ey);
      inhabited(ey - ex);
      break;
  }
  return out;
}

CellConstraintSet encode(const Alignment& a, const RegionGrid& g) {
  CellConstraintSet out;
  for (std::size_t c = 0; c < g.concept_count(); ++c)
    out.global.push_back({CellPrimitive::Kind::kSomeInhabited, g.ext(c)});
  for (const auto& art : a.articulations) {
    DisjunctGroup group;
    group.articulation_index = art.index;
    group.left = g.concept_id(1, art.left);
    group.right = g.concept_id(2, art.right);
    for (auto r : art.mask.relations())
      group.disjuncts.push_back({r, relation_primitives(g, group.left, group.right, r)});
    out.groups.push_back(std::move(group));
  }
  return out;
}

BaseRelation relation_between(const CellSet& inhabited, const RegionGrid& g, std::size_t x, std::size_t y) {
  const CellSet& ex = g.ext(x);
  const CellSet& ey = g.ext(y);
  return classify_regions(CellSet::any_and(ex, ey, inhabited), CellSet::any_andnot(ex, ey, inhabited),
                          CellSet::any_andnot(ey, ex, inhabited));
}

std::vector<BaseRelation> relation_map_of(std::span<const std::size_t> witness, const RegionGrid& g) {
  CellSet inhabited = g.cells_of(witness);
  for (std::size_t c = 0; c < g.concept_count(); ++c) {
    if (!g.ext(c).intersects(inhabited))
      throw std::invalid_argument("concept " + g.concept_at(c).key() + " is empty under the witness");
  }
  std::vector<BaseRelation> out;
  std::size_t n2 = g.concept_count() - g.first_count();
  out.reserve(g.first_count() * n2);
  for (std::size_t i = 0; i < g.first_count(); ++i)
    for (std::size_t j = 0; j < n2; ++j) out.push_back(relation_between(inhabited, g, i, g.first_count() + j));
  return out;
}

namespace {

// Which of (intersection, left-only, right-only) a relation inhabits.
constexpr unsigned region_pattern(BaseRelation r) {
  switch (r) {
    case BaseRelation::kEquals:
      return 0b100;
    case BaseRelation::kIsIncludedIn:
      return 0b101;
    case BaseRelation::kIncludes:
      return 0b110;
    case BaseRelation::kDisjoint:
      return 0b011;
    case BaseRelation::kOverlaps:
      return 0b111;
  }
  return 0;
}

struct Domain {
  std::size_t pair = 0;
  std::size_t left = 0;
  std::size_t right = 0;
  RelationMask mask;
};

class Search {
 public:
  Search(const Alignment& a, const SolverOptions& options, std::span<const PairRestriction> extra)
      : grid_(build_grid(a)), pairs_(PairGrid::of(a)), options_(options), start_(Clock::now()) {
    zeroed_ = grid_.empty_set();
    for (std::size_t c = 0; c < grid_.concept_count(); ++c) required_.push_back(grid_.ext(c));

    std::map<std::size_t, Domain> domains;
    auto restrict = [&](const std::string& left, const std::string& right, RelationMask mask) {
      std::size_t x = grid_.concept_id(1, left);
      std::size_t y = grid_.concept_id(2, right);
      std::size_t pair = pairs_.index(x, y - grid_.first_count());
      auto [it, inserted] = domains.try_emplace(pair, Domain{pair, x, y, RelationMask::full()});
      it->second.mask &= mask;
    };
    for (const auto& art : a.articulations) restrict(art.left, art.right, art.mask);
    for (const auto& r : extra) restrict(r.left, r.right, r.mask);

    fixed_.assign(pairs_.size(), false);
    for (const auto& [pair, d] : domains) {
      domains_.push_back(d);
      fixed_[pair] = true;
    }
    std::stable_sort(domains_.begin(), domains_.end(),
                     [](const Domain& l, const Domain& r) { return l.mask.size() < r.mask.size(); });
  }

  ConsistencyResult check() {
    ConsistencyResult out;
    mode_ = Mode::kCheck;
    if (feasible() && assign(0)) {
      out.consistent = true;
      out.witness = zeroed_.complement().elements();
    }
    out.stats = finish_stats();
    return out;
  }

  Enumeration enumerate(std::size_t limit) {
    mode_ = Mode::kEnumerate;
    limit_ = limit;
    Enumeration out;
    if (feasible()) assign(0);
    std::sort(worlds_.begin(), worlds_.end(),
              [](const World& l, const World& r) { return l.relations < r.relations; });
    for (std::size_t i = 0; i < worlds_.size(); ++i) worlds_[i].id = i;
    out.worlds.pairs = pairs_;
    out.worlds.worlds = std::move(worlds_);
    out.worlds.truncated = truncated_;
    out.stats = finish_stats();
    return out;
  }

 private:
  using Clock = std::chrono::steady_clock;
  enum class Mode { kCheck, kEnumerate };

  struct Saved {
    CellSet zeroed;
    std::size_t required;
  };

  SolverStats finish_stats() {
    stats_.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    return stats_;
  }

  void branch() {
    if (++stats_.branches > options_.branch_budget) {
      throw BudgetExceeded("branch budget of " + std::to_string(options_.branch_budget) + " exceeded",
                           finish_stats());
    }
  }

  Saved save() const { return {zeroed_, required_.size()}; }
  void restore(Saved& s) {
    zeroed_ = std::move(s.zeroed);
    required_.resize(s.required);
  }

  // Every SomeInhabited set keeps at least one cell outside the zeroed set.
  // Sufficient because inhabiting every non-zeroed cell is then a witness.
  bool feasible() {
    ++stats_.realizability_checks;
    return std::none_of(required_.begin(), required_.end(), [&](const CellSet& r) { return r.is_subset_of(zeroed_); });
  }

  bool apply(const std::vector<CellPrimitive>& prims) {
    for (const auto& p : prims) {
      ++stats_.propagations;
      if (p.kind == CellPrimitive::Kind::kAllEmpty)
        zeroed_ |= p.cells;
      else
        required_.push_back(p.cells);
    }
    return feasible();
  }

  bool feasible_with(const std::vector<CellPrimitive>& prims) {
    ++stats_.realizability_checks;
    CellSet zeroed = zeroed_;
    for (const auto& p : prims)
      if (p.kind == CellPrimitive::Kind::kAllEmpty) zeroed |= p.cells;
    for (const auto& p : prims)
      if (p.kind == CellPrimitive::Kind::kSomeInhabited && p.cells.is_subset_of(zeroed)) return false;
    return std::none_of(required_.begin(), required_.end(), [&](const CellSet& r) { return r.is_subset_of(zeroed); });
  }

  // Branches over the allowed relations of every restricted pair. Returns true
  // when the search should stop.
  bool assign(std::size_t k) {
    branch();
    if (k == domains_.size()) {
      if (mode_ == Mode::kCheck) return true;
      return refine(0);
    }
    const Domain& d = domains_[k];
    for (auto r : d.mask.relations()) {
      Saved saved = save();
      if (apply(relation_primitives(grid_, d.left, d.right, r)) && assign(k + 1)) return true;
      restore(saved);
    }
    return false;
  }

  // Splits on the first unrestricted pair whose relation in the maximal
  // witness is not forced. Pairs before `start` are already forced: the
  // zeroed set only grows, so their relations cannot change.
  bool refine(std::size_t start) {
    branch();
    CellSet inhabited = zeroed_.complement();
    std::size_t n2 = pairs_.right.size();
    for (std::size_t p = start; p < pairs_.size(); ++p) {
      if (fixed_[p]) continue;
      std::size_t x = p / n2;
      std::size_t y = grid_.first_count() + p % n2;
      BaseRelation current = relation_between(inhabited, grid_, x, y);
      unsigned pattern = region_pattern(current);
      RelationMask options(current);
      for (auto alt : kAllBaseRelations) {
        unsigned alt_pattern = region_pattern(alt);
        if (alt == current || (alt_pattern & ~pattern) != 0) continue;
        if (feasible_with(relation_primitives(grid_, x, y, alt))) options |= alt;
      }
      if (options.is_single()) continue;
      for (auto r : options.relations()) {
        Saved saved = save();
        if (apply(relation_primitives(grid_, x, y, r)) && refine(p + 1)) return true;
        restore(saved);
      }
      return false;
    }
    return emit(inhabited);
  }

  bool emit(const CellSet& inhabited) {
    if (worlds_.size() >= limit_) {
      truncated_ = true;
      return true;
    }
    World w;
    w.witness = inhabited.elements();
    w.relations = relation_map_of(w.witness, grid_);
    worlds_.push_back(std::move(w));
    return false;
  }

  RegionGrid grid_;
  PairGrid pairs_;
  SolverOptions options_;
  Clock::time_point start_;
  Mode mode_ = Mode::kCheck;
  std::size_t limit_ = 0;

  std::vector<Domain> domains_;
  std::vector<bool> fixed_;
  CellSet zeroed_;
  std::vector<CellSet> required_;

  std::vector<World> worlds_;
  bool truncated_ = false;
  SolverStats stats_;
};

}  // namespace

ConsistencyResult check_consistency(const Alignment& a, const SolverOptions& options,
                                    std::span<const PairRestriction> extra) {
  return Search(a, options, extra).check();
}

Enumeration enumerate_worlds(const Alignment& a, std::size_t limit, const SolverOptions& options) {
  return Search(a, options, {}).enumerate(limit);
}

Enumeration enumerate_worlds(const Alignment& a, const SolverOptions& options) {
  return enumerate_worlds(a, options.world_limit, options);
}

}  // namespace taxalign
