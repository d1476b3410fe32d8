#include "taxalign/synthetic.hpp"

#include <random>
#include <stdexcept>

#include "taxalign/engine.hpp"

namespace taxalign {

std::optional<SyntheticPattern> parse_pattern(std::string_view name) {
  if (name == "included") return SyntheticPattern::kIncluded;
  if (name == "congruent") return SyntheticPattern::kCongruent;
  return std::nullopt;
}

namespace {

void grow(Taxonomy& t, const std::string& node, int levels_left, int branch) {
  if (levels_left == 0) return;
  for (int k = 0; k < branch; ++k) {
    std::string child = node + "_" + std::to_string(k);
    t.add_edge(node, child);
    grow(t, child, levels_left - 1, branch);
  }
}

Articulation make(const std::string& left, RelationMask mask, const std::string& right) {
  Articulation a;
  a.left = left;
  a.right = right;
  a.mask = mask;
  return a;
}

}  // namespace

Alignment generate_synthetic(const SyntheticSpec& spec) {
  if (spec.depth < 1) throw std::invalid_argument("depth must be at least 1");
  if (spec.branch < 2) throw std::invalid_argument("branch must be at least 2");
  std::size_t per_tree = 0;
  std::size_t level = 1;
  for (int d = 0; d < spec.depth; ++d) {
    per_tree += level;
    if (per_tree > spec.max_concepts) {
      throw std::invalid_argument("synthetic taxonomy exceeds " + std::to_string(spec.max_concepts) + " concepts");
    }
    level *= static_cast<std::size_t>(spec.branch);
  }

  Alignment a;
  a.first = Taxonomy(1, "synthetic-1");
  a.second = Taxonomy(2, "synthetic-2");
  for (Taxonomy* t : {&a.first, &a.second}) {
    t->add_concept("r");
    grow(*t, "r", spec.depth - 1, spec.branch);
  }

  std::vector<Articulation> arts;
  const Taxonomy& tree = a.first;
  for (const auto& leaf : tree.leaves()) {
    auto parent = tree.parent(leaf);
    if (spec.pattern == SyntheticPattern::kCongruent || !parent) {
      arts.push_back(make(leaf, BaseRelation::kEquals, leaf));
      continue;
    }
    arts.push_back(make(leaf, BaseRelation::kIsIncludedIn, *parent));
    arts.push_back(make(*parent, BaseRelation::kIncludes, leaf));
    for (const auto& sibling : tree.children(*parent))
      if (sibling != leaf) arts.push_back(make(leaf, BaseRelation::kDisjoint, sibling));
  }

  std::mt19937_64 rng(spec.seed);
  for (std::size_t i = arts.size(); i > 1; --i) std::swap(arts[i - 1], arts[rng() % i]);
  for (std::size_t i = 0; i < arts.size(); ++i) {
    arts[i].index = i;
    arts[i].source = arts[i].text();
  }
  a.articulations = std::move(arts);

  SolverOptions options;
  auto result = enumerate_worlds(a, 2, options);
  if (result.worlds.worlds.size() != 1)
    throw std::logic_error("synthetic alignment does not have exactly one possible world");
  return a;
}

}  // namespace taxalign
