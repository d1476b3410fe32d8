// Small random alignments for property tests.
#ifndef TAXALIGN_TESTS_RANDOM_ALIGNMENT_HPP_
#define TAXALIGN_TESTS_RANDOM_ALIGNMENT_HPP_

#include <random>
#include <string>
#include <vector>

#include "taxalign/model.hpp"

namespace taxalign::testing {

struct RandomShape {
  int max_leaves = 3;
  int max_articulations = 4;
  // Chance of a non-singleton mask, in percent.
  int disjunctive_percent = 50;
};

// Tree with 1..max_leaves leaves: either a flat root or a root with one inner
// child, so both two- and three-level trees appear.
inline Taxonomy random_tree(int id, char first_name, int max_leaves, std::mt19937_64& rng) {
  Taxonomy t(id, "t" + std::to_string(id));
  std::string root(1, first_name);
  t.add_concept(root);
  int leaves = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_leaves));
  char next = static_cast<char>(first_name + 1);
  if (leaves == 1) {
    if (rng() % 2 == 0) t.add_edge(root, std::string(1, next));
    return t;
  }
  std::string parent = root;
  if (leaves >= 2 && rng() % 3 == 0) {
    // root -> inner -> leaves, plus possibly one leaf directly under root
    std::string inner(1, next++);
    t.add_edge(root, inner);
    int under_root = (leaves >= 3 && rng() % 2 == 0) ? 1 : 0;
    for (int i = 0; i < under_root; ++i) t.add_edge(root, std::string(1, next++));
    int rest = leaves - under_root;
    if (rest == 1) return t;  // inner itself is a leaf
    parent = inner;
    leaves = rest;
  }
  for (int i = 0; i < leaves; ++i) t.add_edge(parent, std::string(1, next++));
  return t;
}

inline RelationMask random_mask(std::mt19937_64& rng, int disjunctive_percent) {
  if (static_cast<int>(rng() % 100) < disjunctive_percent) {
    RelationMask m;
    while (m.size() < 2) m = RelationMask::from_bits(static_cast<std::uint8_t>(rng() % 32));
    return m;
  }
  return kAllBaseRelations[rng() % 5];
}

inline Alignment random_alignment(std::mt19937_64& rng, const RandomShape& shape = {}) {
  Alignment a;
  a.first = random_tree(1, 'A', shape.max_leaves, rng);
  a.second = random_tree(2, 'M', shape.max_leaves, rng);
  auto left = a.first.concepts();
  auto right = a.second.concepts();
  int count = static_cast<int>(rng() % static_cast<unsigned>(shape.max_articulations + 1));
  for (int i = 0; i < count; ++i) {
    Articulation art;
    art.index = static_cast<std::size_t>(i);
    art.left = left[rng() % left.size()];
    art.right = right[rng() % right.size()];
    art.mask = random_mask(rng, shape.disjunctive_percent);
    a.articulations.push_back(art);
  }
  return a;
}

}  // namespace taxalign::testing

#endif  // TAXALIGN_TESTS_RANDOM_ALIGNMENT_HPP_
