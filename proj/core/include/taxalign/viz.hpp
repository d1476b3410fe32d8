#ifndef TAXALIGN_VIZ_HPP_
#define TAXALIGN_VIZ_HPP_

#include <string>
#include <vector>

#include "taxalign/model.hpp"

namespace taxalign {

struct RcgNode {
  enum class Kind { kMerged, kFirstOnly, kSecondOnly };
  Kind kind = Kind::kMerged;
  std::vector<std::string> members;  // sorted concept keys

  std::string id() const;  // members joined by '='
};

// Rendered container -> contained.
struct RcgEdge {
  std::size_t container = 0;
  std::size_t contained = 0;
  bool input = false;  // an is_a edge of one of the input trees
};

// Reduced containment graph of one world: concepts grouped by extensional
// equality, proper inclusion edges, transitively reduced. Overlap is not
// shown.
struct Rcg {
  std::vector<RcgNode> nodes;  // sorted by id
  std::vector<RcgEdge> edges;  // sorted by (container id, contained id)
};

// Reads every relation, including within-taxonomy ones, off the world's
// witness. Throws std::invalid_argument for a world without a witness.
Rcg build_rcg(const World& w, const Alignment& a);

struct RcgStyle {
  std::string merged_shape = "box";
  std::string merged_fill = "grey";
  std::string first_shape = "diamond";
  std::string first_fill = "green";
  std::string second_shape = "octagon";
  std::string second_fill = "yellow";
  std::string input_edge = "black";
  std::string inferred_edge = "red";
};

std::string rcg_to_dot(const Rcg& r, const RcgStyle& style = {});

using DistanceMatrix = std::vector<std::vector<std::size_t>>;

DistanceMatrix distance_matrix(const WorldSet& worlds);

struct ClusterOutput {
  std::string dot;
  std::string csv;
};

// Undirected world network: a minimum spanning tree plus every edge of the
// smallest nonzero distance, labelled with distances. Worlds are named w<id>.
ClusterOutput cluster_to_dot(const WorldSet& worlds, const DistanceMatrix& distances);

}  // namespace taxalign

#endif  // TAXALIGN_VIZ_HPP_
