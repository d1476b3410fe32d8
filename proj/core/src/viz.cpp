#include "taxalign/viz.hpp"

#include <algorithm>
#include <boost/pending/disjoint_sets.hpp>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "taxalign/analysis.hpp"
#include "taxalign/engine.hpp"

namespace taxalign {

namespace {

std::string quoted(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string world_name(std::size_t id) { return "w" + std::to_string(id); }

}  // namespace

std::string RcgNode::id() const {
  std::string out;
  for (const auto& m : members) {
    if (!out.empty()) out += '=';
    out += m;
  }
  return out;
}

Rcg build_rcg(const World& w, const Alignment& a) {
  if (w.witness.empty()) throw std::invalid_argument("build_rcg: world has no witness");
  RegionGrid grid = build_grid(a);
  CellSet inhabited = grid.cells_of(w.witness);

  // Group concepts by extension under the witness.
  std::vector<CellSet> extents;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t c = 0; c < grid.concept_count(); ++c) {
    CellSet e = grid.ext(c) & inhabited;
    auto it = std::find(extents.begin(), extents.end(), e);
    if (it == extents.end()) {
      extents.push_back(std::move(e));
      groups.push_back({c});
    } else {
      groups[static_cast<std::size_t>(it - extents.begin())].push_back(c);
    }
  }

  struct Group {
    RcgNode node;
    CellSet extent;
    std::vector<std::size_t> concepts;
  };
  std::vector<Group> sorted;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    RcgNode node;
    bool first = false, second = false;
    for (auto c : groups[g]) {
      node.members.push_back(grid.concept_at(c).key());
      (grid.concept_at(c).taxonomy_id == 1 ? first : second) = true;
    }
    std::sort(node.members.begin(), node.members.end());
    node.kind = first && second ? RcgNode::Kind::kMerged : first ? RcgNode::Kind::kFirstOnly : RcgNode::Kind::kSecondOnly;
    sorted.push_back({std::move(node), extents[g], groups[g]});
  }
  std::sort(sorted.begin(), sorted.end(), [](const Group& l, const Group& r) { return l.node.id() < r.node.id(); });

  auto proper_subset = [](const CellSet& inner, const CellSet& outer) {
    return inner.is_subset_of(outer) && !(inner == outer);
  };

  Rcg rcg;
  for (const auto& g : sorted) rcg.nodes.push_back(g.node);
  for (std::size_t u = 0; u < sorted.size(); ++u) {
    for (std::size_t v = 0; v < sorted.size(); ++v) {
      if (!proper_subset(sorted[v].extent, sorted[u].extent)) continue;
      bool implied = false;
      for (std::size_t m = 0; m < sorted.size() && !implied; ++m) {
        implied = proper_subset(sorted[v].extent, sorted[m].extent) && proper_subset(sorted[m].extent, sorted[u].extent);
      }
      if (implied) continue;
      bool input = false;
      for (auto child : sorted[v].concepts) {
        const Concept& c = grid.concept_at(child);
        auto parent = a.taxonomy(c.taxonomy_id).parent(c.name);
        if (!parent) continue;
        std::size_t pid = grid.concept_id(c.taxonomy_id, *parent);
        if (std::find(sorted[u].concepts.begin(), sorted[u].concepts.end(), pid) != sorted[u].concepts.end()) {
          input = true;
          break;
        }
      }
      rcg.edges.push_back({u, v, input});
    }
  }
  return rcg;
}

std::string rcg_to_dot(const Rcg& r, const RcgStyle& style) {
  std::ostringstream os;
  os << "digraph rcg {\n";
  os << "  node [style=filled];\n";
  for (const auto& n : r.nodes) {
    const std::string* shape = &style.merged_shape;
    const std::string* fill = &style.merged_fill;
    if (n.kind == RcgNode::Kind::kFirstOnly) {
      shape = &style.first_shape;
      fill = &style.first_fill;
    } else if (n.kind == RcgNode::Kind::kSecondOnly) {
      shape = &style.second_shape;
      fill = &style.second_fill;
    }
    os << "  " << quoted(n.id()) << " [shape=" << *shape << ", fillcolor=" << *fill << "];\n";
  }
  std::vector<std::tuple<std::string, std::string, bool>> edges;
  for (const auto& e : r.edges) edges.emplace_back(r.nodes[e.container].id(), r.nodes[e.contained].id(), e.input);
  std::sort(edges.begin(), edges.end());
  for (const auto& [from, to, input] : edges) {
    os << "  " << quoted(from) << " -> " << quoted(to) << " [color=" << (input ? style.input_edge : style.inferred_edge)
       << "];\n";
  }
  os << "}\n";
  return os.str();
}

DistanceMatrix distance_matrix(const WorldSet& worlds) {
  std::size_t n = worlds.worlds.size();
  DistanceMatrix d(n, std::vector<std::size_t>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d[i][j] = world_distance(worlds.worlds[i], worlds.worlds[j]);
  }
  return d;
}

ClusterOutput cluster_to_dot(const WorldSet& worlds, const DistanceMatrix& distances) {
  std::size_t n = worlds.worlds.size();
  ClusterOutput out;

  std::ostringstream csv;
  csv << "world";
  for (std::size_t j = 0; j < n; ++j) csv << ',' << world_name(worlds.worlds[j].id);
  csv << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    csv << world_name(worlds.worlds[i].id);
    for (std::size_t j = 0; j < n; ++j) csv << ',' << distances[i][j];
    csv << '\n';
  }
  out.csv = csv.str();

  std::vector<std::tuple<std::size_t, std::size_t, std::size_t>> candidates;  // (distance, i, j)
  std::size_t min_nonzero = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      candidates.emplace_back(distances[i][j], i, j);
      if (distances[i][j] > 0 && (min_nonzero == 0 || distances[i][j] < min_nonzero)) min_nonzero = distances[i][j];
    }
  }
  std::sort(candidates.begin(), candidates.end());

  std::vector<std::size_t> rank(n), parent(n);
  boost::disjoint_sets<std::size_t*, std::size_t*> sets(rank.data(), parent.data());
  for (std::size_t i = 0; i < n; ++i) sets.make_set(i);
  std::set<std::pair<std::size_t, std::size_t>> chosen;
  for (const auto& [d, i, j] : candidates) {
    if (sets.find_set(i) != sets.find_set(j)) {
      sets.union_set(i, j);
      chosen.emplace(i, j);
    }
    if (d == min_nonzero && d > 0) chosen.emplace(i, j);
  }

  std::ostringstream dot;
  dot << "graph worlds {\n";
  dot << "  node [shape=circle];\n";
  for (std::size_t i = 0; i < n; ++i) dot << "  " << quoted(world_name(worlds.worlds[i].id)) << ";\n";
  for (const auto& [i, j] : chosen) {
    dot << "  " << quoted(world_name(worlds.worlds[i].id)) << " -- " << quoted(world_name(worlds.worlds[j].id))
        << " [label=\"" << distances[i][j] << "\"];\n";
  }
  dot << "}\n";
  out.dot = dot.str();
  return out;
}

}  // namespace taxalign
