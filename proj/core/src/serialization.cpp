#include "taxalign/serialization.hpp"

#include <sstream>

namespace taxalign {

json mask_json(RelationMask m) {
  json out = json::array();
  for (auto r : m.relations()) out.push_back(std::string(short_name(r)));
  return out;
}

RelationMask mask_from_json(const json& j) {
  RelationMask m;
  auto add = [&](const json& token) {
    auto r = parse_relation_token(token.get<std::string>());
    if (!r) throw std::invalid_argument("unknown relation '" + token.get<std::string>() + "'");
    m |= *r;
  };
  if (j.is_string()) {
    add(j);
  } else {
    for (const auto& t : j) add(t);
  }
  return m;
}

namespace {

json taxonomy_json(const Taxonomy& t) {
  json is_a = json::array();
  for (const auto& c : t.concepts())
    if (auto p = t.parent(c)) is_a.push_back({c, *p});
  return {{"id", t.id()}, {"label", t.label()}, {"concepts", t.concepts()}, {"is_a", is_a}};
}

Taxonomy taxonomy_from_json(const json& j) {
  Taxonomy t(j.at("id").get<int>(), j.value("label", ""));
  for (const auto& c : j.at("concepts")) t.add_concept(c.get<std::string>());
  for (const auto& e : j.at("is_a")) {
    if (!t.add_edge(e.at(1).get<std::string>(), e.at(0).get<std::string>()))
      throw std::invalid_argument("duplicate parent for " + e.at(0).get<std::string>());
  }
  return t;
}

json span_json(const SourceSpan& s) {
  return {{"line", s.line}, {"column_begin", s.column_begin}, {"column_end", s.column_end}, {"text", s.text}};
}

json cell_json(const Cell& c) {
  return json::array({c.first ? json(*c.first) : json(nullptr), c.second ? json(*c.second) : json(nullptr)});
}

}  // namespace

json alignment_json(const Alignment& a) {
  json arts = json::array();
  for (const auto& art : a.articulations) {
    arts.push_back({{"index", art.index},
                    {"left", concept_key(1, art.left)},
                    {"right", concept_key(2, art.right)},
                    {"mask", mask_json(art.mask)},
                    {"text", art.text()}});
  }
  return {{"taxonomies", json::array({taxonomy_json(a.first), taxonomy_json(a.second)})},
          {"articulations", arts},
          {"flags",
           {{"coverage", a.flags.coverage},
            {"sibling_disjointness", a.flags.sibling_disjointness},
            {"non_emptiness", a.flags.non_emptiness}}}};
}

Alignment alignment_from_json(const json& j) {
  Alignment a;
  const auto& taxa = j.at("taxonomies");
  if (taxa.size() != 2) throw std::invalid_argument("expected two taxonomies");
  a.first = taxonomy_from_json(taxa.at(0));
  a.second = taxonomy_from_json(taxa.at(1));
  for (const auto& art : j.at("articulations")) {
    auto left = split_concept_key(art.at("left").get<std::string>());
    auto right = split_concept_key(art.at("right").get<std::string>());
    if (!left || !right || left->first != 1 || right->first != 2)
      throw std::invalid_argument("articulation endpoints must be 1.x and 2.y keys");
    Articulation out;
    out.index = art.at("index").get<std::size_t>();
    out.left = left->second;
    out.right = right->second;
    out.mask = mask_from_json(art.at("mask"));
    out.source = out.text();
    a.articulations.push_back(std::move(out));
  }
  if (j.contains("flags")) {
    const auto& f = j.at("flags");
    a.flags.coverage = f.value("coverage", true);
    a.flags.sibling_disjointness = f.value("sibling_disjointness", true);
    a.flags.non_emptiness = f.value("non_emptiness", true);
  }
  if (auto v = validate(a); !v.empty()) throw std::invalid_argument(v.front().message);
  return a;
}

json world_json(const World& w, const PairGrid& pairs, const RegionGrid& grid) {
  json relations = json::array();
  for (std::size_t p = 0; p < w.relations.size(); ++p) {
    relations.push_back({{"left", concept_key(1, pairs.left_of(p))},
                         {"right", concept_key(2, pairs.right_of(p))},
                         {"relation", std::string(short_name(w.relations[p]))}});
  }
  json witness = json::array();
  for (auto c : w.witness) witness.push_back(cell_json(grid.cell(c)));
  return {{"id", w.id}, {"relations", relations}, {"witness", witness}};
}

json worlds_json(const WorldSet& worlds, const RegionGrid& grid) {
  json list = json::array();
  for (const auto& w : worlds.worlds) list.push_back(world_json(w, worlds.pairs, grid));
  return {{"count", worlds.worlds.size()}, {"truncated", worlds.truncated}, {"worlds", list}};
}

json mir_json(const MirTable& table) {
  json entries = json::array();
  for (const auto& e : table.entries) {
    json counts = json::object();
    for (auto r : kAllBaseRelations) counts[std::string(short_name(r))] = e.counts[to_index(r)];
    entries.push_back({{"left", concept_key(1, e.left)},
                       {"right", concept_key(2, e.right)},
                       {"mask", mask_json(e.mask)},
                       {"counts", counts}});
  }
  return {{"total", table.total}, {"mir", entries}};
}

std::string mir_csv(const MirTable& table) {
  std::ostringstream os;
  os << "left,right,mask,count_eq,count_lt,count_gt,count_ov,count_dj,total\n";
  for (const auto& e : table.entries) {
    os << concept_key(1, e.left) << ',' << concept_key(2, e.right) << ',' << e.mask.to_short_string();
    for (auto c : e.counts) os << ',' << c;
    os << ',' << table.total << '\n';
  }
  return os.str();
}

json consensus_json(const std::vector<ConsensusEntry>& entries) {
  json out = json::array();
  for (const auto& e : entries) {
    out.push_back({{"left", concept_key(1, e.left)},
                   {"right", concept_key(2, e.right)},
                   {"relation", std::string(short_name(e.relation))}});
  }
  return out;
}

json diagnosis_json(const Diagnosis& d, const Alignment& a) {
  auto text_of = [&](std::size_t idx) {
    const Articulation* art = a.find_articulation(idx);
    return art ? art->text() : std::string();
  };
  json mus = json::array();
  for (auto idx : d.mus) mus.push_back({{"index", idx}, {"text", text_of(idx)}});
  json repairs = json::array();
  for (auto idx : d.repairs) repairs.push_back({{"index", idx}, {"text", text_of(idx)}});
  json facts = json::array();
  for (const auto& [child, parent] : d.structural_facts) facts.push_back({{"child", child}, {"parent", parent}});
  json out = {{"consistent", d.consistent}, {"mus", mus}, {"repairs", repairs}, {"structural_facts", facts}};
  if (d.all_conflicts) {
    out["all_conflicts"] = *d.all_conflicts;
  } else {
    out["all_conflicts"] = nullptr;
  }
  return out;
}

json stats_json(const SolverStats& s) {
  return {{"branches", s.branches},
          {"propagations", s.propagations},
          {"realizability_checks", s.realizability_checks},
          {"wall_ms", s.wall_ms}};
}

json question_json(const Question& q) {
  json candidates = json::array();
  for (const auto& c : q.candidates)
    candidates.push_back({{"relation", std::string(short_name(c.relation))}, {"count", c.count}});
  return {{"left", concept_key(1, q.left)},
          {"right", concept_key(2, q.right)},
          {"candidates", candidates},
          {"worst_case", q.worst_case()}};
}

json rcg_json(const Rcg& r) {
  json nodes = json::array();
  for (const auto& n : r.nodes) {
    std::string kind = n.kind == RcgNode::Kind::kMerged      ? "merged"
                       : n.kind == RcgNode::Kind::kFirstOnly ? "first_only"
                                                             : "second_only";
    nodes.push_back({{"id", n.id()}, {"kind", kind}, {"members", n.members}});
  }
  json edges = json::array();
  for (const auto& e : r.edges) {
    edges.push_back({{"container", r.nodes[e.container].id()},
                     {"contained", r.nodes[e.contained].id()},
                     {"input", e.input}});
  }
  return {{"nodes", nodes}, {"edges", edges}};
}

json parse_errors_json(const std::vector<ParseError>& errors) {
  json out = json::array();
  for (const auto& e : errors)
    out.push_back({{"kind", std::string(to_string(e.kind))}, {"message", e.message}, {"span", span_json(e.span)}});
  return out;
}

json violations_json(const std::vector<Violation>& violations) {
  json out = json::array();
  for (const auto& v : violations)
    out.push_back({{"kind", std::string(to_string(v.kind))}, {"entity", v.entity}, {"message", v.message}});
  return out;
}

}  // namespace taxalign
