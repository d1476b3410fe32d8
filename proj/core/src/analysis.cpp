#include "taxalign/analysis.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <set>

namespace taxalign {

MirTable mir(const WorldSet& worlds) {
  if (worlds.worlds.empty()) throw std::invalid_argument("mir: empty world list");
  MirTable table;
  table.total = worlds.worlds.size();
  table.entries.resize(worlds.pairs.size());
  for (std::size_t p = 0; p < worlds.pairs.size(); ++p) {
    table.entries[p].left = worlds.pairs.left_of(p);
    table.entries[p].right = worlds.pairs.right_of(p);
  }
  for (const auto& w : worlds.worlds) {
    for (std::size_t p = 0; p < w.relations.size(); ++p) {
      auto& e = table.entries[p];
      e.mask |= w.relations[p];
      ++e.counts[to_index(w.relations[p])];
    }
  }
  return table;
}

std::vector<ConsensusEntry> consensus(const MirTable& table) {
  std::vector<ConsensusEntry> out;
  for (const auto& e : table.entries)
    if (e.mask.is_single()) out.push_back({e.left, e.right, e.mask.single()});
  return out;
}

namespace {

bool consistent_subset(const Alignment& a, const std::vector<std::size_t>& keep, const SolverOptions& options) {
  return check_consistency(a.keeping(keep), options).consistent;
}

// is_a edges on the paths joining `names` inside one taxonomy.
void connecting_facts(const Taxonomy& t, const std::set<std::string>& names,
                      std::vector<std::pair<std::string, std::string>>& out) {
  if (names.size() < 2) return;
  std::vector<std::vector<std::string>> paths;
  for (const auto& n : names) {
    auto up = t.ancestors_or_self(n);
    std::reverse(up.begin(), up.end());  // root first
    paths.push_back(std::move(up));
  }
  std::size_t common = 0;
  while (std::all_of(paths.begin(), paths.end(),
                     [&](const auto& p) { return common < p.size() && p[common] == paths.front()[common]; }))
    ++common;
  std::set<std::pair<std::string, std::string>> facts;
  for (const auto& p : paths)
    for (std::size_t k = std::max<std::size_t>(common, 1); k < p.size(); ++k)
      facts.emplace(concept_key(t.id(), p[k]), concept_key(t.id(), p[k - 1]));
  out.insert(out.end(), facts.begin(), facts.end());
}

}  // namespace

Diagnosis diagnose(const Alignment& a, const DiagnoseOptions& options) {
  const auto& solver = options.solver;
  if (check_consistency(a, solver).consistent) throw AlreadyConsistent("alignment is consistent");

  Diagnosis d;
  d.consistent = false;

  std::vector<std::size_t> core = a.articulation_indices();
  for (std::size_t idx : a.articulation_indices()) {
    std::vector<std::size_t> trial;
    std::copy_if(core.begin(), core.end(), std::back_inserter(trial), [&](std::size_t i) { return i != idx; });
    if (!consistent_subset(a, trial, solver)) core = std::move(trial);
  }
  d.mus = core;

  for (std::size_t idx : d.mus) {
    std::size_t removed[] = {idx};
    if (check_consistency(a.without(removed), solver).consistent) d.repairs.push_back(idx);
  }

  std::set<std::string> names[2];
  for (std::size_t idx : d.mus) {
    const Articulation* art = a.find_articulation(idx);
    names[0].insert(art->left);
    names[1].insert(art->right);
  }
  connecting_facts(a.first, names[0], d.structural_facts);
  connecting_facts(a.second, names[1], d.structural_facts);

  std::size_t n = a.articulations.size();
  if (n <= options.conflict_enumeration_limit) {
    std::vector<std::uint32_t> subsets(std::size_t{1} << n);
    for (std::uint32_t s = 0; s < subsets.size(); ++s) subsets[s] = s;
    std::stable_sort(subsets.begin(), subsets.end(),
                     [](std::uint32_t l, std::uint32_t r) { return std::popcount(l) < std::popcount(r); });
    std::vector<std::uint32_t> minimal;
    for (std::uint32_t s : subsets) {
      if (std::any_of(minimal.begin(), minimal.end(), [&](std::uint32_t m) { return (m & s) == m; })) continue;
      std::vector<std::size_t> keep;
      for (std::size_t k = 0; k < n; ++k)
        if (s & (1u << k)) keep.push_back(a.articulations[k].index);
      if (!consistent_subset(a, keep, solver)) minimal.push_back(s);
    }
    std::vector<std::vector<std::size_t>> conflicts;
    for (std::uint32_t m : minimal) {
      std::vector<std::size_t> c;
      for (std::size_t k = 0; k < n; ++k)
        if (m & (1u << k)) c.push_back(a.articulations[k].index);
      conflicts.push_back(std::move(c));
    }
    std::sort(conflicts.begin(), conflicts.end());
    d.all_conflicts = std::move(conflicts);
  }
  return d;
}

std::string explanation_text(const Diagnosis& d, const Alignment& a) {
  if (d.consistent) return "The alignment is consistent.\n";
  auto text_of = [&](std::size_t idx) {
    const Articulation* art = a.find_articulation(idx);
    return art ? art->text() : "#" + std::to_string(idx);
  };
  std::string out = "The alignment is inconsistent.\n";
  if (d.mus.size() == 1) {
    out += "Articulation " + text_of(d.mus.front()) + " contradicts the taxonomies on its own";
  } else {
    out += "These articulations cannot hold together:";
    for (auto idx : d.mus) out += "\n  " + text_of(idx);
    out += "\n";
  }
  if (!d.structural_facts.empty()) {
    out += d.mus.size() == 1 ? " given" : "given";
    bool first = true;
    for (const auto& [child, parent] : d.structural_facts) {
      out += (first ? " " : ", ") + child + " is_a " + parent;
      first = false;
    }
  }
  out += ".\n";
  if (d.repairs.empty()) {
    out += "No single removal restores consistency.\n";
  } else {
    for (auto idx : d.repairs) out += "Removing " + text_of(idx) + " restores consistency.\n";
  }
  return out;
}

bool entails(const Alignment& a, const std::string& left, const std::string& right, RelationMask target,
             const SolverOptions& options) {
  PairRestriction complement{left, right, ~target};
  return !check_consistency(a, options, std::span(&complement, 1)).consistent;
}

std::vector<std::size_t> mir_provenance(const Alignment& a, const std::string& left, const std::string& right,
                                        RelationMask target, const SolverOptions& options) {
  if (!entails(a, left, right, target, options)) {
    throw NotEntailed(concept_key(1, left) + " " + target.to_string() + " " + concept_key(2, right) +
                      " is not entailed");
  }
  std::vector<std::size_t> kept = a.articulation_indices();
  for (std::size_t idx : a.articulation_indices()) {
    std::vector<std::size_t> trial;
    std::copy_if(kept.begin(), kept.end(), std::back_inserter(trial), [&](std::size_t i) { return i != idx; });
    if (entails(a.keeping(trial), left, right, target, options)) kept = std::move(trial);
  }
  return kept;
}

std::size_t world_distance(const World& a, const World& b) {
  if (a.relations.size() != b.relations.size())
    throw std::invalid_argument("world_distance: worlds have different pair grids");
  std::size_t d = 0;
  for (std::size_t p = 0; p < a.relations.size(); ++p)
    if (a.relations[p] != b.relations[p]) ++d;
  return d;
}

std::size_t Question::worst_case() const {
  std::size_t worst = 0;
  for (const auto& c : candidates) worst = std::max(worst, c.count);
  return worst;
}

ReductionSession::ReductionSession(std::shared_ptr<const WorldSet> worlds) : worlds_(std::move(worlds)) {
  surviving_.resize(worlds_->worlds.size());
  for (std::size_t i = 0; i < surviving_.size(); ++i) surviving_[i] = i;
}

std::optional<Question> ReductionSession::next_question() const {
  if (surviving_.size() <= 1) return std::nullopt;
  const auto& pairs = worlds_->pairs;
  std::optional<Question> best;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    std::array<std::size_t, 5> counts{};
    for (std::size_t w : surviving_) ++counts[to_index(worlds_->worlds[w].relations[p])];
    Question q{p, pairs.left_of(p), pairs.right_of(p), {}};
    for (auto r : kAllBaseRelations)
      if (counts[to_index(r)] > 0) q.candidates.push_back({r, counts[to_index(r)]});
    if (q.candidates.size() < 2) continue;
    if (!best || q.worst_case() < best->worst_case()) best = std::move(q);
  }
  return best;
}

ReductionSession ReductionSession::apply_answer(const std::string& left, const std::string& right,
                                                RelationMask mask) const {
  if (mask.empty()) throw std::invalid_argument("empty answer mask");
  auto pair = worlds_->pairs.find(left, right);
  if (!pair) throw std::invalid_argument("unknown pair " + concept_key(1, left) + " " + concept_key(2, right));

  ReductionSession next = *this;
  next.surviving_.clear();
  for (std::size_t w : surviving_)
    if (mask.contains(worlds_->worlds[w].relations[*pair])) next.surviving_.push_back(w);
  if (next.surviving_.empty()) {
    throw EmptyWorldSet("no possible world has " + concept_key(1, left) + " " + mask.to_string() + " " +
                        concept_key(2, right));
  }
  auto [it, inserted] = next.answers_.try_emplace(*pair, mask);
  if (!inserted) it->second &= mask;
  return next;
}

}  // namespace taxalign
