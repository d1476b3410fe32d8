#ifndef TAXALIGN_ANALYSIS_HPP_
#define TAXALIGN_ANALYSIS_HPP_

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "taxalign/engine.hpp"
#include "taxalign/model.hpp"

namespace taxalign {

// diagnose() on an alignment that is already consistent.
class AlreadyConsistent : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// mir_provenance() for a relation the alignment does not entail.
class NotEntailed : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// An answer that no surviving world agrees with.
class EmptyWorldSet : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws std::invalid_argument on an empty world list.
MirTable mir(const WorldSet& worlds);

struct ConsensusEntry {
  std::string left;
  std::string right;
  BaseRelation relation;
};

// Pairs whose relation is the same in every world.
std::vector<ConsensusEntry> consensus(const MirTable& table);

struct DiagnoseOptions {
  SolverOptions solver;
  // All minimal conflicts are enumerated only up to this many articulations.
  std::size_t conflict_enumeration_limit = 12;
};

// One minimal unsatisfiable subset by deletion-based shrinking, single
// removals that restore consistency, and (for small inputs) every minimal
// conflict. Taxonomies and covering constraints are hard background.
// Throws AlreadyConsistent.
Diagnosis diagnose(const Alignment& a, const DiagnoseOptions& options = {});

// Prose rendering: the white-box part names the conflicting articulations and
// the is_a facts joining them; the black-box part lists single removals.
std::string explanation_text(const Diagnosis& d, const Alignment& a);

// True iff every world of `a` relates (left, right) by a relation in `target`.
bool entails(const Alignment& a, const std::string& left, const std::string& right, RelationMask target,
             const SolverOptions& options = {});

// An inclusion-minimal articulation subset still entailing the relation.
// Throws NotEntailed.
std::vector<std::size_t> mir_provenance(const Alignment& a, const std::string& left, const std::string& right,
                                        RelationMask target, const SolverOptions& options = {});

// Number of pairs on which the two worlds differ. Throws
// std::invalid_argument if the worlds come from different pair grids.
std::size_t world_distance(const World& a, const World& b);

struct Candidate {
  BaseRelation relation;
  std::size_t count = 0;  // surviving worlds if this is the answer
};

struct Question {
  std::size_t pair = 0;
  std::string left;
  std::string right;
  std::vector<Candidate> candidates;

  std::size_t worst_case() const;
};

class ReductionSession {
 public:
  explicit ReductionSession(std::shared_ptr<const WorldSet> worlds);

  const WorldSet& worlds() const { return *worlds_; }
  const std::vector<std::size_t>& surviving() const { return surviving_; }
  const std::map<std::size_t, RelationMask>& answers() const { return answers_; }

  // None when at most one world survives or no pair varies. Otherwise the
  // varying pair with the smallest worst-case surviving count; ties go to
  // the lexicographically smallest pair.
  std::optional<Question> next_question() const;

  // Throws std::invalid_argument for an unknown pair or empty mask, and
  // EmptyWorldSet if no surviving world matches.
  ReductionSession apply_answer(const std::string& left, const std::string& right, RelationMask mask) const;

  ReductionSession reset() const { return ReductionSession(worlds_); }

 private:
  std::shared_ptr<const WorldSet> worlds_;
  std::map<std::size_t, RelationMask> answers_;
  std::vector<std::size_t> surviving_;
};

}  // namespace taxalign

#endif  // TAXALIGN_ANALYSIS_HPP_
