#ifndef TAXALIGN_SERIALIZATION_HPP_
#define TAXALIGN_SERIALIZATION_HPP_

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "taxalign/analysis.hpp"
#include "taxalign/engine.hpp"
#include "taxalign/model.hpp"
#include "taxalign/parser.hpp"
#include "taxalign/viz.hpp"

// JSON field names here are a published interface; see docs/json.md.
namespace taxalign {

using nlohmann::json;

// Masks serialize as arrays of short relation names in bit order.
json mask_json(RelationMask m);
// Throws std::invalid_argument on unknown relation names.
RelationMask mask_from_json(const json& j);

json alignment_json(const Alignment& a);
// Throws std::invalid_argument (or nlohmann::json::exception) on malformed input.
Alignment alignment_from_json(const json& j);

// Relation maps are arrays sorted by (left key, right key).
json world_json(const World& w, const PairGrid& pairs, const RegionGrid& grid);
json worlds_json(const WorldSet& worlds, const RegionGrid& grid);

json mir_json(const MirTable& table);
// left,right,mask,count_eq,count_lt,count_gt,count_ov,count_dj,total
std::string mir_csv(const MirTable& table);
json consensus_json(const std::vector<ConsensusEntry>& entries);

json diagnosis_json(const Diagnosis& d, const Alignment& a);
json stats_json(const SolverStats& s);
json question_json(const Question& q);
json rcg_json(const Rcg& r);

json parse_errors_json(const std::vector<ParseError>& errors);
json violations_json(const std::vector<Violation>& violations);

}  // namespace taxalign

#endif  // TAXALIGN_SERIALIZATION_HPP_
