#ifndef TAXALIGN_PARSER_HPP_
#define TAXALIGN_PARSER_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "taxalign/model.hpp"

namespace taxalign {

struct ParseError {
  enum class Kind {
    kLexical,
    kDuplicateChild,
    kCycle,
    kUnknownTaxonomy,
    kUnknownConcept,
    kEmptyRelation,
    kStructure,  // missing taxonomy, several roots, articulation inside one taxonomy ...
  };
  Kind kind;
  SourceSpan span;
  std::string message;
};

std::string_view to_string(ParseError::Kind kind);

// "line:col: kind: message"
std::string format_error(const ParseError& e);

struct ParseResult {
  std::optional<Alignment> alignment;
  std::vector<ParseError> errors;

  bool ok() const { return alignment.has_value(); }
};

// Line-oriented input:
//
//   # comment
//   taxonomy 1 Original
//   (A B C D E)
//   taxonomy 2 Revised
//   (A B C F G)
//   articulations
//   [1.A {equals is_included_in} 2.A]
//   [2.B is_included_in 1.B]          # stored as [1.B includes 2.B]
//
// A lone `(A)` declares a single-concept taxonomy. Concepts are declared by
// their first appearance in a tree line. Never throws.
ParseResult parse_alignment(std::string_view text, ConstraintFlags flags = {});

// Canonical text: tree lines in preorder with sorted children, long relation
// names, articulations in index order. Reparses to an equal Alignment.
std::string serialize_alignment(const Alignment& a);

}  // namespace taxalign

#endif  // TAXALIGN_PARSER_HPP_
