#include <doctest.h>

#include <random>

#include "random_alignment.hpp"
#include "support.hpp"
#include "taxalign/parser.hpp"

using namespace taxalign;
using R = BaseRelation;
using Kind = ParseError::Kind;

namespace {

std::vector<Kind> error_kinds(const std::string& text) {
  std::vector<Kind> kinds;
  for (const auto& e : parse_alignment(text).errors) kinds.push_back(e.kind);
  return kinds;
}

bool has_kind(const std::string& text, Kind kind) {
  auto kinds = error_kinds(text);
  return std::find(kinds.begin(), kinds.end(), kind) != kinds.end();
}

const std::string kTrees = "taxonomy 1 t1\n(A B C)\ntaxonomy 2 t2\n(D E F)\narticulations\n";

}  // namespace

TEST_CASE("parses two trees and one articulation") {
  auto r = parse_alignment(kTrees + "[1.B equals 2.E]");
  REQUIRE(r.ok());
  const Alignment& a = *r.alignment;
  CHECK(a.first.size() == 3);
  CHECK(a.second.size() == 3);
  CHECK(a.first.root() == "A");
  CHECK(a.second.parent("E") == "D");
  CHECK(a.first.label() == "t1");
  REQUIRE(a.articulations.size() == 1);
  CHECK(a.articulations[0].left == "B");
  CHECK(a.articulations[0].right == "E");
  CHECK(a.articulations[0].mask == RelationMask{R::kEquals});
  CHECK(a.articulations[0].span.line == 6);
  CHECK(a.articulations[0].span.column_begin == 1);
  CHECK(a.articulations[0].span.column_end == 17);
}

TEST_CASE("relation masks in articulation lines") {
  auto a = testing::parse_or_throw(
      "taxonomy 1 t1\n(A D E)\ntaxonomy 2 t2\n(A G)\narticulations\n"
      "[1.A {equals is_included_in} 2.A]\n[1.D includes 2.A]\n[1.E {==, ><} 2.G]\n[1.E ! 2.A]\n");
  REQUIRE(a.articulations.size() == 4);
  CHECK(a.articulations[0].mask == RelationMask{R::kEquals, R::kIsIncludedIn});
  CHECK(a.articulations[1].mask == RelationMask{R::kIncludes});
  CHECK(a.articulations[2].mask == RelationMask{R::kEquals, R::kOverlaps});
  CHECK(a.articulations[3].mask == RelationMask{R::kDisjoint});
}

TEST_CASE("articulations written from taxonomy 2 are stored through the converse") {
  auto a = testing::parse_or_throw(kTrees + "[2.E is_included_in 1.A]\n[2.F {< !} 1.B]\n");
  CHECK(a.articulations[0].left == "A");
  CHECK(a.articulations[0].right == "E");
  CHECK(a.articulations[0].mask == RelationMask{R::kIncludes});
  CHECK(a.articulations[1].mask == RelationMask{R::kIncludes, R::kDisjoint});
  CHECK(a.articulations[1].index == 1);
}

TEST_CASE("comments, blank lines and single-concept taxonomies") {
  auto a = testing::parse_or_throw(
      "# header comment\n\ntaxonomy 1 first one   # trailing\n(A)\n\ntaxonomy 2 second\n(B)\narticulations\n"
      "  [1.A  equals   2.B]   # note\n");
  CHECK(a.first.concepts() == std::vector<std::string>{"A"});
  CHECK(a.first.label() == "first one");
  CHECK(a.articulations.size() == 1);
}

TEST_CASE("tree lines may span several levels") {
  auto a = testing::parse_or_throw(
      "taxonomy 1 t\n(A B C)\n(B D E)\ntaxonomy 2 u\n(X)\narticulations\n");
  CHECK(a.first.parent("D") == "B");
  CHECK(a.first.leaves() == std::vector<std::string>{"C", "D", "E"});
  CHECK(a.first.is_descendant_or_self("E", "A"));
  CHECK(a.articulations.empty());
}

TEST_CASE("serialization is canonical and round-trips") {
  auto a = testing::parse_or_throw(kTrees + "[2.E {equals is_included_in} 1.B]\n[1.C includes 2.F]\n");
  std::string text = serialize_alignment(a);
  CHECK(text ==
        "taxonomy 1 t1\n(A B C)\ntaxonomy 2 t2\n(D E F)\narticulations\n"
        "[1.B {equals includes} 2.E]\n[1.C includes 2.F]\n");
  CHECK(testing::parse_or_throw(text) == a);

  auto b = testing::parse_or_throw(kTrees + "[1.A {is_included_in equals} 2.D]");
  CHECK(serialize_alignment(b).find("[1.A {equals is_included_in} 2.D]") != std::string::npos);

  auto empty = testing::parse_or_throw(kTrees);
  CHECK(serialize_alignment(empty).substr(serialize_alignment(empty).size() - 14) == "articulations\n");
}

TEST_CASE("random alignments round-trip through text") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    Alignment a = testing::random_alignment(rng);
    std::string text = serialize_alignment(a);
    auto r = parse_alignment(text);
    REQUIRE_MESSAGE(r.ok(), text);
    CHECK(*r.alignment == a);
    CHECK(serialize_alignment(*r.alignment) == text);
  }
}

TEST_CASE("error kinds") {
  CHECK(has_kind(kTrees + "[1.B equals 2.E", Kind::kLexical));
  CHECK(has_kind(kTrees + "[1.B equals]", Kind::kLexical));
  CHECK(has_kind(kTrees + "[1.B contains 2.E]", Kind::kLexical));
  CHECK(has_kind(kTrees + "[1.B {equals 2.E]", Kind::kLexical));
  CHECK(has_kind("taxonomy 1 t\n(A B\ntaxonomy 2 u\n(C)\n", Kind::kLexical));
  CHECK(has_kind("hello\n" + kTrees, Kind::kLexical));
  CHECK(has_kind("taxonomy 1 t\n(A B C)\n(D B)\ntaxonomy 2 u\n(X)\n", Kind::kDuplicateChild));
  CHECK(has_kind("taxonomy 1 t\n(A B)\n(B A)\ntaxonomy 2 u\n(X)\n", Kind::kCycle));
  CHECK(has_kind("taxonomy 1 t\n(A A)\ntaxonomy 2 u\n(X)\n", Kind::kCycle));
  CHECK(has_kind(kTrees + "[3.A equals 2.D]", Kind::kUnknownTaxonomy));
  CHECK(has_kind("taxonomy 3 t\n(A)\n", Kind::kUnknownTaxonomy));
  CHECK(has_kind(kTrees + "[1.Z equals 2.D]", Kind::kUnknownConcept));
  CHECK(has_kind(kTrees + "[1.A {} 2.D]", Kind::kEmptyRelation));
  CHECK(has_kind("taxonomy 1 t\n(A B)\narticulations\n", Kind::kStructure));
  CHECK(has_kind("taxonomy 1 t\n(A B)\n(C D)\ntaxonomy 2 u\n(X)\n", Kind::kStructure));
  CHECK(has_kind(kTrees + "[1.A equals 1.B]", Kind::kStructure));
  CHECK(has_kind("taxonomy 1 t\n(A)\ntaxonomy 1 again\n(B)\ntaxonomy 2 u\n(X)\n", Kind::kStructure));
}

TEST_CASE("errors carry line and column spans") {
  auto r = parse_alignment(kTrees + "[1.B equals 2.E]\n[1.Z equals 2.E]\n");
  REQUIRE(r.errors.size() == 1);
  const auto& e = r.errors[0];
  CHECK(e.kind == Kind::kUnknownConcept);
  CHECK(e.span.line == 7);
  CHECK(e.span.column_begin == 2);
  CHECK(e.span.column_end == 5);
  CHECK(e.span.text == "1.Z");
  CHECK(format_error(e) == "7:2: unknown-concept: unknown concept 1.Z");

  auto dup = parse_alignment("taxonomy 1 t\n(A B C)\n(D  B)\ntaxonomy 2 u\n(X)\n");
  REQUIRE_FALSE(dup.errors.empty());
  CHECK(dup.errors[0].span.line == 3);
  CHECK(dup.errors[0].span.column_begin == 5);
}

TEST_CASE("all errors are reported, not only the first") {
  auto r = parse_alignment(kTrees + "[1.Z equals 2.E]\n[1.B {} 2.E]\n[1.B equals 2.Q]\n");
  CHECK_FALSE(r.ok());
  CHECK(r.errors.size() == 3);
}

TEST_CASE("mutated input never throws") {
  std::string base = testing::slurp(testing::data_path("running_example.txt"));
  const std::string alphabet = "()[]{}#., \n12ABxyz=<>!";
  std::mt19937_64 rng(11);
  int accepted = 0;
  for (int i = 0; i < 2000; ++i) {
    std::string text = base;
    int edits = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < edits; ++k) {
      std::size_t pos = rng() % text.size();
      switch (rng() % 3) {
        case 0: text[pos] = alphabet[rng() % alphabet.size()]; break;
        case 1: text.erase(pos, 1 + rng() % 5); break;
        default: text.insert(pos, 1, alphabet[rng() % alphabet.size()]); break;
      }
    }
    ParseResult r;
    CHECK_NOTHROW(r = parse_alignment(text));
    CHECK(r.ok() == r.errors.empty());
    if (r.ok()) {
      ++accepted;
      CHECK(validate(*r.alignment).empty());
    }
  }
  CHECK(accepted > 0);
}

TEST_CASE("validate") {
  auto good = testing::parse_or_throw(kTrees + "[1.B equals 2.E]");
  CHECK(validate(good).empty());

  Alignment unknown = good;
  unknown.articulations[0].left = "Z";
  auto v = validate(unknown);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == Violation::Kind::kUnknownConcept);
  CHECK(v[0].entity == "1.Z");

  Alignment two_roots = good;
  two_roots.first.add_concept("Q");
  v = validate(two_roots);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == Violation::Kind::kMultipleRoots);

  Alignment empty_mask = good;
  empty_mask.articulations[0].mask = RelationMask{};
  CHECK(validate(empty_mask).at(0).kind == Violation::Kind::kEmptyMask);

  Alignment no_disjointness = good;
  no_disjointness.flags.sibling_disjointness = false;
  CHECK(validate(no_disjointness).at(0).kind == Violation::Kind::kUnsupportedFlag);
}
