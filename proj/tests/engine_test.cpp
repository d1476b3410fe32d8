#include <doctest.h>

#include <limits>
#include <random>
#include <set>

#include "oracle.hpp"
#include "random_alignment.hpp"
#include "support.hpp"
#include "taxalign/engine.hpp"
#include "taxalign/synthetic.hpp"

using namespace taxalign;
using R = BaseRelation;
using testing::singletons;
using testing::two_leaf;

namespace {

std::set<std::string> labels(const RegionGrid& g, const CellSet& cells) {
  std::set<std::string> out;
  for (auto c : cells.elements()) out.insert(g.cell_label(c));
  return out;
}

std::set<std::string> labels(const RegionGrid& g, const std::vector<std::size_t>& cells) {
  std::set<std::string> out;
  for (auto c : cells) out.insert(g.cell_label(c));
  return out;
}

std::set<std::vector<R>> engine_worlds(const Alignment& a) {
  auto ws = enumerate_worlds(a, std::numeric_limits<std::size_t>::max()).worlds;
  CHECK_FALSE(ws.truncated);
  std::set<std::vector<R>> out;
  for (const auto& w : ws.worlds) out.insert(w.relations);
  return out;
}

}  // namespace

TEST_CASE("grid of two single concepts") {
  auto g = build_grid(singletons(""));
  CHECK(g.cell_count() == 3);
  CHECK(g.cell_label(0) == "(A,B)");
  CHECK(g.cell_label(1) == "(A,_)");
  CHECK(g.cell_label(2) == "(_,B)");
  CHECK(labels(g, g.ext(g.concept_id(1, "A"))) == std::set<std::string>{"(A,B)", "(A,_)"});
  CHECK(labels(g, g.ext(g.concept_id(2, "B"))) == std::set<std::string>{"(A,B)", "(_,B)"});
}

TEST_CASE("grid size follows coverage") {
  Alignment a = two_leaf("");
  auto covered = build_grid(a);
  CHECK(covered.cell_count() == 8);
  CHECK(covered.points(1) == std::vector<std::string>{"B", "C"});
  CHECK(labels(covered, covered.ext(covered.concept_id(1, "A"))) ==
        std::set<std::string>{"(B,E)", "(B,F)", "(B,_)", "(C,E)", "(C,F)", "(C,_)"});

  a.flags.coverage = false;
  auto open = build_grid(a);
  CHECK(open.cell_count() == 15);
  CHECK(open.points(2) == std::vector<std::string>{"D", "E", "F"});
  CHECK(open.ext(open.concept_id(1, "A")).count() == 12);
  CHECK(open.ext(open.concept_id(1, "B")).count() == 4);
  CHECK_THROWS_AS(open.concept_id(1, "Z"), std::out_of_range);
}

TEST_CASE("encoding of single relations") {
  Alignment eq = singletons("[1.A equals 2.B]");
  auto g = build_grid(eq);
  auto cs = encode(eq, g);
  REQUIRE(cs.global.size() == 2);
  CHECK(cs.global[0].kind == CellPrimitive::Kind::kSomeInhabited);
  REQUIRE(cs.groups.size() == 1);
  REQUIRE(cs.groups[0].disjuncts.size() == 1);
  const auto& prims = cs.groups[0].disjuncts[0].primitives;
  REQUIRE(prims.size() == 1);
  CHECK(prims[0].kind == CellPrimitive::Kind::kAllEmpty);
  CHECK(labels(g, prims[0].cells) == std::set<std::string>{"(A,_)", "(_,B)"});

  auto disj = encode(singletons("[1.A {equals is_included_in} 2.B]"), g);
  REQUIRE(disj.groups[0].disjuncts.size() == 2);
  CHECK(disj.groups[0].disjuncts[0].relation == R::kEquals);
  const auto& lt = disj.groups[0].disjuncts[1];
  CHECK(lt.relation == R::kIsIncludedIn);
  REQUIRE(lt.primitives.size() == 2);
  CHECK(lt.primitives[0].kind == CellPrimitive::Kind::kAllEmpty);
  CHECK(labels(g, lt.primitives[0].cells) == std::set<std::string>{"(A,_)"});
  CHECK(lt.primitives[1].kind == CellPrimitive::Kind::kSomeInhabited);
  CHECK(labels(g, lt.primitives[1].cells) == std::set<std::string>{"(_,B)"});

  Alignment dj = two_leaf("[1.B disjoint 2.E]");
  auto g8 = build_grid(dj);
  auto prims8 = encode(dj, g8).groups[0].disjuncts[0].primitives;
  REQUIRE(prims8.size() == 1);
  CHECK(labels(g8, prims8[0].cells) == std::set<std::string>{"(B,E)"});

  auto ov = relation_primitives(g8, g8.concept_id(1, "B"), g8.concept_id(2, "E"), R::kOverlaps);
  REQUIRE(ov.size() == 3);
  for (const auto& p : ov) CHECK(p.kind == CellPrimitive::Kind::kSomeInhabited);
}

TEST_CASE("consistency examples") {
  auto eq = check_consistency(singletons("[1.A equals 2.B]"));
  CHECK(eq.consistent);
  CHECK(labels(build_grid(singletons("")), eq.witness) == std::set<std::string>{"(A,B)"});

  CHECK_FALSE(check_consistency(singletons("[1.A equals 2.B]\n[1.A disjoint 2.B]")).consistent);

  auto pattern = testing::parse_or_throw(
      "taxonomy 1 t\n(A D E)\ntaxonomy 2 u\n(B)\narticulations\n[1.A {equals is_included_in} 2.B]\n[1.D includes 2.B]\n");
  CHECK_FALSE(check_consistency(pattern).consistent);
  CHECK_FALSE(oracle::consistent(pattern));
  CHECK(enumerate_worlds(pattern).worlds.worlds.empty());
}

TEST_CASE("enumeration examples") {
  auto two = enumerate_worlds(singletons("[1.A {equals is_included_in} 2.B]")).worlds;
  REQUIRE(two.worlds.size() == 2);
  CHECK(two.worlds[0].relations == std::vector<R>{R::kEquals});
  CHECK(two.worlds[1].relations == std::vector<R>{R::kIsIncludedIn});
  CHECK(two.worlds[0].id == 0);
  CHECK(two.worlds[1].id == 1);
  CHECK_FALSE(two.truncated);

  Alignment merge = two_leaf("[1.B equals 2.E]\n[1.C equals 2.F]");
  auto one = enumerate_worlds(merge).worlds;
  REQUIRE(one.worlds.size() == 1);
  auto rel = [&](const char* l, const char* r) { return one.worlds[0].relations[*one.pairs.find(l, r)]; };
  CHECK(rel("A", "D") == R::kEquals);
  CHECK(rel("B", "E") == R::kEquals);
  CHECK(rel("C", "F") == R::kEquals);
  CHECK(rel("B", "F") == R::kDisjoint);
  CHECK(rel("C", "E") == R::kDisjoint);
  CHECK(rel("B", "D") == R::kIsIncludedIn);
  CHECK(rel("C", "D") == R::kIsIncludedIn);
  CHECK(rel("A", "E") == R::kIncludes);
  CHECK(rel("A", "F") == R::kIncludes);
  CHECK(engine_worlds(merge) == oracle::worlds(merge));
}

TEST_CASE("relation map of a witness") {
  auto g = build_grid(singletons(""));
  std::vector<std::size_t> ab = {0}, ab_b = {0, 2}, all = {0, 1, 2};
  CHECK(relation_map_of(ab, g) == std::vector<R>{R::kEquals});
  CHECK(relation_map_of(ab_b, g) == std::vector<R>{R::kIsIncludedIn});
  CHECK(relation_map_of(all, g) == std::vector<R>{R::kOverlaps});
  std::vector<std::size_t> only_a = {1};
  CHECK_THROWS_AS(relation_map_of(only_a, g), std::invalid_argument);
}

TEST_CASE("solver agrees with exhaustive enumeration on random alignments") {
  std::mt19937_64 rng(2024);
  int consistent = 0, multi = 0;
  for (int i = 0; i < 150; ++i) {
    Alignment a = testing::random_alignment(rng);
    // Without coverage every node is a point; keep those grids small.
    a.flags.coverage = !(i % 4 == 3 && a.first.size() <= 3 && a.second.size() <= 3);
    CAPTURE(serialize_alignment(a));
    auto expected = oracle::worlds(a);
    CHECK(engine_worlds(a) == expected);
    CHECK(check_consistency(a).consistent == !expected.empty());
    consistent += expected.empty() ? 0 : 1;
    multi += expected.size() > 1 ? 1 : 0;
  }
  // The sample must exercise both outcomes and ambiguity.
  CHECK(consistent > 20);
  CHECK(consistent < 150);
  CHECK(multi > 10);
}

TEST_CASE("witnesses realize their worlds") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 60; ++i) {
    Alignment a = testing::random_alignment(rng);
    auto ws = enumerate_worlds(a).worlds;
    auto g = build_grid(a);
    auto model = oracle::build_model(a);
    for (const auto& w : ws.worlds) {
      CHECK(relation_map_of(w.witness, g) == w.relations);
      CHECK(std::is_sorted(w.witness.begin(), w.witness.end()));
      std::uint64_t bits = 0;
      for (auto c : w.witness) bits |= 1ull << c;
      CHECK(oracle::admissible(model, bits));
    }
  }
}

TEST_CASE("worlds are canonical: sorted, distinct, densely numbered") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 60; ++i) {
    auto ws = enumerate_worlds(testing::random_alignment(rng)).worlds;
    for (std::size_t k = 0; k < ws.worlds.size(); ++k) {
      CHECK(ws.worlds[k].id == k);
      if (k > 0) CHECK(ws.worlds[k - 1].relations < ws.worlds[k].relations);
    }
  }
}

TEST_CASE("every world is closed under composition") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 40; ++i) {
    Alignment a = testing::random_alignment(rng);
    auto g = build_grid(a);
    for (const auto& w : enumerate_worlds(a).worlds.worlds) {
      CellSet inhabited = g.empty_set();
      for (auto c : w.witness) inhabited.set(c);
      for (std::size_t x = 0; x < g.concept_count(); ++x)
        for (std::size_t y = 0; y < g.concept_count(); ++y)
          for (std::size_t z = 0; z < g.concept_count(); ++z) {
            auto xy = relation_between(inhabited, g, x, y);
            auto yz = relation_between(inhabited, g, y, z);
            CHECK(compose(xy, yz).contains(relation_between(inhabited, g, x, z)));
          }
    }
  }
}

TEST_CASE("enumeration is deterministic") {
  Alignment a = testing::load_data("running_example_repaired.txt");
  auto first = enumerate_worlds(a).worlds;
  auto second = enumerate_worlds(a).worlds;
  CHECK(first.worlds == second.worlds);
  CHECK(first.pairs == second.pairs);
}

TEST_CASE("articulation masks restrict every world") {
  Alignment a = testing::load_data("running_example_repaired.txt");
  auto ws = enumerate_worlds(a).worlds;
  CHECK(ws.worlds.size() == 7);
  for (const auto& art : a.articulations)
    for (const auto& w : ws.worlds) CHECK(art.mask.contains(w.relations[*ws.pairs.find(art.left, art.right)]));
}

TEST_CASE("extra restrictions and limits") {
  Alignment a = singletons("[1.A {equals is_included_in} 2.B]");
  std::vector<PairRestriction> only_lt = {{"A", "B", R::kIsIncludedIn}};
  CHECK(check_consistency(a, {}, only_lt).consistent);
  std::vector<PairRestriction> none = {{"A", "B", RelationMask{}}};
  CHECK_FALSE(check_consistency(a, {}, none).consistent);
  std::vector<PairRestriction> contradict = {{"A", "B", R::kDisjoint}};
  CHECK_FALSE(check_consistency(a, {}, contradict).consistent);

  auto limited = enumerate_worlds(a, 1).worlds;
  CHECK(limited.worlds.size() == 1);
  CHECK(limited.truncated);
  auto exact = enumerate_worlds(a, 2).worlds;
  CHECK(exact.worlds.size() == 2);
  CHECK_FALSE(exact.truncated);
}

TEST_CASE("the branch budget is enforced") {
  SyntheticSpec spec;
  spec.depth = 4;
  Alignment a = generate_synthetic(spec);
  // Drop half of the articulations so the search has to branch.
  a.articulations.resize(a.articulations.size() / 2);
  SolverOptions tight;
  tight.branch_budget = 3;
  CHECK_THROWS_AS(enumerate_worlds(a, tight), BudgetExceeded);
  try {
    enumerate_worlds(a, tight);
  } catch (const BudgetExceeded& e) {
    CHECK(e.stats().branches > tight.branch_budget);
  }
}

TEST_CASE("solver statistics are populated") {
  auto result = enumerate_worlds(testing::load_data("running_example_repaired.txt"));
  CHECK(result.stats.branches > 0);
  CHECK(result.stats.realizability_checks > 0);
  CHECK(result.stats.wall_ms >= 0.0);
}
