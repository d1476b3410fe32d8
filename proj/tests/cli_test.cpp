#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "cli.hpp"
#include "support.hpp"
#include "taxalign/engine.hpp"
#include "taxalign/serialization.hpp"

using namespace taxalign;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  int code = cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const char* name) { return testing::data_path(name); }

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("taxalign_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::vector<std::string> listing(const fs::path& dir) {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out.push_back(e.path().filename().string());
  std::sort(out.begin(), out.end());
  return out;
}

struct BudgetEnv {
  explicit BudgetEnv(const char* value) { ::setenv("TAXOALIGN_BUDGET", value, 1); }
  ~BudgetEnv() { ::unsetenv("TAXOALIGN_BUDGET"); }
};

}  // namespace

TEST_CASE("check exit codes") {
  auto ok = run({"check", data("running_example_repaired.txt")});
  CHECK(ok.code == cli::kExitOk);
  CHECK(ok.out == "consistent\n");

  auto bad = run({"check", data("running_example.txt")});
  CHECK(bad.code == cli::kExitInconsistent);
  CHECK(bad.out.find("[1.D includes 2.A]") != std::string::npos);
  CHECK(bad.out.find("[1.A {equals is_included_in} 2.A]") != std::string::npos);

  auto incons = run({"check", data("inconsistent.txt")});
  CHECK(incons.code == cli::kExitInconsistent);
  CHECK(incons.out.find("[1.D includes 2.B]") != std::string::npos);

  auto json_out = run({"--json", "check", data("running_example.txt")});
  CHECK(json_out.code == cli::kExitInconsistent);
  CHECK(json::parse(json_out.out)["mus"].size() == 2);
}

TEST_CASE("input errors") {
  TempDir dir;
  auto missing = run({"check", dir / "nope.txt"});
  CHECK(missing.code == cli::kExitError);
  CHECK(missing.err.find("cannot open") != std::string::npos);

  std::ofstream(dir / "broken.txt") << "taxonomy 1 t\n(A B)\ntaxonomy 2 u\n(C)\narticulations\n[1.B equals 2.Z]\n";
  auto broken = run({"check", dir / "broken.txt"});
  CHECK(broken.code == cli::kExitError);
  CHECK(broken.err == dir / "broken.txt" + ":6:13: unknown-concept: unknown concept 2.Z\n");

  CHECK(run({"frobnicate"}).code == cli::kExitError);
  CHECK(run({}).code == cli::kExitError);
  CHECK(run({"--help"}).code == cli::kExitOk);
}

TEST_CASE("explain") {
  auto prose = run({"explain", data("running_example.txt")});
  CHECK(prose.code == cli::kExitInconsistent);
  CHECK(prose.out.find("Removing [1.D includes 2.A] restores consistency.") != std::string::npos);
  auto j = run({"--json", "explain", data("running_example.txt")});
  json doc = json::parse(j.out);
  CHECK(doc["diagnosis"]["repairs"][0]["index"] == 5);
  CHECK(run({"explain", data("two_leaf.txt")}).out == "The alignment is consistent.\n");
}

TEST_CASE("mir") {
  auto csv = run({"mir", data("running_example_repaired.txt")});
  CHECK(csv.code == cli::kExitOk);
  CHECK(csv.out.find("1.D,2.A,<,0,7,0,0,0,7\n") != std::string::npos);
  CHECK(csv.out.find("1.A,2.G,{> ><},0,0,3,4,0,7\n") != std::string::npos);

  auto j = run({"mir", "--format", "json", data("running_example_repaired.txt")});
  json doc = json::parse(j.out);
  CHECK(doc["total"] == 7);
  CHECK(doc["truncated"] == false);
  CHECK(doc["consensus"].size() == 18);

  TempDir dir;
  CHECK(run({"mir", data("two_leaf.txt"), "-o", dir / "mir.csv"}).code == cli::kExitOk);
  CHECK(testing::slurp(dir / "mir.csv") == run({"mir", data("two_leaf.txt")}).out);

  CHECK(run({"mir", data("running_example.txt")}).code == cli::kExitInconsistent);
}

TEST_CASE("worlds writes one json and one dot file per world") {
  TempDir dir;
  auto r = run({"worlds", data("two_leaf.txt"), "-o", dir / "out"});
  CHECK(r.code == cli::kExitOk);
  CHECK(listing(dir.path / "out") == std::vector<std::string>{"world_0.dot", "world_0.json"});
  std::string dot = testing::slurp(dir / "out/world_0.dot");
  CHECK(dot.find("\"1.A=2.D\" -> \"1.B=2.E\" [color=black];") != std::string::npos);
  CHECK(json::parse(testing::slurp(dir / "out/world_0.json"))["id"] == 0);

  auto seven = run({"worlds", data("running_example_repaired.txt"), "-o", dir / "seven"});
  CHECK(listing(dir.path / "seven").size() == 14);

  auto stdout_only = run({"worlds", data("running_example_repaired.txt"), "--limit", "3"});
  json doc = json::parse(stdout_only.out);
  CHECK(doc["count"] == 3);
  CHECK(doc["truncated"] == true);

  auto styled = run({"worlds", data("two_leaf.txt"), "-o", dir / "styled", "--style", "merged_fill=white"});
  CHECK(styled.code == cli::kExitOk);
  CHECK(testing::slurp(dir / "styled/world_0.dot").find("fillcolor=white") != std::string::npos);
  CHECK(run({"worlds", data("two_leaf.txt"), "--style", "colour=red"}).code == cli::kExitError);
}

TEST_CASE("cluster") {
  TempDir dir;
  auto r = run({"cluster", data("running_example_repaired.txt"), "-o", dir / "c"});
  CHECK(r.code == cli::kExitOk);
  CHECK(listing(dir.path / "c") == std::vector<std::string>{"cluster.dot", "distances.csv"});
  CHECK(testing::slurp(dir / "c/distances.csv").rfind("world,w0,w1", 0) == 0);
}

TEST_CASE("provenance") {
  auto r = run({"provenance", data("two_leaf.txt"), "--left", "1.A", "--right", "2.D", "--mask", "=="});
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out == "1.A equals 2.D follows from:\n  [1.B equals 2.E]\n  [1.C equals 2.F]\n");
  auto not_entailed = run({"provenance", data("two_leaf.txt"), "--left", "1.B", "--right", "2.E", "--mask", "!"});
  CHECK(not_entailed.code == cli::kExitError);
}

TEST_CASE("reduce answers questions until one world remains") {
  auto r = run({"reduce", data("running_example_repaired.txt")}, "2\n1\n1\n1\n1\n1\n");
  CHECK(r.code == cli::kExitOk);
  CHECK(r.out.rfind("7 possible worlds\n", 0) == 0);
  CHECK(r.out.find("How is 1.A related to 2.G?") != std::string::npos);
  CHECK(r.out.find("4 possible worlds remain") != std::string::npos);
  CHECK(r.out.find("1 possible world remains:") != std::string::npos);

  auto by_token = run({"reduce", data("running_example_repaired.txt")}, ">\n");
  CHECK(by_token.out.find("3 possible worlds remain\n") != std::string::npos);

  auto stop = run({"reduce", data("running_example_repaired.txt")}, "");
  CHECK(stop.out.find("7 possible worlds remain:") != std::string::npos);

  auto garbage = run({"reduce", data("running_example_repaired.txt")}, "9\nfoo\n");
  CHECK(garbage.out.find("not understood: 9") != std::string::npos);
  CHECK(garbage.out.find("not understood: foo") != std::string::npos);
}

TEST_CASE("gen") {
  TempDir dir;
  CHECK(run({"--seed", "5", "gen", "--depth", "4", "--branch", "2", "-o", dir / "a.txt"}).code == cli::kExitOk);
  CHECK(run({"--seed", "5", "gen", "--depth", "4", "--branch", "2", "-o", dir / "b.txt"}).code == cli::kExitOk);
  CHECK(testing::slurp(dir / "a.txt") == testing::slurp(dir / "b.txt"));
  Alignment a = testing::parse_or_throw(testing::slurp(dir / "a.txt"));
  CHECK(a.first.size() == 15);
  CHECK(enumerate_worlds(a).worlds.worlds.size() == 1);

  auto congruent = run({"gen", "--depth", "2", "--branch", "3", "--pattern", "congruent"});
  CHECK(congruent.out.find("[1.r_0 equals 2.r_0]") != std::string::npos);
  CHECK(run({"gen", "--depth", "0", "--branch", "2"}).code == cli::kExitError);
  CHECK(run({"gen", "--depth", "2", "--branch", "2", "--pattern", "spiral"}).code == cli::kExitError);
}

TEST_CASE("budget exhaustion exits with its own code") {
  TempDir dir;
  run({"gen", "--depth", "6", "--branch", "2", "-o", dir / "g.txt"});
  {
    BudgetEnv env("5");
    auto r = run({"check", dir / "g.txt"});
    CHECK(r.code == cli::kExitBudget);
    CHECK(r.err.find("budget") != std::string::npos);
  }
  {
    BudgetEnv env("worlds=2");
    auto r = run({"worlds", data("running_example_repaired.txt")});
    CHECK(json::parse(r.out)["count"] == 2);
  }
  {
    BudgetEnv env("lots");
    CHECK(run({"check", data("two_leaf.txt")}).code == cli::kExitError);
  }
}

TEST_CASE("coverage can be switched off") {
  auto on = run({"mir", data("two_leaf.txt")});
  auto off = run({"--no-coverage", "mir", data("two_leaf.txt")});
  CHECK(on.out.find("1.A,2.D,==,") != std::string::npos);
  CHECK(off.out.find("1.A,2.D,==,") == std::string::npos);
}

TEST_CASE("stats go to stderr") {
  auto r = run({"--stats", "check", data("two_leaf.txt")});
  CHECK(r.out == "consistent\n");
  json s = json::parse(r.err);
  CHECK(s.contains("branches"));
}

TEST_CASE("every command is deterministic") {
  TempDir dir;
  std::vector<std::vector<std::string>> commands = {
      {"check", data("running_example.txt")},
      {"--json", "explain", data("running_example.txt")},
      {"mir", data("running_example_repaired.txt")},
      {"--json", "mir", data("running_example_repaired.txt")},
      {"worlds", data("running_example_repaired.txt")},
      {"--json", "cluster", data("running_example_repaired.txt")},
      {"gen", "--depth", "5", "--branch", "2"},
  };
  for (const auto& cmd : commands) {
    auto first = run(cmd);
    auto second = run(cmd);
    CHECK(first.code == second.code);
    CHECK(first.out == second.out);
  }
  run({"worlds", data("running_example_repaired.txt"), "-o", dir / "x"});
  run({"worlds", data("running_example_repaired.txt"), "-o", dir / "y"});
  for (const auto& name : listing(dir.path / "x")) CHECK(testing::slurp(dir / ("x/" + name)) == testing::slurp(dir / ("y/" + name)));
}
