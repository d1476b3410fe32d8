#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "taxalign/analysis.hpp"
#include "taxalign/engine.hpp"
#include "taxalign/parser.hpp"
#include "taxalign/serialization.hpp"
#include "taxalign/service.hpp"
#include "taxalign/synthetic.hpp"
#include "taxalign/viz.hpp"

namespace taxalign::cli {

namespace {

namespace fs = std::filesystem;

// A failure that maps straight onto an exit code.
struct Exit {
  int code;
  std::string message;
};

struct Globals {
  bool no_coverage = false;
  bool json = false;
  bool stats = false;
  std::uint64_t seed = 0;
};

struct Io {
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Exit{kExitError, "cannot open " + path};
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Exit{kExitError, "cannot write " + path.string()};
  out << content;
}

// TAXOALIGN_BUDGET is either a bare branch budget or
// "branches=N,worlds=M".
SolverOptions solver_options() {
  SolverOptions options;
  const char* env = std::getenv("TAXOALIGN_BUDGET");
  if (env == nullptr || *env == '\0') return options;
  std::string spec(env);
  try {
    if (spec.find('=') == std::string::npos) {
      options.branch_budget = std::stoull(spec);
      return options;
    }
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto eq = item.find('=');
      std::string key = item.substr(0, eq);
      std::size_t value = std::stoull(item.substr(eq + 1));
      if (key == "branches")
        options.branch_budget = value;
      else if (key == "worlds")
        options.world_limit = value;
      else
        throw std::invalid_argument(key);
    }
  } catch (const std::exception&) {
    throw Exit{kExitError, "malformed TAXOALIGN_BUDGET '" + spec + "'"};
  }
  return options;
}

Alignment load(const std::string& path, const Globals& g, Io& io) {
  ConstraintFlags flags;
  flags.coverage = !g.no_coverage;
  auto result = parse_alignment(read_file(path), flags);
  if (!result.ok()) {
    for (const auto& e : result.errors) io.err << path << ':' << format_error(e) << '\n';
    throw Exit{kExitError, ""};
  }
  return std::move(*result.alignment);
}

void print_stats(const SolverStats& s, const Globals& g, Io& io) {
  if (g.stats) io.err << stats_json(s).dump() << '\n';
}

ConsistencyResult checked(const Alignment& a, const SolverOptions& options, const Globals& g, Io& io) {
  auto result = check_consistency(a, options);
  print_stats(result.stats, g, io);
  return result;
}

Enumeration enumerated(const Alignment& a, std::size_t limit, const SolverOptions& options, const Globals& g, Io& io) {
  auto result = enumerate_worlds(a, limit, options);
  print_stats(result.stats, g, io);
  return result;
}

void require_consistent(const Alignment& a, const SolverOptions& options, const Globals& g, Io& io) {
  if (!checked(a, options, g, io).consistent)
    throw Exit{kExitInconsistent, "alignment is inconsistent; run `explain` for a diagnosis"};
}

int cmd_check(const std::string& file, const Globals& g, Io& io) {
  Alignment a = load(file, g, io);
  auto options = solver_options();
  auto result = checked(a, options, g, io);
  if (result.consistent) {
    if (g.json)
      io.out << json{{"consistent", true}}.dump(2) << '\n';
    else
      io.out << "consistent\n";
    return kExitOk;
  }
  DiagnoseOptions d;
  d.solver = options;
  Diagnosis diagnosis = diagnose(a, d);
  if (g.json) {
    json out = {{"consistent", false}};
    out["mus"] = diagnosis_json(diagnosis, a)["mus"];
    io.out << out.dump(2) << '\n';
  } else {
    io.out << "inconsistent\nminimal conflict:\n";
    for (auto idx : diagnosis.mus) io.out << "  " << a.find_articulation(idx)->text() << '\n';
  }
  return kExitInconsistent;
}

int cmd_explain(const std::string& file, const Globals& g, Io& io) {
  Alignment a = load(file, g, io);
  auto options = solver_options();
  if (checked(a, options, g, io).consistent) {
    if (g.json)
      io.out << json{{"consistent", true}}.dump(2) << '\n';
    else
      io.out << "The alignment is consistent.\n";
    return kExitOk;
  }
  DiagnoseOptions d;
  d.solver = options;
  Diagnosis diagnosis = diagnose(a, d);
  if (g.json) {
    json out = {{"consistent", false},
                {"diagnosis", diagnosis_json(diagnosis, a)},
                {"explanation", explanation_text(diagnosis, a)}};
    io.out << out.dump(2) << '\n';
  } else {
    io.out << explanation_text(diagnosis, a);
  }
  return kExitInconsistent;
}

int cmd_mir(const std::string& file, const std::string& format, const std::string& output, const Globals& g, Io& io) {
  Alignment a = load(file, g, io);
  auto options = solver_options();
  require_consistent(a, options, g, io);
  auto result = enumerated(a, options.world_limit, options, g, io);
  if (result.worlds.truncated) io.err << "warning: world limit reached; MIR covers the first worlds only\n";
  auto table = mir(result.worlds);
  std::string text;
  if (g.json || format == "json") {
    json out = mir_json(table);
    out["consensus"] = consensus_json(consensus(table));
    out["truncated"] = result.worlds.truncated;
    text = out.dump(2) + "\n";
  } else {
    text = mir_csv(table);
  }
  if (output.empty())
    io.out << text;
  else
    write_file(output, text);
  return kExitOk;
}

RcgStyle parse_style(const std::vector<std::string>& overrides) {
  RcgStyle style;
  std::map<std::string, std::string*> fields = {
      {"merged_shape", &style.merged_shape}, {"merged_fill", &style.merged_fill},
      {"first_shape", &style.first_shape},   {"first_fill", &style.first_fill},
      {"second_shape", &style.second_shape}, {"second_fill", &style.second_fill},
      {"input_edge", &style.input_edge},     {"inferred_edge", &style.inferred_edge},
  };
  for (const auto& o : overrides) {
    auto eq = o.find('=');
    auto it = eq == std::string::npos ? fields.end() : fields.find(o.substr(0, eq));
    if (it == fields.end()) throw Exit{kExitError, "unknown style override '" + o + "'"};
    *it->second = o.substr(eq + 1);
  }
  return style;
}

int cmd_worlds(const std::string& file, std::optional<std::size_t> limit, const std::string& dir,
               const std::vector<std::string>& style_overrides, const Globals& g, Io& io) {
  Alignment a = load(file, g, io);
  auto options = solver_options();
  RcgStyle style = parse_style(style_overrides);
  require_consistent(a, options, g, io);
  auto result = enumerated(a, limit.value_or(options.world_limit), options, g, io);
  RegionGrid grid = build_grid(a);
  const auto& ws = result.worlds;

  if (!dir.empty()) {
    fs::create_directories(dir);
    for (const auto& w : ws.worlds) {
      std::string stem = "world_" + std::to_string(w.id);
      write_file(fs::path(dir) / (stem + ".json"), world_json(w, ws.pairs, grid).dump(2) + "\n");
      write_file(fs::path(dir) / (stem + ".dot"), rcg_to_dot(build_rcg(w, a), style));
    }
  }
  if (g.json || dir.empty()) {
    io.out << worlds_json(ws, grid).dump(2) << '\n';
  } else {
    io.out << ws.worlds.size() << " possible world" << (ws.worlds.size() == 1 ? "" : "s")
           << (ws.truncated ? " (truncated)" : "") << " written to " << dir << '\n';
  }
  return kExitOk;
}

int cmd_cluster(const std::string& file, const std::string& dir, const Globals& g, Io& io) {
  Alignment a = load(file, g, io);
  auto options = solver_options();
  require_consistent(a, options, g, io);
  auto result = enumerated(a, options.world_limit, options, g, io);
  auto matrix = distance_matrix(result.worlds);
  auto cluster = cluster_to_dot(result.worlds, matrix);
  if (!dir.empty()) {
    fs::create_directories(dir);
    write_file(fs::path(dir) / "cluster.dot", cluster.dot);
    write_file(fs::path(dir) / "distances.csv", cluster.csv);
  }
  if (g.json)
    io.out << json{{"dot", cluster.dot}, {"csv", cluster.csv}, {"matrix", matrix}}.dump(2) << '\n';
  else if (dir.empty())
    io.out << cluster.csv << '\n' << cluster.dot;
  else
    io.out << "cluster.dot and distances.csv written to " << dir << '\n';
  return kExitOk;
}

std::optional<RelationMask> parse_answer(const std::string& line, const Question& q) {
  std::stringstream ss(line);
  std::string token;
  RelationMask mask;
  while (ss >> token) {
    if (std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      std::size_t choice = std::stoul(token);
      if (choice == 0 || choice > q.candidates.size()) return std::nullopt;
      mask |= q.candidates[choice - 1].relation;
    } else if (auto r = parse_relation_token(token)) {
      mask |= *r;
    } else {
      return std::nullopt;
    }
  }
  if (mask.empty()) return std::nullopt;
  return mask;
}

int cmd_reduce(const std::string& file, const Globals& g, Io& io) {
  Alignment a = load(file, g, io);
  auto options = solver_options();
  require_consistent(a, options, g, io);
  auto result = enumerated(a, options.world_limit, options, g, io);
  auto worlds = std::make_shared<const WorldSet>(std::move(result.worlds));
  ReductionSession session(worlds);
  io.out << worlds->worlds.size() << " possible worlds\n";

  while (auto q = session.next_question()) {
    std::string left = concept_key(1, q->left);
    std::string right = concept_key(2, q->right);
    io.out << "\nHow is " << left << " related to " << right << "?\n";
    for (std::size_t i = 0; i < q->candidates.size(); ++i) {
      const auto& c = q->candidates[i];
      io.out << "  " << (i + 1) << ") " << left << ' ' << short_name(c.relation) << ' ' << right << "   (" << c.count
             << " world" << (c.count == 1 ? "" : "s") << ")\n";
    }
    io.out << "answer (number or relation, empty line to stop)> " << std::flush;
    std::string line;
    if (!std::getline(io.in, line) || line.find_first_not_of(" \t\r") == std::string::npos) break;
    auto mask = parse_answer(line, *q);
    if (!mask) {
      io.out << "not understood: " << line << '\n';
      continue;
    }
    try {
      session = session.apply_answer(q->left, q->right, *mask);
    } catch (const EmptyWorldSet&) {
      io.out << "no possible world matches this choice\n";
      continue;
    }
    io.out << session.surviving().size() << " possible world" << (session.surviving().size() == 1 ? "" : "s")
           << " remain\n";
  }

  const auto& left_over = session.surviving();
  io.out << '\n' << left_over.size() << " possible world" << (left_over.size() == 1 ? " remains" : "s remain") << ":";
  for (auto w : left_over) io.out << " w" << worlds->worlds[w].id;
  io.out << '\n';
  if (g.json) {
    json ids = json::array();
    for (auto w : left_over) ids.push_back(worlds->worlds[w].id);
    io.out << json{{"surviving", ids}}.dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_provenance(const std::string& file, const std::string& left, const std::string& right, const std::string& mask_text,
                   const Globals& g, Io& io) {
  Alignment a = load(file, g, io);
  auto options = solver_options();
  require_consistent(a, options, g, io);
  auto l = split_concept_key(left);
  auto r = split_concept_key(right);
  if (!l || !r || l->first != 1 || r->first != 2) throw Exit{kExitError, "--left must be a 1.x key and --right a 2.y key"};
  RelationMask mask;
  std::stringstream ss(mask_text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    token.erase(std::remove_if(token.begin(), token.end(), [](char c) { return c == ' ' || c == '{' || c == '}'; }),
                token.end());
    auto rel = parse_relation_token(token);
    if (!rel) throw Exit{kExitError, "unknown relation '" + token + "'"};
    mask |= *rel;
  }
  try {
    auto subset = mir_provenance(a, l->second, r->second, mask, options);
    if (g.json) {
      json arts = json::array();
      for (auto idx : subset) arts.push_back({{"index", idx}, {"text", a.find_articulation(idx)->text()}});
      io.out << json{{"left", left}, {"right", right}, {"mask", mask_json(mask)}, {"articulations", arts}}.dump(2) << '\n';
    } else {
      io.out << left << ' ' << mask.to_string() << ' ' << right << " follows from:\n";
      if (subset.empty()) io.out << "  (the taxonomies alone)\n";
      for (auto idx : subset) io.out << "  " << a.find_articulation(idx)->text() << '\n';
    }
  } catch (const NotEntailed& e) {
    throw Exit{kExitError, e.what()};
  }
  return kExitOk;
}

int cmd_gen(const SyntheticSpec& spec, const std::string& output, Io& io) {
  std::string text;
  try {
    text = serialize_alignment(generate_synthetic(spec));
  } catch (const std::invalid_argument& e) {
    throw Exit{kExitError, e.what()};
  }
  if (output.empty())
    io.out << text;
  else
    write_file(output, text);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Io io{in, out, err};
  Globals g;
  CLI::App app{"Taxonomy alignment reasoner"};
  app.name("taxalign");
  app.require_subcommand(1);
  app.add_flag("--no-coverage", g.no_coverage, "Do not require parents to be covered by their children");
  app.add_flag("--json", g.json, "Machine-readable JSON output");
  app.add_flag("--stats", g.stats, "Print solver statistics to stderr");
  app.add_option("--seed", g.seed, "Seed for synthetic generation");

  std::string file;
  auto* check = app.add_subcommand("check", "Decide consistency (exit 0 consistent, 2 inconsistent)");
  check->add_option("file", file)->required();

  auto* explain = app.add_subcommand("explain", "Explain an inconsistency and suggest repairs");
  explain->add_option("file", file)->required();

  std::string format = "csv";
  std::string output;
  auto* mir_cmd = app.add_subcommand("mir", "Maximally informative relations");
  mir_cmd->add_option("file", file)->required();
  mir_cmd->add_option("--format", format)->check(CLI::IsMember({"csv", "json"}));
  mir_cmd->add_option("-o,--output", output, "Write to a file instead of stdout");

  std::optional<std::size_t> limit;
  std::string dir;
  std::vector<std::string> style;
  auto* worlds = app.add_subcommand("worlds", "Enumerate possible worlds and their containment graphs");
  worlds->add_option("file", file)->required();
  worlds->add_option("--limit", limit, "Stop after this many worlds");
  worlds->add_option("-o,--output", dir, "Directory for world_<id>.json and world_<id>.dot");
  worlds->add_option("--style", style, "RCG style override, e.g. merged_fill=white");

  auto* cluster = app.add_subcommand("cluster", "World distance matrix and network");
  cluster->add_option("file", file)->required();
  cluster->add_option("-o,--output", dir, "Directory for cluster.dot and distances.csv");

  auto* reduce = app.add_subcommand("reduce", "Interactively narrow down the possible worlds");
  reduce->add_option("file", file)->required();

  std::string left, right, mask;
  auto* prov = app.add_subcommand("provenance", "Minimal articulations behind an inferred relation");
  prov->add_option("file", file)->required();
  prov->add_option("--left", left)->required();
  prov->add_option("--right", right)->required();
  prov->add_option("--mask", mask)->required();

  SyntheticSpec spec;
  std::string pattern = "included";
  auto* gen = app.add_subcommand("gen", "Generate a synthetic balanced-tree alignment");
  gen->add_option("--depth", spec.depth)->required();
  gen->add_option("--branch", spec.branch)->required();
  gen->add_option("--pattern", pattern)->check(CLI::IsMember({"included", "congruent"}));
  gen->add_option("-o,--output", output);

  int port = 8080;
  std::string host = "127.0.0.1";
  service::ServiceOptions service_options;
  auto* serve = app.add_subcommand("serve", "Start the HTTP session service");
  serve->add_option("--port", port);
  serve->add_option("--host", host);
  serve->add_option("--data-dir", service_options.data_dir);
  serve->add_option("--static-dir", service_options.static_dir, "UI bundle served at /");
  serve->add_option("--allowed-origin", service_options.allowed_origin);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*check) return cmd_check(file, g, io);
    if (*explain) return cmd_explain(file, g, io);
    if (*mir_cmd) return cmd_mir(file, format, output, g, io);
    if (*worlds) return cmd_worlds(file, limit, dir, style, g, io);
    if (*cluster) return cmd_cluster(file, dir, g, io);
    if (*reduce) return cmd_reduce(file, g, io);
    if (*prov) return cmd_provenance(file, left, right, mask, g, io);
    if (*gen) {
      spec.pattern = *parse_pattern(pattern);
      spec.seed = g.seed;
      return cmd_gen(spec, output, io);
    }
    if (*serve) {
      service_options.solver = solver_options();
      service::Service svc(service_options);
      err << "listening on http://" << host << ':' << port << '\n';
      return svc.listen(host, port) ? kExitOk : kExitError;
    }
  } catch (const Exit& e) {
    if (!e.message.empty()) err << "taxalign: " << e.message << '\n';
    return e.code;
  } catch (const BudgetExceeded& e) {
    err << "taxalign: budget exhausted: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::exception& e) {
    err << "taxalign: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace taxalign::cli
