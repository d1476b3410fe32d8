#include "taxalign/service.hpp"

#include <httplib.h>

#include <atomic>
#include <deque>
#include <filesystem>
#include <fstream>
#include <future>
#include <mutex>
#include <random>
#include <set>
#include <shared_mutex>
#include <sstream>
#include <thread>

#include "taxalign/analysis.hpp"
#include "taxalign/parser.hpp"
#include "taxalign/serialization.hpp"
#include "taxalign/viz.hpp"

namespace taxalign::service {

namespace {

namespace fs = std::filesystem;

struct HttpError {
  int status;
  std::string code;
  std::string message;
};

ApiResponse json_response(int status, const json& body) { return {status, "application/json", body.dump()}; }

ApiResponse error_response(int status, const std::string& code, const std::string& message) {
  return json_response(status, {{"error", code}, {"message", message}});
}

enum class Need { kConsistency, kDiagnosis, kWorlds };

enum class JobStatus { kRunning, kDone, kFailed };

struct Job {
  std::string id;
  std::string session_id;
  std::atomic<JobStatus> status{JobStatus::kRunning};
  std::string error;  // written before status leaves kRunning
  bool budget_exhausted = false;
  std::shared_future<void> done;
};

struct Answer {
  std::string left;
  std::string right;
  RelationMask mask;
};

struct Session {
  std::string id;
  std::string text;
  bool coverage = true;
  Alignment alignment;  // as uploaded; repairs only flag articulations
  std::set<std::size_t> removed;
  std::vector<Answer> answers;
  json history = json::array();
  std::uint64_t generation = 0;

  std::optional<bool> consistent;
  std::optional<Diagnosis> diagnosis;
  std::shared_ptr<const WorldSet> worlds;
  std::optional<ReductionSession> reduction;
  std::optional<std::string> budget_error;
  std::shared_ptr<Job> job;

  mutable std::shared_mutex mutex;

  Alignment effective() const {
    std::vector<std::size_t> gone(removed.begin(), removed.end());
    return alignment.without(gone);
  }

  void invalidate() {
    ++generation;
    consistent.reset();
    diagnosis.reset();
    worlds.reset();
    reduction.reset();
    budget_error.reset();
  }

  void append_history(json event) {
    event["seq"] = history.size();
    history.push_back(std::move(event));
  }

  // Rebuilds the reduction state from the cached worlds and recorded answers.
  void rebuild_reduction() {
    reduction.reset();
    if (!worlds || worlds->worlds.empty()) return;
    ReductionSession r(worlds);
    for (const auto& a : answers) {
      try {
        r = r.apply_answer(a.left, a.right, a.mask);
      } catch (const std::exception&) {
        // A stale answer no longer matches; it stays in the record but is not applied.
      }
    }
    reduction = std::move(r);
  }
};

bool satisfied(const Session& s, Need need) {
  if (!s.consistent) return false;
  switch (need) {
    case Need::kConsistency:
      return true;
    case Need::kDiagnosis:
      return *s.consistent || s.diagnosis.has_value();
    case Need::kWorlds:
      return !*s.consistent || s.worlds != nullptr;
  }
  return false;
}

std::string random_token() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(mu);
  std::ostringstream os;
  os << std::hex;
  for (int i = 0; i < 2; ++i) {
    std::uint64_t v = rng();
    for (int k = 0; k < 16; ++k) os << ((v >> (60 - 4 * k)) & 0xf);
  }
  return os.str();
}

bool valid_token(const std::string& id) {
  return !id.empty() && id.size() <= 64 &&
         std::all_of(id.begin(), id.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> out;
  std::string part;
  std::istringstream is(path);
  while (std::getline(is, part, '/'))
    if (!part.empty()) out.push_back(part);
  return out;
}

json parse_body(const std::string& body) {
  try {
    json j = json::parse(body.empty() ? "{}" : body);
    if (!j.is_object()) throw HttpError{400, "malformed", "request body must be a JSON object"};
    return j;
  } catch (const json::parse_error& e) {
    throw HttpError{400, "malformed", std::string("invalid JSON: ") + e.what()};
  }
}

std::pair<std::string, std::string> pair_from_keys(const std::string& left, const std::string& right) {
  auto l = split_concept_key(left);
  auto r = split_concept_key(right);
  if (!l || !r || l->first == r->first) throw HttpError{400, "malformed", "pair must be a 1.x and a 2.y key"};
  if (l->first == 2) std::swap(l, r);
  return {l->second, r->second};
}

RelationMask mask_from_tokens(const std::string& text) {
  RelationMask m;
  std::string token;
  for (char c : text + ",") {
    if (c == ',' || c == ' ' || c == '{' || c == '}') {
      if (!token.empty()) {
        auto r = parse_relation_token(token);
        if (!r) throw HttpError{400, "malformed", "unknown relation '" + token + "'"};
        m |= *r;
        token.clear();
      }
    } else {
      token += c;
    }
  }
  if (m.empty()) throw HttpError{400, "malformed", "empty relation mask"};
  return m;
}

}  // namespace

struct Service::Impl {
  ServiceOptions options;
  std::mutex sessions_mu;
  std::map<std::string, std::shared_ptr<Session>> sessions;
  std::mutex jobs_mu;
  std::map<std::string, std::shared_ptr<Job>> jobs;
  std::deque<std::string> job_order;
  static constexpr std::size_t kMaxJobs = 256;

  std::unique_ptr<httplib::Server> server;
  std::thread server_thread;

  explicit Impl(ServiceOptions o) : options(std::move(o)) {
    if (!options.data_dir.empty()) fs::create_directories(options.data_dir);
  }

  ~Impl() {
    std::vector<std::shared_future<void>> pending;
    {
      std::lock_guard lock(jobs_mu);
      for (auto& [_, j] : jobs) pending.push_back(j->done);
    }
    for (auto& f : pending)
      if (f.valid()) f.wait();
  }

  // ---- persistence ----------------------------------------------------

  fs::path record_path(const std::string& id) const { return fs::path(options.data_dir) / (id + ".json"); }

  void persist(const Session& s) const {
    if (options.data_dir.empty()) return;
    json answers = json::array();
    for (const auto& a : s.answers)
      answers.push_back({{"left", concept_key(1, a.left)}, {"right", concept_key(2, a.right)}, {"mask", mask_json(a.mask)}});
    json record = {{"version", 1},
                   {"id", s.id},
                   {"text", s.text},
                   {"coverage", s.coverage},
                   {"removed", s.removed},
                   {"answers", answers},
                   {"history", s.history}};
    fs::path path = record_path(s.id);
    fs::path tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << record.dump(2) << '\n';
    }
    fs::rename(tmp, path);
  }

  std::shared_ptr<Session> restore(const std::string& id) const {
    fs::path path = record_path(id);
    if (options.data_dir.empty() || !fs::exists(path)) return nullptr;
    std::ifstream in(path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    auto corrupt = [&](const std::string& why) {
      return HttpError{500, "corrupt-record", "session record " + id + " is corrupt: " + why};
    };
    json record;
    try {
      record = json::parse(buf.str());
    } catch (const json::exception& e) {
      throw corrupt(e.what());
    }
    auto session = std::make_shared<Session>();
    try {
      if (record.at("id").get<std::string>() != id) throw corrupt("id mismatch");
      session->id = id;
      session->text = record.at("text").get<std::string>();
      session->coverage = record.at("coverage").get<bool>();
      ConstraintFlags flags;
      flags.coverage = session->coverage;
      auto parsed = parse_alignment(session->text, flags);
      if (!parsed.ok()) throw corrupt("stored alignment no longer parses");
      session->alignment = std::move(*parsed.alignment);
      for (const auto& r : record.at("removed")) session->removed.insert(r.get<std::size_t>());
      for (const auto& a : record.at("answers")) {
        auto [l, r] = pair_from_keys(a.at("left").get<std::string>(), a.at("right").get<std::string>());
        session->answers.push_back({l, r, mask_from_json(a.at("mask"))});
      }
      session->history = record.at("history");
      if (!session->history.is_array()) throw corrupt("history is not an array");
    } catch (const json::exception& e) {
      throw corrupt(e.what());
    } catch (const std::invalid_argument& e) {
      throw corrupt(e.what());
    } catch (const HttpError& e) {
      if (e.code == "corrupt-record") throw;
      throw corrupt(e.message);
    }
    return session;
  }

  std::shared_ptr<Session> find_session(const std::string& id) {
    if (!valid_token(id)) throw HttpError{404, "not-found", "unknown session"};
    std::lock_guard lock(sessions_mu);
    if (auto it = sessions.find(id); it != sessions.end()) return it->second;
    auto restored = restore(id);
    if (!restored) throw HttpError{404, "not-found", "unknown session " + id};
    sessions[id] = restored;
    return restored;
  }

  // ---- background computation ----------------------------------------

  std::shared_ptr<Job> start_job(const std::shared_ptr<Session>& s, Need need) {
    auto job = std::make_shared<Job>();
    job->id = random_token();
    job->session_id = s->id;
    Alignment snapshot = s->effective();
    std::uint64_t generation = s->generation;
    SolverOptions solver = options.solver;
    std::weak_ptr<Session> weak = s;
    std::optional<bool> known = s->consistent;

    Job* self = job.get();  // owned by `jobs`, which outlives every future
    job->done = std::async(std::launch::async, [self, weak, snapshot = std::move(snapshot), generation, solver, need,
                                                known]() {
                  std::optional<bool> consistent = known;
                  std::optional<Diagnosis> diagnosis;
                  std::shared_ptr<const WorldSet> worlds;
                  std::optional<std::string> budget;
                  try {
                    if (!consistent) consistent = check_consistency(snapshot, solver).consistent;
                    if (need == Need::kDiagnosis && !*consistent) {
                      DiagnoseOptions d;
                      d.solver = solver;
                      diagnosis = diagnose(snapshot, d);
                    }
                    if (need == Need::kWorlds && *consistent) {
                      worlds = std::make_shared<const WorldSet>(enumerate_worlds(snapshot, solver).worlds);
                    }
                  } catch (const BudgetExceeded& e) {
                    budget = e.what();
                  } catch (const std::exception& e) {
                    self->error = e.what();
                  }
                  if (auto s = weak.lock()) {
                    std::unique_lock lock(s->mutex);
                    if (s->generation == generation) {
                      if (consistent && !s->consistent) s->consistent = consistent;
                      if (diagnosis && !s->diagnosis) s->diagnosis = std::move(diagnosis);
                      if (worlds && !s->worlds) {
                        s->worlds = worlds;
                        s->rebuild_reduction();
                      }
                      if (budget) s->budget_error = budget;
                    }
                    if (s->job.get() == self) s->job.reset();
                  }
                  if (budget && self->error.empty()) {
                    self->error = *budget;
                    self->budget_exhausted = true;
                  }
                  self->status = self->error.empty() ? JobStatus::kDone : JobStatus::kFailed;
                }).share();
    std::lock_guard lock(jobs_mu);
    jobs[job->id] = job;
    job_order.push_back(job->id);
    // Forget the oldest finished jobs once too many are kept for polling.
    for (auto it = job_order.begin(); jobs.size() > kMaxJobs && it != job_order.end();) {
      auto j = jobs.find(*it);
      if (j->second->status != JobStatus::kRunning) {
        jobs.erase(j);
        it = job_order.erase(it);
      } else {
        ++it;
      }
    }
    return job;
  }

  // Runs `respond` once the session has what `need` asks for, starting (or
  // joining) the session's background job. Answers 202 if that takes longer
  // than the configured wait.
  template <typename F>
  ApiResponse with_results(const std::shared_ptr<Session>& s, Need need, F respond) {
    for (int attempt = 0; attempt < 3; ++attempt) {
      std::shared_ptr<Job> job;
      {
        std::unique_lock lock(s->mutex);
        if (s->budget_error) return error_response(503, "budget-exceeded", *s->budget_error);
        if (satisfied(*s, need)) return respond(*s);
        if (!s->job) s->job = start_job(s, need);
        job = s->job;
      }
      if (job->done.wait_for(options.sync_wait) != std::future_status::ready) {
        return json_response(202, {{"job", job->id}, {"status", "running"}, {"poll", "/api/jobs/" + job->id}});
      }
      if (job->status == JobStatus::kFailed && !job->budget_exhausted)
        return error_response(500, "internal", job->error);
    }
    return error_response(500, "internal", "computation did not settle");
  }

  // ---- routes -----------------------------------------------------------

  ApiResponse create_session(const ApiRequest& req) {
    std::string text = req.body;
    bool coverage = true;
    if (auto it = req.query.find("coverage"); it != req.query.end()) coverage = it->second != "false" && it->second != "0";
    if (!text.empty() && text.front() == '{') {
      json j = parse_body(text);
      if (!j.contains("text") || !j["text"].is_string())
        throw HttpError{400, "malformed", "expected {\"text\": ...}"};
      text = j["text"].get<std::string>();
      coverage = j.value("coverage", coverage);
    }
    ConstraintFlags flags;
    flags.coverage = coverage;
    auto parsed = parse_alignment(text, flags);
    if (!parsed.ok())
      return json_response(400, {{"error", "parse"}, {"message", "alignment does not parse"}, {"errors", parse_errors_json(parsed.errors)}});

    auto s = std::make_shared<Session>();
    s->id = random_token();
    s->text = text;
    s->coverage = coverage;
    s->alignment = std::move(*parsed.alignment);
    s->append_history({{"type", "create"}, {"articulations", s->alignment.articulations.size()}});
    {
      std::lock_guard lock(sessions_mu);
      sessions[s->id] = s;
    }
    persist(*s);
    return json_response(201, {{"id", s->id}, {"articulations", s->alignment.articulations.size()}});
  }

  json summary(const Session& s) const {
    json answers = json::array();
    for (const auto& a : s.answers)
      answers.push_back({{"left", concept_key(1, a.left)}, {"right", concept_key(2, a.right)}, {"mask", mask_json(a.mask)}});
    json active = json::array();
    for (const auto& art : s.alignment.articulations)
      if (!s.removed.count(art.index)) active.push_back(art.index);
    return {{"id", s.id},
            {"alignment", alignment_json(s.alignment)},
            {"removed", s.removed},
            {"active", active},
            {"answers", answers},
            {"history", s.history}};
  }

  ApiResponse repair(const std::shared_ptr<Session>& s, const ApiRequest& req) {
    json body = parse_body(req.body);
    std::unique_lock lock(s->mutex);
    auto indices = [&](const char* field) {
      std::vector<std::size_t> out;
      if (!body.contains(field)) return out;
      if (!body[field].is_array()) throw HttpError{400, "malformed", std::string(field) + " must be an array"};
      for (const auto& v : body[field]) {
        if (!v.is_number_unsigned()) throw HttpError{400, "malformed", "articulation indices must be integers"};
        auto idx = v.get<std::size_t>();
        if (!s->alignment.find_articulation(idx))
          throw HttpError{400, "malformed", "unknown articulation " + std::to_string(idx)};
        out.push_back(idx);
      }
      return out;
    };
    auto remove = indices("remove");
    auto restore_list = indices("restore");
    bool changed = false;
    for (auto i : remove) changed |= s->removed.insert(i).second;
    for (auto i : restore_list) changed |= s->removed.erase(i) > 0;
    if (changed) {
      s->invalidate();
      s->append_history({{"type", "repair"}, {"remove", remove}, {"restore", restore_list}});
      if (!s->answers.empty()) {
        s->answers.clear();
        s->append_history({{"type", "answers-cleared"}});
      }
      persist(*s);
    }
    return json_response(200, {{"removed", s->removed}});
  }

  ApiResponse answer(const std::shared_ptr<Session>& s, const ApiRequest& req) {
    json body = parse_body(req.body);
    if (!body.contains("left") || !body.contains("right") || !body.contains("mask"))
      throw HttpError{400, "malformed", "answer needs left, right and mask"};
    auto [left, right] = pair_from_keys(body["left"].get<std::string>(), body["right"].get<std::string>());
    RelationMask mask;
    try {
      mask = mask_from_json(body["mask"]);
    } catch (const std::exception& e) {
      throw HttpError{400, "malformed", e.what()};
    }
    if (mask.empty()) throw HttpError{400, "malformed", "empty relation mask"};
    return with_results(s, Need::kWorlds, [&](Session& sess) -> ApiResponse {
      if (!*sess.consistent) return error_response(422, "inconsistent", "alignment is inconsistent");
      if (!sess.reduction) sess.rebuild_reduction();
      try {
        auto next = sess.reduction->apply_answer(left, right, mask);
        bool duplicate = std::any_of(sess.answers.begin(), sess.answers.end(), [&](const Answer& a) {
          return a.left == left && a.right == right && a.mask == mask;
        });
        if (!duplicate) {
          sess.answers.push_back({left, right, mask});
          sess.append_history({{"type", "answer"},
                               {"left", concept_key(1, left)},
                               {"right", concept_key(2, right)},
                               {"mask", mask_json(mask)}});
          persist(sess);
        }
        sess.reduction = std::move(next);
      } catch (const EmptyWorldSet& e) {
        return error_response(409, "empty-world-set", e.what());
      } catch (const std::invalid_argument& e) {
        return error_response(400, "malformed", e.what());
      }
      return json_response(200, {{"surviving", sess.reduction->surviving().size()},
                                 {"total", sess.worlds->worlds.size()}});
    });
  }

  ApiResponse reset_answers(const std::shared_ptr<Session>& s) {
    std::unique_lock lock(s->mutex);
    if (!s->answers.empty()) {
      s->answers.clear();
      s->append_history({{"type", "reset-answers"}});
      persist(*s);
    }
    s->rebuild_reduction();
    return json_response(200, {{"answers", json::array()}});
  }

  ApiResponse provenance(const std::shared_ptr<Session>& s, const ApiRequest& req) {
    auto q = [&](const char* key) {
      auto it = req.query.find(key);
      if (it == req.query.end() || it->second.empty()) throw HttpError{400, "malformed", std::string("missing ") + key};
      return it->second;
    };
    auto [left, right] = pair_from_keys(q("left"), q("right"));
    RelationMask target = mask_from_tokens(q("mask"));
    Alignment snapshot;
    {
      std::shared_lock lock(s->mutex);
      if (!s->alignment.first.contains(left) || !s->alignment.second.contains(right))
        throw HttpError{400, "malformed", "unknown concept pair"};
    }
    ApiResponse gate = with_results(s, Need::kConsistency, [&](Session& sess) -> ApiResponse {
      if (!*sess.consistent) return error_response(422, "inconsistent", "alignment is inconsistent");
      snapshot = sess.effective();
      return {};
    });
    if (gate.status != 200) return gate;
    try {
      auto subset = mir_provenance(snapshot, left, right, target, options.solver);
      json arts = json::array();
      for (auto idx : subset) arts.push_back({{"index", idx}, {"text", snapshot.find_articulation(idx)->text()}});
      return json_response(200, {{"left", concept_key(1, left)},
                                 {"right", concept_key(2, right)},
                                 {"mask", mask_json(target)},
                                 {"articulations", arts}});
    } catch (const NotEntailed& e) {
      return error_response(422, "not-entailed", e.what());
    } catch (const BudgetExceeded& e) {
      return error_response(503, "budget-exceeded", e.what());
    }
  }

  ApiResponse job_status(const std::string& id) {
    std::shared_ptr<Job> job;
    {
      std::lock_guard lock(jobs_mu);
      auto it = jobs.find(id);
      if (it == jobs.end()) throw HttpError{404, "not-found", "unknown job " + id};
      job = it->second;
    }
    JobStatus st = job->status;
    json out = {{"id", job->id},
                {"session", job->session_id},
                {"status", st == JobStatus::kRunning ? "running" : st == JobStatus::kDone ? "done" : "failed"}};
    if (st == JobStatus::kFailed) out["error"] = job->error;
    return json_response(200, out);
  }

  ApiResponse session_route(const ApiRequest& req, const std::vector<std::string>& parts) {
    auto s = find_session(parts[2]);
    const std::string action = parts.size() > 3 ? parts[3] : "";
    const bool get = req.method == "GET";
    const bool post = req.method == "POST";
    auto inconsistent = [] { return error_response(422, "inconsistent", "alignment is inconsistent"); };

    if (action.empty() && get && parts.size() == 3) {
      std::shared_lock lock(s->mutex);
      return json_response(200, summary(*s));
    }
    if (action == "consistency" && get) {
      return with_results(s, Need::kConsistency,
                          [](Session& sess) { return json_response(200, {{"consistent", *sess.consistent}}); });
    }
    if (action == "diagnosis" && get) {
      return with_results(s, Need::kDiagnosis, [](Session& sess) -> ApiResponse {
        if (*sess.consistent) return error_response(422, "consistent", "alignment is consistent; nothing to diagnose");
        Alignment eff = sess.effective();
        json black_box = json::array();
        for (auto idx : sess.diagnosis->repairs) black_box.push_back(eff.find_articulation(idx)->text());
        return json_response(200, {{"consistent", false},
                                   {"diagnosis", diagnosis_json(*sess.diagnosis, eff)},
                                   {"black_box", black_box},
                                   {"white_box", explanation_text(*sess.diagnosis, eff)}});
      });
    }
    if (action == "repair" && post) return repair(s, req);
    if (action == "worlds" && get) {
      std::size_t limit = std::numeric_limits<std::size_t>::max();
      if (auto it = req.query.find("limit"); it != req.query.end()) {
        try {
          limit = std::stoul(it->second);
        } catch (const std::exception&) {
          throw HttpError{400, "malformed", "limit must be a non-negative integer"};
        }
      }
      return with_results(s, Need::kWorlds, [&](Session& sess) -> ApiResponse {
        if (!*sess.consistent) return inconsistent();
        WorldSet view;
        view.pairs = sess.worlds->pairs;
        view.truncated = sess.worlds->truncated || sess.worlds->worlds.size() > limit;
        for (std::size_t i = 0; i < sess.worlds->worlds.size() && i < limit; ++i) view.worlds.push_back(sess.worlds->worlds[i]);
        return json_response(200, worlds_json(view, build_grid(sess.effective())));
      });
    }
    if (action == "mir" && get) {
      return with_results(s, Need::kWorlds, [&](Session& sess) -> ApiResponse {
        if (!*sess.consistent) return inconsistent();
        auto table = mir(*sess.worlds);
        json out = mir_json(table);
        out["consensus"] = consensus_json(consensus(table));
        out["truncated"] = sess.worlds->truncated;
        return json_response(200, out);
      });
    }
    if (action == "question" && get) {
      return with_results(s, Need::kWorlds, [&](Session& sess) -> ApiResponse {
        if (!*sess.consistent) return inconsistent();
        if (!sess.reduction) sess.rebuild_reduction();
        auto q = sess.reduction->next_question();
        return json_response(200, {{"question", q ? question_json(*q) : json(nullptr)},
                                   {"surviving", sess.reduction->surviving().size()},
                                   {"total", sess.worlds->worlds.size()}});
      });
    }
    if (action == "answer" && post) return answer(s, req);
    if (action == "reset-answers" && post) return reset_answers(s);
    if (action == "rcg" && get && parts.size() == 5) {
      std::size_t world_id = 0;
      try {
        world_id = std::stoul(parts[4]);
      } catch (const std::exception&) {
        throw HttpError{404, "not-found", "unknown world " + parts[4]};
      }
      bool as_json = req.query.count("format") && req.query.at("format") == "json";
      return with_results(s, Need::kWorlds, [&](Session& sess) -> ApiResponse {
        if (!*sess.consistent) return inconsistent();
        if (world_id >= sess.worlds->worlds.size())
          return error_response(404, "not-found", "unknown world " + std::to_string(world_id));
        Rcg rcg = build_rcg(sess.worlds->worlds[world_id], sess.effective());
        if (as_json) return json_response(200, rcg_json(rcg));
        return {200, "text/vnd.graphviz", rcg_to_dot(rcg)};
      });
    }
    if (action == "cluster" && get) {
      return with_results(s, Need::kWorlds, [&](Session& sess) -> ApiResponse {
        if (!*sess.consistent) return inconsistent();
        auto matrix = distance_matrix(*sess.worlds);
        auto out = cluster_to_dot(*sess.worlds, matrix);
        return json_response(200, {{"dot", out.dot}, {"csv", out.csv}, {"matrix", matrix}});
      });
    }
    if (action == "provenance" && get) return provenance(s, req);
    throw HttpError{404, "not-found", "no route for " + req.method + " " + req.path};
  }

  ApiResponse dispatch(const ApiRequest& req) {
    auto parts = split_path(req.path);
    if (parts.size() >= 2 && parts[0] == "api") {
      if (parts[1] == "session") {
        if (parts.size() == 2 && req.method == "POST") return create_session(req);
        if (parts.size() >= 3) return session_route(req, parts);
      }
      if (parts[1] == "jobs" && parts.size() == 3 && req.method == "GET") return job_status(parts[2]);
    }
    throw HttpError{404, "not-found", "no route for " + req.method + " " + req.path};
  }
};

Service::Service(ServiceOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Service::~Service() { stop(); }

ApiResponse Service::handle(const ApiRequest& request) {
  try {
    return impl_->dispatch(request);
  } catch (const HttpError& e) {
    return error_response(e.status, e.code, e.message);
  } catch (const BudgetExceeded& e) {
    return error_response(503, "budget-exceeded", e.what());
  } catch (const json::exception& e) {
    return error_response(400, "malformed", e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal", e.what());
  }
}

namespace {

void install_routes(httplib::Server& server, Service& service, const ServiceOptions& options) {
  auto adapt = [&service, origin = options.allowed_origin](const httplib::Request& req, httplib::Response& res) {
    ApiRequest api{req.method, req.path, {}, req.body};
    for (const auto& [k, v] : req.params) api.query[k] = v;
    ApiResponse out = service.handle(api);
    res.status = out.status;
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_content(out.body, out.content_type.c_str());
  };
  server.Get(R"(/api/.*)", adapt);
  server.Post(R"(/api/.*)", adapt);
  server.Options(R"(/api/.*)", [origin = options.allowed_origin](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });
  if (!options.static_dir.empty()) server.set_mount_point("/", options.static_dir);
}

}  // namespace

bool Service::listen(const std::string& host, int port) {
  impl_->server = std::make_unique<httplib::Server>();
  install_routes(*impl_->server, *this, impl_->options);
  return impl_->server->listen(host, port);
}

int Service::start_background(const std::string& host) {
  impl_->server = std::make_unique<httplib::Server>();
  install_routes(*impl_->server, *this, impl_->options);
  int port = impl_->server->bind_to_any_port(host);
  if (port <= 0) return -1;
  impl_->server_thread = std::thread([this] { impl_->server->listen_after_bind(); });
  impl_->server->wait_until_ready();
  return port;
}

void Service::stop() {
  if (impl_->server) impl_->server->stop();
  if (impl_->server_thread.joinable()) impl_->server_thread.join();
}

void Service::forget_sessions() {
  std::lock_guard lock(impl_->sessions_mu);
  impl_->sessions.clear();
}

}  // namespace taxalign::service
