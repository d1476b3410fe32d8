#ifndef TAXALIGN_SERVICE_HPP_
#define TAXALIGN_SERVICE_HPP_

#include <chrono>
#include <map>
#include <memory>
#include <string>

#include "taxalign/engine.hpp"

namespace taxalign::service {

struct ServiceOptions {
  std::string data_dir;  // empty: sessions live in memory only
  std::string static_dir;  // optional UI bundle mounted at /
  std::string allowed_origin = "*";
  SolverOptions solver;
  // How long a request waits for a background computation before answering
  // 202 with a job to poll.
  std::chrono::milliseconds sync_wait{2000};
};

struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// Session-oriented JSON API over the reasoning workflow. All methods are
// safe to call concurrently.
//
//   POST /api/session                         alignment text -> {"id": ...}
//   GET  /api/session/{id}                    summary
//   GET  /api/session/{id}/consistency
//   GET  /api/session/{id}/diagnosis
//   POST /api/session/{id}/repair             {"remove": [i..], "restore": [i..]}
//   GET  /api/session/{id}/worlds?limit=N
//   GET  /api/session/{id}/mir
//   GET  /api/session/{id}/question
//   POST /api/session/{id}/answer             {"left": "1.A", "right": "2.B", "mask": [">"]}
//   POST /api/session/{id}/reset-answers
//   GET  /api/session/{id}/rcg/{world}        DOT (format=json for JSON)
//   GET  /api/session/{id}/cluster
//   GET  /api/session/{id}/provenance?left=&right=&mask=
//   GET  /api/jobs/{id}
class Service {
 public:
  explicit Service(ServiceOptions options);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  ApiResponse handle(const ApiRequest& request);

  // Binds and serves HTTP until stop(). Returns false if binding failed.
  bool listen(const std::string& host, int port);
  // Binds to an ephemeral port and serves on a background thread.
  int start_background(const std::string& host);
  void stop();

  // Drops in-memory sessions so the next access restores from data_dir.
  void forget_sessions();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace taxalign::service

#endif  // TAXALIGN_SERVICE_HPP_
