#ifndef TERM_SERVICE_H_
#define TERM_SERVICE_H_

// JSON API over a Store, all routes under /api:
//
//   GET  /api/items?kind=&status=   list, store order
//   POST /api/items/{id}/decision   {"verdict": "accepted|rejected", "who": "..."}
//   POST /api/iterate               one engine turn, 409 while another runs
//   GET  /api/status                iteration counter and item counts

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "term/valstore.h"

namespace term {

class ApiServer {
 public:
  // `engine` may be null; /api/iterate then answers 503.
  ApiServer(Store& store, Engine* engine);
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  // Serves files from `dir` at /. Returns false when `dir` is not a directory.
  bool mount_static(const std::filesystem::path& dir);

  // Port 0 picks a free port. Returns the bound port, or -1.
  int bind(const std::string& host, int port);
  // Blocks until stop(). Call after bind().
  bool listen();
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace term

#endif  // TERM_SERVICE_H_
