#include "term/service.h"

#include "httplib.h"
#include "term/error.h"

namespace term {

using nlohmann::json;

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump() + "\n", "application/json");
}

void fail(httplib::Response& res, int status, const std::string& message) {
  reply(res, status, json{{"error", message}});
}

json items_json(const std::vector<ValidationItem>& items) {
  json out = json::array();
  for (const auto& it : items) out.push_back(to_json(it));
  return out;
}

}  // namespace

struct ApiServer::Impl {
  Store& store;
  Engine* engine;
  httplib::Server server;

  Impl(Store& s, Engine* e) : store(s), engine(e) { routes(); }

  // Wraps a handler so library errors map onto status codes.
  template <typename F>
  httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
      try {
        f(req, res);
      } catch (const NotFound& e) {
        fail(res, 404, e.what());
      } catch (const Conflict& e) {
        fail(res, 409, e.what());
      } catch (const Busy& e) {
        fail(res, 409, e.what());
      } catch (const InvalidInput& e) {
        fail(res, 400, e.what());
      } catch (const ConfigError& e) {
        fail(res, 503, e.what());
      } catch (const std::exception& e) {
        fail(res, 500, e.what());
      }
    };
  }

  void routes() {
    server.Get("/api/items", guarded([this](const httplib::Request& req, httplib::Response& res) {
      std::optional<CandidateKind> kind;
      std::optional<ItemStatus> status;
      if (req.has_param("kind") && !req.get_param_value("kind").empty()) {
        kind = parse_candidate_kind(req.get_param_value("kind"));
        if (!kind) return fail(res, 400, "kind must be term, pattern or pair");
      }
      if (req.has_param("status") && !req.get_param_value("status").empty()) {
        status = parse_item_status(req.get_param_value("status"));
        if (!status) return fail(res, 400, "status must be pending, accepted or rejected");
      }
      reply(res, 200, items_json(store.list_items(kind, status)));
    }));

    server.Post(R"(/api/items/([^/]+)/decision)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const json body = json::parse(req.body, nullptr, false);
                  if (body.is_discarded() || !body.is_object()) {
                    return fail(res, 400, "body must be a JSON object");
                  }
                  const auto verdict = parse_item_status(body.value("verdict", ""));
                  if (!verdict || *verdict == ItemStatus::kPending) {
                    return fail(res, 400, "verdict must be accepted or rejected");
                  }
                  const std::string who = body.value("who", "");
                  if (who.empty()) return fail(res, 400, "who is required");
                  reply(res, 200, to_json(store.record_decision(req.matches[1], *verdict, who)));
                }));

    server.Post("/api/iterate", guarded([this](const httplib::Request&, httplib::Response& res) {
      const IterationSummary s = store.run_iteration(engine);
      reply(res, 200, json{{"new_candidates", s.new_candidates}, {"iteration", s.iteration}});
    }));

    server.Get("/api/status", guarded([this](const httplib::Request&, httplib::Response& res) {
      const StoreCounts c = store.counts();
      reply(res, 200,
            json{{"iteration", store.iteration()},
                 {"engine", engine ? json(engine->name()) : json(nullptr)},
                 {"counts", c.by_status},
                 {"kinds", c.by_kind}});
    }));
  }
};

ApiServer::ApiServer(Store& store, Engine* engine) : impl_(std::make_unique<Impl>(store, engine)) {}

ApiServer::~ApiServer() { stop(); }

bool ApiServer::mount_static(const std::filesystem::path& dir) {
  return impl_->server.set_mount_point("/", dir.string());
}

int ApiServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool ApiServer::listen() { return impl_->server.listen_after_bind(); }

void ApiServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

void ApiServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace term
