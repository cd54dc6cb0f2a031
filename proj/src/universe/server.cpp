#include <httplib.h>

#include "richstate/universe/universe.hpp"

namespace richstate {

using nlohmann::json;

struct UniverseServer::Impl {
    Universe& universe;
    httplib::Server server;

    explicit Impl(Universe& u) : universe(u) {}

    static void reply(httplib::Response& res, int status, const json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    static std::string employee_of(const httplib::Request& req) {
        auto id = req.get_header_value("X-Employee-Id");
        if (id.empty()) throw Error(ErrorKind::identity, "missing X-Employee-Id header");
        return id;
    }

    static json body_of(const httplib::Request& req) {
        if (req.body.empty()) return json::object();
        try {
            return json::parse(req.body);
        } catch (const json::exception& e) {
            throw Error(ErrorKind::validation, std::string("malformed JSON body: ") + e.what());
        }
    }

    /// Wraps a handler so domain errors become JSON error responses.
    template <class F>
    httplib::Server::Handler guard(F handler) {
        return [this, handler](const httplib::Request& req, httplib::Response& res) {
            try {
                reply(res, 200, handler(req));
            } catch (const Error& e) {
                json body{{"error", to_string(e.kind())}, {"message", e.what()}};
                if (e.kind() == ErrorKind::infeasible) {
                    try {
                        body["alternatives"] = universe.alternatives(employee_of(req));
                    } catch (const Error&) {
                    }
                }
                const bool missing_header = e.kind() == ErrorKind::identity &&
                                            req.get_header_value("X-Employee-Id").empty();
                reply(res, missing_header ? 400 : http_status(e.kind()), body);
            }
        };
    }

    void routes() {
        auto& u = universe;
        server.Get("/status", guard([&u](const httplib::Request&) { return u.status(); }));
        server.Get("/users", guard([&u](const httplib::Request& req) {
            std::optional<Pool> pool;
            if (req.has_param("pool")) {
                pool = parse_pool(req.get_param_value("pool"));
                if (!pool) throw Error(ErrorKind::validation, "pool must be claimed, unclaimed or bot");
            }
            return u.users(pool);
        }));
        server.Post(R"(/users/([^/]+)/claim)", guard([&u](const httplib::Request& req) {
            return u.claim(req.matches[1], employee_of(req));
        }));
        server.Post(R"(/users/([^/]+)/release)", guard([&u](const httplib::Request& req) {
            return u.release(req.matches[1], employee_of(req));
        }));
        server.Post(R"(/users/([^/]+)/freeze)", guard([&u](const httplib::Request& req) {
            const json body = body_of(req);
            return u.set_frozen(req.matches[1], employee_of(req), body.value("frozen", true));
        }));
        server.Post(R"(/users/([^/]+)/control)", guard([&u](const httplib::Request& req) {
            return u.control(req.matches[1], employee_of(req));
        }));
        server.Put(R"(/users/([^/]+)/persona)", guard([&u](const httplib::Request& req) {
            return u.update_persona(req.matches[1], employee_of(req), body_of(req));
        }));
        server.Put(R"(/users/([^/]+)/interests)", guard([&u](const httplib::Request& req) {
            return u.update_interests(req.matches[1], employee_of(req), body_of(req));
        }));
        server.Get("/session", guard([&u](const httplib::Request& req) {
            return u.session(employee_of(req));
        }));
        server.Post("/session/switch", guard([&u](const httplib::Request& req) {
            const json body = body_of(req);
            if (!body.contains("target") || !body["target"].is_string()) {
                throw Error(ErrorKind::validation, "body needs target: personal or primary");
            }
            return u.switch_profile(employee_of(req), body["target"].get<std::string>());
        }));
        server.Get("/feed", guard([&u](const httplib::Request& req) {
            std::size_t limit = 20;
            if (req.has_param("limit")) {
                try {
                    limit = std::stoul(req.get_param_value("limit"));
                } catch (const std::exception&) {
                    throw Error(ErrorKind::validation, "limit must be a number");
                }
            }
            return u.feed(employee_of(req), limit);
        }));
        server.Get("/threads", guard([&u](const httplib::Request& req) {
            return u.threads(employee_of(req));
        }));
        server.Post("/act", guard([&u](const httplib::Request& req) {
            return u.act(employee_of(req), body_of(req));
        }));
        server.Post("/admin/evolve", guard([&u](const httplib::Request&) { return u.evolve(); }));
        server.Post("/admin/maintain", guard([&u](const httplib::Request&) { return u.maintain(); }));
        server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (res.body.empty()) {
                reply(res, res.status, json{{"error", "not_found"}, {"message", "no such route"}});
            }
        });
    }
};

UniverseServer::UniverseServer(Universe& universe) : impl_(std::make_unique<Impl>(universe)) {
    impl_->routes();
}

UniverseServer::~UniverseServer() { stop(); }

int UniverseServer::bind(const std::string& host, int port) {
    int bound = -1;
    if (port == 0) {
        bound = impl_->server.bind_to_any_port(host);
    } else if (impl_->server.bind_to_port(host, port)) {
        bound = port;
    }
    if (bound < 0) {
        throw Error(ErrorKind::io, "cannot bind " + host + ":" + std::to_string(port));
    }
    return bound;
}

void UniverseServer::listen() { impl_->server.listen_after_bind(); }

void UniverseServer::stop() {
    if (impl_) impl_->server.stop();
}

}  // namespace richstate
