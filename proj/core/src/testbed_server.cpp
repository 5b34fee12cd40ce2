#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "toyaudit/errors.hpp"
#include "toyaudit/testbed_server.hpp"
#include "toyaudit/token_space.hpp"

namespace toyaudit {

namespace {

using json = nlohmann::json;

void reply_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

}  // namespace

struct TestbedServer::Impl {
    explicit Impl(TestbedConfig cfg) : config(std::move(cfg)), rng(config.rng_seed) {
        validate_testbed_config(config);
        space = TokenSpace{config.alphabet, config.prefix_len, config.suffix_len};
        const std::size_t colon = config.listen_address.rfind(':');
        if (colon == std::string::npos)
            throw InvalidConfig("listen_address must be host:port");
        host = config.listen_address.substr(0, colon);
        try {
            requested_port = std::stoi(config.listen_address.substr(colon + 1));
        } catch (const std::exception&) {
            throw InvalidConfig("bad port in listen_address");
        }

        for (const auto& user : config.planted_users) {
            users[user.user_id] = user;
            photos[user.photo_token] = PhotoEntry{user.photo_bytes, user.user_id};
            sessions[user.auth_token] = Session{user.user_id, now()};
            current_auth[user.user_id] = user.auth_token;
            current_photo[user.user_id] = user.photo_token;
        }
        register_routes();
    }

    struct PhotoEntry {
        std::string bytes;
        std::string owner;
    };
    struct Session {
        std::string user_id;
        std::chrono::steady_clock::time_point issued;
    };

    static std::chrono::steady_clock::time_point now() {
        return std::chrono::steady_clock::now();
    }

    bool session_valid(const std::string& token) {
        auto it = sessions.find(token);
        if (it == sessions.end()) return false;
        if (config.toggles.token_reuse) return true;  // never expires
        const auto age = std::chrono::duration_cast<std::chrono::seconds>(now() - it->second.issued);
        return age.count() < config.token_ttl_seconds;
    }

    std::string issue_session(const std::string& user_id) {
        std::string token = "s-";
        static const char* hex = "0123456789abcdef";
        for (int i = 0; i < 24; ++i) token.push_back(hex[rng() & 0xF]);
        sessions[token] = Session{user_id, now()};
        current_auth[user_id] = token;
        return token;
    }

    std::string sample_new_token() {
        const std::uint64_t universe = total_universe(space);
        std::uniform_int_distribution<std::uint64_t> pick(0, universe - 1);
        for (;;) {
            const std::string token =
                index_to_string(space, pick(rng), space.prefix_len + space.suffix_len);
            if (!photos.count(token) && !retired.count(token)) return token;
        }
    }

    std::string do_overwrite(const std::string& user_id, const std::string& bytes) {
        auto user_it = users.find(user_id);
        if (user_it == users.end()) throw UnknownUser("no such user: " + user_id);
        const std::string old_token = current_photo.count(user_id) ? current_photo[user_id] : "";
        const std::string token = sample_new_token();
        photos[token] = PhotoEntry{bytes, user_id};
        current_photo[user_id] = token;
        if (!old_token.empty()) {
            if (!config.toggles.retain_old_photos) photos.erase(old_token);
            retired.insert(old_token);
        }
        return token;
    }

    void register_routes() {
        svr.set_pre_routing_handler([this](const httplib::Request&, httplib::Response&) {
            requests.fetch_add(1);
            return httplib::Server::HandlerResponse::Unhandled;
        });

        svr.Get("/health", [](const httplib::Request&, httplib::Response& res) {
            reply_json(res, 200, json{{"status", "ok"}});
        });

        svr.Post("/api/account", [this](const httplib::Request& req, httplib::Response& res) {
            json body = json::parse(req.body, nullptr, false);
            if (body.is_discarded() || !body.is_object()) {
                reply_json(res, 400, json{{"error", "body must be a JSON object"}});
                return;
            }
            for (const char* field : {"name", "gender", "birthday"}) {
                if (!body.contains(field) || !body[field].is_string()) {
                    reply_json(res, 400, json{{"error", std::string("missing field: ") + field}});
                    return;
                }
            }
            for (const char* field : {"weight_kg", "height_cm", "age_years"}) {
                if (!body.contains(field) || !body[field].is_number()) {
                    reply_json(res, 400, json{{"error", std::string("missing field: ") + field}});
                    return;
                }
            }
            int goal = 0;
            try {
                goal = compute_hydration_goal(body["age_years"].get<int>(),
                                              body["weight_kg"].get<double>(),
                                              body["height_cm"].get<double>());
            } catch (const NonPositiveInput& e) {
                reply_json(res, 400, json{{"error", e.what()}});
                return;
            }
            std::lock_guard<std::mutex> lock(mutex);
            UserRecord user;
            user.user_id = "u-" + std::to_string(1000 + users.size());
            user.name = body["name"].get<std::string>();
            user.gender = body["gender"].get<std::string>();
            user.birthday = body["birthday"].get<std::string>();
            user.weight_kg = body["weight_kg"].get<double>();
            user.height_cm = body["height_cm"].get<double>();
            user.age_years = body["age_years"].get<int>();
            users[user.user_id] = user;
            const std::string token = issue_session(user.user_id);
            reply_json(res, 200,
                       json{{"user_id", user.user_id}, {"auth_token", token}, {"goal_ml", goal}});
        });

        svr.Get(R"(/api/photo/([^/]+))", [this](const httplib::Request& req,
                                                httplib::Response& res) {
            const std::string prefix = req.matches[1];
            std::lock_guard<std::mutex> lock(mutex);
            bool valid = false;
            if (config.toggles.prefix_oracle &&
                prefix.size() == static_cast<std::size_t>(config.prefix_len)) {
                for (const auto& [token, entry] : photos) {
                    if (token.rfind(prefix, 0) == 0) {
                        valid = true;
                        break;
                    }
                }
            }
            if (valid) {
                res.status = config.oracle_valid_status;
                // points at the prefix directory, never at a full token
                res.set_header("Location", "/api/photo/" + prefix + "/");
                res.set_content("", "text/plain");
            } else {
                reply_json(res, config.oracle_invalid_status, json{{"error", "not found"}});
            }
        });

        svr.Get(R"(/api/photo/([^/]+)/([^/]+))", [this](const httplib::Request& req,
                                                        httplib::Response& res) {
            const std::string prefix = req.matches[1];
            const std::string token = req.matches[2];
            std::lock_guard<std::mutex> lock(mutex);
            if (prefix.size() != static_cast<std::size_t>(config.prefix_len) ||
                token.rfind(prefix, 0) != 0) {
                reply_json(res, 404, json{{"error", "not found"}});
                return;
            }
            auto it = photos.find(token);
            if (it == photos.end()) {
                reply_json(res, 404, json{{"error", "not found"}});
                return;
            }
            if (!config.toggles.no_auth_photos) {
                const std::string auth = req.get_header_value("X-Auth-Token");
                if (auth.empty() || !session_valid(auth)) {
                    reply_json(res, 401, json{{"error", "authentication required"}});
                    return;
                }
            }
            res.status = 200;
            res.set_content(it->second.bytes, "image/png");
        });

        svr.Post("/api/drink", [this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard<std::mutex> lock(mutex);
            const std::string auth = req.get_header_value("X-Auth-Token");
            if (auth.empty() || !session_valid(auth)) {
                reply_json(res, 401, json{{"error", "invalid or expired token"}});
                return;
            }
            json body = json::parse(req.body, nullptr, false);
            if (body.is_discarded() || !body.contains("ml") || !body["ml"].is_number_integer() ||
                body["ml"].get<int>() <= 0) {
                reply_json(res, 400, json{{"error", "body needs positive integer ml"}});
                return;
            }
            const std::string user_id = sessions[auth].user_id;
            drink_totals[user_id] += body["ml"].get<int>();
            reply_json(res, 200,
                       json{{"recorded_ml", body["ml"].get<int>()},
                            {"total_ml", drink_totals[user_id]}});
        });

        svr.Put(R"(/api/photo/([^/]+))", [this](const httplib::Request& req,
                                                httplib::Response& res) {
            const std::string user_id = req.matches[1];
            std::lock_guard<std::mutex> lock(mutex);
            auto it = users.find(user_id);
            if (it == users.end()) {
                reply_json(res, 404, json{{"error", "unknown user"}});
                return;
            }
            const std::string auth = req.get_header_value("X-Auth-Token");
            const bool owner_token =
                !auth.empty() && session_valid(auth) && sessions[auth].user_id == user_id;
            if (!owner_token) {
                reply_json(res, 401, json{{"error", "authentication required"}});
                return;
            }
            if (req.body.empty()) {
                reply_json(res, 400, json{{"error", "photo bytes required"}});
                return;
            }
            const std::string token = do_overwrite(user_id, req.body);
            reply_json(res, 200, json{{"token", token}});
        });

        svr.Post("/api/token/refresh", [this](const httplib::Request& req,
                                              httplib::Response& res) {
            std::lock_guard<std::mutex> lock(mutex);
            if (config.toggles.token_reuse) {
                // the sloppy variant never rotates anything
                reply_json(res, 404, json{{"error", "not found"}});
                return;
            }
            json body = json::parse(req.body, nullptr, false);
            if (body.is_discarded() || !body.contains("user_id") || !body.contains("auth_token")) {
                reply_json(res, 400, json{{"error", "body needs user_id and auth_token"}});
                return;
            }
            const std::string user_id = body["user_id"].get<std::string>();
            const std::string old_token = body["auth_token"].get<std::string>();
            auto cur = current_auth.find(user_id);
            if (cur == current_auth.end() || cur->second != old_token) {
                reply_json(res, 401, json{{"error", "unknown user or token"}});
                return;
            }
            sessions.erase(old_token);
            const std::string token = issue_session(user_id);
            reply_json(res, 200,
                       json{{"auth_token", token}, {"expires_in", config.token_ttl_seconds}});
        });
    }

    TestbedConfig config;
    TokenSpace space;
    std::string host;
    int requested_port{0};
    int bound_port{0};

    httplib::Server svr;
    std::thread listener;
    std::atomic<std::uint64_t> requests{0};

    std::mutex mutex;
    std::map<std::string, UserRecord> users;
    std::map<std::string, PhotoEntry> photos;        // retrievable tokens
    std::set<std::string> retired;                   // ever-used tokens, collision guard
    std::map<std::string, Session> sessions;
    std::map<std::string, std::string> current_auth;   // user -> newest session token
    std::map<std::string, std::string> current_photo;  // user -> newest photo token
    std::map<std::string, int> drink_totals;
    std::mt19937_64 rng;
};

TestbedServer::TestbedServer(TestbedConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

TestbedServer::~TestbedServer() {
    stop();
}

void TestbedServer::start() {
    if (impl_->listener.joinable()) return;
    // httplib's defaults include SO_REUSEPORT, which lets two servers share a
    // port; keep only SO_REUSEADDR so an occupied port fails loudly.
    impl_->svr.set_socket_options([](socket_t sock) {
        int yes = 1;
        ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<char*>(&yes), sizeof(yes));
    });
    if (impl_->requested_port == 0) {
        impl_->bound_port = impl_->svr.bind_to_any_port(impl_->host);
        if (impl_->bound_port <= 0)
            throw AddressInUse("cannot bind " + impl_->config.listen_address);
    } else {
        if (!impl_->svr.bind_to_port(impl_->host, impl_->requested_port))
            throw AddressInUse("cannot bind " + impl_->config.listen_address);
        impl_->bound_port = impl_->requested_port;
    }
    impl_->listener = std::thread([this] { impl_->svr.listen_after_bind(); });
    for (int i = 0; i < 200 && !impl_->svr.is_running(); ++i)
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
}

void TestbedServer::stop() {
    if (!impl_->listener.joinable()) return;
    impl_->svr.stop();
    impl_->listener.join();
}

int TestbedServer::port() const {
    return impl_->bound_port;
}

std::string TestbedServer::base_url() const {
    return "http://" + impl_->host + ":" + std::to_string(impl_->bound_port);
}

std::uint64_t TestbedServer::request_count() const {
    return impl_->requests.load();
}

const TestbedConfig& TestbedServer::config() const {
    return impl_->config;
}

std::string TestbedServer::overwrite_photo(const std::string& user_id,
                                           const std::string& new_photo) {
    std::lock_guard<std::mutex> lock(impl_->mutex);
    return impl_->do_overwrite(user_id, new_photo);
}

std::string TestbedServer::photo_url(const std::string& user_id) const {
    std::lock_guard<std::mutex> lock(impl_->mutex);
    auto it = impl_->current_photo.find(user_id);
    if (it == impl_->current_photo.end()) return "";
    const std::string& token = it->second;
    return "/api/photo/" + token.substr(0, static_cast<std::size_t>(impl_->config.prefix_len)) +
           "/" + token;
}

}  // namespace toyaudit
