#ifndef VARKIT_SERVICE_HPP
#define VARKIT_SERVICE_HPP

#include "varkit/core_model.hpp"
#include "varkit/session.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>

namespace varkit::service {

using Clock = std::chrono::steady_clock;
using Json = nlohmann::ordered_json;

struct Response {
    int status = 200;
    Json body;
};

struct ServiceOptions {
    std::chrono::seconds idle_timeout = std::chrono::hours(24);
    std::function<Clock::time_point()> now = [] { return Clock::now(); };
};

struct SessionRecord {
    SessionRecord(std::string id, std::string model, ConfigurationSession live, Clock::time_point at)
        : session_id(std::move(id)), model_id(std::move(model)), session(std::move(live)), created(at), updated(at)
    {
    }

    std::string session_id;
    std::string model_id;
    ConfigurationSession session;
    Clock::time_point created;
    Clock::time_point updated;
    std::mutex guard;  // serializes every access to `session`
};

/// Session-based configuration API. `handle` is transport independent;
/// HttpFrontend adapts it to real sockets. Many sessions may be driven in
/// parallel; requests against one session are serialized.
class ConfigService {
public:
    explicit ConfigService(ServiceOptions options = {});

    /// Registers a validated model. Returns its id (`preferred_id` when free).
    std::string register_model(VariabilityModel model, std::string preferred_id = {});

    /// Loads every `*.vml.xml` in `dir`; ids are the file names without the
    /// suffix. Invalid files are skipped and reported in the return value.
    std::vector<std::string> load_model_dir(const std::filesystem::path& dir);

    /// `target` is a path with an optional `?query`.
    Response handle(std::string_view method, std::string_view target, std::string_view body);

private:
    Response post_model(std::string_view body);
    Response get_areas(const std::string& model_id);
    Response list_models();
    Response post_session(std::string_view body);
    Response get_session(const std::string& session_id);
    Response post_answer(const std::string& session_id, std::string_view body);
    Response delete_answer(const std::string& session_id, const std::string& variant);
    Response get_configuration(const std::string& session_id);
    Response post_product(const std::string& session_id, std::string_view body, bool force);

    std::shared_ptr<const VariabilityModel> find_model(const std::string& model_id) const;

    /// Resolves and touches a live session, or produces the 404/410 response.
    std::shared_ptr<SessionRecord> find_session(const std::string& session_id, Response& failure);

    std::string fresh_session_id();

    ServiceOptions options_;

    mutable std::shared_mutex models_mutex_;
    std::map<std::string, std::shared_ptr<const VariabilityModel>> models_;
    std::size_t next_model_ = 1;

    std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<SessionRecord>> sessions_;
};

/// Exposes a ConfigService over HTTP.
class HttpFrontend {
public:
    explicit HttpFrontend(ConfigService& service, std::filesystem::path static_dir = {});
    ~HttpFrontend();

    HttpFrontend(const HttpFrontend&) = delete;
    HttpFrontend& operator=(const HttpFrontend&) = delete;

    /// Binds `host:port` (0 picks a free port) and returns the bound port, or -1.
    int bind(const std::string& host, int port);
    /// Blocks until stop() is called.
    bool listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// JSON encodings shared with the CLI.
Json to_json(const PendingDecision& decision);
Json to_json(const Conflict& conflict);
Json to_json(const VariabilityModel& scope, const Configuration& configuration);
Json to_json(const ValidationReport& report);
Json session_state_json(const std::string& session_id, const std::string& model_id,
                        const ConfigurationSession& session);

} // namespace varkit::service

#endif // VARKIT_SERVICE_HPP
