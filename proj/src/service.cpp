#include "varkit/service.hpp"

#include "varkit/error.hpp"
#include "varkit/model_io.hpp"
#include "varkit/product.hpp"

#include <httplib.h>

#include <array>
#include <random>
#include <sstream>

namespace varkit::service {

namespace {

Json ref_list(const std::vector<Ref>& refs)
{
    Json out = Json::array();
    for (const auto& ref : refs)
        out.push_back(ref.id);
    return out;
}

Json error_body(const Error& e)
{
    return Json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}};
}

Json error_body(std::string_view code, const std::string& message)
{
    return Json{{"error", std::string(code)}, {"message", message}};
}

int status_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::ParseError:
    case ErrorCode::MissingAttribute:
    case ErrorCode::UnknownElement:
    case ErrorCode::DuplicateElementId:
    case ErrorCode::DanglingEdge:
    case ErrorCode::DuplicateAnswer:
        return 400;
    case ErrorCode::NotFound:
    case ErrorCode::RefNotInModel:
    case ErrorCode::NoSuchAnswer:
        return 404;
    case ErrorCode::ArityViolation:
    case ErrorCode::MandatoryExclusion:
    case ErrorCode::IncompleteConfiguration:
        return 409;
    case ErrorCode::UnknownArea:
    case ErrorCode::UnresolvedTag:
    case ErrorCode::NarrowToEmpty:
    case ErrorCode::ScopeTooLarge:
        return 422;
    }
    return 400;
}

// Arity and mandatory violations are answer rejections: report them in the
// same shape as propagation conflicts so clients need one code path.
Response rejection(const Error& e, const std::string& variant)
{
    Json conflict{{"ref", variant},
                  {"code", std::string(to_string(e.code()))},
                  {"forced_by", ""},
                  {"excluded_by", ""},
                  {"message", e.what()}};
    return {409, Json{{"conflicts", Json::array({conflict})}}};
}

std::vector<std::string> split_path(std::string_view path)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= path.size()) {
        auto end = path.find('/', start);
        if (end == std::string_view::npos)
            end = path.size();
        if (end > start)
            parts.emplace_back(path.substr(start, end - start));
        start = end + 1;
    }
    return parts;
}

Json parse_json_object(std::string_view body)
{
    Json parsed = Json::parse(body.begin(), body.end(), nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object())
        throw Error(ErrorCode::ParseError, "request body must be a JSON object");
    return parsed;
}

Json pending_json(const ConfigurationSession& session)
{
    Json out = Json::array();
    for (const auto& decision : session.pending_decisions())
        out.push_back(to_json(decision));
    return out;
}

Json edge_json(const ProductEdge& edge)
{
    Json out{{"from", edge.from}, {"to", edge.to}};
    if (edge.label)
        out["label"] = *edge.label;
    return out;
}

} // namespace

Json to_json(const PendingDecision& decision)
{
    Json options = Json::array();
    for (const auto& option : decision.row.options)
        options.push_back({{"id", option.id}, {"name", option.name}});
    return Json{{"trace", decision.row.trace},
                {"question", decision.row.question},
                {"relation", std::string(to_string(decision.row.relation))},
                {"guard", decision.row.guard},
                {"after", decision.row.after},
                {"options", options},
                {"blocked", decision.blocked},
                {"unmet", decision.unmet}};
}

Json to_json(const Conflict& conflict)
{
    return Json{{"ref", conflict.ref},
                {"code", conflict.code},
                {"forced_by", conflict.forced_by},
                {"excluded_by", conflict.excluded_by},
                {"message", conflict.message}};
}

Json to_json(const VariabilityModel& scope, const Configuration& configuration)
{
    Json selections = Json::array();
    for (const auto& variant : scope.variants) {
        auto found = configuration.selected.find(variant.id);
        if (found == configuration.selected.end())
            continue;
        Json values = Json::array();
        for (const auto& value : variant.values)
            if (found->second.count(value.id))
                values.push_back(value.id);
        selections.push_back({{"variant", variant.id}, {"values", values}});
    }
    return Json{{"area", configuration.area}, {"selections", selections}};
}

Json to_json(const ValidationReport& report)
{
    auto list = [](const std::vector<Finding>& findings) {
        Json out = Json::array();
        for (const auto& f : findings)
            out.push_back({{"code", f.code}, {"location", f.location}, {"message", f.message}});
        return out;
    };
    return Json{{"valid", report.valid()}, {"errors", list(report.errors)}, {"warnings", list(report.warnings)}};
}

Json session_state_json(const std::string& session_id, const std::string& model_id,
                        const ConfigurationSession& session)
{
    const auto& scope = session.scope();
    const auto& state = session.state();
    Json variants = Json::array();
    for (std::size_t i = 0; i < scope.variants.size(); ++i) {
        const auto& variant = scope.variants[i];
        Json values = Json::array();
        for (std::size_t k = 0; k < variant.values.size(); ++k)
            values.push_back({{"id", variant.values[k].id},
                              {"name", variant.values[k].name},
                              {"state", std::string(to_string(state.values[i][k]))}});
        variants.push_back({{"id", variant.id},
                            {"name", variant.name},
                            {"relation", std::string(to_string(variant.relation))},
                            {"mandatory", variant.mandatory},
                            {"status", std::string(to_string(state.variants[i]))},
                            {"settled", session.settled(i)},
                            {"values", values}});
    }
    Json log = Json::array();
    for (const auto& entry : session.log())
        log.push_back({{"variant", entry.variant}, {"values", entry.values}});
    auto status = session.current_configuration();
    Json conflicts = Json::array();
    for (const auto& conflict : session.inherent_conflicts())
        conflicts.push_back(to_json(conflict));
    return Json{{"session_id", session_id},
                {"model_id", model_id},
                {"area", session.area()},
                {"variants", variants},
                {"pending", pending_json(session)},
                {"complete", status.complete()},
                {"undecided", status.undecided},
                {"log", log},
                {"inherent_conflicts", conflicts}};
}

// ---------------------------------------------------------------------------

ConfigService::ConfigService(ServiceOptions options) : options_(std::move(options)) {}

std::string ConfigService::register_model(VariabilityModel model, std::string preferred_id)
{
    std::unique_lock lock(models_mutex_);
    std::string id = preferred_id;
    if (id.empty() || models_.count(id)) {
        do {
            id = (preferred_id.empty() ? "model-" : preferred_id + "-") + std::to_string(next_model_++);
        } while (models_.count(id));
    }
    models_.emplace(id, std::make_shared<const VariabilityModel>(std::move(model)));
    return id;
}

std::vector<std::string> ConfigService::load_model_dir(const std::filesystem::path& dir)
{
    std::vector<std::string> problems;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && name.size() > 8 && name.ends_with(".vml.xml"))
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        const auto name = file.filename().string();
        try {
            auto model = parse_model(read_file(file));
            auto report = validate_model(model);
            if (!report.valid()) {
                problems.push_back(name + ": " + std::to_string(report.errors.size()) + " validation errors");
                continue;
            }
            register_model(std::move(model), name.substr(0, name.size() - 8));
        } catch (const Error& e) {
            problems.push_back(name + ": " + e.what());
        }
    }
    return problems;
}

std::shared_ptr<const VariabilityModel> ConfigService::find_model(const std::string& model_id) const
{
    std::shared_lock lock(models_mutex_);
    auto it = models_.find(model_id);
    return it == models_.end() ? nullptr : it->second;
}

std::string ConfigService::fresh_session_id()
{
    std::random_device entropy;
    std::array<std::uint32_t, 4> words{};
    for (auto& word : words)
        word = entropy();
    std::ostringstream out;
    out << std::hex;
    for (auto word : words) {
        out.width(8);
        out.fill('0');
        out << word;
    }
    return out.str();
}

std::shared_ptr<SessionRecord> ConfigService::find_session(const std::string& session_id, Response& failure)
{
    std::shared_ptr<SessionRecord> record;
    {
        std::lock_guard lock(sessions_mutex_);
        auto it = sessions_.find(session_id);
        if (it != sessions_.end())
            record = it->second;
    }
    if (!record) {
        failure = {404, error_body("NOT_FOUND", "unknown session '" + session_id + "'")};
        return nullptr;
    }
    std::lock_guard lock(record->guard);
    auto now = options_.now();
    if (now - record->updated > options_.idle_timeout) {
        failure = {410, error_body("SESSION_EXPIRED", "session '" + session_id + "' expired")};
        return nullptr;
    }
    record->updated = now;
    return record;
}

Response ConfigService::handle(std::string_view method, std::string_view target, std::string_view body)
{
    std::string_view path = target;
    std::string_view query;
    if (auto q = target.find('?'); q != std::string_view::npos) {
        path = target.substr(0, q);
        query = target.substr(q + 1);
    }
    const auto parts = split_path(path);
    const auto n = parts.size();

    try {
        if (n >= 1 && parts[0] == "models") {
            if (n == 1 && method == "POST")
                return post_model(body);
            if (n == 1 && method == "GET")
                return list_models();
            if (n == 3 && parts[2] == "areas" && method == "GET")
                return get_areas(parts[1]);
        } else if (n >= 1 && parts[0] == "sessions") {
            if (n == 1 && method == "POST")
                return post_session(body);
            if (n == 2 && method == "GET")
                return get_session(parts[1]);
            if (n == 3 && parts[2] == "answers" && method == "POST")
                return post_answer(parts[1], body);
            if (n == 4 && parts[2] == "answers" && method == "DELETE")
                return delete_answer(parts[1], parts[3]);
            if (n == 3 && parts[2] == "configuration" && method == "GET")
                return get_configuration(parts[1]);
            if (n == 3 && parts[2] == "product" && method == "POST")
                return post_product(parts[1], body, query.find("force=true") != std::string_view::npos);
        }
        return {404, error_body("NOT_FOUND", "no route for " + std::string(method) + " " + std::string(path))};
    } catch (const Error& e) {
        return {status_for(e.code()), error_body(e)};
    } catch (const std::exception& e) {
        return {400, error_body("BAD_REQUEST", e.what())};
    }
}

Response ConfigService::post_model(std::string_view body)
{
    auto model = parse_model(body);
    auto report = validate_model(model);
    if (!report.valid())
        return {422, to_json(report)};
    auto id = register_model(std::move(model));
    return {201, Json{{"model_id", id}}};
}

Response ConfigService::list_models()
{
    std::shared_lock lock(models_mutex_);
    Json out = Json::array();
    for (const auto& [id, model] : models_)
        out.push_back({{"model_id", id}, {"name", model->name}});
    return {200, Json{{"models", out}}};
}

Response ConfigService::get_areas(const std::string& model_id)
{
    auto model = find_model(model_id);
    if (!model)
        return {404, error_body("NOT_FOUND", "unknown model '" + model_id + "'")};
    return {200, Json{{"model_id", model_id}, {"areas", model->areas}}};
}

Response ConfigService::post_session(std::string_view body)
{
    auto request = parse_json_object(body);
    if (!request.contains("model_id") || !request["model_id"].is_string() || !request.contains("area") ||
        !request["area"].is_string())
        throw Error(ErrorCode::ParseError, "expected {\"model_id\": string, \"area\": string}");
    auto model_id = request["model_id"].get<std::string>();
    auto model = find_model(model_id);
    if (!model)
        return {404, error_body("NOT_FOUND", "unknown model '" + model_id + "'")};

    ConfigurationSession session(*model, request["area"].get<std::string>());
    auto now = options_.now();
    std::shared_ptr<SessionRecord> record;
    {
        std::lock_guard lock(sessions_mutex_);
        // Drop long-dead records; recently expired ones stay to answer 410.
        for (auto it = sessions_.begin(); it != sessions_.end();) {
            std::unique_lock record_lock(it->second->guard, std::try_to_lock);
            bool dead = record_lock.owns_lock() && now - it->second->updated > 2 * options_.idle_timeout;
            record_lock = {};
            it = dead ? sessions_.erase(it) : std::next(it);
        }
        std::string id;
        do {
            id = fresh_session_id();
        } while (sessions_.count(id));
        record = std::make_shared<SessionRecord>(id, model_id, std::move(session), now);
        sessions_.emplace(id, record);
    }
    std::lock_guard lock(record->guard);
    auto state = session_state_json(record->session_id, model_id, record->session);
    Json body_out{{"session_id", record->session_id}, {"pending", state["pending"]}, {"states", state["variants"]}};
    return {201, body_out};
}

Response ConfigService::get_session(const std::string& session_id)
{
    Response failure;
    auto record = find_session(session_id, failure);
    if (!record)
        return failure;
    std::lock_guard lock(record->guard);
    return {200, session_state_json(record->session_id, record->model_id, record->session)};
}

Response ConfigService::post_answer(const std::string& session_id, std::string_view body)
{
    auto request = parse_json_object(body);
    if (!request.contains("variant") || !request["variant"].is_string())
        throw Error(ErrorCode::ParseError, "expected {\"variant\": string, \"values\": [string]}");
    std::vector<std::string> values;
    if (request.contains("values")) {
        if (!request["values"].is_array())
            throw Error(ErrorCode::ParseError, "'values' must be an array of strings");
        for (const auto& value : request["values"]) {
            if (!value.is_string())
                throw Error(ErrorCode::ParseError, "'values' must be an array of strings");
            values.push_back(value.get<std::string>());
        }
    }
    const auto variant = normalize_tag(request["variant"].get<std::string>());

    Response failure;
    auto record = find_session(session_id, failure);
    if (!record)
        return failure;
    std::lock_guard lock(record->guard);
    PropagationOutcome outcome;
    try {
        outcome = record->session.answer(variant, values);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ArityViolation || e.code() == ErrorCode::MandatoryExclusion)
            return rejection(e, variant);
        throw;
    }
    if (!outcome.accepted()) {
        Json conflicts = Json::array();
        for (const auto& conflict : outcome.conflicts)
            conflicts.push_back(to_json(conflict));
        return {409, Json{{"conflicts", conflicts}}};
    }
    return {200, Json{{"forced", ref_list(outcome.forced)},
                      {"excluded", ref_list(outcome.excluded)},
                      {"pending", pending_json(record->session)},
                      {"complete", record->session.current_configuration().complete()}}};
}

Response ConfigService::delete_answer(const std::string& session_id, const std::string& variant)
{
    Response failure;
    auto record = find_session(session_id, failure);
    if (!record)
        return failure;
    std::lock_guard lock(record->guard);
    auto outcome = record->session.retract(normalize_tag(variant));
    auto state = session_state_json(record->session_id, record->model_id, record->session);
    state["released"] = ref_list(outcome.released);
    return {200, state};
}

Response ConfigService::get_configuration(const std::string& session_id)
{
    Response failure;
    auto record = find_session(session_id, failure);
    if (!record)
        return failure;
    std::lock_guard lock(record->guard);
    auto status = record->session.current_configuration();
    if (!status.complete()) {
        Json conflicts = Json::array();
        for (const auto& conflict : status.conflicts)
            conflicts.push_back(to_json(conflict));
        return {409, Json{{"undecided", status.undecided}, {"conflicts", conflicts}}};
    }
    return {200, to_json(record->session.scope(), *status.configuration)};
}

Response ConfigService::post_product(const std::string& session_id, std::string_view body, bool force)
{
    Response failure;
    auto record = find_session(session_id, failure);
    if (!record)
        return failure;
    auto family = find_model(record->model_id);
    std::lock_guard lock(record->guard);
    auto status = record->session.current_configuration();
    if (!status.complete())
        return {409, Json{{"undecided", status.undecided}}};
    auto product = parse_product_model(body);
    auto derivation = derive_customized_product(*family, product, *status.configuration, {force});

    Json removed = Json::array();
    for (const auto& element : derivation.report.removed) {
        Json edges = Json::array();
        for (const auto& edge : element.edges)
            edges.push_back(edge_json(edge));
        removed.push_back({{"id", element.id}, {"tag", element.tag ? element.tag->id : ""}, {"edges", edges}});
    }
    Json dangling = Json::array();
    for (const auto& end : derivation.report.dangling)
        dangling.push_back({{"element", end.element}, {"edge", edge_json(end.edge)}, {"outgoing", end.outgoing}});
    Json retained = Json::array();
    for (const auto& element : derivation.product.elements)
        retained.push_back(element.id);
    return {200, Json{{"product", write_product_model(derivation.product)},
                      {"retained", retained},
                      {"removal", {{"removed", removed}, {"dangling", dangling}, {"warnings", derivation.report.warnings}}}}};
}

// ---------------------------------------------------------------------------

struct HttpFrontend::Impl {
    ConfigService& service;
    httplib::Server server;

    explicit Impl(ConfigService& s) : service(s) {}

    void dispatch(const httplib::Request& request, httplib::Response& response)
    {
        std::string target = request.path;
        if (request.has_param("force"))
            target += "?force=" + request.get_param_value("force");
        auto result = service.handle(request.method, target, request.body);
        response.status = result.status;
        response.set_content(result.body.dump(), "application/json; charset=utf-8");
    }
};

HttpFrontend::HttpFrontend(ConfigService& service, std::filesystem::path static_dir)
    : impl_(std::make_unique<Impl>(service))
{
    auto handler = [this](const httplib::Request& request, httplib::Response& response) {
        impl_->dispatch(request, response);
    };
    for (const char* pattern : {R"(/models.*)", R"(/sessions.*)"}) {
        impl_->server.Get(pattern, handler);
        impl_->server.Post(pattern, handler);
        impl_->server.Delete(pattern, handler);
    }
    if (!static_dir.empty())
        impl_->server.set_mount_point("/", static_dir.string());
}

HttpFrontend::~HttpFrontend() { stop(); }

int HttpFrontend::bind(const std::string& host, int port)
{
    if (port == 0)
        return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpFrontend::listen() { return impl_->server.listen_after_bind(); }

void HttpFrontend::stop()
{
    if (impl_ && impl_->server.is_running())
        impl_->server.stop();
}

} // namespace varkit::service
