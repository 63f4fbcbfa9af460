#include "pitchvalue/service.hpp"

#include "pitchvalue/error.hpp"

#include "httplib.h"

namespace pitchvalue {

namespace {

const std::string* find(const QueryParams& p, const char* key) {
    auto it = p.find(key);
    return it == p.end() ? nullptr : &it->second;
}

const std::string& require(const QueryParams& p, const char* key) {
    const std::string* v = find(p, key);
    if (!v) throw Error("query", std::string("missing parameter '") + key + "'");
    return *v;
}

int int_param(const QueryParams& p, const char* key, int fallback) {
    const std::string* v = find(p, key);
    if (!v) return fallback;
    const double d = parse_number(*v, key);
    if (d != static_cast<int>(d)) throw Error("query", std::string("parameter '") + key + "' must be an integer");
    return static_cast<int>(d);
}

void read_score(const QueryParams& p, int& own, int& opp) {
    if (const std::string* s = find(p, "score")) {
        std::tie(own, opp) = parse_score(*s);
        return;
    }
    if (const std::string* s = find(p, "own")) own = parse_goals(*s, "own score");
    if (const std::string* s = find(p, "opp")) opp = parse_goals(*s, "opp score");
}

nlohmann::json error_body(const std::string& message) { return {{"error", message}}; }

}  // namespace

int http_status(const std::string& code) {
    if (code == "query" || code == "precondition" || code == "schema") return 400;
    if (code == "not_found") return 404;
    return 500;
}

Service::Service(ValueModel model, std::optional<HighlightIndex> highlights)
    : model_(std::move(model)), highlights_(std::move(highlights)) {}

nlohmann::json Service::value(const QueryParams& p) const {
    const auto& schema = model_.schema;
    StateFeature x;
    x.e = require_event_type(require(p, "event"));
    x.t = parse_number(require(p, "t"), "t");
    x.l.x = parse_number(require(p, "x"), "x");
    x.l.y = parse_number(require(p, "y"), "y");
    read_score(p, x.own, x.opp);
    if (const std::string* s = find(p, "side")) x.h = require_side(*s);
    if (x.t < 0.0 || x.t > schema.half_length) throw Error("query", "t outside the half");
    if (x.l.x < 0.0 || x.l.x > schema.pitch.length || x.l.y < 0.0 || x.l.y > schema.pitch.width) {
        throw Error("query", "position outside the pitch");
    }
    return {{"value", point_value(model_.model(), x, schema)}};
}

nlohmann::json Service::heatmap(const QueryParams& p) const {
    BoardQuery q;
    q.e = require_event_type(require(p, "event"));
    q.t = parse_number(require(p, "t"), "t");
    read_score(p, q.own, q.opp);
    if (const std::string* s = find(p, "side")) q.h = require_side(*s);
    q.nx = int_param(p, "nx", q.nx);
    q.ny = int_param(p, "ny", q.ny);
    try {
        q.validate(model_.schema);
    } catch (const Error& e) {
        throw Error("query", e.what());
    }
    return grid_to_json(evaluate_grid(model_.model(), q, model_.schema));
}

nlohmann::json Service::events() const {
    nlohmann::json list = nlohmann::json::array();
    for (auto e : model_.schema.event_types)
        list.push_back({{"code", std::string(event_type_code(e))},
                        {"description", std::string(event_type_description(e))}});
    return {{"event_types", list}};
}

nlohmann::json Service::highlights(const QueryParams& p) const {
    if (!highlights_) throw Error("not_found", "service was started without match data");
    const std::string& match = require(p, "match");
    auto it = highlights_->find(match);
    if (it == highlights_->end()) throw Error("not_found", "unknown match " + match);
    nlohmann::json periods = nlohmann::json::array();
    for (const auto& half : it->second) {
        for (std::size_t i = 0; i < half.covariance.size(); ++i) {
            const auto& pd = half.covariance[i];
            periods.push_back({{"half", half.half_id},
                               {"rank", i + 1},
                               {"peak_t", pd.peak_t},
                               {"start", pd.start},
                               {"end", pd.end},
                               {"score", pd.score}});
        }
    }
    return {{"match", match}, {"periods", periods}};
}

nlohmann::json Service::meta() const {
    nlohmann::json training = model_.meta();
    training.erase("schema");
    return {{"schema_hash", model_.schema.hash()},
            {"gamma", model_.meta().value("gamma", 1.0)},
            {"schema", model_.meta().at("schema")},
            {"training", training}};
}

HttpResponse Service::handle(std::string_view path, const QueryParams& params) const {
    try {
        nlohmann::json body;
        if (path == "/value") body = value(params);
        else if (path == "/heatmap") body = heatmap(params);
        else if (path == "/events") body = events();
        else if (path == "/highlights") body = highlights(params);
        else if (path == "/meta") body = meta();
        else return {404, error_body("no such endpoint: " + std::string(path)).dump()};
        return {200, body.dump()};
    } catch (const Error& e) {
        return {http_status(e.code()), error_body(e.what()).dump()};
    } catch (const std::exception& e) {
        return {500, error_body(e.what()).dump()};
    }
}

struct HttpServer::Impl {
    const Service& service;
    httplib::Server server;
    explicit Impl(const Service& s) : service(s) {}
};

HttpServer::HttpServer(const Service& service) : impl_(std::make_unique<Impl>(service)) {
    // httplib defaults to SO_REUSEPORT, which lets a second server share a
    // busy port silently. SO_REUSEADDR alone still allows quick restarts.
    impl_->server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    impl_->server.Get(R"(/[a-z]*)", [this](const httplib::Request& req, httplib::Response& res) {
        QueryParams params;
        // Repeated keys keep their first value.
        for (const auto& [k, v] : req.params) params.emplace(k, v);
        const HttpResponse r = impl_->service.handle(req.path, params);
        res.status = r.status;
        res.set_content(r.body, "application/json");
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw Error("io", "cannot bind " + host + ":" + std::to_string(port) + " (address in use?)");
    return bound;
}

void HttpServer::run() {
    if (!impl_->server.listen_after_bind()) throw Error("io", "service stopped unexpectedly");
}

void HttpServer::stop() {
    if (impl_->server.is_running()) impl_->server.stop();
}

}  // namespace pitchvalue
