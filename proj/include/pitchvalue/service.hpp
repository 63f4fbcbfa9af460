#pragma once

#include "pitchvalue/artifacts.hpp"
#include "pitchvalue/highlights.hpp"

#include "json.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace pitchvalue {

struct HttpResponse {
    int status = 200;
    std::string body;  // JSON
};

using QueryParams = std::map<std::string, std::string>;

// Read-only answers for /value, /heatmap, /events, /highlights and /meta.
// Holds the model and highlight index immutably, so handle() may be called
// from any number of threads.
class Service {
public:
    explicit Service(ValueModel model, std::optional<HighlightIndex> highlights = std::nullopt);

    HttpResponse handle(std::string_view path, const QueryParams& params) const;

    // The JSON payloads behind each endpoint; they throw Error on bad input.
    nlohmann::json value(const QueryParams& params) const;
    nlohmann::json heatmap(const QueryParams& params) const;
    nlohmann::json events() const;
    nlohmann::json highlights(const QueryParams& params) const;
    nlohmann::json meta() const;

    const ValueModel& model() const { return model_; }

private:
    ValueModel model_;
    std::optional<HighlightIndex> highlights_;
};

// HTTP status class for a library error code.
int http_status(const std::string& error_code);

// Thin HTTP front end. bind() returns the bound port (pass 0 for any free
// port) and throws Error("io") if the address is unavailable.
class HttpServer {
public:
    explicit HttpServer(const Service& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    int bind(const std::string& host, int port);
    void run();   // blocks until stop()
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace pitchvalue
