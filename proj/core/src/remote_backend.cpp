#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <regex>

#include "dpscan/chat.hpp"
#include "dpscan/errors.hpp"

namespace dpscan {

namespace {

struct Url {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Url split_url(const std::string& url) {
    static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(url, m, re)) {
        throw ConfigError("model endpoint must be an http(s) URL, got '" + url + "'");
    }
    return {m[1].str(), m[2].matched ? m[2].str() : std::string("/")};
}

}  // namespace

RemoteChatBackend::RemoteChatBackend(std::string endpoint, std::string api_key, std::string model)
    : endpoint_(std::move(endpoint)), api_key_(std::move(api_key)), model_(std::move(model)) {
    split_url(endpoint_);
}

std::unique_ptr<RemoteChatBackend> RemoteChatBackend::from_env() {
    const char* endpoint = std::getenv("MODEL_ENDPOINT");
    if (endpoint == nullptr || *endpoint == '\0') {
        throw ConfigError("MODEL_ENDPOINT is not set");
    }
    const char* key = std::getenv("MODEL_API_KEY");
    const char* model = std::getenv("MODEL_NAME");
    return std::make_unique<RemoteChatBackend>(endpoint, key ? key : "", model ? model : "");
}

std::string RemoteChatBackend::complete(const ChatRequest& request) {
    const Url url = split_url(endpoint_);
    nlohmann::json body = {
        {"messages",
         nlohmann::json::array({{{"role", "system"}, {"content", request.system}},
                                {{"role", "user"}, {"content", request.user}}})},
        {"temperature", request.params.temperature},
        {"top_p", request.params.top_p},
        {"max_tokens", request.params.max_output_tokens},
    };
    if (!model_.empty()) body["model"] = model_;

    httplib::Client client(url.origin);
    client.set_connection_timeout(10);
    client.set_read_timeout(300);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto res = client.Post(url.path, headers, body.dump(), "application/json");
    if (!res) throw BackendError(id(), "request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) {
        throw BackendError(id(), "HTTP " + std::to_string(res->status) + ": " +
                                     res->body.substr(0, 200));
    }
    try {
        const auto reply = nlohmann::json::parse(res->body);
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw BackendError(id(), std::string("malformed reply: ") + e.what());
    }
}

}  // namespace dpscan
