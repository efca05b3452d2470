#pragma once

#include <memory>
#include <semaphore>
#include <string>

namespace dpscan {

struct DecodingParams {
    double temperature = 0.0;
    double top_p = 0.1;
    int max_output_tokens = 8192;
};

struct ChatRequest {
    std::string system;
    std::string user;
    DecodingParams params;
};

/// A chat-completion style language model.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual std::string complete(const ChatRequest& request) = 0;
    virtual std::string id() const = 0;
    /// Deterministic for fixed input at temperature 0.
    virtual bool deterministic() const { return true; }
};

/// Caps the number of concurrent requests reaching the wrapped backend.
class InFlightLimiter final : public ChatBackend {
public:
    InFlightLimiter(std::shared_ptr<ChatBackend> inner, int max_in_flight);
    std::string complete(const ChatRequest& request) override;
    std::string id() const override { return inner_->id(); }
    bool deterministic() const override { return inner_->deterministic(); }

private:
    std::shared_ptr<ChatBackend> inner_;
    std::counting_semaphore<1024> slots_;
};

/// HTTP JSON chat-completion client (`messages`, `temperature`, `top_p`, `max_tokens`;
/// reply read from `choices[0].message.content`).
class RemoteChatBackend final : public ChatBackend {
public:
    RemoteChatBackend(std::string endpoint, std::string api_key, std::string model = {});
    /// Reads MODEL_ENDPOINT, MODEL_API_KEY and optionally MODEL_NAME. Throws ConfigError
    /// when MODEL_ENDPOINT is unset.
    static std::unique_ptr<RemoteChatBackend> from_env();

    std::string complete(const ChatRequest& request) override;
    std::string id() const override { return "remote:" + endpoint_; }

    const std::string& endpoint() const noexcept { return endpoint_; }

private:
    std::string endpoint_;
    std::string api_key_;
    std::string model_;
};

}  // namespace dpscan
