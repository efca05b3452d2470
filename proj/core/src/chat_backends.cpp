#include "dpscan/chat.hpp"
#include "dpscan/classifier.hpp"

namespace dpscan {

InFlightLimiter::InFlightLimiter(std::shared_ptr<ChatBackend> inner, int max_in_flight)
    : inner_(std::move(inner)), slots_(max_in_flight) {
    if (max_in_flight < 1 || max_in_flight > 1024) {
        throw ConfigError("in-flight cap must be in [1, 1024]");
    }
}

std::string InFlightLimiter::complete(const ChatRequest& request) {
    slots_.acquire();
    struct Release {
        std::counting_semaphore<1024>& s;
        ~Release() { s.release(); }
    } release{slots_};
    return inner_->complete(request);
}

ScriptedChatBackend::ScriptedChatBackend(std::vector<std::string> replies, std::string id)
    : replies_(std::move(replies)), id_(std::move(id)) {}

ScriptedChatBackend::ScriptedChatBackend(Responder responder, std::string id)
    : responder_(std::move(responder)), id_(std::move(id)) {}

std::string ScriptedChatBackend::complete(const ChatRequest& request) {
    std::size_t call = 0;
    {
        std::lock_guard lock(mu_);
        call = seen_.size();
        seen_.push_back(request);
    }
    if (responder_) return responder_(request);
    if (replies_.empty()) return {};
    return replies_[std::min(call, replies_.size() - 1)];
}

std::size_t ScriptedChatBackend::calls() const {
    std::lock_guard lock(mu_);
    return seen_.size();
}

std::vector<ChatRequest> ScriptedChatBackend::requests() const {
    std::lock_guard lock(mu_);
    return seen_;
}

}  // namespace dpscan
