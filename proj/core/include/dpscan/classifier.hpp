#pragma once

#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "dpscan/chat.hpp"
#include "dpscan/classified_map.hpp"
#include "dpscan/errors.hpp"
#include "dpscan/prompt.hpp"
#include "dpscan/window.hpp"

namespace dpscan {

/// The model's reply contained no usable rows. Carries the raw text for retry logic.
class ResponseParseError : public Error {
public:
    explicit ResponseParseError(std::string raw)
        : Error("model response contained no parseable rows"), raw_(std::move(raw)) {}
    const std::string& raw() const noexcept { return raw_; }

private:
    std::string raw_;
};

struct TableParse {
    std::vector<RowLabel> rows;     // one per map row
    std::vector<bool> present;      // whether the response mentioned the row
    std::size_t parsed_rows = 0;
};

/// Reads `line_id,category,subtype,reasoning` rows (also `Line N` ids and markdown
/// pipe tables). Labels are matched case-insensitively, by name or single-token alias.
/// A pair that violates the taxonomy keeps its subtype and takes the subtype's category;
/// rows the response omits default to non-deceptive. Both cases are flagged.
/// Throws ResponseParseError when a non-empty map yields no rows at all.
TableParse parse_model_table(std::string_view response, const ElementMap& map);

struct TwoPassOptions {
    DecodingParams params;
    /// Extra attempts per pass, for both backend failures and unparseable replies.
    int retries = 2;
};

/// First pass over every row with `primary`; if any row is deceptive, those rows
/// (inside the full map) go to `verifier`, whose verdicts replace the first-pass
/// labels for exactly those rows. Throws BackendError naming the pass and backend
/// once retries are exhausted.
ClassifiedMap classify_two_pass(const ElementMap& map, ChatBackend& primary, ChatBackend& verifier,
                                const PromptTemplate& tmpl, const TwoPassOptions& opts = {});

// ---------------------------------------------------------------------------
// Small-model path

/// A local sequence-to-sequence student answering windowed prompts.
class WindowModel {
public:
    virtual ~WindowModel() = default;
    virtual std::string generate(const std::string& prompt) = 0;
    virtual std::string id() const = 0;
};

/// Serialized prompt->completion model file, one JSON object per line:
///   {"prompt": "...", "completion": "..."}                   exact prompt
///   {"task": "[category]", "contains": "...", "completion": "..."}  substring of the target row
///   {"task": "[subtype]", "default": "..."}                  fallback for a task
/// Entries are tried in file order.
class FileWindowModel final : public WindowModel {
public:
    static FileWindowModel load(const std::filesystem::path& path);
    static FileWindowModel parse(std::string_view jsonl, std::string id = "window-model");

    std::string generate(const std::string& prompt) override;
    std::string id() const override { return id_; }

private:
    struct Entry {
        std::string prompt;
        std::string task;
        std::string contains;
        std::string completion;
        bool fallback = false;
    };
    std::vector<Entry> entries_;
    std::string id_;
};

/// Sends windowed prompts as the user message of a chat backend.
class ChatWindowModel final : public WindowModel {
public:
    ChatWindowModel(ChatBackend& backend, DecodingParams params = {})
        : backend_(backend), params_(params) {}
    std::string generate(const std::string& prompt) override {
        return backend_.complete({{}, prompt, params_});
    }
    std::string id() const override { return backend_.id(); }

private:
    ChatBackend& backend_;
    DecodingParams params_;
};

struct LocalOptions {
    int radius = kDefaultWindowRadius;
    bool want_reasoning = true;
};

/// Per row: asks [category], then [subtype], then optionally [reason]; answers may be
/// aliases or full labels. Unknown answers flag the row and default it to non-deceptive.
ClassifiedMap classify_local(const ElementMap& map, WindowModel& model, const LocalOptions& opts = {});

// ---------------------------------------------------------------------------
// Scripted backends for tests and offline runs

/// Replies from a fixed list in order (repeating the last), or from a callback.
class ScriptedChatBackend final : public ChatBackend {
public:
    using Responder = std::function<std::string(const ChatRequest&)>;

    ScriptedChatBackend(std::vector<std::string> replies, std::string id = "scripted-chat");
    ScriptedChatBackend(Responder responder, std::string id = "scripted-chat");

    std::string complete(const ChatRequest& request) override;
    std::string id() const override { return id_; }

    std::size_t calls() const;
    std::vector<ChatRequest> requests() const;

private:
    std::vector<std::string> replies_;
    Responder responder_;
    std::string id_;
    mutable std::mutex mu_;
    std::vector<ChatRequest> seen_;
};

}  // namespace dpscan
