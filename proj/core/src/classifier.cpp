#include "dpscan/classifier.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "dpscan/csv.hpp"
#include "dpscan/emap_csv.hpp"
#include "dpscan/fixtures.hpp"

namespace dpscan {

// ---------------------------------------------------------------------------
// ClassifiedMap

std::string_view name_of(Provenance p) noexcept {
    return p == Provenance::verified ? "verified" : "pass-1";
}

std::size_t ClassifiedMap::deceptive_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(
        labels.begin(), labels.end(), [](const RowLabel& l) { return l.cls.deceptive(); }));
}

std::string serialize_cmap(const ClassifiedMap& cmap, std::string_view site) {
    std::string out;
    for (std::size_t i = 0; i < cmap.map.rows.size(); ++i) {
        const auto& lab = cmap.labels.at(i);
        out += serialize_row(cmap.map.rows[i]);
        out += ',';
        out += name_of(lab.cls.category);
        out += ',';
        out += name_of(lab.cls.subtype);
        out += ',';
        out += csv::quote(lab.cls.reasoning);
        out += ',';
        out += name_of(lab.provenance);
        out += lab.flagged ? ",1" : ",0";
        if (!site.empty()) {
            out += ',';
            out += csv::quote(site);
        }
        out += '\n';
    }
    return out;
}

ParsedCmap parse_cmap(std::string_view text, std::string source) {
    ParsedCmap out;
    out.cmap.map.source = std::move(source);
    int prev = 0;
    bool first = true;
    for (const auto& rec : csv::parse(text)) {
        const auto& f = rec.fields;
        if (f.size() != kEmapFieldCount + 5 && f.size() != kEmapFieldCount + 6) {
            throw ParseError(rec.line, "classified-map record needs " +
                                           std::to_string(kEmapFieldCount + 5) + " or " +
                                           std::to_string(kEmapFieldCount + 6) + " fields, got " +
                                           std::to_string(f.size()));
        }
        auto row = parse_row_fields(f, rec.line);
        if (row.line_id <= prev) throw ParseError(rec.line, "line ids must be strictly increasing");
        prev = row.line_id;
        RowLabel lab;
        auto cat = parse_category(f[10]);
        auto sub = parse_subtype(f[11]);
        if (!cat) throw ParseError(rec.line, "unknown category '" + f[10] + "'");
        if (!sub) throw ParseError(rec.line, "unknown subtype '" + f[11] + "'");
        if (!taxonomy_validate(*cat, *sub)) {
            throw ParseError(rec.line, "invalid taxonomy pair " + f[10] + "/" + f[11]);
        }
        lab.cls = {*cat, *sub, f[12]};
        if (f[13] == "pass-1") {
            lab.provenance = Provenance::pass1;
        } else if (f[13] == "verified") {
            lab.provenance = Provenance::verified;
        } else {
            throw ParseError(rec.line, "unknown provenance '" + f[13] + "'");
        }
        if (f[14] != "0" && f[14] != "1") throw ParseError(rec.line, "flag must be 0 or 1");
        lab.flagged = f[14] == "1";
        const std::string site = f.size() > 15 ? f[15] : std::string{};
        if (first) {
            out.site = site;
            first = false;
        } else if (site != out.site) {
            throw ParseError(rec.line, "site column changes within one map");
        }
        out.cmap.map.rows.push_back(std::move(row));
        out.cmap.labels.push_back(std::move(lab));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Model table parsing

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string strip_markup(std::string s) {
    s = trim(s);
    while (!s.empty() && (s.front() == '*' || s.front() == '`' || s.front() == '"')) s.erase(0, 1);
    while (!s.empty() && (s.back() == '*' || s.back() == '`' || s.back() == '"')) s.pop_back();
    return trim(s);
}

std::optional<int> parse_line_id(std::string s) {
    s = strip_markup(std::move(s));
    std::string lower;
    for (char c : s) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (lower.rfind("line", 0) == 0) s = trim(std::string_view(s).substr(4));
    int v = 0;
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || p != end || s.empty()) return std::nullopt;
    return v;
}

std::optional<DeceptiveCategory> decode_category(const std::string& s) {
    if (auto c = parse_category(s)) return c;
    try {
        return category_from_alias(normalize_label(s));
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::optional<DeceptiveSubtype> decode_subtype(const std::string& s) {
    if (auto t = parse_subtype(s)) return t;
    try {
        return subtype_from_alias(normalize_label(s));
    } catch (const Error&) {
        return std::nullopt;
    }
}

// Splits one response line into (id, category, subtype, reasoning), if it looks like a row.
std::optional<std::vector<std::string>> split_row(const std::string& raw) {
    std::string line = trim(raw);
    if (line.empty() || line.rfind("```", 0) == 0) return std::nullopt;
    std::vector<std::string> cells;
    if (line.front() == '|') {
        std::string cell;
        for (std::size_t i = 1; i < line.size(); ++i) {
            if (line[i] == '|') {
                cells.push_back(trim(cell));
                cell.clear();
            } else {
                cell += line[i];
            }
        }
        if (!trim(cell).empty()) cells.push_back(trim(cell));
        if (cells.size() > 4) {
            // Reasoning containing pipes.
            for (std::size_t i = 4; i < cells.size(); ++i) cells[3] += " | " + cells[i];
            cells.resize(4);
        }
    } else {
        cells = csv::split_limited(line, 4);
        for (auto& c : cells) c = trim(c);
    }
    if (cells.size() < 3) return std::nullopt;
    if (cells.size() == 3) cells.emplace_back();
    return cells;
}

}  // namespace

TableParse parse_model_table(std::string_view response, const ElementMap& map) {
    TableParse out;
    out.rows.assign(map.rows.size(), RowLabel{});
    out.present.assign(map.rows.size(), false);

    std::istringstream in{std::string(response)};
    std::string raw;
    while (std::getline(in, raw)) {
        auto cells = split_row(raw);
        if (!cells) continue;
        auto id = parse_line_id((*cells)[0]);
        if (!id) continue;
        const ElementRow* row = map.find(*id);
        if (row == nullptr) continue;
        const auto idx = static_cast<std::size_t>(row - map.rows.data());
        if (out.present[idx]) continue;

        const auto cat = decode_category(strip_markup((*cells)[1]));
        const auto sub = decode_subtype(strip_markup((*cells)[2]));
        RowLabel lab;
        lab.cls.reasoning = (*cells)[3];
        if (sub && cat && taxonomy_validate(*cat, *sub)) {
            lab.cls.category = *cat;
            lab.cls.subtype = *sub;
        } else if (sub) {
            lab.cls.category = category_of(*sub);
            lab.cls.subtype = *sub;
            lab.flagged = true;
            lab.note = "category '" + (*cells)[1] + "' coerced to match subtype";
        } else {
            lab.cls.category = DeceptiveCategory::non_deceptive;
            lab.cls.subtype = DeceptiveSubtype::not_applicable;
            lab.flagged = true;
            lab.note = "unrecognised subtype '" + (*cells)[2] + "'";
        }
        out.rows[idx] = std::move(lab);
        out.present[idx] = true;
        ++out.parsed_rows;
    }
    if (!map.empty() && out.parsed_rows == 0) throw ResponseParseError(std::string(response));
    for (std::size_t i = 0; i < map.rows.size(); ++i) {
        if (out.present[i]) continue;
        out.rows[i].cls = Classification::non_deceptive();
        out.rows[i].flagged = true;
        out.rows[i].note = "row missing from model response";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Two-pass protocol

namespace {

// Queries the backend with retries. Returns nullopt when every reply was unparseable.
std::optional<TableParse> run_pass(ChatBackend& backend, const Prompt& prompt,
                                   const ElementMap& map, const PromptTemplate& tmpl,
                                   const TwoPassOptions& opts, std::string_view pass) {
    ChatRequest req{prompt.system, prompt.user, opts.params};
    for (int attempt = 0;; ++attempt) {
        std::string reply;
        try {
            reply = backend.complete(req);
        } catch (const std::exception& e) {
            if (attempt >= opts.retries) {
                throw BackendError(backend.id(), std::string(pass) + " failed after " +
                                                     std::to_string(attempt + 1) +
                                                     " attempts: " + e.what());
            }
            continue;
        }
        try {
            return parse_model_table(reply, map);
        } catch (const ResponseParseError&) {
            if (attempt >= opts.retries) return std::nullopt;
            req.user = prompt.user + "\n\n" + tmpl.format_instruction;
        }
    }
}

}  // namespace

ClassifiedMap classify_two_pass(const ElementMap& map, ChatBackend& primary, ChatBackend& verifier,
                                const PromptTemplate& tmpl, const TwoPassOptions& opts) {
    if (opts.retries < 0) throw ConfigError("retries must be >= 0");
    ClassifiedMap out;
    out.map = map;

    const Prompt first = build_classify_prompt(map, tmpl);
    if (auto parsed = run_pass(primary, first, map, tmpl, opts, "pass 1")) {
        out.labels = std::move(parsed->rows);
    } else {
        out.labels.assign(map.rows.size(), RowLabel{Classification::non_deceptive(),
                                                    Provenance::pass1, true,
                                                    "unparseable pass-1 response"});
    }

    std::vector<std::size_t> flagged;
    for (std::size_t i = 0; i < out.labels.size(); ++i) {
        if (out.labels[i].cls.deceptive()) flagged.push_back(i);
    }
    if (flagged.empty()) return out;

    const Prompt second = build_verify_prompt(map, out.labels, flagged, tmpl);
    auto verdict = run_pass(verifier, second, map, tmpl, opts, "verification pass");
    for (std::size_t i : flagged) {
        auto& lab = out.labels[i];
        if (!verdict || !verdict->present[i]) {
            lab.flagged = true;
            lab.note = verdict ? "verifier omitted row; pass-1 label kept"
                               : "unparseable verifier response; pass-1 label kept";
            continue;
        }
        lab = std::move(verdict->rows[i]);
        lab.provenance = Provenance::verified;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Small-model path

FileWindowModel FileWindowModel::parse(std::string_view jsonl, std::string id) {
    FileWindowModel m;
    m.id_ = std::move(id);
    std::istringstream in{std::string(jsonl)};
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (trim(line).empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(n, e.what());
        }
        Entry e;
        e.prompt = j.value("prompt", std::string{});
        e.task = j.value("task", std::string{});
        e.contains = j.value("contains", std::string{});
        if (j.contains("default")) {
            e.completion = j.at("default").get<std::string>();
            e.fallback = true;
        } else if (j.contains("completion")) {
            e.completion = j.at("completion").get<std::string>();
        } else {
            throw ParseError(n, "entry needs 'completion' or 'default'");
        }
        if (e.prompt.empty() && e.task.empty() && e.contains.empty() && !e.fallback) {
            throw ParseError(n, "entry matches nothing");
        }
        m.entries_.push_back(std::move(e));
    }
    return m;
}

FileWindowModel FileWindowModel::load(const std::filesystem::path& path) {
    return parse(read_text_file(path), "window-model:" + path.filename().string());
}

std::string FileWindowModel::generate(const std::string& prompt) {
    const auto colon = prompt.find(": ");
    const std::string task = colon == std::string::npos ? std::string{} : prompt.substr(0, colon);
    const auto sep = prompt.find(kWindowSeparator);
    const std::string target =
        colon == std::string::npos ? prompt : prompt.substr(colon + 2, sep - (colon + 2));
    for (const auto& e : entries_) {
        if (!e.prompt.empty()) {
            if (e.prompt == prompt) return e.completion;
            continue;
        }
        if (!e.task.empty() && e.task != task) continue;
        if (!e.contains.empty() && target.find(e.contains) == std::string::npos) continue;
        return e.completion;
    }
    throw BackendError(id_, "no completion for prompt '" + prompt.substr(0, 80) + "'");
}

namespace {

std::string answer_word(const std::string& s) {
    std::string w = strip_markup(s);
    std::string out;
    for (char c : w) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

ClassifiedMap classify_local(const ElementMap& map, WindowModel& model, const LocalOptions& opts) {
    ClassifiedMap out;
    out.map = map;
    out.labels.reserve(map.rows.size());
    for (std::size_t i = 1; i <= map.rows.size(); ++i) {
        const std::string body = window_body(map, i, opts.radius);
        auto ask = [&](TaskPrefix p) {
            try {
                return model.generate(with_prefix(p, body));
            } catch (const BackendError&) {
                throw;
            } catch (const std::exception& e) {
                throw BackendError(model.id(), e.what());
            }
        };
        const std::string cat_answer = answer_word(ask(TaskPrefix::category));
        const std::string sub_answer = answer_word(ask(TaskPrefix::subtype));

        RowLabel lab;
        std::optional<DeceptiveCategory> cat;
        std::optional<DeceptiveSubtype> sub;
        try {
            cat = category_from_alias(cat_answer);
        } catch (const Error&) {
            cat = parse_category(cat_answer);
        }
        try {
            sub = subtype_from_alias(sub_answer);
        } catch (const Error&) {
            sub = parse_subtype(sub_answer);
        }
        if (!sub || !cat) {
            lab.cls = Classification::non_deceptive();
            lab.flagged = true;
            lab.note = "unknown answer '" + (cat ? sub_answer : cat_answer) + "'";
        } else if (!taxonomy_validate(*cat, *sub)) {
            lab.cls.category = category_of(*sub);
            lab.cls.subtype = *sub;
            lab.flagged = true;
            lab.note = "category coerced to match subtype";
        } else {
            lab.cls.category = *cat;
            lab.cls.subtype = *sub;
        }
        if (opts.want_reasoning) lab.cls.reasoning = trim(ask(TaskPrefix::reason));
        out.labels.push_back(std::move(lab));
    }
    return out;
}

}  // namespace dpscan
