#include "dpscan/audit.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>
#include <sstream>

namespace dpscan {

namespace {

std::size_t rank_of(DeceptiveCategory c) {
    return static_cast<std::size_t>(std::find(kAllCategories.begin(), kAllCategories.end(), c) -
                                    kAllCategories.begin());
}

}  // namespace

int audit_score(std::size_t n) noexcept {
    if (n == 0) return 100;
    if (n == 1) return 89;
    return n >= 10 ? 0 : static_cast<int>(100 - 10 * n);
}

AuditReport generate_audit_report(const ClassifiedMap& cmap, std::string target) {
    AuditReport rep;
    rep.target = std::move(target);
    for (std::size_t i = 0; i < cmap.map.rows.size() && i < cmap.labels.size(); ++i) {
        if (cmap.labels[i].cls.deceptive()) rep.findings.push_back({cmap.map.rows[i], cmap.labels[i].cls});
    }
    std::stable_sort(rep.findings.begin(), rep.findings.end(), [](const Finding& a, const Finding& b) {
        const auto ra = rank_of(a.cls.category);
        const auto rb = rank_of(b.cls.category);
        return ra != rb ? ra < rb : a.row.line_id < b.row.line_id;
    });
    rep.n = rep.findings.size();
    rep.score = audit_score(rep.n);
    return rep;
}

std::string render_audit_json(const AuditReport& report) {
    nlohmann::ordered_json j;
    j["target"] = report.target;
    j["score"] = report.score;
    j["n"] = report.n;
    auto findings = nlohmann::ordered_json::array();
    for (const auto& f : report.findings) {
        nlohmann::ordered_json o;
        o["line_id"] = f.row.line_id;
        o["text"] = f.row.text;
        o["kind"] = display_of(f.row.kind);
        o["bbox"] = {f.row.box.x1, f.row.box.y1, f.row.box.x2, f.row.box.y2};
        o["category"] = name_of(f.cls.category);
        o["subtype"] = name_of(f.cls.subtype);
        o["reasoning"] = f.cls.reasoning;
        findings.push_back(std::move(o));
    }
    j["findings"] = std::move(findings);
    return j.dump(2) + "\n";
}

std::string html_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&#39;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string render_audit_html(const AuditReport& report) {
    std::ostringstream os;
    os << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n"
       << "<title>Deceptive pattern audit: " << html_escape(report.target) << "</title>\n"
       << "<style>body{font-family:sans-serif;margin:2em}table{border-collapse:collapse}"
          "td,th{border:1px solid #ccc;padding:4px 8px;text-align:left}"
          ".pass{color:#0a0}.fail{color:#c00}</style>\n</head>\n<body>\n";
    os << "<h1>Deceptive pattern audit</h1>\n";
    os << "<p>Target: <code>" << html_escape(report.target) << "</code></p>\n";
    os << "<p class=\"" << (report.score == 100 ? "pass" : "fail") << "\">Score: <strong>"
       << report.score << "</strong> / 100 (" << report.n << " finding"
       << (report.n == 1 ? "" : "s") << ")</p>\n";
    if (report.findings.empty()) {
        os << "<p>No deceptive patterns found.</p>\n";
    }
    for (std::size_t i = 0; i < report.findings.size();) {
        const auto cat = report.findings[i].cls.category;
        os << "<section>\n<h2>" << html_escape(name_of(cat)) << "</h2>\n<table>\n"
           << "<tr><th>Line</th><th>Element</th><th>Text</th><th>Subtype</th>"
              "<th>Reasoning</th><th>Bounding box</th></tr>\n";
        for (; i < report.findings.size() && report.findings[i].cls.category == cat; ++i) {
            const auto& f = report.findings[i];
            os << "<tr><td>" << f.row.line_id << "</td><td>" << html_escape(display_of(f.row.kind))
               << "</td><td>" << html_escape(f.row.text) << "</td><td>"
               << html_escape(name_of(f.cls.subtype)) << "</td><td>"
               << html_escape(f.cls.reasoning) << "</td><td>" << to_string(f.row.box)
               << "</td></tr>\n";
        }
        os << "</table>\n</section>\n";
    }
    os << "</body>\n</html>\n";
    return os.str();
}

}  // namespace dpscan
