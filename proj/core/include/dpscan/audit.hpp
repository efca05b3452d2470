#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dpscan/classified_map.hpp"

namespace dpscan {

/// 100 for no findings, 89 for one, otherwise max(100 - 10n, 0).
int audit_score(std::size_t n) noexcept;

struct Finding {
    ElementRow row;
    Classification cls;
};

struct AuditReport {
    std::string target;  // URL or screenshot id
    /// Deceptive rows only, grouped by category (taxonomy order), then by line id.
    std::vector<Finding> findings;
    std::size_t n = 0;
    int score = 100;
};

AuditReport generate_audit_report(const ClassifiedMap& cmap, std::string target);

/// Machine-readable form. Keys are emitted in a fixed order.
std::string render_audit_json(const AuditReport& report);
/// Self-contained HTML page with one section per category present.
std::string render_audit_html(const AuditReport& report);

std::string html_escape(std::string_view s);

}  // namespace dpscan
