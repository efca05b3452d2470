#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dpscan/taxonomy.hpp"
#include "dpscan/vision.hpp"

namespace dpscan {

struct LabelMetrics {
    std::string label;
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    std::size_t support() const noexcept { return tp + fn; }
};

struct ClassReport {
    std::string title;
    std::vector<LabelMetrics> rows;
    /// Averages over rows with support > 0.
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    /// Micro totals over all rows.
    LabelMetrics total;

    const LabelMetrics* find(std::string_view label) const noexcept;
};

struct Counts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
};

/// Fills precision / recall / F1 and the macro and total rows from raw counts.
ClassReport make_report(std::string title, const std::vector<std::string>& labels,
                        const std::vector<Counts>& counts);

/// Detector evaluation over one image. Predictions with confidence < conf_thr are
/// dropped; the rest are matched greedily per class in descending confidence to the
/// unmatched gold box of the same class with the highest IoU, if that IoU > iou_thr.
ClassReport match_detections(const std::vector<Detection>& preds,
                             const std::vector<Detection>& gold, double iou_thr = 0.5,
                             double conf_thr = 0.3);

/// Same, summing counts over aligned per-image lists. Throws InvalidArgument on a
/// length mismatch.
ClassReport match_detections(const std::vector<std::vector<Detection>>& preds,
                             const std::vector<std::vector<Detection>>& gold,
                             double iou_thr = 0.5, double conf_thr = 0.3);

inline constexpr std::string_view kBinaryDeceptive = "Deceptive";
inline constexpr std::string_view kBinaryNotDeceptive = "Not Deceptive";

struct ClassificationReports {
    ClassReport category;  // 5 rows
    ClassReport subtype;   // 12 rows
    ClassReport binary;    // "Deceptive", "Not Deceptive"
};

/// Throws InvalidArgument when the sequences differ in length.
ClassificationReports classification_report(const std::vector<Classification>& preds,
                                            const std::vector<Classification>& gold);

/// Aligned plain-text table with Precision / Recall / F1-Score / Support columns.
std::string render_text(const ClassReport& report);
/// One `title.label.metric=value` line per cell; labels are lower-cased with spaces
/// replaced by underscores.
std::string render_kv(const ClassReport& report);

}  // namespace dpscan
