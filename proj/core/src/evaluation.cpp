#include "dpscan/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "dpscan/errors.hpp"
#include "dpscan/geometry.hpp"

namespace dpscan {

namespace {

void fill(LabelMetrics& m) {
    m.precision = m.tp + m.fp == 0 ? 0.0 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
    m.recall = m.tp + m.fn == 0 ? 0.0 : static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
    m.f1 = m.precision + m.recall == 0.0
               ? 0.0
               : 2.0 * m.precision * m.recall / (m.precision + m.recall);
}

std::vector<std::string> detector_labels() {
    std::vector<std::string> out;
    for (auto k : kAllElementKinds) {
        if (is_detector_kind(k)) out.emplace_back(display_of(k));
    }
    return out;
}

std::size_t detector_index(UIElementKind kind) {
    std::size_t i = 0;
    for (auto k : kAllElementKinds) {
        if (!is_detector_kind(k)) continue;
        if (k == kind) return i;
        ++i;
    }
    throw InvalidArgument("text is not a detector class");
}

void accumulate(std::vector<Counts>& counts, const std::vector<Detection>& preds,
                const std::vector<Detection>& gold, double iou_thr, double conf_thr) {
    for (std::size_t c = 0; c < counts.size(); ++c) {
        std::vector<const Detection*> p;
        std::vector<const Detection*> g;
        for (const auto& d : preds) {
            if (is_detector_kind(d.kind) && detector_index(d.kind) == c && d.confidence >= conf_thr) {
                p.push_back(&d);
            }
        }
        for (const auto& d : gold) {
            if (is_detector_kind(d.kind) && detector_index(d.kind) == c) g.push_back(&d);
        }
        std::stable_sort(p.begin(), p.end(), [](const Detection* a, const Detection* b) {
            return a->confidence > b->confidence;
        });
        std::vector<bool> used(g.size(), false);
        for (const Detection* d : p) {
            std::size_t best = g.size();
            double best_iou = iou_thr;
            for (std::size_t j = 0; j < g.size(); ++j) {
                if (used[j]) continue;
                const double v = iou(d->box, g[j]->box);
                if (v > best_iou) {
                    best = j;
                    best_iou = v;
                }
            }
            if (best < g.size()) {
                used[best] = true;
                ++counts[c].tp;
            } else {
                ++counts[c].fp;
            }
        }
        counts[c].fn += static_cast<std::size_t>(std::count(used.begin(), used.end(), false));
    }
}

std::string key_of(std::string_view s) {
    std::string out;
    for (char c : s) {
        out += c == ' ' || c == '-' ? '_'
                                    : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

}  // namespace

const LabelMetrics* ClassReport::find(std::string_view label) const noexcept {
    for (const auto& r : rows) {
        if (r.label == label) return &r;
    }
    return nullptr;
}

ClassReport make_report(std::string title, const std::vector<std::string>& labels,
                        const std::vector<Counts>& counts) {
    if (labels.size() != counts.size()) throw InvalidArgument("label / count size mismatch");
    ClassReport rep;
    rep.title = std::move(title);
    rep.total.label = "total";
    std::size_t supported = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        LabelMetrics m;
        m.label = labels[i];
        m.tp = counts[i].tp;
        m.fp = counts[i].fp;
        m.fn = counts[i].fn;
        fill(m);
        rep.total.tp += m.tp;
        rep.total.fp += m.fp;
        rep.total.fn += m.fn;
        if (m.support() > 0) {
            ++supported;
            rep.macro_precision += m.precision;
            rep.macro_recall += m.recall;
            rep.macro_f1 += m.f1;
        }
        rep.rows.push_back(std::move(m));
    }
    if (supported > 0) {
        rep.macro_precision /= static_cast<double>(supported);
        rep.macro_recall /= static_cast<double>(supported);
        rep.macro_f1 /= static_cast<double>(supported);
    }
    fill(rep.total);
    return rep;
}

ClassReport match_detections(const std::vector<Detection>& preds,
                             const std::vector<Detection>& gold, double iou_thr,
                             double conf_thr) {
    const auto labels = detector_labels();
    std::vector<Counts> counts(labels.size());
    accumulate(counts, preds, gold, iou_thr, conf_thr);
    return make_report("detection", labels, counts);
}

ClassReport match_detections(const std::vector<std::vector<Detection>>& preds,
                             const std::vector<std::vector<Detection>>& gold, double iou_thr,
                             double conf_thr) {
    if (preds.size() != gold.size()) {
        throw InvalidArgument("prediction and gold image counts differ");
    }
    const auto labels = detector_labels();
    std::vector<Counts> counts(labels.size());
    for (std::size_t i = 0; i < preds.size(); ++i) {
        accumulate(counts, preds[i], gold[i], iou_thr, conf_thr);
    }
    return make_report("detection", labels, counts);
}

ClassificationReports classification_report(const std::vector<Classification>& preds,
                                            const std::vector<Classification>& gold) {
    if (preds.size() != gold.size()) {
        throw InvalidArgument("prediction and gold sequences differ in length (" +
                              std::to_string(preds.size()) + " vs " +
                              std::to_string(gold.size()) + ")");
    }
    std::vector<Counts> cat(kAllCategories.size());
    std::vector<Counts> sub(kAllSubtypes.size());
    std::vector<Counts> bin(2);
    auto cat_index = [](DeceptiveCategory c) {
        return static_cast<std::size_t>(
            std::find(kAllCategories.begin(), kAllCategories.end(), c) - kAllCategories.begin());
    };
    auto sub_index = [](DeceptiveSubtype s) {
        return static_cast<std::size_t>(
            std::find(kAllSubtypes.begin(), kAllSubtypes.end(), s) - kAllSubtypes.begin());
    };
    auto tally = [](std::vector<Counts>& counts, std::size_t p, std::size_t g) {
        if (p == g) {
            ++counts[p].tp;
        } else {
            ++counts[p].fp;
            ++counts[g].fn;
        }
    };
    for (std::size_t i = 0; i < preds.size(); ++i) {
        tally(cat, cat_index(preds[i].category), cat_index(gold[i].category));
        tally(sub, sub_index(preds[i].subtype), sub_index(gold[i].subtype));
        tally(bin, is_deceptive(preds[i].category) ? 0 : 1, is_deceptive(gold[i].category) ? 0 : 1);
    }
    std::vector<std::string> cat_labels;
    for (auto c : kAllCategories) cat_labels.emplace_back(name_of(c));
    std::vector<std::string> sub_labels;
    for (auto s : kAllSubtypes) sub_labels.emplace_back(name_of(s));
    return {make_report("category", cat_labels, cat),
            make_report("subtype", sub_labels, sub),
            make_report("binary", {std::string(kBinaryDeceptive), std::string(kBinaryNotDeceptive)},
                        bin)};
}

std::string render_text(const ClassReport& report) {
    std::size_t width = std::string_view("Macro Avg").size();
    for (const auto& r : report.rows) width = std::max(width, r.label.size());
    std::ostringstream os;
    auto pad = [&](std::string s) {
        s.resize(width, ' ');
        return s;
    };
    auto line = [&](const std::string& label, double p, double r, double f, const std::string& sup) {
        os << pad(label) << "  " << fixed4(p) << "     " << fixed4(r) << "  " << fixed4(f)
           << "    " << sup << '\n';
    };
    os << "# " << report.title << '\n';
    os << pad("Class") << "  Precision  Recall  F1-Score  Support\n";
    for (const auto& r : report.rows) {
        line(r.label, r.precision, r.recall, r.f1, std::to_string(r.support()));
    }
    line("Macro Avg", report.macro_precision, report.macro_recall, report.macro_f1, "");
    line("Total", report.total.precision, report.total.recall, report.total.f1,
         std::to_string(report.total.support()));
    return os.str();
}

std::string render_kv(const ClassReport& report) {
    std::ostringstream os;
    auto emit = [&](const LabelMetrics& m) {
        const std::string k = report.title + "." + key_of(m.label) + ".";
        os << k << "precision=" << fixed4(m.precision) << '\n';
        os << k << "recall=" << fixed4(m.recall) << '\n';
        os << k << "f1=" << fixed4(m.f1) << '\n';
        os << k << "support=" << m.support() << '\n';
        os << k << "tp=" << m.tp << '\n';
        os << k << "fp=" << m.fp << '\n';
        os << k << "fn=" << m.fn << '\n';
    };
    for (const auto& r : report.rows) emit(r);
    emit(report.total);
    os << report.title << ".macro.precision=" << fixed4(report.macro_precision) << '\n';
    os << report.title << ".macro.recall=" << fixed4(report.macro_recall) << '\n';
    os << report.title << ".macro.f1=" << fixed4(report.macro_f1) << '\n';
    return os.str();
}

}  // namespace dpscan
