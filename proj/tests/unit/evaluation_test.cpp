#include <doctest.h>

#include <random>

#include "dpscan/errors.hpp"
#include "dpscan/evaluation.hpp"
#include "oracles.hpp"

using namespace dpscan;

namespace {

Classification cls(DeceptiveSubtype s) { return {category_of(s), s, {}}; }
const Classification D = cls(DeceptiveSubtype::nudge);
const Classification N = Classification::non_deceptive();

Detection box(UIElementKind k, BoundingBox b, double conf = 1.0) { return {k, b, conf, "x"}; }

}  // namespace

TEST_SUITE("evaluation") {

TEST_CASE("identity gives perfect scores") {
    const std::vector<Classification> v = {D, N, cls(DeceptiveSubtype::jargon), cls(DeceptiveSubtype::hidden_costs)};
    const auto r = classification_report(v, v);
    for (const auto* rep : {&r.category, &r.subtype, &r.binary}) {
        CHECK(rep->macro_f1 == 1.0);
        CHECK(rep->total.f1 == 1.0);
        for (const auto& row : rep->rows) {
            if (row.support() > 0) CHECK(row.f1 == 1.0);
        }
    }
    CHECK(r.category.rows.size() == 5);
    CHECK(r.subtype.rows.size() == 12);
    CHECK(r.binary.rows.size() == 2);
}

TEST_CASE("binary hand count") {
    const auto r = classification_report({D, N, N, D}, {D, D, N, N});
    const auto* d = r.binary.find(kBinaryDeceptive);
    REQUIRE(d != nullptr);
    CHECK(d->precision == 0.5);
    CHECK(d->recall == 0.5);
    CHECK(d->f1 == 0.5);
}

TEST_CASE("levels are independent") {
    const auto pred = cls(DeceptiveSubtype::hidden_costs);
    const auto gold = cls(DeceptiveSubtype::confirmshaming);
    const auto r = classification_report({pred}, {gold});
    CHECK(r.binary.find(kBinaryDeceptive)->tp == 1);
    CHECK(r.subtype.find("hidden-costs")->fp == 1);
    CHECK(r.subtype.find("confirmshaming")->fn == 1);
    CHECK(r.category.find("sneaking")->fp == 1);
    CHECK(r.category.find("interface-interference")->fn == 1);
}

TEST_CASE("zero support rows are excluded from macro averages") {
    const auto r = classification_report({N, D}, {N, D});
    CHECK(r.subtype.macro_f1 == 1.0);
    const auto* j = r.subtype.find("jargon");
    CHECK(j->support() == 0);
    CHECK(j->f1 == 0.0);
}

TEST_CASE("reports agree with the confusion matrix oracle") {
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<std::size_t> sub(0, kAllSubtypes.size() - 1);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 50;
        std::vector<Classification> pred, gold;
        for (std::size_t i = 0; i < n; ++i) {
            pred.push_back(cls(kAllSubtypes[sub(rng)]));
            gold.push_back(cls(kAllSubtypes[sub(rng)]));
        }
        const auto r = classification_report(pred, gold);
        std::vector<std::string> ps, gs, pc, gc, pb, gb, sub_labels, cat_labels;
        for (std::size_t i = 0; i < n; ++i) {
            ps.emplace_back(name_of(pred[i].subtype));
            gs.emplace_back(name_of(gold[i].subtype));
            pc.emplace_back(name_of(pred[i].category));
            gc.emplace_back(name_of(gold[i].category));
            pb.emplace_back(pred[i].deceptive() ? kBinaryDeceptive : kBinaryNotDeceptive);
            gb.emplace_back(gold[i].deceptive() ? kBinaryDeceptive : kBinaryNotDeceptive);
        }
        for (auto s : kAllSubtypes) sub_labels.emplace_back(name_of(s));
        for (auto c : kAllCategories) cat_labels.emplace_back(name_of(c));
        const std::vector<std::string> bin_labels = {std::string(kBinaryDeceptive), std::string(kBinaryNotDeceptive)};
        auto check = [](const ClassReport& rep, const std::map<std::string, Counts>& want) {
            for (const auto& [label, c] : want) {
                const auto* row = rep.find(label);
                REQUIRE(row != nullptr);
                CHECK(row->tp == c.tp);
                CHECK(row->fp == c.fp);
                CHECK(row->fn == c.fn);
                const double p = c.tp + c.fp == 0 ? 0.0 : double(c.tp) / double(c.tp + c.fp);
                const double rc = c.tp + c.fn == 0 ? 0.0 : double(c.tp) / double(c.tp + c.fn);
                CHECK(row->precision == doctest::Approx(p));
                CHECK(row->recall == doctest::Approx(rc));
                CHECK(row->f1 == doctest::Approx(p + rc == 0 ? 0.0 : 2 * p * rc / (p + rc)));
            }
        };
        check(r.subtype, oracle::confusion_counts(ps, gs, sub_labels));
        check(r.category, oracle::confusion_counts(pc, gc, cat_labels));
        check(r.binary, oracle::confusion_counts(pb, gb, bin_labels));

        std::size_t both = 0;
        for (std::size_t i = 0; i < n; ++i) both += pred[i].deceptive() && gold[i].deceptive();
        CHECK(r.binary.find(kBinaryDeceptive)->tp == both);
    }
    CHECK_THROWS_AS(classification_report({D}, {}), InvalidArgument);
}

TEST_CASE("detection matching rules") {
    const auto gold = box(UIElementKind::button, {0, 0, 100, 100});
    // IoU 0.6: 60x100 overlap of two 100x100 boxes would be 0.43; use containment instead.
    const auto pred = box(UIElementKind::button, {0, 0, 100, 60}, 0.8);
    REQUIRE(iou(pred.box, gold.box) == doctest::Approx(0.6));
    auto r = match_detections(std::vector<Detection>{pred}, std::vector<Detection>{gold});
    CHECK(r.find("button")->tp == 1);
    CHECK(r.find("button")->precision == 1.0);
    CHECK(r.find("button")->recall == 1.0);

    auto weak = pred;
    weak.confidence = 0.2;
    r = match_detections(std::vector<Detection>{weak}, std::vector<Detection>{gold});
    CHECK(r.find("button")->fn == 1);
    CHECK(r.find("button")->fp == 0);
    CHECK(r.find("button")->recall == 0.0);

    // Wrong class never matches.
    auto other = pred;
    other.kind = UIElementKind::toggle_on;
    r = match_detections(std::vector<Detection>{other}, std::vector<Detection>{gold});
    CHECK(r.find("button")->fn == 1);
    CHECK(r.find("toggle on")->fp == 1);

    // Exactly 0.5 is not a match.
    const auto half = box(UIElementKind::button, {0, 0, 100, 50}, 0.9);
    r = match_detections(std::vector<Detection>{half}, std::vector<Detection>{gold});
    CHECK(r.find("button")->tp == 0);
}

TEST_CASE("greedy matching equals the assignment oracle on unambiguous scenes") {
    std::mt19937_64 rng(12);
    std::uniform_int_distribution<int> pos(0, 400);
    std::uniform_int_distribution<int> size(20, 80);
    std::uniform_int_distribution<int> jitter(-6, 6);
    std::uniform_int_distribution<int> conf(30, 100);
    int checked = 0, ambiguous = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Detection> gold, preds;
        for (int i = 0; i < 5; ++i) {
            const int x = pos(rng), y = pos(rng), w = size(rng), h = size(rng);
            gold.push_back(box(UIElementKind::button, {x, y, x + w, y + h}));
            if (rng() % 4 != 0) {
                const int x1 = std::max(0, x + jitter(rng)), y1 = std::max(0, y + jitter(rng));
                preds.push_back(box(UIElementKind::button, {x1, y1, x1 + w + jitter(rng), y1 + h + jitter(rng)},
                                    conf(rng) / 100.0));
            }
        }
        for (int i = 0; i < 5; ++i) {
            const int x = pos(rng), y = pos(rng);
            preds.push_back(box(UIElementKind::button, {x, y, x + size(rng), y + size(rng)}, conf(rng) / 100.0));
        }
        // Ambiguous when any prediction overlaps two gold boxes above threshold.
        bool amb = false;
        for (const auto& p : preds) {
            int hits = 0;
            for (const auto& g : gold) hits += iou(p.box, g.box) > 0.5;
            amb = amb || hits > 1;
        }
        for (const auto& g : gold) {
            int hits = 0;
            for (const auto& p : preds) hits += iou(p.box, g.box) > 0.5;
            amb = amb || hits > 1;
        }
        if (amb) {
            ++ambiguous;
            continue;
        }
        std::vector<BoundingBox> pb, gb;
        for (const auto& p : preds) pb.push_back(p.box);
        for (const auto& g : gold) gb.push_back(g.box);
        const auto r = match_detections(preds, gold);
        CHECK(r.find("button")->tp == oracle::max_matches(pb, gb, 0.5));
        CHECK(r.find("button")->tp + r.find("button")->fn == gold.size());
        CHECK(r.find("button")->tp + r.find("button")->fp == preds.size());
        ++checked;
    }
    CHECK(checked > 100);
    MESSAGE("ambiguous scenes skipped: " << ambiguous);
}

TEST_CASE("per-image lists are summed") {
    const std::vector<std::vector<Detection>> preds = {{box(UIElementKind::button, {0, 0, 10, 10})}, {}};
    const std::vector<std::vector<Detection>> gold = {{box(UIElementKind::button, {0, 0, 10, 10})},
                                                      {box(UIElementKind::button, {0, 0, 10, 10})}};
    const auto r = match_detections(preds, gold);
    CHECK(r.find("button")->tp == 1);
    CHECK(r.find("button")->fn == 1);
    CHECK_THROWS_AS(match_detections(preds, std::vector<std::vector<Detection>>{}), InvalidArgument);
}

TEST_CASE("rendering") {
    const auto r = classification_report({D, N, N, D}, {D, D, N, N});
    const auto text = render_text(r.binary);
    CHECK(text.find("Precision") != std::string::npos);
    CHECK(text.find("Macro Avg") != std::string::npos);
    const auto kv = render_kv(r.binary);
    CHECK(kv.find(".deceptive.f1=0.5000") != std::string::npos);
    CHECK(kv.find(".not_deceptive.") != std::string::npos);
}

}
