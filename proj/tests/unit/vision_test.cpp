#include <doctest.h>

#include <algorithm>
#include <random>
#include <stdexcept>

#include "dpscan/errors.hpp"
#include "dpscan/fixtures.hpp"
#include "dpscan/vision.hpp"
#include "oracles.hpp"
#include "scenes.hpp"

using namespace dpscan;

namespace {

VisionConfig gap8() {
    VisionConfig cfg;
    cfg.merge_gap_x = 8;
    return cfg;
}

std::vector<Detection> random_dets(std::mt19937_64& rng, std::size_t n, const std::string& source) {
    std::uniform_int_distribution<int> pos(0, 300);
    std::uniform_int_distribution<int> size(5, 120);
    std::uniform_int_distribution<int> kind(0, 6);
    std::uniform_int_distribution<int> conf(0, 20);
    std::vector<Detection> out;
    for (std::size_t i = 0; i < n; ++i) {
        const int x = pos(rng), y = pos(rng);
        out.push_back({kAllElementKinds[static_cast<std::size_t>(kind(rng))],
                       {x, y, x + size(rng), y + size(rng)},
                       conf(rng) / 20.0,
                       source});
    }
    return out;
}

struct FailingDetector final : DetectorBackend {
    std::vector<Detection> detect(const Raster&) override { throw std::runtime_error("model not loaded"); }
    std::string id() const override { return "broken-yolo"; }
};

struct FailingOcr final : OcrBackend {
    std::vector<OcrBlock> recognize(const Raster&) override { throw std::runtime_error("quota"); }
    std::string id() const override { return "broken-ocr"; }
};

}  // namespace

TEST_SUITE("vision") {

TEST_CASE("horizontal merge within the gap") {
    const auto out = merge_ocr_blocks({{"Sign", {0, 0, 40, 16}}, {"up", {44, 0, 60, 16}}}, gap8());
    REQUIRE(out.size() == 1);
    CHECK(out[0].text == "Sign up");
    CHECK(out[0].box == BoundingBox{0, 0, 60, 16});
}

TEST_CASE("distant blocks stay apart") {
    const auto out = merge_ocr_blocks({{"Left", {0, 0, 40, 16}}, {"Right", {540, 0, 600, 16}}}, gap8());
    CHECK(out.size() == 2);
}

TEST_CASE("two-line notice merges into one block") {
    const std::vector<OcrBlock> words = {
        {"We", {40, 40, 58, 60}},   {"use", {64, 40, 91, 60}},  {"cookies", {97, 40, 160, 60}},
        {"and", {40, 64, 67, 84}},  {"more", {73, 64, 109, 84}},
    };
    const auto out = merge_ocr_blocks(words, {});
    REQUIRE(out.size() == 1);
    CHECK(out[0].text == "We use cookies\nand more");
    CHECK(out[0].box == BoundingBox{40, 40, 160, 84});
}

TEST_CASE("merge is idempotent on random layouts") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> pos(0, 400);
    std::uniform_int_distribution<int> w(5, 60);
    std::uniform_int_distribution<int> h(10, 24);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<OcrBlock> blocks;
        for (int i = 0; i < 12; ++i) {
            const int x = pos(rng), y = pos(rng);
            blocks.push_back({"w" + std::to_string(i), {x, y, x + w(rng), y + h(rng)}});
        }
        const auto once = merge_ocr_blocks(blocks, {});
        CHECK(merge_ocr_blocks(once, {}) == once);
    }
}

TEST_CASE("text_features font size and colours") {
    Raster img(300, 200, kWhite);
    const auto tb = text_features(img, {"x", {100, 120, 220, 138}}, {});
    CHECK(tb.font_size == 18);

    // 85% white, 15% black.
    Raster patch(20, 10, kWhite);
    patch.fill({0, 0, 3, 10}, kBlack);
    const auto f = text_features(patch, {"t", {0, 0, 20, 10}}, {});
    CHECK(f.bg_color == kWhite);
    CHECK(f.font_color == kBlack);
    CHECK_FALSE(f.color_fallback);

    Raster red(10, 10, Rgb{0xFF, 0, 0});
    const auto m = text_features(red, {"r", {0, 0, 10, 10}}, {});
    CHECK(m.bg_color == Rgb{0xFF, 0, 0});
    CHECK(m.color_fallback);
    CHECK(m.font_color == Rgb{0, 0xFF, 0xFF});

    CHECK_THROWS_AS(text_features(img, {"z", {5, 5, 5, 20}}, {}), InvalidArgument);
}

TEST_CASE("text_features agrees with the histogram oracle") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> byte(0, 255);
    std::uniform_int_distribution<int> pick(0, 3);
    for (int trial = 0; trial < 100; ++trial) {
        Raster img(24, 16);
        std::array<Rgb, 4> palette;
        for (auto& c : palette) {
            c = {static_cast<std::uint8_t>(byte(rng)), static_cast<std::uint8_t>(byte(rng)),
                 static_cast<std::uint8_t>(byte(rng))};
        }
        for (int y = 0; y < 16; ++y) {
            for (int x = 0; x < 24; ++x) {
                // Skew towards palette[0] so there is usually a clear background.
                const int p = pick(rng);
                img.set(x, y, palette[static_cast<std::size_t>(p == 3 ? pick(rng) : (p == 2 ? 1 : 0))]);
            }
        }
        const BoundingBox box{2, 1, 22, 15};
        const auto got = text_features(img, {"t", box}, {});
        const auto want = oracle::colors(img, box, 8);
        CHECK(got.bg_color == want.bg);
        CHECK(got.font_color == want.font);
        CHECK(got.color_fallback == want.fallback);
    }
}

TEST_CASE("fusion rules") {
    VisionConfig cfg;
    const std::vector<Detection> a = {{UIElementKind::button, {0, 0, 100, 40}, 0.9, "a"}};
    const std::vector<Detection> b = {{UIElementKind::radio_checked, {2, 1, 98, 41}, 0.6, "b"}};
    auto out = fuse_detections({a, b}, cfg);
    REQUIRE(out.size() == 1);
    CHECK(out[0].kind == UIElementKind::button);

    const std::vector<Detection> far = {{UIElementKind::toggle_on, {300, 300, 340, 320}, 0.5, "b"}};
    CHECK(fuse_detections({a, far}, cfg).size() == 2);

    // Equal confidence keeps the earlier backend.
    const std::vector<Detection> tie = {{UIElementKind::radio_checked, {0, 0, 100, 40}, 0.9, "b"}};
    out = fuse_detections({a, tie}, cfg);
    REQUIRE(out.size() == 1);
    CHECK(out[0].source == "a");

    // The confidence gate keeps 0.3 and drops anything below it.
    const std::vector<Detection> low = {{UIElementKind::button, {0, 0, 10, 10}, 0.3, "a"},
                                        {UIElementKind::button, {50, 50, 60, 60}, 0.29, "a"}};
    out = fuse_detections({low}, cfg);
    REQUIRE(out.size() == 1);
    CHECK(out[0].confidence == 0.3);
}

TEST_CASE("fusion agrees with the pairwise oracle") {
    std::mt19937_64 rng(99);
    VisionConfig cfg;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<std::vector<Detection>> per = {random_dets(rng, 7, "a"), random_dets(rng, 7, "b"),
                                                   random_dets(rng, 6, "c")};
        const auto got = fuse_detections(per, cfg);
        const auto want = oracle::fuse(per, cfg.fusion_overlap_iou, cfg.min_confidence);
        CHECK(got == want);

        std::size_t total = 0;
        for (const auto& l : per) total += l.size();
        CHECK(got.size() <= total);
        for (std::size_t i = 0; i < got.size(); ++i) {
            for (std::size_t j = i + 1; j < got.size(); ++j) {
                if (got[i].source != got[j].source) CHECK(iou(got[i].box, got[j].box) < cfg.fusion_overlap_iou);
            }
        }
        auto shuffled = per;
        std::shuffle(shuffled[1].begin(), shuffled[1].end(), rng);
        CHECK(fuse_detections(shuffled, cfg) == got);
    }
}

TEST_CASE("run_vision") {
    Raster img(50, 50);
    ScriptedOcr ocr({});
    ScriptedDetector det({});
    const auto empty = run_vision(img, ocr, {&det}, {});
    CHECK(empty.texts.empty());
    CHECK(empty.detections.empty());

    FailingDetector broken;
    try {
        run_vision(img, ocr, {&det, &broken}, {});
        FAIL("expected an error");
    } catch (const BackendError& e) {
        CHECK(e.backend() == "broken-yolo");
    }
    FailingOcr bad_ocr;
    try {
        run_vision(img, bad_ocr, {&det}, {});
        FAIL("expected an error");
    } catch (const BackendError& e) {
        CHECK(e.backend() == "broken-ocr");
    }
}

TEST_CASE("run_vision equals its parts on a fixture") {
    scenes::Stubs s("cookie_banner");
    const auto b = s.backends();
    VisionConfig cfg;
    const auto got = run_vision(s.image, *b.ocr, b.detectors, cfg);
    const auto merged = merge_ocr_blocks(s.ocr->recognize(s.image), cfg);
    REQUIRE(got.texts.size() == merged.size());
    for (std::size_t i = 0; i < merged.size(); ++i) {
        CHECK(got.texts[i] == text_features(s.image, merged[i], cfg));
    }
    std::vector<std::vector<Detection>> per;
    for (auto* d : b.detectors) per.push_back(d->detect(s.image));
    CHECK(got.detections == fuse_detections(per, cfg));
    CHECK(got.texts.front().text == "We use cookies to personalise content\nand to analyse our traffic.");
}

TEST_CASE("config validation") {
    VisionConfig cfg;
    cfg.min_confidence = 1.5;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.color_quantization_step = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

}
