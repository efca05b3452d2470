#include "dpscan/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "dpscan/errors.hpp"

namespace dpscan {

BoundingBox BoundingBox::make(int x1, int y1, int x2, int y2) {
    BoundingBox b{x1, y1, x2, y2};
    if (!b.valid()) {
        throw InvalidArgument("invalid bounding box " + to_string(b));
    }
    return b;
}

int round_half_up(double v) noexcept { return static_cast<int>(std::floor(v + 0.5)); }

BoundingBox BoundingBox::from_fractional(double x1, double y1, double x2, double y2) {
    auto px = [](double v) { return std::max(0, round_half_up(v)); };
    return make(px(x1), px(y1), px(x2), px(y2));
}

std::string to_string(const BoundingBox& b) {
    return "(" + std::to_string(b.x1) + "," + std::to_string(b.y1) + "," + std::to_string(b.x2) +
           "," + std::to_string(b.y2) + ")";
}

std::int64_t intersection_area(const BoundingBox& a, const BoundingBox& b) noexcept {
    const std::int64_t w = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
    const std::int64_t h = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
    if (w <= 0 || h <= 0) return 0;
    return w * h;
}

BoundingBox union_box(const BoundingBox& a, const BoundingBox& b) noexcept {
    return {std::min(a.x1, b.x1), std::min(a.y1, b.y1), std::max(a.x2, b.x2),
            std::max(a.y2, b.y2)};
}

double iou(const BoundingBox& a, const BoundingBox& b) noexcept {
    const std::int64_t inter = intersection_area(a, b);
    const std::int64_t uni = a.area() + b.area() - inter;
    if (uni <= 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

int horizontal_gap(const BoundingBox& a, const BoundingBox& b) noexcept {
    return std::max({0, b.x1 - a.x2, a.x1 - b.x2});
}

int vertical_overlap(const BoundingBox& a, const BoundingBox& b) noexcept {
    return std::max(0, std::min(a.y2, b.y2) - std::max(a.y1, b.y1));
}

double center_distance(const BoundingBox& a, const BoundingBox& b) noexcept {
    return std::hypot(a.center_x() - b.center_x(), a.center_y() - b.center_y());
}

}  // namespace dpscan
