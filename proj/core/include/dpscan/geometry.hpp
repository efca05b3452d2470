#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace dpscan {

/// Axis-aligned pixel box in screen space, origin top-left, x2/y2 exclusive.
struct BoundingBox {
    int x1 = 0;
    int y1 = 0;
    int x2 = 0;
    int y2 = 0;

    /// Throws InvalidArgument unless 0 <= x1 <= x2 and 0 <= y1 <= y2.
    static BoundingBox make(int x1, int y1, int x2, int y2);
    /// Detector outputs are fractional; rounds half-up and clamps negatives to 0.
    static BoundingBox from_fractional(double x1, double y1, double x2, double y2);

    bool valid() const noexcept { return x1 >= 0 && y1 >= 0 && x1 <= x2 && y1 <= y2; }
    int width() const noexcept { return x2 - x1; }
    int height() const noexcept { return y2 - y1; }
    std::int64_t area() const noexcept {
        return static_cast<std::int64_t>(width()) * static_cast<std::int64_t>(height());
    }
    double center_x() const noexcept { return 0.5 * (x1 + x2); }
    double center_y() const noexcept { return 0.5 * (y1 + y2); }

    friend auto operator<=>(const BoundingBox&, const BoundingBox&) = default;
};

std::string to_string(const BoundingBox& box);

/// Round half-up, the ingestion rule for fractional coordinates.
int round_half_up(double v) noexcept;

/// Area of the overlap, 0 when disjoint.
std::int64_t intersection_area(const BoundingBox& a, const BoundingBox& b) noexcept;

/// Tight union of two boxes.
BoundingBox union_box(const BoundingBox& a, const BoundingBox& b) noexcept;

/// Intersection over union. 0 when the union is empty.
double iou(const BoundingBox& a, const BoundingBox& b) noexcept;

/// Horizontal distance between the boxes' extents; 0 when they overlap on x.
int horizontal_gap(const BoundingBox& a, const BoundingBox& b) noexcept;

/// Length of the overlap of the two y-extents (0 if none).
int vertical_overlap(const BoundingBox& a, const BoundingBox& b) noexcept;

/// Euclidean distance between box centres.
double center_distance(const BoundingBox& a, const BoundingBox& b) noexcept;

}  // namespace dpscan
