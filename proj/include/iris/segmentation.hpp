#pragma once

#include "iris/imaging.hpp"

#include <optional>
#include <vector>

namespace iris {

/// Boolean edge raster produced by hysteresis thresholding.
struct EdgeMap {
    int width = 0;
    int height = 0;
    std::vector<unsigned char> edges;

    EdgeMap() = default;
    EdgeMap(int w, int h) : width(w), height(h), edges(static_cast<std::size_t>(w) * h, 0) {}

    bool at(int x, int y) const { return edges[static_cast<std::size_t>(y) * width + x] != 0; }
    void set(int x, int y, bool v = true) {
        edges[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
    }
    std::size_t count() const;
};

struct Circle {
    double cx = 0.0;
    double cy = 0.0;
    double r = 0.0;

    friend bool operator==(const Circle&, const Circle&) = default;
};

/// Pupil (inner) and limbic (outer) boundaries of one eye.
struct IrisLocalization {
    Circle pupil;
    Circle iris;

    /// Pupil center offset from the iris center (ox, oy).
    double offset_x() const { return pupil.cx - iris.cx; }
    double offset_y() const { return pupil.cy - iris.cy; }

    /// pupil.r < iris.r and the pupil disk lies strictly inside the iris disk.
    bool plausible() const;
};

/// Inclusive integer box restricting Hough candidate centers.
struct CenterRegion {
    int x_min = 0;
    int x_max = 0;
    int y_min = 0;
    int y_max = 0;
};

struct HoughResult {
    Circle circle;
    int votes = 0;
    double vote_fraction = 0.0;  // votes / (2*pi*r)
};

struct LocalizationConfig {
    double sigma = 2.0;
    double t_high = 0.2;
    double t_low = 0.19;
    double horizontal_weight = 0.0;  // outer-boundary pass only
    int iris_r_min = 90;
    int iris_r_max = 150;
    int pupil_r_min = 25;
    int pupil_r_max = 75;
    int pupil_center_slack = 30;
};

/// Interpolated non-maximum suppression along the gradient direction.
/// A pixel keeps its magnitude iff it is not smaller than either interpolated
/// neighbor value; borders read edge-clamped neighbors.
GradientField non_max_suppression(const GradientField& field);

/// Two-threshold hysteresis: seeds at >= t_high grow through 8-connected
/// pixels at >= t_low.
EdgeMap hysteresis_threshold(const GradientField& field, double t_high, double t_low);

/// Integer (dx, dy) offsets whose length lies within half a pixel of r.
std::vector<std::pair<int, int>> ring_offsets(int r);

/// Circular Hough transform over integer (cx, cy, r).
///
/// An edge pixel p votes for center c at radius r iff | |p - c| - r | < 0.5.
/// The maximum accumulator cell wins; ties go to smaller r, then smaller cy,
/// then smaller cx. Throws LocalizationError when nothing votes.
HoughResult circular_hough(const EdgeMap& edges, int r_min, int r_max,
                           std::optional<CenterRegion> center_search = std::nullopt);

/// Full Canny + Hough pipeline: limbic boundary first (vertically weighted
/// gradient, whole image), then the pupil within a box around the iris center.
IrisLocalization localize_iris(const GrayImage& img, const LocalizationConfig& cfg = {});

/// Edge map stage shared by both localization passes, exposed for the CLI overlay.
EdgeMap detect_edges(const GradientField& field, double t_high, double t_low);

/// Rasterizes the circle outline into `img` with intensity `value`.
void draw_circle(GrayImage& img, const Circle& c, double value = 1.0);

}  // namespace iris
