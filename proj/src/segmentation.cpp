#include "iris/segmentation.hpp"

#include "iris/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace iris {

std::size_t EdgeMap::count() const {
    return static_cast<std::size_t>(std::count(edges.begin(), edges.end(), 1));
}

bool IrisLocalization::plausible() const {
    if (!(pupil.r > 0.0) || !(iris.r > 0.0) || !(pupil.r < iris.r)) return false;
    return std::hypot(offset_x(), offset_y()) + pupil.r < iris.r;
}

namespace {

double clamped_mag(const GradientField& f, int x, int y) {
    x = std::clamp(x, 0, f.width - 1);
    y = std::clamp(y, 0, f.height - 1);
    return f.magnitude[f.index(x, y)];
}

// Magnitude where the gradient line leaving (x, y) in direction (dx, dy)
// crosses the ring of 8 neighbors, interpolated between the two neighbors
// straddling the crossing.
double neighbor_along(const GradientField& f, int x, int y, double dx, double dy) {
    const int sx = dx >= 0.0 ? 1 : -1;
    const int sy = dy >= 0.0 ? 1 : -1;
    const double ax = std::abs(dx);
    const double ay = std::abs(dy);
    if (ax >= ay) {
        const double t = ax > 0.0 ? ay / ax : 0.0;
        return (1.0 - t) * clamped_mag(f, x + sx, y) + t * clamped_mag(f, x + sx, y + sy);
    }
    const double t = ax / ay;
    return (1.0 - t) * clamped_mag(f, x, y + sy) + t * clamped_mag(f, x + sx, y + sy);
}

}  // namespace

GradientField non_max_suppression(const GradientField& field) {
    if (field.width < 3 || field.height < 3) {
        throw ArgumentError("non_max_suppression: field must be at least 3x3");
    }
    GradientField out = field;
    for (int y = 0; y < field.height; ++y) {
        for (int x = 0; x < field.width; ++x) {
            const std::size_t i = field.index(x, y);
            const double m = field.magnitude[i];
            if (m <= 0.0) continue;
            const double dx = std::cos(field.orientation[i]);
            const double dy = std::sin(field.orientation[i]);
            const double ahead = neighbor_along(field, x, y, dx, dy);
            const double behind = neighbor_along(field, x, y, -dx, -dy);
            if (m < ahead || m < behind) out.magnitude[i] = 0.0;
        }
    }
    return out;
}

EdgeMap hysteresis_threshold(const GradientField& field, double t_high, double t_low) {
    if (!(t_low > 0.0 && t_low <= t_high && t_high <= 1.0)) {
        throw ArgumentError("hysteresis thresholds must satisfy 0 < t_low <= t_high <= 1");
    }
    EdgeMap map(field.width, field.height);
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < field.height; ++y) {
        for (int x = 0; x < field.width; ++x) {
            if (map.at(x, y) || field.mag(x, y) < t_high) continue;
            map.set(x, y);
            stack.emplace_back(x, y);
            while (!stack.empty()) {
                const auto [px, py] = stack.back();
                stack.pop_back();
                for (int ny = py - 1; ny <= py + 1; ++ny) {
                    for (int nx = px - 1; nx <= px + 1; ++nx) {
                        if (nx < 0 || ny < 0 || nx >= field.width || ny >= field.height) continue;
                        if (map.at(nx, ny) || field.mag(nx, ny) < t_low) continue;
                        map.set(nx, ny);
                        stack.emplace_back(nx, ny);
                    }
                }
            }
        }
    }
    return map;
}

EdgeMap detect_edges(const GradientField& field, double t_high, double t_low) {
    return hysteresis_threshold(non_max_suppression(field), t_high, t_low);
}

std::vector<std::pair<int, int>> ring_offsets(int r) {
    std::vector<std::pair<int, int>> out;
    const int reach = r + 1;
    for (int dy = -reach; dy <= reach; ++dy) {
        for (int dx = -reach; dx <= reach; ++dx) {
            const double d = std::sqrt(static_cast<double>(dx * dx + dy * dy));
            if (std::abs(d - r) < 0.5) out.emplace_back(dx, dy);
        }
    }
    return out;
}

HoughResult circular_hough(const EdgeMap& edges, int r_min, int r_max,
                           std::optional<CenterRegion> center_search) {
    if (!(r_min > 0 && r_min < r_max)) {
        throw ArgumentError("circular_hough: require 0 < r_min < r_max");
    }
    std::vector<std::pair<int, int>> points;
    for (int y = 0; y < edges.height; ++y) {
        for (int x = 0; x < edges.width; ++x) {
            if (edges.at(x, y)) points.emplace_back(x, y);
        }
    }
    if (points.empty()) {
        throw LocalizationError("no boundary found: edge map is empty");
    }

    CenterRegion box = center_search.value_or(
        CenterRegion{0, edges.width - 1, 0, edges.height - 1});
    box.x_min = std::max(box.x_min, 0);
    box.y_min = std::max(box.y_min, 0);
    box.x_max = std::min(box.x_max, edges.width - 1);
    box.y_max = std::min(box.y_max, edges.height - 1);
    if (box.x_min > box.x_max || box.y_min > box.y_max) {
        throw LocalizationError("no boundary found: center search region is outside the image");
    }
    const int bw = box.x_max - box.x_min + 1;
    const int bh = box.y_max - box.y_min + 1;
    std::vector<int> acc(static_cast<std::size_t>(bw) * static_cast<std::size_t>(bh));

    HoughResult best;
    for (int r = r_min; r <= r_max; ++r) {
        std::fill(acc.begin(), acc.end(), 0);
        const auto offsets = ring_offsets(r);
        const double reach = r + 0.5;
        for (const auto& [px, py] : points) {
            // Distance range from p to the box; skip pixels that cannot reach it.
            const double nx = std::clamp(px, box.x_min, box.x_max) - px;
            const double ny = std::clamp(py, box.y_min, box.y_max) - py;
            if (nx * nx + ny * ny > reach * reach) continue;
            const double fx = std::max(std::abs(px - box.x_min), std::abs(px - box.x_max));
            const double fy = std::max(std::abs(py - box.y_min), std::abs(py - box.y_max));
            if (fx * fx + fy * fy < (r - 0.5) * (r - 0.5)) continue;

            for (const auto& [dx, dy] : offsets) {
                const int cx = px - dx - box.x_min;
                const int cy = py - dy - box.y_min;
                if (static_cast<unsigned>(cx) >= static_cast<unsigned>(bw) ||
                    static_cast<unsigned>(cy) >= static_cast<unsigned>(bh)) {
                    continue;
                }
                ++acc[static_cast<std::size_t>(cy) * bw + cx];
            }
        }
        for (int cy = 0; cy < bh; ++cy) {
            for (int cx = 0; cx < bw; ++cx) {
                const int v = acc[static_cast<std::size_t>(cy) * bw + cx];
                if (v > best.votes) {
                    best.votes = v;
                    best.circle = Circle{static_cast<double>(cx + box.x_min),
                                         static_cast<double>(cy + box.y_min),
                                         static_cast<double>(r)};
                }
            }
        }
    }
    if (best.votes == 0) {
        throw LocalizationError("no boundary found: Hough accumulator is empty");
    }
    best.vote_fraction =
        std::min(1.0, best.votes / (2.0 * std::numbers::pi * best.circle.r));
    return best;
}

IrisLocalization localize_iris(const GrayImage& img, const LocalizationConfig& cfg) {
    if (std::min(img.width(), img.height()) < 2 * cfg.iris_r_min) {
        throw ArgumentError("localize_iris: image too small for the configured iris radius range");
    }
    const GradientField gradient = compute_gradient(gaussian_smooth(img, cfg.sigma));

    IrisLocalization loc;
    try {
        const EdgeMap outer =
            detect_edges(weight_vertical_gradient(gradient, cfg.horizontal_weight), cfg.t_high,
                         cfg.t_low);
        loc.iris = circular_hough(outer, cfg.iris_r_min, cfg.iris_r_max).circle;
    } catch (const LocalizationError& e) {
        throw LocalizationError(std::string("iris boundary: ") + e.what());
    }

    try {
        const EdgeMap inner = detect_edges(gradient, cfg.t_high, cfg.t_low);
        const int icx = static_cast<int>(loc.iris.cx);
        const int icy = static_cast<int>(loc.iris.cy);
        const int slack = cfg.pupil_center_slack;
        loc.pupil = circular_hough(inner, cfg.pupil_r_min, cfg.pupil_r_max,
                                   CenterRegion{icx - slack, icx + slack, icy - slack, icy + slack})
                        .circle;
    } catch (const LocalizationError& e) {
        throw LocalizationError(std::string("pupil boundary: ") + e.what());
    }

    if (!loc.plausible()) {
        throw LocalizationError("implausible geometry: pupil is not inside the iris");
    }
    return loc;
}

void draw_circle(GrayImage& img, const Circle& c, double value) {
    const int steps = std::max(64, static_cast<int>(std::ceil(2.0 * std::numbers::pi * c.r * 2.0)));
    for (int k = 0; k < steps; ++k) {
        const double t = 2.0 * std::numbers::pi * k / steps;
        const int x = static_cast<int>(std::lround(c.cx + c.r * std::cos(t)));
        const int y = static_cast<int>(std::lround(c.cy + c.r * std::sin(t)));
        if (x >= 0 && y >= 0 && x < img.width() && y < img.height()) img.at(x, y) = value;
    }
}

}  // namespace iris
