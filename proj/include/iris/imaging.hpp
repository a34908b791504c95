#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

namespace iris {

/// Row-major grayscale raster with intensities in [0,1].
class GrayImage {
public:
    GrayImage() = default;
    GrayImage(int width, int height, double fill = 0.0);
    GrayImage(int width, int height, std::vector<double> data);

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return data_.empty(); }

    double at(int x, int y) const { return data_[index(x, y)]; }
    double& at(int x, int y) { return data_[index(x, y)]; }

    /// Edge-clamped access: coordinates outside the raster read the nearest border pixel.
    double clamped(int x, int y) const;

    /// Bilinear sample at a subpixel location; coordinates are clamped to the raster.
    double bilinear(double x, double y) const;

    const std::vector<double>& data() const { return data_; }
    std::vector<double>& data() { return data_; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// Sobel derivatives plus the derived magnitude/orientation grids.
///
/// `gx`/`gy` are the raw derivative responses and are kept so that the
/// magnitude can be recomputed with directional weighting. `magnitude` is
/// scaled so its global maximum is 1 (all zeros for a constant image).
struct GradientField {
    int width = 0;
    int height = 0;
    std::vector<double> gx;
    std::vector<double> gy;
    std::vector<double> magnitude;
    std::vector<double> orientation;  // atan2(gy, gx), radians in (-pi, pi]

    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
               static_cast<std::size_t>(x);
    }
    double mag(int x, int y) const { return magnitude[index(x, y)]; }
};

/// Decodes a binary 8-bit PGM (P5, maxval 255). Intensities are byte / 255.
GrayImage load_gray_image(const std::filesystem::path& path);

/// Writes a P5 PGM; intensities are rounded to the nearest byte.
void save_gray_image(const GrayImage& img, const std::filesystem::path& path);

/// Separable Gaussian blur, kernel radius ceil(3*sigma), edge-clamped borders.
GrayImage gaussian_smooth(const GrayImage& img, double sigma);

/// Normalized 1-D Gaussian taps of radius ceil(3*sigma).
std::vector<double> gaussian_kernel(double sigma);

GradientField compute_gradient(const GrayImage& img);

/// Recomputes magnitude as sqrt((w*gx)^2 + gy^2) and rescales it to max 1.
/// w = 1 leaves the field unchanged; w = 0 keeps only vertical intensity change.
GradientField weight_vertical_gradient(const GradientField& field, double horizontal_weight);

}  // namespace iris
