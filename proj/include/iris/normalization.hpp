#pragma once

#include "iris/imaging.hpp"
#include "iris/segmentation.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace iris {

/// Unwrapped iris strip: rows are radial samples (pupil side first), columns
/// are angles theta_j = 2*pi*j / angular_res.
class IrisTemplate {
public:
    IrisTemplate() = default;
    IrisTemplate(int radial_res, int angular_res, std::string label = {});
    IrisTemplate(int radial_res, int angular_res, std::vector<double> values,
                 std::string label = {});

    int radial_res() const { return radial_res_; }
    int angular_res() const { return angular_res_; }

    double at(int row, int col) const { return values_[index(row, col)]; }
    double& at(int row, int col) { return values_[index(row, col)]; }

    /// Copy of one column (one radial profile).
    std::vector<double> column(int col) const;

    const std::vector<double>& values() const { return values_; }
    const std::string& label() const { return label_; }
    void set_label(std::string label) { label_ = std::move(label); }

    friend bool operator==(const IrisTemplate&, const IrisTemplate&) = default;

private:
    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(angular_res_) +
               static_cast<std::size_t>(col);
    }

    int radial_res_ = 0;
    int angular_res_ = 0;
    std::vector<double> values_;
    std::string label_;
};

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

/// One radial line of the rubber sheet at angle theta around the pupil center.
struct RadialSpan {
    double theta = 0.0;
    Point2 inner_point;  // on the pupil boundary
    Point2 outer_point;  // on the iris boundary
    double r_prime = 0.0;  // pupil center to outer_point
};

/// Distance from the pupil center to the iris boundary along angle theta.
///
/// With p the iris center relative to the pupil center and u the ray
/// direction, r' = p.u + sqrt((p.u)^2 - |p|^2 + r_iris^2), the positive
/// root of the ray/circle intersection. Concentric circles give r' = r_iris.
RadialSpan radial_extent(const IrisLocalization& loc, double theta);

/// Rubber-sheet unwrap: radial_res samples per ray at fractions (i+0.5)/radial_res
/// between the pupil and iris boundaries, angular_res rays, bilinear sampling.
IrisTemplate unwrap(const GrayImage& img, const IrisLocalization& loc, int radial_res = 20,
                    int angular_res = 480);

/// Cyclic column shift; positive moves columns rightward (out[j] = in[j - shift]).
IrisTemplate rotate_template(const IrisTemplate& t, int shift);

/// IRT1: "IRT1 <radial> <angular> <label>\n" then row-major little-endian f64 values.
void save_template(const IrisTemplate& t, const std::filesystem::path& path);
IrisTemplate load_template(const std::filesystem::path& path);

}  // namespace iris
