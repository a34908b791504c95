#include "iris/normalization.hpp"

#include "iris/binary_io.hpp"
#include "iris/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace iris {

IrisTemplate::IrisTemplate(int radial_res, int angular_res, std::string label)
    : IrisTemplate(radial_res, angular_res,
                   std::vector<double>(static_cast<std::size_t>(std::max(radial_res, 0)) *
                                       static_cast<std::size_t>(std::max(angular_res, 0))),
                   std::move(label)) {}

IrisTemplate::IrisTemplate(int radial_res, int angular_res, std::vector<double> values,
                           std::string label)
    : radial_res_(radial_res),
      angular_res_(angular_res),
      values_(std::move(values)),
      label_(std::move(label)) {
    if (radial_res <= 0 || angular_res <= 0) {
        throw ArgumentError("IrisTemplate: resolutions must be positive");
    }
    if (values_.size() != static_cast<std::size_t>(radial_res) * angular_res) {
        throw ArgumentError("IrisTemplate: value count does not match resolution");
    }
}

std::vector<double> IrisTemplate::column(int col) const {
    std::vector<double> out(static_cast<std::size_t>(radial_res_));
    for (int r = 0; r < radial_res_; ++r) out[static_cast<std::size_t>(r)] = at(r, col);
    return out;
}

RadialSpan radial_extent(const IrisLocalization& loc, double theta) {
    const double ux = std::cos(theta);
    const double uy = std::sin(theta);
    const double px = loc.iris.cx - loc.pupil.cx;
    const double py = loc.iris.cy - loc.pupil.cy;
    const double pu = px * ux + py * uy;
    const double disc = pu * pu - (px * px + py * py) + loc.iris.r * loc.iris.r;
    const double r_prime = pu + std::sqrt(std::max(disc, 0.0));

    RadialSpan span;
    span.theta = theta;
    span.r_prime = r_prime;
    span.inner_point = {loc.pupil.cx + loc.pupil.r * ux, loc.pupil.cy + loc.pupil.r * uy};
    span.outer_point = {loc.pupil.cx + r_prime * ux, loc.pupil.cy + r_prime * uy};
    return span;
}

IrisTemplate unwrap(const GrayImage& img, const IrisLocalization& loc, int radial_res,
                    int angular_res) {
    if (radial_res < 2 || angular_res < 4) {
        throw ArgumentError("unwrap: need radial_res >= 2 and angular_res >= 4");
    }
    IrisTemplate out(radial_res, angular_res);
    for (int j = 0; j < angular_res; ++j) {
        const double theta = 2.0 * std::numbers::pi * j / angular_res;
        const RadialSpan span = radial_extent(loc, theta);
        const double dx = span.outer_point.x - span.inner_point.x;
        const double dy = span.outer_point.y - span.inner_point.y;
        for (int i = 0; i < radial_res; ++i) {
            const double f = (i + 0.5) / radial_res;
            out.at(i, j) = img.bilinear(span.inner_point.x + f * dx, span.inner_point.y + f * dy);
        }
    }
    return out;
}

IrisTemplate rotate_template(const IrisTemplate& t, int shift) {
    const int n = t.angular_res();
    if (n == 0) return t;
    const int s = ((shift % n) + n) % n;
    IrisTemplate out(t.radial_res(), n, t.label());
    for (int r = 0; r < t.radial_res(); ++r) {
        for (int j = 0; j < n; ++j) out.at(r, (j + s) % n) = t.at(r, j);
    }
    return out;
}

void save_template(const IrisTemplate& t, const std::filesystem::path& path) {
    const std::string& label = t.label();
    if (std::any_of(label.begin(), label.end(), [](unsigned char c) { return std::isspace(c); })) {
        throw ArgumentError("template label must not contain whitespace: '" + label + "'");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write template " + path.string());
    out << "IRT1 " << t.radial_res() << ' ' << t.angular_res() << ' '
        << (label.empty() ? "-" : label) << '\n';
    for (double v : t.values()) binary_io::write_f64(out, v);
    if (!out) throw IoError("failed writing template " + path.string());
}

IrisTemplate load_template(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open template " + path.string());
    std::string header;
    if (!std::getline(in, header)) throw FormatError(path.string() + ": missing IRT1 header");
    std::istringstream hs(header);
    std::string magic;
    std::string label;
    int radial = 0;
    int angular = 0;
    if (!(hs >> magic >> radial >> angular >> label) || magic != "IRT1") {
        throw FormatError(path.string() + ": malformed IRT1 header '" + header + "'");
    }
    if (radial <= 0 || angular <= 0) {
        throw FormatError(path.string() + ": non-positive template resolution");
    }
    std::vector<double> values(static_cast<std::size_t>(radial) * angular);
    for (double& v : values) {
        if (!binary_io::read_f64(in, v)) throw FormatError(path.string() + ": truncated template");
    }
    return IrisTemplate(radial, angular, std::move(values), label == "-" ? std::string{} : label);
}

}  // namespace iris
