#include "iris/imaging.hpp"

#include "iris/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

namespace iris {

GrayImage::GrayImage(int width, int height, double fill)
    : GrayImage(width, height,
                std::vector<double>(static_cast<std::size_t>(std::max(width, 0)) *
                                        static_cast<std::size_t>(std::max(height, 0)),
                                    fill)) {}

GrayImage::GrayImage(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
    if (width <= 0 || height <= 0) {
        throw ArgumentError("GrayImage: dimensions must be positive");
    }
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw ArgumentError("GrayImage: data length does not match width x height");
    }
}

double GrayImage::clamped(int x, int y) const {
    x = std::clamp(x, 0, width_ - 1);
    y = std::clamp(y, 0, height_ - 1);
    return at(x, y);
}

double GrayImage::bilinear(double x, double y) const {
    x = std::clamp(x, 0.0, static_cast<double>(width_ - 1));
    y = std::clamp(y, 0.0, static_cast<double>(height_ - 1));
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, width_ - 1);
    const int y1 = std::min(y0 + 1, height_ - 1);
    const double fx = x - x0;
    const double fy = y - y0;
    const double top = at(x0, y0) * (1.0 - fx) + at(x1, y0) * fx;
    const double bottom = at(x0, y1) * (1.0 - fx) + at(x1, y1) * fx;
    return top * (1.0 - fy) + bottom * fy;
}

namespace {

// Reads one whitespace-delimited PGM header token, skipping '#' comments.
std::string next_token(std::istream& in) {
    std::string token;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            if (!token.empty()) break;
        } else {
            token.push_back(static_cast<char>(c));
        }
        c = in.get();
    }
    return token;
}

int parse_header_int(const std::string& token, const char* field,
                     const std::filesystem::path& path) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw FormatError(path.string() + ": invalid PGM " + field + " '" + token + "'");
    }
}

}  // namespace

GrayImage load_gray_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open image " + path.string());
    }
    const std::string magic = next_token(in);
    if (magic != "P5") {
        throw FormatError(path.string() + ": unsupported PGM magic '" + magic +
                          "' (only binary P5 is accepted)");
    }
    const int width = parse_header_int(next_token(in), "width", path);
    const int height = parse_header_int(next_token(in), "height", path);
    const std::string maxval_tok = next_token(in);
    const int maxval = parse_header_int(maxval_tok, "maxval", path);
    if (width <= 0 || height <= 0) {
        throw FormatError(path.string() + ": non-positive PGM dimensions");
    }
    if (maxval != 255) {
        throw FormatError(path.string() + ": unsupported PGM maxval " + maxval_tok +
                          " (only 255 is accepted)");
    }
    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    std::vector<unsigned char> bytes(count);
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in.gcount()) != count) {
        throw IoError(path.string() + ": truncated pixel data");
    }
    std::vector<double> data(count);
    std::transform(bytes.begin(), bytes.end(), data.begin(),
                   [](unsigned char b) { return static_cast<double>(b) / 255.0; });
    return GrayImage(width, height, std::move(data));
}

void save_gray_image(const GrayImage& img, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write image " + path.string());
    }
    out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
    std::vector<unsigned char> bytes(img.data().size());
    std::transform(img.data().begin(), img.data().end(), bytes.begin(), [](double v) {
        return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    });
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("failed writing image " + path.string());
    }
}

std::vector<double> gaussian_kernel(double sigma) {
    if (!(sigma > 0.0)) {
        throw ArgumentError("gaussian sigma must be positive");
    }
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-(i * i) / (2.0 * sigma * sigma));
        taps[static_cast<std::size_t>(i + radius)] = v;
        sum += v;
    }
    for (double& t : taps) t /= sum;
    return taps;
}

GrayImage gaussian_smooth(const GrayImage& img, double sigma) {
    const std::vector<double> taps = gaussian_kernel(sigma);
    const int radius = static_cast<int>(taps.size() / 2);
    const int w = img.width();
    const int h = img.height();

    GrayImage rows(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += taps[static_cast<std::size_t>(k + radius)] * img.clamped(x + k, y);
            }
            rows.at(x, y) = acc;
        }
    }
    GrayImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int k = -radius; k <= radius; ++k) {
                acc += taps[static_cast<std::size_t>(k + radius)] * rows.clamped(x, y + k);
            }
            out.at(x, y) = std::clamp(acc, 0.0, 1.0);
        }
    }
    return out;
}

namespace {

void rescale_to_unit_max(std::vector<double>& values) {
    const double peak = values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
    if (peak > 0.0) {
        for (double& v : values) v /= peak;
    }
}

}  // namespace

GradientField compute_gradient(const GrayImage& img) {
    if (img.width() < 3 || img.height() < 3) {
        throw ArgumentError("compute_gradient: image must be at least 3x3");
    }
    GradientField f;
    f.width = img.width();
    f.height = img.height();
    const std::size_t n = img.data().size();
    f.gx.resize(n);
    f.gy.resize(n);
    f.magnitude.resize(n);
    f.orientation.resize(n);

    for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x) {
            const double tl = img.clamped(x - 1, y - 1);
            const double tc = img.clamped(x, y - 1);
            const double tr = img.clamped(x + 1, y - 1);
            const double ml = img.clamped(x - 1, y);
            const double mr = img.clamped(x + 1, y);
            const double bl = img.clamped(x - 1, y + 1);
            const double bc = img.clamped(x, y + 1);
            const double br = img.clamped(x + 1, y + 1);
            const double gx = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl);
            const double gy = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr);
            const std::size_t i = f.index(x, y);
            f.gx[i] = gx;
            f.gy[i] = gy;
            f.magnitude[i] = std::hypot(gx, gy);
            f.orientation[i] = std::atan2(gy, gx);
        }
    }
    rescale_to_unit_max(f.magnitude);
    return f;
}

GradientField weight_vertical_gradient(const GradientField& field, double horizontal_weight) {
    if (!(horizontal_weight >= 0.0 && horizontal_weight <= 1.0)) {
        throw ArgumentError("horizontal_weight must lie in [0,1]");
    }
    GradientField out = field;
    for (std::size_t i = 0; i < out.magnitude.size(); ++i) {
        out.magnitude[i] = std::hypot(horizontal_weight * field.gx[i], field.gy[i]);
    }
    rescale_to_unit_max(out.magnitude);
    return out;
}

}  // namespace iris
