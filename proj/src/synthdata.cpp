#include "iris/synthdata.hpp"

#include "iris/error.hpp"
#include "iris/normalization.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

namespace iris {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

}  // namespace

IrisTexture::IrisTexture(std::uint64_t texture_seed, int class_id) {
    std::mt19937_64 rng(splitmix64(texture_seed ^ splitmix64(static_cast<std::uint64_t>(class_id))));
    std::uniform_int_distribution<int> harmonic(3, 20);
    std::uniform_int_distribution<int> radial(1, 3);
    double sq = 0.0;
    for (int k = 0; k < 8; ++k) {
        Component c{};
        c.harmonic = harmonic(rng);
        c.phase = uniform(rng, 0.0, kTwoPi);
        c.radial_order = radial(rng);
        c.radial_phase = uniform(rng, 0.0, kTwoPi);
        c.weight = 1.0 / std::sqrt(static_cast<double>(c.harmonic));
        sq += c.weight * c.weight;
        components_.push_back(c);
    }
    // Each term is a product of two unit sinusoids with variance 1/4.
    rms_ = std::sqrt(sq / 4.0);
}

double IrisTexture::operator()(double theta, double rho) const {
    double raw = 0.0;
    for (const auto& c : components_) {
        raw += c.weight * std::sin(c.harmonic * theta + c.phase) *
               std::cos(std::numbers::pi * c.radial_order * rho + c.radial_phase);
    }
    return kTextureMean + kTextureAmplitude * std::tanh(1.5 * raw / rms_);
}

namespace {

struct EyeSampler {
    const SyntheticEyeSpec& spec;
    IrisLocalization loc;
    IrisTexture texture;

    double operator()(double x, double y) const {
        const double px = x - spec.pupil.cx;
        const double py = y - spec.pupil.cy;
        const double dp = std::hypot(px, py);
        if (dp < spec.pupil.r) return kPupilIntensity;
        if (std::hypot(x - spec.iris.cx, y - spec.iris.cy) >= spec.iris.r) return kScleraIntensity;
        const double theta = std::atan2(py, px);
        const double r_prime = radial_extent(loc, theta).r_prime;
        const double rho = (dp - spec.pupil.r) / (r_prime - spec.pupil.r);
        return texture(theta - spec.rotation, std::clamp(rho, 0.0, 1.0));
    }

    bool near_boundary(double x, double y) const {
        const double dp = std::hypot(x - spec.pupil.cx, y - spec.pupil.cy);
        const double di = std::hypot(x - spec.iris.cx, y - spec.iris.cy);
        return std::abs(dp - spec.pupil.r) < 1.0 || std::abs(di - spec.iris.r) < 1.0;
    }
};

}  // namespace

GrayImage render_eye(const SyntheticEyeSpec& spec) {
    IrisLocalization loc{spec.pupil, spec.iris};
    if (spec.width <= 0 || spec.height <= 0 || !loc.plausible()) {
        throw ArgumentError("render_eye: invalid eye geometry");
    }
    if (spec.iris.cx - spec.iris.r < 0 || spec.iris.cy - spec.iris.r < 0 ||
        spec.iris.cx + spec.iris.r > spec.width - 1 || spec.iris.cy + spec.iris.r > spec.height - 1) {
        throw ArgumentError("render_eye: iris circle does not fit inside the image");
    }
    if (spec.noise_sigma < 0.0) throw ArgumentError("render_eye: noise_sigma must be >= 0");

    const EyeSampler sample{spec, loc, IrisTexture(spec.texture_seed, spec.class_id)};
    GrayImage img(spec.width, spec.height);
    for (int y = 0; y < spec.height; ++y) {
        for (int x = 0; x < spec.width; ++x) {
            double v = 0.0;
            if (sample.near_boundary(x, y)) {
                for (double oy : {-0.25, 0.25}) {
                    for (double ox : {-0.25, 0.25}) v += sample(x + ox, y + oy);
                }
                v /= 4.0;
            } else {
                v = sample(x, y);
            }
            img.at(x, y) = v;
        }
    }
    if (spec.noise_sigma > 0.0) {
        std::mt19937_64 rng(splitmix64(spec.noise_seed));
        std::normal_distribution<double> noise(0.0, spec.noise_sigma);
        for (double& v : img.data()) v += noise(rng);
    }
    for (double& v : img.data()) v = std::clamp(v, 0.0, 1.0);
    return img;
}

namespace {

SyntheticEyeSpec jittered_eye(std::mt19937_64& rng, double pupil_base, double noise_sigma,
                              double rotation) {
    SyntheticEyeSpec s;
    s.iris = {160.0 + uniform(rng, -6.0, 6.0), 140.0 + uniform(rng, -6.0, 6.0),
              uniform(rng, 100.0, 112.0)};
    const double offset_angle = uniform(rng, 0.0, kTwoPi);
    const double offset = uniform(rng, 0.0, 8.0);
    s.pupil = {s.iris.cx + offset * std::cos(offset_angle),
               s.iris.cy + offset * std::sin(offset_angle),
               pupil_base * uniform(rng, 0.85, 1.15)};
    s.noise_sigma = noise_sigma;
    s.noise_seed = rng();
    s.rotation = rotation;
    return s;
}

}  // namespace

SyntheticEyeSpec random_eye_spec(std::uint64_t seed, double noise_sigma) {
    std::mt19937_64 rng(splitmix64(seed));
    const double pupil_base = uniform(rng, 30.0, 45.0);
    SyntheticEyeSpec s = jittered_eye(rng, pupil_base, noise_sigma, uniform(rng, -0.04, 0.04));
    s.texture_seed = rng();
    s.class_id = static_cast<int>(rng() % 1000);
    return s;
}

Benchmark make_benchmark(int num_classes, int train_per_class, int test_per_class,
                         std::uint64_t seed, const BenchmarkOptions& opts) {
    if (num_classes <= 0 || train_per_class <= 0 || test_per_class <= 0) {
        throw ArgumentError("make_benchmark: counts must be positive");
    }
    Benchmark bench;
    bench.num_classes = num_classes;
    std::mt19937_64 rng(splitmix64(seed));
    const double column = kTwoPi / opts.angular_res;
    for (int c = 0; c < num_classes; ++c) {
        const double pupil_base = uniform(rng, 30.0, 45.0);
        for (int i = 0; i < train_per_class + test_per_class; ++i) {
            const bool is_test = i >= train_per_class;
            double rotation = uniform(rng, -opts.max_rotation_columns, opts.max_rotation_columns);
            if (is_test && opts.test_rotation_columns) rotation = *opts.test_rotation_columns;
            SyntheticEyeSpec s = jittered_eye(rng, pupil_base, opts.noise_sigma, rotation * column);
            s.texture_seed = seed;
            s.class_id = c;
            LabeledEye eye{render_eye(s), c, s};
            (is_test ? bench.test : bench.train).push_back(std::move(eye));
        }
    }
    return bench;
}

void write_benchmark(const Benchmark& bench, const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(root, ec);
    if (ec) throw IoError("cannot create " + root.string() + ": " + ec.message());

    std::ofstream truth(root / "ground_truth.csv");
    if (!truth) throw IoError("cannot write " + (root / "ground_truth.csv").string());
    truth << "path,label,split,pupil_cx,pupil_cy,pupil_r,iris_cx,iris_cy,iris_r,rotation\n";
    truth.precision(17);

    std::vector<int> next_index(static_cast<std::size_t>(bench.num_classes), 0);
    auto emit = [&](const LabeledEye& eye, const char* split) {
        char cls[32];
        char name[32];
        std::snprintf(cls, sizeof cls, "class_%02d", eye.label);
        std::snprintf(name, sizeof name, "img_%03d.pgm", next_index[eye.label]++);
        const fs::path dir = root / cls;
        fs::create_directories(dir, ec);
        if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
        save_gray_image(eye.image, dir / name);
        const auto& s = eye.spec;
        truth << cls << '/' << name << ',' << eye.label << ',' << split << ',' << s.pupil.cx << ','
              << s.pupil.cy << ',' << s.pupil.r << ',' << s.iris.cx << ',' << s.iris.cy << ','
              << s.iris.r << ',' << s.rotation << '\n';
    };
    // Training eyes first so they sort ahead of the test eyes within each class.
    for (const auto& e : bench.train) emit(e, "train");
    for (const auto& e : bench.test) emit(e, "test");
}

}  // namespace iris
