#pragma once

#include "iris/imaging.hpp"
#include "iris/segmentation.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace iris {

/// Parameters of one rendered eye. Geometry is the ground truth for segmentation tests.
struct SyntheticEyeSpec {
    int width = 320;
    int height = 280;
    Circle pupil{160.0, 140.0, 30.0};
    Circle iris{160.0, 140.0, 110.0};
    std::uint64_t texture_seed = 0;
    int class_id = 0;
    double noise_sigma = 0.0;
    double rotation = 0.0;  // radians, texture turned in the +theta direction
    std::uint64_t noise_seed = 0;
};

inline constexpr double kPupilIntensity = 0.05;
inline constexpr double kScleraIntensity = 0.9;
inline constexpr double kTextureMean = 0.5;
inline constexpr double kTextureAmplitude = 0.2;

/// Class-specific iris texture: 8 random-phase angular harmonics (3..20),
/// each modulated by a low-order radial cosine, squashed into
/// mean +- amplitude. `rho` is the normalized radial position (0 at the pupil
/// boundary, 1 at the limbus) and `theta` is measured around the pupil center.
class IrisTexture {
public:
    IrisTexture(std::uint64_t texture_seed, int class_id);
    double operator()(double theta, double rho) const;

private:
    struct Component {
        int harmonic;
        double phase;
        int radial_order;
        double radial_phase;
        double weight;
    };
    std::vector<Component> components_;
    double rms_ = 1.0;
};

/// Dark pupil disk, textured annulus, bright sclera, optional Gaussian noise.
/// Pixels that straddle a boundary are 2x2 supersampled.
GrayImage render_eye(const SyntheticEyeSpec& spec);

struct LabeledEye {
    GrayImage image;
    int label = 0;
    SyntheticEyeSpec spec;
};

struct Benchmark {
    int num_classes = 0;
    std::vector<LabeledEye> train;
    std::vector<LabeledEye> test;
};

struct BenchmarkOptions {
    double noise_sigma = 0.02;
    double max_rotation_columns = 3.0;
    int angular_res = 480;
    /// When set, every test eye is rendered with exactly this many columns of rotation.
    std::optional<double> test_rotation_columns;
};

/// Random eye geometry of the kind make_benchmark draws (for segmentation trials).
SyntheticEyeSpec random_eye_spec(std::uint64_t seed, double noise_sigma = 0.02);

/// Per class: train_per_class + test_per_class eyes sharing a texture, with
/// jittered geometry, pupil size (+-15%), pupil offset (<= 8 px), rotation and noise.
Benchmark make_benchmark(int num_classes, int train_per_class, int test_per_class,
                         std::uint64_t seed, const BenchmarkOptions& opts = {});

/// Writes `<root>/class_NN/img_MMM.pgm` (training images first in name order)
/// plus `<root>/ground_truth.csv`.
void write_benchmark(const Benchmark& bench, const std::filesystem::path& root);

}  // namespace iris
