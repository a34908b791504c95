#include "iris/error.hpp"
#include "iris/imaging.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

namespace iris {
namespace {

using testing::random_image;
using testing::scratch_dir;

void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    out << bytes;
}

// Direct 2-D convolution with the outer product of the 1-D taps, edge-clamped.
GrayImage brute_force_blur(const GrayImage& img, double sigma) {
    const auto taps = gaussian_kernel(sigma);
    const int r = static_cast<int>(taps.size() / 2);
    GrayImage out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            double acc = 0.0;
            for (int j = -r; j <= r; ++j) {
                for (int i = -r; i <= r; ++i) {
                    acc += taps[i + r] * taps[j + r] * img.clamped(x + i, y + j);
                }
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

GrayImage transpose(const GrayImage& img) {
    GrayImage t(img.height(), img.width());
    for (int y = 0; y < img.height(); ++y)
        for (int x = 0; x < img.width(); ++x) t.at(y, x) = img.at(x, y);
    return t;
}

GrayImage vertical_step(int w, int h) {
    GrayImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = w / 2; x < w; ++x) img.at(x, y) = 1.0;
    return img;
}

GrayImage horizontal_step(int w, int h) { return transpose(vertical_step(h, w)); }

TEST(LoadGrayImage, ScalesRawBytes) {
    const auto dir = scratch_dir("load_p5");
    write_bytes(dir / "a.pgm", std::string("P5\n2 2\n255\n") + std::string("\x00\xff\x80\x40", 4));
    const GrayImage img = load_gray_image(dir / "a.pgm");
    ASSERT_EQ(img.width(), 2);
    ASSERT_EQ(img.height(), 2);
    EXPECT_DOUBLE_EQ(img.at(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(img.at(1, 0), 1.0);
    EXPECT_DOUBLE_EQ(img.at(0, 1), 128.0 / 255.0);
    EXPECT_DOUBLE_EQ(img.at(1, 1), 64.0 / 255.0);
}

TEST(LoadGrayImage, RejectsAsciiMagicByName) {
    const auto dir = scratch_dir("load_p2");
    write_bytes(dir / "a.pgm", "P2\n2 2\n255\n0 1 2 3\n");
    try {
        load_gray_image(dir / "a.pgm");
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("P2"), std::string::npos);
    }
}

TEST(LoadGrayImage, RejectsSixteenBitMaxval) {
    const auto dir = scratch_dir("load_maxval");
    write_bytes(dir / "a.pgm", std::string("P5\n1 1\n65535\n") + std::string(2, '\0'));
    try {
        load_gray_image(dir / "a.pgm");
        FAIL() << "expected FormatError";
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("65535"), std::string::npos);
    }
}

TEST(LoadGrayImage, MissingAndTruncatedFilesAreIoErrors) {
    const auto dir = scratch_dir("load_missing");
    EXPECT_THROW(load_gray_image(dir / "nope.pgm"), IoError);
    write_bytes(dir / "short.pgm", std::string("P5\n4 4\n255\n") + std::string(5, '\1'));
    EXPECT_THROW(load_gray_image(dir / "short.pgm"), IoError);
}

TEST(LoadGrayImage, CasiaSizedRoundTrip) {
    const auto dir = scratch_dir("load_casia");
    GrayImage img(320, 280);
    for (int y = 0; y < 280; ++y)
        for (int x = 0; x < 320; ++x) img.at(x, y) = ((x * 7 + y * 3) % 256) / 255.0;
    save_gray_image(img, dir / "eye.pgm");
    const GrayImage back = load_gray_image(dir / "eye.pgm");
    EXPECT_EQ(back.width(), 320);
    EXPECT_EQ(back.height(), 280);
    EXPECT_EQ(back, img);
}

TEST(LoadGrayImage, HeaderCommentsAreSkipped) {
    const auto dir = scratch_dir("load_comment");
    write_bytes(dir / "a.pgm", std::string("P5\n# made by hand\n1 1\n255\n") + "\x7f");
    EXPECT_DOUBLE_EQ(load_gray_image(dir / "a.pgm").at(0, 0), 127.0 / 255.0);
}

TEST(GaussianSmooth, PreservesConstants) {
    const GrayImage img(17, 11, 0.5);
    for (double sigma : {0.5, 1.0, 2.0, 4.0}) {
        const GrayImage out = gaussian_smooth(img, sigma);
        for (double v : out.data()) EXPECT_NEAR(v, 0.5, 1e-15);
    }
}

TEST(GaussianSmooth, RejectsNonPositiveSigma) {
    const GrayImage img(5, 5, 0.1);
    EXPECT_THROW(gaussian_smooth(img, 0.0), ArgumentError);
    EXPECT_THROW(gaussian_smooth(img, -1.0), ArgumentError);
}

TEST(GaussianSmooth, ImpulseResponseMatchesKernelCenter) {
    GrayImage img(9, 9);
    img.at(4, 4) = 1.0;
    const GrayImage out = gaussian_smooth(img, 1.0);
    const auto taps = gaussian_kernel(1.0);
    ASSERT_EQ(taps.size(), 7u);
    EXPECT_NEAR(out.at(4, 4), taps[3] * taps[3], 1e-15);
    const GrayImage oracle = brute_force_blur(img, 1.0);
    for (int y = 0; y < 9; ++y) {
        for (int x = 0; x < 9; ++x) {
            EXPECT_NEAR(out.at(x, y), oracle.at(x, y), 1e-15);
            EXPECT_NEAR(out.at(x, y), out.at(8 - x, y), 1e-15);
            EXPECT_NEAR(out.at(x, y), out.at(y, x), 1e-15);
        }
    }
    EXPECT_GT(out.at(4, 4), out.at(5, 4));
    EXPECT_GT(out.at(5, 4), out.at(6, 4));
}

TEST(GaussianSmooth, SeparableMatchesFullConvolution) {
    const GrayImage img = random_image(23, 19, 7);
    const GrayImage fast = gaussian_smooth(img, 2.0);
    const GrayImage slow = brute_force_blur(img, 2.0);
    for (std::size_t i = 0; i < fast.data().size(); ++i) {
        EXPECT_NEAR(fast.data()[i], slow.data()[i], 1e-12);
    }
}

TEST(GaussianSmooth, IsLinearWithinRange) {
    const GrayImage a = random_image(20, 16, 1);
    const GrayImage b = random_image(20, 16, 2);
    GrayImage mix(20, 16);
    for (std::size_t i = 0; i < mix.data().size(); ++i) {
        mix.data()[i] = 0.3 * a.data()[i] + 0.6 * b.data()[i];
    }
    const GrayImage sa = gaussian_smooth(a, 1.5);
    const GrayImage sb = gaussian_smooth(b, 1.5);
    const GrayImage sm = gaussian_smooth(mix, 1.5);
    for (std::size_t i = 0; i < mix.data().size(); ++i) {
        EXPECT_NEAR(sm.data()[i], 0.3 * sa.data()[i] + 0.6 * sb.data()[i], 1e-9);
    }
}

TEST(ComputeGradient, ConstantImageHasZeroMagnitude) {
    const GradientField f = compute_gradient(GrayImage(8, 6, 0.7));
    for (double m : f.magnitude) EXPECT_EQ(m, 0.0);
}

TEST(ComputeGradient, VerticalStepEdge) {
    const GradientField f = compute_gradient(vertical_step(10, 8));
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 10; ++x) {
            if (x == 4 || x == 5) {
                EXPECT_DOUBLE_EQ(f.mag(x, y), 1.0);
                EXPECT_NEAR(f.orientation[f.index(x, y)], 0.0, 1e-12);
            } else {
                EXPECT_EQ(f.mag(x, y), 0.0);
            }
        }
    }
}

TEST(ComputeGradient, MatchesSobelStencilOracle) {
    const GrayImage img = random_image(13, 9, 3);
    const GradientField f = compute_gradient(img);
    const int kx[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
    const int ky[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};
    std::vector<double> raw(img.data().size());
    double peak = 0.0;
    for (int y = 0; y < 9; ++y) {
        for (int x = 0; x < 13; ++x) {
            double gx = 0.0;
            double gy = 0.0;
            for (int j = 0; j < 3; ++j) {
                for (int i = 0; i < 3; ++i) {
                    gx += kx[j][i] * img.clamped(x + i - 1, y + j - 1);
                    gy += ky[j][i] * img.clamped(x + i - 1, y + j - 1);
                }
            }
            EXPECT_NEAR(f.gx[f.index(x, y)], gx, 1e-12);
            EXPECT_NEAR(f.gy[f.index(x, y)], gy, 1e-12);
            EXPECT_NEAR(f.orientation[f.index(x, y)], std::atan2(gy, gx), 1e-12);
            raw[f.index(x, y)] = std::sqrt(gx * gx + gy * gy);
            peak = std::max(peak, raw[f.index(x, y)]);
        }
    }
    for (std::size_t i = 0; i < raw.size(); ++i) EXPECT_NEAR(f.magnitude[i], raw[i] / peak, 1e-12);
}

TEST(ComputeGradient, RejectsTinyImages) {
    EXPECT_THROW(compute_gradient(GrayImage(2, 5)), ArgumentError);
    EXPECT_THROW(compute_gradient(GrayImage(5, 2)), ArgumentError);
}

TEST(ComputeGradient, TransposedImageGivesTransposedMagnitude) {
    for (const GrayImage& img : {vertical_step(12, 9), random_image(12, 9, 5)}) {
        const GradientField a = compute_gradient(img);
        const GradientField b = compute_gradient(transpose(img));
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x) EXPECT_NEAR(a.mag(x, y), b.mag(y, x), 1e-12);
    }
}

TEST(ComputeGradient, PreservesDimensions) {
    const GrayImage img = random_image(7, 5, 11);
    const GradientField f = compute_gradient(gaussian_smooth(img, 1.0));
    EXPECT_EQ(f.width, 7);
    EXPECT_EQ(f.height, 5);
    EXPECT_EQ(f.magnitude.size(), 35u);
    EXPECT_EQ(f.orientation.size(), 35u);
    EXPECT_DOUBLE_EQ(*std::max_element(f.magnitude.begin(), f.magnitude.end()), 1.0);
}

TEST(WeightVerticalGradient, UnitWeightIsIdentity) {
    const GradientField f = compute_gradient(random_image(10, 10, 9));
    const GradientField w = weight_vertical_gradient(f, 1.0);
    for (std::size_t i = 0; i < f.magnitude.size(); ++i) EXPECT_NEAR(w.magnitude[i], f.magnitude[i], 1e-12);
}

TEST(WeightVerticalGradient, HorizontalEdgeUntouchedAtZeroWeight) {
    const GradientField f = compute_gradient(horizontal_step(8, 10));
    const GradientField w = weight_vertical_gradient(f, 0.0);
    for (std::size_t i = 0; i < f.magnitude.size(); ++i) EXPECT_DOUBLE_EQ(w.magnitude[i], f.magnitude[i]);
}

TEST(WeightVerticalGradient, VerticalEdgeSuppressedAtZeroWeight) {
    const GradientField w = weight_vertical_gradient(compute_gradient(vertical_step(8, 10)), 0.0);
    for (double m : w.magnitude) EXPECT_EQ(m, 0.0);
}

TEST(WeightVerticalGradient, RejectsOutOfRangeWeight) {
    const GradientField f = compute_gradient(GrayImage(4, 4));
    EXPECT_THROW(weight_vertical_gradient(f, -0.1), ArgumentError);
    EXPECT_THROW(weight_vertical_gradient(f, 1.5), ArgumentError);
}

}  // namespace
}  // namespace iris
