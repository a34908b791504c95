// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "iris/config.hpp"
#include "iris/dataset.hpp"
#include "iris/harness.hpp"
#include "iris/lamstar.hpp"
#include "iris/normalization.hpp"
#include "iris/segmentation.hpp"
#include "iris/synthdata.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace iris;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int n, const std::string& what, const std::function<Outcome()>& check) {
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] criterion %d: %s -- %s\n", o.pass ? "PASS" : "FAIL", n, what.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::string without_run_lines(const std::string& kv) {
    std::istringstream in(kv);
    std::string out;
    for (std::string line; std::getline(in, line);) {
        if (line.rfind("run.", 0) != 0) out += line + '\n';
    }
    return out;
}

Outcome rubber_sheet_oracle() {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const IrisLocalization loc = oracle::random_localization(rng);
        const double theta = angle(rng);
        worst = std::max(worst, std::abs(radial_extent(loc, theta).r_prime -
                                         oracle::bisect_extent(loc, theta)));
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-9 && secs < 1.0, fmt("max |error| %.3g, %.3f s", worst, secs)};
}

Outcome concentric_identity() {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int mismatches = 0;
    int checked = 0;
    for (int trial = 0; trial < 5; ++trial) {
        const double cx = 100 + 100 * u(rng);
        const double cy = 100 + 100 * u(rng);
        const double r = trial == 0 ? 110.0 : 80 + 70 * u(rng);
        const IrisLocalization loc{{cx, cy, 30}, {cx, cy, r}};
        for (int k = 0; k < 360; ++k) {
            ++checked;
            if (radial_extent(loc, 2.0 * std::numbers::pi * k / 360).r_prime != r) ++mismatches;
        }
    }
    return {mismatches == 0, fmt("%d of %d angles differ from the iris radius", mismatches, checked)};
}

Outcome hough_recovery() {
    const auto t0 = std::chrono::steady_clock::now();
    int recovered = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const SyntheticEyeSpec s = random_eye_spec(1000 + seed, 0.02);
        try {
            const IrisLocalization loc = localize_iris(render_eye(s));
            auto ok = [](const Circle& got, const Circle& want) {
                return std::hypot(got.cx - want.cx, got.cy - want.cy) <= 2.0 &&
                       std::abs(got.r - want.r) <= 2.0;
            };
            if (ok(loc.pupil, s.pupil) && ok(loc.iris, s.iris)) ++recovered;
        } catch (const std::exception&) {
        }
    }
    const double secs = seconds_since(t0);
    return {recovered >= 48 && secs < 60.0, fmt("%d/50 eyes within 2 px, %.1f s", recovered, secs)};
}

Outcome hysteresis_chain() {
    const LocalizationConfig defaults;
    auto chain = [](double link) {
        GradientField f;
        f.width = 12;
        f.height = 8;
        f.gx.assign(96, 0.0);
        f.gy.assign(96, 0.0);
        f.orientation.assign(96, 0.0);
        f.magnitude.assign(96, 0.0);
        f.magnitude[f.index(1, 1)] = 0.25;
        const std::pair<int, int> pts[] = {{2, 2}, {3, 3}, {4, 3}, {5, 3}, {6, 4}, {7, 5}, {8, 5}};
        for (const auto& [x, y] : pts) f.magnitude[f.index(x, y)] = 0.195;
        f.magnitude[f.index(5, 3)] = link;
        return f;
    };
    const EdgeMap whole = hysteresis_threshold(chain(0.195), defaults.t_high, defaults.t_low);
    const EdgeMap broken = hysteresis_threshold(chain(0.18), defaults.t_high, defaults.t_low);
    const bool pass = defaults.t_high == 0.2 && defaults.t_low == 0.19 && whole.count() == 8 &&
                      broken.count() == 4 && broken.at(4, 3) && !broken.at(5, 3) &&
                      !broken.at(8, 5);
    return {pass, fmt("intact chain keeps %zu/8 pixels, broken chain keeps %zu (expect 4)",
                      whole.count(), broken.count())};
}

Outcome som_properties() {
    std::mt19937_64 rng(5);
    const auto t0 = std::chrono::steady_clock::now();
    int fixed = 0, contraction = 0, growth = 0, norm = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto r = oracle::som_trial(rng);
        fixed += !r.fixed_point;
        contraction += !r.contraction;
        growth += !r.growth_bound;
        norm += !r.unit_norm;
    }
    const double secs = seconds_since(t0);
    return {fixed + contraction + growth + norm == 0 && secs < 10.0,
            fmt("violations: fixed-point %d, contraction %d, growth %d, unit-norm %d; %.2f s", fixed,
                contraction, growth, norm, secs)};
}

Outcome normalized_cap() {
    const double delta = LamstarConfig{}.delta;
    std::string detail;
    bool pass = true;
    for (int n : {1, 10, 1000}) {
        DecisionLayer dl(1, 1, delta);
        for (int i = 0; i < n; ++i) dl.reward({0, 0, 0});
        const double w = effective_weight(dl, {0, 0, 0}, true);
        pass &= w == delta;
        detail += fmt("n=%d -> %.17g; ", n, w);
    }
    return {pass, detail + fmt("delta %.17g", delta)};
}

struct BenchmarkRun {
    fs::path data;
    fs::path out;
    Comparison cmp;
    double seconds = 0.0;
};

BenchmarkRun run_compare(const fs::path& data, const fs::path& out, int shift_range, int threads) {
    PipelineConfig cfg;
    cfg.shift_range = shift_range;
    cfg.threads = threads;
    const DatasetIndex idx = index_dataset(data, cfg.train_per_class);
    const auto t0 = std::chrono::steady_clock::now();
    BenchmarkRun run{data, out, compare_variants(idx, cfg, out), 0.0};
    run.seconds = seconds_since(t0);
    return run;
}

double accuracy_of(const VariantResult& row) { return row.report.accuracy.value_or(0.0); }

}  // namespace

int main() {
    const fs::path work = testing::scratch_dir("acceptance");

    report(1, "rubber-sheet extent matches the bisection oracle", rubber_sheet_oracle);
    report(2, "concentric circles give r' equal to the iris radius", concentric_identity);
    report(3, "Hough localization recovers both circles", hough_recovery);
    report(4, "hysteresis chain at thresholds (0.2, 0.19)", hysteresis_chain);
    report(5, "SOM fixed-point, growth-bound and contraction invariants", som_properties);
    report(6, "normalized link weight caps at delta", normalized_cap);

    write_benchmark(make_benchmark(16, 5, 3, 12345), work / "bench");
    BenchmarkRun shift0;
    BenchmarkRun shift8;
    report(7, "synthetic 16-class benchmark accuracy and runtime", [&]() -> Outcome {
        shift0 = run_compare(work / "bench", work / "shift0", 0, 1);
        shift8 = run_compare(work / "bench", work / "shift8", 8, 1);
        const double r0 = accuracy_of(shift0.cmp.rows[0]);
        const double n0 = accuracy_of(shift0.cmp.rows[1]);
        const double r8 = accuracy_of(shift8.cmp.rows[0]);
        const double n8 = accuracy_of(shift8.cmp.rows[1]);
        const bool pass = r0 >= 0.95 && n0 >= 0.95 && r8 >= 0.98 && n8 >= 0.98 &&
                          shift0.seconds < 120.0 && shift8.seconds < 120.0;
        return {pass, fmt("shift 0: regular %.2f%%, normalized %.2f%% (%.1f s); shift 8: regular "
                          "%.2f%%, normalized %.2f%% (%.1f s)",
                          100 * r0, 100 * n0, shift0.seconds, 100 * r8, 100 * n8, shift8.seconds)};
    });

    report(8, "test eyes rotated by 3 columns, shift range 8", [&]() -> Outcome {
        BenchmarkOptions opts;
        opts.test_rotation_columns = 3.0;
        write_benchmark(make_benchmark(16, 5, 3, 12345, opts), work / "rotated");
        const BenchmarkRun run = run_compare(work / "rotated", work / "rotated_out", 8, 1);
        const double r = accuracy_of(run.cmp.rows[0]);
        const double n = accuracy_of(run.cmp.rows[1]);
        return {r >= 0.95 && n >= 0.95,
                fmt("regular %.2f%%, normalized %.2f%% of %zu test eyes", 100 * r, 100 * n,
                    run.cmp.rows[0].report.num_test)};
    });

    report(9, "compare output independent of thread count", [&]() -> Outcome {
        const BenchmarkRun parallel = run_compare(work / "bench", work / "shift0_threads4", 0, 4);
        int differing = 0;
        std::string names;
        for (const char* f : {"model_regular.lns", "model_normalized.lns"}) {
            if (slurp(shift0.out / f) != slurp(parallel.out / f)) {
                ++differing;
                names += std::string(" ") + f;
            }
        }
        for (const char* f : {"report_regular.kv", "report_normalized.kv", "comparison.kv",
                              "train_regular.log", "train_normalized.log"}) {
            if (without_run_lines(slurp(shift0.out / f)) != without_run_lines(slurp(parallel.out / f))) {
                ++differing;
                names += std::string(" ") + f;
            }
        }
        return {differing == 0,
                differing == 0 ? fmt("7 artifacts identical across 1 and 4 threads (%.1f s with 4)",
                                     parallel.seconds)
                               : "differs:" + names};
    });

    report(10, "prediction scores equal an independent re-walk", [&]() -> Outcome {
        PipelineConfig cfg;
        const DatasetIndex idx = index_dataset(work / "bench", cfg.train_per_class);
        const TestSet tests = prepare_test_set(idx, cfg, {});
        const LamstarNetwork nets[] = {LamstarNetwork::load(shift0.out / "model_regular.lns"),
                                       LamstarNetwork::load(shift0.out / "model_normalized.lns")};
        std::mt19937_64 rng(10);
        std::uniform_int_distribution<std::size_t> pick(0, tests.templates.size() - 1);
        std::uniform_int_distribution<int> range(0, 8);
        std::uniform_int_distribution<int> roll(-4, 4);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const LamstarNetwork& net = nets[i % 2];
            const IrisTemplate t = rotate_template(tests.templates[pick(rng)], roll(rng));
            const Prediction p = net.classify(t, range(rng));
            const auto expect = oracle::rewalk_scores(net, t, p.shift);
            for (std::size_t c = 0; c < expect.size(); ++c) {
                worst = std::max(worst, std::abs(p.scores[c] - expect[c]));
            }
        }
        return {worst <= 1e-12, fmt("100 classifications, max |score difference| %.3g", worst)};
    });

    std::error_code ec;
    fs::remove_all(work, ec);
    std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
    return failures == 0 ? 0 : 1;
}
