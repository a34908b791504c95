// iris: command-line front end for the segmentation, normalization and
// LAMSTAR training/evaluation pipeline.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 processing error.

#include "iris/config.hpp"
#include "iris/dataset.hpp"
#include "iris/error.hpp"
#include "iris/harness.hpp"
#include "iris/imaging.hpp"
#include "iris/lamstar.hpp"
#include "iris/normalization.hpp"
#include "iris/segmentation.hpp"
#include "iris/synthdata.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace iris;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kProcessing = 3 };

struct CommonOptions {
    std::string config_file;
    std::vector<std::string> overrides;
    int threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_file, "Flat key = value configuration file")
        ->check(CLI::ExistingFile);
    cmd->add_option("--set", opts.overrides, "Override one configuration key (key=value)");
    cmd->add_option("--threads", opts.threads, "Worker threads for image processing");
}

PipelineConfig resolve_config(const CommonOptions& opts) {
    PipelineConfig cfg = opts.config_file.empty() ? PipelineConfig{} : load_config(opts.config_file);
    for (const auto& kv : opts.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (opts.threads > 0) cfg.threads = opts.threads;
    return cfg;
}

void print_warnings(const DatasetIndex& index) {
    for (const auto& w : index.warnings) std::cerr << "warning: " << w << '\n';
}

std::string describe(const Circle& c) {
    std::ostringstream os;
    os << c.cx << ' ' << c.cy << ' ' << c.r;
    return os.str();
}

IrisLocalization parse_localization(const std::string& spec) {
    std::vector<double> v;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            v.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ArgumentError("--loc: cannot parse '" + item + "'");
        }
    }
    if (v.size() != 6) {
        throw ArgumentError("--loc expects auto or pupil_cx,pupil_cy,pupil_r,iris_cx,iris_cy,iris_r");
    }
    IrisLocalization loc{{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
    if (!loc.plausible()) throw ArgumentError("--loc: pupil circle must lie inside the iris circle");
    return loc;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Iris segmentation, normalization and LAMSTAR identification"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "Render a synthetic eye dataset");
    std::string synth_out;
    int synth_classes = 16;
    int synth_train = 5;
    int synth_test = 3;
    std::uint64_t synth_seed = 1;
    BenchmarkOptions synth_opts;
    double synth_rotation = 0.0;
    synth->add_option("--out", synth_out, "Output dataset directory")->required();
    synth->add_option("--classes", synth_classes, "Number of classes")->check(CLI::PositiveNumber);
    synth->add_option("--train", synth_train, "Training images per class")->check(CLI::PositiveNumber);
    synth->add_option("--test", synth_test, "Test images per class")->check(CLI::PositiveNumber);
    synth->add_option("--seed", synth_seed, "Random seed");
    synth->add_option("--noise", synth_opts.noise_sigma, "Gaussian pixel noise sigma");
    auto* rot_opt = synth->add_option("--test-rotation-cols", synth_rotation,
                                      "Render every test eye rotated by this many template columns");

    // segment
    auto* segment = app.add_subcommand("segment", "Locate pupil and iris boundaries");
    std::string segment_image;
    std::string overlay;
    CommonOptions segment_common;
    segment->add_option("image", segment_image, "P5 PGM eye image")->required();
    segment->add_option("--overlay", overlay, "Write the image with both circles drawn in white");
    add_common(segment, segment_common);

    // normalize
    auto* normalize = app.add_subcommand("normalize", "Unwrap iris images into IRT1 templates");
    std::vector<std::string> normalize_images;
    std::string loc_spec = "auto";
    std::string normalize_out = ".";
    std::string normalize_label;
    CommonOptions normalize_common;
    normalize->add_option("images", normalize_images, "P5 PGM eye images")->required();
    normalize->add_option("--loc", loc_spec, "auto, or pupil_cx,pupil_cy,pupil_r,iris_cx,iris_cy,iris_r");
    normalize->add_option("--out-dir", normalize_out, "Directory for the .irt files");
    normalize->add_option("--label", normalize_label, "Label stored in each template header");
    add_common(normalize, normalize_common);

    // train
    auto* train = app.add_subcommand("train", "Train a LAMSTAR network on a dataset");
    std::string train_data;
    std::string train_out;
    bool train_normalized = false;
    int train_epochs = 0;
    double train_delta = 0.0;
    CommonOptions train_common;
    train->add_option("--data", train_data, "Dataset root (<root>/<class>/<image>.pgm)")->required();
    train->add_option("--out", train_out, "Model file to write (LNS1)")->required();
    train->add_flag("--normalized", train_normalized, "Use the reward-count normalized variant");
    auto* epochs_opt = train->add_option("--epochs", train_epochs, "Maximum training epochs");
    auto* delta_opt = train->add_option("--delta", train_delta, "Reward/punish increment");
    add_common(train, train_common);

    // eval
    auto* eval = app.add_subcommand("eval", "Evaluate a model on the dataset's test split");
    std::string eval_model;
    std::string eval_data;
    std::string eval_report;
    int eval_shift = -1;
    CommonOptions eval_common;
    eval->add_option("--model", eval_model, "Model file (LNS1)")->required()->check(CLI::ExistingFile);
    eval->add_option("--data", eval_data, "Dataset root")->required();
    eval->add_option("--shift-range", eval_shift, "Try cyclic column shifts in [-K, K]");
    eval->add_option("--report", eval_report, "Report prefix; writes <prefix>.txt and <prefix>.kv");
    add_common(eval, eval_common);

    // compare
    auto* compare = app.add_subcommand("compare", "Train and evaluate both LAMSTAR variants");
    std::string compare_data;
    std::string compare_out = "compare_out";
    int compare_shift = -1;
    CommonOptions compare_common;
    compare->add_option("--data", compare_data, "Dataset root")->required();
    compare->add_option("--out-dir", compare_out, "Directory for models and reports");
    compare->add_option("--shift-range", compare_shift, "Try cyclic column shifts in [-K, K]");
    add_common(compare, compare_common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (synth->parsed()) {
            if (*rot_opt) synth_opts.test_rotation_columns = synth_rotation;
            const Benchmark bench =
                make_benchmark(synth_classes, synth_train, synth_test, synth_seed, synth_opts);
            write_benchmark(bench, synth_out);
            std::cout << "wrote " << bench.train.size() << " training and " << bench.test.size()
                      << " test images for " << bench.num_classes << " classes to " << synth_out
                      << '\n';
        } else if (segment->parsed()) {
            const PipelineConfig cfg = resolve_config(segment_common);
            const GrayImage img = load_gray_image(segment_image);
            const IrisLocalization loc = localize_iris(img, cfg.localization);
            std::cout << "pupil " << describe(loc.pupil) << '\n';
            std::cout << "iris " << describe(loc.iris) << '\n';
            if (!overlay.empty()) {
                GrayImage out = img;
                draw_circle(out, loc.pupil);
                draw_circle(out, loc.iris);
                save_gray_image(out, overlay);
            }
        } else if (normalize->parsed()) {
            const PipelineConfig cfg = resolve_config(normalize_common);
            fs::create_directories(normalize_out);
            for (const auto& path : normalize_images) {
                const GrayImage img = load_gray_image(path);
                const IrisLocalization loc =
                    loc_spec == "auto" ? localize_iris(img, cfg.localization) : parse_localization(loc_spec);
                IrisTemplate t = unwrap(img, loc, cfg.radial_res, cfg.angular_res);
                t.set_label(normalize_label);
                const fs::path out = fs::path(normalize_out) / fs::path(path).stem().concat(".irt");
                save_template(t, out);
                std::cout << out.string() << '\n';
            }
        } else if (train->parsed()) {
            PipelineConfig cfg = resolve_config(train_common);
            if (train_normalized) cfg.lamstar.normalized = true;
            if (*epochs_opt) cfg.lamstar.epochs = train_epochs;
            if (*delta_opt) cfg.lamstar.delta = train_delta;
            const DatasetIndex index = index_dataset(train_data, cfg.train_per_class);
            print_warnings(index);
            const TrainOutcome outcome = run_train(index, cfg, TemplateCache::from_environment());
            outcome.network.save(train_out);
            write_training_log(outcome, train_out + ".log");
            for (const auto& e : outcome.excluded) {
                std::cerr << "excluded " << e.image.string() << ": " << e.reason << '\n';
            }
            std::cout << "trained on " << outcome.log.neuron_counts.size() << " modules, "
                      << outcome.log.neurons_created << " neurons, " << outcome.log.epochs_run
                      << " epochs in " << outcome.log.seconds << " s -> " << train_out << '\n';
        } else if (eval->parsed()) {
            PipelineConfig cfg = resolve_config(eval_common);
            if (eval_shift >= 0) cfg.shift_range = eval_shift;
            const DatasetIndex index = index_dataset(eval_data, cfg.train_per_class);
            print_warnings(index);
            const EvalReport report =
                run_eval(eval_model, index, cfg, TemplateCache::from_environment());
            std::cout << format_report_text(report);
            if (!eval_report.empty()) write_report(report, eval_report);
        } else if (compare->parsed()) {
            PipelineConfig cfg = resolve_config(compare_common);
            if (compare_shift >= 0) cfg.shift_range = compare_shift;
            const DatasetIndex index = index_dataset(compare_data, cfg.train_per_class);
            print_warnings(index);
            const Comparison cmp =
                compare_variants(index, cfg, compare_out, TemplateCache::from_environment());
            std::cout << format_comparison_table(cmp);
        }
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kData;
    } catch (const FormatError& e) {
        std::cerr << "format error: " << e.what() << '\n';
        return kData;
    } catch (const DatasetError& e) {
        std::cerr << "dataset error: " << e.what() << '\n';
        return kData;
    } catch (const LocalizationError& e) {
        std::cerr << "localization error: " << e.what() << '\n';
        return kProcessing;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kProcessing;
    }
    return kOk;
}
