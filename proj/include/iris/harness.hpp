#pragma once

#include "iris/config.hpp"
#include "iris/dataset.hpp"
#include "iris/imaging.hpp"
#include "iris/lamstar.hpp"
#include "iris/normalization.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace iris {

/// Environment variable naming the template cache directory.
inline constexpr const char* kCacheEnvVar = "IRIS_TEMPLATE_CACHE";

/// On-disk IRT1 cache keyed by image bytes plus the extraction settings.
/// A default-constructed cache is disabled.
class TemplateCache {
public:
    TemplateCache() = default;
    explicit TemplateCache(std::filesystem::path dir);

    /// Uses $IRIS_TEMPLATE_CACHE when set, otherwise a disabled cache.
    static TemplateCache from_environment();

    bool enabled() const { return dir_.has_value(); }
    const std::optional<std::filesystem::path>& directory() const { return dir_; }

    std::string key(const std::filesystem::path& image, const PipelineConfig& cfg) const;
    std::optional<IrisTemplate> load(const std::string& key) const;
    void store(const std::string& key, const IrisTemplate& t) const;

private:
    std::optional<std::filesystem::path> dir_;
};

/// Localize then unwrap at the configured resolution.
IrisTemplate extract_template(const GrayImage& img, const PipelineConfig& cfg);

struct ExtractionStats {
    std::size_t computed = 0;
    std::size_t cache_hits = 0;
};

struct ExtractedTemplate {
    std::optional<IrisTemplate> tmpl;
    std::string error;  // set when localization failed
};

/// Extracts templates for every entry in order, in parallel over cfg.threads.
/// Localization failures are reported per entry; I/O and format errors throw.
std::vector<ExtractedTemplate> extract_templates(const std::vector<DatasetEntry>& entries,
                                                 const PipelineConfig& cfg,
                                                 const TemplateCache& cache,
                                                 ExtractionStats* stats = nullptr);

struct ExcludedImage {
    std::filesystem::path image;
    std::string reason;
};

struct TrainOutcome {
    LamstarNetwork network;
    TrainingLog log;
    std::vector<ExcludedImage> excluded;
    ExtractionStats stats;
};

/// Trains on the index's training split. Images that fail localization are
/// excluded; a class left without training templates is a DatasetError.
TrainOutcome run_train(const DatasetIndex& index, const PipelineConfig& cfg,
                       const TemplateCache& cache = {});

/// Prepared training templates, reusable across variants.
struct TrainingSet {
    std::vector<IrisTemplate> templates;
    std::vector<int> labels;
    std::vector<ExcludedImage> excluded;
};
TrainingSet prepare_training_set(const DatasetIndex& index, const PipelineConfig& cfg,
                                 const TemplateCache& cache, ExtractionStats* stats = nullptr);
TrainOutcome train_network(const TrainingSet& set, int num_classes, const PipelineConfig& cfg);

void write_training_log(const TrainOutcome& outcome, const std::filesystem::path& path);

struct EvalReport {
    std::string variant;
    std::vector<std::string> class_names;
    std::size_t num_test = 0;
    std::size_t num_correct = 0;
    std::optional<double> accuracy;  // empty when nothing was classified
    std::vector<std::optional<double>> per_class_accuracy;
    std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
    std::vector<ExcludedImage> excluded;
    std::optional<double> train_seconds;
    double test_seconds = 0.0;
    PipelineConfig config;
};

struct TestSet {
    std::vector<IrisTemplate> templates;
    std::vector<int> labels;
    std::vector<ExcludedImage> excluded;
};
TestSet prepare_test_set(const DatasetIndex& index, const PipelineConfig& cfg,
                         const TemplateCache& cache, Split split = Split::Test,
                         ExtractionStats* stats = nullptr);

/// Classifies every template with cfg.shift_range and fills the report.
EvalReport evaluate(const LamstarNetwork& net, const TestSet& tests,
                    const std::vector<std::string>& class_names, const PipelineConfig& cfg);

/// Loads the model, checks its dimensions against cfg (ConfigError on
/// mismatch) and evaluates the chosen split.
EvalReport run_eval(const std::filesystem::path& model, const DatasetIndex& index,
                    const PipelineConfig& cfg, const TemplateCache& cache = {},
                    Split split = Split::Test);

/// Human-readable report.
std::string format_report_text(const EvalReport& r);

/// `key=value` report. Run-dependent values (timings, thread count) use the
/// `run.` key prefix; everything else is a pure function of data and config.
std::string format_report_kv(const EvalReport& r);

/// Writes `<prefix>.txt` and `<prefix>.kv`.
void write_report(const EvalReport& r, const std::filesystem::path& prefix);

struct VariantResult {
    std::string name;
    TrainingLog log;
    EvalReport report;
    std::filesystem::path model;
};

struct Comparison {
    std::vector<VariantResult> rows;  // regular, then normalized
};

/// Trains and evaluates regular and normalized LAMSTAR under one config,
/// writing models, reports and the comparison table into out_dir.
Comparison compare_variants(const DatasetIndex& index, const PipelineConfig& cfg,
                            const std::filesystem::path& out_dir,
                            const TemplateCache& cache = {});

std::string format_comparison_table(const Comparison& c);
std::string format_comparison_kv(const Comparison& c);

}  // namespace iris
