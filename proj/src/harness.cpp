#include "iris/harness.hpp"

#include "iris/error.hpp"
#include "iris/parallel.hpp"
#include "iris/segmentation.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace iris {

namespace {

namespace fs = std::filesystem;

std::uint64_t fnv1a(std::uint64_t h, const char* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        h ^= static_cast<unsigned char>(data[i]);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read " + p.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot write " + p.string());
    out << content;
    if (!out) throw IoError("failed writing " + p.string());
}

// Shortest representation that round-trips.
std::string full(double v) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

// --- TemplateCache -----------------------------------------------------------

TemplateCache::TemplateCache(fs::path dir) : dir_(std::move(dir)) {}

TemplateCache TemplateCache::from_environment() {
    const char* dir = std::getenv(kCacheEnvVar);
    if (dir == nullptr || *dir == '\0') return {};
    return TemplateCache(dir);
}

std::string TemplateCache::key(const fs::path& image, const PipelineConfig& cfg) const {
    const std::string bytes = read_file(image);
    const std::string fingerprint = template_config_fingerprint(cfg);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    h = fnv1a(h, bytes.data(), bytes.size());
    h = fnv1a(h, fingerprint.data(), fingerprint.size());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::optional<IrisTemplate> TemplateCache::load(const std::string& key) const {
    if (!dir_) return std::nullopt;
    const fs::path p = *dir_ / (key + ".irt");
    std::error_code ec;
    if (!fs::exists(p, ec)) return std::nullopt;
    return load_template(p);
}

void TemplateCache::store(const std::string& key, const IrisTemplate& t) const {
    if (!dir_) return;
    std::error_code ec;
    fs::create_directories(*dir_, ec);
    if (ec) throw IoError("cannot create cache directory " + dir_->string() + ": " + ec.message());
    // Write-then-rename so concurrent readers never observe a partial file.
    const fs::path final_path = *dir_ / (key + ".irt");
    const fs::path tmp =
        *dir_ / (key + ".irt.tmp" +
                 std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())));
    save_template(t, tmp);
    fs::rename(tmp, final_path, ec);
    if (ec) throw IoError("cannot move template into cache: " + ec.message());
}

// --- template extraction ------------------------------------------------------

IrisTemplate extract_template(const GrayImage& img, const PipelineConfig& cfg) {
    const IrisLocalization loc = localize_iris(img, cfg.localization);
    return unwrap(img, loc, cfg.radial_res, cfg.angular_res);
}

std::vector<ExtractedTemplate> extract_templates(const std::vector<DatasetEntry>& entries,
                                                 const PipelineConfig& cfg,
                                                 const TemplateCache& cache,
                                                 ExtractionStats* stats) {
    std::vector<ExtractedTemplate> out(entries.size());
    std::vector<char> hit(entries.size(), 0);
    parallel_for(entries.size(), cfg.threads, [&](std::size_t i) {
        const auto& entry = entries[i];
        std::string key;
        if (cache.enabled()) {
            key = cache.key(entry.image, cfg);
            if (auto t = cache.load(key)) {
                out[i].tmpl = std::move(t);
                hit[i] = 1;
                return;
            }
        }
        const GrayImage img = load_gray_image(entry.image);
        try {
            out[i].tmpl = extract_template(img, cfg);
        } catch (const LocalizationError& e) {
            out[i].error = e.what();
            return;
        }
        if (cache.enabled()) cache.store(key, *out[i].tmpl);
    });
    if (stats) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (hit[i]) {
                ++stats->cache_hits;
            } else if (out[i].tmpl) {
                ++stats->computed;
            }
        }
    }
    return out;
}

// --- training ----------------------------------------------------------------

TrainingSet prepare_training_set(const DatasetIndex& index, const PipelineConfig& cfg,
                                 const TemplateCache& cache, ExtractionStats* stats) {
    const auto entries = index.split(Split::Train);
    if (entries.empty()) throw DatasetError("dataset index has no training entries");
    const auto extracted = extract_templates(entries, cfg, cache, stats);

    TrainingSet set;
    std::vector<int> per_class(static_cast<std::size_t>(index.num_classes()), 0);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!extracted[i].tmpl) {
            set.excluded.push_back({entries[i].image, extracted[i].error});
            continue;
        }
        set.templates.push_back(*extracted[i].tmpl);
        set.labels.push_back(entries[i].class_id);
        ++per_class[static_cast<std::size_t>(entries[i].class_id)];
    }
    for (std::size_t c = 0; c < per_class.size(); ++c) {
        if (per_class[c] == 0) {
            throw DatasetError("class '" + index.class_names[c] +
                               "' has no usable training images after localization");
        }
    }
    return set;
}

TrainOutcome train_network(const TrainingSet& set, int num_classes, const PipelineConfig& cfg) {
    TrainOutcome outcome;
    outcome.network = LamstarNetwork(static_cast<std::size_t>(cfg.angular_res),
                                     static_cast<std::size_t>(cfg.radial_res),
                                     static_cast<std::size_t>(num_classes), cfg.lamstar);
    outcome.log = outcome.network.train(set.templates, set.labels);
    outcome.excluded = set.excluded;
    return outcome;
}

TrainOutcome run_train(const DatasetIndex& index, const PipelineConfig& cfg,
                       const TemplateCache& cache) {
    ExtractionStats stats;
    const TrainingSet set = prepare_training_set(index, cfg, cache, &stats);
    TrainOutcome outcome = train_network(set, index.num_classes(), cfg);
    outcome.stats = stats;
    return outcome;
}

void write_training_log(const TrainOutcome& outcome, const fs::path& path) {
    std::ostringstream os;
    const auto& log = outcome.log;
    os << "epochs_run=" << log.epochs_run << '\n';
    os << "errors_per_epoch=";
    for (std::size_t i = 0; i < log.errors_per_epoch.size(); ++i) {
        os << (i ? "," : "") << log.errors_per_epoch[i];
    }
    os << '\n';
    os << "irreducible_error=" << (log.irreducible_error() ? 1 : 0) << '\n';
    os << "neurons_created=" << log.neurons_created << '\n';
    os << "neuron_counts=";
    for (std::size_t i = 0; i < log.neuron_counts.size(); ++i) {
        os << (i ? "," : "") << log.neuron_counts[i];
    }
    os << '\n';
    os << "excluded=" << outcome.excluded.size() << '\n';
    for (const auto& e : outcome.excluded) {
        os << "excluded.image=" << e.image.string() << " | " << e.reason << '\n';
    }
    os << "run.train_seconds=" << full(log.seconds) << '\n';
    os << "run.templates_computed=" << outcome.stats.computed << '\n';
    os << "run.templates_cached=" << outcome.stats.cache_hits << '\n';
    write_file(path, os.str());
}

// --- evaluation --------------------------------------------------------------

TestSet prepare_test_set(const DatasetIndex& index, const PipelineConfig& cfg,
                         const TemplateCache& cache, Split split, ExtractionStats* stats) {
    const auto entries = index.split(split);
    const auto extracted = extract_templates(entries, cfg, cache, stats);
    TestSet set;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!extracted[i].tmpl) {
            set.excluded.push_back({entries[i].image, extracted[i].error});
            continue;
        }
        set.templates.push_back(*extracted[i].tmpl);
        set.labels.push_back(entries[i].class_id);
    }
    return set;
}

EvalReport evaluate(const LamstarNetwork& net, const TestSet& tests,
                    const std::vector<std::string>& class_names, const PipelineConfig& cfg) {
    const std::size_t k = net.num_classes();
    if (class_names.size() != k) {
        throw ConfigError("model has " + std::to_string(k) + " classes but the dataset has " +
                          std::to_string(class_names.size()));
    }
    EvalReport r;
    r.variant = net.config().normalized ? "normalized" : "regular";
    r.class_names = class_names;
    r.config = cfg;
    r.config.lamstar.normalized = net.config().normalized;
    r.config.lamstar.delta = net.config().delta;
    r.config.lamstar.winner_threshold = net.config().winner_threshold;
    r.excluded = tests.excluded;
    r.confusion.assign(k, std::vector<std::size_t>(k, 0));

    std::vector<std::size_t> predicted(tests.templates.size());
    const auto start = std::chrono::steady_clock::now();
    parallel_for(tests.templates.size(), cfg.threads, [&](std::size_t i) {
        predicted[i] = net.classify(tests.templates[i], cfg.shift_range).class_index;
    });
    r.test_seconds = seconds_since(start);

    for (std::size_t i = 0; i < predicted.size(); ++i) {
        ++r.confusion[static_cast<std::size_t>(tests.labels[i])][predicted[i]];
    }
    r.num_test = predicted.size();
    r.per_class_accuracy.resize(k);
    for (std::size_t c = 0; c < k; ++c) {
        std::size_t row = 0;
        for (std::size_t v : r.confusion[c]) row += v;
        r.num_correct += r.confusion[c][c];
        if (row > 0) r.per_class_accuracy[c] = static_cast<double>(r.confusion[c][c]) / row;
    }
    if (r.num_test > 0) r.accuracy = static_cast<double>(r.num_correct) / r.num_test;
    return r;
}

EvalReport run_eval(const fs::path& model, const DatasetIndex& index, const PipelineConfig& cfg,
                    const TemplateCache& cache, Split split) {
    const LamstarNetwork net = LamstarNetwork::load(model);
    if (net.num_modules() != static_cast<std::size_t>(cfg.angular_res) ||
        net.subword_dim() != static_cast<std::size_t>(cfg.radial_res)) {
        throw ConfigError("model expects " + std::to_string(net.subword_dim()) + "x" +
                          std::to_string(net.num_modules()) + " templates but the config produces " +
                          std::to_string(cfg.radial_res) + "x" + std::to_string(cfg.angular_res));
    }
    return evaluate(net, prepare_test_set(index, cfg, cache, split), index.class_names, cfg);
}

// --- reports -----------------------------------------------------------------

std::string format_report_text(const EvalReport& r) {
    std::ostringstream os;
    os << std::fixed;
    os << "LAMSTAR evaluation (" << r.variant << ")\n";
    os << "test templates: " << r.num_test << ", correct: " << r.num_correct << '\n';
    if (r.accuracy) {
        os << "accuracy: " << std::setprecision(2) << 100.0 * *r.accuracy << "%\n";
    } else {
        os << "accuracy: undefined (no test templates)\n";
    }
    if (!r.excluded.empty()) {
        os << "excluded (localization failed): " << r.excluded.size() << '\n';
        for (const auto& e : r.excluded) os << "  " << e.image.string() << ": " << e.reason << '\n';
    }
    os << "\nper-class accuracy:\n";
    for (std::size_t c = 0; c < r.class_names.size(); ++c) {
        os << "  " << std::left << std::setw(16) << r.class_names[c] << std::right;
        if (r.per_class_accuracy[c]) {
            os << std::setprecision(2) << 100.0 * *r.per_class_accuracy[c] << "%\n";
        } else {
            os << "n/a\n";
        }
    }
    os << "\nconfusion (rows = true class, columns = predicted):\n";
    for (const auto& row : r.confusion) {
        os << ' ';
        for (std::size_t v : row) os << ' ' << std::setw(3) << v;
        os << '\n';
    }
    os << "\ntiming (wall clock): ";
    if (r.train_seconds) os << "train " << std::setprecision(4) << *r.train_seconds << " s, ";
    os << "test " << std::setprecision(4) << r.test_seconds << " s\n";
    os << "\nconfiguration:\n";
    for (const auto& [k, v] : config_entries(r.config)) {
        if (k != "threads") os << "  " << k << " = " << v << '\n';
    }
    return os.str();
}

std::string format_report_kv(const EvalReport& r) {
    std::ostringstream os;
    os << "variant=" << r.variant << '\n';
    os << "num_classes=" << r.class_names.size() << '\n';
    os << "num_test=" << r.num_test << '\n';
    os << "num_correct=" << r.num_correct << '\n';
    os << "accuracy=" << (r.accuracy ? full(*r.accuracy) : std::string("undefined")) << '\n';
    os << "excluded=" << r.excluded.size() << '\n';
    for (std::size_t c = 0; c < r.class_names.size(); ++c) {
        os << "class." << c << ".name=" << r.class_names[c] << '\n';
        os << "class." << c << ".accuracy="
           << (r.per_class_accuracy[c] ? full(*r.per_class_accuracy[c]) : std::string("undefined"))
           << '\n';
        os << "confusion." << c << '=';
        for (std::size_t j = 0; j < r.confusion[c].size(); ++j) {
            os << (j ? "," : "") << r.confusion[c][j];
        }
        os << '\n';
    }
    for (const auto& e : r.excluded) os << "excluded.image=" << e.image.string() << '\n';
    for (const auto& [k, v] : config_entries(r.config)) {
        if (k != "threads") os << "config." << k << '=' << v << '\n';
    }
    if (r.train_seconds) os << "run.train_seconds=" << full(*r.train_seconds) << '\n';
    os << "run.test_seconds=" << full(r.test_seconds) << '\n';
    os << "run.threads=" << r.config.threads << '\n';
    return os.str();
}

void write_report(const EvalReport& r, const fs::path& prefix) {
    write_file(fs::path(prefix.string() + ".txt"), format_report_text(r));
    write_file(fs::path(prefix.string() + ".kv"), format_report_kv(r));
}

// --- variant comparison ------------------------------------------------------

Comparison compare_variants(const DatasetIndex& index, const PipelineConfig& cfg,
                            const fs::path& out_dir, const TemplateCache& cache) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    const TrainingSet train = prepare_training_set(index, cfg, cache);
    const TestSet tests = prepare_test_set(index, cfg, cache);

    Comparison cmp;
    for (const bool normalized : {false, true}) {
        PipelineConfig variant_cfg = cfg;
        variant_cfg.lamstar.normalized = normalized;
        TrainOutcome outcome = train_network(train, index.num_classes(), variant_cfg);

        VariantResult row;
        row.name = normalized ? "normalized" : "regular";
        row.model = out_dir / ("model_" + row.name + ".lns");
        outcome.network.save(row.model);
        write_training_log(outcome, out_dir / ("train_" + row.name + ".log"));
        row.log = outcome.log;
        row.report = evaluate(outcome.network, tests, index.class_names, variant_cfg);
        row.report.train_seconds = outcome.log.seconds;
        write_report(row.report, out_dir / ("report_" + row.name));
        cmp.rows.push_back(std::move(row));
    }
    write_file(out_dir / "comparison.txt", format_comparison_table(cmp));
    write_file(out_dir / "comparison.kv", format_comparison_kv(cmp));
    return cmp;
}

std::string format_comparison_table(const Comparison& c) {
    std::ostringstream os;
    os << std::left << std::setw(22) << "Algorithm" << std::right << std::setw(18)
       << "Recognition rate" << std::setw(12) << "Train (s)" << std::setw(12) << "Test (s)" << '\n';
    for (const auto& row : c.rows) {
        const std::string label = row.name == "regular" ? "LAMSTAR" : "Normalized LAMSTAR";
        std::ostringstream rate;
        if (row.report.accuracy) {
            rate << std::fixed << std::setprecision(2) << 100.0 * *row.report.accuracy << '%';
        } else {
            rate << "n/a";
        }
        os << std::left << std::setw(22) << label << std::right << std::setw(18) << rate.str()
           << std::fixed << std::setprecision(4) << std::setw(12) << row.log.seconds
           << std::setw(12) << row.report.test_seconds << '\n';
    }
    return os.str();
}

std::string format_comparison_kv(const Comparison& c) {
    std::ostringstream os;
    for (const auto& row : c.rows) {
        os << row.name << ".accuracy="
           << (row.report.accuracy ? full(*row.report.accuracy) : std::string("undefined")) << '\n';
        os << row.name << ".num_correct=" << row.report.num_correct << '\n';
        os << row.name << ".num_test=" << row.report.num_test << '\n';
        os << row.name << ".epochs_run=" << row.log.epochs_run << '\n';
    }
    if (!c.rows.empty()) {
        for (const auto& [k, v] : config_entries(c.rows.front().report.config)) {
            if (k != "threads" && k != "normalized") os << "config." << k << '=' << v << '\n';
        }
    }
    for (const auto& row : c.rows) {
        os << "run." << row.name << ".train_seconds=" << full(row.log.seconds) << '\n';
        os << "run." << row.name << ".test_seconds=" << full(row.report.test_seconds) << '\n';
    }
    return os.str();
}

}  // namespace iris
