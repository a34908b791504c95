#include "iris/lamstar.hpp"

#include "iris/binary_io.hpp"
#include "iris/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

namespace iris {

Subword normalize_subword(std::span<const double> x, std::size_t source_column) {
    Subword s;
    s.source_column = source_column;
    double sq = 0.0;
    for (double v : x) sq += v * v;
    const double norm = std::sqrt(sq);
    if (norm < 1e-12) {
        s.values.assign(x.size(), 0.0);
        s.zero = true;
        return s;
    }
    s.values.resize(x.size());
    std::transform(x.begin(), x.end(), s.values.begin(), [norm](double v) { return v / norm; });
    return s;
}

std::vector<Subword> template_to_subwords(const IrisTemplate& t) {
    std::vector<Subword> out;
    out.reserve(static_cast<std::size_t>(t.angular_res()));
    for (int j = 0; j < t.angular_res(); ++j) {
        out.push_back(normalize_subword(t.column(j), static_cast<std::size_t>(j)));
    }
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void som_update_step(std::span<double> w, std::span<const double> s, double alpha) {
    double sq = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] += alpha * (s[i] - w[i]);
        sq += w[i] * w[i];
    }
    const double norm = std::sqrt(sq);
    if (norm > 0.0) {
        for (double& v : w) v /= norm;
    }
}

// --- SomModule ---------------------------------------------------------------

void SomModule::add_neuron(std::span<const double> w) {
    if (w.size() != dim_) throw ArgumentError("SomModule: neuron dimension mismatch");
    weights_.insert(weights_.end(), w.begin(), w.end());
}

std::optional<std::size_t> SomModule::find_winner(const Subword& s, double threshold) const {
    if (s.zero) return std::nullopt;
    std::optional<std::size_t> best;
    double best_dot = threshold;
    for (std::size_t i = 0; i < size(); ++i) {
        const double d = dot(neuron(i), s.values);
        if (d > best_dot || (!best && d >= best_dot)) {
            best = i;
            best_dot = d;
        }
    }
    return best;
}

SomModule::Presentation SomModule::present(const Subword& s, const LamstarConfig& cfg) {
    if (s.zero) return {};
    if (s.values.size() != dim_) throw ArgumentError("SomModule: subword dimension mismatch");
    if (const auto w = find_winner(s, cfg.winner_threshold)) {
        std::span<double> weights{weights_.data() + *w * dim_, dim_};
        for (int k = 0; k < cfg.max_update_iters && dot(weights, s.values) < cfg.convergence_target;
             ++k) {
            som_update_step(weights, s.values, cfg.learning_rate);
        }
        return {w, false};
    }
    add_neuron(s.values);
    return {size() - 1, true};
}

// --- DecisionLayer -----------------------------------------------------------

DecisionLayer::DecisionLayer(std::size_t num_modules, std::size_t num_classes, double delta)
    : num_classes_(num_classes), delta_(delta), modules_(num_modules) {}

const DecisionLayer::Entry* DecisionLayer::find(const LinkKey& k) const {
    if (k.module >= modules_.size() || k.cls >= num_classes_) return nullptr;
    const auto& m = modules_[k.module];
    const std::size_t i = k.neuron * num_classes_ + k.cls;
    return i < m.size() ? &m[i] : nullptr;
}

DecisionLayer::Entry& DecisionLayer::slot(const LinkKey& k) {
    if (k.module >= modules_.size() || k.cls >= num_classes_) {
        throw ArgumentError("DecisionLayer: link key out of range");
    }
    auto& m = modules_[k.module];
    const std::size_t i = k.neuron * num_classes_ + k.cls;
    if (i >= m.size()) m.resize((k.neuron + 1) * num_classes_);
    return m[i];
}

std::int64_t DecisionLayer::net_count(const LinkKey& k) const {
    const Entry* e = find(k);
    return e ? e->net : 0;
}

std::uint64_t DecisionLayer::reward_count(const LinkKey& k) const {
    const Entry* e = find(k);
    return e ? e->rewards : 0;
}

void DecisionLayer::reward(const LinkKey& k) {
    Entry& e = slot(k);
    ++e.net;
    ++e.rewards;
    e.touched = true;
}

void DecisionLayer::punish(const LinkKey& k) {
    Entry& e = slot(k);
    --e.net;
    e.touched = true;
}

void DecisionLayer::set(const LinkKey& k, std::int64_t net_count, std::uint64_t rewards) {
    Entry& e = slot(k);
    e.net = net_count;
    e.rewards = rewards;
    e.touched = true;
}

std::vector<DecisionLayer::Record> DecisionLayer::records() const {
    std::vector<Record> out;
    for (std::size_t m = 0; m < modules_.size(); ++m) {
        const auto& entries = modules_[m];
        for (std::size_t i = 0; i < entries.size(); ++i) {
            if (!entries[i].touched) continue;
            out.push_back({{m, i / num_classes_, i % num_classes_}, entries[i].net,
                           entries[i].rewards});
        }
    }
    return out;
}

double effective_weight(const DecisionLayer& decision, const LinkKey& key, bool normalized) {
    const auto net = static_cast<double>(decision.net_count(key));
    const std::uint64_t n = decision.reward_count(key);
    if (!normalized || n <= 1) return net * decision.delta();
    return (net / static_cast<double>(n)) * decision.delta();
}

std::size_t argmax_lowest(std::span<const double> scores) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.size(); ++c) {
        if (scores[c] > scores[best]) best = c;
    }
    return best;
}

// --- LamstarNetwork ----------------------------------------------------------

LamstarNetwork::LamstarNetwork(std::size_t num_modules, std::size_t subword_dim,
                               std::size_t num_classes, LamstarConfig cfg)
    : subword_dim_(subword_dim),
      cfg_(cfg),
      modules_(num_modules, SomModule(subword_dim)),
      decision_(num_modules, num_classes, cfg.delta) {
    if (num_modules == 0 || subword_dim == 0 || num_classes == 0) {
        throw ArgumentError("LamstarNetwork: dimensions must be positive");
    }
}

void LamstarNetwork::check_template(const IrisTemplate& t) const {
    if (static_cast<std::size_t>(t.angular_res()) != modules_.size() ||
        static_cast<std::size_t>(t.radial_res()) != subword_dim_) {
        throw ArgumentError("template is " + std::to_string(t.radial_res()) + "x" +
                            std::to_string(t.angular_res()) + " but the network expects " +
                            std::to_string(subword_dim_) + "x" + std::to_string(modules_.size()));
    }
}

std::vector<std::optional<std::size_t>> LamstarNetwork::winners(
    const std::vector<Subword>& subwords) const {
    std::vector<std::optional<std::size_t>> out(modules_.size());
    for (std::size_t m = 0; m < modules_.size(); ++m) {
        out[m] = modules_[m].find_winner(subwords[m], cfg_.winner_threshold);
    }
    return out;
}

std::vector<double> LamstarNetwork::scores(
    const std::vector<std::optional<std::size_t>>& winners) const {
    std::vector<double> out(num_classes(), 0.0);
    for (std::size_t m = 0; m < winners.size(); ++m) {
        if (!winners[m]) continue;
        for (std::size_t c = 0; c < out.size(); ++c) {
            out[c] += effective_weight(decision_, {m, *winners[m], c}, cfg_.normalized);
        }
    }
    return out;
}

TrainingLog LamstarNetwork::train(std::span<const IrisTemplate> templates,
                                  std::span<const int> labels) {
    if (templates.size() != labels.size()) {
        throw ArgumentError("train: template and label counts differ");
    }
    for (std::size_t i = 0; i < templates.size(); ++i) {
        check_template(templates[i]);
        if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= num_classes()) {
            throw ArgumentError("train: label " + std::to_string(labels[i]) + " out of range");
        }
    }
    const auto start = std::chrono::steady_clock::now();
    TrainingLog log;

    std::vector<std::vector<Subword>> subwords;
    subwords.reserve(templates.size());
    for (const auto& t : templates) subwords.push_back(template_to_subwords(t));

    for (const auto& words : subwords) {
        for (std::size_t m = 0; m < modules_.size(); ++m) {
            if (modules_[m].present(words[m], cfg_).created) ++log.neurons_created;
        }
    }

    decision_ = DecisionLayer(modules_.size(), num_classes(), cfg_.delta);
    for (int epoch = 0; epoch < cfg_.epochs; ++epoch) {
        std::size_t errors = 0;
        for (std::size_t i = 0; i < subwords.size(); ++i) {
            const auto win = winners(subwords[i]);
            const auto sc = scores(win);
            const auto label = static_cast<std::size_t>(labels[i]);
            if (argmax_lowest(sc) != label) ++errors;

            for (std::size_t m = 0; m < win.size(); ++m) {
                if (!win[m]) continue;
                for (std::size_t c = 0; c < sc.size(); ++c) {
                    const LinkKey key{m, *win[m], c};
                    const bool desired = c == label;
                    if (cfg_.update_rule == UpdateRule::Always) {
                        desired ? decision_.reward(key) : decision_.punish(key);
                    } else {
                        const bool firing = sc[c] > 0.0;
                        if (desired && !firing) decision_.reward(key);
                        if (!desired && firing) decision_.punish(key);
                    }
                }
            }
        }
        log.errors_per_epoch.push_back(errors);
        log.epochs_run = epoch + 1;
        if (errors == 0) break;
    }

    log.neuron_counts.reserve(modules_.size());
    for (const auto& m : modules_) log.neuron_counts.push_back(m.size());
    log.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return log;
}

Prediction LamstarNetwork::classify(const IrisTemplate& t, int shift_range) const {
    check_template(t);
    shift_range = std::max(shift_range, 0);
    Prediction best;
    bool have = false;
    for (int k = 0; k <= 2 * shift_range; ++k) {
        const int shift = (k % 2 == 0) ? k / 2 : -(k + 1) / 2;
        const IrisTemplate shifted = shift == 0 ? t : rotate_template(t, shift);
        const auto win = winners(template_to_subwords(shifted));
        auto sc = scores(win);
        const std::size_t cls = argmax_lowest(sc);
        if (!have || sc[cls] > best.scores[best.class_index]) {
            best.class_index = cls;
            best.scores = std::move(sc);
            best.shift = shift;
            best.abstaining = static_cast<std::size_t>(
                std::count_if(win.begin(), win.end(), [](const auto& w) { return !w; }));
            have = true;
        }
    }
    return best;
}

// --- LNS1 persistence -------------------------------------------------------

namespace {
constexpr std::uint64_t kRecordBytes = 40;
}

void LamstarNetwork::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model " + path.string());
    std::ostringstream header;
    header << std::setprecision(17) << "LNS1 " << modules_.size() << ' ' << subword_dim_ << ' '
           << num_classes() << ' ' << (cfg_.normalized ? 1 : 0) << ' ' << decision_.delta() << ' '
           << cfg_.winner_threshold << '\n';
    out << header.str();
    for (const auto& m : modules_) {
        binary_io::write_u64(out, m.size());
        for (std::size_t i = 0; i < m.size(); ++i) {
            for (double v : m.neuron(i)) binary_io::write_f64(out, v);
        }
    }
    const auto recs = decision_.records();
    for (const auto& r : recs) {
        binary_io::write_u64(out, r.key.module);
        binary_io::write_u64(out, r.key.neuron);
        binary_io::write_u64(out, r.key.cls);
        binary_io::write_f64(out, static_cast<double>(r.net_count) * decision_.delta());
        binary_io::write_u64(out, r.rewards);
    }
    binary_io::write_u64(out, recs.size());
    if (!out) throw IoError("failed writing model " + path.string());
}

LamstarNetwork LamstarNetwork::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open model " + path.string());
    std::string header;
    if (!std::getline(in, header)) throw FormatError(path.string() + ": missing LNS1 header");
    std::istringstream hs(header);
    std::string magic;
    std::size_t num_modules = 0;
    std::size_t dim = 0;
    std::size_t num_classes = 0;
    int normalized = 0;
    LamstarConfig cfg;
    if (!(hs >> magic >> num_modules >> dim >> num_classes >> normalized >> cfg.delta >>
          cfg.winner_threshold) ||
        magic != "LNS1" || num_modules == 0 || dim == 0 || num_classes == 0 ||
        !(cfg.delta > 0.0)) {
        throw FormatError(path.string() + ": malformed LNS1 header '" + header + "'");
    }
    cfg.normalized = normalized != 0;
    LamstarNetwork net(num_modules, dim, num_classes, cfg);

    std::vector<double> w(dim);
    for (auto& m : net.modules_) {
        std::uint64_t count = 0;
        if (!binary_io::read_u64(in, count)) throw FormatError(path.string() + ": truncated SOM layer");
        for (std::uint64_t i = 0; i < count; ++i) {
            for (double& v : w) {
                if (!binary_io::read_f64(in, v)) {
                    throw FormatError(path.string() + ": truncated neuron weights");
                }
            }
            m.add_neuron(w);
        }
    }

    const std::string rest{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (rest.size() < 8 || (rest.size() - 8) % kRecordBytes != 0) {
        throw FormatError(path.string() + ": decision layer has an invalid length");
    }
    const std::uint64_t expected = (rest.size() - 8) / kRecordBytes;
    std::istringstream records(rest);
    for (std::uint64_t i = 0; i < expected; ++i) {
        std::uint64_t module = 0;
        std::uint64_t neuron = 0;
        std::uint64_t cls = 0;
        std::uint64_t rewards = 0;
        double weight = 0.0;
        binary_io::read_u64(records, module);
        binary_io::read_u64(records, neuron);
        binary_io::read_u64(records, cls);
        binary_io::read_f64(records, weight);
        binary_io::read_u64(records, rewards);
        if (module >= num_modules || cls >= num_classes ||
            neuron >= net.modules_[module].size()) {
            throw FormatError(path.string() + ": decision record out of range");
        }
        // Weights are stored as net_count * delta; recover the integer count.
        const double count = std::round(weight / cfg.delta);
        if (static_cast<double>(static_cast<std::int64_t>(count)) * cfg.delta != weight) {
            throw FormatError(path.string() + ": link weight is not a multiple of delta");
        }
        net.decision_.set({module, neuron, cls}, static_cast<std::int64_t>(count), rewards);
    }
    std::uint64_t trailer = 0;
    binary_io::read_u64(records, trailer);
    if (trailer != expected) {
        throw FormatError(path.string() + ": record count trailer " + std::to_string(trailer) +
                          " does not match " + std::to_string(expected) + " records");
    }
    return net;
}

}  // namespace iris
