#pragma once

// LAMSTAR classifier over iris templates.
//
// Every template column is one subword and feeds its own SOM module. A module
// is a growing set of unit-norm neurons; presenting a subword either selects
// the best neuron whose dot product reaches the winner threshold (and pulls it
// toward the subword while training) or, when none does, creates a new neuron
// equal to the subword. Winning neurons are linked to the class outputs through
// a decision layer that starts at zero and is trained by reward/punishment
// increments. The normalized variant divides each link by the number of times
// it was rewarded.

#include "iris/normalization.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace iris {

enum class UpdateRule {
    Always,        // every presentation: reward the true class, punish all others
    SignMismatch,  // only correct outputs whose sign disagrees with the target
};

struct LamstarConfig {
    double learning_rate = 0.8;
    double winner_threshold = 0.95;
    double convergence_target = 0.9999;
    int max_update_iters = 100;
    double delta = 0.05;
    bool normalized = false;
    int epochs = 10;
    UpdateRule update_rule = UpdateRule::Always;
};

struct Subword {
    std::vector<double> values;
    std::size_t source_column = 0;
    bool zero = false;  // norm below 1e-12; the module abstains
};

/// x / |x|; vectors with norm < 1e-12 come back as zeros with `zero` set.
Subword normalize_subword(std::span<const double> x, std::size_t source_column = 0);

/// One normalized subword per template column, in column order.
std::vector<Subword> template_to_subwords(const IrisTemplate& t);

double dot(std::span<const double> a, std::span<const double> b);

/// One Kohonen step w <- w + alpha (s - w), followed by renormalization to unit length.
void som_update_step(std::span<double> w, std::span<const double> s, double alpha);

class SomModule {
public:
    struct Presentation {
        std::optional<std::size_t> winner;
        bool created = false;
    };

    explicit SomModule(std::size_t dim = 0) : dim_(dim) {}

    /// Training-time presentation: update the winner or grow a new neuron.
    Presentation present(const Subword& s, const LamstarConfig& cfg);

    /// Inference: best neuron with dot >= threshold, lowest index on ties. Never mutates.
    std::optional<std::size_t> find_winner(const Subword& s, double threshold) const;

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return dim_ == 0 ? 0 : weights_.size() / dim_; }
    std::span<const double> neuron(std::size_t i) const {
        return {weights_.data() + i * dim_, dim_};
    }
    void add_neuron(std::span<const double> w);

private:
    std::size_t dim_;
    std::vector<double> weights_;  // size() x dim_, row-major
};

struct LinkKey {
    std::size_t module = 0;
    std::size_t neuron = 0;
    std::size_t cls = 0;
};

/// Zero-initialized links from (module, neuron) to class outputs.
///
/// Each link is kept as an integer net count (rewards minus punishments), so
/// its weight is exactly net_count * delta and the normalized reading
/// (net_count / rewards) * delta of a never-punished link is exactly delta.
class DecisionLayer {
public:
    DecisionLayer() = default;
    DecisionLayer(std::size_t num_modules, std::size_t num_classes, double delta);

    std::size_t num_classes() const { return num_classes_; }
    std::size_t num_modules() const { return modules_.size(); }
    double delta() const { return delta_; }

    double link(const LinkKey& k) const { return static_cast<double>(net_count(k)) * delta_; }
    std::int64_t net_count(const LinkKey& k) const;
    std::uint64_t reward_count(const LinkKey& k) const;

    void reward(const LinkKey& k);
    void punish(const LinkKey& k);
    void set(const LinkKey& k, std::int64_t net_count, std::uint64_t rewards);

    struct Record {
        LinkKey key;
        std::int64_t net_count = 0;
        std::uint64_t rewards = 0;
    };
    /// Every link that has been touched, ordered by (module, neuron, class).
    std::vector<Record> records() const;

private:
    struct Entry {
        std::int64_t net = 0;
        std::uint64_t rewards = 0;
        bool touched = false;
    };
    const Entry* find(const LinkKey& k) const;
    Entry& slot(const LinkKey& k);

    std::size_t num_classes_ = 0;
    double delta_ = 0.0;
    std::vector<std::vector<Entry>> modules_;  // per module: neuron * num_classes + cls
};

/// link / max(1, reward_count) when normalized, otherwise the raw link; 0 for unknown keys.
double effective_weight(const DecisionLayer& decision, const LinkKey& key, bool normalized);

struct Prediction {
    std::size_t class_index = 0;
    std::vector<double> scores;
    int shift = 0;                  // column shift whose scores were used
    std::size_t abstaining = 0;     // modules without a winner at that shift
};

struct TrainingLog {
    std::vector<std::size_t> neuron_counts;  // per module, after training
    std::size_t neurons_created = 0;
    int epochs_run = 0;
    std::vector<std::size_t> errors_per_epoch;
    double seconds = 0.0;

    /// True when the final epoch still misclassified something.
    bool irreducible_error() const {
        return !errors_per_epoch.empty() && errors_per_epoch.back() != 0;
    }
};

class LamstarNetwork {
public:
    LamstarNetwork() = default;
    LamstarNetwork(std::size_t num_modules, std::size_t subword_dim, std::size_t num_classes,
                   LamstarConfig cfg = {});

    std::size_t num_modules() const { return modules_.size(); }
    std::size_t subword_dim() const { return subword_dim_; }
    std::size_t num_classes() const { return decision_.num_classes(); }
    const LamstarConfig& config() const { return cfg_; }
    LamstarConfig& config() { return cfg_; }

    const std::vector<SomModule>& modules() const { return modules_; }
    const DecisionLayer& decision() const { return decision_; }

    /// Builds the SOM layer from every template, zeroes the decision layer,
    /// then runs up to cfg.epochs reward/punish passes, stopping after the
    /// first pass with no misclassification.
    TrainingLog train(std::span<const IrisTemplate> templates, std::span<const int> labels);

    /// Per-module winners for one presentation (no mutation).
    std::vector<std::optional<std::size_t>> winners(const std::vector<Subword>& subwords) const;

    /// Per-class sums of effective link weights for the given winners.
    std::vector<double> scores(const std::vector<std::optional<std::size_t>>& winners) const;

    /// Tries column shifts 0, -1, +1, ... up to +-shift_range and keeps the
    /// shift with the largest top score.
    Prediction classify(const IrisTemplate& t, int shift_range = 0) const;

    void save(const std::filesystem::path& path) const;
    static LamstarNetwork load(const std::filesystem::path& path);

private:
    void check_template(const IrisTemplate& t) const;

    std::size_t subword_dim_ = 0;
    LamstarConfig cfg_;
    std::vector<SomModule> modules_;
    DecisionLayer decision_;
};

/// argmax with ties resolved toward the lowest index.
std::size_t argmax_lowest(std::span<const double> scores);

}  // namespace iris
