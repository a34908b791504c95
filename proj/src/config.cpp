#include "iris/config.hpp"

#include "iris/error.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace iris {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string format_double(double v) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used == value.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
}

int parse_int(const std::string& key, const std::string& value) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size()) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "yes") return true;
    if (value == "0" || value == "false" || value == "no") return false;
    throw ConfigError("config key '" + key + "': expected a boolean, got '" + value + "'");
}

struct Field {
    std::function<void(PipelineConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const PipelineConfig&)> get;
};

template <typename T>
Field real_field(T PipelineConfig::*group, double T::*member) {
    return {[=](PipelineConfig& c, const std::string& k, const std::string& v) {
                (c.*group).*member = parse_double(k, v);
            },
            [=](const PipelineConfig& c) { return format_double((c.*group).*member); }};
}

template <typename T>
Field int_field(T PipelineConfig::*group, int T::*member) {
    return {[=](PipelineConfig& c, const std::string& k, const std::string& v) {
                (c.*group).*member = parse_int(k, v);
            },
            [=](const PipelineConfig& c) { return std::to_string((c.*group).*member); }};
}

Field top_int(int PipelineConfig::*member) {
    return {[=](PipelineConfig& c, const std::string& k, const std::string& v) {
                c.*member = parse_int(k, v);
            },
            [=](const PipelineConfig& c) { return std::to_string(c.*member); }};
}

// Ordered so the echo is stable.
const std::vector<std::pair<std::string, Field>>& fields() {
    using L = LocalizationConfig;
    using N = LamstarConfig;
    constexpr auto loc = &PipelineConfig::localization;
    constexpr auto net = &PipelineConfig::lamstar;
    static const std::vector<std::pair<std::string, Field>> table = {
        {"sigma", real_field(loc, &L::sigma)},
        {"t_high", real_field(loc, &L::t_high)},
        {"t_low", real_field(loc, &L::t_low)},
        {"horizontal_weight", real_field(loc, &L::horizontal_weight)},
        {"iris_r_min", int_field(loc, &L::iris_r_min)},
        {"iris_r_max", int_field(loc, &L::iris_r_max)},
        {"pupil_r_min", int_field(loc, &L::pupil_r_min)},
        {"pupil_r_max", int_field(loc, &L::pupil_r_max)},
        {"pupil_center_slack", int_field(loc, &L::pupil_center_slack)},
        {"radial_res", top_int(&PipelineConfig::radial_res)},
        {"angular_res", top_int(&PipelineConfig::angular_res)},
        {"learning_rate", real_field(net, &N::learning_rate)},
        {"winner_threshold", real_field(net, &N::winner_threshold)},
        {"convergence_target", real_field(net, &N::convergence_target)},
        {"max_update_iters", int_field(net, &N::max_update_iters)},
        {"delta", real_field(net, &N::delta)},
        {"normalized",
         {[](PipelineConfig& c, const std::string& k, const std::string& v) {
              c.lamstar.normalized = parse_bool(k, v);
          },
          [](const PipelineConfig& c) { return std::string(c.lamstar.normalized ? "1" : "0"); }}},
        {"epochs", int_field(net, &N::epochs)},
        {"update_rule",
         {[](PipelineConfig& c, const std::string& k, const std::string& v) {
              if (v == "always") {
                  c.lamstar.update_rule = UpdateRule::Always;
              } else if (v == "sign_mismatch") {
                  c.lamstar.update_rule = UpdateRule::SignMismatch;
              } else {
                  throw ConfigError("config key '" + k + "': expected always|sign_mismatch, got '" +
                                    v + "'");
              }
          },
          [](const PipelineConfig& c) {
              return std::string(c.lamstar.update_rule == UpdateRule::Always ? "always"
                                                                              : "sign_mismatch");
          }}},
        {"shift_range", top_int(&PipelineConfig::shift_range)},
        {"train_per_class", top_int(&PipelineConfig::train_per_class)},
        {"threads", top_int(&PipelineConfig::threads)},
    };
    return table;
}

}  // namespace

void apply_config_entry(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& [name, field] : fields()) {
        if (name == key) {
            field.set(cfg, key, trim(value));
            return;
        }
    }
    throw ConfigError("unknown config key '" + key + "'");
}

void apply_config_text(PipelineConfig& cfg, const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        }
        apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    PipelineConfig cfg;
    apply_config_text(cfg, ss.str());
    return cfg;
}

std::vector<std::pair<std::string, std::string>> config_entries(const PipelineConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [name, field] : fields()) out.emplace_back(name, field.get(cfg));
    return out;
}

std::string config_to_string(const PipelineConfig& cfg) {
    std::string out;
    for (const auto& [k, v] : config_entries(cfg)) out += k + " = " + v + "\n";
    return out;
}

std::string template_config_fingerprint(const PipelineConfig& cfg) {
    static const char* const keys[] = {"sigma",       "t_high",      "t_low",
                                       "horizontal_weight", "iris_r_min", "iris_r_max",
                                       "pupil_r_min", "pupil_r_max", "pupil_center_slack",
                                       "radial_res",  "angular_res"};
    const auto entries = config_entries(cfg);
    std::string out;
    for (const char* k : keys) {
        for (const auto& [name, value] : entries) {
            if (name == k) out += name + "=" + value + ";";
        }
    }
    return out;
}

}  // namespace iris
