#include "pisac/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pisac {

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Entry {
    std::string value;
    int line;
    bool consumed = false;
};

struct Document {
    std::string origin;
    std::map<std::string, std::map<std::string, Entry>> sections;

    [[noreturn]] void fail(int line, const std::string& message) const {
        throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + message);
    }
};

Document parse_ini(const std::string& text, const std::string& origin) {
    Document doc;
    doc.origin = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    bool any_content = false;

    while (std::getline(in, line)) {
        ++line_no;
        // '#' only; ';' separates points inside fixed_users/fixed_targets
        const auto comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        any_content = true;

        if (line.front() == '[') {
            if (line.back() != ']') doc.fail(line_no, "malformed section header: " + line);
            section = trim(line.substr(1, line.size() - 2));
            if (section != "scenario" && section != "train" && section != "output")
                doc.fail(line_no, "unknown section [" + section + "]");
            doc.sections[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) doc.fail(line_no, "expected key = value, got: " + line);
        if (section.empty()) doc.fail(line_no, "key outside any section: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) doc.fail(line_no, "empty key");
        auto [it, inserted] = doc.sections[section].insert({key, Entry{value, line_no}});
        if (!inserted) doc.fail(line_no, "duplicate key '" + key + "' in [" + section + "]");
    }

    if (!any_content) throw std::runtime_error(origin + ": empty config");
    return doc;
}

class SectionReader {
  public:
    SectionReader(Document& doc, const std::string& name) : doc_(doc), name_(name) {
        auto it = doc.sections.find(name);
        entries_ = it == doc.sections.end() ? nullptr : &it->second;
    }

    const Entry* find(const std::string& key) {
        if (!entries_) return nullptr;
        auto it = entries_->find(key);
        if (it == entries_->end()) return nullptr;
        it->second.consumed = true;
        return &it->second;
    }

    double number(const std::string& key, double fallback) {
        const Entry* e = find(key);
        if (!e) return fallback;
        return parse_number(*e, key);
    }

    /// Number with an `auto` escape hatch; `auto` maps to the sentinel.
    double number_or_auto(const std::string& key, double fallback, double sentinel = 0.0) {
        const Entry* e = find(key);
        if (!e) return fallback;
        if (e->value == "auto") return sentinel;
        return parse_number(*e, key);
    }

    int integer(const std::string& key, int fallback) {
        const Entry* e = find(key);
        if (!e) return fallback;
        const double v = parse_number(*e, key);
        if (v != std::floor(v)) doc_.fail(e->line, "key '" + key + "' must be an integer");
        return static_cast<int>(v);
    }

    bool boolean(const std::string& key, bool fallback) {
        const Entry* e = find(key);
        if (!e) return fallback;
        if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
        if (e->value == "false" || e->value == "0" || e->value == "no") return false;
        doc_.fail(e->line, "key '" + key + "' must be a boolean, got '" + e->value + "'");
    }

    std::string text(const std::string& key, const std::string& fallback) {
        const Entry* e = find(key);
        return e ? e->value : fallback;
    }

    double parse_number(const Entry& e, const std::string& key) {
        try {
            size_t used = 0;
            const double v = std::stod(e.value, &used);
            if (used != e.value.size()) throw std::invalid_argument("trailing characters");
            return v;
        } catch (const std::exception&) {
            doc_.fail(e.line, "key '" + key + "' needs a number, got '" + e.value + "'");
        }
    }

    [[noreturn]] void fail(const std::string& key, const std::string& message) {
        const Entry* e = entries_ ? find(key) : nullptr;
        doc_.fail(e ? e->line : 0, message);
    }

    Document& doc_;
    std::string name_;
    std::map<std::string, Entry>* entries_;
};

std::vector<Vec3> parse_points(Document& doc, const Entry& e, const std::string& key) {
    // "x1,y1; x2,y2; ..." - z is pinned to 0 by the plane-placement rule
    std::vector<Vec3> points;
    std::istringstream in(e.value);
    std::string item;
    while (std::getline(in, item, ';')) {
        item = trim(item);
        if (item.empty()) continue;
        double x = 0.0, y = 0.0;
        if (std::sscanf(item.c_str(), "%lf , %lf", &x, &y) != 2)
            doc.fail(e.line, "key '" + key + "' expects 'x,y; x,y; ...' pairs, got '" + item + "'");
        points.push_back({x, y, 0.0});
    }
    if (points.empty()) doc.fail(e.line, "key '" + key + "' lists no points");
    return points;
}

DeploymentKind deployment_from_string(const std::string& s) {
    if (s == "1d" || s == "1D") return DeploymentKind::OneD;
    if (s == "2d" || s == "2D") return DeploymentKind::TwoD;
    if (s == "3d" || s == "3D") return DeploymentKind::ThreeD;
    throw std::invalid_argument("unknown deployment: " + s);
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

uint64_t fnv1a_text(const std::string& s) {
    uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

// `for_hash` drops the axes experiments sweep over (deployment, power caps)
// so reports from one study hash alike while different worlds do not.
std::string scenario_section_text(const ExperimentConfig& c, bool for_hash = false) {
    const WorldSpec& w = c.world;
    std::ostringstream out;
    out << "[scenario]\n";
    out << "users = " << w.n_users << "\n";
    out << "targets = " << w.n_targets << "\n";
    out << "antennas = " << w.n_antennas << "\n";
    out << "area_m = " << format_number(w.area) << "\n";
    out << "height_m = " << format_number(w.height) << "\n";
    out << "riser_length_m = " << format_number(w.riser_length > 0.0 ? w.riser_length : w.area)
        << "\n";
    out << "carrier_freq_hz = " << format_number(w.carrier_freq_hz) << "\n";
    out << "n_eff = " << format_number(w.n_eff) << "\n";
    out << "min_spacing_m = " << format_number(w.resolved_min_spacing()) << "\n";
    out << "noise_dbm = " << format_number(c.noise_dbm) << "\n";
    out << "gamma_min_db = " << format_number(c.gamma_min_db) << "\n";
    if (!for_hash) {
        out << "per_antenna_power_w = " << format_number(c.per_antenna_power_w) << "\n";
        out << "max_user_power_w = " << format_number(w.max_user_power) << "\n";
    }
    out << "total_power_w = " << format_number(c.total_power_w) << "\n";
    out << "energy_budget = " << format_number(w.energy_budget) << "\n";
    out << "slots = " << w.slots << "\n";
    if (!for_hash) out << "deployment = " << to_string(w.deployment) << "\n";
    out << "placement = "
        << (w.placement.kind == PlacementSpec::Kind::Uniform ? "uniform" : "ring") << "\n";
    out << "ring_radius_m = " << format_number(w.placement.ring_radius) << "\n";
    out << "target_jitter_m = " << format_number(w.placement.target_jitter) << "\n";
    if (w.placement.fixed_users) {
        out << "fixed_users = ";
        for (size_t i = 0; i < w.placement.fixed_users->size(); ++i) {
            const Vec3& p = (*w.placement.fixed_users)[i];
            out << (i ? "; " : "") << format_number(p.x) << "," << format_number(p.y);
        }
        out << "\n";
    }
    if (w.placement.fixed_targets) {
        out << "fixed_targets = ";
        for (size_t i = 0; i < w.placement.fixed_targets->size(); ++i) {
            const Vec3& p = (*w.placement.fixed_targets)[i];
            out << (i ? "; " : "") << format_number(p.x) << "," << format_number(p.y);
        }
        out << "\n";
    }
    out << "snr_amplitude_mode = " << to_string(w.snr_mode) << "\n";
    out << "step_max_m = " << format_number(w.resolved_step_max()) << "\n";
    out << "position_scale = " << format_number(w.resolved_position_scale()) << "\n";
    out << "context_features = " << (w.context_features ? "true" : "false") << "\n";
    out << "lambda_sensing = " << format_number(w.reward_weights.sensing) << "\n";
    out << "lambda_phys = " << format_number(w.reward_weights.phys) << "\n";
    out << "lambda_energy = " << format_number(w.reward_weights.energy) << "\n";
    return out.str();
}

}  // namespace

std::string ExperimentConfig::echo_ini() const {
    std::ostringstream out;
    out << scenario_section_text(*this);
    out << "\n[train]\n";
    out << "algorithm = " << to_string(algorithm) << "\n";
    out << "episodes = " << train.episodes << "\n";
    out << "gamma = " << format_number(train.discount) << "\n";
    out << "clip_epsilon = " << format_number(train.clip_epsilon) << "\n";
    out << "actor_lr = " << format_number(train.actor_lr) << "\n";
    out << "critic_lr = " << format_number(train.critic_lr) << "\n";
    out << "entropy_weight = " << format_number(train.entropy_weight) << "\n";
    out << "grad_clip = " << format_number(train.grad_clip) << "\n";
    out << "hidden_dim = " << train.hidden << "\n";
    out << "gnn_layers = " << train.gnn_layers << "\n";
    out << "eval_episodes = " << train.eval_episodes << "\n";
    out << "seeds = ";
    for (size_t i = 0; i < seeds.size(); ++i) out << (i ? "," : "") << seeds[i];
    out << "\n";
    out << "\n[output]\n";
    out << "dir = " << out_dir << "\n";
    out << "write_checkpoints = " << (write_checkpoints ? "true" : "false") << "\n";
    return out.str();
}

uint64_t ExperimentConfig::scenario_hash() const {
    return fnv1a_text(scenario_section_text(*this, /*for_hash=*/true));
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
    Document doc = parse_ini(text, origin);
    ExperimentConfig cfg;
    WorldSpec& w = cfg.world;

    SectionReader scenario(doc, "scenario");
    w.n_users = scenario.integer("users", 6);
    w.n_targets = scenario.integer("targets", 1);
    w.n_antennas = scenario.integer("antennas", 6);
    w.area = scenario.number("area_m", 50.0);
    w.height = scenario.number("height_m", 10.0);
    w.riser_length = scenario.number_or_auto("riser_length_m", 0.0);
    w.carrier_freq_hz = scenario.number("carrier_freq_hz", 28e9);
    w.n_eff = scenario.number("n_eff", 1.4);
    if (const Entry* e = scenario.find("min_spacing_m")) {
        if (e->value == "half_wavelength")
            w.min_spacing = 0.0;  // resolved from the carrier
        else
            w.min_spacing = scenario.parse_number(*e, "min_spacing_m");
    }
    cfg.noise_dbm = scenario.number("noise_dbm", -90.0);
    w.noise_power = dbm_to_watts(cfg.noise_dbm);
    cfg.gamma_min_db = scenario.number("gamma_min_db", 5.0);
    w.min_sensing_snr = db_to_linear(cfg.gamma_min_db);
    cfg.per_antenna_power_w = scenario.number("per_antenna_power_w", 0.1);
    cfg.total_power_w = scenario.number("total_power_w", 100.0);
    w.slots = scenario.integer("slots", 10);
    // Per-user power cap defaults so the per-antenna cap binds: cap times the
    // antenna count. The energy budget defaults to total power times slots.
    w.max_user_power =
        scenario.number_or_auto("max_user_power_w", cfg.per_antenna_power_w * w.n_antennas,
                                cfg.per_antenna_power_w * w.n_antennas);
    w.energy_budget = scenario.number_or_auto("energy_budget", cfg.total_power_w * w.slots,
                                              cfg.total_power_w * w.slots);
    w.deployment = deployment_from_string(scenario.text("deployment", "3d"));
    {
        const std::string placement = scenario.text("placement", "ring");
        if (placement == "ring")
            w.placement.kind = PlacementSpec::Kind::Ring;
        else if (placement == "uniform")
            w.placement.kind = PlacementSpec::Kind::Uniform;
        else
            scenario.fail("placement", "placement must be ring or uniform");
    }
    w.placement.ring_radius = scenario.number("ring_radius_m", 10.0);
    w.placement.target_jitter = scenario.number("target_jitter_m", 2.0);
    if (const Entry* e = scenario.find("fixed_users"))
        w.placement.fixed_users = parse_points(doc, *e, "fixed_users");
    if (const Entry* e = scenario.find("fixed_targets"))
        w.placement.fixed_targets = parse_points(doc, *e, "fixed_targets");
    {
        const std::string mode = scenario.text("snr_amplitude_mode", "sqrt");
        if (mode == "sqrt")
            w.snr_mode = SnrAmplitudeMode::Sqrt;
        else if (mode == "as_written")
            w.snr_mode = SnrAmplitudeMode::AsWritten;
        else
            scenario.fail("snr_amplitude_mode", "snr_amplitude_mode must be sqrt or as_written");
    }
    w.step_max = scenario.number_or_auto("step_max_m", 0.0);
    w.position_scale = scenario.number_or_auto("position_scale", 0.0);
    w.context_features = scenario.boolean("context_features", false);
    w.reward_weights.sensing = scenario.number("lambda_sensing", 1.0);
    w.reward_weights.phys = scenario.number("lambda_phys", 1.0);
    w.reward_weights.energy = scenario.number("lambda_energy", 10.0);

    SectionReader train(doc, "train");
    cfg.algorithm = algo_from_string(train.text("algorithm", "hgrl"));
    cfg.train.episodes = train.integer("episodes", 2000);
    cfg.train.discount = train.number("gamma", 0.99);
    cfg.train.clip_epsilon = train.number("clip_epsilon", 0.2);
    cfg.train.actor_lr = train.number("actor_lr", 3e-4);
    cfg.train.critic_lr = train.number("critic_lr", 1e-3);
    cfg.train.entropy_weight = train.number("entropy_weight", 0.01);
    cfg.train.grad_clip = train.number("grad_clip", 1.0);
    cfg.train.hidden = train.integer("hidden_dim", 64);
    cfg.train.gnn_layers = train.integer("gnn_layers", 2);
    cfg.train.eval_episodes = train.integer("eval_episodes", 100);
    if (const Entry* e = train.find("seeds")) {
        cfg.seeds.clear();
        std::istringstream in(e->value);
        std::string item;
        while (std::getline(in, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            try {
                size_t used = 0;
                cfg.seeds.push_back(std::stoull(item, &used));
                if (used != item.size()) throw std::invalid_argument("trailing characters");
            } catch (const std::exception&) {
                doc.fail(e->line, "seeds must be a comma list of nonnegative integers");
            }
        }
        if (cfg.seeds.empty()) doc.fail(e->line, "seeds lists no values");
    }

    SectionReader output(doc, "output");
    cfg.out_dir = output.text("dir", "out");
    cfg.write_checkpoints = output.boolean("write_checkpoints", true);

    // Strictness: every provided key must have been consumed above.
    for (const auto& [section, entries] : doc.sections)
        for (const auto& [key, entry] : entries)
            if (!entry.consumed)
                doc.fail(entry.line, "unknown key '" + key + "' in [" + section + "]");

    if (!(cfg.train.discount > 0.0 && cfg.train.discount <= 1.0))
        throw std::runtime_error(origin + ": gamma must lie in (0, 1]");
    if (!(cfg.train.clip_epsilon > 0.0 && cfg.train.clip_epsilon < 1.0))
        throw std::runtime_error(origin + ": clip_epsilon must lie in (0, 1)");
    if (w.n_users < 1 || w.n_targets < 1 || w.n_antennas < 1)
        throw std::runtime_error(origin + ": users, targets and antennas must be at least 1");
    if (w.placement.fixed_users &&
        static_cast<int>(w.placement.fixed_users->size()) != w.n_users)
        throw std::runtime_error(origin + ": fixed_users count differs from users");
    if (w.placement.fixed_targets &&
        static_cast<int>(w.placement.fixed_targets->size()) != w.n_targets)
        throw std::runtime_error(origin + ": fixed_targets count differs from targets");

    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

}  // namespace pisac
