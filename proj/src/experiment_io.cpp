#include "tmpmbm/experiment_io.hpp"

#include <yaml-cpp/yaml.h>

#include <array>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace tmpmbm {

namespace {

class Reader {
public:
    explicit Reader(std::string source) : source_(std::move(source)) {}

    [[noreturn]] void fail(const YAML::Node& node, const std::string& message) const {
        std::ostringstream os;
        os << source_;
        const YAML::Mark mark = node.Mark();
        if (!mark.is_null()) os << ':' << mark.line + 1 << ':' << mark.column + 1;
        os << ": " << message;
        throw ConfigError(os.str());
    }

    void only_keys(const YAML::Node& map, std::initializer_list<const char*> keys) const {
        if (!map.IsMap()) fail(map, "expected a mapping");
        const std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& kv : map) {
            const auto key = kv.first.as<std::string>();
            if (!allowed.contains(key)) fail(kv.first, "unknown key '" + key + "'");
        }
    }

    template <typename T>
    T scalar(const YAML::Node& node, const std::string& what) const {
        if (!node.IsScalar()) fail(node, what + ": expected a scalar");
        try {
            return node.as<T>();
        } catch (const YAML::Exception&) {
            fail(node, what + ": cannot read '" + node.Scalar() + "'");
        }
    }

    template <typename T>
    void optional(const YAML::Node& map, const char* key, T& target) const {
        if (const YAML::Node n = map[key]) target = scalar<T>(n, key);
    }

    template <typename T>
    void list(const YAML::Node& map, const char* key, std::vector<T>& target) const {
        const YAML::Node n = map[key];
        if (!n) return;
        if (!n.IsSequence() || n.size() == 0) fail(n, std::string(key) + ": expected a non-empty list");
        target.clear();
        for (const auto& item : n) target.push_back(scalar<T>(item, key));
    }

    void probability(const YAML::Node& map, const char* key, double value) const {
        if (value < 0.0 || value > 1.0) fail(map[key], std::string(key) + " must lie in [0, 1]");
    }

    void positive(const YAML::Node& map, const char* key, double value) const {
        if (!(value > 0.0)) fail(map[key], std::string(key) + " must be positive");
    }

private:
    std::string source_;
};

void write_cell(std::ostream& out, FilterKind filter, const SweepCell& cell) {
    out << to_string(filter) << ',' << cell.window_length << ',' << format_number(cell.full_prob) << ','
        << format_number(cell.clutter_rate);
}

}  // namespace

ExperimentSpec parse_experiment(const std::string& yaml_text, const std::filesystem::path& base_dir,
                                const std::string& source_name) {
    const Reader rd(source_name);
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::ParserException& e) {
        std::ostringstream os;
        os << source_name << ':' << e.mark.line + 1 << ':' << e.mark.column + 1 << ": " << e.msg;
        throw ConfigError(os.str());
    }
    if (!root || root.IsNull()) throw ConfigError(source_name + ": empty configuration");
    rd.only_keys(root, {"scenario", "model", "thresholds", "gospa", "sweep", "filters", "runs", "seed",
                        "threads", "timing"});

    ExperimentSpec spec;

    // ---- scenario ----
    const YAML::Node sc = root["scenario"];
    if (!sc) rd.fail(root, "missing 'scenario' section");
    rd.only_keys(sc, {"name", "truth_file", "fine_steps", "fine_interval", "process_noise",
                      "survival_per_step"});
    std::string name = "scenario1";
    rd.optional(sc, "name", name);
    int fine_steps = 250;
    rd.optional(sc, "fine_steps", fine_steps);
    if (fine_steps < 2) rd.fail(sc["fine_steps"], "fine_steps must be at least 2");
    if (name == "scenario1") {
        const YAML::Node file = sc["truth_file"];
        if (!file) rd.fail(sc, "scenario1 requires 'truth_file'");
        std::filesystem::path path = rd.scalar<std::string>(file, "truth_file");
        if (path.is_relative()) path = base_dir / path;
        try {
            spec.scenario = scenario1(load_truth_csv(path, fine_steps));
        } catch (const std::runtime_error& e) {
            rd.fail(file, e.what());
        }
    } else if (name == "scenario2") {
        if (sc["truth_file"]) rd.fail(sc["truth_file"], "scenario2 generates its own truth");
        spec.scenario = scenario2();
        spec.scenario.n_fine_steps = fine_steps;
    } else {
        rd.fail(sc["name"], "unknown scenario '" + name + "' (expected scenario1 or scenario2)");
    }
    rd.optional(sc, "fine_interval", spec.scenario.fine_interval);
    rd.positive(sc, "fine_interval", spec.scenario.fine_interval);
    rd.optional(sc, "process_noise", spec.scenario.process_noise);
    rd.positive(sc, "process_noise", spec.scenario.process_noise);
    rd.optional(sc, "survival_per_step", spec.scenario.survival_per_step);
    rd.probability(sc, "survival_per_step", spec.scenario.survival_per_step);

    // ---- model ----
    if (const YAML::Node m = root["model"]) {
        rd.only_keys(m, {"detect_prob", "meas_noise"});
        rd.optional(m, "detect_prob", spec.detect_prob);
        rd.probability(m, "detect_prob", spec.detect_prob);
        rd.optional(m, "meas_noise", spec.meas_noise);
        rd.positive(m, "meas_noise", spec.meas_noise);
    }

    // ---- thresholds ----
    if (const YAML::Node t = root["thresholds"]) {
        rd.only_keys(t, {"poisson", "global", "bernoulli", "max_globals", "gate", "estimate_existence"});
        auto& th = spec.thresholds;
        rd.optional(t, "poisson", th.poisson);
        rd.positive(t, "poisson", th.poisson);
        rd.optional(t, "global", th.global);
        rd.positive(t, "global", th.global);
        rd.optional(t, "bernoulli", th.bernoulli);
        rd.positive(t, "bernoulli", th.bernoulli);
        int max_globals = static_cast<int>(th.max_globals);
        rd.optional(t, "max_globals", max_globals);
        if (max_globals < 1) rd.fail(t["max_globals"], "max_globals must be at least 1");
        th.max_globals = static_cast<std::size_t>(max_globals);
        rd.optional(t, "gate", th.gate);
        rd.positive(t, "gate", th.gate);
        rd.optional(t, "estimate_existence", th.estimate_existence);
        rd.probability(t, "estimate_existence", th.estimate_existence);
    }

    // ---- gospa ----
    if (const YAML::Node g = root["gospa"]) {
        rd.only_keys(g, {"c", "p"});
        rd.optional(g, "c", spec.gospa.c);
        rd.positive(g, "c", spec.gospa.c);
        rd.optional(g, "p", spec.gospa.p);
        if (spec.gospa.p < 1.0) rd.fail(g["p"], "p must be at least 1");
    }

    // ---- sweep ----
    if (const YAML::Node s = root["sweep"]) {
        rd.only_keys(s, {"window_lengths", "full_probs", "clutter_rates"});
        rd.list(s, "window_lengths", spec.window_lengths);
        for (std::size_t i = 0; i < spec.window_lengths.size(); ++i) {
            if (spec.window_lengths[i] < 1 || spec.window_lengths[i] >= spec.scenario.n_fine_steps) {
                rd.fail(s["window_lengths"][i], "window length must lie in [1, fine_steps)");
            }
        }
        rd.list(s, "full_probs", spec.full_probs);
        for (std::size_t i = 0; i < spec.full_probs.size(); ++i) {
            if (spec.full_probs[i] < 0.0 || spec.full_probs[i] > 1.0) {
                rd.fail(s["full_probs"][i], "full-measurement probability must lie in [0, 1]");
            }
        }
        rd.list(s, "clutter_rates", spec.clutter_rates);
        for (std::size_t i = 0; i < spec.clutter_rates.size(); ++i) {
            if (spec.clutter_rates[i] < 0.0) rd.fail(s["clutter_rates"][i], "clutter rate must be non-negative");
        }
    }

    // ---- filters and run control ----
    if (const YAML::Node f = root["filters"]) {
        if (!f.IsSequence() || f.size() == 0) rd.fail(f, "filters: expected a non-empty list");
        spec.filters.clear();
        for (const auto& item : f) {
            const auto text = rd.scalar<std::string>(item, "filters");
            const auto kind = parse_filter_kind(text);
            if (!kind) rd.fail(item, "unknown filter '" + text + "' (tm-pmbm, tm-pmb, pmbm, pmb)");
            spec.filters.push_back(*kind);
        }
    }
    rd.optional(root, "runs", spec.runs);
    if (spec.runs < 1) rd.fail(root["runs"], "runs must be at least 1");
    rd.optional(root, "seed", spec.seed);
    rd.optional(root, "threads", spec.threads);
    if (spec.threads < 0) rd.fail(root["threads"], "threads must be non-negative");
    rd.optional(root, "timing", spec.record_timing);
    return spec;
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open configuration");
    std::stringstream text;
    text << in.rdbuf();
    return parse_experiment(text.str(), path.parent_path(), path.string());
}

std::string format_number(double value) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return {buf.data(), res.ptr};
}

void write_results_csv(std::ostream& out, const std::vector<WindowRecord>& records) {
    out << "filter,N_w,p_full,clutter_rate,run,window,gospa_total,gospa_loc,gospa_missed,gospa_false,"
           "n_local_hypo,n_global_hypo,step_ms\n";
    for (const auto& r : records) {
        write_cell(out, r.filter, r.cell);
        out << ',' << r.run << ',' << r.window << ',' << format_number(r.gospa.total) << ','
            << format_number(r.gospa.localisation) << ',' << format_number(r.gospa.missed) << ','
            << format_number(r.gospa.false_) << ',' << r.counts.local << ',' << r.counts.global << ','
            << format_number(r.step_ms) << '\n';
    }
}

void write_summary_csv(std::ostream& out, const std::vector<CellSummary>& summary) {
    out << "filter,N_w,p_full,clutter_rate,runs,rms_gospa_total,rms_gospa_loc,rms_gospa_missed,"
           "rms_gospa_false\n";
    for (const auto& s : summary) {
        write_cell(out, s.filter, s.cell);
        out << ',' << s.runs << ',' << format_number(s.rms.total) << ',' << format_number(s.rms.localisation)
            << ',' << format_number(s.rms.missed) << ',' << format_number(s.rms.false_) << '\n';
    }
}

void write_hypotheses_csv(std::ostream& out, const std::vector<CellSummary>& summary) {
    out << "filter,N_w,p_full,clutter_rate,mean_local_hypo,mean_global_hypo,max_local_hypo,max_global_hypo\n";
    for (const auto& s : summary) {
        write_cell(out, s.filter, s.cell);
        out << ',' << format_number(s.mean_local_hypotheses) << ',' << format_number(s.mean_global_hypotheses)
            << ',' << s.max_local_hypotheses << ',' << s.max_global_hypotheses << '\n';
    }
}

void write_timing_csv(std::ostream& out, const std::vector<CellSummary>& summary) {
    out << "filter,N_w,p_full,clutter_rate,mean_step_ms,mean_run_s\n";
    for (const auto& s : summary) {
        write_cell(out, s.filter, s.cell);
        out << ',' << format_number(s.mean_step_ms) << ',' << format_number(s.mean_run_ms / 1000.0) << '\n';
    }
}

void write_measurements_csv(std::ostream& out, const std::vector<MeasurementSet>& windows) {
    out << "window,kind,z1_x,z1_y,z2_x,z2_y\n";
    for (std::size_t k = 0; k < windows.size(); ++k) {
        for (const auto& z : windows[k]) {
            out << k + 1 << ',' << to_string(z.kind());
            for (const auto* end : {&z.z_first(), &z.z_last()}) {
                for (Eigen::Index i = 0; i < 2; ++i) {
                    out << ',';
                    if (*end && (*end)->size() > i) out << format_number((**end)(i));
                }
            }
            out << '\n';
        }
    }
}

}  // namespace tmpmbm
