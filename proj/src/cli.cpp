#include "polariton/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <utility>

#include "polariton/errors.hpp"

#ifndef POLARITON_VERSION
#define POLARITON_VERSION "unknown"
#endif

namespace polariton::cli {

using nlohmann::json;

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

struct ParamField {
    const char* name;
    double SystemParams::*member;
};

constexpr ParamField param_fields[] = {
    {"delta_a", &SystemParams::delta_a}, {"delta_b", &SystemParams::delta_b},
    {"delta_q", &SystemParams::delta_q}, {"g", &SystemParams::g},
    {"f", &SystemParams::f},             {"eta_a", &SystemParams::eta_a},
    {"eta_b", &SystemParams::eta_b},     {"kappa_a", &SystemParams::kappa_a},
    {"kappa_b", &SystemParams::kappa_b}, {"gamma", &SystemParams::gamma},
};

bool is_param_name(const std::string& key) {
    for (const auto& f : param_fields) {
        if (key == f.name) return true;
    }
    return false;
}

void check_object(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, value] : j.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

double number_at(const json& j, const char* key, const std::string& where) {
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where + "." + key + " must be finite");
    return x;
}

int int_at(const json& j, const char* key, const std::string& where) {
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
    return v.get<int>();
}

std::string string_at(const json& j, const char* key, const std::string& where) {
    const json& v = j.at(key);
    if (!v.is_string()) throw ConfigError(where + "." + key + " must be a string");
    return v.get<std::string>();
}

void apply_params(SystemParams& p, const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, value] : j.items()) {
        if (!is_param_name(key)) throw ConfigError("unknown key '" + key + "' in " + where);
    }
    for (const auto& f : param_fields) {
        if (j.contains(f.name)) p.*(f.member) = number_at(j, f.name, where);
    }
}

json params_json(const SystemParams& p) {
    json j = json::object();
    for (const auto& f : param_fields) j[f.name] = p.*(f.member);
    return j;
}

std::string driven_name(DrivenMode d) { return d == DrivenMode::smr ? "smr" : "qd"; }
std::string detuning_name(DetuningSweep d) { return d == DetuningSweep::resonant ? "resonant" : "rigid"; }

void checked(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
}

// ---- tables --------------------------------------------------------------

struct Cell {
    double num = nan;
    std::string text;
    bool numeric = true;
    bool integral = false;
};

Cell num(double v) { return {v, {}, true}; }
Cell integer(long v) { return {static_cast<double>(v), {}, true, true}; }
Cell text(std::string s) { return {nan, std::move(s), false}; }

struct Table {
    std::string schema;  // e.g. "g2sweep/1"
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

std::string to_csv(const Table& t) {
    std::ostringstream os;
    os << "# polariton " << t.schema << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ",";
            const Cell& c = row[i];
            if (c.integral) os << static_cast<long>(c.num);
            else os << (c.numeric ? format_number(c.num) : csv_field(c.text));
        }
        os << "\n";
    }
    return os.str();
}

std::string to_json(const Table& t) {
    json rows = json::array();
    for (const auto& row : t.rows) {
        json r = json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            const Cell& c = row[i];
            if (c.integral) {
                r[t.columns[i]] = static_cast<long>(c.num);
            } else if (c.numeric) {
                r[t.columns[i]] = std::isfinite(c.num) ? json(c.num) : json(nullptr);
            } else {
                r[t.columns[i]] = c.text;
            }
        }
        rows.push_back(std::move(r));
    }
    return json{{"schema", "polariton " + t.schema}, {"columns", t.columns}, {"rows", rows}}.dump(2) + "\n";
}

// ---- output staging ------------------------------------------------------

struct Outputs {
    std::vector<std::pair<std::string, std::string>> files;  // name, content
    json summary_extra = json::object();
    std::vector<std::string> warnings;
    std::size_t points = 0;
    std::size_t failed = 0;

    void add_table(const std::string& stem, const Table& t, Format format) {
        if (format == Format::csv) {
            files.emplace_back(stem + ".csv", to_csv(t));
        } else {
            files.emplace_back(stem + ".json", to_json(t));
        }
    }
};

// Everything is written to hidden temporaries first and renamed afterwards,
// so an interrupted or failed run leaves no half-written data files.
void commit(const std::filesystem::path& dir, const std::vector<std::pair<std::string, std::string>>& files) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
    std::vector<std::pair<fs::path, fs::path>> staged;
    auto cleanup = [&] {
        std::error_code ignore;
        for (const auto& [tmp, final_path] : staged) fs::remove(tmp, ignore);
    };
    for (const auto& [name, content] : files) {
        const fs::path final_path = dir / name;
        const fs::path tmp = dir / ("." + name + ".tmp");
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        os << content;
        os.close();
        staged.emplace_back(tmp, final_path);
        if (!os) {
            cleanup();
            throw ConfigError("cannot write " + tmp.string());
        }
    }
    for (const auto& [tmp, final_path] : staged) {
        fs::rename(tmp, final_path, ec);
        if (ec) {
            cleanup();
            throw ConfigError("cannot rename " + tmp.string() + ": " + ec.message());
        }
    }
}

// ---- commands ------------------------------------------------------------

SweepSpec sweep_spec(const RunConfig& cfg, bool oracle) {
    if (!cfg.sweep) throw ConfigError("this command needs a 'sweep' block");
    SweepSpec s;
    s.params = cfg.params;
    s.driven = cfg.driven;
    s.truncation = cfg.truncation;
    s.var = cfg.sweep->var;
    s.detuning = cfg.sweep->detuning;
    s.min = cfg.sweep->min;
    s.max = cfg.sweep->max;
    s.count = cfg.sweep->count;
    s.resonance_distances = cfg.resonance_distances;
    s.oracle = oracle;
    s.threads = cfg.threads;
    s.validate();
    return s;
}

char sign_char(int s) { return s > 0 ? '+' : s < 0 ? '-' : '0'; }

void record_failures(Outputs& out, const std::vector<SweepRow>& rows, const std::string& var) {
    out.points = rows.size();
    for (const SweepRow& r : rows) {
        if (r.failed) ++out.failed;
        if (!r.error.empty()) out.warnings.push_back(var + " = " + format_number(r.x) + ": " + r.error);
    }
}

void cmd_g2sweep(const RunConfig& cfg, Outputs& out) {
    const SweepSpec spec = sweep_spec(cfg, false);
    const std::vector<SweepRow> rows = run_sweep(spec);
    const std::string var(sweep_var_name(spec.var));
    Table t;
    t.schema = "g2sweep/1";
    t.columns.push_back(var);
    for (int k = 2; k <= 4; ++k) {
        for (Mode m : all_modes) t.columns.push_back("g" + std::to_string(k) + "_" + std::string(mode_name(m)));
    }
    for (Mode m : all_modes) t.columns.push_back("n_" + std::string(mode_name(m)));
    t.columns.push_back("case");
    t.columns.push_back("boundary");
    for (Mode m : all_modes) t.columns.push_back("g234_" + std::string(mode_name(m)));
    if (spec.resonance_distances) {
        for (const char* c : {"d1", "d2", "d3"}) t.columns.push_back(c);
    }
    t.columns.push_back("error");

    for (const SweepRow& r : rows) {
        std::vector<Cell> row{num(r.x)};
        for (int k = 0; k < 3; ++k) {
            for (std::size_t m = 0; m < 4; ++m) row.push_back(num(r.g[m][k]));
        }
        for (std::size_t m = 0; m < 4; ++m) row.push_back(num(r.occupation[m]));
        const bool labelled = r.statistics && r.statistics->case_number > 0;
        row.push_back(labelled ? text(std::to_string(r.statistics->case_number)) : text(""));
        row.push_back(r.statistics ? text(r.statistics->boundary ? "1" : "0") : text(""));
        for (const auto& sig : r.g234) {
            if (!sig) {
                row.push_back(text(""));
                continue;
            }
            std::string s;
            for (int v : sig->signs) s += sign_char(v);
            row.push_back(text(s));
        }
        if (spec.resonance_distances) {
            row.push_back(num(r.distances ? r.distances->d1 : nan));
            row.push_back(num(r.distances ? r.distances->d2 : nan));
            row.push_back(num(r.distances ? r.distances->d3 : nan));
        }
        row.push_back(text(r.error));
        t.rows.push_back(std::move(row));
    }
    out.add_table("g2sweep", t, cfg.format);
    record_failures(out, rows, var);

    json counts = json::object();
    for (const SweepRow& r : rows) {
        if (r.statistics && r.statistics->case_number > 0) {
            const std::string key = std::to_string(r.statistics->case_number);
            counts[key] = counts.value(key, 0) + 1;
        }
    }
    out.summary_extra["case_counts"] = counts;
}

json extrema_json(const Extrema& e, double g) {
    json j = {{"argmin_neg", e.argmin_neg}, {"argmax_neg", e.argmax_neg},
              {"argmin_pos", e.argmin_pos}, {"argmax_pos", e.argmax_pos}};
    for (const char* k : {"argmin_neg", "argmax_neg", "argmin_pos", "argmax_pos"}) {
        const double v = j[k].get<double>();
        if (!std::isfinite(v)) j[k] = nullptr;
        j[std::string(k) + "_over_g"] = (g != 0.0 && std::isfinite(v)) ? json(v / g) : json(nullptr);
    }
    return j;
}

void cmd_oracle_compare(const RunConfig& cfg, Outputs& out) {
    const SweepSpec spec = sweep_spec(cfg, true);
    const OracleComparison cmp = compare_oracle(spec);
    const std::string var(sweep_var_name(spec.var));
    Table t;
    t.schema = "oracle-compare/1";
    t.columns = {var, "me_g2_a", "me_g2_b", "me_g2_c", "oracle_g2_a", "oracle_g2_b", "oracle_g2_c",
                 "error", "oracle_error"};
    std::size_t oracle_failed = 0;
    for (const SweepRow& r : cmp.rows) {
        std::vector<Cell> row{num(r.x), num(r.g2(Mode::a)), num(r.g2(Mode::b)), num(r.g2(Mode::c))};
        row.push_back(num(r.oracle ? r.oracle->g2_a : nan));
        row.push_back(num(r.oracle ? r.oracle->g2_b : nan));
        row.push_back(num(r.oracle ? r.oracle->g2_c : nan));
        row.push_back(text(r.error));
        row.push_back(text(r.oracle_error));
        if (!r.oracle_error.empty()) ++oracle_failed;
        t.rows.push_back(std::move(row));
    }
    out.add_table("oracle_compare", t, cfg.format);
    record_failures(out, cmp.rows, var);
    if (oracle_failed > 0) {
        out.warnings.push_back(std::to_string(oracle_failed) + " point(s) without an oracle value; see oracle_error");
    }

    json modes = json::object();
    for (const ModeComparison& m : cmp.modes) {
        modes[std::string(mode_name(m.mode))] = {{"master", extrema_json(m.master, spec.params.g)},
                                                 {"oracle", extrema_json(m.oracle, spec.params.g)}};
    }
    out.summary_extra["grid_step"] = cmp.grid_step;
    out.summary_extra["g"] = spec.params.g;
    out.summary_extra["extrema"] = modes;
}

void cmd_g2tau(const RunConfig& cfg, Outputs& out) {
    if (cfg.tau.count < 2 || !(cfg.tau.max > 0.0)) throw ConfigError("tau grid needs max > 0 and count >= 2");
    std::vector<double> tau_unit(static_cast<std::size_t>(cfg.tau.count));
    std::vector<double> tau_gamma(tau_unit.size());
    for (std::size_t i = 0; i < tau_unit.size(); ++i) {
        tau_unit[i] = cfg.tau.max * static_cast<double>(i) / static_cast<double>(tau_unit.size() - 1);
        tau_gamma[i] = cfg.tau.microseconds ? from_microseconds(tau_unit[i]) : tau_unit[i];
    }
    tau_gamma.back() = cfg.tau.microseconds ? from_microseconds(cfg.tau.max) : cfg.tau.max;

    std::vector<SystemParams> points;
    if (cfg.points.empty()) {
        points.push_back(cfg.params);
    } else {
        for (std::size_t i = 0; i < cfg.points.size(); ++i) {
            SystemParams p = cfg.params;
            apply_params(p, cfg.points[i], "points[" + std::to_string(i) + "]");
            points.push_back(p);
        }
    }
    std::vector<std::optional<G2TauRun>> runs(points.size());
    std::vector<std::string> errors(points.size());
    parallel_for(points.size(), cfg.threads, [&](std::size_t i) {
        try {
            runs[i] = run_g2tau(points[i], cfg.driven, cfg.truncation, tau_gamma);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });

    json results = json::array();
    const double to_unit = cfg.tau.microseconds ? to_microseconds(1.0) : 1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        ++out.points;
        const std::string stem = "g2tau_" + std::to_string(i);
        json r = {{"index", i}, {"params", params_json(points[i])}};
        if (!runs[i]) {
            ++out.failed;
            out.warnings.push_back("point " + std::to_string(i) + ": " + errors[i]);
            r["error"] = errors[i];
            results.push_back(std::move(r));
            continue;
        }
        const G2TauRun& run = *runs[i];
        Table t;
        t.schema = "g2tau/1";
        t.columns = {"tau", "g2_a", "g2_b", "g2_c"};
        for (std::size_t k = 0; k < tau_unit.size(); ++k) {
            t.rows.push_back({num(tau_unit[k]), num(run.curves[0].values[k]), num(run.curves[1].values[k]),
                              num(run.curves[2].values[k])});
        }
        out.add_table(stem, t, cfg.format);
        r["file"] = out.files.back().first;
        json modes = json::object();
        for (std::size_t m = 0; m < run.curves.size(); ++m) {
            const G2TauCurve& c = run.curves[m];
            json jm = {{"g2_zero", run.g2_zero[m]}, {"mean_occupation", c.mean_occupation}};
            jm["dynamics"] = run.dynamics[m] ? json(std::string(dynamics_name(run.dynamics[m]->dynamics)))
                                             : json(nullptr);
            try {
                jm["dominant_period"] = dominant_period(c.tau, c.values) * to_unit;
            } catch (const Error&) {
                jm["dominant_period"] = nullptr;
            }
            const double spacing = peak_spacing(c.tau, c.values) * to_unit;
            jm["peak_spacing"] = std::isfinite(spacing) ? json(spacing) : json(nullptr);
            modes[std::string(mode_name(c.mode))] = jm;
        }
        r["modes"] = modes;
        r["bunching_window"] = bunching_window(points[i]) * to_unit;
        results.push_back(std::move(r));
    }
    out.summary_extra["tau_unit"] = cfg.tau.microseconds ? "us" : "gamma";
    out.summary_extra["points"] = results;
}

void cmd_spectrum(const RunConfig& cfg, Outputs& out) {
    const SpectrumBlock& s = cfg.spectrum;
    if (s.count < 1 || (s.count > 1 && !(s.max > s.min))) {
        throw ConfigError("spectrum grid needs count >= 1 and max > min");
    }
    std::vector<double> omega(static_cast<std::size_t>(s.count));
    std::vector<double> delta_b(omega.size());
    for (std::size_t i = 0; i < omega.size(); ++i) {
        omega[i] = s.count == 1 ? s.min : s.min + (s.max - s.min) * static_cast<double>(i) / (s.count - 1);
        delta_b[i] = cfg.params.delta_a + (omega[i] - omega_reference);
    }
    for (int n : s.manifolds) {
        if (n < 1 || n > std::min(cfg.truncation.n_a_max, cfg.truncation.n_b_max)) {
            throw ConfigError("manifold " + std::to_string(n) + " does not fit the truncation");
        }
    }
    Table levels;
    levels.schema = "spectrum-levels/1";
    levels.columns = {"omega_m", "manifold", "level", "frequency"};
    json gaps = json::object();
    for (int n : s.manifolds) {
        const ManifoldSweep ms = manifold_sweep(cfg.params, n, delta_b, cfg.truncation);
        for (std::size_t i = 0; i < ms.x.size(); ++i) {
            for (std::size_t j = 0; j < ms.levels[i].size(); ++j) {
                levels.rows.push_back({num(omega[i]), integer(n), integer(static_cast<long>(j)), num(ms.levels[i][j])});
            }
        }
        gaps[std::to_string(n)] = {{"min_gap", ms.min_gap},
                                   {"omega_m", ms.min_gap_at - cfg.params.delta_a + omega_reference},
                                   {"lower_level", ms.min_gap_branch}};
    }
    out.add_table("spectrum_levels", levels, cfg.format);
    out.points = omega.size();
    out.summary_extra["anti_crossings"] = gaps;

    if (!cfg.sweep) return;
    if (cfg.sweep->var != SweepVar::delta_smr) {
        throw ConfigError("resonance distances need a delta_smr sweep block");
    }
    SweepSpec spec = sweep_spec(cfg, false);
    if (cfg.truncation.n_a_max < 3 || cfg.truncation.n_b_max < 3) {
        throw ConfigError("resonance distances need cutoffs >= 3");
    }
    const std::vector<double> grid = sweep_grid(spec);
    Table dist;
    dist.schema = "resonance-distances/1";
    dist.columns = {"delta_smr", "d1", "d2", "d3"};
    std::vector<std::optional<ResonanceDistances>> d(grid.size());
    parallel_for(grid.size(), cfg.threads, [&](std::size_t i) {
        d[i] = resonance_distances(params_at(spec, grid[i]), cfg.truncation);
    });
    for (std::size_t i = 0; i < grid.size(); ++i) {
        dist.rows.push_back({num(grid[i]), num(d[i]->d1), num(d[i]->d2), num(d[i]->d3)});
    }
    out.add_table("resonance_distances", dist, cfg.format);
}

json read_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    try {
        return json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
}

} // namespace

std::string format_number(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? std::string() : (v > 0 ? "inf" : "-inf");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.11e", v);
    return buf;
}

RunConfig parse_config(const json& doc) {
    check_object(doc, "config", {"preset", "bundle", "driven", "params", "truncation", "sweep", "tau", "points",
                                 "spectrum", "resonance_distances", "output", "threads"});
    RunConfig cfg;
    const bool has_preset = doc.contains("preset");
    const bool has_bundle = doc.contains("bundle");
    if (has_preset == has_bundle) throw ConfigError("config needs exactly one of 'preset' or 'bundle'");
    std::optional<DetuningSweep> bundle_detuning;
    if (has_preset) {
        cfg.preset = string_at(doc, "preset", "config");
        const Preset& p = find_preset(cfg.preset);
        cfg.params = p.params;
        cfg.driven = p.driven;
    } else {
        cfg.bundle = string_at(doc, "bundle", "config");
        const OverrideBundle& b = find_bundle(cfg.bundle);
        cfg.params = b.params;
        cfg.driven = find_preset(b.preset).driven;
        bundle_detuning = b.detuning;
    }
    if (doc.contains("driven")) {
        const std::string d = string_at(doc, "driven", "config");
        if (d == "smr") cfg.driven = DrivenMode::smr;
        else if (d == "qd") cfg.driven = DrivenMode::qd;
        else throw ConfigError("driven must be 'smr' or 'qd'");
    }
    if (doc.contains("params")) apply_params(cfg.params, doc.at("params"), "params");
    checked([&] { cfg.params.validate(); });

    if (doc.contains("truncation")) {
        const json& t = doc.at("truncation");
        check_object(t, "truncation", {"n_a_max", "n_b_max"});
        if (t.contains("n_a_max")) cfg.truncation.n_a_max = int_at(t, "n_a_max", "truncation");
        if (t.contains("n_b_max")) cfg.truncation.n_b_max = int_at(t, "n_b_max", "truncation");
    }
    checked([&] { cfg.truncation.validate(); });

    if (doc.contains("sweep")) {
        const json& s = doc.at("sweep");
        check_object(s, "sweep", {"variable", "detuning_mode", "min", "max", "count"});
        for (const char* k : {"variable", "min", "max", "count"}) {
            if (!s.contains(k)) throw ConfigError(std::string("sweep.") + k + " is required");
        }
        SweepBlock b;
        b.var = parse_sweep_var(string_at(s, "variable", "sweep"));
        b.detuning = bundle_detuning.value_or(DetuningSweep::resonant);
        if (s.contains("detuning_mode")) {
            const std::string m = string_at(s, "detuning_mode", "sweep");
            if (m == "resonant") b.detuning = DetuningSweep::resonant;
            else if (m == "rigid") b.detuning = DetuningSweep::rigid;
            else throw ConfigError("sweep.detuning_mode must be 'resonant' or 'rigid'");
        }
        b.min = number_at(s, "min", "sweep");
        b.max = number_at(s, "max", "sweep");
        b.count = int_at(s, "count", "sweep");
        if (b.count < 1) throw ConfigError("sweep.count must be >= 1");
        if (b.count > 1 && !(b.max > b.min)) throw ConfigError("sweep.max must exceed sweep.min");
        cfg.sweep = b;
    }

    if (doc.contains("tau")) {
        const json& t = doc.at("tau");
        check_object(t, "tau", {"max", "count", "unit"});
        if (t.contains("max")) cfg.tau.max = number_at(t, "max", "tau");
        if (t.contains("count")) cfg.tau.count = int_at(t, "count", "tau");
        if (t.contains("unit")) {
            const std::string u = string_at(t, "unit", "tau");
            if (u == "us") cfg.tau.microseconds = true;
            else if (u == "gamma") cfg.tau.microseconds = false;
            else throw ConfigError("tau.unit must be 'us' or 'gamma'");
        }
        if (!(cfg.tau.max > 0.0)) throw ConfigError("tau.max must be positive");
        if (cfg.tau.count < 2) throw ConfigError("tau.count must be >= 2");
    }

    if (doc.contains("points")) {
        const json& pts = doc.at("points");
        if (!pts.is_array()) throw ConfigError("points must be an array of parameter objects");
        for (std::size_t i = 0; i < pts.size(); ++i) {
            SystemParams p = cfg.params;
            apply_params(p, pts[i], "points[" + std::to_string(i) + "]");
            checked([&] { p.validate(); });
            cfg.points.push_back(pts[i]);
        }
    }

    if (doc.contains("spectrum")) {
        const json& s = doc.at("spectrum");
        check_object(s, "spectrum", {"min", "max", "count", "manifolds"});
        if (s.contains("min")) cfg.spectrum.min = number_at(s, "min", "spectrum");
        if (s.contains("max")) cfg.spectrum.max = number_at(s, "max", "spectrum");
        if (s.contains("count")) cfg.spectrum.count = int_at(s, "count", "spectrum");
        if (s.contains("manifolds")) {
            const json& m = s.at("manifolds");
            if (!m.is_array() || m.empty()) throw ConfigError("spectrum.manifolds must be a non-empty array");
            cfg.spectrum.manifolds.clear();
            for (const json& v : m) {
                if (!v.is_number_integer()) throw ConfigError("spectrum.manifolds entries must be integers");
                cfg.spectrum.manifolds.push_back(v.get<int>());
            }
        }
        if (cfg.spectrum.count < 1) throw ConfigError("spectrum.count must be >= 1");
        if (cfg.spectrum.count > 1 && !(cfg.spectrum.max > cfg.spectrum.min)) {
            throw ConfigError("spectrum.max must exceed spectrum.min");
        }
    }

    if (doc.contains("resonance_distances")) {
        if (!doc.at("resonance_distances").is_boolean()) throw ConfigError("resonance_distances must be a boolean");
        cfg.resonance_distances = doc.at("resonance_distances").get<bool>();
    }

    if (doc.contains("output")) {
        const json& o = doc.at("output");
        check_object(o, "output", {"dir", "format"});
        if (o.contains("dir")) cfg.out_dir = string_at(o, "dir", "output");
        if (o.contains("format")) {
            const std::string f = string_at(o, "format", "output");
            if (f == "csv") cfg.format = Format::csv;
            else if (f == "json") cfg.format = Format::json;
            else throw ConfigError("output.format must be 'csv' or 'json'");
        }
    }
    if (cfg.out_dir.empty()) throw ConfigError("output.dir must not be empty");

    if (doc.contains("threads")) {
        cfg.threads = int_at(doc, "threads", "config");
        if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
    }
    return cfg;
}

json RunConfig::resolved() const {
    json j = json::object();
    if (!preset.empty()) j["preset"] = preset;
    if (!bundle.empty()) j["bundle"] = bundle;
    j["driven"] = driven_name(driven);
    j["params"] = params_json(params);
    j["truncation"] = {{"n_a_max", truncation.n_a_max}, {"n_b_max", truncation.n_b_max}};
    if (sweep) {
        j["sweep"] = {{"variable", std::string(sweep_var_name(sweep->var))},
                      {"detuning_mode", detuning_name(sweep->detuning)},
                      {"min", sweep->min},
                      {"max", sweep->max},
                      {"count", sweep->count}};
    }
    j["tau"] = {{"max", tau.max}, {"count", tau.count}, {"unit", tau.microseconds ? "us" : "gamma"}};
    j["points"] = points;
    j["spectrum"] = {{"min", spectrum.min}, {"max", spectrum.max}, {"count", spectrum.count},
                     {"manifolds", spectrum.manifolds}};
    j["resonance_distances"] = resonance_distances;
    j["output"] = {{"dir", out_dir}, {"format", format == Format::csv ? "csv" : "json"}};
    j["threads"] = threads;
    return j;
}

void apply_override(json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override '" + assignment + "' is not KEY=VALUE");
    }
    std::string key = assignment.substr(0, eq);
    const std::string raw = assignment.substr(eq + 1);
    if (key.find('.') == std::string::npos && is_param_name(key)) key = "params." + key;

    json value;
    try {
        value = json::parse(raw);
    } catch (const json::parse_error&) {
        value = raw;
    }
    if (!doc.is_object()) throw ConfigError("config must be an object");
    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("override key '" + key + "' has an empty segment");
        json* child = nullptr;
        if (node->is_array()) {
            std::size_t idx = 0;
            try {
                idx = std::stoul(part);
            } catch (const std::exception&) {
                throw ConfigError("override key '" + key + "' indexes an array with '" + part + "'");
            }
            if (idx >= node->size()) throw ConfigError("override key '" + key + "' is out of range");
            child = &(*node)[idx];
        } else if (node->is_object()) {
            child = &(*node)[part];
        } else {
            throw ConfigError("override key '" + key + "' descends into a non-object");
        }
        if (dot == std::string::npos) {
            *child = value;
            return;
        }
        if (child->is_null()) *child = json::object();
        node = child;
        start = dot + 1;
    }
}

int run(const Invocation& inv, std::ostream& log) {
    RunConfig cfg;
    try {
        if (inv.command != "g2sweep" && inv.command != "g2tau" && inv.command != "spectrum" &&
            inv.command != "oracle-compare") {
            throw ConfigError("unknown command '" + inv.command + "'");
        }
        json doc = inv.config_path ? read_config_file(*inv.config_path) : json::object();
        if (!doc.is_object()) throw ConfigError("config must be a JSON object");
        if (inv.preset) {
            doc.erase("bundle");
            doc["preset"] = *inv.preset;
        }
        for (const std::string& o : inv.overrides) apply_override(doc, o);
        if (inv.out_dir) doc["output"]["dir"] = *inv.out_dir;
        if (inv.format) doc["output"]["format"] = *inv.format;
        if (inv.threads) {
            doc["threads"] = *inv.threads;
        } else if (!doc.contains("threads")) {
            if (const char* env = std::getenv("POLARITON_THREADS"); env && *env) {
                char* end = nullptr;
                const long n = std::strtol(env, &end, 10);
                if (*end != '\0' || n < 1 || n > 4096) {
                    throw ConfigError(std::string("POLARITON_THREADS must be a positive integer, got '") + env + "'");
                }
                doc["threads"] = static_cast<int>(n);
            }
        }
        cfg = parse_config(doc);
        if (inv.command == "g2sweep" || inv.command == "oracle-compare") sweep_spec(cfg, false);
    } catch (const Error& e) {
        log << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const json::exception& e) {
        log << "config error: " << e.what() << "\n";
        return exit_config_error;
    }

    Outputs out;
    try {
        if (inv.command == "g2sweep") cmd_g2sweep(cfg, out);
        else if (inv.command == "g2tau") cmd_g2tau(cfg, out);
        else if (inv.command == "spectrum") cmd_spectrum(cfg, out);
        else cmd_oracle_compare(cfg, out);
    } catch (const ConfigError& e) {
        log << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch (const std::exception& e) {
        log << "numerical failure: " << e.what() << "\n";
        return exit_numerical_failure;
    }

    const bool all_failed = out.points > 0 && out.failed == out.points;
    json summary = {{"schema", "polariton summary/1"},
                    {"command", inv.command},
                    {"version", POLARITON_VERSION},
                    {"config", cfg.resolved()},
                    {"status", all_failed ? "failed" : out.warnings.empty() ? "ok" : "ok-with-warnings"},
                    {"points", out.points},
                    {"failed_points", out.failed},
                    {"warnings", out.warnings}};
    json files = json::array();
    for (const auto& f : out.files) files.push_back(f.first);
    summary["files"] = files;
    summary["result"] = out.summary_extra;

    std::vector<std::pair<std::string, std::string>> to_write = out.files;
    if (all_failed) to_write.clear();  // nothing usable; keep only the summary
    to_write.emplace_back("summary.json", summary.dump(2) + "\n");
    try {
        commit(cfg.out_dir, to_write);
    } catch (const Error& e) {
        log << "output error: " << e.what() << "\n";
        return exit_config_error;
    }
    for (const std::string& w : out.warnings) log << "warning: " << w << "\n";
    if (all_failed) {
        log << "numerical failure: all " << out.points << " point(s) failed\n";
        return exit_numerical_failure;
    }
    return exit_ok;
}

} // namespace polariton::cli
