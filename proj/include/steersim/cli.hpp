#pragma once

// Command-line front end: bounds tables, MUB verification, single-point
// simulation, noise sweeps and cross-dimension reports. Every command that
// writes files also writes a run manifest; `steersim replay manifest.json`
// re-executes the recorded command and reproduces the data files
// byte-identically.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "steersim/errors.hpp"
#include "steersim/expsim.hpp"
#include "steersim/mub.hpp"
#include "steersim/states.hpp"
#include "steersim/steering.hpp"
#include "steersim/version.hpp"

namespace steersim::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------- utilities

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write file: " + path.string());
    out << content;
    if (!out) throw io_error("write failed: " + path.string());
}

// ------------------------------------------------------------ spectrum CSV

// Rows "l, re, im"; blank lines and '#' comments allowed.
inline states::SpiralSpectrum parse_spectrum_csv(std::istream& in) {
    states::SpiralSpectrum spec;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        bool blank = true;
        for (char c : line) blank = blank && std::isspace(static_cast<unsigned char>(c));
        if (blank) continue;
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream row(line);
        int l = 0;
        double re = 0.0, im = 0.0;
        if (!(row >> l >> re >> im))
            throw config_error("spectrum csv: expected 'l, re, im' on line " + std::to_string(lineno));
        spec.amplitudes[l] = la::Cx{re, im};
    }
    if (spec.amplitudes.empty()) throw config_error("spectrum csv: no rows");
    return spec;
}

inline states::SpiralSpectrum load_spectrum_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open spectrum csv: " + path.string());
    return parse_spectrum_csv(in);
}

// -------------------------------------------------------------- config file

// Flat key-value text, `key = value`, '#' comments. Keys mirror the
// experiment config: d, p, counts, seed, crosstalk, spiral_sigma (number or
// "flat"), error_method ("poisson" or "repeat:R"), spectrum_csv (path).
inline void apply_config_entry(expsim::ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    auto as_double = [&](const std::string& v) {
        std::size_t pos = 0;
        double d = 0.0;
        try {
            d = std::stod(v, &pos);
        } catch (const std::exception&) {
            throw config_error("config: bad numeric value for '" + key + "': " + v);
        }
        if (pos != v.size()) throw config_error("config: bad numeric value for '" + key + "': " + v);
        return d;
    };
    if (key == "d") {
        cfg.d = static_cast<int>(as_double(value));
    } else if (key == "p") {
        cfg.p = as_double(value);
    } else if (key == "counts") {
        cfg.counts = static_cast<long long>(as_double(value));
    } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(as_double(value));
    } else if (key == "crosstalk") {
        cfg.eps_crosstalk = as_double(value);
    } else if (key == "spiral_sigma") {
        if (value == "flat") {
            cfg.spiral_flat = true;
        } else {
            cfg.spiral_flat = false;
            cfg.spiral_sigma = as_double(value);
        }
    } else if (key == "error_method") {
        if (value == "poisson") {
            cfg.error_method = expsim::ErrorMethod::poisson_propagation;
        } else if (value.rfind("repeat:", 0) == 0) {
            cfg.error_method = expsim::ErrorMethod::repeat_trials;
            cfg.repeat_trials = static_cast<int>(as_double(value.substr(7)));
        } else {
            throw config_error("config: error_method must be 'poisson' or 'repeat:R'");
        }
    } else if (key == "exact") {
        if (value == "true" || value == "1") {
            cfg.exact = true;
        } else if (value == "false" || value == "0") {
            cfg.exact = false;
        } else {
            throw config_error("config: exact must be true or false");
        }
    } else {
        throw config_error("config: unknown key '" + key + "'");
    }
}

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline expsim::ExperimentConfig load_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open config file: " + path.string());
    expsim::ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    std::string spectrum_path;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw config_error("config: expected 'key = value' on line " + std::to_string(lineno));
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key == "spectrum_csv") {
            spectrum_path = value;
        } else {
            apply_config_entry(cfg, key, value);
        }
    }
    if (!spectrum_path.empty()) {
        fs::path p(spectrum_path);
        if (p.is_relative()) p = path.parent_path() / p;
        cfg.custom_spectrum = load_spectrum_csv(p);
        cfg.spiral_flat = false;
    }
    return cfg;
}

// ------------------------------------------------ experiment config <-> json

inline json config_to_json(const expsim::ExperimentConfig& cfg) {
    json j;
    j["d"] = cfg.d;
    j["p"] = cfg.p;
    j["counts"] = cfg.counts;
    j["seed"] = cfg.seed;
    j["crosstalk"] = cfg.eps_crosstalk;
    if (cfg.spiral_flat)
        j["spiral_sigma"] = "flat";
    else
        j["spiral_sigma"] = cfg.spiral_sigma;
    j["error_method"] = cfg.error_method == expsim::ErrorMethod::poisson_propagation
                            ? "poisson"
                            : "repeat:" + std::to_string(cfg.repeat_trials);
    j["exact"] = cfg.exact;
    if (cfg.custom_spectrum) {
        json rows = json::array();
        for (const auto& [l, amp] : cfg.custom_spectrum->amplitudes)
            rows.push_back({l, amp.real(), amp.imag()});
        j["spectrum"] = rows;
    }
    return j;
}

inline expsim::ExperimentConfig config_from_json(const json& j) {
    expsim::ExperimentConfig cfg;
    cfg.d = j.at("d").get<int>();
    cfg.p = j.at("p").get<double>();
    cfg.counts = j.at("counts").get<long long>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.eps_crosstalk = j.at("crosstalk").get<double>();
    if (j.at("spiral_sigma").is_string()) {
        cfg.spiral_flat = true;
    } else {
        cfg.spiral_flat = false;
        cfg.spiral_sigma = j.at("spiral_sigma").get<double>();
    }
    const std::string em = j.at("error_method").get<std::string>();
    apply_config_entry(cfg, "error_method", em);
    cfg.exact = j.at("exact").get<bool>();
    if (j.contains("spectrum")) {
        states::SpiralSpectrum spec;
        for (const auto& row : j.at("spectrum"))
            spec.amplitudes[row.at(0).get<int>()] = la::Cx{row.at(1).get<double>(), row.at(2).get<double>()};
        cfg.custom_spectrum = std::move(spec);
    }
    return cfg;
}

// --------------------------------------------------------------- rendering

inline json report_to_json(const steering::SteeringReport& rep, bool exact) {
    json j;
    j["d"] = rep.d;
    j["n_settings"] = rep.n_settings;
    j["S"] = rep.S;
    j["S_sigma"] = rep.S_sigma;
    j["lhs_bound"] = rep.lhs_bound;
    j["quantum_bound"] = rep.quantum_bound;
    j["violation"] = rep.violation;
    j["violation_sigma"] = rep.violation_sigma;
    j["exact"] = exact;
    return j;
}

inline std::string bounds_csv(const std::vector<int>& dims) {
    std::string out = "d,quantum_bound,lhs_bound,v_theory,two_setting_v_max,p_min,p_min_two_setting\n";
    for (int d : dims) {
        if (!mub::dimension_supported(d))
            throw unsupported_dimension("bounds: dimension " + std::to_string(d) + " is not supported");
        out += std::to_string(d) + "," + fmt(steering::quantum_bound(d)) + "," + fmt(steering::lhs_bound(d)) + "," +
               fmt(steering::violation(d)) + "," + fmt(steering::two_setting_violation_max(d)) + "," +
               fmt(steering::p_min_theory(d)) + "," + fmt(steering::p_min_two_setting(d)) + "\n";
    }
    return out;
}

inline json bounds_json(const std::vector<int>& dims) {
    json rows = json::array();
    for (int d : dims) {
        if (!mub::dimension_supported(d))
            throw unsupported_dimension("bounds: dimension " + std::to_string(d) + " is not supported");
        json r;
        r["d"] = d;
        r["quantum_bound"] = steering::quantum_bound(d);
        r["lhs_bound"] = steering::lhs_bound(d);
        r["v_theory"] = steering::violation(d);
        r["two_setting_v_max"] = steering::two_setting_violation_max(d);
        r["p_min"] = steering::p_min_theory(d);
        r["p_min_two_setting"] = steering::p_min_two_setting(d);
        rows.push_back(std::move(r));
    }
    json j;
    j["rows"] = std::move(rows);
    return j;
}

inline std::string counts_csv(const expsim::CoincidenceTable& t) {
    std::string out = "alice";
    for (int b = 0; b < t.d; ++b) out += ",b" + std::to_string(b);
    out += "\n";
    for (int a = 0; a < t.d; ++a) {
        out += std::to_string(a);
        for (int b = 0; b < t.d; ++b)
            out += "," + std::to_string(t.counts[static_cast<std::size_t>(a) * t.d + b]);
        out += "\n";
    }
    return out;
}

inline std::string probs_csv(const std::vector<double>& table, int d) {
    std::string out = "alice";
    for (int b = 0; b < d; ++b) out += ",b" + std::to_string(b);
    out += "\n";
    for (int a = 0; a < d; ++a) {
        out += std::to_string(a);
        for (int b = 0; b < d; ++b) out += "," + fmt(table[static_cast<std::size_t>(a) * d + b]);
        out += "\n";
    }
    return out;
}

inline std::string sweep_csv(const expsim::SweepResult& res) {
    std::string out = "p,S,S_sigma\n";
    for (const auto& pt : res.points) out += fmt(pt.p) + "," + fmt(pt.S) + "," + fmt(pt.S_sigma) + "\n";
    return out;
}

inline json sweep_json(const expsim::SweepResult& res) {
    json j;
    j["d"] = res.d;
    j["exact"] = res.exact;
    j["lhs_bound"] = res.lhs_bound;
    json pts = json::array();
    for (const auto& pt : res.points) {
        json r;
        r["p"] = pt.p;
        r["S"] = pt.S;
        r["S_sigma"] = pt.S_sigma;
        pts.push_back(std::move(r));
    }
    j["points"] = std::move(pts);
    json fit;
    fit["slope"] = res.slope;
    fit["intercept"] = res.intercept;
    fit["cov"] = json::array({json::array({res.cov00, res.cov01}), json::array({res.cov01, res.cov11})});
    j["fit"] = std::move(fit);
    j["p_min"] = res.p_min;
    j["p_min_sigma"] = res.p_min_sigma;
    return j;
}

// ------------------------------------------------------------ command layer

struct OutputBundle {
    // (relative filename, content) pairs, written under --out
    std::vector<std::pair<std::string, std::string>> files;
    std::string stdout_text;
    int exit_code = 0;
};

inline OutputBundle execute_bounds(const json& cfg) {
    const auto dims = cfg.at("dims").get<std::vector<int>>();
    if (dims.empty()) throw config_error("bounds: no dimensions given");
    const std::string format = cfg.value("format", "csv");
    OutputBundle out;
    out.files.emplace_back("bounds.csv", bounds_csv(dims));
    out.files.emplace_back("bounds.json", bounds_json(dims).dump(2) + "\n");
    out.stdout_text = (format == "json") ? out.files[1].second : out.files[0].second;
    return out;
}

inline OutputBundle execute_mub_check(const json& cfg) {
    const int d = cfg.at("d").get<int>();
    const double tol = cfg.at("tol").get<double>();
    const auto fam = mub::build_mubs(d);
    const auto rep = mub::verify_mub(fam, tol);
    json j;
    j["d"] = d;
    j["n_bases"] = static_cast<int>(fam.bases.size());
    j["tol"] = rep.tol;
    j["max_orthonormality_dev"] = rep.max_orthonormality_dev;
    j["max_unbiasedness_dev"] = rep.max_unbiasedness_dev;
    j["pass"] = rep.pass;
    OutputBundle out;
    out.files.emplace_back("mub_report.json", j.dump(2) + "\n");
    out.stdout_text = out.files[0].second;
    out.exit_code = rep.pass ? 0 : 1;
    return out;
}

inline OutputBundle execute_simulate(const json& cfg) {
    const auto ecfg = config_from_json(cfg.at("experiment"));
    ecfg.validate();
    const auto fam = mub::build_mubs(ecfg.d);
    const auto state = expsim::build_prepared_state(ecfg, ecfg.p);
    OutputBundle out;
    if (ecfg.exact) {
        const auto rep = steering::steering_functional(state, fam);
        out.files.emplace_back("report.json", report_to_json(rep, true).dump(2) + "\n");
        for (int x = 0; x < static_cast<int>(fam.bases.size()); ++x) {
            char name[32];
            std::snprintf(name, sizeof name, "probs_x%02d.csv", x);
            out.files.emplace_back(name, probs_csv(steering::joint_prob_table(state, fam, x), ecfg.d));
        }
        out.stdout_text = out.files[0].second;
        return out;
    }
    std::vector<expsim::CoincidenceTable> tables;
    const auto rep = expsim::run_direct(ecfg, state, fam, &tables);
    out.files.emplace_back("report.json", report_to_json(rep, false).dump(2) + "\n");
    for (const auto& t : tables) {
        char name[32];
        std::snprintf(name, sizeof name, "counts_x%02d.csv", t.setting);
        out.files.emplace_back(name, counts_csv(t));
    }
    out.stdout_text = out.files[0].second;
    return out;
}

inline OutputBundle execute_sweep(const json& cfg) {
    const auto ecfg = config_from_json(cfg.at("experiment"));
    const auto p_values = cfg.at("p_values").get<std::vector<double>>();
    const auto res = expsim::sweep_and_fit(ecfg, p_values);
    OutputBundle out;
    out.files.emplace_back("sweep.csv", sweep_csv(res));
    out.files.emplace_back("sweep.json", sweep_json(res).dump(2) + "\n");
    out.stdout_text = out.files[1].second;
    return out;
}

inline OutputBundle execute_report(const json& cfg) {
    const auto inputs = cfg.at("inputs").get<std::vector<std::string>>();
    if (inputs.empty()) throw config_error("report: no inputs");
    std::string csv = "d,p_min_empirical,p_min_sigma,p_min_theory,p_min_two_setting\n";
    json rows = json::array();
    for (const auto& path : inputs) {
        json sweep;
        try {
            sweep = json::parse(read_file(path));
        } catch (const json::parse_error& e) {
            throw config_error("report: cannot parse sweep summary " + path + ": " + e.what());
        }
        const int d = sweep.at("d").get<int>();
        const double p_min = sweep.at("p_min").get<double>();
        const double p_sig = sweep.at("p_min_sigma").get<double>();
        json r;
        r["d"] = d;
        r["p_min_empirical"] = p_min;
        r["p_min_sigma"] = p_sig;
        r["p_min_theory"] = steering::p_min_theory(d);
        r["p_min_two_setting"] = steering::p_min_two_setting(d);
        rows.push_back(std::move(r));
        csv += std::to_string(d) + "," + fmt(p_min) + "," + fmt(p_sig) + "," + fmt(steering::p_min_theory(d)) +
               "," + fmt(steering::p_min_two_setting(d)) + "\n";
    }
    json j;
    j["rows"] = std::move(rows);
    j["two_setting_noise_ceiling"] = 0.5;  // 2-setting criteria tolerate at most 50% noise
    OutputBundle out;
    out.files.emplace_back("report.csv", csv);
    out.files.emplace_back("report.json", j.dump(2) + "\n");
    out.stdout_text = csv;
    return out;
}

inline OutputBundle execute_command(const std::string& command, const json& cfg) {
    if (command == "bounds") return execute_bounds(cfg);
    if (command == "mub-check") return execute_mub_check(cfg);
    if (command == "simulate") return execute_simulate(cfg);
    if (command == "sweep") return execute_sweep(cfg);
    if (command == "report") return execute_report(cfg);
    throw config_error("unknown command: " + command);
}

// ----------------------------------------------------------------- manifest

inline void write_outputs_with_manifest(const std::string& command, const json& cfg, const OutputBundle& bundle,
                                        const fs::path& outdir, long long duration_ms) {
    for (const auto& [name, content] : bundle.files) write_file(outdir / name, content);
    json manifest;
    manifest["tool"] = "steersim";
    manifest["version"] = kVersion;
    manifest["command"] = command;
    manifest["config"] = cfg;
    json names = json::array();
    for (const auto& [name, content] : bundle.files) names.push_back(name);
    manifest["outputs"] = std::move(names);
    manifest["duration_ms"] = duration_ms;
    write_file(outdir / "manifest.json", manifest.dump(2) + "\n");
}

// Re-execute a recorded run; data outputs land next to the manifest and are
// byte-identical to the original run.
inline OutputBundle execute_replay(const fs::path& manifest_path) {
    json manifest;
    try {
        manifest = json::parse(read_file(manifest_path));
    } catch (const json::parse_error& e) {
        throw config_error(std::string("replay: cannot parse manifest: ") + e.what());
    }
    const std::string command = manifest.at("command").get<std::string>();
    const json cfg = manifest.at("config");
    const auto t0 = std::chrono::steady_clock::now();
    OutputBundle bundle = execute_command(command, cfg);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
    const fs::path outdir = manifest_path.has_parent_path() ? manifest_path.parent_path() : fs::path(".");
    write_outputs_with_manifest(command, cfg, bundle, outdir, ms.count());
    bundle.stdout_text = "replayed " + command + " -> " + outdir.string() + "\n";
    return bundle;
}

// ------------------------------------------------------------------ parsing

inline std::vector<double> parse_p_range(const std::string& spec) {
    double start = 0.0, stop = 0.0, step = 0.0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3)
        throw config_error("p-range: expected start:stop:step");
    if (!(step > 0.0)) throw config_error("p-range: step must be positive");
    if (stop < start) throw config_error("p-range: stop must be >= start");
    std::vector<double> out;
    for (double p = start; p <= stop + 1e-9; p += step) out.push_back(p);
    return out;
}

struct CliOverrides {
    std::optional<int> dim;
    std::optional<double> p;
    std::optional<long long> counts;
    std::optional<std::uint64_t> seed;
    std::optional<double> crosstalk;
    std::optional<std::string> spiral;
    bool exact = false;
};

inline expsim::ExperimentConfig resolve_experiment(const std::string& config_path, const CliOverrides& ov) {
    expsim::ExperimentConfig cfg;
    if (!config_path.empty()) cfg = load_config_file(config_path);
    if (ov.dim) cfg.d = *ov.dim;
    if (ov.p) cfg.p = *ov.p;
    if (ov.counts) cfg.counts = *ov.counts;
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.crosstalk) cfg.eps_crosstalk = *ov.crosstalk;
    if (ov.spiral) apply_config_entry(cfg, "spiral_sigma", *ov.spiral);
    if (ov.exact) cfg.exact = true;
    if (const char* env = std::getenv("STEERSIM_SEED")) {
        try {
            cfg.seed = std::stoull(env);
        } catch (const std::exception&) {
            throw config_error("STEERSIM_SEED is not an integer");
        }
    }
    return cfg;
}

// Entry point shared by the binary and the tests. Exit codes: 0 success,
// 1 failed check, 2 validation/config error, 3 unsupported dimension,
// 4 I/O error.
inline int run(std::vector<std::string> args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"steersim: n-setting high-dimensional quantum steering simulator"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    // bounds
    std::vector<int> dims;
    std::string bounds_format = "csv";
    std::string bounds_out;
    auto* bounds = app.add_subcommand("bounds", "closed-form bounds and thresholds per dimension");
    bounds->add_option("--dims", dims, "comma-separated dimensions, e.g. 2,3,4,5,7,11")->delimiter(',')->required();
    bounds->add_option("--format", bounds_format, "stdout format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    bounds->add_option("--out", bounds_out, "output directory");

    // mub-check
    int mc_dim = 0;
    double mc_tol = 1e-10;
    std::string mc_out;
    auto* mubcheck = app.add_subcommand("mub-check", "verify the MUB family for a dimension");
    mubcheck->add_option("--dim", mc_dim, "dimension")->required();
    mubcheck->add_option("--tol", mc_tol, "verification tolerance");
    mubcheck->add_option("--out", mc_out, "output directory");

    // simulate
    std::string sim_config, sim_out;
    CliOverrides sim_ov;
    auto* simulate = app.add_subcommand("simulate", "single-point coincidence simulation");
    simulate->add_option("config", sim_config, "config file (key = value)");
    simulate->add_option("--dim", sim_ov.dim, "dimension override");
    simulate->add_option("--p", sim_ov.p, "pure-state fraction override");
    simulate->add_option("--counts", sim_ov.counts, "mean coincidences per setting");
    simulate->add_option("--seed", sim_ov.seed, "random seed");
    simulate->add_option("--crosstalk", sim_ov.crosstalk, "crosstalk eps in [0, 0.5]");
    simulate->add_option("--spiral-sigma", sim_ov.spiral, "Gaussian spiral width, or 'flat'");
    simulate->add_flag("--exact", sim_ov.exact, "evaluate probabilities analytically (no sampling)");
    simulate->add_option("--out", sim_out, "output directory");

    // sweep
    std::string sw_config, sw_out, sw_range;
    CliOverrides sw_ov;
    auto* sweep = app.add_subcommand("sweep", "sweep p, fit the line, extract p_min");
    sweep->add_option("config", sw_config, "config file (key = value)");
    sweep->add_option("--p-range", sw_range, "start:stop:step")->required();
    sweep->add_option("--dim", sw_ov.dim, "dimension override");
    sweep->add_option("--counts", sw_ov.counts, "mean coincidences per setting");
    sweep->add_option("--seed", sw_ov.seed, "random seed");
    sweep->add_option("--crosstalk", sw_ov.crosstalk, "crosstalk eps in [0, 0.5]");
    sweep->add_option("--spiral-sigma", sw_ov.spiral, "Gaussian spiral width, or 'flat'");
    sweep->add_flag("--exact", sw_ov.exact, "exact probabilities (zero error bars)");
    sweep->add_option("--out", sw_out, "output directory");

    // report
    std::vector<std::string> rp_inputs;
    std::string rp_out;
    auto* report = app.add_subcommand("report", "aggregate sweep summaries across dimensions");
    report->add_option("inputs", rp_inputs, "sweep.json summaries")->required();
    report->add_option("--out", rp_out, "output directory");

    // replay
    std::string replay_manifest;
    auto* replay = app.add_subcommand("replay", "re-run a recorded manifest");
    replay->add_option("manifest", replay_manifest, "manifest.json path")->required();

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << kVersion << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }

    try {
        std::string command;
        json cfg;
        std::string outdir;

        if (bounds->parsed()) {
            command = "bounds";
            cfg["dims"] = dims;
            cfg["format"] = bounds_format;
            outdir = bounds_out;
        } else if (mubcheck->parsed()) {
            command = "mub-check";
            cfg["d"] = mc_dim;
            cfg["tol"] = mc_tol;
            outdir = mc_out;
        } else if (simulate->parsed()) {
            command = "simulate";
            cfg["experiment"] = config_to_json(resolve_experiment(sim_config, sim_ov));
            outdir = sim_out;
        } else if (sweep->parsed()) {
            command = "sweep";
            cfg["experiment"] = config_to_json(resolve_experiment(sw_config, sw_ov));
            cfg["p_values"] = parse_p_range(sw_range);
            outdir = sw_out;
        } else if (report->parsed()) {
            command = "report";
            std::vector<std::string> abs;
            for (const auto& p : rp_inputs) abs.push_back(fs::absolute(p).string());
            cfg["inputs"] = abs;
            outdir = rp_out;
        } else if (replay->parsed()) {
            const auto bundle = execute_replay(replay_manifest);
            out << bundle.stdout_text;
            return bundle.exit_code;
        }

        const auto t0 = std::chrono::steady_clock::now();
        const OutputBundle bundle = execute_command(command, cfg);
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
        if (!outdir.empty()) {
            write_outputs_with_manifest(command, cfg, bundle, outdir, ms.count());
            out << command << ": wrote " << bundle.files.size() << " files + manifest to " << outdir << "\n";
        } else {
            out << bundle.stdout_text;
        }
        return bundle.exit_code;
    } catch (const unsupported_dimension& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    } catch (const io_error& e) {
        err << "error: " << e.what() << "\n";
        return 4;
    } catch (const error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace steersim::cli
