#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "hitop/analysis.hpp"
#include "hitop/config.hpp"
#include "hitop/fetch.hpp"
#include "hitop/io.hpp"
#include "hitop/metrics.hpp"
#include "hitop/nn.hpp"

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

using namespace hitop;

struct CommonFlags {
    std::string config_path;
    std::string output_dir;
    std::string noise, quant, preset, format;
    std::uint64_t seed = 0;
    bool seed_set = false;
    unsigned threads = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "Config file (INI sections)");
    cmd->add_option("--out", f.output_dir, "Output directory (overrides paths.output_dir)");
    cmd->add_option("--noise", f.noise, "Noise injection: on|off")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--quant", f.quant, "8-bit DAC quantization: on|off")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--preset", f.preset, "Noise preset: paper-slow|paper-fast|off");
    cmd->add_option("--seed", f.seed, "Master seed override")->each([&](const std::string&) {
        f.seed_set = true;
    });
    cmd->add_option("--threads", f.threads, "Worker threads for pass execution");
    cmd->add_option("--format", f.format, "Report format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
}

RunConfig make_config(const CommonFlags& f) {
    RunConfig c = f.config_path.empty() ? default_run_config() : load_run_config(f.config_path);
    // precedence: config file < environment < flags
    if (const char* v = std::getenv("HITOP_DATASET_DIR")) c.paths.dataset_dir = v;
    if (const char* v = std::getenv("HITOP_WEIGHTS_FILE")) c.paths.weights_file = v;
    if (const char* v = std::getenv("HITOP_OUTPUT_DIR")) c.paths.output_dir = v;
    if (!f.output_dir.empty()) c.paths.output_dir = f.output_dir;
    if (!f.noise.empty()) c.run.noise = f.noise == "on";
    if (!f.quant.empty()) c.run.quantization = f.quant == "on";
    if (!f.preset.empty()) c.hardware.noise_preset = f.preset;
    if (f.seed_set) c.hardware.master_seed = f.seed;
    if (f.threads > 0) c.run.threads = f.threads;
    if (!f.format.empty()) c.run.output_format = f.format;
    c.finalize();
    return c;
}

std::string out_path(const RunConfig& c, const std::string& name) {
    return (fs::path(c.paths.output_dir) / name).string();
}

std::string schedule_text(const TileSchedule& s) {
    std::string text;
    char line[160];
    for (const auto& p : s.passes) {
        std::snprintf(line, sizeof(line),
                      "pass %zu: rows [%zu,%zu) inner [%zu,%zu) cols [%zu,%zu) sign %c\n",
                      p.pass_id, p.rows.begin, p.rows.end, p.inner.begin, p.inner.end,
                      p.cols.begin, p.cols.end, p.sign == SignPhase::plus ? '+' : '-');
        text += line;
    }
    std::snprintf(line, sizeof(line), "passes: %zu (%zu row x %zu col x %zu inner%s)\n",
                  s.passes.size(), s.row_blocks, s.col_blocks, s.inner_chunks,
                  s.input_signed ? ", signed x2" : "");
    text += line;
    std::snprintf(line, sizeof(line), "padding: %s%%\n",
                  format_double(100.0 * s.padding_fraction).c_str());
    text += line;
    return text;
}

std::string run_log_text(const RunLog& log) {
    std::string text;
    char line[96];
    std::snprintf(line, sizeof(line), "passes: %zu\nsaturation events: %zu\n", log.pass_count,
                  log.saturation_events);
    text += line;
    for (const auto& p : log.passes)
        if (p.saturated > 0) {
            std::snprintf(line, sizeof(line), "pass %zu: %zu saturated outputs\n", p.pass_id,
                          p.saturated);
            text += line;
        }
    return text;
}

void write_histogram_csv(const std::string& path, const Histogram& h) {
    std::string text = "bin_lo,bin_hi,count\n";
    for (std::size_t i = 0; i < h.counts.size(); ++i)
        text += format_double(h.bin_lo[i]) + "," + format_double(h.bin_hi[i]) + "," +
                std::to_string(h.counts[i]) + "\n";
    atomic_write_file(path, text);
}

void write_confusion_csv(const std::string& path, const ConfusionResult& c) {
    std::string text;
    for (const auto& row : c.counts) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j) text += ',';
            text += std::to_string(row[j]);
        }
        text += '\n';
    }
    atomic_write_file(path, text);
}

json energy_report_json(const EnergyReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"component", row.name},
                        {"energy_per_use_j", row.energy_per_use_j},
                        {"parallelism", row.parallelism},
                        {"energy_per_op_j", row.energy_per_op_j}});
    return {{"rows", rows}, {"total_per_op_j", r.total_per_op_j}};
}

void print_energy_table(const EnergyReport& r, const std::string& title) {
    std::printf("%s\n", title.c_str());
    std::printf("  %-28s %14s %12s %14s\n", "component", "per use [J]", "parallelism",
                "per op [fJ]");
    for (const auto& row : r.rows)
        std::printf("  %-28s %14.4g %12g %14.4g\n", row.name.c_str(), row.energy_per_use_j,
                    row.parallelism, row.energy_per_op_j * 1e15);
    std::printf("  %-28s %14s %12s %14.4g\n", "total", "", "", r.total_per_op_j * 1e15);
}

// ---- gemm -----------------------------------------------------------------

// Encoded drive levels per pass, for inspection: (pass, device, channel,
// step, level). VCSEL levels are mA, MZM levels are volts.
void dump_waveforms(const std::string& path, const Matrix& x, const Matrix& w,
                    const TileSchedule& schedule, const RunConfig& c,
                    const PassOptions& options) {
    auto [x_plus, x_minus] = split_signed_input(x);
    std::string csv = "pass,device,channel,step,level\n";
    for (const auto& p : schedule.passes) {
        const Matrix& src = p.sign == SignPhase::plus ? x_plus : x_minus;
        Matrix xb = src.block(p.rows.begin, p.rows.end, p.inner.begin, p.inner.end);
        Matrix wb = w.block(p.inner.begin, p.inner.end, p.cols.begin, p.cols.end);
        auto [xs, x_scale] = normalize_for_hardware(xb, BlockKind::input);
        auto [ws, w_scale] = normalize_for_hardware(wb, BlockKind::weight);
        Matrix in_drive = encode_input_tile(xs, c.hardware, c.devices.vcsel, p.pass_id, options);
        Matrix wt_drive = encode_weight_tile(ws, c.hardware, c.devices.mzm, p.pass_id, options);
        for (std::size_t m = 0; m < in_drive.rows(); ++m)
            for (std::size_t k = 0; k < in_drive.cols(); ++k)
                csv += std::to_string(p.pass_id) + ",vcsel," + std::to_string(m) + "," +
                       std::to_string(k) + "," + format_double(in_drive(m, k)) + "\n";
        for (std::size_t k = 0; k < wt_drive.rows(); ++k)
            for (std::size_t n = 0; n < wt_drive.cols(); ++n)
                csv += std::to_string(p.pass_id) + ",mzm," + std::to_string(n) + "," +
                       std::to_string(k) + "," + format_double(wt_drive(k, n)) + "\n";
    }
    atomic_write_file(path, csv);
}

int cmd_gemm(const CommonFlags& flags, const std::string& x_path, const std::string& w_path,
             bool fit_gain_flag, bool dump_waveforms_flag) {
    RunConfig c = make_config(flags);
    Matrix x = load_matrix(x_path);
    Matrix w = load_matrix(w_path);
    if (x.cols() != w.rows())
        throw DataError("gemm: X is " + std::to_string(x.rows()) + "x" +
                        std::to_string(x.cols()) + " but W is " + std::to_string(w.rows()) + "x" +
                        std::to_string(w.cols()));

    PassOptions options{c.run.noise, c.run.quantization};
    bool has_negative = false;
    for (double v : x.values()) has_negative = has_negative || v < 0.0;
    GemmShape shape{x.rows(), x.cols(), w.cols()};
    TileSchedule schedule = plan_tiles(shape, c.hardware, has_negative);
    ScheduleResult result =
        execute_schedule(x, w, schedule, c.hardware, c.devices, options, c.run.threads);

    Matrix reference = oracle_matmul(x, w);
    Matrix y = result.y;
    double gain = 1.0;
    if (fit_gain_flag || c.run.fit_gain) {
        gain = fit_gain(y, reference);
        for (double& v : y.values()) v *= gain;
    }
    ErrorStats stats = compute_error_stats(y, reference);

    save_matrix_htmx(out_path(c, "y.htmx"), y);
    if (c.run.output_format == "csv") save_matrix_csv(out_path(c, "y.csv"), y);
    write_histogram_csv(out_path(c, "error_hist.csv"), histogram(stats.errors, 64));
    atomic_write_file(out_path(c, "runlog.txt"), schedule_text(schedule) + run_log_text(result.log));
    if (dump_waveforms_flag)
        dump_waveforms(out_path(c, "waveforms.csv"), x, w, schedule, c, options);

    json report = {{"rows", shape.rows},
                   {"inner", shape.inner},
                   {"cols", shape.cols},
                   {"pass_count", result.log.pass_count},
                   {"saturation_events", result.log.saturation_events},
                   {"padding_fraction", schedule.padding_fraction},
                   {"full_scale", stats.full_scale},
                   {"error_sigma", stats.sigma},
                   {"error_mean", stats.mean},
                   {"relative_frobenius_error", stats.rel_frobenius},
                   {"effective_bits", stats.bits ? json(*stats.bits) : json(nullptr)},
                   {"fitted_gain", (fit_gain_flag || c.run.fit_gain) ? json(gain) : json(nullptr)},
                   {"seed", c.hardware.master_seed}};
    atomic_write_file(out_path(c, "gemm_report.json"), report.dump(2) + "\n");

    std::printf("gemm %zux%zux%zu: %zu passes, sigma %.4g%% of full scale", shape.rows,
                shape.inner, shape.cols, result.log.pass_count, 100.0 * stats.sigma);
    if (stats.bits) std::printf(", %.2f effective bits", *stats.bits);
    std::printf(", rel Frobenius %.3g\n", stats.rel_frobenius);
    std::printf("reports in %s\n", c.paths.output_dir.c_str());
    return 0;
}

// ---- infer ------------------------------------------------------------------

int cmd_infer(const CommonFlags& flags, std::string dataset_dir, std::string weights_file,
              std::string stem, std::size_t limit, int label_base_opt) {
    RunConfig c = make_config(flags);
    if (!dataset_dir.empty()) c.paths.dataset_dir = dataset_dir;
    if (!weights_file.empty()) c.paths.weights_file = weights_file;
    if (!stem.empty()) c.paths.dataset_stem = stem;
    if (limit > 0) c.run.batch_limit = limit;
    if (label_base_opt >= 0) c.run.label_base = label_base_opt;
    if (c.paths.dataset_dir.empty()) throw ConfigError("paths.dataset_dir: not set");
    if (c.paths.weights_file.empty()) throw ConfigError("paths.weights_file: not set");

    NetworkModel model = load_weights(c.paths.weights_file);
    int classes = c.run.class_count > 0 ? c.run.class_count : int(model.output_dim());
    Dataset data = load_dataset(c.paths.dataset_dir, c.paths.dataset_stem, classes,
                                c.run.label_base);
    if (data.images.cols() != model.input_dim)
        throw DataError("infer: dataset has " + std::to_string(data.images.cols()) +
                        " pixels per image but model expects " +
                        std::to_string(model.input_dim));

    std::size_t n = data.size();
    if (c.run.batch_limit > 0) n = std::min(n, c.run.batch_limit);
    Matrix batch = data.images.block(0, n, 0, data.images.cols());
    std::vector<int> labels(data.labels.begin(), data.labels.begin() + long(n));

    PassOptions options{c.run.noise, c.run.quantization};
    InferenceResult digital = run_inference(model, batch, c.hardware, c.devices,
                                            InferenceMode::digital, options, c.run.threads);
    InferenceResult analog = run_inference(model, batch, c.hardware, c.devices,
                                           InferenceMode::analog, options, c.run.threads);

    ConfusionResult digital_cm = confusion_matrix(digital.predictions, labels, classes);
    ConfusionResult analog_cm = confusion_matrix(analog.predictions, labels, classes);
    double degradation = 100.0 * (digital_cm.accuracy - analog_cm.accuracy);

    write_confusion_csv(out_path(c, "digital_confusion.csv"), digital_cm);
    write_confusion_csv(out_path(c, "analog_confusion.csv"), analog_cm);
    atomic_write_file(out_path(c, "runlog.txt"), run_log_text(analog.log));

    json layers = json::array();
    for (const auto& l : model.layers)
        layers.push_back({{"rows", l.weights.rows()},
                          {"cols", l.weights.cols()},
                          {"activation", l.activation == Activation::relu ? "relu" : "none"}});
    json report = {{"images", n},
                   {"classes", classes},
                   {"digital_accuracy", digital_cm.accuracy},
                   {"analog_accuracy", analog_cm.accuracy},
                   {"degradation_pts", degradation},
                   {"parameters", count_parameters(model)},
                   {"operations", count_operations(model, n)},
                   {"pass_count", analog.log.pass_count},
                   {"saturation_events", analog.log.saturation_events},
                   {"noise_preset", c.hardware.noise_preset},
                   {"seed", c.hardware.master_seed},
                   {"model_layers", layers}};
    atomic_write_file(out_path(c, "infer_report.json"), report.dump(2) + "\n");

    std::printf("inference over %zu images (%d classes)\n", n, classes);
    std::printf("  digital accuracy: %.2f%%\n", 100.0 * digital_cm.accuracy);
    std::printf("  analog accuracy:  %.2f%% (preset %s)\n", 100.0 * analog_cm.accuracy,
                c.hardware.noise_preset.c_str());
    std::printf("  degradation: %.2f pts; %zu passes, %zu operations\n", degradation,
                analog.log.pass_count, count_operations(model, n));
    std::printf("reports in %s\n", c.paths.output_dir.c_str());
    return 0;
}

// ---- plan ---------------------------------------------------------------

GemmShape parse_shape(const std::string& text) {
    GemmShape s;
    char sep1 = 0, sep2 = 0;
    std::istringstream in(text);
    if (!(in >> s.rows >> sep1 >> s.inner >> sep2 >> s.cols) || sep1 != 'x' || sep2 != 'x' ||
        !in.eof())
        throw ConfigError("plan: expected shape ROWSxINNERxCOLS (e.g. 7x784x7), got '" + text +
                          "'");
    return s;
}

int cmd_plan(const CommonFlags& flags, const std::string& shape_text, bool signed_input,
             bool with_cost) {
    RunConfig c = make_config(flags);
    GemmShape shape = parse_shape(shape_text);
    TileSchedule s = plan_tiles(shape, c.hardware, signed_input);
    std::string text = schedule_text(s);
    std::fputs(text.c_str(), stdout);
    if (with_cost) {
        auto budgets = c.energy_budget();
        CostReport cost = run_cost(shape, s, c.hardware, budgets, c.energy.tile_switch_ns);
        std::printf("ops: %zu\n", cost.op_count);
        std::printf("wall time: %s s\n", format_double(cost.wall_time_s).c_str());
        std::printf("effective throughput: %s ops/s (peak %s)\n",
                    format_double(cost.effective_throughput_ops).c_str(),
                    format_double(throughput_ops(c.hardware)).c_str());
        std::printf("energy: %s J total, %.4g fJ/OP ('%s' ledger)\n",
                    format_double(cost.total_energy_j).c_str(), cost.energy_per_op_j * 1e15,
                    c.energy.preset.c_str());
    }
    return 0;
}

// ---- estimate ---------------------------------------------------------------

int cmd_estimate(const CommonFlags& flags, const std::string& energy_preset) {
    RunConfig c = make_config(flags);
    double tput = throughput_ops(c.hardware);
    double density = compute_density_ops_per_mm2(c.hardware.m_wavelengths,
                                                 c.hardware.clock_rate_gsps,
                                                 c.area.modulator_area_mm2);

    std::vector<std::pair<std::string, EnergyReport>> ledgers;
    auto add = [&](const std::string& name) {
        if (name == "paper-current")
            ledgers.emplace_back(name, energy_per_op(paper_current_budget()));
        else if (name == "paper-future")
            ledgers.emplace_back(name, energy_per_op(paper_future_budget()));
        else if (name == "derived")
            ledgers.emplace_back(
                name, energy_per_op(component_budget(c.hardware.m_wavelengths,
                                                     c.hardware.n_spatial, c.hardware.k_window,
                                                     c.hardware.clock_rate_gsps)));
        else if (name == "custom")
            ledgers.emplace_back(name, energy_per_op(c.energy.custom_rows));
        else
            throw ConfigError("estimate: unknown energy preset '" + name +
                              "' (paper-current, paper-future, derived, custom)");
    };
    if (!energy_preset.empty()) {
        add(energy_preset);
    } else {
        add("paper-current");
        add("paper-future");
        if (c.energy.preset != "paper-current" && c.energy.preset != "paper-future")
            add(c.energy.preset);
    }

    double mzm_sym = modulator_symbol_energy_j(
        c.devices.mzm.drive_vpp_v / 3.0, c.devices.mzm.termination_ohm,
        c.hardware.clock_rate_gsps);
    double vcsel_sym = modulator_symbol_energy_j(
        kVcselDriveVrms, c.devices.vcsel.series_resistance_ohm, c.hardware.clock_rate_gsps);

    if (c.run.output_format == "json") {
        json doc = {{"m_wavelengths", c.hardware.m_wavelengths},
                    {"n_spatial", c.hardware.n_spatial},
                    {"clock_rate_gsps", c.hardware.clock_rate_gsps},
                    {"throughput_ops_per_s", tput},
                    {"compute_density_ops_per_s_mm2", density},
                    {"mzm_symbol_energy_j", mzm_sym},
                    {"vcsel_symbol_energy_j", vcsel_sym}};
        for (auto& [name, report] : ledgers) doc["energy"][name] = energy_report_json(report);
        std::printf("%s\n", doc.dump(2).c_str());
        return 0;
    }

    std::printf("hardware: M=%zu wavelengths, N=%zu spatial modes, R=%s GS/s\n",
                c.hardware.m_wavelengths, c.hardware.n_spatial,
                format_double(c.hardware.clock_rate_gsps).c_str());
    std::printf("throughput: %s ops/s (%.4g TOPS)\n", format_double(tput).c_str(), tput / 1e12);
    std::printf("compute density: %s ops/s/mm2 (%.4g GOPS/mm2, A=%s mm2)\n",
                format_double(density).c_str(), density / 1e9,
                format_double(c.area.modulator_area_mm2).c_str());
    std::printf("drive symbol energies: MZM %.4g fJ, VCSEL %.4g fJ (from V_rms^2/(Z*R))\n\n",
                mzm_sym * 1e15, vcsel_sym * 1e15);
    for (auto& [name, report] : ledgers) print_energy_table(report, "energy ledger '" + name + "'");
    return 0;
}

// ---- sweep ---------------------------------------------------------------

int cmd_sweep(const CommonFlags& flags, const std::string& param,
              const std::vector<double>& values, bool with_accuracy,
              const std::string& out_file) {
    static const std::vector<std::string> sweepable = {"M", "N", "R", "noise", "k_window", "A2"};
    if (std::find(sweepable.begin(), sweepable.end(), param) == sweepable.end())
        throw ConfigError("sweep: unknown parameter '" + param +
                          "' (expected M, N, R, noise, k_window or A2)");
    if (values.empty()) throw ConfigError("sweep: no values given");

    RunConfig base = make_config(flags);
    std::string csv = "param,value,throughput_ops,density_ops_mm2,energy_per_op_j,effective_bits";
    if (with_accuracy) csv += ",analog_accuracy";
    csv += "\n";

    for (double v : values) {
        RunConfig c = base;
        std::string bits_cell;
        if (param == "M") c.hardware.m_wavelengths = std::size_t(v);
        else if (param == "N") c.hardware.n_spatial = std::size_t(v);
        else if (param == "R") c.hardware.clock_rate_gsps = v;
        else if (param == "k_window") c.hardware.k_window = std::size_t(v);
        else if (param == "A2") c.area.modulator_area_mm2 = v;
        else if (param == "noise") {
            if (!(v > 0.0)) throw ConfigError("sweep: noise sigma must be > 0");
            bits_cell = format_double(effective_bits(v));
        }
        c.hardware.validate();
        c.area.validate();

        NoisePreset preset = noise_preset(c.hardware.noise_preset);
        if (param == "noise") {
            double k = v / 0.015; // scale the slow preset to the target sigma
            preset = noise_preset("paper-slow");
            preset.input_sigma *= k;
            preset.weight_sigma *= k;
            preset.readout_sigma *= k;
        }
        c.devices = make_paper_devices(c.hardware, preset);

        double tput = throughput_ops(c.hardware);
        double density = compute_density_ops_per_mm2(
            c.hardware.m_wavelengths, c.hardware.clock_rate_gsps, c.area.modulator_area_mm2);
        EnergyReport energy = energy_per_op(
            component_budget(c.hardware.m_wavelengths, c.hardware.n_spatial, c.hardware.k_window,
                             c.hardware.clock_rate_gsps));

        csv += param + "," + format_double(v) + "," + format_double(tput) + "," +
               format_double(density) + "," + format_double(energy.total_per_op_j) + "," +
               bits_cell;

        if (with_accuracy) {
            if (c.paths.dataset_dir.empty() || c.paths.weights_file.empty())
                throw ConfigError("sweep --with-accuracy: paths.dataset_dir and "
                                  "paths.weights_file must be set");
            NetworkModel model = load_weights(c.paths.weights_file);
            int classes = c.run.class_count > 0 ? c.run.class_count : int(model.output_dim());
            Dataset data = load_dataset(c.paths.dataset_dir, c.paths.dataset_stem, classes,
                                        c.run.label_base);
            std::size_t n = data.size();
            if (c.run.batch_limit > 0) n = std::min(n, c.run.batch_limit);
            Matrix batch = data.images.block(0, n, 0, data.images.cols());
            std::vector<int> labels(data.labels.begin(), data.labels.begin() + long(n));
            PassOptions options{c.run.noise, c.run.quantization};
            InferenceResult analog = run_inference(model, batch, c.hardware, c.devices,
                                                   InferenceMode::analog, options, c.run.threads);
            csv += "," + format_double(confusion_matrix(analog.predictions, labels,
                                                        classes).accuracy);
        }
        csv += "\n";
    }

    if (out_file.empty())
        std::fputs(csv.c_str(), stdout);
    else
        atomic_write_file(out_file, csv);
    return 0;
}

// ---- fetch --------------------------------------------------------------

int cmd_fetch(const CommonFlags& flags, std::vector<std::string> names,
              const std::string& dest) {
    RunConfig c = make_config(flags);
    if (c.fetch.empty())
        throw ConfigError("fetch: no [fetch] entries in config; add <name>.url keys");
    if (names.empty())
        for (const auto& [name, entry] : c.fetch) names.push_back(name);
    std::string dest_dir = !dest.empty() ? dest
                           : !c.paths.dataset_dir.empty() ? c.paths.dataset_dir
                                                          : std::string("datasets");
    for (const auto& name : names) {
        auto it = c.fetch.find(name);
        if (it == c.fetch.end()) throw ConfigError("fetch: no [fetch] entry named '" + name + "'");
        std::string path = fetch_dataset_file(it->second, dest_dir);
        std::printf("fetched %s -> %s\n", name.c_str(), path.c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hitopsim: behavioral simulator of a wavelength-time-space photonic "
                 "tensor processor"};
    app.require_subcommand(1);

    CommonFlags flags;

    auto* gemm = app.add_subcommand("gemm", "Run a GEMM through the analog pipeline and "
                                            "compare against the exact product");
    std::string x_path, w_path;
    bool fit_gain_flag = false;
    bool dump_waveforms_flag = false;
    gemm->add_option("X", x_path, "Input matrix file (HTMX or CSV)")->required();
    gemm->add_option("W", w_path, "Weight matrix file (HTMX or CSV)")->required();
    gemm->add_flag("--fit-gain", fit_gain_flag, "Least-squares gain calibration before stats");
    gemm->add_flag("--dump-waveforms", dump_waveforms_flag,
                   "Write encoded drive waveforms (pass,device,channel,step,level) CSV");
    add_common(gemm, flags);

    auto* infer = app.add_subcommand("infer", "Digital + analog MLP inference on an IDX dataset");
    std::string dataset_dir, weights_file, stem;
    std::size_t limit = 0;
    int label_base = -1;
    infer->add_option("--dataset", dataset_dir, "Dataset directory with IDX files");
    infer->add_option("--weights", weights_file, "HTWT weights file");
    infer->add_option("--stem", stem, "IDX file stem (default t10k)");
    infer->add_option("--limit", limit, "Cap the number of images");
    infer->add_option("--label-base", label_base, "Label offset in IDX file (EMNIST letters: 1)");
    add_common(infer, flags);

    auto* plan = app.add_subcommand("plan", "Print the tile schedule for a GEMM shape");
    std::string shape_text;
    bool signed_input = false;
    bool plan_cost = false;
    plan->add_option("shape", shape_text, "Shape as ROWSxINNERxCOLS, e.g. 14x784x10")->required();
    plan->add_flag("--signed", signed_input, "Plan two sign phases for signed inputs");
    plan->add_flag("--cost", plan_cost, "Estimate run time and energy for the schedule");
    add_common(plan, flags);

    auto* estimate = app.add_subcommand("estimate", "Throughput, density and energy ledgers");
    std::string energy_preset;
    estimate->add_option("--energy-preset", energy_preset,
                         "paper-current | paper-future | derived (default: both paper ledgers)");
    add_common(estimate, flags);

    auto* sweep = app.add_subcommand("sweep", "Sweep a hardware parameter, emit CSV");
    std::string sweep_param, sweep_out;
    std::vector<double> sweep_values;
    bool with_accuracy = false;
    sweep->add_option("--param", sweep_param, "One of M, N, R, noise, k_window, A2")->required();
    sweep->add_option("--values", sweep_values, "Grid values")->required()->delimiter(',');
    sweep->add_flag("--with-accuracy", with_accuracy, "Run analog inference per grid point");
    sweep->add_option("--sweep-out", sweep_out, "Write CSV here instead of stdout");
    add_common(sweep, flags);

    auto* fetch = app.add_subcommand("fetch", "Download dataset files from [fetch] mirrors");
    std::vector<std::string> fetch_names;
    std::string fetch_dest;
    fetch->add_option("names", fetch_names, "Entries to fetch (default: all)");
    fetch->add_option("--dest", fetch_dest, "Destination directory");
    add_common(fetch, flags);

    try {
        app.parse(argc, argv);
        if (gemm->parsed())
            return cmd_gemm(flags, x_path, w_path, fit_gain_flag, dump_waveforms_flag);
        if (infer->parsed()) return cmd_infer(flags, dataset_dir, weights_file, stem, limit,
                                              label_base);
        if (plan->parsed()) return cmd_plan(flags, shape_text, signed_input, plan_cost);
        if (estimate->parsed()) return cmd_estimate(flags, energy_preset);
        if (sweep->parsed())
            return cmd_sweep(flags, sweep_param, sweep_values, with_accuracy, sweep_out);
        if (fetch->parsed()) return cmd_fetch(flags, fetch_names, fetch_dest);
        return 1;
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    } catch (const hitop::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const hitop::DataError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 3;
    }
}
