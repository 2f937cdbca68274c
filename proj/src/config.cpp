#include "hitop/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "hitop/io.hpp"

namespace hitop {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.begin(), end = s.end();
    while (begin != end && std::isspace(static_cast<unsigned char>(*begin))) ++begin;
    while (end != begin && std::isspace(static_cast<unsigned char>(*(end - 1)))) --end;
    return std::string(begin, end);
}

double parse_number(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(key + ": cannot parse '" + value + "' as a number");
    }
}

std::size_t parse_count(const std::string& key, const std::string& value) {
    double v = parse_number(key, value);
    if (v < 0 || v != double(std::size_t(v)))
        throw ConfigError(key + ": must be a nonnegative integer, got '" + value + "'");
    return std::size_t(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "on" || value == "true" || value == "1" || value == "yes") return true;
    if (value == "off" || value == "false" || value == "0" || value == "no") return false;
    throw ConfigError(key + ": expected on/off, got '" + value + "'");
}

} // namespace

RunConfig default_run_config() {
    RunConfig c;
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);

    RunConfig c = default_run_config();
    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        // inline comments: a '#' preceded by whitespace starts one
        for (std::size_t i = 1; i < t.size(); ++i) {
            if (t[i] == '#' && std::isspace(static_cast<unsigned char>(t[i - 1]))) {
                t = trim(t.substr(0, i));
                break;
            }
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ": line " + std::to_string(line_no) +
                              ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        std::string full = section.empty() ? key : section + "." + key;

        if (section == "hardware") {
            if (key == "m_wavelengths") c.hardware.m_wavelengths = parse_count(full, value);
            else if (key == "n_spatial") c.hardware.n_spatial = parse_count(full, value);
            else if (key == "clock_rate_gsps") c.hardware.clock_rate_gsps = parse_number(full, value);
            else if (key == "k_window") c.hardware.k_window = parse_count(full, value);
            else if (key == "wdm_channel_spacing_ghz")
                c.hardware.wdm_channel_spacing_ghz = parse_number(full, value);
            else if (key == "master_seed")
                c.hardware.master_seed = std::uint64_t(parse_count(full, value));
            else if (key == "noise_preset") c.hardware.noise_preset = value;
            else if (key == "crosstalk_file") c.crosstalk_file = value;
            else throw ConfigError(full + ": unknown key");
        } else if (section == "devices") {
            if (key == "preset") c.device_preset = value;
            else c.device_overrides[key] = parse_number(full, value);
        } else if (section == "area") {
            if (key == "modulator_area_mm2") c.area.modulator_area_mm2 = parse_number(full, value);
            else if (key == "vcsel_area_mm2") c.area.vcsel_area_mm2 = parse_number(full, value);
            else throw ConfigError(full + ": unknown key");
        } else if (section == "paths") {
            if (key == "dataset_dir") c.paths.dataset_dir = value;
            else if (key == "dataset_stem") c.paths.dataset_stem = value;
            else if (key == "weights_file") c.paths.weights_file = value;
            else if (key == "output_dir") c.paths.output_dir = value;
            else throw ConfigError(full + ": unknown key");
        } else if (section == "run") {
            if (key == "mode") c.run.mode = value;
            else if (key == "batch_limit") c.run.batch_limit = parse_count(full, value);
            else if (key == "noise") c.run.noise = parse_bool(full, value);
            else if (key == "quantization") c.run.quantization = parse_bool(full, value);
            else if (key == "threads") c.run.threads = unsigned(parse_count(full, value));
            else if (key == "output_format") c.run.output_format = value;
            else if (key == "label_base") c.run.label_base = int(parse_count(full, value));
            else if (key == "class_count") c.run.class_count = int(parse_count(full, value));
            else if (key == "fit_gain") c.run.fit_gain = parse_bool(full, value);
            else throw ConfigError(full + ": unknown key");
        } else if (section == "energy") {
            if (key == "preset") c.energy.preset = value;
            else if (key == "tile_switch_ns") c.energy.tile_switch_ns = parse_number(full, value);
            else if (key.rfind("row.", 0) == 0) {
                std::string rest = key.substr(4);
                auto dot = rest.rfind('.');
                if (dot == std::string::npos)
                    throw ConfigError(full + ": expected row.<name>.energy_per_use_j or "
                                             "row.<name>.parallelism");
                std::string name = rest.substr(0, dot), field = rest.substr(dot + 1);
                auto it = std::find_if(c.energy.custom_rows.begin(), c.energy.custom_rows.end(),
                                       [&](const ComponentBudget& b) { return b.name == name; });
                if (it == c.energy.custom_rows.end()) {
                    c.energy.custom_rows.push_back({name, 0.0, 1.0});
                    it = c.energy.custom_rows.end() - 1;
                }
                if (field == "energy_per_use_j") it->energy_per_use_j = parse_number(full, value);
                else if (field == "parallelism") it->parallelism = parse_number(full, value);
                else throw ConfigError(full + ": unknown row field '" + field + "'");
            } else {
                throw ConfigError(full + ": unknown key");
            }
        } else if (section == "fetch") {
            // keys: <name>.url, <name>.sha256, <name>.filename
            auto dot = key.find('.');
            if (dot == std::string::npos) throw ConfigError(full + ": expected <name>.url|sha256|filename");
            std::string name = key.substr(0, dot), field = key.substr(dot + 1);
            FetchEntry& e = c.fetch[name];
            if (field == "url") e.url = value;
            else if (field == "sha256") e.sha256 = value;
            else if (field == "filename") e.filename = value;
            else throw ConfigError(full + ": unknown fetch field '" + field + "'");
        } else {
            throw ConfigError(path + ": line " + std::to_string(line_no) + ": unknown section [" +
                              section + "]");
        }
    }
    return c;
}

namespace {

void apply_device_override(DeviceSet& d, const std::string& key, double v) {
    auto& vc = d.vcsel;
    auto& mz = d.mzm;
    auto& det = d.detector;
    if (key == "vcsel.threshold_current_ma") vc.threshold_current_ma = v;
    else if (key == "vcsel.slope_efficiency_mw_per_ma") vc.slope_efficiency_mw_per_ma = v;
    else if (key == "vcsel.series_resistance_ohm") vc.series_resistance_ohm = v;
    else if (key == "vcsel.bias_voltage_v") vc.bias_voltage_v = v;
    else if (key == "vcsel.max_power_mw") vc.max_power_mw = v;
    else if (key == "vcsel.wall_plug_efficiency") vc.wall_plug_efficiency = v;
    else if (key == "vcsel.encoding_noise_sigma") vc.encoding_noise_sigma = v;
    else if (key == "vcsel.center_wavelength_nm") vc.center_wavelength_nm = v;
    else if (key == "mzm.v_pi_v") mz.v_pi_v = v;
    else if (key == "mzm.bias_offset_v") mz.bias_offset_v = v;
    else if (key == "mzm.drive_vpp_v") mz.drive_vpp_v = v;
    else if (key == "mzm.insertion_loss_db") mz.insertion_loss_db = v;
    else if (key == "mzm.encoding_noise_sigma") mz.encoding_noise_sigma = v;
    else if (key == "mzm.termination_ohm") mz.termination_ohm = v;
    else if (key == "detector.responsivity_a_per_w") det.responsivity_a_per_w = v;
    else if (key == "detector.integrator_gain_v_per_pc") det.integrator_gain_v_per_pc = v;
    else if (key == "detector.read_noise_sigma_v") det.read_noise_sigma_v = v;
    else if (key == "detector.full_scale_voltage_v") det.full_scale_voltage_v = v;
    else if (key == "detector.max_integration_steps") det.max_integration_steps = std::size_t(v);
    else throw ConfigError("devices." + key + ": unknown key");
}

} // namespace

void RunConfig::finalize() {
    hardware.validate();
    area.validate();
    if (device_preset != "paper")
        throw ConfigError("devices.preset: unknown preset '" + device_preset + "'");
    if (run.mode != "analog" && run.mode != "digital" && run.mode != "both")
        throw ConfigError("run.mode: expected analog, digital or both, got '" + run.mode + "'");
    if (run.output_format != "csv" && run.output_format != "json")
        throw ConfigError("run.output_format: expected csv or json, got '" + run.output_format +
                          "'");
    if (run.threads == 0) throw ConfigError("run.threads: must be >= 1");

    if (!crosstalk_file.empty()) {
        Matrix c = load_matrix(crosstalk_file);
        hardware.crosstalk = std::move(c);
        hardware.validate();
    }

    if (energy.preset != "paper-current" && energy.preset != "paper-future" &&
        energy.preset != "derived" && energy.preset != "custom")
        throw ConfigError("energy.preset: expected paper-current, paper-future, derived or "
                          "custom, got '" + energy.preset + "'");
    if (energy.preset == "custom" && energy.custom_rows.empty())
        throw ConfigError("energy.preset: 'custom' needs at least one [energy] row.<name> entry");
    if (energy.tile_switch_ns < 0.0) throw ConfigError("energy.tile_switch_ns: must be >= 0");

    devices = make_paper_devices(hardware);
    for (const auto& [key, value] : device_overrides) apply_device_override(devices, key, value);
    devices.validate();
}

std::vector<ComponentBudget> RunConfig::energy_budget() const {
    if (energy.preset == "paper-current") return paper_current_budget();
    if (energy.preset == "paper-future") return paper_future_budget();
    if (energy.preset == "derived")
        return component_budget(hardware.m_wavelengths, hardware.n_spatial, hardware.k_window,
                                hardware.clock_rate_gsps);
    return energy.custom_rows;
}

} // namespace hitop
