#pragma once

#include <map>
#include <optional>
#include <string>

#include "hitop/metrics.hpp"
#include "hitop/presets.hpp"

namespace hitop {

struct FetchEntry {
    std::string url;
    std::string sha256; // empty skips verification
    std::string filename;
};

struct RunPaths {
    std::string dataset_dir;
    std::string dataset_stem = "t10k";
    std::string weights_file;
    std::string output_dir = "out";
};

struct RunSection {
    std::string mode = "analog"; // analog | digital | both
    std::size_t batch_limit = 0; // 0 = whole dataset
    bool noise = true;
    bool quantization = true;
    unsigned threads = 1;
    std::string output_format = "csv"; // csv | json
    int label_base = 0;
    int class_count = 0; // 0 = infer from weights
    bool fit_gain = false;
};

// Energy-ledger selection: one of the named presets, or `custom` rows
// declared in the config file as row.<name>.energy_per_use_j /
// row.<name>.parallelism.
struct EnergyConfig {
    std::string preset = "paper-current";
    std::vector<ComponentBudget> custom_rows;
    double tile_switch_ns = 0.0;
};

// Everything a CLI run needs: hardware dims, device models, paths and run
// switches. Flags override file values; devices are finalized only after
// all overrides are in (finalize()).
struct RunConfig {
    HardwareConfig hardware;
    std::string device_preset = "paper";
    AreaModel area;
    RunPaths paths;
    RunSection run;
    EnergyConfig energy;
    std::map<std::string, FetchEntry> fetch; // keyed by dataset name
    std::string crosstalk_file;

    // Raw [devices] overrides (dotted keys), applied on top of the preset.
    std::map<std::string, double> device_overrides;

    DeviceSet devices;

    void finalize(); // builds devices, loads crosstalk, validates everything

    // The ledger selected by energy.preset (custom rows when `custom`).
    std::vector<ComponentBudget> energy_budget() const;
};

RunConfig default_run_config();

// Parses the INI-style config file ([section] + key = value lines, '#'
// comments). Unknown keys and malformed values raise ConfigError naming
// the key.
RunConfig load_run_config(const std::string& path);

} // namespace hitop
