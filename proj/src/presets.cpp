#include "hitop/presets.hpp"

namespace hitop {

// Residual readout sigmas are sized so the 1000-pair scalar benchmark
// (x ~ U[0,1], w ~ U[-1,1], 8-bit DACs) lands at 1.5% / 3.0% total error:
// sigma_det^2 = sigma_total^2 - (sigma_x^2 + q_x^2 + sigma_w^2 + q_w^2)/3
// with q_x = (1/255)/sqrt(12), q_w = (1/127)/sqrt(12).
NoisePreset noise_preset(std::string_view name) {
    if (name == "paper-slow" || name == "slow")
        return {"paper-slow", 0.003, 0.004, 0.0146465, 0.1};
    if (name == "paper-fast" || name == "fast")
        return {"paper-fast", 0.006, 0.008, 0.0294027, 10.0};
    if (name == "off" || name == "none")
        return {"off", 0.0, 0.0, 0.0, 10.0};
    throw ConfigError("hardware.noise_preset: unknown preset '" + std::string(name) +
                      "' (expected paper-slow, paper-fast or off)");
}

std::vector<std::string> noise_preset_names() {
    return {"paper-slow", "paper-fast", "off"};
}

DeviceSet make_paper_devices(const HardwareConfig& config) {
    return make_paper_devices(config, noise_preset(config.noise_preset));
}

DeviceSet make_paper_devices(const HardwareConfig& config, const NoisePreset& preset) {
    DeviceSet d;
    d.vcsel = VcselParams{
        .threshold_current_ma = 2.0,
        .slope_efficiency_mw_per_ma = 0.5,
        .series_resistance_ohm = 650.0,
        .bias_voltage_v = 1.3,
        .max_power_mw = 2.0,
        .wall_plug_efficiency = 0.2,
        .encoding_noise_sigma = preset.input_sigma,
        .center_wavelength_nm = 1550.0,
    };
    d.mzm = MzmParams{
        .v_pi_v = 1.3,
        .bias_offset_v = 0.0,
        .drive_vpp_v = 0.6,
        .insertion_loss_db = 0.0,
        .encoding_noise_sigma = preset.weight_sigma,
        .termination_ohm = 50.0,
    };
    d.detector = DetectorParams{
        .responsivity_a_per_w = 1.0,
        .integrator_gain_v_per_pc = 1.0,
        .read_noise_sigma_v = 0.0,
        .full_scale_voltage_v = 1.0,
        .max_integration_steps = config.k_window,
    };
    // Scale the receiver to the configured window: read noise in volts so
    // its normalized value equals the preset sigma, full scale at 2x the
    // largest ideal in-window accumulation.
    double unit_v = unit_product_volts(config, d);
    d.detector.read_noise_sigma_v = preset.readout_sigma * unit_v;
    d.detector.full_scale_voltage_v = 2.0 * double(config.k_window) * unit_v;
    d.validate();
    return d;
}

} // namespace hitop
