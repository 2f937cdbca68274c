#include "hitop/devices.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace hitop {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

} // namespace

void VcselParams::validate() const {
    require(threshold_current_ma > 0.0, "vcsel.threshold_current_ma: must be > 0");
    require(slope_efficiency_mw_per_ma > 0.0, "vcsel.slope_efficiency_mw_per_ma: must be > 0");
    require(max_power_mw > 0.0, "vcsel.max_power_mw: must be > 0");
    require(encoding_noise_sigma >= 0.0 && encoding_noise_sigma < 1.0,
            "vcsel.encoding_noise_sigma: must be in [0, 1)");
    require(wall_plug_efficiency > 0.0 && wall_plug_efficiency <= 1.0,
            "vcsel.wall_plug_efficiency: must be in (0, 1]");
    require(series_resistance_ohm > 0.0, "vcsel.series_resistance_ohm: must be > 0");
}

void MzmParams::validate() const {
    require(v_pi_v > 0.0, "mzm.v_pi_v: must be > 0");
    require(drive_vpp_v > 0.0, "mzm.drive_vpp_v: must be > 0");
    // Quasi-linear operating region: full-scale swing bounded by V_pi.
    require(drive_vpp_v <= v_pi_v, "mzm.drive_vpp_v: must be <= mzm.v_pi_v");
    require(encoding_noise_sigma >= 0.0 && encoding_noise_sigma < 1.0,
            "mzm.encoding_noise_sigma: must be in [0, 1)");
    require(insertion_loss_db >= 0.0, "mzm.insertion_loss_db: must be >= 0");
    require(termination_ohm > 0.0, "mzm.termination_ohm: must be > 0");
}

double MzmParams::loss_factor() const {
    return std::pow(10.0, -insertion_loss_db / 10.0);
}

void DetectorParams::validate() const {
    require(responsivity_a_per_w > 0.0, "detector.responsivity_a_per_w: must be > 0");
    require(integrator_gain_v_per_pc > 0.0, "detector.integrator_gain_v_per_pc: must be > 0");
    require(max_integration_steps >= 1, "detector.max_integration_steps: must be >= 1");
    require(read_noise_sigma_v >= 0.0, "detector.read_noise_sigma_v: must be >= 0");
    require(full_scale_voltage_v > 0.0, "detector.full_scale_voltage_v: must be > 0");
}

double vcsel_power_mw(double drive_current_ma, const VcselParams& params) {
    double above = drive_current_ma - params.threshold_current_ma;
    if (above <= 0.0) return 0.0;
    return std::min(params.max_power_mw, params.slope_efficiency_mw_per_ma * above);
}

std::pair<double, double> mzm_dual_output_mw(double drive_voltage_v, double input_power_mw,
                                             const MzmParams& params) {
    double phi = std::numbers::pi * (drive_voltage_v + params.bias_offset_v) / params.v_pi_v;
    double s = std::sin(phi);
    double total = params.loss_factor() * input_power_mw;
    // Compute the brighter port and complement the other; subtracting the
    // larger half is exact (Sterbenz), so the ports always sum to the
    // transmitted power bit-exactly.
    if (s >= 0.0) {
        double port1 = total * (1.0 + s) / 2.0;
        return {port1, total - port1};
    }
    double port2 = total * (1.0 - s) / 2.0;
    return {total - port2, port2};
}

double mzm_predistort_v(double target_weight, const MzmParams& params) {
    if (std::fabs(target_weight) > 1.0 || !std::isfinite(target_weight))
        throw DataError("mzm_predistort: weight outside [-1, 1]; caller must pre-scale");
    return params.v_pi_v / std::numbers::pi * std::asin(target_weight) - params.bias_offset_v;
}

double apply_encoding_noise(double value, double sigma, NoiseStream& stream) {
    if (sigma < 0.0) throw ConfigError("encoding noise sigma: must be >= 0");
    if (sigma == 0.0) return value;
    return value + sigma * stream.normal();
}

double balanced_detect_ma(double port1_mw, double port2_mw, const DetectorParams& params) {
    // mW * A/W = mA
    return params.responsivity_a_per_w * (port1_mw - port2_mw);
}

IntegrationResult integrate_receiver(std::span<const double> currents_ma, double dt_ns,
                                     const DetectorParams& params, NoiseStream& stream) {
    if (currents_ma.size() > params.max_integration_steps)
        throw InternalError("integrate_receiver: window overflow (" +
                            std::to_string(currents_ma.size()) + " steps > max " +
                            std::to_string(params.max_integration_steps) + ")");
    double charge_pc = 0.0; // mA * ns = pC
    for (double i : currents_ma) charge_pc += i * dt_ns;
    double v = params.integrator_gain_v_per_pc * charge_pc;
    if (params.read_noise_sigma_v > 0.0) v += params.read_noise_sigma_v * stream.normal();
    IntegrationResult out;
    if (v > params.full_scale_voltage_v) {
        out.voltage_v = params.full_scale_voltage_v;
        out.saturated = true;
    } else if (v < -params.full_scale_voltage_v) {
        out.voltage_v = -params.full_scale_voltage_v;
        out.saturated = true;
    } else {
        out.voltage_v = v;
    }
    return out;
}

double quantize_input_8bit(double x) {
    return std::round(x * 255.0) / 255.0;
}

double quantize_weight_8bit(double w) {
    return std::round(w * 127.0) / 127.0;
}

} // namespace hitop
