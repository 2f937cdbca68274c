#pragma once

#include <span>
#include <utility>

#include "hitop/errors.hpp"
#include "hitop/rng.hpp"

namespace hitop {

// VCSEL transmitter. The lasing threshold doubles as an inline ReLU:
// drive at or below threshold emits nothing.
struct VcselParams {
    double threshold_current_ma = 2.0;
    double slope_efficiency_mw_per_ma = 0.5;
    double series_resistance_ohm = 650.0;
    double bias_voltage_v = 1.3;
    double max_power_mw = 2.0;
    double wall_plug_efficiency = 0.2;
    double encoding_noise_sigma = 0.0; // fraction of full scale
    double center_wavelength_nm = 1550.0;

    void validate() const;

    // Drive span above threshold that maps normalized amplitude [0,1]
    // onto [0, max_power].
    double modulation_range_ma() const { return max_power_mw / slope_efficiency_mw_per_ma; }
};

// Dual-output Mach-Zehnder intensity modulator biased at quadrature.
struct MzmParams {
    double v_pi_v = 1.3;
    double bias_offset_v = 0.0; // offset from quadrature
    double drive_vpp_v = 0.6;
    double insertion_loss_db = 0.0;
    double encoding_noise_sigma = 0.0; // fraction of full scale
    double termination_ohm = 50.0;

    void validate() const;

    double loss_factor() const; // linear transmission, 10^(-dB/10)
};

// Balanced photodetector pair feeding a charge-integrating receiver.
struct DetectorParams {
    double responsivity_a_per_w = 1.0;
    double integrator_gain_v_per_pc = 1.0;
    double read_noise_sigma_v = 0.0;
    double full_scale_voltage_v = 1.0;
    std::size_t max_integration_steps = 784;

    void validate() const;
};

// Emitted optical power for a drive current. Zero at or below threshold,
// linear above, hard-clipped at max_power.
double vcsel_power_mw(double drive_current_ma, const VcselParams& params);

// Dual-port intensity transfer about the quadrature bias. The two port
// powers always sum to loss_factor * input_power.
std::pair<double, double> mzm_dual_output_mw(double drive_voltage_v, double input_power_mw,
                                             const MzmParams& params);

// Inverse of the sinusoidal transfer: the drive voltage whose dual-port
// differential equals target_weight * loss * input_power.
double mzm_predistort_v(double target_weight, const MzmParams& params);

// Additive Gaussian perturbation on a normalized amplitude.
double apply_encoding_noise(double value, double sigma, NoiseStream& stream);

// Signed photocurrent from the port power difference.
double balanced_detect_ma(double port1_mw, double port2_mw, const DetectorParams& params);

struct IntegrationResult {
    double voltage_v = 0.0;
    bool saturated = false;
};

// Charge integration over a K-step window: gain * sum(i * dt) + read noise,
// clipped at +-full_scale. Throws InternalError if the window is longer than
// max_integration_steps (a scheduler bug, not a data error).
IntegrationResult integrate_receiver(std::span<const double> currents_ma, double dt_ns,
                                     const DetectorParams& params, NoiseStream& stream);

// 8-bit DAC grids. Inputs land on k/255 (k in [0,255]), weights on k/127
// (k in [-127,127]); zero and the range endpoints are exact codes.
double quantize_input_8bit(double x);
double quantize_weight_8bit(double w);

} // namespace hitop
