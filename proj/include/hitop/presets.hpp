#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hitop/engine.hpp"

namespace hitop {

// Named noise operating points. `paper-slow` is the 100 MS/s operating
// point (0.3% input / 0.4% weight encoding error, 1.5% scalar product
// error overall); `paper-fast` is the 10 GS/s point (~3% product error,
// ~5 effective bits). `off` disables all stochastic terms.
struct NoisePreset {
    std::string name;
    double input_sigma = 0.0;   // fraction of input full scale, per symbol
    double weight_sigma = 0.0;  // fraction of weight full scale, per symbol
    double readout_sigma = 0.0; // fraction of one unit product, per readout
    double nominal_clock_gsps = 10.0;
};

NoisePreset noise_preset(std::string_view name);
std::vector<std::string> noise_preset_names();

// Device set matching the demonstrated platform: 1550 nm VCSELs
// (i_th = 2 mA, 650 ohm, 1.3 V bias, WPE 20%) and 2-cm TFLN MZMs
// (V_pi = 1.3 V, 0.6 Vpp drive at 50 ohm). Detector gain, full scale and
// read noise are derived from the hardware config so that the normalized
// readout noise equals the preset's readout_sigma and the integrator
// never clips at 2x the worst-case in-window signal.
DeviceSet make_paper_devices(const HardwareConfig& config);
DeviceSet make_paper_devices(const HardwareConfig& config, const NoisePreset& preset);

} // namespace hitop
