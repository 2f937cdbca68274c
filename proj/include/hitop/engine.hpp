#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hitop/devices.hpp"
#include "hitop/matrix.hpp"

namespace hitop {

// Hardware dimensions of one processor: M wavelengths x N spatial modes,
// clocked at R GS/s, integrating up to k_window steps per readout.
struct HardwareConfig {
    std::size_t m_wavelengths = 7;
    std::size_t n_spatial = 7;
    double clock_rate_gsps = 10.0;
    std::size_t k_window = 784;
    double wdm_channel_spacing_ghz = 100.0;
    std::optional<Matrix> crosstalk; // M x M row-stochastic leakage; identity when absent
    std::uint64_t master_seed = 1;
    std::string noise_preset = "paper-slow";

    void validate() const;
    double dt_ns() const { return 1.0 / clock_rate_gsps; }
};

struct DeviceSet {
    VcselParams vcsel;
    MzmParams mzm;
    DetectorParams detector;

    void validate() const {
        vcsel.validate();
        mzm.validate();
        detector.validate();
    }
};

// Per-pass switches. Quantization models the 8-bit DACs; noise applies the
// device encoding sigmas plus the receiver read noise.
struct PassOptions {
    bool noise = true;
    bool quantization = true;
};

// Result of one hardware pass, normalized so the ideal value of element
// (m, n) is sum_k X(m,k) * W(k,n).
struct OutputTile {
    Matrix values;
    std::vector<std::uint8_t> saturated; // row-major M x N flags

    std::size_t saturation_count() const {
        std::size_t c = 0;
        for (auto f : saturated) c += f;
        return c;
    }
};

// Voltage produced by one unit of ideal product (x=w=1) in a single time
// step; the engine divides integrated voltages by this to normalize.
double unit_product_volts(const HardwareConfig& config, const DeviceSet& devices);

// Input tile (M x K, entries in [0,1]) -> per-wavelength drive currents (mA).
// Rows are wavelengths, columns are time steps.
Matrix encode_input_tile(const Matrix& x, const HardwareConfig& config,
                         const VcselParams& vcsel, std::uint64_t pass_id,
                         const PassOptions& options);

// Weight tile (K x N, entries in [-1,1]) -> per-spatial-mode drive voltages.
Matrix encode_weight_tile(const Matrix& w, const HardwareConfig& config, const MzmParams& mzm,
                          std::uint64_t pass_id, const PassOptions& options);

// One pass of the cascaded-modulation pipeline: VCSEL encode on
// wavelength x time, optional crosstalk mixing, 1/N spatial fanout, MZM
// weighting on time x space, balanced detection and K-step integration.
OutputTile simulate_pass(const Matrix& x, const Matrix& w, const HardwareConfig& config,
                         const DeviceSet& devices, std::uint64_t pass_id,
                         const PassOptions& options);

// Ground-truth reference: deliberately naive triple-loop product.
Matrix oracle_matmul(const Matrix& x, const Matrix& w);

// Analog precision metric: -log2 of the relative error standard deviation.
double effective_bits(double relative_error_sigma);

} // namespace hitop
