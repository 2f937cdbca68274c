#include "hitop/engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hitop {

void HardwareConfig::validate() const {
    if (m_wavelengths < 1) throw ConfigError("hardware.m_wavelengths: must be >= 1");
    if (n_spatial < 1) throw ConfigError("hardware.n_spatial: must be >= 1");
    if (k_window < 1) throw ConfigError("hardware.k_window: must be >= 1");
    if (!(clock_rate_gsps > 0.0)) throw ConfigError("hardware.clock_rate_gsps: must be > 0");
    if (!(wdm_channel_spacing_ghz > 0.0))
        throw ConfigError("hardware.wdm_channel_spacing_ghz: must be > 0");
    if (crosstalk) {
        const Matrix& c = *crosstalk;
        if (c.rows() != m_wavelengths || c.cols() != m_wavelengths)
            throw ConfigError("hardware.crosstalk: must be m_wavelengths x m_wavelengths");
        for (std::size_t i = 0; i < c.rows(); ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < c.cols(); ++j) {
                if (c(i, j) < 0.0) throw ConfigError("hardware.crosstalk: entries must be >= 0");
                s += c(i, j);
            }
            if (std::fabs(s - 1.0) > 1e-9)
                throw ConfigError("hardware.crosstalk: row " + std::to_string(i) +
                                  " must sum to 1");
        }
    }
}

double unit_product_volts(const HardwareConfig& config, const DeviceSet& devices) {
    // Full chain for x = w = 1 over one time step: max emitted power, split
    // across N modes, modulator loss, detection and charge integration.
    double current_ma = devices.detector.responsivity_a_per_w * devices.mzm.loss_factor() *
                        devices.vcsel.max_power_mw / double(config.n_spatial);
    return devices.detector.integrator_gain_v_per_pc * current_ma * config.dt_ns();
}

Matrix encode_input_tile(const Matrix& x, const HardwareConfig& config,
                         const VcselParams& vcsel, std::uint64_t pass_id,
                         const PassOptions& options) {
    if (x.rows() > config.m_wavelengths)
        throw DataError("encode_input_tile: tile has more rows than wavelength channels");
    if (x.cols() > config.k_window)
        throw DataError("encode_input_tile: tile exceeds the integration window");
    const double range = vcsel.modulation_range_ma();
    Matrix drives(x.rows(), x.cols());
    for (std::size_t m = 0; m < x.rows(); ++m) {
        for (std::size_t k = 0; k < x.cols(); ++k) {
            double v = x(m, k);
            if (!(v >= 0.0 && v <= 1.0))
                throw DataError("encode_input_tile: entry (" + std::to_string(m) + "," +
                                std::to_string(k) + ") outside [0, 1]; pre-normalize");
            if (options.quantization) v = quantize_input_8bit(v);
            if (options.noise && vcsel.encoding_noise_sigma > 0.0) {
                NoiseStream s(config.master_seed,
                              {pass_id, kStreamVcsel, std::uint32_t(m), std::uint32_t(k)});
                v = apply_encoding_noise(v, vcsel.encoding_noise_sigma, s);
            }
            // Noise excursions below 0 drive under threshold (no light);
            // above 1 they clip at max power. Both are physical.
            double drive = vcsel.threshold_current_ma + v * range;
            drives(m, k) = std::max(0.0, drive);
        }
    }
    return drives;
}

Matrix encode_weight_tile(const Matrix& w, const HardwareConfig& config, const MzmParams& mzm,
                          std::uint64_t pass_id, const PassOptions& options) {
    if (w.cols() > config.n_spatial)
        throw DataError("encode_weight_tile: tile has more columns than spatial modes");
    if (w.rows() > config.k_window)
        throw DataError("encode_weight_tile: tile exceeds the integration window");
    Matrix drives(w.rows(), w.cols());
    for (std::size_t k = 0; k < w.rows(); ++k) {
        for (std::size_t n = 0; n < w.cols(); ++n) {
            double v = w(k, n);
            if (!(v >= -1.0 && v <= 1.0))
                throw DataError("encode_weight_tile: entry (" + std::to_string(k) + "," +
                                std::to_string(n) + ") outside [-1, 1]; pre-normalize");
            if (options.quantization) v = quantize_weight_8bit(v);
            if (options.noise && mzm.encoding_noise_sigma > 0.0) {
                NoiseStream s(config.master_seed,
                              {pass_id, kStreamMzm, std::uint32_t(n), std::uint32_t(k)});
                v = apply_encoding_noise(v, mzm.encoding_noise_sigma, s);
                v = std::clamp(v, -1.0, 1.0);
            }
            drives(k, n) = mzm_predistort_v(v, mzm);
        }
    }
    return drives;
}

OutputTile simulate_pass(const Matrix& x, const Matrix& w, const HardwareConfig& config,
                         const DeviceSet& devices, std::uint64_t pass_id,
                         const PassOptions& options) {
    if (x.cols() != w.rows())
        throw DataError("simulate_pass: inner dimensions disagree (" +
                        std::to_string(x.cols()) + " vs " + std::to_string(w.rows()) + ")");
    const std::size_t mt = x.rows(), nt = w.cols(), kt = x.cols();

    Matrix input_drives = encode_input_tile(x, config, devices.vcsel, pass_id, options);
    Matrix weight_drives = encode_weight_tile(w, config, devices.mzm, pass_id, options);

    // Emitted powers per (wavelength, time step).
    Matrix powers(mt, kt);
    for (std::size_t m = 0; m < mt; ++m)
        for (std::size_t k = 0; k < kt; ++k)
            powers(m, k) = vcsel_power_mw(input_drives(m, k), devices.vcsel);

    // Optional WDM leakage across wavelength channels, per time step.
    if (config.crosstalk) {
        const Matrix& c = *config.crosstalk;
        Matrix mixed(mt, kt);
        for (std::size_t k = 0; k < kt; ++k)
            for (std::size_t m = 0; m < mt; ++m) {
                double s = 0.0;
                for (std::size_t j = 0; j < mt; ++j) s += c(m, j) * powers(j, k);
                mixed(m, k) = s;
            }
        powers = std::move(mixed);
    }

    const double fanout = double(config.n_spatial);
    const double norm_v = unit_product_volts(config, devices);

    OutputTile out;
    out.values = Matrix(mt, nt);
    out.saturated.assign(mt * nt, 0);

    std::vector<double> currents(kt);
    for (std::size_t m = 0; m < mt; ++m) {
        for (std::size_t n = 0; n < nt; ++n) {
            for (std::size_t k = 0; k < kt; ++k) {
                auto [p1, p2] = mzm_dual_output_mw(weight_drives(k, n), powers(m, k) / fanout,
                                                   devices.mzm);
                currents[k] = balanced_detect_ma(p1, p2, devices.detector);
            }
            DetectorParams det = devices.detector;
            if (!options.noise) det.read_noise_sigma_v = 0.0;
            NoiseStream s(config.master_seed,
                          {pass_id, kStreamDetector, std::uint32_t(m), std::uint32_t(n)});
            IntegrationResult r = integrate_receiver(currents, config.dt_ns(), det, s);
            out.values(m, n) = r.voltage_v / norm_v;
            out.saturated[m * nt + n] = r.saturated ? 1 : 0;
        }
    }
    return out;
}

Matrix oracle_matmul(const Matrix& x, const Matrix& w) {
    if (x.cols() != w.rows())
        throw DataError("oracle_matmul: inner dimensions disagree (" + std::to_string(x.cols()) +
                        " vs " + std::to_string(w.rows()) + ")");
    Matrix y(x.rows(), w.cols());
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < w.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < x.cols(); ++k) acc += x(i, k) * w(k, j);
            y(i, j) = acc;
        }
    return y;
}

double effective_bits(double relative_error_sigma) {
    if (!(relative_error_sigma > 0.0))
        throw DataError("effective_bits: sigma must be > 0");
    return -std::log2(relative_error_sigma);
}

} // namespace hitop
