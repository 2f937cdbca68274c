#include "hitop/analysis.hpp"

#include <cmath>
#include <random>

namespace hitop {

ErrorStats compute_error_stats(const Matrix& actual, const Matrix& reference) {
    if (!actual.same_shape(reference))
        throw DataError("compute_error_stats: shape mismatch");
    ErrorStats s;
    s.full_scale = max_abs(reference);
    if (s.full_scale == 0.0) s.full_scale = 1.0;
    s.errors.resize(actual.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        s.errors[i] = (actual.values()[i] - reference.values()[i]) / s.full_scale;
        sum += s.errors[i];
    }
    s.mean = s.errors.empty() ? 0.0 : sum / double(s.errors.size());
    double var = 0.0;
    for (double e : s.errors) var += (e - s.mean) * (e - s.mean);
    if (s.errors.size() > 1) var /= double(s.errors.size() - 1);
    s.sigma = std::sqrt(var);
    s.rel_frobenius = relative_frobenius_error(actual, reference);
    if (s.sigma > 0.0) s.bits = effective_bits(s.sigma);
    return s;
}

double fit_gain(const Matrix& actual, const Matrix& reference) {
    if (!actual.same_shape(reference)) throw DataError("fit_gain: shape mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        num += actual.values()[i] * reference.values()[i];
        den += actual.values()[i] * actual.values()[i];
    }
    return den > 0.0 ? num / den : 1.0;
}

ScalarBenchResult scalar_multiplication_benchmark(std::size_t pairs,
                                                  const HardwareConfig& config,
                                                  const DeviceSet& devices,
                                                  const PassOptions& options,
                                                  std::uint64_t protocol_seed) {
    std::mt19937_64 rng(protocol_seed);
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    std::uniform_real_distribution<double> uw(-1.0, 1.0);

    Matrix actual(pairs, 1), reference(pairs, 1);
    Matrix x(1, 1), w(1, 1);
    for (std::size_t i = 0; i < pairs; ++i) {
        x(0, 0) = ux(rng);
        w(0, 0) = uw(rng);
        OutputTile tile = simulate_pass(x, w, config, devices, i, options);
        actual(i, 0) = tile.values(0, 0);
        reference(i, 0) = x(0, 0) * w(0, 0);
    }
    ScalarBenchResult r;
    r.stats = compute_error_stats(actual, reference);
    // Products of unit-range factors: report sigma relative to unit full
    // scale, as the accuracy protocol defines it.
    double rescale = r.stats.full_scale / 1.0;
    r.stats.sigma *= rescale;
    r.stats.mean *= rescale;
    r.stats.full_scale = 1.0;
    for (double& e : r.stats.errors) e *= rescale;
    r.stats.bits = r.stats.sigma > 0.0 ? std::optional<double>(effective_bits(r.stats.sigma))
                                       : std::nullopt;
    return r;
}

Histogram histogram(const std::vector<double>& values, std::size_t bins) {
    Histogram h;
    if (values.empty() || bins == 0) return h;
    double lo = values.front(), hi = values.front();
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    }
    double width = (hi - lo) / double(bins);
    h.bin_lo.resize(bins);
    h.bin_hi.resize(bins);
    h.counts.assign(bins, 0);
    for (std::size_t b = 0; b < bins; ++b) {
        h.bin_lo[b] = lo + width * double(b);
        h.bin_hi[b] = lo + width * double(b + 1);
    }
    for (double v : values) {
        auto b = std::size_t((v - lo) / width);
        if (b >= bins) b = bins - 1;
        h.counts[b] += 1;
    }
    return h;
}

} // namespace hitop
