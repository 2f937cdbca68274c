#pragma once

#include <optional>
#include <vector>

#include "hitop/presets.hpp"
#include "hitop/scheduler.hpp"

namespace hitop {

// Error statistics of a simulated result against its ground truth, with
// per-element errors normalized to the reference full scale (max |ref|).
struct ErrorStats {
    double full_scale = 1.0;
    double mean = 0.0;             // mean normalized error
    double sigma = 0.0;            // std of normalized error
    double rel_frobenius = 0.0;
    std::optional<double> bits;    // -log2(sigma) when sigma > 0
    std::vector<double> errors;    // normalized per-element errors
};

ErrorStats compute_error_stats(const Matrix& actual, const Matrix& reference);

// Least-squares scalar gain g minimizing ||g*actual - reference||^2; the
// software analogue of calibrating the receiver chain with a linear fit.
double fit_gain(const Matrix& actual, const Matrix& reference);

// The scalar-product accuracy protocol: `pairs` draws of x ~ U[0,1],
// w ~ U[-1,1], each multiplied in a single one-symbol hardware pass, with
// errors measured against the exact products.
struct ScalarBenchResult {
    ErrorStats stats;
};

ScalarBenchResult scalar_multiplication_benchmark(std::size_t pairs,
                                                  const HardwareConfig& config,
                                                  const DeviceSet& devices,
                                                  const PassOptions& options,
                                                  std::uint64_t protocol_seed = 2024);

// Equally spaced histogram of normalized errors, for CSV emission.
struct Histogram {
    std::vector<double> bin_lo, bin_hi;
    std::vector<std::size_t> counts;
};

Histogram histogram(const std::vector<double>& values, std::size_t bins);

} // namespace hitop
