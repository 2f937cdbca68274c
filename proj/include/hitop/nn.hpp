#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hitop/scheduler.hpp"

namespace hitop {

enum class Activation : std::uint8_t { none = 0, relu = 1 };

struct LayerSpec {
    Matrix weights; // inner x cols
    Activation activation = Activation::none;
};

// Ordered MLP layers; layer i maps a length-rows(i) activation vector to
// length-cols(i), and consecutive layers chain dimensionally.
struct NetworkModel {
    std::vector<LayerSpec> layers;
    std::size_t input_dim = 0;

    void validate() const;
    std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().weights.cols(); }
};

struct Dataset {
    Matrix images; // batch x input_dim, values in [0,1]
    std::vector<int> labels;
    int class_count = 0;

    void validate() const;
    std::size_t size() const { return labels.size(); }
};

std::size_t count_parameters(const NetworkModel& model);
std::size_t count_operations(const NetworkModel& model, std::size_t image_count);

// Inline ReLU via the lasing threshold: activations map to drive currents
// around threshold, so a <= 0 emits no light. Returns the normalized
// nonnegative amplitudes (peak scaled to 1) and the positive scale that
// undoes the normalization digitally; reconstructed = amplitude * scale
// = max(0, a). An all-nonpositive vector returns zeros with scale 1.
std::pair<std::vector<double>, double> relu_threshold_encode(std::span<const double> activations,
                                                             const VcselParams& vcsel);

// Argmax with ties broken toward the lowest index.
int classify(std::span<const double> logits);

struct ConfusionResult {
    std::vector<std::vector<long>> counts; // counts[true][pred]
    double accuracy = 0.0;
};

ConfusionResult confusion_matrix(std::span<const int> predictions, std::span<const int> labels,
                                 int class_count);

enum class InferenceMode { digital, analog };

struct InferenceResult {
    Matrix logits; // batch x classes, un-activated
    std::vector<int> predictions;
    RunLog log;
};

// Layer-by-layer inference. Digital mode is the exact float reference;
// analog mode runs every GEMM through the tile scheduler with batch rows
// mapped onto wavelengths and ReLU realized by the next layer's threshold
// encoding. Per-image normalization scales are undone at the logits.
InferenceResult run_inference(const NetworkModel& model, const Matrix& batch,
                              const HardwareConfig& config, const DeviceSet& devices,
                              InferenceMode mode, const PassOptions& options,
                              unsigned threads = 1);

} // namespace hitop
