#include "hitop/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hitop {

void NetworkModel::validate() const {
    if (layers.empty()) throw DataError("network model: no layers");
    if (input_dim == 0) throw DataError("network model: input_dim must be >= 1");
    if (layers.front().weights.rows() != input_dim)
        throw DataError("network model: first layer expects " +
                        std::to_string(layers.front().weights.rows()) +
                        " inputs but input_dim is " + std::to_string(input_dim));
    for (std::size_t i = 0; i + 1 < layers.size(); ++i) {
        if (layers[i].weights.cols() != layers[i + 1].weights.rows())
            throw DataError("network model: layer " + std::to_string(i) + " outputs " +
                            std::to_string(layers[i].weights.cols()) + " but layer " +
                            std::to_string(i + 1) + " expects " +
                            std::to_string(layers[i + 1].weights.rows()));
    }
    for (const auto& l : layers)
        if (!all_finite(l.weights)) throw DataError("network model: non-finite weights");
}

void Dataset::validate() const {
    if (class_count < 1) throw DataError("dataset: class_count must be >= 1");
    if (images.rows() != labels.size())
        throw DataError("dataset: image count " + std::to_string(images.rows()) +
                        " != label count " + std::to_string(labels.size()));
    for (int l : labels)
        if (l < 0 || l >= class_count)
            throw DataError("dataset: label " + std::to_string(l) + " outside [0, " +
                            std::to_string(class_count) + ")");
    for (double v : images.values())
        if (!(v >= 0.0 && v <= 1.0)) throw DataError("dataset: pixel outside [0, 1]");
}

std::size_t count_parameters(const NetworkModel& model) {
    std::size_t total = 0;
    for (const auto& l : model.layers) total += l.weights.rows() * l.weights.cols();
    return total;
}

std::size_t count_operations(const NetworkModel& model, std::size_t image_count) {
    return 2 * count_parameters(model) * image_count;
}

std::pair<std::vector<double>, double> relu_threshold_encode(std::span<const double> activations,
                                                             const VcselParams& vcsel) {
    double peak = 0.0;
    for (double a : activations) peak = std::max(peak, a);
    std::vector<double> amplitudes(activations.size(), 0.0);
    if (peak <= 0.0) return {std::move(amplitudes), 1.0};

    // Drive the next-layer VCSEL below/above threshold in proportion to the
    // activation; the laser's own threshold performs max(0, .).
    const double range = vcsel.modulation_range_ma();
    for (std::size_t i = 0; i < activations.size(); ++i) {
        double drive = vcsel.threshold_current_ma + activations[i] / peak * range;
        amplitudes[i] = vcsel_power_mw(std::max(0.0, drive), vcsel) / vcsel.max_power_mw;
    }
    return {std::move(amplitudes), peak};
}

int classify(std::span<const double> logits) {
    if (logits.empty()) throw DataError("classify: empty logits");
    std::size_t best = 0;
    for (std::size_t i = 1; i < logits.size(); ++i)
        if (logits[i] > logits[best]) best = i;
    return int(best);
}

ConfusionResult confusion_matrix(std::span<const int> predictions, std::span<const int> labels,
                                 int class_count) {
    if (predictions.size() != labels.size())
        throw DataError("confusion_matrix: predictions and labels differ in length");
    ConfusionResult r;
    r.counts.assign(class_count, std::vector<long>(class_count, 0));
    long correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        int t = labels[i], p = predictions[i];
        if (t < 0 || t >= class_count)
            throw DataError("confusion_matrix: label " + std::to_string(t) + " out of range");
        if (p < 0 || p >= class_count)
            throw DataError("confusion_matrix: prediction " + std::to_string(p) +
                            " out of range");
        r.counts[t][p] += 1;
        if (t == p) ++correct;
    }
    r.accuracy = labels.empty() ? 0.0 : double(correct) / double(labels.size());
    return r;
}

namespace {

Matrix digital_forward(const NetworkModel& model, const Matrix& batch) {
    Matrix a = batch;
    for (std::size_t li = 0; li < model.layers.size(); ++li) {
        a = oracle_matmul(a, model.layers[li].weights);
        bool last = li + 1 == model.layers.size();
        if (!last && model.layers[li].activation == Activation::relu)
            for (double& v : a.values()) v = std::max(0.0, v);
    }
    return a;
}

Matrix analog_forward(const NetworkModel& model, const Matrix& batch,
                      const HardwareConfig& config, const DeviceSet& devices,
                      const PassOptions& options, unsigned threads, RunLog& log) {
    Matrix a = batch;
    std::vector<double> undo(batch.rows(), 1.0);
    std::uint64_t pass_base = 0;

    for (std::size_t li = 0; li < model.layers.size(); ++li) {
        const Matrix& w = model.layers[li].weights;
        bool has_negative = std::any_of(a.values().begin(), a.values().end(),
                                        [](double v) { return v < 0.0; });
        GemmShape shape{a.rows(), a.cols(), w.cols()};
        TileSchedule schedule = plan_tiles(shape, config, has_negative);
        // Distinct pass ids across layers keep every noise stream independent.
        for (auto& p : schedule.passes) p.pass_id += pass_base;
        pass_base += schedule.passes.size();

        ScheduleResult r = execute_schedule(a, w, schedule, config, devices, options, threads);
        log.merge(r.log);
        a = std::move(r.y);

        bool last = li + 1 == model.layers.size();
        if (!last && model.layers[li].activation == Activation::relu) {
            for (std::size_t row = 0; row < a.rows(); ++row) {
                std::span<const double> act(a.data() + row * a.cols(), a.cols());
                auto [amps, scale] = relu_threshold_encode(act, devices.vcsel);
                for (std::size_t j = 0; j < a.cols(); ++j) a(row, j) = amps[j];
                undo[row] *= scale;
            }
        }
    }
    for (std::size_t row = 0; row < a.rows(); ++row)
        for (std::size_t j = 0; j < a.cols(); ++j) a(row, j) *= undo[row];
    return a;
}

} // namespace

InferenceResult run_inference(const NetworkModel& model, const Matrix& batch,
                              const HardwareConfig& config, const DeviceSet& devices,
                              InferenceMode mode, const PassOptions& options, unsigned threads) {
    model.validate();
    if (batch.cols() != model.input_dim)
        throw DataError("run_inference: batch width " + std::to_string(batch.cols()) +
                        " != model input_dim " + std::to_string(model.input_dim));

    InferenceResult result;
    if (mode == InferenceMode::digital)
        result.logits = digital_forward(model, batch);
    else
        result.logits = analog_forward(model, batch, config, devices, options, threads,
                                       result.log);

    result.predictions.resize(batch.rows());
    for (std::size_t i = 0; i < batch.rows(); ++i) {
        std::span<const double> row(result.logits.data() + i * result.logits.cols(),
                                    result.logits.cols());
        result.predictions[i] = classify(row);
    }
    return result;
}

} // namespace hitop
