#include "hitop/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <string>

namespace hitop {

namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

// Smallest power of two >= v (v > 0).
double pow2_ceil(double v) {
    int e = 0;
    double f = std::frexp(v, &e); // v = f * 2^e, f in [0.5, 1)
    return f == 0.5 ? std::ldexp(1.0, e - 1) : std::ldexp(1.0, e);
}

} // namespace

TileSchedule plan_tiles(const GemmShape& shape, const HardwareConfig& config, bool input_signed) {
    shape.validate();
    config.validate();

    TileSchedule s;
    s.shape = shape;
    s.input_signed = input_signed;
    s.row_blocks = ceil_div(shape.rows, config.m_wavelengths);
    s.col_blocks = ceil_div(shape.cols, config.n_spatial);
    s.inner_chunks = ceil_div(shape.inner, config.k_window);

    std::size_t pass_id = 0;
    for (std::size_t rb = 0; rb < s.row_blocks; ++rb) {
        IndexRange rows{rb * config.m_wavelengths,
                        std::min(shape.rows, (rb + 1) * config.m_wavelengths)};
        for (std::size_t cb = 0; cb < s.col_blocks; ++cb) {
            IndexRange cols{cb * config.n_spatial,
                            std::min(shape.cols, (cb + 1) * config.n_spatial)};
            for (std::size_t ic = 0; ic < s.inner_chunks; ++ic) {
                IndexRange inner{ic * config.k_window,
                                 std::min(shape.inner, (ic + 1) * config.k_window)};
                s.passes.push_back({pass_id++, rows, inner, cols, SignPhase::plus});
                if (input_signed)
                    s.passes.push_back({pass_id++, rows, inner, cols, SignPhase::minus});
            }
        }
    }

    double hardware_slots = double(s.passes.size()) * double(config.m_wavelengths) *
                            double(config.n_spatial) * double(config.k_window);
    double logical_slots = double(input_signed ? 2 : 1) * double(shape.rows) *
                           double(shape.inner) * double(shape.cols);
    s.padding_fraction = hardware_slots > 0.0 ? 1.0 - logical_slots / hardware_slots : 0.0;
    return s;
}

std::pair<Matrix, Matrix> split_signed_input(const Matrix& x) {
    Matrix plus(x.rows(), x.cols()), minus(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double v = x.values()[i];
        if (v >= 0.0)
            plus.values()[i] = v;
        else
            minus.values()[i] = -v;
    }
    return {std::move(plus), std::move(minus)};
}

std::pair<Matrix, double> normalize_for_hardware(const Matrix& block, BlockKind kind) {
    if (!all_finite(block)) throw DataError("normalize_for_hardware: non-finite entries");
    double peak = max_abs(block);
    if (kind == BlockKind::input) {
        for (double v : block.values())
            if (v < 0.0) throw DataError("normalize_for_hardware: negative input entry; "
                                         "split signed inputs first");
    }
    if (peak == 0.0) return {block, 1.0};
    double scale = pow2_ceil(peak);
    Matrix scaled = block;
    for (double& v : scaled.values()) v /= scale;
    return {std::move(scaled), scale};
}

namespace {

struct PassOutput {
    Matrix contribution; // scaled tile values, ready to accumulate
    IndexRange rows, cols;
    double sign = 1.0;
    std::size_t saturated = 0;
    double micros = 0.0;
};

PassOutput run_one_pass(const PassPlan& plan, const Matrix& x_plus, const Matrix& x_minus,
                        const Matrix& w, const HardwareConfig& config, const DeviceSet& devices,
                        const PassOptions& options) {
    auto t0 = std::chrono::steady_clock::now();

    const Matrix& x_src = plan.sign == SignPhase::plus ? x_plus : x_minus;
    Matrix x_block = x_src.block(plan.rows.begin, plan.rows.end, plan.inner.begin, plan.inner.end);
    Matrix w_block = w.block(plan.inner.begin, plan.inner.end, plan.cols.begin, plan.cols.end);

    auto [x_scaled, x_scale] = normalize_for_hardware(x_block, BlockKind::input);
    auto [w_scaled, w_scale] = normalize_for_hardware(w_block, BlockKind::weight);

    OutputTile tile = simulate_pass(x_scaled, w_scaled, config, devices, plan.pass_id, options);

    PassOutput out;
    out.rows = plan.rows;
    out.cols = plan.cols;
    out.sign = plan.sign == SignPhase::plus ? 1.0 : -1.0;
    out.saturated = tile.saturation_count();
    out.contribution = std::move(tile.values);
    double undo = x_scale * w_scale; // powers of two: exact rescale
    for (double& v : out.contribution.values()) v *= undo;

    auto t1 = std::chrono::steady_clock::now();
    out.micros = std::chrono::duration<double, std::micro>(t1 - t0).count();
    return out;
}

} // namespace

ScheduleResult execute_schedule(const Matrix& x, const Matrix& w, const TileSchedule& schedule,
                                const HardwareConfig& config, const DeviceSet& devices,
                                const PassOptions& options, unsigned threads) {
    if (x.rows() != schedule.shape.rows || x.cols() != schedule.shape.inner ||
        w.rows() != schedule.shape.inner || w.cols() != schedule.shape.cols)
        throw DataError("execute_schedule: operands do not match the planned shape");
    if (!all_finite(x) || !all_finite(w))
        throw DataError("execute_schedule: non-finite entries in operands");

    bool has_negative = std::any_of(x.values().begin(), x.values().end(),
                                    [](double v) { return v < 0.0; });
    if (has_negative && !schedule.input_signed)
        throw DataError("execute_schedule: negative inputs but schedule was planned unsigned");

    auto [x_plus, x_minus] = split_signed_input(x);

    const std::size_t n_passes = schedule.passes.size();
    std::vector<PassOutput> outputs(n_passes);

    auto run_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            outputs[i] = run_one_pass(schedule.passes[i], x_plus, x_minus, w, config, devices,
                                      options);
    };

    if (threads <= 1 || n_passes <= 1) {
        run_range(0, n_passes);
    } else {
        unsigned workers = std::min<unsigned>(threads, unsigned(n_passes));
        std::vector<std::future<void>> futures;
        std::size_t chunk = ceil_div(n_passes, workers);
        for (unsigned t = 0; t < workers; ++t) {
            std::size_t begin = t * chunk;
            std::size_t end = std::min(n_passes, begin + chunk);
            if (begin >= end) break;
            futures.push_back(std::async(std::launch::async, run_range, begin, end));
        }
        for (auto& f : futures) f.get();
    }

    // Fixed-order reduction over pass_id: neither execution order nor the
    // ordering of the pass list can change Y.
    std::vector<std::size_t> order(n_passes);
    for (std::size_t i = 0; i < n_passes; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return schedule.passes[a].pass_id < schedule.passes[b].pass_id;
    });

    ScheduleResult result;
    result.y = Matrix(schedule.shape.rows, schedule.shape.cols);
    result.log.pass_count = n_passes;
    result.log.passes.resize(n_passes);
    for (std::size_t rank = 0; rank < n_passes; ++rank) {
        std::size_t i = order[rank];
        const PassOutput& po = outputs[i];
        for (std::size_t r = 0; r < po.rows.size(); ++r)
            for (std::size_t c = 0; c < po.cols.size(); ++c)
                result.y(po.rows.begin + r, po.cols.begin + c) +=
                    po.sign * po.contribution(r, c);
        result.log.passes[rank] = {schedule.passes[i].pass_id, po.saturated, po.micros};
        result.log.saturation_events += po.saturated;
    }
    return result;
}

ScheduleResult run_gemm(const Matrix& x, const Matrix& w, const HardwareConfig& config,
                        const DeviceSet& devices, const PassOptions& options, unsigned threads) {
    bool has_negative = std::any_of(x.values().begin(), x.values().end(),
                                    [](double v) { return v < 0.0; });
    GemmShape shape{x.rows(), x.cols(), w.cols()};
    TileSchedule schedule = plan_tiles(shape, config, has_negative);
    return execute_schedule(x, w, schedule, config, devices, options, threads);
}

} // namespace hitop
