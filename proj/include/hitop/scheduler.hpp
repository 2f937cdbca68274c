#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "hitop/engine.hpp"

namespace hitop {

struct GemmShape {
    std::size_t rows = 0;  // logical M
    std::size_t inner = 0; // logical K
    std::size_t cols = 0;  // logical N

    void validate() const {
        if (rows < 1 || inner < 1 || cols < 1)
            throw DataError("gemm shape: all dimensions must be >= 1");
    }
    std::size_t op_count() const { return 2 * rows * inner * cols; }
};

struct IndexRange {
    std::size_t begin = 0, end = 0; // half-open [begin, end)
    std::size_t size() const { return end - begin; }
};

enum class SignPhase : std::uint8_t { plus, minus };

struct PassPlan {
    std::size_t pass_id = 0;
    IndexRange rows, inner, cols;
    SignPhase sign = SignPhase::plus;
};

// Decomposition of a logical GEMM into hardware-sized passes. Pass order is
// row blocks, then column blocks, then inner chunks, with the minus phase
// (when present) directly after its plus twin.
struct TileSchedule {
    GemmShape shape;
    bool input_signed = false;
    std::size_t row_blocks = 0, inner_chunks = 0, col_blocks = 0;
    std::vector<PassPlan> passes;

    // Fraction of hardware (m, n, k) slots that carry padding rather than
    // logical operands, for the hardware dims the schedule was planned on.
    double padding_fraction = 0.0;
};

TileSchedule plan_tiles(const GemmShape& shape, const HardwareConfig& config, bool input_signed);

// X = plus - minus with both parts elementwise nonnegative and disjoint
// supports.
std::pair<Matrix, Matrix> split_signed_input(const Matrix& x);

enum class BlockKind { input, weight };

// Rescale a block into the encodable range ([0,1] for inputs, [-1,1] for
// weights). The scale factor is the smallest power of two >= max-abs, so
// scaling and unscaling are exact in floating point. Returns (scaled
// block, scale); an all-zero block is returned unchanged with scale 1.
std::pair<Matrix, double> normalize_for_hardware(const Matrix& block, BlockKind kind);

struct PassRecord {
    std::size_t pass_id = 0;
    std::size_t saturated = 0;
    double micros = 0.0; // wall time; kept out of persisted reports
};

struct RunLog {
    std::size_t pass_count = 0;
    std::size_t saturation_events = 0;
    std::vector<PassRecord> passes; // indexed by pass_id

    void merge(const RunLog& other) {
        pass_count += other.pass_count;
        saturation_events += other.saturation_events;
        passes.insert(passes.end(), other.passes.begin(), other.passes.end());
    }
};

struct ScheduleResult {
    Matrix y;
    RunLog log;
};

// Run every pass of the schedule through the engine and accumulate the
// digital partial sums. Passes may execute on several threads; the
// reduction is a fixed-order sum over pass_id, so the result is
// bit-identical for any thread count.
ScheduleResult execute_schedule(const Matrix& x, const Matrix& w, const TileSchedule& schedule,
                                const HardwareConfig& config, const DeviceSet& devices,
                                const PassOptions& options, unsigned threads = 1);

// Plan + execute in one call.
ScheduleResult run_gemm(const Matrix& x, const Matrix& w, const HardwareConfig& config,
                        const DeviceSet& devices, const PassOptions& options,
                        unsigned threads = 1);

} // namespace hitop
