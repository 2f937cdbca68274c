#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hitop/matrix.hpp"
#include "hitop/nn.hpp"

namespace hitop {

// ---- IDX datasets (MNIST family) -------------------------------------

// Parses an IDX image file (big-endian magic 0x00000803) into a
// batch x (rows*cols) matrix with pixels scaled to [0,1].
Matrix load_idx_images(const std::string& path);

// Parses an IDX label file (magic 0x00000801). label_base is subtracted
// from every stored label (EMNIST letters are 1-based).
std::vector<int> load_idx_labels(const std::string& path, int label_base = 0);

// Loads <dir>/<stem>-images-idx3-ubyte and <dir>/<stem>-labels-idx1-ubyte
// (plain or .gz) into a Dataset.
Dataset load_dataset(const std::string& dir, const std::string& stem, int class_count,
                     int label_base = 0);

// ---- HTWT weight files ------------------------------------------------
// magic "HTWT", u16 version, u16 layer count, then per layer:
// u32 rows, u32 cols, u8 activation (0 none, 1 relu), rows*cols f32 LE.

NetworkModel load_weights(const std::string& path);
void save_weights(const std::string& path, const NetworkModel& model);

// ---- HTMX matrices and CSV ---------------------------------------------
// magic "HTMX", u32 rows, u32 cols, rows*cols f32 LE row-major.

// Sniffs the magic; falls back to CSV for anything else.
Matrix load_matrix(const std::string& path);
Matrix load_matrix_csv(const std::string& path);
void save_matrix_htmx(const std::string& path, const Matrix& m);
void save_matrix_csv(const std::string& path, const Matrix& m);

// ---- Misc ---------------------------------------------------------------

std::vector<std::uint8_t> read_file(const std::string& path);

// Write-to-temp + atomic rename; a failed writer never leaves a partial
// output file behind.
void atomic_write_file(const std::string& path, std::span<const std::uint8_t> bytes);
void atomic_write_file(const std::string& path, const std::string& text);

std::string sha256_hex(std::span<const std::uint8_t> bytes);
bool is_gzip(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> gunzip(std::span<const std::uint8_t> bytes);

// Shortest decimal form that round-trips a double; used everywhere a
// report prints floats so outputs are byte-stable.
std::string format_double(double v);

} // namespace hitop
