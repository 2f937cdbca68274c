#include "hitop/io.hpp"

#include <openssl/evp.h>
#include <zlib.h>

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace hitop {

namespace {

constexpr std::uint32_t kIdxImageMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelMagic = 0x00000801;
constexpr std::size_t kDimCap = 1u << 30; // guards against overflowing size math

class ByteReader {
public:
    ByteReader(std::span<const std::uint8_t> bytes, std::string name)
        : bytes_(bytes), name_(std::move(name)) {}

    std::size_t offset() const { return pos_; }

    std::uint8_t u8() {
        need(1);
        return bytes_[pos_++];
    }

    std::uint32_t u32_be() {
        need(4);
        std::uint32_t v = (std::uint32_t(bytes_[pos_]) << 24) |
                          (std::uint32_t(bytes_[pos_ + 1]) << 16) |
                          (std::uint32_t(bytes_[pos_ + 2]) << 8) | std::uint32_t(bytes_[pos_ + 3]);
        pos_ += 4;
        return v;
    }

    std::uint16_t u16_le() {
        need(2);
        std::uint16_t v = std::uint16_t(bytes_[pos_]) | (std::uint16_t(bytes_[pos_ + 1]) << 8);
        pos_ += 2;
        return v;
    }

    std::uint32_t u32_le() {
        need(4);
        std::uint32_t v = std::uint32_t(bytes_[pos_]) | (std::uint32_t(bytes_[pos_ + 1]) << 8) |
                          (std::uint32_t(bytes_[pos_ + 2]) << 16) |
                          (std::uint32_t(bytes_[pos_ + 3]) << 24);
        pos_ += 4;
        return v;
    }

    float f32_le() {
        std::uint32_t bits = u32_le();
        float f;
        std::memcpy(&f, &bits, sizeof(f));
        return f;
    }

    std::span<const std::uint8_t> raw(std::size_t n) {
        need(n);
        auto s = bytes_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    void expect_end() {
        if (pos_ != bytes_.size())
            throw DataError(name_ + ": trailing bytes at offset " + std::to_string(pos_));
    }

private:
    void need(std::size_t n) {
        if (pos_ + n > bytes_.size())
            throw DataError(name_ + ": truncated file, unexpected end at byte " +
                            std::to_string(bytes_.size()) + " (needed " + std::to_string(n) +
                            " more at offset " + std::to_string(pos_) + ")");
    }

    std::span<const std::uint8_t> bytes_;
    std::string name_;
    std::size_t pos_ = 0;
};

void put_u16_le(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(v & 0xff);
    out.push_back((v >> 8) & 0xff);
}

void put_u32_le(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(v & 0xff);
    out.push_back((v >> 8) & 0xff);
    out.push_back((v >> 16) & 0xff);
    out.push_back((v >> 24) & 0xff);
}

void put_f32_le(std::vector<std::uint8_t>& out, float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof(bits));
    put_u32_le(out, bits);
}

std::vector<std::uint8_t> read_maybe_gz(const std::string& path) {
    auto bytes = read_file(path);
    if (is_gzip(bytes)) return gunzip(bytes);
    return bytes;
}

std::string hex_magic(std::uint32_t v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "0x%08x", v);
    return buf;
}

} // namespace

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

void atomic_write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open for writing: " + tmp.string());
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  std::streamsize(bytes.size()));
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw DataError("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw DataError("rename failed for " + target.string() + ": " + ec.message());
    }
}

void atomic_write_file(const std::string& path, const std::string& text) {
    atomic_write_file(path, std::span<const std::uint8_t>(
                                reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Matrix load_idx_images(const std::string& path) {
    auto bytes = read_maybe_gz(path);
    ByteReader r(bytes, path);
    std::uint32_t magic = r.u32_be();
    if (magic != kIdxImageMagic)
        throw DataError(path + ": bad IDX image magic at byte 0: expected " +
                        hex_magic(kIdxImageMagic) + ", found " + hex_magic(magic));
    std::uint32_t count = r.u32_be();
    std::uint32_t rows = r.u32_be();
    std::uint32_t cols = r.u32_be();
    if (count > kDimCap || rows > kDimCap || cols > kDimCap ||
        (rows && cols && count > kDimCap / (rows * cols)))
        throw DataError(path + ": dimension overflow at byte 4 (" + std::to_string(count) + "x" +
                        std::to_string(rows) + "x" + std::to_string(cols) + ")");
    std::size_t pixels = std::size_t(rows) * cols;
    Matrix images(count, pixels);
    for (std::size_t i = 0; i < count; ++i) {
        auto raw = r.raw(pixels);
        for (std::size_t j = 0; j < pixels; ++j) images(i, j) = double(raw[j]) / 255.0;
    }
    r.expect_end();
    return images;
}

std::vector<int> load_idx_labels(const std::string& path, int label_base) {
    auto bytes = read_maybe_gz(path);
    ByteReader r(bytes, path);
    std::uint32_t magic = r.u32_be();
    if (magic != kIdxLabelMagic)
        throw DataError(path + ": bad IDX label magic at byte 0: expected " +
                        hex_magic(kIdxLabelMagic) + ", found " + hex_magic(magic));
    std::uint32_t count = r.u32_be();
    if (count > kDimCap)
        throw DataError(path + ": dimension overflow at byte 4 (" + std::to_string(count) + ")");
    std::vector<int> labels(count);
    for (std::size_t i = 0; i < count; ++i) labels[i] = int(r.u8()) - label_base;
    r.expect_end();
    return labels;
}

Dataset load_dataset(const std::string& dir, const std::string& stem, int class_count,
                     int label_base) {
    namespace fs = std::filesystem;
    auto find = [&](const std::string& suffix) -> std::string {
        fs::path plain = fs::path(dir) / (stem + suffix);
        fs::path gz = fs::path(dir) / (stem + suffix + ".gz");
        if (fs::exists(plain)) return plain.string();
        if (fs::exists(gz)) return gz.string();
        throw DataError("dataset file not found: " + plain.string() + " (or .gz)");
    };
    Dataset d;
    d.images = load_idx_images(find("-images-idx3-ubyte"));
    d.labels = load_idx_labels(find("-labels-idx1-ubyte"), label_base);
    d.class_count = class_count;
    d.validate();
    return d;
}

NetworkModel load_weights(const std::string& path) {
    auto bytes = read_file(path);
    ByteReader r(bytes, path);
    auto magic = r.raw(4);
    if (std::memcmp(magic.data(), "HTWT", 4) != 0)
        throw DataError(path + ": bad magic at byte 0: expected \"HTWT\"");
    std::uint16_t version = r.u16_le();
    if (version != 1)
        throw DataError(path + ": unsupported HTWT version " + std::to_string(version) +
                        " at byte 4");
    std::uint16_t layer_count = r.u16_le();
    if (layer_count == 0) throw DataError(path + ": zero layers at byte 6");

    NetworkModel model;
    for (std::uint16_t li = 0; li < layer_count; ++li) {
        std::size_t header_at = r.offset();
        std::uint32_t rows = r.u32_le();
        std::uint32_t cols = r.u32_le();
        std::uint8_t act = r.u8();
        if (rows == 0 || cols == 0 || rows > kDimCap || cols > kDimCap ||
            rows > kDimCap / cols)
            throw DataError(path + ": dimension overflow at byte " + std::to_string(header_at) +
                            " (" + std::to_string(rows) + "x" + std::to_string(cols) + ")");
        if (act > 1)
            throw DataError(path + ": unknown activation code " + std::to_string(act) +
                            " at byte " + std::to_string(header_at + 8));
        LayerSpec layer;
        layer.activation = act == 1 ? Activation::relu : Activation::none;
        layer.weights = Matrix(rows, cols);
        for (std::size_t i = 0; i < std::size_t(rows) * cols; ++i)
            layer.weights.values()[i] = double(r.f32_le());
        model.layers.push_back(std::move(layer));
    }
    r.expect_end();
    model.input_dim = model.layers.front().weights.rows();
    model.validate();
    return model;
}

void save_weights(const std::string& path, const NetworkModel& model) {
    model.validate();
    std::vector<std::uint8_t> out;
    out.insert(out.end(), {'H', 'T', 'W', 'T'});
    put_u16_le(out, 1);
    put_u16_le(out, std::uint16_t(model.layers.size()));
    for (const auto& l : model.layers) {
        put_u32_le(out, std::uint32_t(l.weights.rows()));
        put_u32_le(out, std::uint32_t(l.weights.cols()));
        out.push_back(l.activation == Activation::relu ? 1 : 0);
        for (double v : l.weights.values()) put_f32_le(out, float(v));
    }
    atomic_write_file(path, out);
}

Matrix load_matrix(const std::string& path) {
    auto bytes = read_file(path);
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), "HTMX", 4) == 0) {
        ByteReader r(bytes, path);
        r.raw(4);
        std::uint32_t rows = r.u32_le();
        std::uint32_t cols = r.u32_le();
        if (rows == 0 || cols == 0 || rows > kDimCap || cols > kDimCap || rows > kDimCap / cols)
            throw DataError(path + ": dimension overflow at byte 4 (" + std::to_string(rows) +
                            "x" + std::to_string(cols) + ")");
        Matrix m(rows, cols);
        for (std::size_t i = 0; i < m.size(); ++i) m.values()[i] = double(r.f32_le());
        r.expect_end();
        return m;
    }
    return load_matrix_csv(path);
}

Matrix load_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                double v = std::stod(cell, &used);
                while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used])))
                    ++used;
                if (used != cell.size()) throw std::invalid_argument(cell);
                row.push_back(v);
            } catch (const std::exception&) {
                throw DataError(path + ": line " + std::to_string(line_no) +
                                ": cannot parse cell '" + cell + "' as a number");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw DataError(path + ": line " + std::to_string(line_no) + ": expected " +
                            std::to_string(rows.front().size()) + " columns, found " +
                            std::to_string(row.size()));
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw DataError(path + ": empty CSV matrix");
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    return m;
}

void save_matrix_htmx(const std::string& path, const Matrix& m) {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), {'H', 'T', 'M', 'X'});
    put_u32_le(out, std::uint32_t(m.rows()));
    put_u32_le(out, std::uint32_t(m.cols()));
    for (double v : m.values()) put_f32_le(out, float(v));
    atomic_write_file(path, out);
}

void save_matrix_csv(const std::string& path, const Matrix& m) {
    std::string text;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) text += ',';
            text += format_double(m(i, j));
        }
        text += '\n';
    }
    atomic_write_file(path, text);
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr))
        throw InternalError("sha256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

bool is_gzip(std::span<const std::uint8_t> bytes) {
    return bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b;
}

std::vector<std::uint8_t> gunzip(std::span<const std::uint8_t> bytes) {
    z_stream zs{};
    if (inflateInit2(&zs, 15 + 16) != Z_OK) throw InternalError("zlib inflateInit2 failed");
    std::vector<std::uint8_t> out;
    std::vector<std::uint8_t> buf(64 * 1024);
    zs.next_in = const_cast<Bytef*>(bytes.data());
    zs.avail_in = uInt(bytes.size());
    int rc = Z_OK;
    do {
        zs.next_out = buf.data();
        zs.avail_out = uInt(buf.size());
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw DataError("gunzip failed: corrupt gzip stream (zlib rc " + std::to_string(rc) +
                            ")");
        }
        out.insert(out.end(), buf.data(), buf.data() + (buf.size() - zs.avail_out));
    } while (rc != Z_STREAM_END);
    inflateEnd(&zs);
    return out;
}

std::string format_double(double v) {
    char buf[64];
    if (v == std::floor(v) && std::fabs(v) < 1e7) {
        std::snprintf(buf, sizeof(buf), "%.0f", v);
        return buf;
    }
    // %.17g round-trips every double; trim to the shortest form that does.
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::stod(buf) == v) return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace hitop
