#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hitop/analysis.hpp"
#include "hitop/presets.hpp"

using namespace hitop;

namespace {

Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double lo,
                     double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Matrix m(rows, cols);
    for (double& v : m.values()) v = u(rng);
    return m;
}

HardwareConfig quiet_config() {
    HardwareConfig c;
    c.noise_preset = "off";
    return c;
}

const PassOptions kClean{false, false}; // no noise, no quantization
const PassOptions kQuantOnly{false, true};

} // namespace

TEST_CASE("oracle matmul: identity, scalar and a hand-computed fixture") {
    std::mt19937_64 rng(1);
    Matrix a = random_matrix(rng, 5, 5, -1.0, 1.0);
    Matrix y = oracle_matmul(Matrix::identity(5), a);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(y.values()[i] == a.values()[i]);

    Matrix s1(1, 1), s2(1, 1);
    s1(0, 0) = -3.25;
    s2(0, 0) = 4.0;
    CHECK(oracle_matmul(s1, s2)(0, 0) == -13.0);

    // 3x4 * 4x2 fixture, worked out by hand
    Matrix x(3, 4), w(4, 2);
    double xv[3][4] = {{1, 2, 0, -1}, {0.5, -1, 2, 3}, {2, 0, 1, 1}};
    double wv[4][2] = {{1, 0}, {0, 2}, {3, -1}, {-2, 1}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) x(i, j) = xv[i][j];
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 2; ++j) w(i, j) = wv[i][j];
    Matrix f = oracle_matmul(x, w);
    double expect[3][2] = {{3, 3}, {0.5, -1}, {3, 0}};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j) CHECK(f(i, j) == expect[i][j]);

    CHECK_THROWS_AS(oracle_matmul(Matrix(2, 3), Matrix(2, 2)), DataError);
}

TEST_CASE("effective bits from error sigma") {
    CHECK(effective_bits(0.015) == doctest::Approx(6.06).epsilon(1e-3));
    CHECK(effective_bits(0.5) == 1.0);
    CHECK(effective_bits(0.0039) == doctest::Approx(8.0).epsilon(1e-3));
    CHECK_THROWS_AS(effective_bits(0.0), DataError);
    CHECK_THROWS_AS(effective_bits(-1.0), DataError);
}

TEST_CASE("input encode: zeros sit at threshold, round trip recovers quantized values") {
    HardwareConfig cfg = quiet_config();
    DeviceSet dev = make_paper_devices(cfg);

    Matrix zeros(3, 4, 0.0);
    Matrix drives = encode_input_tile(zeros, cfg, dev.vcsel, 0, kClean);
    for (double d : drives.values()) {
        CHECK(d == dev.vcsel.threshold_current_ma);
        CHECK(vcsel_power_mw(d, dev.vcsel) == 0.0);
    }

    Matrix onehot(3, 4, 0.0);
    onehot(1, 2) = 1.0;
    drives = encode_input_tile(onehot, cfg, dev.vcsel, 0, kClean);
    int nonzero = 0;
    for (double d : drives.values()) nonzero += vcsel_power_mw(d, dev.vcsel) > 0.0 ? 1 : 0;
    CHECK(nonzero == 1);

    std::mt19937_64 rng(11);
    Matrix x = random_matrix(rng, 7, 32, 0.0, 1.0);
    drives = encode_input_tile(x, cfg, dev.vcsel, 0, kQuantOnly);
    for (std::size_t m = 0; m < x.rows(); ++m)
        for (std::size_t k = 0; k < x.cols(); ++k) {
            double amplitude = vcsel_power_mw(drives(m, k), dev.vcsel) / dev.vcsel.max_power_mw;
            CHECK(amplitude == doctest::Approx(quantize_input_8bit(x(m, k))).epsilon(1e-12));
        }

    Matrix bad(1, 1, 1.5);
    CHECK_THROWS_AS(encode_input_tile(bad, cfg, dev.vcsel, 0, kClean), DataError);
}

TEST_CASE("weight encode: zeros at quadrature, unity at half-wave, round trip") {
    HardwareConfig cfg = quiet_config();
    DeviceSet dev = make_paper_devices(cfg);

    Matrix zeros(4, 3, 0.0);
    Matrix drives = encode_weight_tile(zeros, cfg, dev.mzm, 0, kClean);
    for (double d : drives.values()) CHECK(d == 0.0);

    Matrix one(1, 1, 1.0);
    drives = encode_weight_tile(one, cfg, dev.mzm, 0, kClean);
    CHECK(drives(0, 0) == doctest::Approx(dev.mzm.v_pi_v / 2.0).epsilon(1e-12));

    std::mt19937_64 rng(13);
    Matrix w = random_matrix(rng, 32, 7, -1.0, 1.0);
    drives = encode_weight_tile(w, cfg, dev.mzm, 0, kQuantOnly);
    for (std::size_t k = 0; k < w.rows(); ++k)
        for (std::size_t n = 0; n < w.cols(); ++n) {
            auto [p1, p2] = mzm_dual_output_mw(drives(k, n), 1.0, dev.mzm);
            CHECK(p1 - p2 == doctest::Approx(quantize_weight_8bit(w(k, n))).epsilon(1e-10));
        }

    Matrix bad(1, 1, -1.2);
    CHECK_THROWS_AS(encode_weight_tile(bad, cfg, dev.mzm, 0, kClean), DataError);
}

TEST_CASE("simulate_pass: one-hot weight column selects one input sample") {
    HardwareConfig cfg = quiet_config();
    DeviceSet dev = make_paper_devices(cfg);
    std::mt19937_64 rng(17);
    Matrix x = random_matrix(rng, 5, 9, 0.0, 1.0);
    Matrix w(9, 3, 0.0);
    w(2, 0) = 1.0;
    w(5, 1) = 1.0;
    w(8, 2) = 1.0;
    OutputTile y = simulate_pass(x, w, cfg, dev, 0, kClean);
    for (std::size_t m = 0; m < 5; ++m) {
        CHECK(y.values(m, 0) == doctest::Approx(x(m, 2)).epsilon(1e-12));
        CHECK(y.values(m, 1) == doctest::Approx(x(m, 5)).epsilon(1e-12));
        CHECK(y.values(m, 2) == doctest::Approx(x(m, 8)).epsilon(1e-12));
    }
    CHECK(y.saturation_count() == 0);
}

TEST_CASE("zero-noise no-quantization fidelity against the oracle") {
    HardwareConfig cfg = quiet_config();
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<std::size_t> dim(1, 8);
    std::uniform_int_distribution<std::size_t> inner(1, 1024);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t m = dim(rng), n = dim(rng), k = inner(rng);
        cfg.m_wavelengths = 8;
        cfg.n_spatial = 8;
        cfg.k_window = 1024;
        DeviceSet dev = make_paper_devices(cfg);
        Matrix x = random_matrix(rng, m, k, 0.0, 1.0);
        Matrix w = random_matrix(rng, k, n, -1.0, 1.0);
        OutputTile y = simulate_pass(x, w, cfg, dev, trial, kClean);
        CHECK(relative_frobenius_error(y.values, oracle_matmul(x, w)) <= 1e-9);
    }
}

TEST_CASE("8-bit quantization keeps a 784-deep pass under half a percent") {
    HardwareConfig cfg = quiet_config();
    DeviceSet dev = make_paper_devices(cfg);
    std::mt19937_64 rng(29);
    Matrix x = random_matrix(rng, 7, 784, 0.0, 1.0);
    Matrix w = random_matrix(rng, 784, 7, -1.0, 1.0);
    OutputTile y = simulate_pass(x, w, cfg, dev, 0, kQuantOnly);
    CHECK(relative_frobenius_error(y.values, oracle_matmul(x, w)) < 0.005);
}

TEST_CASE("linearity in the input at zero noise") {
    HardwareConfig cfg = quiet_config();
    DeviceSet dev = make_paper_devices(cfg);
    std::mt19937_64 rng(31);
    Matrix x = random_matrix(rng, 4, 50, 0.0, 1.0);
    Matrix w = random_matrix(rng, 50, 4, -1.0, 1.0);
    Matrix base = simulate_pass(x, w, cfg, dev, 0, kClean).values;
    for (double alpha : {0.0, 0.25, 0.5, 0.99}) {
        Matrix xs = x;
        for (double& v : xs.values()) v *= alpha;
        Matrix scaled = simulate_pass(xs, w, cfg, dev, 0, kClean).values;
        for (std::size_t i = 0; i < base.size(); ++i)
            CHECK(scaled.values()[i] ==
                  doctest::Approx(alpha * base.values()[i]).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("identity crosstalk matrix is bit-identical to the no-crosstalk path") {
    HardwareConfig cfg = quiet_config();
    cfg.m_wavelengths = 4;
    DeviceSet dev = make_paper_devices(cfg);
    std::mt19937_64 rng(37);
    Matrix x = random_matrix(rng, 4, 64, 0.0, 1.0);
    Matrix w = random_matrix(rng, 64, 5, -1.0, 1.0);

    Matrix plain = simulate_pass(x, w, cfg, dev, 3, kClean).values;
    cfg.crosstalk = Matrix::identity(4);
    Matrix mixed = simulate_pass(x, w, cfg, dev, 3, kClean).values;
    for (std::size_t i = 0; i < plain.size(); ++i)
        CHECK(plain.values()[i] == mixed.values()[i]);
}

TEST_CASE("crosstalk leakage mixes wavelength channels") {
    HardwareConfig cfg = quiet_config();
    cfg.m_wavelengths = 2;
    cfg.n_spatial = 1;
    DeviceSet dev = make_paper_devices(cfg);
    Matrix x(2, 1, 0.0);
    x(0, 0) = 1.0; // only channel 0 carries light
    Matrix w(1, 1, 1.0);

    Matrix c(2, 2, 0.0);
    c(0, 0) = 0.9;
    c(0, 1) = 0.1;
    c(1, 0) = 0.1;
    c(1, 1) = 0.9;
    cfg.crosstalk = c;
    cfg.validate();
    Matrix y = simulate_pass(x, w, cfg, dev, 0, kClean).values;
    CHECK(y(0, 0) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK(y(1, 0) == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("noisy passes are deterministic in the pass id and seed") {
    HardwareConfig cfg;
    cfg.noise_preset = "paper-slow";
    cfg.master_seed = 404;
    DeviceSet dev = make_paper_devices(cfg);
    std::mt19937_64 rng(41);
    Matrix x = random_matrix(rng, 7, 16, 0.0, 1.0);
    Matrix w = random_matrix(rng, 16, 7, -1.0, 1.0);
    PassOptions noisy{true, true};

    Matrix a = simulate_pass(x, w, cfg, dev, 5, noisy).values;
    Matrix b = simulate_pass(x, w, cfg, dev, 5, noisy).values;
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.values()[i] == b.values()[i]);

    Matrix other_pass = simulate_pass(x, w, cfg, dev, 6, noisy).values;
    bool any_different = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        any_different = any_different || a.values()[i] != other_pass.values()[i];
    CHECK(any_different);

    cfg.master_seed = 405;
    Matrix other_seed = simulate_pass(x, w, cfg, dev, 5, noisy).values;
    any_different = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        any_different = any_different || a.values()[i] != other_seed.values()[i];
    CHECK(any_different);
}

TEST_CASE("window overflow propagates from the integrator") {
    HardwareConfig cfg = quiet_config();
    cfg.k_window = 8;
    DeviceSet dev = make_paper_devices(cfg);
    Matrix x(1, 9, 0.5);
    Matrix w(9, 1, 0.5);
    CHECK_THROWS_AS(simulate_pass(x, w, cfg, dev, 0, kClean), DataError);
}

TEST_CASE("integrator saturation is reported per output element") {
    HardwareConfig cfg = quiet_config();
    DeviceSet dev = make_paper_devices(cfg);
    // Force a tiny full scale so the all-ones pass clips.
    dev.detector.full_scale_voltage_v = unit_product_volts(cfg, dev) * 2.0;
    Matrix x(1, 16, 1.0);
    Matrix w(16, 1, 1.0);
    OutputTile y = simulate_pass(x, w, cfg, dev, 0, kClean);
    CHECK(y.saturation_count() == 1);
    CHECK(y.values(0, 0) == doctest::Approx(2.0).epsilon(1e-12)); // clipped at full scale
}

TEST_CASE("scalar multiplication error sigma at the slow preset") {
    HardwareConfig cfg;
    cfg.noise_preset = "paper-slow";
    cfg.clock_rate_gsps = 0.1;
    DeviceSet dev = make_paper_devices(cfg);
    auto r = scalar_multiplication_benchmark(1000, cfg, dev, PassOptions{true, true});
    CHECK(r.stats.sigma == doctest::Approx(0.015).epsilon(0.2));

    // unbiasedness over 1e5 trials
    auto big = scalar_multiplication_benchmark(100000, cfg, dev, PassOptions{true, true}, 555);
    CHECK(std::fabs(big.stats.mean) < 0.1 * big.stats.sigma);
}

TEST_CASE("output element error grows as sqrt(K) for per-symbol noise") {
    HardwareConfig cfg;
    cfg.noise_preset = "paper-slow";
    cfg.k_window = 1024;
    DeviceSet dev = make_paper_devices(cfg);
    dev.detector.read_noise_sigma_v = 0.0; // per-symbol terms only
    PassOptions noisy{true, false};

    std::mt19937_64 rng(53);
    std::uniform_real_distribution<double> ux(0.0, 1.0), uw(-1.0, 1.0);
    const std::size_t ks[] = {16, 64, 256, 784};
    double sigma16 = 0.0;
    for (std::size_t k : ks) {
        const int trials = 800;
        std::vector<double> errs(trials);
        for (int t = 0; t < trials; ++t) {
            Matrix x(1, k), w(k, 1);
            double ref = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                x(0, i) = ux(rng);
                w(i, 0) = uw(rng);
                ref += x(0, i) * w(i, 0);
            }
            errs[t] = simulate_pass(x, w, cfg, dev, t + 1000 * k, noisy).values(0, 0) - ref;
        }
        double mean = 0.0, var = 0.0;
        for (double e : errs) mean += e;
        mean /= trials;
        for (double e : errs) var += (e - mean) * (e - mean);
        double sigma = std::sqrt(var / (trials - 1));
        if (k == 16)
            sigma16 = sigma;
        else
            CHECK(sigma / sigma16 ==
                  doctest::Approx(std::sqrt(double(k) / 16.0)).epsilon(0.15));
    }
}
