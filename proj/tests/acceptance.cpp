// Acceptance suite: end-to-end checks of the published operating points.
// Prints one PASS/FAIL line per criterion; exit code is the failure count.
//
// Needs HITOP_CLI (path to the hitop binary) and HITOP_FIXTURES (path to
// the fixtures directory); both are set by the ctest registration.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "hitop/analysis.hpp"
#include "hitop/io.hpp"
#include "hitop/metrics.hpp"
#include "hitop/nn.hpp"
#include "hitop/presets.hpp"

using namespace hitop;
namespace fs = std::filesystem;

namespace {

int g_failed_criteria = 0;

void report(int crit, const std::string& title, bool pass, const std::string& detail) {
    std::printf("[%s] C%d %s — %s\n", pass ? "PASS" : "FAIL", crit, title.c_str(),
                detail.c_str());
    if (!pass) ++g_failed_criteria;
}

Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols, double lo,
                     double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Matrix m(rows, cols);
    for (double& v : m.values()) v = u(rng);
    return m;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof(buf), f, args);
    va_end(args);
    return buf;
}

// ---- C1: zero-noise oracle equivalence over 200 randomized shapes ----------

void criterion1() {
    HardwareConfig cfg;
    cfg.noise_preset = "off";
    DeviceSet dev = make_paper_devices(cfg);
    PassOptions clean{false, false};
    std::mt19937_64 rng(1001);
    std::uniform_int_distribution<std::size_t> rows(1, 24), cols(1, 24), inner(1, 2000);

    double worst = 0.0;
    bool direct_checked = false;
    for (int t = 0; t < 200; ++t) {
        Matrix x = random_matrix(rng, rows(rng), inner(rng), (t % 2) ? -1.0 : 0.0, 1.0);
        Matrix w = random_matrix(rng, x.cols(), cols(rng), -1.0, 1.0);
        Matrix ref = oracle_matmul(x, w);
        auto r = run_gemm(x, w, cfg, dev, clean);
        worst = std::max(worst, relative_frobenius_error(r.y, ref));
        if (!direct_checked && x.rows() <= 7 && w.cols() <= 7 && x.cols() <= 784 &&
            max_abs(x) <= 1.0 && (t % 2) == 0) {
            OutputTile tile = simulate_pass(x, w, cfg, dev, 0, clean);
            worst = std::max(worst, relative_frobenius_error(tile.values, ref));
            direct_checked = true;
        }
    }
    report(1, "Eq.1 fidelity (200 shapes, zero noise/quantization)", worst <= 1e-8,
           fmt("max relative Frobenius error %.3g (limit 1e-8)", worst));
}

// ---- C2: scalar multiplication precision at both presets --------------------

void criterion2() {
    HardwareConfig cfg;
    cfg.noise_preset = "paper-slow";
    cfg.clock_rate_gsps = noise_preset("paper-slow").nominal_clock_gsps;
    DeviceSet slow = make_paper_devices(cfg);
    auto rs = scalar_multiplication_benchmark(1000, cfg, slow, PassOptions{true, true});
    double slow_sigma = rs.stats.sigma;
    double slow_bits = rs.stats.bits.value_or(0.0);

    cfg.noise_preset = "paper-fast";
    cfg.clock_rate_gsps = noise_preset("paper-fast").nominal_clock_gsps;
    DeviceSet fast = make_paper_devices(cfg);
    auto rf = scalar_multiplication_benchmark(1000, cfg, fast, PassOptions{true, true});
    double fast_bits = rf.stats.bits.value_or(0.0);

    bool ok = std::fabs(slow_sigma - 0.015) <= 0.003 && std::fabs(slow_bits - 6.0) <= 0.3 &&
              std::fabs(fast_bits - 5.0) <= 0.3;
    report(2, "scalar multiplication precision (1000 pairs)", ok,
           fmt("paper-slow sigma %.4f (1.5%% +- 0.3), %.2f bits (6.0 +- 0.3); "
               "paper-fast %.2f bits (5.0 +- 0.3)",
               slow_sigma, slow_bits, fast_bits));
}

// ---- C3: inference degradation bound on every shipped model -----------------

void criterion3(const std::string& fixtures) {
    struct Job {
        const char* weights;
        const char* dataset;
        int label_base;
    };
    const Job jobs[] = {
        {"mnist_784x10.htwt", "digits10", 0},
        {"mnist_784x100x10.htwt", "digits10", 0},
        {"fashion_784x100x10.htwt", "fashion10", 0},
        {"emnist_784x500x26.htwt", "letters26", 1},
    };

    HardwareConfig cfg;
    cfg.noise_preset = "paper-slow";
    DeviceSet dev = make_paper_devices(cfg);
    PassOptions options{true, true};

    bool all_ok = true;
    std::string detail;
    for (const Job& job : jobs) {
        NetworkModel model = load_weights(fixtures + "/weights/" + job.weights);
        Dataset data = load_dataset(fixtures + "/datasets/" + job.dataset, "t10k",
                                    int(model.output_dim()), job.label_base);
        if (data.size() < 1000) {
            all_ok = false;
            detail += fmt("%s: only %zu test images; ", job.weights, data.size());
            continue;
        }
        auto digital = run_inference(model, data.images, cfg, dev, InferenceMode::digital,
                                     options, 8);
        auto analog = run_inference(model, data.images, cfg, dev, InferenceMode::analog,
                                    options, 8);
        double dacc = confusion_matrix(digital.predictions, data.labels,
                                       data.class_count).accuracy;
        double aacc = confusion_matrix(analog.predictions, data.labels,
                                       data.class_count).accuracy;
        double gap = 100.0 * (dacc - aacc);
        bool ok = gap <= 2.5;
        all_ok = all_ok && ok;
        detail += fmt("%s: digital %.2f%% analog %.2f%% gap %+.2f pts%s; ", job.weights,
                      100.0 * dacc, 100.0 * aacc, gap, ok ? "" : " (>2.5)");
    }
    report(3, "inference degradation <= 2.5 pts at paper-slow", all_ok, detail);
}

// ---- C4: throughput and density formulas -------------------------------------

void criterion4() {
    double demonstrated = throughput_ops(7, 7, 10.0);
    double density_now = compute_density_ops_per_mm2(7, 10.0, 8.0);
    double future_tput = throughput_ops(1000, 1000, 10.0);
    double density_future = compute_density_ops_per_mm2(1000, 10.0, 2.0);

    bool density_ok = density_now == 1.75e10 && density_future == 1e13;
    bool future_ok = future_tput == 2e16;
    // The published demonstrated figure is 1.12 TOPS, but T = 2*M*N*R with
    // M = N = 7 and R = 10 GS/s gives 0.98 TOPS; 1.12 TOPS would require a
    // 7x8 device count. The formula is kept authoritative (it is what
    // produces the consistent 17.5 GOPS/mm2, 20 POPS and 10 TOPS/mm2
    // figures), so this sub-check fails by design rather than bending the
    // formula to one printed number.
    bool demonstrated_ok = demonstrated == 1.12e12;

    report(4, "performance formulas", demonstrated_ok && density_ok && future_ok,
           fmt("throughput(7,7,10GS/s) = %.3g TOPS vs published 1.12 TOPS%s; "
               "density %.4g GOPS/mm2 (want 17.5), future %.3g POPS (want 20), "
               "%.3g TOPS/mm2 (want 10)",
               demonstrated / 1e12,
               demonstrated_ok ? "" : " [2*7*7*10GS/s = 0.98 TOPS; see ledger]",
               density_now / 1e9, future_tput / 1e15, density_future / 1e12));
}

// ---- C5: energy ledger reproduction -----------------------------------------

void criterion5() {
    EnergyReport current = energy_per_op(paper_current_budget());
    EnergyReport future = energy_per_op(paper_future_budget());

    auto within = [](double got, double want, double tol) {
        return std::fabs(got - want) <= tol * want;
    };
    const double row_want[] = {18e-15, 0.25e-12, 0.25e-12, 0.49e-15, 6.3e-15, 0.6e-15,
                               0.6e-15};
    bool rows_ok = current.rows.size() == 7;
    for (std::size_t i = 0; rows_ok && i < 7; ++i)
        rows_ok = within(current.rows[i].energy_per_op_j, row_want[i], 0.02);
    bool totals_ok = within(current.total_per_op_j, 525e-15, 0.02) &&
                     within(future.total_per_op_j, 4.6e-15, 0.05);

    report(5, "energy ledger vs published table", rows_ok && totals_ok,
           fmt("current total %.4g fJ/OP (525 +- 2%%), future %.4g fJ/OP (4.6 +- 5%%), "
               "all 7 current rows within 2%%",
               current.total_per_op_j * 1e15, future.total_per_op_j * 1e15));
}

// ---- C6: parameter and operation counting ------------------------------------

void criterion6() {
    NetworkModel single;
    single.input_dim = 784;
    single.layers.push_back({Matrix(784, 10, 0.0), Activation::none});

    NetworkModel two;
    two.input_dim = 784;
    two.layers.push_back({Matrix(784, 100, 0.0), Activation::relu});
    two.layers.push_back({Matrix(100, 10, 0.0), Activation::none});

    NetworkModel first_layer_only;
    first_layer_only.input_dim = 784;
    first_layer_only.layers.push_back({Matrix(784, 100, 0.0), Activation::none});

    NetworkModel emnist;
    emnist.input_dim = 784;
    emnist.layers.push_back({Matrix(784, 500, 0.0), Activation::relu});
    emnist.layers.push_back({Matrix(500, 26, 0.0), Activation::none});

    bool ok = count_parameters(single) == 7840 &&
              count_parameters(first_layer_only) == 78400 &&
              count_parameters(two) == 79400 &&
              count_parameters(emnist) == 405000 &&
              count_operations(emnist, 5000) == 4050000000ULL;
    report(6, "parameter/operation counting", ok,
           fmt("784x10 = %zu (want 7840); published 78,400 equals the hidden matrix alone, "
               "full 784-100-10 sums to %zu; 784-500-26 = %zu (405,000 exactly); "
               "ops(5000 images) = %zu (want 4,050,000,000)",
               count_parameters(single), count_parameters(two), count_parameters(emnist),
               count_operations(emnist, 5000)));
}

// ---- C7: device-model properties ----------------------------------------------

void criterion7() {
    MzmParams mzm;
    mzm.v_pi_v = 1.3;
    mzm.insertion_loss_db = 1.0;
    const double loss = mzm.loss_factor();
    std::mt19937_64 rng(7007);
    std::uniform_real_distribution<double> drive(-4.0, 4.0), power(0.0, 3.0), uw(-1.0, 1.0);

    bool conservation = true;
    for (int i = 0; i < 100000 && conservation; ++i) {
        double p = power(rng);
        auto [p1, p2] = mzm_dual_output_mw(drive(rng), p, mzm);
        conservation = (p1 + p2) == loss * p;
    }

    double worst_roundtrip = 0.0;
    MzmParams clean_mzm;
    clean_mzm.v_pi_v = 1.3;
    for (int i = 0; i < 10000; ++i) {
        double w = uw(rng);
        auto [p1, p2] = mzm_dual_output_mw(mzm_predistort_v(w, clean_mzm), 1.0, clean_mzm);
        worst_roundtrip = std::max(worst_roundtrip, std::fabs((p1 - p2) - w));
    }

    VcselParams vcsel;
    vcsel.threshold_current_ma = 2.0;
    vcsel.slope_efficiency_mw_per_ma = 0.5;
    vcsel.max_power_mw = 2.0;
    double worst_relu = 0.0;
    std::uniform_real_distribution<double> act(-3.0, 3.9);
    for (int i = 0; i < 10000; ++i) {
        double a = act(rng);
        double expect = vcsel.slope_efficiency_mw_per_ma * (a > 0.0 ? a : 0.0);
        worst_relu = std::max(
            worst_relu, std::fabs(vcsel_power_mw(vcsel.threshold_current_ma + a, vcsel) - expect));
    }

    // sqrt(K) Monte-Carlo with per-symbol noise only
    HardwareConfig cfg;
    cfg.noise_preset = "paper-slow";
    cfg.k_window = 1024;
    DeviceSet dev = make_paper_devices(cfg);
    dev.detector.read_noise_sigma_v = 0.0;
    PassOptions noisy{true, false};
    std::uniform_real_distribution<double> ux(0.0, 1.0);
    const std::size_t ks[] = {16, 64, 256, 784};
    double sigma16 = 0.0;
    bool sqrt_ok = true;
    std::string sqrt_detail;
    for (std::size_t k : ks) {
        const int trials = 1200;
        double mean = 0.0, var = 0.0;
        std::vector<double> errs(trials);
        for (int t = 0; t < trials; ++t) {
            Matrix x(1, k), w(k, 1);
            double ref = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                x(0, i) = ux(rng);
                w(i, 0) = uw(rng);
                ref += x(0, i) * w(i, 0);
            }
            errs[t] = simulate_pass(x, w, cfg, dev, t + 7000 * k, noisy).values(0, 0) - ref;
        }
        for (double e : errs) mean += e;
        mean /= trials;
        for (double e : errs) var += (e - mean) * (e - mean);
        double sigma = std::sqrt(var / (trials - 1));
        if (k == 16) {
            sigma16 = sigma;
        } else {
            double ratio = sigma / (sigma16 * std::sqrt(double(k) / 16.0));
            sqrt_ok = sqrt_ok && std::fabs(ratio - 1.0) <= 0.15;
            sqrt_detail += fmt("K=%zu ratio %.3f ", k, ratio);
        }
    }

    bool ok = conservation && worst_roundtrip < 1e-12 && worst_relu < 1e-12 && sqrt_ok;
    report(7, "device-model properties", ok,
           fmt("power conservation %s (1e5 drives); predistort round trip %.2g (<1e-12); "
               "relu equivalence %.2g (<1e-12); sqrt(K) scaling %s(+-15%%)",
               conservation ? "exact" : "BROKEN", worst_roundtrip, worst_relu,
               sqrt_detail.c_str()));
}

// ---- C8: byte-identical CLI outputs across runs and thread counts -----------

bool same_bytes(const std::string& a, const std::string& b) {
    return read_file(a) == read_file(b);
}

int run_cli(const std::string& cli, const std::string& args) {
    std::string cmd = cli + " " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str());
}

void criterion8(const std::string& cli, const std::string& fixtures) {
    fs::path work = fs::temp_directory_path() / "hitop_acceptance_c8";
    std::error_code ec;
    fs::remove_all(work, ec);
    fs::create_directories(work);

    std::mt19937_64 rng(88);
    Matrix x = random_matrix(rng, 20, 900, -1.0, 1.0);
    Matrix w = random_matrix(rng, 900, 11, -1.0, 1.0);
    std::string xp = (work / "x.htmx").string(), wp = (work / "w.htmx").string();
    save_matrix_htmx(xp, x);
    save_matrix_htmx(wp, w);

    auto gemm_run = [&](const std::string& tag, unsigned threads) {
        std::string out = (work / tag).string();
        int rc = run_cli(cli, "gemm " + xp + " " + wp + " --seed 12345 --preset paper-slow "
                                  "--threads " + std::to_string(threads) + " --out " + out);
        return rc == 0 ? out : std::string();
    };
    std::string a = gemm_run("a", 1), b = gemm_run("b", 1), c = gemm_run("c", 8);

    bool gemm_ok = !a.empty() && !b.empty() && !c.empty();
    for (const char* f : {"y.htmx", "gemm_report.json", "error_hist.csv", "runlog.txt"})
        gemm_ok = gemm_ok && same_bytes(a + "/" + f, b + "/" + f) &&
                  same_bytes(a + "/" + f, c + "/" + f);

    auto infer_run = [&](const std::string& tag, unsigned threads) {
        std::string out = (work / tag).string();
        int rc = run_cli(cli, "infer --dataset " + fixtures + "/datasets/digits10 --weights " +
                                  fixtures + "/weights/mnist_784x10.htwt --limit 100 "
                                  "--seed 777 --preset paper-slow --threads " +
                                  std::to_string(threads) + " --out " + out);
        return rc == 0 ? out : std::string();
    };
    std::string ia = infer_run("ia", 1), ib = infer_run("ib", 1), ic = infer_run("ic", 8);
    bool infer_ok = !ia.empty() && !ib.empty() && !ic.empty();
    for (const char* f :
         {"infer_report.json", "analog_confusion.csv", "digital_confusion.csv", "runlog.txt"})
        infer_ok = infer_ok && same_bytes(ia + "/" + f, ib + "/" + f) &&
                   same_bytes(ia + "/" + f, ic + "/" + f);

    report(8, "deterministic CLI outputs (reruns and 1 vs 8 threads)", gemm_ok && infer_ok,
           fmt("gemm outputs byte-identical: %s; infer outputs byte-identical: %s",
               gemm_ok ? "yes" : "NO", infer_ok ? "yes" : "NO"));
    fs::remove_all(work, ec);
}

} // namespace

int main() {
    const char* cli_env = std::getenv("HITOP_CLI");
    const char* fixtures_env = std::getenv("HITOP_FIXTURES");
    std::string cli = cli_env ? cli_env : "./hitop";
    std::string fixtures = fixtures_env ? fixtures_env : "fixtures";

    std::printf("acceptance suite (cli=%s, fixtures=%s)\n", cli.c_str(), fixtures.c_str());

    criterion1();
    criterion2();
    criterion3(fixtures);
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8(cli, fixtures);

    std::printf("%d of 8 criteria failed\n", g_failed_criteria);
    return g_failed_criteria;
}
