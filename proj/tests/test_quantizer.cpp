#include <doctest.h>

#include <cmath>
#include <cstdio>

#include "fewbit/common.hpp"
#include "fewbit/quantizer.hpp"

using namespace fewbit;

TEST_CASE("1-bit MMSE distortion equals 1 - 2/pi") {
    const double d1 = mmse_distortion(1);
    CHECK(d1 == doctest::Approx(1.0 - 2.0 / M_PI).epsilon(1e-6));
    // optimal 1-bit level is E|u| = sqrt(2/pi), so delta = 2 sqrt(2/pi)
    CHECK(mmse_stepsize(1) == doctest::Approx(2.0 * std::sqrt(2.0 / M_PI)).epsilon(1e-8));
}

TEST_CASE("stepsizes decrease and distortions are local minima on a grid") {
    double prev_delta = 1e9, prev_dist = 1e9;
    for (int b = 1; b <= 4; ++b) {
        const double step = mmse_stepsize(b);
        const double dist = midrise_distortion(b, step);
        CHECK(step < prev_delta);
        CHECK(dist < prev_dist);
        prev_delta = step;
        prev_dist = dist;
        // grid search around the optimum
        for (double f : {0.9, 0.95, 0.99, 1.01, 1.05, 1.1})
            CHECK(midrise_distortion(b, step * f) >= dist - 1e-12);
        double best = 1e9;
        for (double d = 0.05; d <= 4.0; d += 0.001) best = std::min(best, midrise_distortion(b, d));
        CHECK(dist <= best + 1e-4);
    }
}

TEST_CASE("calibration scales with input power") {
    const double step = mmse_stepsize(3);
    QuantizerSpec q1 = calibrate(3, 1.0, 1.0);
    CHECK(q1.delta_re == doctest::Approx(step));
    QuantizerSpec q4 = calibrate(3, 4.0, 4.0);
    CHECK(q4.delta_re == doctest::Approx(2.0 * step));
    CHECK_THROWS(calibrate(3, 0.0, 1.0));
}

TEST_CASE("calibrated distortion matches the design value on Gaussian input") {
    Rng rng(5);
    const double power = 2.7;
    QuantizerSpec q = calibrate(2, power / 2, power / 2);
    const int n = 1000000;
    cmat u(n / 100, 100);
    for (cplx& v : u.data) v = rng.cgauss() * std::sqrt(power);
    QuantizedObs obs = quantize(q, u);
    cmat r = reconstruct(obs);
    double err = 0.0;
    for (size_t i = 0; i < u.size(); ++i) err += std::norm(r.data[i] - u.data[i]);
    err /= n * power;  // normalized distortion
    CHECK(err == doctest::Approx(mmse_distortion(2)).epsilon(0.02));
}

TEST_CASE("sign-quantizer bins and reconstruction") {
    QuantizerSpec q = calibrate(1, 1.0, 1.0);
    q.delta_re = q.delta_im = 1.0;
    cmat u(1, 1);
    u(0, 0) = cplx(0.3, -0.2);
    QuantizedObs obs = quantize(q, u);
    CHECK(obs.bin_re(0, 0) == 2);
    CHECK(obs.bin_im(0, 0) == 1);
    cmat r = reconstruct(obs);
    CHECK(r(0, 0) == cplx(0.5, -0.5));
}

TEST_CASE("two-bit saturation follows the ceil rule") {
    QuantizerSpec q;
    q.bits = 2;
    q.delta_re = q.delta_im = 1.0;
    CHECK(q.bin_of(1.7, false) == 4);
    CHECK(q.recon_level(4, false) == 1.5);
    CHECK(q.bin_of(0.4, false) == 3);
    CHECK(q.recon_level(3, false) == 0.5);
    CHECK(q.bin_of(-1.2, false) == 1);
    CHECK(q.recon_level(1, false) == -1.5);
}

TEST_CASE("infinite-bit sentinel is the identity") {
    QuantizerSpec q;
    q.bits = QuantizerSpec::kInfinite;
    Rng rng(2);
    cmat u(16, 3);
    for (cplx& v : u.data) v = rng.cgauss();
    QuantizedObs obs = quantize(q, u);
    cmat r = reconstruct(obs);
    for (size_t i = 0; i < u.size(); ++i) CHECK(r.data[i] == u.data[i]);
}

TEST_CASE("bin intervals partition the line") {
    QuantizerSpec q1;
    q1.bits = 1;
    q1.delta_re = 1.0;
    CHECK(q1.bin_interval(1, false).first == -std::numeric_limits<double>::infinity());
    CHECK(q1.bin_interval(1, false).second == 0.0);
    CHECK(q1.bin_interval(2, false).first == 0.0);
    CHECK(q1.bin_interval(2, false).second == std::numeric_limits<double>::infinity());

    QuantizerSpec q2;
    q2.bits = 2;
    q2.delta_re = 1.0;
    CHECK(q2.bin_interval(3, false) == std::pair<double, double>(0.0, 1.0));
    CHECK(q2.bin_interval(4, false).second == std::numeric_limits<double>::infinity());
    for (int b = 1; b <= 4; ++b) {
        QuantizerSpec q;
        q.bits = b;
        q.delta_re = 0.7;
        double prev = -std::numeric_limits<double>::infinity();
        for (int u = 1; u <= q.num_bins(); ++u) {
            auto [lo, hi] = q.bin_interval(u, false);
            CHECK(lo == prev);
            CHECK(hi > lo);
            prev = hi;
        }
        CHECK(prev == std::numeric_limits<double>::infinity());
    }
}

TEST_CASE("quantize-reconstruct is idempotent and values land in their bins") {
    Rng rng(9);
    for (int b : {1, 2, 3, 4}) {
        QuantizerSpec q = calibrate(b, 0.6, 1.4);
        cmat u(64, 4);
        for (cplx& v : u.data) v = 3.0 * rng.cgauss();
        QuantizedObs obs = quantize(q, u);
        QuantizedObs obs2 = quantize(q, reconstruct(obs));
        CHECK(obs.bins_re == obs2.bins_re);
        CHECK(obs.bins_im == obs2.bins_im);
        for (int k = 0; k < u.cols; ++k)
            for (int m = 0; m < u.rows; ++m) {
                auto [lo, hi] = q.bin_interval(obs.bin_re(m, k), false);
                CHECK(u(m, k).real() > lo);
                CHECK(u(m, k).real() <= hi);
            }
    }
}

TEST_CASE("MMSE stepsize beats +/-10% perturbations on matched input") {
    for (int b : {1, 2, 3}) {
        const double step = mmse_stepsize(b);
        const double base = midrise_distortion(b, step);
        CHECK(base <= midrise_distortion(b, step * 0.9));
        CHECK(base <= midrise_distortion(b, step * 1.1));
    }
}

TEST_CASE("stepsize table export") {
    const std::string path = "stepsize_test.csv";
    write_stepsize_table_csv(path, 4);
    std::FILE* fp = std::fopen(path.c_str(), "r");
    REQUIRE(fp != nullptr);
    char line[128];
    REQUIRE(std::fgets(line, sizeof(line), fp) != nullptr);
    CHECK(std::string(line).rfind("b,delta,distortion", 0) == 0);
    int rows = 0;
    while (std::fgets(line, sizeof(line), fp)) ++rows;
    CHECK(rows == 4);
    std::fclose(fp);
    std::remove(path.c_str());
}
