#include <doctest.h>

#include <cmath>

#include "fewbit/bussgang.hpp"
#include "fewbit/channel.hpp"
#include "fewbit/dft.hpp"
#include "fewbit/golay_estimator.hpp"
#include "fewbit/lmmse.hpp"
#include "support/oracles.hpp"

using namespace fewbit;

namespace {

Frame make_frame(const FrameSpec& spec, uint64_t seed) {
    Rng rng(seed);
    std::vector<uint8_t> bits(spec.coded_bits());
    for (auto& b : bits) b = static_cast<uint8_t>(rng.next_u64() & 1);
    return build_frame(spec, map_bits(spec, bits));
}

}  // namespace

TEST_CASE("eta: closed form and Monte-Carlo") {
    QuantizerSpec qi;
    CHECK(compute_eta(qi, 1.0) == 0.0);

    QuantizerSpec q1 = calibrate(1, 0.5, 0.5);
    CHECK(compute_eta(q1, 1.0) == doctest::Approx(1.0 - 2.0 / M_PI).epsilon(1e-6));

    Rng rng(1);
    for (int b : {2, 3, 4}) {
        const double power = 1.7;
        QuantizerSpec q = calibrate(b, power / 2, power / 2);
        const double eta = compute_eta(q, power);
        // Monte-Carlo E|q|^2 / E|u|^2
        const int n = 1000000;
        double eq = 0.0, eu = 0.0;
        for (int i = 0; i < n; ++i) {
            const cplx u = rng.cgauss() * std::sqrt(power);
            cmat um(1, 1);
            um(0, 0) = u;
            const cmat y = reconstruct(quantize(q, um));
            eq += std::norm(y(0, 0) - u);
            eu += std::norm(u);
        }
        CHECK(eta == doctest::Approx(eq / eu).epsilon(0.01));
    }
}

TEST_CASE("effective noise variance formula") {
    CHECK(bussgang_params(0.0, 1.0, 1.0, 0.3).eff_noise_var == doctest::Approx(0.3));
    const double eta = 1.0 - 2.0 / M_PI;
    CHECK(bussgang_params(eta, 1.0, 1.0, 0.0).eff_noise_var ==
          doctest::Approx((1.0 - eta) * eta).epsilon(1e-12));
    CHECK(bussgang_params(eta, 1.0, 1.0, 0.0).eff_noise_var == doctest::Approx(0.2313).epsilon(1e-3));
    // linear in the thermal noise at fixed eta
    const double a = bussgang_params(0.2, 1.0, 1.0, 0.0).eff_noise_var;
    const double b = bussgang_params(0.2, 1.0, 1.0, 1.0).eff_noise_var;
    const double c = bussgang_params(0.2, 1.0, 1.0, 2.0).eff_noise_var;
    CHECK(c - b == doctest::Approx(b - a).epsilon(1e-12));
}

TEST_CASE("Bussgang orthogonality and gain on Gaussian input") {
    Rng rng(2);
    QuantizerSpec q = calibrate(2, 0.5, 0.5);
    const double eta = compute_eta(q, 1.0);
    const int n = 1000000;
    cplx ue(0, 0), yu(0, 0);
    double uu = 0.0, ee = 0.0;
    for (int i = 0; i < n; ++i) {
        const cplx u = rng.cgauss();
        cmat um(1, 1);
        um(0, 0) = u;
        const cplx y = reconstruct(quantize(q, um))(0, 0);
        const cplx e = y - (1.0 - eta) * u;
        ue += u * std::conj(e);
        yu += y * std::conj(u);
        uu += std::norm(u);
        ee += std::norm(e);
    }
    CHECK(std::abs(ue) / std::sqrt(uu * ee) < 0.01);
    CHECK(std::abs(yu) / uu == doctest::Approx(1.0 - eta).epsilon(0.01));
}

TEST_CASE("noiseless unquantized Golay estimation is exact") {
    FrameSpec spec = FrameSpec::make(64, 2, 2, 48, 16, 16, Modulation::QpskGray);
    Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        Frame frame = make_frame(spec, 10 + trial);
        const int l_taps = 1 + rng.uniform_int(spec.n_c);
        cvec h(l_taps);
        for (cplx& v : h) v = rng.cgauss();
        ChannelRealization ch(h);
        cmat u = apply_channel(ch, frame.x, 0.0, rng);
        QuantizerSpec qi;
        QuantizedObs obs = quantize(qi, u);
        BussgangParams bg = bussgang_params(0.0, 1.0, norm_sq(h), 0.0);
        GolayEstimate est = golay_channel_estimate(obs, frame, l_taps, bg, 0.0);
        for (int l = 0; l < l_taps; ++l) CHECK(std::abs(est.hhat[l] - h[l]) < 1e-10);
        CHECK(est.hvar == 0.0);
    }
}

TEST_CASE("impulse channel gives an impulse estimate") {
    FrameSpec spec = FrameSpec::make(64, 2, 1, 48, 16, 16, Modulation::QpskGray);
    Frame frame = make_frame(spec, 4);
    cvec h(8, cplx(0, 0));
    h[0] = cplx(1, 0);
    ChannelRealization ch(h);
    Rng rng(5);
    cmat u = apply_channel(ch, frame.x, 0.0, rng);
    QuantizerSpec qi;
    GolayEstimate est = golay_channel_estimate(quantize(qi, u), frame, 8,
                                               bussgang_params(0.0, 1.0, 1.0, 0.0), 0.0);
    CHECK(std::abs(est.hhat[0] - cplx(1, 0)) < 1e-10);
    for (int l = 1; l < 8; ++l) CHECK(std::abs(est.hhat[l]) < 1e-10);
}

TEST_CASE("estimation variance scales like noise over pilot energy") {
    FrameSpec spec = FrameSpec::make(64, 2, 1, 48, 16, 16, Modulation::QpskGray);
    Frame frame = make_frame(spec, 6);
    cvec h = {cplx(0.8, 0.0), cplx(0.0, 0.4), cplx(0.2, -0.2)};
    ChannelRealization ch(h);
    QuantizerSpec qi;
    const BussgangParams bg0 = bussgang_params(0.0, 1.0, 1.0, 0.0);
    auto mse_at = [&](double nv, uint64_t seed) {
        Rng rng(seed);
        double mse = 0.0;
        const int trials = 4000;
        for (int t = 0; t < trials; ++t) {
            cmat u = apply_channel(ch, frame.x, nv, rng);
            GolayEstimate est = golay_channel_estimate(quantize(qi, u), frame, 3, bg0, nv);
            for (int l = 0; l < 3; ++l) mse += std::norm(est.hhat[l] - h[l]);
        }
        return mse / (3.0 * trials);
    };
    const double m1 = mse_at(0.02, 7);
    const double m2 = mse_at(0.08, 8);
    // doubling the noise twice quadruples the per-tap error variance
    CHECK(m2 / m1 == doctest::Approx(4.0).epsilon(0.15));
    // absolute level: noise / (pilot energy * K_P)
    CHECK(m1 == doctest::Approx(0.02 / (64.0 * 2.0)).epsilon(0.15));
}

TEST_CASE("Golay estimator is linear in the observations") {
    FrameSpec spec = FrameSpec::make(32, 2, 1, 24, 8, 8, Modulation::QpskGray);
    Frame frame = make_frame(spec, 9);
    Rng rng(10);
    cmat u1(spec.m, spec.k()), u2(spec.m, spec.k());
    for (cplx& v : u1.data) v = rng.cgauss();
    for (cplx& v : u2.data) v = rng.cgauss();
    cmat sum(spec.m, spec.k());
    for (size_t i = 0; i < sum.size(); ++i) sum.data[i] = u1.data[i] + u2.data[i];
    QuantizerSpec qi;
    const BussgangParams bg = bussgang_params(0.0, 1.0, 1.0, 0.0);
    GolayEstimate a = golay_channel_estimate(quantize(qi, u1), frame, 4, bg, 0.0);
    GolayEstimate b = golay_channel_estimate(quantize(qi, u2), frame, 4, bg, 0.0);
    GolayEstimate c = golay_channel_estimate(quantize(qi, sum), frame, 4, bg, 0.0);
    for (int l = 0; l < 4; ++l) CHECK(std::abs(c.hhat[l] - a.hhat[l] - b.hhat[l]) < 1e-12);
}

TEST_CASE("exact LMMSE: fully known prior returns the means") {
    Rng rng(11);
    cmat y(8, 2), mu(8, 2);
    for (cplx& v : y.data) v = rng.cgauss();
    for (cplx& v : mu.data) v = rng.cgauss();
    std::vector<double> v(16, 0.0);
    cvec h = {cplx(1, 0), cplx(0.5, 0.2)};
    LmmseResult r = lmmse_equalize_exact(y, h, bussgang_params(0.0, 1.0, 1.0, 0.1), mu, v);
    for (size_t i = 0; i < mu.size(); ++i) {
        CHECK(r.xhat.data[i] == mu.data[i]);
        CHECK(r.xvar[i] == 0.0);
    }
}

TEST_CASE("exact LMMSE reduces to the scalar Wiener estimate") {
    cmat y(1, 1), mu(1, 1);
    y(0, 0) = cplx(0.8, -0.3);
    mu(0, 0) = cplx(0.1, 0.1);
    std::vector<double> v = {0.7};
    cvec h = {cplx(1, 0)};
    const double nw = 0.2;
    LmmseResult r = lmmse_equalize_exact(y, h, bussgang_params(0.0, 1.0, 1.0, nw), mu, v);
    const cplx expect = mu(0, 0) + v[0] / (v[0] + nw) * (y(0, 0) - mu(0, 0));
    CHECK(std::abs(r.xhat(0, 0) - expect) < 1e-12);
    CHECK(r.xvar[0] == doctest::Approx(v[0] * nw / (v[0] + nw)).epsilon(1e-12));
    // extrinsic consistency: 1/xvar = 1/qvar + 1/v
    CHECK(1.0 / r.xvar[0] ==
          doctest::Approx(1.0 / r.qvar[0] + 1.0 / v[0]).epsilon(1e-10));
}

TEST_CASE("exact LMMSE matches an independent dense oracle") {
    Rng rng(12);
    const int m = 8, kcols = 2, l = 3;
    cvec h(l);
    for (cplx& v : h) v = rng.cgauss();
    const double eta = 0.12, nw = 0.3;
    BussgangParams bg;
    bg.eta = eta;
    bg.eff_noise_var = nw;
    cmat y(m, kcols), mu(m, kcols);
    std::vector<double> v(m * kcols);
    for (cplx& x : y.data) x = rng.cgauss();
    for (cplx& x : mu.data) x = rng.cgauss();
    for (double& x : v) x = 0.05 + rng.uniform();
    v[3] = 0.0;  // one pinned position
    LmmseResult r = lmmse_equalize_exact(y, h, bg, mu, v);

    // oracle: textbook posterior with an explicit Gauss-Jordan inverse
    for (int k = 0; k < kcols; ++k) {
        std::vector<cvec> a(m, cvec(m));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                int lag = i - j;
                if (lag < 0) lag += m;
                a[i][j] = (lag < l) ? (1.0 - eta) * h[lag] : cplx(0.0, 0.0);
            }
        std::vector<cvec> sigma(m, cvec(m, cplx(0, 0)));
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                for (int t = 0; t < m; ++t)
                    sigma[i][j] += a[i][t] * v[k * m + t] * std::conj(a[j][t]);
                if (i == j) sigma[i][j] += nw;
            }
        std::vector<cvec> inv = test::gj_inverse(sigma);
        for (int n = 0; n < m; ++n) {
            // g_n = v_n a_n^H Sigma^{-1}
            cvec g(m, cplx(0, 0));
            for (int j = 0; j < m; ++j)
                for (int t = 0; t < m; ++t)
                    g[j] += v[k * m + n] * std::conj(a[t][n]) * inv[t][j];
            cplx xh = mu(n, k);
            for (int j = 0; j < m; ++j) {
                cplx resid = y(j, k);
                for (int t = 0; t < m; ++t) resid -= a[j][t] * mu(t, k);
                xh += g[j] * resid;
            }
            double shrink = 0.0;
            for (int j = 0; j < m; ++j) shrink += std::real(g[j] * a[j][n]);
            const double xv = v[k * m + n] * (1.0 - shrink);
            CHECK(std::abs(r.xhat(n, k) - xh) < 1e-10);
            CHECK(std::abs(r.xvar[k * m + n] - xv) < 1e-10);
        }
    }
}

TEST_CASE("fast LMMSE equals exact LMMSE for constant prior variance") {
    Rng rng(13);
    const int m = 16, kcols = 3;
    cvec h = {cplx(0.9, 0.1), cplx(0.2, -0.3), cplx(0.1, 0.05)};
    BussgangParams bg;
    bg.eta = 0.2;
    bg.eff_noise_var = 0.15;
    cmat y(m, kcols), mu(m, kcols);
    for (cplx& x : y.data) x = rng.cgauss();
    for (cplx& x : mu.data) x = rng.cgauss();
    std::vector<double> v(m * kcols, 0.8);
    LmmseResult a = lmmse_equalize_exact(y, h, bg, mu, v);
    LmmseResult b = lmmse_equalize_fast(y, h, bg, mu, v);
    for (size_t i = 0; i < y.size(); ++i) {
        CHECK(std::abs(a.xhat.data[i] - b.xhat.data[i]) < 1e-10);
        CHECK(std::abs(a.xvar[i] - b.xvar[i]) < 1e-10);
        CHECK(std::abs(a.qhat.data[i] - b.qhat.data[i]) < 1e-8);
    }
}

TEST_CASE("fast LMMSE uses exactly 4K+1 transforms") {
    Rng rng(14);
    const int m = 32, kcols = 4;
    cvec h = {cplx(1, 0), cplx(0.4, 0.1)};
    BussgangParams bg;
    bg.eta = 0.1;
    bg.eff_noise_var = 0.2;
    cmat y(m, kcols), mu(m, kcols);
    for (cplx& x : y.data) x = rng.cgauss();
    for (cplx& x : mu.data) x = rng.cgauss();
    std::vector<double> v(m * kcols, 0.5);
    fft_reset_transform_count();
    lmmse_equalize_fast(y, h, bg, mu, v);
    CHECK(fft_transform_count() == 4 * kcols + 1);
}

TEST_CASE("fast LMMSE deviation shrinks as the variance spread shrinks") {
    Rng rng(15);
    const int m = 16, kcols = 2;
    cvec h = {cplx(0.8, 0.2), cplx(0.3, -0.1)};
    BussgangParams bg;
    bg.eta = 0.0;
    bg.eff_noise_var = 0.1;
    cmat y(m, kcols), mu(m, kcols);
    for (cplx& x : y.data) x = rng.cgauss();
    for (cplx& x : mu.data) x = rng.cgauss();
    auto deviation = [&](double spread) {
        std::vector<double> v(m * kcols);
        Rng r2(16);
        for (double& x : v) x = 0.6 + spread * (r2.uniform() - 0.5);
        LmmseResult a = lmmse_equalize_exact(y, h, bg, mu, v);
        LmmseResult b = lmmse_equalize_fast(y, h, bg, mu, v);
        double d = 0.0;
        for (size_t i = 0; i < y.size(); ++i) d += std::norm(a.xhat.data[i] - b.xhat.data[i]);
        return std::sqrt(d);
    };
    const double d_wide = deviation(0.8);
    const double d_mid = deviation(0.2);
    const double d_tiny = deviation(0.02);
    CHECK(d_mid < d_wide);
    CHECK(d_tiny < d_mid);
    CHECK(d_tiny < 0.05);
}
