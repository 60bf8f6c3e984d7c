#include <doctest.h>

#include <cmath>

#include "fewbit/common.hpp"
#include "fewbit/denoisers.hpp"
#include "fewbit/frame.hpp"
#include "support/oracles.hpp"

using namespace fewbit;

namespace {

bool close_rel(double a, double b, double tol, double scale) {
    return std::abs(a - b) <= tol * std::max(std::abs(b), scale);
}
bool close_rel(cplx a, cplx b, double tol, double scale) {
    return std::abs(a - b) <= tol * std::max(std::abs(b), scale);
}

}  // namespace

TEST_CASE("infinite-bit output moments are the conjugate-Gaussian update") {
    const cplx y(0.7, -1.2), phat(0.2, 0.4);
    const double pvar = 0.8, nv = 0.3;
    OutputPosterior o = awgn_output_moments(y, phat, pvar, nv);
    CHECK(std::abs(o.zhat - (pvar * y + nv * phat) / (pvar + nv)) < 1e-15);
    CHECK(o.zvar == doctest::Approx(pvar * nv / (pvar + nv)).epsilon(1e-14));
    // zero noise pins to the observation
    OutputPosterior o0 = awgn_output_moments(y, phat, pvar, 0.0);
    CHECK(o0.zhat == y);
    CHECK(o0.zvar == 0.0);
}

TEST_CASE("1-bit half-Gaussian mean") {
    QuantizerSpec q;
    q.bits = 1;
    q.delta_re = q.delta_im = 1.0;
    // positive-half bins, phat = 0, pvar = 1, no noise
    OutputPosterior o = quantized_output_moments(2, 2, cplx(0, 0), 1.0, 0.0, q);
    CHECK(o.zhat.real() == doctest::Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-10));
    CHECK(o.zhat.imag() == doctest::Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-10));
}

TEST_CASE("quantized output moments match the quadrature oracle") {
    Rng rng(11);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int bits = 1 + rng.uniform_int(3);
        QuantizerSpec q = calibrate(bits, 0.3 + rng.uniform(), 0.3 + rng.uniform());
        const double pvar = std::pow(10.0, -3.0 + 4.0 * rng.uniform());
        const double nv = (trial % 4 == 0) ? 0.0 : std::pow(10.0, -3.0 + 4.0 * rng.uniform());
        const double sd = std::sqrt(0.5 * (pvar + nv));
        // means up to 30 posterior standard deviations out
        const double reach = 30.0 * sd * rng.uniform();
        const cplx phat(reach * (rng.uniform() < 0.5 ? -1 : 1) * rng.uniform(),
                        reach * (rng.uniform() < 0.5 ? -1 : 1) * rng.uniform());
        const int bin_re = 1 + rng.uniform_int(q.num_bins());
        const int bin_im = 1 + rng.uniform_int(q.num_bins());
        OutputPosterior got = quantized_output_moments(bin_re, bin_im, phat, pvar, nv, q);
        OutputPosterior ref = test::quantized_output_oracle(bin_re, bin_im, phat, pvar, nv, q);
        CHECK(close_rel(got.zhat, ref.zhat, 1e-8, 1e-8 * sd));
        CHECK(close_rel(got.zvar, ref.zvar, 1e-8, 1e-10 * pvar));
        ++checked;
    }
    CHECK(checked == 200);
}

TEST_CASE("output variance never exceeds the prior variance") {
    Rng rng(12);
    for (int trial = 0; trial < 300; ++trial) {
        const int bits = 1 + rng.uniform_int(4);
        QuantizerSpec q = calibrate(bits, 1.0, 1.0);
        const double pvar = std::pow(10.0, -2 + 3 * rng.uniform());
        const double nv = rng.uniform();
        const cplx phat = 5.0 * rng.cgauss();
        OutputPosterior o = quantized_output_moments(1 + rng.uniform_int(q.num_bins()),
                                                     1 + rng.uniform_int(q.num_bins()), phat, pvar,
                                                     nv, q);
        CHECK(o.zvar <= pvar + 1e-12);
        CHECK(o.zvar >= 0.0);
    }
}

TEST_CASE("8-bit output moments approach the unquantized limit") {
    Rng rng(13);
    QuantizerSpec q = calibrate(8, 0.5, 0.5);
    double max_gap = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const cplx u = rng.cgauss();
        const cplx phat = u + 0.2 * rng.cgauss();
        const double pvar = 0.05, nv = 0.04;
        cmat um(1, 1);
        um(0, 0) = u;
        QuantizedObs obs = quantize(q, um);
        OutputPosterior a =
            quantized_output_moments(obs.bin_re(0, 0), obs.bin_im(0, 0), phat, pvar, nv, q);
        // the unquantized update sees the reconstruction level
        cmat rec = reconstruct(obs);
        OutputPosterior b = awgn_output_moments(rec(0, 0), phat, pvar, nv);
        max_gap = std::max(max_gap, std::abs(a.zhat - b.zhat));
        max_gap = std::max(max_gap, std::abs(a.zvar - b.zvar));
    }
    CHECK(max_gap < 1e-3);
}

TEST_CASE("deep-tail bins stay finite out to 40 sigma") {
    QuantizerSpec q = calibrate(2, 1.0, 1.0);
    for (double reach : {10.0, 20.0, 30.0, 40.0}) {
        const double pvar = 0.5, nv = 0.1;
        const double sd = std::sqrt(0.5 * (pvar + nv));
        OutputPosterior o = quantized_output_moments(1, q.num_bins(), cplx(reach * sd, -reach * sd),
                                                     pvar, nv, q);
        CHECK(std::isfinite(o.zhat.real()));
        CHECK(std::isfinite(o.zhat.imag()));
        CHECK(std::isfinite(o.zvar));
        CHECK(o.zvar >= 0.0);
        // posterior mean pulled toward the observed bin
        CHECK(o.zhat.real() < reach * sd);
        CHECK(o.zhat.imag() > -reach * sd);
    }
}

TEST_CASE("bussgang output moments") {
    const cplx y(0.9, -0.4), phat(-0.1, 0.3);
    const double pvar = 0.6, eff = 0.25, eta = 0.3634;
    // eta = 0 reduces to the plain conjugate update
    OutputPosterior a = bussgang_output_moments(y, phat, pvar, eff, 0.0);
    OutputPosterior b = awgn_output_moments(y, phat, pvar, eff);
    CHECK(a.zhat == b.zhat);
    CHECK(a.zvar == b.zvar);
    // prior-dominated limit
    OutputPosterior c = bussgang_output_moments(y, phat, 1e-14, eff, eta);
    CHECK(std::abs(c.zhat - phat) < 1e-10);
    CHECK(c.zvar < 1e-12);
    // algebraic form
    const double g = 1.0 - eta;
    const cplx yt = y / g;
    const double s2 = eff / (g * g);
    OutputPosterior d = bussgang_output_moments(y, phat, pvar, eff, eta);
    CHECK(std::abs(d.zhat - (pvar * yt + s2 * phat) / (pvar + s2)) < 1e-12);
    CHECK(d.zvar == doctest::Approx(pvar * s2 / (pvar + s2)).epsilon(1e-12));
}

TEST_CASE("GMM moments: Gaussian conjugacy and degenerate mixtures") {
    const cplx rhat(0.8, -0.5);
    const double rvar = 0.4, v = 1.3;
    double w1[] = {1.0};
    double v1[] = {v};
    GmmPosterior a = gmm_input_moments(rhat, rvar, w1, v1, 1);
    CHECK(std::abs(a.hhat - v * rhat / (v + rvar)) < 1e-14);
    CHECK(a.hvar == doctest::Approx(v * rvar / (v + rvar)).epsilon(1e-12));

    double w2[] = {1.0, 0.0};
    double v2[] = {v, 7.0};
    GmmPosterior b = gmm_input_moments(rhat, rvar, w2, v2, 2);
    CHECK(std::abs(b.hhat - a.hhat) < 1e-14);
    CHECK(b.hvar == doctest::Approx(a.hvar).epsilon(1e-12));
    CHECK(b.resp[0] == 1.0);
    CHECK(b.resp[1] == 0.0);

    double vz[] = {0.0, 0.0};
    double wz[] = {0.5, 0.5};
    CHECK_THROWS(gmm_input_moments(rhat, rvar, wz, vz, 2));
}

TEST_CASE("GMM moments match 2-D quadrature") {
    Rng rng(14);
    for (int trial = 0; trial < 25; ++trial) {
        double w[3], v[3];
        double sum = 0.0;
        for (int i = 0; i < 3; ++i) {
            w[i] = 0.1 + rng.uniform();
            sum += w[i];
            v[i] = 0.1 + 3.9 * rng.uniform();
        }
        for (int i = 0; i < 3; ++i) w[i] /= sum;
        const double rvar = 0.05 + 1.95 * rng.uniform();
        const cplx rhat = 2.0 * rng.cgauss();
        GmmPosterior got = gmm_input_moments(rhat, rvar, w, v, 3);
        cplx ref_h;
        double ref_v;
        test::gmm_moments_quad(rhat, rvar, w, v, 3, ref_h, ref_v);
        CHECK(close_rel(got.hhat, ref_h, 1e-8, 1e-8));
        CHECK(close_rel(got.hvar, ref_v, 1e-8, 1e-10));
        CHECK(got.hvar >= 0.0);
    }
}

TEST_CASE("symbol moments: symmetry, point mass, and enumeration") {
    int a = 0;
    cvec bpsk = make_alphabet(Modulation::Pi2Bpsk, a);
    double uni[] = {0.5, 0.5};
    SymbolPosterior s = symbol_input_moments(cplx(0, 0), 1.0, bpsk, uni);
    CHECK(std::abs(s.xhat) < 1e-15);
    CHECK(s.xvar == doctest::Approx(1.0).epsilon(1e-12));

    double point[] = {0.0, 1.0};
    SymbolPosterior p = symbol_input_moments(cplx(0.3, 0.9), 0.5, bpsk, point);
    CHECK(p.xhat == bpsk[1]);
    CHECK(p.xvar == 0.0);

    cvec qam = make_alphabet(Modulation::Qam16Gray, a);
    Rng rng(15);
    for (int trial = 0; trial < 50; ++trial) {
        double prior[16];
        double sum = 0.0;
        for (double& g : prior) {
            g = rng.uniform() + 1e-3;
            sum += g;
        }
        for (double& g : prior) g /= sum;
        const cplx qhat = 1.5 * rng.cgauss();
        const double qvar = 0.02 + rng.uniform();
        SymbolPosterior got = symbol_input_moments(qhat, qvar, qam, prior);
        // direct evaluation with explicit normalization
        double ref[16], rs = 0.0;
        for (int j = 0; j < 16; ++j) {
            ref[j] = prior[j] * std::exp(-std::norm(qam[j] - qhat) / qvar);
            rs += ref[j];
        }
        cplx mean(0, 0);
        for (int j = 0; j < 16; ++j) {
            ref[j] /= rs;
            mean += ref[j] * qam[j];
        }
        double var = 0.0;
        for (int j = 0; j < 16; ++j) var += ref[j] * std::norm(qam[j] - mean);
        for (int j = 0; j < 16; ++j) CHECK(got.pmf[j] == doctest::Approx(ref[j]).epsilon(1e-12));
        CHECK(std::abs(got.xhat - mean) < 1e-12);
        CHECK(got.xvar == doctest::Approx(var).epsilon(1e-10));
    }
    double zeros[16] = {0};
    CHECK_THROWS(symbol_input_moments(cplx(0, 0), 1.0, qam, zeros));
}

TEST_CASE("input denoisers are rotation equivariant") {
    Rng rng(16);
    const cplx rot = std::exp(cplx(0, 1.234));
    double w[] = {0.6, 0.4};
    double v[] = {2.0, 0.1};
    for (int trial = 0; trial < 20; ++trial) {
        const cplx rhat = rng.cgauss();
        const double rvar = 0.2 + rng.uniform();
        GmmPosterior a = gmm_input_moments(rhat, rvar, w, v, 2);
        GmmPosterior b = gmm_input_moments(rot * rhat, rvar, w, v, 2);
        CHECK(std::abs(b.hhat - rot * a.hhat) < 1e-13);
        CHECK(b.hvar == doctest::Approx(a.hvar).epsilon(1e-10));
    }
    int abits = 0;
    cvec qam = make_alphabet(Modulation::Qam16Gray, abits);
    cvec qam_rot(16);
    for (int j = 0; j < 16; ++j) qam_rot[j] = rot * qam[j];
    double prior[16];
    for (double& g : prior) g = 1.0 / 16;
    for (int trial = 0; trial < 20; ++trial) {
        const cplx qhat = rng.cgauss();
        const double qvar = 0.1 + rng.uniform();
        SymbolPosterior a = symbol_input_moments(qhat, qvar, qam, prior);
        SymbolPosterior b = symbol_input_moments(rot * qhat, qvar, qam_rot, prior);
        CHECK(std::abs(b.xhat - rot * a.xhat) < 1e-13);
        CHECK(b.xvar == doctest::Approx(a.xvar).epsilon(1e-10));
        for (int j = 0; j < 16; ++j) CHECK(b.pmf[j] == doctest::Approx(a.pmf[j]).epsilon(1e-10));
    }
}

TEST_CASE("input posterior variance does not exceed the prior variance") {
    Rng rng(17);
    double w[] = {0.7, 0.3};
    double v[] = {1.5, 0.05};
    const double prior_var = 0.7 * 1.5 + 0.3 * 0.05;
    for (int trial = 0; trial < 100; ++trial) {
        GmmPosterior g = gmm_input_moments(2.0 * rng.cgauss(), 0.1 + rng.uniform(), w, v, 2);
        CHECK(g.hvar <= prior_var + 1e-12);
    }
    int a = 0;
    cvec qpsk = make_alphabet(Modulation::QpskGray, a);
    double uni[] = {0.25, 0.25, 0.25, 0.25};
    for (int trial = 0; trial < 100; ++trial) {
        SymbolPosterior s =
            symbol_input_moments(rng.cgauss(), 0.05 + rng.uniform(), qpsk, uni);
        CHECK(s.xvar <= 1.0 + 1e-12);
    }
}
