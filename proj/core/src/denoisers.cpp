#include "fewbit/denoisers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fewbit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kSqrt2OverPi = 0.79788456080286535588;

double norm_pdf(double x) { return std::exp(-0.5 * x * x) * 0.39894228040143267794; }
double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

}  // namespace

double erfcx(double x) {
    if (x < 0.0) return 2.0 * std::exp(x * x) - erfcx(-x);
    // exp(x^2) stays finite and erfc(x) normal up to x ~ 26.6
    if (x < 26.0) return std::exp(x * x) * std::erfc(x);
    // asymptotic series: (1/(x sqrt(pi))) sum_k (-1)^k (2k-1)!! / (2x^2)^k
    const double inv2x2 = 1.0 / (2.0 * x * x);
    double term = 1.0, sum = 1.0;
    for (int k = 1; k <= 10; ++k) {
        term *= -(2.0 * k - 1.0) * inv2x2;
        sum += term;
    }
    return sum / (x * 1.7724538509055160273);
}

namespace {

// Moment ratios of a standard normal truncated to (alpha, beta]:
//   r1 = (phi(alpha) - phi(beta)) / Z
//   r2 = (alpha phi(alpha) - beta phi(beta)) / Z,  Z = Phi(beta) - Phi(alpha)
// so that E[t] = r1 and Var[t] = 1 + r2 - r1^2.
struct TruncRatios {
    double r1;
    double r2;
    bool ok;
};

TruncRatios trunc_ratios(double alpha, double beta) {
    if (alpha == -kInf && beta == kInf) return {0.0, 0.0, true};
    if (alpha == -kInf) {
        // lower bin (-inf, beta]
        double q;
        if (beta >= 0.0) {
            q = norm_pdf(beta) / norm_cdf(beta);
        } else {
            q = kSqrt2OverPi / erfcx(-beta * kInvSqrt2);
        }
        return {-q, -beta * q, std::isfinite(q)};
    }
    if (beta == kInf) {
        double q;
        if (alpha <= 0.0) {
            q = norm_pdf(alpha) / norm_cdf(-alpha);
        } else {
            q = kSqrt2OverPi / erfcx(alpha * kInvSqrt2);
        }
        return {q, alpha * q, std::isfinite(q)};
    }
    if (alpha >= 0.0) {
        // same-sign tail: scale everything by exp(alpha^2/2)
        const double d = std::exp(0.5 * (alpha - beta) * (alpha + beta));  // <= 1
        const double den = erfcx(alpha * kInvSqrt2) - erfcx(beta * kInvSqrt2) * d;
        const double r1 = kSqrt2OverPi * (-std::expm1(0.5 * (alpha - beta) * (alpha + beta))) / den;
        const double r2 = kSqrt2OverPi * (alpha - beta * d) / den;
        bool ok = den > 0.0 && std::isfinite(r1) && std::isfinite(r2);
        return {r1, r2, ok};
    }
    if (beta <= 0.0) {
        TruncRatios m = trunc_ratios(-beta, -alpha);
        return {-m.r1, m.r2, m.ok};
    }
    // straddles zero: direct evaluation is well conditioned
    const double z = norm_cdf(beta) - norm_cdf(alpha);
    const double r1 = (norm_pdf(alpha) - norm_pdf(beta)) / z;
    const double r2 = (alpha * norm_pdf(alpha) - beta * norm_pdf(beta)) / z;
    return {r1, r2, z > 0.0 && std::isfinite(r1) && std::isfinite(r2)};
}

// Posterior mean/variance of the real (or imaginary) component given the bin.
void component_moments(double g_lo, double g_hi, double pc, double prior_var, double noise_var_c,
                       double& zc, double& vc) {
    const double s2 = prior_var + noise_var_c;
    const double s = std::sqrt(s2);
    const double alpha = (g_lo == -kInf) ? -kInf : (g_lo - pc) / s;
    const double beta = (g_hi == kInf) ? kInf : (g_hi - pc) / s;
    TruncRatios m = trunc_ratios(alpha, beta);
    const double tau2 = prior_var * noise_var_c / s2;
    if (!m.ok) {
        // both tail probabilities underflowed: pin the pre-quantizer value to
        // the nearest bin edge
        double edge = 0.0;
        if (g_lo != -kInf && pc < g_lo) edge = g_lo;
        else if (g_hi != kInf && pc > g_hi) edge = g_hi;
        else edge = (g_lo == -kInf) ? g_hi : g_lo;
        zc = pc + prior_var / s2 * (edge - pc);
        vc = tau2;
        return;
    }
    double var_u = s2 * std::max(0.0, 1.0 + m.r2 - m.r1 * m.r1);
    zc = pc + prior_var / s * m.r1;
    vc = tau2 + (prior_var / s2) * (prior_var / s2) * var_u;
    vc = std::clamp(vc, 0.0, prior_var);
}

}  // namespace

OutputPosterior quantized_output_moments(int bin_re, int bin_im, cplx phat, double pvar,
                                         double noise_var, const QuantizerSpec& q) {
    if (pvar <= 0.0) throw std::invalid_argument("quantized_output_moments: pvar must be positive");
    if (q.is_infinite())
        throw std::invalid_argument("quantized_output_moments: use awgn_output_moments for infinite bits");
    auto [lo_re, hi_re] = q.bin_interval(bin_re, false);
    auto [lo_im, hi_im] = q.bin_interval(bin_im, true);
    double zr, vr, zi, vi;
    component_moments(lo_re, hi_re, phat.real(), 0.5 * pvar, 0.5 * noise_var, zr, vr);
    component_moments(lo_im, hi_im, phat.imag(), 0.5 * pvar, 0.5 * noise_var, zi, vi);
    return {cplx(zr, zi), vr + vi};
}

OutputPosterior awgn_output_moments(cplx y, cplx phat, double pvar, double noise_var) {
    if (pvar <= 0.0) throw std::invalid_argument("awgn_output_moments: pvar must be positive");
    if (noise_var == 0.0) return {y, 0.0};
    const double den = pvar + noise_var;
    return {(pvar * y + noise_var * phat) / den, pvar * noise_var / den};
}

OutputPosterior bussgang_output_moments(cplx y_recon, cplx phat, double pvar, double eff_noise_var,
                                        double eta) {
    if (eta < 0.0 || eta >= 1.0) throw std::invalid_argument("bussgang_output_moments: eta in [0,1)");
    const double g = 1.0 - eta;
    return awgn_output_moments(y_recon / g, phat, pvar, eff_noise_var / (g * g));
}

GmmPosterior gmm_input_moments(cplx rhat, double rvar, const double* weights, const double* vars,
                               int d) {
    if (rvar <= 0.0) throw std::invalid_argument("gmm_input_moments: rvar must be positive");
    if (d <= 0 || d > GmmPosterior::kMaxComponents)
        throw std::invalid_argument("gmm_input_moments: bad component count");
    const double r2 = std::norm(rhat);
    double logw[GmmPosterior::kMaxComponents];
    double max_logw = -kInf;
    bool degenerate = true;
    for (int i = 0; i < d; ++i) {
        if (vars[i] > 0.0) degenerate = false;
        if (weights[i] <= 0.0) {
            logw[i] = -kInf;
            continue;
        }
        const double tv = vars[i] + rvar;
        logw[i] = std::log(weights[i]) - std::log(tv) - r2 / tv;
        max_logw = std::max(max_logw, logw[i]);
    }
    if (degenerate) throw std::invalid_argument("gmm_input_moments: all component variances are zero");
    if (max_logw == -kInf) throw std::invalid_argument("gmm_input_moments: all weights are zero");

    GmmPosterior out;
    out.d = d;
    double norm = 0.0;
    for (int i = 0; i < d; ++i) {
        out.resp[i] = (logw[i] == -kInf) ? 0.0 : std::exp(logw[i] - max_logw);
        norm += out.resp[i];
    }
    cplx mean(0.0, 0.0);
    double sm_total = 0.0;
    for (int i = 0; i < d; ++i) {
        out.resp[i] /= norm;
        const double tv = vars[i] + rvar;
        const cplx mu = vars[i] / tv * rhat;
        const double v = vars[i] * rvar / tv;
        out.second_moment[i] = v + std::norm(mu);
        mean += out.resp[i] * mu;
        sm_total += out.resp[i] * out.second_moment[i];
    }
    out.hhat = mean;
    out.hvar = std::max(0.0, sm_total - std::norm(mean));
    return out;
}

void symbol_input_moments_into(cplx qhat, double qvar, const cvec& points, const double* prior_pmf,
                               int n_points, double* pmf_out, cplx& xhat, double& xvar) {
    if (qvar <= 0.0) throw std::invalid_argument("symbol_input_moments: qvar must be positive");
    double max_log = -kInf;
    for (int j = 0; j < n_points; ++j) {
        if (prior_pmf[j] <= 0.0) {
            pmf_out[j] = -kInf;
            continue;
        }
        pmf_out[j] = std::log(prior_pmf[j]) - std::norm(points[j] - qhat) / qvar;
        max_log = std::max(max_log, pmf_out[j]);
    }
    if (max_log == -kInf) throw std::invalid_argument("symbol_input_moments: all-zero prior pmf");
    double norm = 0.0;
    for (int j = 0; j < n_points; ++j) {
        pmf_out[j] = (pmf_out[j] == -kInf) ? 0.0 : std::exp(pmf_out[j] - max_log);
        norm += pmf_out[j];
    }
    cplx mean(0.0, 0.0);
    for (int j = 0; j < n_points; ++j) {
        pmf_out[j] /= norm;
        mean += pmf_out[j] * points[j];
    }
    double var = 0.0;
    for (int j = 0; j < n_points; ++j) var += pmf_out[j] * std::norm(points[j] - mean);
    xhat = mean;
    xvar = var;
}

SymbolPosterior symbol_input_moments(cplx qhat, double qvar, const cvec& points,
                                     const double* prior_pmf) {
    SymbolPosterior out;
    out.pmf.resize(points.size());
    symbol_input_moments_into(qhat, qvar, points, prior_pmf, static_cast<int>(points.size()),
                              out.pmf.data(), out.xhat, out.xvar);
    return out;
}

}  // namespace fewbit
