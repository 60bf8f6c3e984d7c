#pragma once

#include <array>
#include <vector>

#include "fewbit/common.hpp"
#include "fewbit/quantizer.hpp"

namespace fewbit {

struct OutputPosterior {
    cplx zhat;
    double zvar = 0.0;  // sum of real/imag component variances
};

struct GmmPosterior {
    static constexpr int kMaxComponents = 8;
    cplx hhat;
    double hvar = 0.0;
    int d = 0;
    std::array<double, kMaxComponents> resp{};           // lambda-bar per component
    std::array<double, kMaxComponents> second_moment{};  // E[|h|^2 | component]
};

struct SymbolPosterior {
    cplx xhat;
    double xvar = 0.0;
    std::vector<double> pmf;
};

// Posterior moments of z ~ CN(phat, pvar) observed through the mid-rise ADC
// bins (bin_re, bin_im) with complex AWGN of variance noise_var before the
// quantizer. Evaluated in the scaled-erfc domain; stays finite for |phat| up
// to ~40 posterior standard deviations.
OutputPosterior quantized_output_moments(int bin_re, int bin_im, cplx phat, double pvar,
                                         double noise_var, const QuantizerSpec& q);

// Unquantized limit: conjugate-Gaussian update against the raw observation.
OutputPosterior awgn_output_moments(cplx y, cplx phat, double pvar, double noise_var);

// Bussgang-linearized observation y_recon = (1-eta) z + w_eff: rescales the
// observation by 1/(1-eta) and applies the conjugate-Gaussian update with the
// correspondingly scaled effective noise variance.
OutputPosterior bussgang_output_moments(cplx y_recon, cplx phat, double pvar,
                                        double eff_noise_var, double eta);

// Posterior moments of h under a zero-mean D-component complex Gaussian
// mixture prior and the pseudo-measurement rhat = h + CN(0, rvar).
GmmPosterior gmm_input_moments(cplx rhat, double rvar, const double* weights, const double* vars,
                               int d);

// Posterior pmf and moments of a discrete symbol under prior pmf gamma and
// the pseudo-measurement qhat = x + CN(0, qvar).
SymbolPosterior symbol_input_moments(cplx qhat, double qvar, const cvec& points,
                                     const double* prior_pmf);
void symbol_input_moments_into(cplx qhat, double qvar, const cvec& points, const double* prior_pmf,
                               int n_points, double* pmf_out, cplx& xhat, double& xvar);

// exp(x^2) erfc(x), finite for all x >= 0
double erfcx(double x);

}  // namespace fewbit
