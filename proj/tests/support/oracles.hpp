#pragma once

// Independent reference computations for the test suites: plain quadrature,
// dense linear algebra, and exhaustive enumeration. Nothing here shares code
// with the library paths under test.

#include <functional>
#include <vector>

#include "fewbit/coding.hpp"
#include "fewbit/common.hpp"
#include "fewbit/denoisers.hpp"
#include "fewbit/frame.hpp"
#include "fewbit/pbigamp_reference.hpp"
#include "fewbit/quantizer.hpp"

namespace fewbit::test {

// Gauss-Legendre nodes/weights on [-1,1]
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Composite Gauss-Legendre integration of f over [a,b].
double integrate(const std::function<double(double)>& f, double a, double b, int panels = 24);

// Mean and variance of a standard normal truncated to (alpha, beta), by
// adaptive quadrature of the shifted density (no erfc-based ratios).
void trunc_gauss_moments_quad(double alpha, double beta, double& mean, double& var);

// Quadrature evaluation of the quantized-output posterior moments.
OutputPosterior quantized_output_oracle(int bin_re, int bin_im, cplx phat, double pvar,
                                        double noise_var, const QuantizerSpec& q);

// 2-D quadrature of the GMM-prior posterior moments.
void gmm_moments_quad(cplx rhat, double rvar, const double* weights, const double* vars, int d,
                      cplx& hhat, double& hvar);

// Direct dense circulant multiply, column by column.
cmat dense_circulant_apply(const cvec& h, const cmat& x);

// Gauss-Jordan inverse of a dense complex matrix (row-major vector of rows).
std::vector<cvec> gj_inverse(std::vector<cvec> a);

// Exhaustive max-likelihood codeword search over all info words.
std::vector<uint8_t> ml_decode(const CodeSpec& code, const std::vector<double>& llr);

// Dense bilinear tensor z^{(n,l)} = [I_K (x) J_l]_{:,n} plus the matching
// priors/likelihood for the generic reference recursion.
GenericProblem build_generic_problem(const Frame& frame, const QuantizedObs& obs, int l_taps,
                                     double noise_var, const GmmPrior& gmm,
                                     const SymbolPriors& priors);

}  // namespace fewbit::test
