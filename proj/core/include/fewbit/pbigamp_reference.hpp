#pragma once

#include <functional>
#include <vector>

#include "fewbit/common.hpp"
#include "fewbit/denoisers.hpp"
#include "fewbit/pbigamp.hpp"

namespace fewbit {

// Dense scalar-variance PBiGAMP over an arbitrary z^{(n,l)} tensor. This is a
// reference implementation for validating the FFT-specialized equalizer: it
// runs the generic recursion in O(P*N*L) per iteration with no transform
// shortcuts and no structural identities.
struct GenericProblem {
    int p = 0;  // measurements
    int n = 0;  // x entries
    int l = 0;  // h entries
    // z[i*l + j] is the P-vector z^{(i,j)}
    std::vector<cvec> z;
    // discrete prior per x entry (point mass encodes a known pilot/guard)
    std::vector<cvec> x_points;
    std::vector<std::vector<double>> x_pmf;
    GmmPrior h_prior;
    std::function<OutputPosterior(int m, cplx phat, double pvar)> output_moments;

    const cvec& zt(int i, int j) const { return z[static_cast<size_t>(i) * l + j]; }
};

struct GenericIterate {
    cvec zhat;       // P
    cvec rhat;       // L
    cvec qhat;       // N
    cvec xhat_next;  // N
    cvec hhat_next;  // L
    double nu_p_bar = 0, nu_p = 0, nu_z = 0, nu_s = 0, nu_r = 0, nu_q = 0;
    double nu_x_next = 0, nu_h_next = 0;
};

std::vector<GenericIterate> run_generic_pbigamp(const GenericProblem& prob, const cvec& xhat0,
                                                double xvar0, const cvec& hhat0, double hvar0,
                                                int iters, double var_floor);

}  // namespace fewbit
