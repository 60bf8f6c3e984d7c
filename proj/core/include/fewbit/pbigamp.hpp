#pragma once

#include <string>
#include <vector>

#include "fewbit/common.hpp"
#include "fewbit/denoisers.hpp"
#include "fewbit/frame.hpp"
#include "fewbit/quantizer.hpp"

namespace fewbit {

// Zero-mean complex Gaussian mixture over the channel taps; weights/variances
// either shared across taps or one row per tap.
struct GmmPrior {
    int d = 0;
    bool per_tap = false;
    std::vector<double> weights;  // d entries, or l*d tap-major
    std::vector<double> vars;

    static GmmPrior shared(std::vector<double> w, std::vector<double> v);

    const double* tap_weights(int l) const { return weights.data() + (per_tap ? l * d : 0); }
    const double* tap_vars(int l) const { return vars.data() + (per_tap ? l * d : 0); }
    void validate(int l_taps) const;
};

// sum_l log sum_d lambda_d CN(rhat_l; 0, nu_d + rvar); the EM surrogate
// objective on fixed pseudo-measurements.
double gmm_marginal_loglik(const GmmPrior& prior, const cvec& rhat, double rvar);

enum class OutputChannel { QuantizedExact, BussgangAwgn };

struct EqualizerConfig {
    int t_max = 50;
    int min_iters = 7;
    double stop_tol = 0.01;
    double damping = 1.0;  // 1 = off
    double var_floor = 1e-12;
    bool em_enabled = false;
    bool scale_enabled = false;
    bool channel_known = false;   // PCSI: channel denoiser bypassed
    double measured_power = -1.0; // total ||U||_F^2; negative = unavailable
    double symbol_var = 1.0;
    OutputChannel output = OutputChannel::QuantizedExact;
    double bussgang_eta = 0.0;
    double bussgang_noise_var = 0.0;
};

// Per-data-symbol pmfs over the base alphabet.
struct SymbolPriors {
    int n_symbols = 0;
    int n_points = 0;
    std::vector<double> pmf;  // symbol-major

    static SymbolPriors uniform(int n_symbols, int n_points);
    const double* at(int n) const { return pmf.data() + static_cast<size_t>(n) * n_points; }
    double* at(int n) { return pmf.data() + static_cast<size_t>(n) * n_points; }
};

struct EqualizerState {
    cmat xhat;   // M x K, known positions pinned
    double xvar = 0.0;
    cvec hhat;   // L taps
    double hvar = 0.0;
    cmat shat;   // M x K
    cmat xfreq;  // cached F_M xhat (pilot columns fixed at init)

    double nu_p_bar = 0.0, nu_p = 0.0, nu_z = 0.0, nu_s = 0.0, nu_r = 0.0, nu_q = 0.0;
    int iter = 0;
    int scale_skips = 0;  // Eq-norm scaling skipped on a negative radicand

    std::vector<double> post_pmf;  // gamma-bar per data symbol (last iteration)

    int l_taps() const { return static_cast<int>(hhat.size()); }
};

// Optional capture of one iteration's internals for cross-checks.
struct IterateDiag {
    cmat zhat;
    cvec rhat;
    cmat qhat;  // data columns only; pilot columns are never formed
};

struct TraceRow {
    int t;
    double nu_x, nu_h, nu_p, nu_s;
    double residual;  // sum |xhat[t+1]-xhat[t]|^2 / sum |xhat[t+1]|^2
};

struct EqualizeResult {
    std::vector<double> post_pmf;  // per data symbol, gamma-bar
    cvec hhat;
    double hvar = 0.0;
    int iters_used = 0;
    GmmPrior learned_prior;
};

EqualizerState init_state(const Frame& frame, const cvec& hhat_init, double hvar_init,
                          const SymbolPriors& priors);

// One Table-style sweep: FFT-domain bilinear products, output denoising,
// residual update, and the two input denoisers with known positions bypassed.
// Consumes exactly 4K+2-2K_P M-point transforms. Mutates prior when EM is on.
void iterate(EqualizerState& s, const QuantizedObs& obs, const Frame& frame, GmmPrior& prior,
             const SymbolPriors& priors, double noise_var, const EqualizerConfig& cfg,
             IterateDiag* diag = nullptr);

// Rescales hhat so ||hhat|| matches the norm implied by the measured receive
// power; skipped (counted in scale_skips) when the radicand is negative.
void scale_channel(EqualizerState& s, double measured_power, double symbol_var, double noise_var);

// Shared-parameter EM M-step from the per-tap posterior responsibilities and
// second moments. Components with no responsibility mass are frozen.
GmmPrior em_update(const GmmPrior& prior, const std::vector<GmmPosterior>& tap_posteriors);

EqualizeResult run(const QuantizedObs& obs, const Frame& frame, const GmmPrior& prior,
                   double noise_var, const EqualizerConfig& cfg, const SymbolPriors& priors,
                   const cvec& hhat_init, double hvar_init,
                   std::vector<TraceRow>* trace = nullptr);

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path);

// Prior mean of data symbol n (rotation applied) and the average prior
// variance over all unknown positions.
cplx symbol_prior_mean(const Frame& frame, const SymbolPriors& priors, int n);
double symbol_prior_avg_var(const Frame& frame, const SymbolPriors& priors);

}  // namespace fewbit
