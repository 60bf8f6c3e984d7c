#include "fewbit/pbigamp.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "fewbit/dft.hpp"

namespace fewbit {

GmmPrior GmmPrior::shared(std::vector<double> w, std::vector<double> v) {
    GmmPrior p;
    p.d = static_cast<int>(w.size());
    p.per_tap = false;
    p.weights = std::move(w);
    p.vars = std::move(v);
    return p;
}

void GmmPrior::validate(int l_taps) const {
    if (d <= 0 || d > GmmPosterior::kMaxComponents)
        throw std::invalid_argument("GmmPrior: bad component count");
    const size_t expect = per_tap ? static_cast<size_t>(l_taps) * d : static_cast<size_t>(d);
    if (weights.size() != expect || vars.size() != expect)
        throw std::invalid_argument("GmmPrior: parameter shape mismatch");
    const int rows = per_tap ? l_taps : 1;
    for (int r = 0; r < rows; ++r) {
        double sum = 0.0;
        for (int i = 0; i < d; ++i) {
            const double w = weights[r * d + i];
            if (w < 0.0) throw std::invalid_argument("GmmPrior: negative weight");
            if (vars[r * d + i] < 0.0) throw std::invalid_argument("GmmPrior: negative variance");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("GmmPrior: weights must sum to 1");
    }
}

double gmm_marginal_loglik(const GmmPrior& prior, const cvec& rhat, double rvar) {
    const int l_taps = static_cast<int>(rhat.size());
    prior.validate(l_taps);
    double total = 0.0;
    for (int l = 0; l < l_taps; ++l) {
        const double* w = prior.tap_weights(l);
        const double* v = prior.tap_vars(l);
        double max_lg = -1e300;
        double lg[GmmPosterior::kMaxComponents];
        for (int i = 0; i < prior.d; ++i) {
            if (w[i] <= 0.0) {
                lg[i] = -1e300;
                continue;
            }
            const double tv = v[i] + rvar;
            lg[i] = std::log(w[i]) - std::log(M_PI * tv) - std::norm(rhat[l]) / tv;
            max_lg = std::max(max_lg, lg[i]);
        }
        double s = 0.0;
        for (int i = 0; i < prior.d; ++i) s += std::exp(lg[i] - max_lg);
        total += max_lg + std::log(s);
    }
    return total;
}

SymbolPriors SymbolPriors::uniform(int n_symbols, int n_points) {
    SymbolPriors p;
    p.n_symbols = n_symbols;
    p.n_points = n_points;
    p.pmf.assign(static_cast<size_t>(n_symbols) * n_points, 1.0 / n_points);
    return p;
}

cplx symbol_prior_mean(const Frame& frame, const SymbolPriors& priors, int n) {
    const double* g = priors.at(n);
    cplx mean(0.0, 0.0);
    for (int j = 0; j < priors.n_points; ++j) mean += g[j] * frame.spec.alphabet[j];
    return mean * frame.rotation(n);
}

double symbol_prior_avg_var(const Frame& frame, const SymbolPriors& priors) {
    double total = 0.0;
    for (int n = 0; n < priors.n_symbols; ++n) {
        const double* g = priors.at(n);
        cplx mean(0.0, 0.0);
        for (int j = 0; j < priors.n_points; ++j) mean += g[j] * frame.spec.alphabet[j];
        for (int j = 0; j < priors.n_points; ++j)
            total += g[j] * std::norm(frame.spec.alphabet[j] - mean);
    }
    return priors.n_symbols > 0 ? total / priors.n_symbols : 0.0;
}

EqualizerState init_state(const Frame& frame, const cvec& hhat_init, double hvar_init,
                          const SymbolPriors& priors) {
    const FrameSpec& fs = frame.spec;
    if (priors.n_symbols != fs.data_symbols() || priors.n_points != (1 << fs.a))
        throw std::invalid_argument("init_state: prior shape mismatch");
    if (hhat_init.empty()) throw std::invalid_argument("init_state: empty channel init");
    if (hvar_init < 0.0) throw std::invalid_argument("init_state: negative hvar");

    EqualizerState s;
    s.xhat = frame.x;
    for (int k = fs.k_p; k < fs.k(); ++k)
        for (int m = 0; m < fs.n_d; ++m)
            s.xhat(m, k) = symbol_prior_mean(frame, priors, frame.data_index(m, k));
    // nu_x[1] = (sum of prior variances over unknowns) / (MK)
    s.xvar = symbol_prior_avg_var(frame, priors) * fs.data_symbols() /
             (static_cast<double>(fs.m) * fs.k());
    s.hhat = hhat_init;
    s.hvar = hvar_init;
    s.shat = cmat(fs.m, fs.k());
    s.xfreq = cmat(fs.m, fs.k());
    // pilot columns never change; transform them once here
    cvec work(fs.m);
    for (int k = 0; k < fs.k_p; ++k) {
        std::copy(s.xhat.col(k), s.xhat.col(k) + fs.m, work.begin());
        fft_unitary(work);
        std::copy(work.begin(), work.end(), s.xfreq.col(k));
    }
    s.post_pmf.assign(static_cast<size_t>(fs.data_symbols()) * priors.n_points, 0.0);
    return s;
}

void scale_channel(EqualizerState& s, double measured_power, double symbol_var, double noise_var) {
    const double mk = static_cast<double>(s.xhat.rows) * s.xhat.cols;
    const double radicand = (measured_power / mk - noise_var) / symbol_var;
    if (radicand < 0.0) {
        ++s.scale_skips;
        return;
    }
    const double cur = std::sqrt(norm_sq(s.hhat));
    if (cur <= 0.0) return;
    const double target = std::sqrt(radicand);
    const double g = target / cur;
    for (cplx& h : s.hhat) h *= g;
}

GmmPrior em_update(const GmmPrior& prior, const std::vector<GmmPosterior>& tap_posteriors) {
    if (prior.per_tap)
        throw std::invalid_argument("em_update: only shared GMM parameters are learnable");
    const int l_taps = static_cast<int>(tap_posteriors.size());
    if (l_taps == 0) throw std::invalid_argument("em_update: no tap posteriors");
    GmmPrior out = prior;
    for (int i = 0; i < prior.d; ++i) {
        double mass = 0.0, sm = 0.0;
        for (const GmmPosterior& p : tap_posteriors) {
            mass += p.resp[i];
            sm += p.resp[i] * p.second_moment[i];
        }
        out.weights[i] = mass / l_taps;
        if (mass > 1e-12) out.vars[i] = std::max(sm / mass, 1e-30);
        // else: frozen component, keep old variance
    }
    // renormalize against accumulated rounding
    double wsum = 0.0;
    for (int i = 0; i < prior.d; ++i) wsum += out.weights[i];
    for (int i = 0; i < prior.d; ++i) out.weights[i] /= wsum;
    return out;
}

namespace {

void check_finite(double v, const char* what, int iter) {
    if (!std::isfinite(v))
        throw std::runtime_error(std::string("pbigamp: non-finite ") + what + " at iteration " +
                                 std::to_string(iter));
}

}  // namespace

void iterate(EqualizerState& s, const QuantizedObs& obs, const Frame& frame, GmmPrior& prior,
             const SymbolPriors& priors, double noise_var, const EqualizerConfig& cfg,
             IterateDiag* diag) {
    const FrameSpec& fs = frame.spec;
    const int mrows = fs.m, kcols = fs.k(), l_taps = s.l_taps();
    const double mk = static_cast<double>(mrows) * kcols;
    const double sqm = std::sqrt(static_cast<double>(mrows));
    const double floor = cfg.var_floor;
    const double beta = cfg.damping;
    ++s.iter;

    if (obs.rows != mrows || obs.cols != kcols)
        throw std::invalid_argument("iterate: observation shape mismatch");

    // (E1) data columns of F xhat; pilot columns cached at init
    cvec work(mrows);
    for (int k = fs.k_p; k < kcols; ++k) {
        std::copy(s.xhat.col(k), s.xhat.col(k) + mrows, work.begin());
        fft_unitary(work);
        std::copy(work.begin(), work.end(), s.xfreq.col(k));
    }
    // (E2)
    cvec hfreq(mrows, cplx(0.0, 0.0));
    std::copy(s.hhat.begin(), s.hhat.end(), hfreq.begin());
    fft_unitary(hfreq);

    // (E3)-(E4)
    const double norm_h2 = norm_sq(s.hhat);
    const double norm_x2 = fro_norm_sq(s.xhat);
    s.nu_p_bar = s.xvar * norm_h2 + l_taps / mk * s.hvar * norm_x2;
    s.nu_p = std::max(s.nu_p_bar + l_taps * s.hvar * s.xvar, floor);
    check_finite(s.nu_p, "nu_p", s.iter);

    // (E5)
    cmat phat(mrows, kcols);
    for (int k = 0; k < kcols; ++k) {
        for (int m = 0; m < mrows; ++m) work[m] = hfreq[m] * s.xfreq(m, k);
        ifft_unitary(work);
        for (int m = 0; m < mrows; ++m) phat(m, k) = sqm * work[m] - s.nu_p_bar * s.shat(m, k);
    }

    // (E6)-(E7)
    cmat zhat(mrows, kcols);
    double nu_z_sum = 0.0;
    for (int k = 0; k < kcols; ++k) {
        for (int m = 0; m < mrows; ++m) {
            OutputPosterior o;
            switch (cfg.output) {
                case OutputChannel::QuantizedExact:
                    o = obs.spec.is_infinite()
                            ? awgn_output_moments(obs.raw(m, k), phat(m, k), s.nu_p, noise_var)
                            : quantized_output_moments(obs.bin_re(m, k), obs.bin_im(m, k),
                                                       phat(m, k), s.nu_p, noise_var, obs.spec);
                    break;
                case OutputChannel::BussgangAwgn: {
                    const cplx y = obs.spec.is_infinite()
                                       ? obs.raw(m, k)
                                       : cplx(obs.spec.recon_level(obs.bin_re(m, k), false),
                                              obs.spec.recon_level(obs.bin_im(m, k), true));
                    o = bussgang_output_moments(y, phat(m, k), s.nu_p, cfg.bussgang_noise_var,
                                                cfg.bussgang_eta);
                    break;
                }
            }
            zhat(m, k) = o.zhat;
            nu_z_sum += o.zvar;
        }
    }
    s.nu_z = nu_z_sum / mk;
    check_finite(s.nu_z, "nu_z", s.iter);

    // (E8)-(E9)
    s.nu_s = std::max((1.0 - s.nu_z / s.nu_p) / s.nu_p, floor);
    for (size_t i = 0; i < s.shat.size(); ++i) {
        const cplx snew = (zhat.data[i] - phat.data[i]) / s.nu_p;
        s.shat.data[i] = beta * snew + (1.0 - beta) * s.shat.data[i];
    }

    // (E10)
    cmat sfreq(mrows, kcols);
    for (int k = 0; k < kcols; ++k) {
        std::copy(s.shat.col(k), s.shat.col(k) + mrows, work.begin());
        fft_unitary(work);
        std::copy(work.begin(), work.end(), sfreq.col(k));
    }

    // (E11)-(E12)
    s.nu_r = 1.0 / std::max(s.nu_s * norm_x2, floor);
    cvec acc(mrows, cplx(0.0, 0.0));
    for (int k = 0; k < kcols; ++k)
        for (int m = 0; m < mrows; ++m) acc[m] += std::conj(s.xfreq(m, k)) * sfreq(m, k);
    ifft_unitary(acc);
    cvec rhat(l_taps);
    const double r_keep = 1.0 - mk * s.nu_r * s.xvar * s.nu_s;
    for (int l = 0; l < l_taps; ++l) rhat[l] = s.nu_r * sqm * acc[l] + r_keep * s.hhat[l];

    // (E13)-(E14)
    s.nu_q = 1.0 / std::max(s.nu_s * norm_h2, floor);
    cmat qhat(mrows, kcols);
    const double q_keep = 1.0 - l_taps * s.nu_q * s.hvar * s.nu_s;
    for (int k = fs.k_p; k < kcols; ++k) {
        for (int m = 0; m < mrows; ++m) work[m] = std::conj(hfreq[m]) * sfreq(m, k);
        ifft_unitary(work);
        for (int m = 0; m < mrows; ++m)
            qhat(m, k) = sqm * s.nu_q * work[m] + q_keep * s.xhat(m, k);
    }

    // (E15)-(E16) with optional EM refresh and norm scaling
    if (!cfg.channel_known) {
        std::vector<GmmPosterior> posts(l_taps);
        double hvar_sum = 0.0;
        cvec hnew(l_taps);
        for (int l = 0; l < l_taps; ++l) {
            posts[l] = gmm_input_moments(rhat[l], s.nu_r, prior.tap_weights(l), prior.tap_vars(l),
                                         prior.d);
            hnew[l] = posts[l].hhat;
            hvar_sum += posts[l].hvar;
        }
        if (cfg.em_enabled) prior = em_update(prior, posts);
        for (int l = 0; l < l_taps; ++l) s.hhat[l] = beta * hnew[l] + (1.0 - beta) * s.hhat[l];
        s.hvar = std::max(hvar_sum / l_taps, floor);
        if (cfg.scale_enabled && cfg.measured_power >= 0.0)
            scale_channel(s, cfg.measured_power, cfg.symbol_var, noise_var);
    }
    check_finite(s.hvar, "nu_h", s.iter);

    // (E17)-(E18), known positions bypassed
    double xvar_sum = 0.0;
    const int n_points = 1 << fs.a;
    for (int k = fs.k_p; k < kcols; ++k) {
        for (int m = 0; m < fs.n_d; ++m) {
            const int n = frame.data_index(m, k);
            const cplx rot = frame.rotation(n);
            // rotate the measurement back instead of rotating the alphabet
            const cplx qt = std::conj(rot) * qhat(m, k);
            cplx xh;
            double xv;
            symbol_input_moments_into(qt, s.nu_q, fs.alphabet, priors.at(n), n_points,
                                      s.post_pmf.data() + static_cast<size_t>(n) * n_points, xh, xv);
            xh *= rot;
            s.xhat(m, k) = beta * xh + (1.0 - beta) * s.xhat(m, k);
            xvar_sum += xv;
        }
    }
    s.xvar = std::max(xvar_sum / mk, floor);
    check_finite(s.xvar, "nu_x", s.iter);

    if (diag) {
        diag->zhat = zhat;
        diag->rhat = rhat;
        diag->qhat = qhat;
    }
}

EqualizeResult run(const QuantizedObs& obs, const Frame& frame, const GmmPrior& prior,
                   double noise_var, const EqualizerConfig& cfg, const SymbolPriors& priors,
                   const cvec& hhat_init, double hvar_init, std::vector<TraceRow>* trace) {
    if (cfg.t_max < cfg.min_iters) throw std::invalid_argument("run: t_max < min_iters");
    if (cfg.stop_tol <= 0.0) throw std::invalid_argument("run: stop_tol must be positive");
    GmmPrior p = prior;
    p.validate(static_cast<int>(hhat_init.size()));
    EqualizerState s = init_state(frame, hhat_init, hvar_init, priors);

    cmat x_prev = s.xhat;
    int used = 0;
    for (int t = 1; t <= cfg.t_max; ++t) {
        iterate(s, obs, frame, p, priors, noise_var, cfg);
        used = t;
        double diff = 0.0, norm = 0.0;
        for (size_t i = 0; i < s.xhat.size(); ++i) {
            diff += std::norm(s.xhat.data[i] - x_prev.data[i]);
            norm += std::norm(s.xhat.data[i]);
        }
        const double residual = norm > 0.0 ? diff / norm : 0.0;
        if (trace) trace->push_back({t, s.xvar, s.hvar, s.nu_p, s.nu_s, residual});
        if (t >= cfg.min_iters && diff < cfg.stop_tol * norm) break;
        x_prev = s.xhat;
    }

    EqualizeResult res;
    res.post_pmf = s.post_pmf;
    res.hhat = s.hhat;
    res.hvar = s.hvar;
    res.iters_used = used;
    res.learned_prior = p;
    return res;
}

void write_trace_csv(const std::vector<TraceRow>& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_trace_csv: cannot open " + path);
    out << "t,nu_x,nu_h,nu_p,nu_s,residual\n";
    out.precision(12);
    for (const TraceRow& r : trace)
        out << r.t << ',' << r.nu_x << ',' << r.nu_h << ',' << r.nu_p << ',' << r.nu_s << ','
            << r.residual << '\n';
}

}  // namespace fewbit
