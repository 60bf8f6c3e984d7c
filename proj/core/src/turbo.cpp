#include "fewbit/turbo.hpp"

#include <cmath>
#include <stdexcept>

#include "fewbit/lmmse.hpp"

namespace fewbit {

SymbolPriors symbol_priors_from_bits(const Frame& frame, const Interleaver& il,
                                     const BitBeliefs& decoder_ext) {
    const FrameSpec& fs = frame.spec;
    if (decoder_ext.size() != fs.coded_bits())
        throw std::invalid_argument("symbol_priors_from_bits: belief length mismatch");
    if (decoder_ext.tag == BeliefTag::Posterior)
        throw std::invalid_argument("symbol_priors_from_bits: posterior beliefs must not seed the equalizer");
    const std::vector<double> llr_tx = il.apply(decoder_ext.llr);
    SymbolPriors pri;
    pri.n_symbols = fs.data_symbols();
    pri.n_points = 1 << fs.a;
    pri.pmf.resize(static_cast<size_t>(pri.n_symbols) * pri.n_points);
    for (int n = 0; n < pri.n_symbols; ++n)
        bits_to_symbol_pmf(llr_tx.data() + static_cast<size_t>(n) * fs.a, fs.a, pri.at(n));
    return pri;
}

namespace {

// posterior symbol pmfs -> posterior coded-bit beliefs in transmit order
BitBeliefs bit_posteriors_from_pmfs(const Frame& frame, const std::vector<double>& post_pmf) {
    const FrameSpec& fs = frame.spec;
    const int n_points = 1 << fs.a;
    BitBeliefs post;
    post.tag = BeliefTag::Posterior;
    post.llr.resize(fs.coded_bits());
    for (int n = 0; n < fs.data_symbols(); ++n)
        symbol_pmf_to_bit_llrs(post_pmf.data() + static_cast<size_t>(n) * n_points, fs.a,
                               post.llr.data() + static_cast<size_t>(n) * fs.a);
    return post;
}

// LMMSE sweep producing posterior symbol pmfs from the extrinsic Gaussian
// (qhat, qvar) combined with the prior pmfs
std::vector<double> lmmse_posterior_pmfs(const Frame& frame, const SymbolPriors& priors,
                                         const LmmseResult& lr) {
    const FrameSpec& fs = frame.spec;
    const int n_points = 1 << fs.a;
    std::vector<double> post(static_cast<size_t>(fs.data_symbols()) * n_points);
    for (int k = fs.k_p; k < fs.k(); ++k) {
        for (int m = 0; m < fs.n_d; ++m) {
            const int n = frame.data_index(m, k);
            const size_t idx = static_cast<size_t>(k) * fs.m + m;
            const cplx rot = frame.rotation(n);
            cplx xh;
            double xv;
            symbol_input_moments_into(std::conj(rot) * lr.qhat(m, k), std::max(lr.qvar[idx], 1e-12),
                                      fs.alphabet, priors.at(n), n_points,
                                      post.data() + static_cast<size_t>(n) * n_points, xh, xv);
        }
    }
    return post;
}

cmat prior_means(const Frame& frame, const SymbolPriors& priors) {
    const FrameSpec& fs = frame.spec;
    cmat mu = frame.x;
    for (int k = fs.k_p; k < fs.k(); ++k)
        for (int m = 0; m < fs.n_d; ++m)
            mu(m, k) = symbol_prior_mean(frame, priors, frame.data_index(m, k));
    return mu;
}

std::vector<double> prior_vars(const Frame& frame, const SymbolPriors& priors) {
    const FrameSpec& fs = frame.spec;
    std::vector<double> v(static_cast<size_t>(fs.m) * fs.k(), 0.0);
    for (int k = fs.k_p; k < fs.k(); ++k) {
        for (int m = 0; m < fs.n_d; ++m) {
            const int n = frame.data_index(m, k);
            const double* g = priors.at(n);
            cplx mean(0.0, 0.0);
            for (int j = 0; j < priors.n_points; ++j) mean += g[j] * fs.alphabet[j];
            double var = 0.0;
            for (int j = 0; j < priors.n_points; ++j) var += g[j] * std::norm(fs.alphabet[j] - mean);
            v[static_cast<size_t>(k) * fs.m + m] = var;
        }
    }
    return v;
}

}  // namespace

TurboResult run_turbo(const QuantizedObs& obs, const Frame& frame, const GmmPrior& channel_prior,
                      const CodeSpec& code, const Interleaver& il, const TurboConfig& cfg,
                      double noise_var, const cvec& hhat_init, double hvar_init,
                      const BussgangParams& bg, const std::vector<uint8_t>* true_info) {
    const FrameSpec& fs = frame.spec;
    if (cfg.max_turbo_iters < 1) throw std::invalid_argument("run_turbo: max_turbo_iters < 1");
    if (code.n_c != fs.coded_bits())
        throw std::invalid_argument("run_turbo: code length does not match the frame");
    if (static_cast<int>(il.perm.size()) != code.n_c)
        throw std::invalid_argument("run_turbo: interleaver length mismatch");

    const bool is_lmmse =
        cfg.kind == EqualizerKind::LmmseExact || cfg.kind == EqualizerKind::LmmseFast;
    EqualizerConfig eq = cfg.eq;
    if (cfg.kind == EqualizerKind::PbigampBussgang) {
        eq.output = OutputChannel::BussgangAwgn;
        eq.bussgang_eta = bg.eta;
        eq.bussgang_noise_var = bg.eff_noise_var;
    }

    TurboResult res;
    res.hhat = hhat_init;
    res.hvar = hvar_init;

    GmmPrior gmm = channel_prior;
    cvec h_cur = hhat_init;
    double hvar_cur = hvar_init;

    BitBeliefs decoder_ext = BitBeliefs::uniform(code.n_c, BeliefTag::Extrinsic);
    cmat y_recon;
    if (is_lmmse) y_recon = reconstruct(obs);

    for (int it = 1; it <= cfg.max_turbo_iters; ++it) {
        SymbolPriors priors = symbol_priors_from_bits(frame, il, decoder_ext);

        std::vector<double> post_pmf;
        int eq_iters = 0;
        if (is_lmmse) {
            LmmseResult lr = (cfg.kind == EqualizerKind::LmmseExact)
                                 ? lmmse_equalize_exact(y_recon, h_cur, bg, prior_means(frame, priors),
                                                        prior_vars(frame, priors))
                                 : lmmse_equalize_fast(y_recon, h_cur, bg, prior_means(frame, priors),
                                                       prior_vars(frame, priors));
            post_pmf = lmmse_posterior_pmfs(frame, priors, lr);
            eq_iters = 1;
        } else {
            EqualizeResult er =
                fewbit::run(obs, frame, gmm, noise_var, eq, priors, h_cur, hvar_cur);
            post_pmf = std::move(er.post_pmf);
            h_cur = er.hhat;
            hvar_cur = er.hvar;
            gmm = er.learned_prior;
            eq_iters = er.iters_used;
        }
        res.eq_iters_total += eq_iters;

        // equalizer posterior -> extrinsic -> decoder prior (codeword order)
        BitBeliefs eq_prior = decoder_ext;
        eq_prior.llr = il.apply(decoder_ext.llr);
        BitBeliefs eq_post = bit_posteriors_from_pmfs(frame, post_pmf);
        BitBeliefs eq_ext = extrinsic_divide(eq_post, eq_prior);
        BitBeliefs dec_prior;
        dec_prior.tag = BeliefTag::Extrinsic;
        dec_prior.llr = il.invert(eq_ext.llr);

        DecodeResult dec = decode_soft(code, dec_prior, cfg.max_ldpc_iters);
        decoder_ext = extrinsic_divide(dec.posterior, dec_prior);

        res.info_bits = dec.info_bits;
        res.turbo_iters = it;
        res.parity_ok = dec.parity_ok;

        TurboIterationStats st;
        st.turbo_iter = it;
        st.parity_ok = dec.parity_ok;
        st.eq_iters = eq_iters;
        if (true_info) {
            long err = 0;
            for (size_t i = 0; i < true_info->size(); ++i)
                if ((*true_info)[i] != dec.info_bits[i]) ++err;
            st.ber_so_far = static_cast<double>(err) / static_cast<double>(true_info->size());
        }
        res.trace.push_back(st);

        if (dec.parity_ok && cfg.parity_early_exit) break;
    }

    res.hhat = h_cur;
    res.hvar = hvar_cur;
    return res;
}

}  // namespace fewbit
