#include "fewbit/pbigamp_reference.hpp"

#include <cmath>
#include <stdexcept>

namespace fewbit {

std::vector<GenericIterate> run_generic_pbigamp(const GenericProblem& prob, const cvec& xhat0,
                                                double xvar0, const cvec& hhat0, double hvar0,
                                                int iters, double var_floor) {
    const int p = prob.p, n = prob.n, l = prob.l;
    if (static_cast<int>(prob.z.size()) != n * l)
        throw std::invalid_argument("generic pbigamp: tensor shape mismatch");
    if (static_cast<int>(xhat0.size()) != n || static_cast<int>(hhat0.size()) != l)
        throw std::invalid_argument("generic pbigamp: init shape mismatch");
    prob.h_prior.validate(l);

    cvec xhat = xhat0, hhat = hhat0;
    double xvar = xvar0, hvar = hvar0;
    cvec shat(p, cplx(0.0, 0.0));

    // sum_{n,l} ||z^{(n,l)}||^2 and the per-row/column tensor norms are fixed
    double z_total2 = 0.0;
    std::vector<double> z_col2(l, 0.0);  // sum_n ||z^{(n,l)}||^2
    std::vector<double> z_row2(n, 0.0);  // sum_l ||z^{(n,l)}||^2
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < l; ++j) {
            const double s = norm_sq(prob.zt(i, j));
            z_total2 += s;
            z_col2[j] += s;
            z_row2[i] += s;
        }

    std::vector<GenericIterate> out;
    out.reserve(iters);

    for (int t = 1; t <= iters; ++t) {
        GenericIterate it;

        // (R1)-(R2)
        std::vector<cvec> z_ns(n, cvec(p, cplx(0, 0)));  // zhat^{(n,*)}
        std::vector<cvec> z_sl(l, cvec(p, cplx(0, 0)));  // zhat^{(*,l)}
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < l; ++j) {
                const cvec& zt = prob.zt(i, j);
                for (int m = 0; m < p; ++m) {
                    z_ns[i][m] += zt[m] * hhat[j];
                    z_sl[j][m] += xhat[i] * zt[m];
                }
            }
        // (R3)
        cvec z_ss(p, cplx(0, 0));
        for (int i = 0; i < n; ++i)
            for (int m = 0; m < p; ++m) z_ss[m] += xhat[i] * z_ns[i][m];

        // (R4)-(R5)
        double sum_ns = 0.0, sum_sl = 0.0;
        for (int i = 0; i < n; ++i) sum_ns += norm_sq(z_ns[i]);
        for (int j = 0; j < l; ++j) sum_sl += norm_sq(z_sl[j]);
        it.nu_p_bar = (xvar * sum_ns + hvar * sum_sl) / p;
        it.nu_p = std::max(it.nu_p_bar + xvar * hvar * z_total2 / p, var_floor);

        // (R6)
        cvec phat(p);
        for (int m = 0; m < p; ++m) phat[m] = z_ss[m] - shat[m] * it.nu_p_bar;

        // (R7)-(R8)
        it.zhat.resize(p);
        double nu_z_sum = 0.0;
        for (int m = 0; m < p; ++m) {
            OutputPosterior o = prob.output_moments(m, phat[m], it.nu_p);
            it.zhat[m] = o.zhat;
            nu_z_sum += o.zvar;
        }
        it.nu_z = nu_z_sum / p;

        // (R9)-(R10)
        it.nu_s = std::max((1.0 - it.nu_z / it.nu_p) / it.nu_p, var_floor);
        for (int m = 0; m < p; ++m) shat[m] = (it.zhat[m] - phat[m]) / it.nu_p;

        // (R11)-(R12)
        it.nu_r = 1.0 / std::max(it.nu_s * sum_sl / l, var_floor);
        it.rhat.resize(l);
        for (int j = 0; j < l; ++j) {
            cplx corr(0.0, 0.0);
            for (int m = 0; m < p; ++m) corr += std::conj(z_sl[j][m]) * shat[m];
            it.rhat[j] = hhat[j] + it.nu_r * corr - it.nu_r * it.nu_s * xvar * hhat[j] * z_col2[j];
        }

        // (R13)-(R14)
        it.nu_q = 1.0 / std::max(it.nu_s * sum_ns / n, var_floor);
        it.qhat.resize(n);
        for (int i = 0; i < n; ++i) {
            cplx corr(0.0, 0.0);
            for (int m = 0; m < p; ++m) corr += std::conj(z_ns[i][m]) * shat[m];
            it.qhat[i] = xhat[i] + it.nu_q * corr - it.nu_q * it.nu_s * hvar * xhat[i] * z_row2[i];
        }

        // (R15)-(R16)
        it.hhat_next.resize(l);
        double hvar_sum = 0.0;
        for (int j = 0; j < l; ++j) {
            GmmPosterior g = gmm_input_moments(it.rhat[j], it.nu_r, prob.h_prior.tap_weights(j),
                                               prob.h_prior.tap_vars(j), prob.h_prior.d);
            it.hhat_next[j] = g.hhat;
            hvar_sum += g.hvar;
        }
        it.nu_h_next = std::max(hvar_sum / l, var_floor);

        // (R17)-(R18)
        it.xhat_next.resize(n);
        double xvar_sum = 0.0;
        std::vector<double> pmf;
        for (int i = 0; i < n; ++i) {
            pmf.resize(prob.x_points[i].size());
            cplx xh;
            double xv;
            symbol_input_moments_into(it.qhat[i], it.nu_q, prob.x_points[i], prob.x_pmf[i].data(),
                                      static_cast<int>(prob.x_points[i].size()), pmf.data(), xh, xv);
            it.xhat_next[i] = xh;
            xvar_sum += xv;
        }
        it.nu_x_next = std::max(xvar_sum / n, var_floor);

        hhat = it.hhat_next;
        hvar = it.nu_h_next;
        xhat = it.xhat_next;
        xvar = it.nu_x_next;
        out.push_back(std::move(it));
    }
    return out;
}

}  // namespace fewbit
