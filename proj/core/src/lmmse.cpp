#include "fewbit/lmmse.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "fewbit/dft.hpp"

namespace fewbit {

namespace {

constexpr double kVarFloor = 1e-12;
constexpr double kHugeVar = 1e12;

void check_shapes(const cmat& y, const cvec& hhat, const cmat& mu, const std::vector<double>& v) {
    if (y.rows <= 0 || y.cols <= 0) throw std::invalid_argument("lmmse: empty observation");
    if (static_cast<int>(hhat.size()) > y.rows) throw std::invalid_argument("lmmse: L > M");
    if (mu.rows != y.rows || mu.cols != y.cols || v.size() != y.size())
        throw std::invalid_argument("lmmse: prior shape mismatch");
    for (double vn : v)
        if (vn < 0.0) throw std::invalid_argument("lmmse: negative prior variance");
}

// posterior (xhat, xvar) -> extrinsic (qhat, qvar) by removing the Gaussian
// prior (mu, v)
void extrinsic_from_posterior(cplx xhat, double xvar, cplx mu, double v, cplx& qhat,
                              double& qvar) {
    const double den = v - xvar;
    if (den <= kVarFloor * v || den <= 0.0) {
        qhat = xhat;
        qvar = kHugeVar;
        return;
    }
    qvar = v * xvar / den;
    qhat = (xhat * v - mu * xvar) / den;
}

}  // namespace

LmmseResult lmmse_equalize_exact(const cmat& y_recon, const cvec& hhat, const BussgangParams& bg,
                                 const cmat& mu, const std::vector<double>& v) {
    check_shapes(y_recon, hhat, mu, v);
    const int m = y_recon.rows, kcols = y_recon.cols;
    const double gain = bg.gain();
    const double nw = std::max(bg.eff_noise_var, kVarFloor);

    // dense circulant effective channel
    Eigen::MatrixXcd b(m, m);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            int lag = i - j;
            if (lag < 0) lag += m;
            b(i, j) = (lag < static_cast<int>(hhat.size())) ? gain * hhat[lag] : cplx(0.0, 0.0);
        }

    LmmseResult res;
    res.xhat = cmat(m, kcols);
    res.qhat = cmat(m, kcols);
    res.xvar.assign(y_recon.size(), 0.0);
    res.qvar.assign(y_recon.size(), 0.0);

    Eigen::MatrixXcd sigma(m, m);
    Eigen::VectorXcd yv(m), muv(m), resid(m), t(m);
    for (int k = 0; k < kcols; ++k) {
        const double* vk = v.data() + static_cast<size_t>(k) * m;
        // Sigma = B Diag(v) B^H + nw I
        Eigen::MatrixXcd bv = b;
        for (int j = 0; j < m; ++j) bv.col(j) *= vk[j];
        sigma.noalias() = bv * b.adjoint();
        sigma.diagonal().array() += nw;

        Eigen::LLT<Eigen::MatrixXcd> llt(sigma);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("lmmse_equalize_exact: covariance factorization failed");

        for (int i = 0; i < m; ++i) {
            yv(i) = y_recon(i, k);
            muv(i) = mu(i, k);
        }
        resid.noalias() = yv - b * muv;
        t = llt.solve(resid);
        Eigen::VectorXcd bht = b.adjoint() * t;

        // diag(B^H Sigma^{-1} B) for the posterior variances
        Eigen::MatrixXcd w = llt.solve(b);
        for (int j = 0; j < m; ++j) {
            const double diag_j = std::real(b.col(j).dot(w.col(j)));
            const double xv = std::clamp(vk[j] - vk[j] * vk[j] * diag_j, 0.0, vk[j]);
            const cplx xh = muv(j) + vk[j] * bht(j);
            res.xhat(j, k) = xh;
            res.xvar[static_cast<size_t>(k) * m + j] = xv;
            if (vk[j] > 0.0) {
                extrinsic_from_posterior(xh, xv, muv(j), vk[j], res.qhat(j, k),
                                         res.qvar[static_cast<size_t>(k) * m + j]);
            } else {
                res.xhat(j, k) = muv(j);
                res.qhat(j, k) = muv(j);
            }
        }
    }
    return res;
}

LmmseResult lmmse_equalize_fast(const cmat& y_recon, const cvec& hhat, const BussgangParams& bg,
                                const cmat& mu, const std::vector<double>& v) {
    check_shapes(y_recon, hhat, mu, v);
    const int m = y_recon.rows, kcols = y_recon.cols;
    const double gain = bg.gain();
    const double nw = std::max(bg.eff_noise_var, kVarFloor);
    const double sqm = std::sqrt(static_cast<double>(m));

    double vbar = 0.0;
    for (double vn : v) vbar += vn;
    vbar /= static_cast<double>(v.size());

    // circulant eigenvalues of the effective channel (1 transform)
    cvec lam(m, cplx(0.0, 0.0));
    std::copy(hhat.begin(), hhat.end(), lam.begin());
    fft_unitary(lam);
    for (cplx& x : lam) x *= gain * sqm;

    // scalar Wiener filter per frequency bin
    cvec wf(m);
    double post_shrink = 0.0;
    for (int i = 0; i < m; ++i) {
        const double den = vbar * std::norm(lam[i]) + nw;
        wf[i] = vbar * std::conj(lam[i]) / den;
        post_shrink += vbar * std::norm(lam[i]) / den;
    }
    post_shrink /= static_cast<double>(m);
    const double xv_scalar = std::clamp(vbar * (1.0 - post_shrink), 0.0, vbar);

    LmmseResult res;
    res.xhat = cmat(m, kcols);
    res.qhat = cmat(m, kcols);
    res.xvar.assign(y_recon.size(), 0.0);
    res.qvar.assign(y_recon.size(), 0.0);

    cvec work(m);
    for (int k = 0; k < kcols; ++k) {
        // A mu in the time domain (2 transforms)
        std::copy(mu.col(k), mu.col(k) + m, work.begin());
        fft_unitary(work);
        for (int i = 0; i < m; ++i) work[i] *= lam[i];
        ifft_unitary(work);
        cvec resid(m);
        for (int i = 0; i < m; ++i) resid[i] = y_recon(i, k) - work[i];
        // filtered residual (2 transforms)
        fft_unitary(resid);
        for (int i = 0; i < m; ++i) resid[i] *= wf[i];
        ifft_unitary(resid);

        const double* vk = v.data() + static_cast<size_t>(k) * m;
        for (int i = 0; i < m; ++i) {
            if (vk[i] <= 0.0) {
                res.xhat(i, k) = mu(i, k);
                res.qhat(i, k) = mu(i, k);
                continue;
            }
            const cplx xh = mu(i, k) + resid[i];
            res.xhat(i, k) = xh;
            res.xvar[static_cast<size_t>(k) * m + i] = xv_scalar;
            extrinsic_from_posterior(xh, xv_scalar, mu(i, k), vk[i], res.qhat(i, k),
                                     res.qvar[static_cast<size_t>(k) * m + i]);
        }
    }
    return res;
}

}  // namespace fewbit
