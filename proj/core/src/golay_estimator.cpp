#include "fewbit/golay_estimator.hpp"

#include <cmath>
#include <stdexcept>

namespace fewbit {

GolayEstimate golay_channel_estimate(const QuantizedObs& obs, const Frame& frame, int l_taps,
                                     const BussgangParams& bg, double noise_var,
                                     double measured_power, double symbol_var) {
    const FrameSpec& fs = frame.spec;
    if (fs.k_p < 1) throw std::invalid_argument("golay_channel_estimate: frame has no pilot blocks");
    if (l_taps < 1 || l_taps > fs.m)
        throw std::invalid_argument("golay_channel_estimate: bad tap count");

    const cmat r = reconstruct(obs);
    GolayEstimate est;
    est.hhat.assign(l_taps, cplx(0.0, 0.0));
    // circular correlation against each pilot column; pilot energy is M since
    // entries are +/-1
    for (int k = 0; k < fs.k_p; ++k) {
        for (int lag = 0; lag < l_taps; ++lag) {
            cplx c(0.0, 0.0);
            for (int m = 0; m < fs.m; ++m) {
                int src = m - lag;
                if (src < 0) src += fs.m;
                c += r(m, k) * std::conj(frame.x(src, k));
            }
            est.hhat[lag] += c;
        }
    }
    const double g = bg.gain();
    const double scale = 1.0 / (static_cast<double>(fs.m) * fs.k_p * g);
    for (cplx& h : est.hhat) h *= scale;

    // per-tap error variance of the averaged correlator under the linearized
    // noise model
    est.hvar = bg.eff_noise_var / (g * g * static_cast<double>(fs.m) * fs.k_p);
    if (bg.eta == 0.0) est.hvar = noise_var / (static_cast<double>(fs.m) * fs.k_p);

    if (measured_power >= 0.0) {
        const double mk = static_cast<double>(fs.m) * fs.k();
        const double radicand = (measured_power / mk - noise_var) / symbol_var;
        const double cur = std::sqrt(norm_sq(est.hhat));
        if (radicand >= 0.0 && cur > 0.0) {
            const double f = std::sqrt(radicand) / cur;
            for (cplx& h : est.hhat) h *= f;
        }
    }
    return est;
}

}  // namespace fewbit
