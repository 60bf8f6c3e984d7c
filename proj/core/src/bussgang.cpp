#include "fewbit/bussgang.hpp"

#include <cmath>
#include <stdexcept>

namespace fewbit {

double compute_eta(const QuantizerSpec& q, double input_power) {
    if (q.is_infinite()) return 0.0;
    if (input_power <= 0.0) throw std::invalid_argument("compute_eta: input power must be positive");
    // per-component: distortion of the quantizer with its stepsize expressed
    // in units of the component standard deviation
    const double sd_re = std::sqrt(0.5 * input_power);
    const double sd_im = sd_re;
    const double d_re = midrise_distortion(q.bits, q.delta_re / sd_re);
    const double d_im = midrise_distortion(q.bits, q.delta_im / sd_im);
    return 0.5 * (d_re + d_im);
}

BussgangParams bussgang_params(double eta, double sym_var, double e_h_norm_sq, double noise_var) {
    if (eta < 0.0 || eta >= 1.0) throw std::invalid_argument("bussgang_params: eta must be in [0,1)");
    BussgangParams p;
    p.eta = eta;
    p.eff_noise_var = (1.0 - eta) * (eta * sym_var * e_h_norm_sq + noise_var);
    return p;
}

}  // namespace fewbit
