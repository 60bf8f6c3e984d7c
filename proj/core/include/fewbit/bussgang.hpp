#pragma once

#include "fewbit/quantizer.hpp"

namespace fewbit {

// Linearized quantizer model y = (1-eta) u + e with e uncorrelated with u;
// eff_noise_var is the variance of the total effective noise (1-eta) w + e.
struct BussgangParams {
    double eta = 0.0;
    double eff_noise_var = 0.0;
    double gain() const { return 1.0 - eta; }
};

// eta = E|q|^2 / E|u|^2 for Gaussian input at the given complex power,
// evaluated from the closed-form per-bin distortion of the mid-rise ADC.
double compute_eta(const QuantizerSpec& q, double input_power);

// eff = (1-eta) (eta * sym_var * E||h||^2 + noise_var)
BussgangParams bussgang_params(double eta, double sym_var, double e_h_norm_sq, double noise_var);

}  // namespace fewbit
