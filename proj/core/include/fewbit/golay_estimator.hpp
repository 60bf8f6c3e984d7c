#pragma once

#include "fewbit/bussgang.hpp"
#include "fewbit/common.hpp"
#include "fewbit/frame.hpp"
#include "fewbit/quantizer.hpp"

namespace fewbit {

struct GolayEstimate {
    cvec hhat;
    double hvar = 0.0;  // per-tap error variance estimate
};

// Correlation channel estimate from the pilot blocks: the received pilot
// columns (quantizer reconstruction levels) are circularly correlated with
// the known +/-Golay pilot pattern, averaged over the K_P repetitions, and
// divided by the Bussgang gain. The alternating pilot patterns have perfect
// periodic autocorrelation out to lag M/4, so recovery is exact for
// L <= M/4 in the noiseless unquantized case. When measured_power >= 0 the
// estimate is rescaled to the norm implied by the receive power.
GolayEstimate golay_channel_estimate(const QuantizedObs& obs, const Frame& frame, int l_taps,
                                     const BussgangParams& bg, double noise_var,
                                     double measured_power = -1.0, double symbol_var = 1.0);

}  // namespace fewbit
