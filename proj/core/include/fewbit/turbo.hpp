#pragma once

#include <vector>

#include "fewbit/bussgang.hpp"
#include "fewbit/coding.hpp"
#include "fewbit/common.hpp"
#include "fewbit/frame.hpp"
#include "fewbit/pbigamp.hpp"
#include "fewbit/quantizer.hpp"

namespace fewbit {

enum class EqualizerKind { Pbigamp, PbigampBussgang, LmmseExact, LmmseFast };

struct TurboConfig {
    int max_turbo_iters = 20;
    EqualizerKind kind = EqualizerKind::Pbigamp;
    bool parity_early_exit = true;
    int max_ldpc_iters = 50;
    EqualizerConfig eq;
};

struct TurboIterationStats {
    int turbo_iter = 0;
    bool parity_ok = false;
    int eq_iters = 0;
    double ber_so_far = -1.0;  // -1 when the true bits are unknown
};

struct TurboResult {
    std::vector<uint8_t> info_bits;
    cvec hhat;
    double hvar = 0.0;
    int turbo_iters = 0;
    long eq_iters_total = 0;
    bool parity_ok = false;
    std::vector<TurboIterationStats> trace;
};

// One turbo iteration = soft equalization followed by soft decoding, with
// extrinsic beliefs crossing the boundary in both directions. The channel
// estimate and learned GMM parameters are carried across turbo iterations;
// symbol beliefs are rebuilt from the new decoder extrinsics each time.
TurboResult run_turbo(const QuantizedObs& obs, const Frame& frame, const GmmPrior& channel_prior,
                      const CodeSpec& code, const Interleaver& il, const TurboConfig& cfg,
                      double noise_var, const cvec& hhat_init, double hvar_init,
                      const BussgangParams& bg,
                      const std::vector<uint8_t>* true_info = nullptr);

// Decoder-extrinsic coded-bit beliefs (codeword order) -> per-symbol prior
// pmfs in transmit order.
SymbolPriors symbol_priors_from_bits(const Frame& frame, const Interleaver& il,
                                     const BitBeliefs& decoder_ext);

}  // namespace fewbit
