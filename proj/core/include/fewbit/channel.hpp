#pragma once

#include <cstdint>
#include <string>

#include "fewbit/common.hpp"

namespace fewbit {

// Length-L tap vector of the circulant per-block channel. freq_response(m)
// returns the circulant eigenvalues for block size m, i.e. sqrt(m) times the
// first-L-column unitary DFT of the taps.
struct ChannelRealization {
    cvec h;

    ChannelRealization() = default;
    explicit ChannelRealization(cvec taps, int m_hint = 0);

    int length() const { return static_cast<int>(h.size()); }
    cvec freq_response(int m) const;

  private:
    cvec cached_freq_;
    int cached_m_ = 0;
};

struct ChannelGenSpec {
    int l = 64;
    double decay_db_per_tap = 0.4;
    double sparsity = 0.25;  // active-tap probability
    uint64_t seed = 0;
};

// U = H X + W with H circulant (first column = zero-padded taps) applied per
// column via FFT; noise_var is the per-entry complex AWGN variance.
cmat apply_channel(const ChannelRealization& ch, const cmat& x, double noise_var, Rng& rng);

// Bernoulli(sparsity) x CN(0, nu_l) taps with exponentially decaying per-tap
// variance, normalized so E||h||^2 = 1. An all-zero draw forces tap 0 active.
ChannelRealization generate_channel(const ChannelGenSpec& spec, Rng& rng);

// CSV rows (lag, re, im); missing lags zero-filled, duplicates rejected.
ChannelRealization load_channel(const std::string& path);
void save_channel(const ChannelRealization& ch, const std::string& path);

}  // namespace fewbit
