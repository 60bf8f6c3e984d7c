#pragma once

#include <cstdint>
#include <string>
#include <utility>

#include "fewbit/common.hpp"

namespace fewbit {

// b-bit mid-rise ADC applied separately to real and imaginary parts. Bin u in
// [1, 2^b] covers (g_{u-1}, g_u] with edges g_i = (i - 2^{b-1}) * delta and
// +/-inf at the ends; the reconstruction level of bin u is
// (u - 2^{b-1} - 1/2) * delta. bits = kInfinite models an unquantized ADC.
struct QuantizerSpec {
    static constexpr int kInfinite = -1;

    int bits = kInfinite;
    double delta_re = 1.0;
    double delta_im = 1.0;

    bool is_infinite() const { return bits == kInfinite; }
    int num_bins() const { return 1 << bits; }
    double delta(bool im) const { return im ? delta_im : delta_re; }

    double edge(int i, bool im) const;  // i in [0, 2^b]
    std::pair<double, double> bin_interval(int bin, bool im) const;
    double recon_level(int bin, bool im) const;
    int bin_of(double v, bool im) const;
};

// MMSE stepsize for unit-variance Gaussian input (golden-section over the
// closed-form per-bin distortion), and the distortion it achieves.
double midrise_distortion(int bits, double delta);
double mmse_stepsize(int bits);
double mmse_distortion(int bits);

// delta_re = sqrt(power_re) * Delta_b, likewise for the imaginary part.
QuantizerSpec calibrate(int bits, double power_re, double power_im);

struct QuantizedObs {
    QuantizerSpec spec;
    int rows = 0;
    int cols = 0;
    std::vector<int16_t> bins_re;  // column-major, finite bits only
    std::vector<int16_t> bins_im;
    cmat raw;  // infinite-bit observations

    int bin_re(int m, int k) const { return bins_re[static_cast<size_t>(k) * rows + m]; }
    int bin_im(int m, int k) const { return bins_im[static_cast<size_t>(k) * rows + m]; }
};

QuantizedObs quantize(const QuantizerSpec& spec, const cmat& u);
cmat reconstruct(const QuantizedObs& obs);

// CSV rows (b, Delta_b, distortion) for b = 1..max_bits.
void write_stepsize_table_csv(const std::string& path, int max_bits);

}  // namespace fewbit
