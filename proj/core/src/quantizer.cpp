#include "fewbit/quantizer.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace fewbit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double norm_pdf(double x) { return std::exp(-0.5 * x * x) * 0.39894228040143267794; }
double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

// int_a^b (u - c)^2 phi(u) du for standard normal phi, with infinite b allowed
double truncated_sq_err(double a, double b, double c) {
    const double pa = norm_pdf(a);
    const double pb = std::isinf(b) ? 0.0 : norm_pdf(b);
    const double Fa = norm_cdf(a);
    const double Fb = std::isinf(b) ? 1.0 : norm_cdf(b);
    const double bpb = std::isinf(b) ? 0.0 : b * pb;
    const double z = Fb - Fa;
    return (1.0 + c * c) * z + a * pa - bpb - 2.0 * c * (pa - pb);
}

void check_bits(int bits) {
    if (bits < 1 || bits > 8) throw std::invalid_argument("quantizer: bits must be in [1,8]");
}

}  // namespace

double QuantizerSpec::edge(int i, bool im) const {
    if (is_infinite()) throw std::logic_error("edge: infinite-bit quantizer has no bin edges");
    const int n = num_bins();
    if (i < 0 || i > n) throw std::invalid_argument("edge: index out of range");
    if (i == 0) return -kInf;
    if (i == n) return kInf;
    return (i - n / 2) * delta(im);
}

std::pair<double, double> QuantizerSpec::bin_interval(int bin, bool im) const {
    if (bin < 1 || bin > num_bins()) throw std::invalid_argument("bin_interval: bin out of range");
    return {edge(bin - 1, im), edge(bin, im)};
}

double QuantizerSpec::recon_level(int bin, bool im) const {
    if (bin < 1 || bin > num_bins()) throw std::invalid_argument("recon_level: bin out of range");
    return (bin - num_bins() / 2 - 0.5) * delta(im);
}

int QuantizerSpec::bin_of(double v, bool im) const {
    const int half = num_bins() / 2;
    const double d = delta(im);
    if (v > 0.0) {
        int k = static_cast<int>(std::ceil(v / d));
        return half + std::min(std::max(k, 1), half);
    }
    int k = static_cast<int>(std::ceil(-v / d));
    return half + 1 - std::min(std::max(k, 1), half);
}

double midrise_distortion(int bits, double delta) {
    check_bits(bits);
    if (delta <= 0.0) throw std::invalid_argument("midrise_distortion: delta must be positive");
    const int half = 1 << (bits - 1);
    double d = 0.0;
    for (int k = 1; k <= half; ++k) {
        const double lo = (k - 1) * delta;
        const double hi = (k == half) ? kInf : k * delta;
        d += truncated_sq_err(lo, hi, (k - 0.5) * delta);
    }
    return 2.0 * d;  // symmetric halves
}

double mmse_stepsize(int bits) {
    check_bits(bits);
    // golden-section search on the unimodal distortion over [0.01, 4]
    const double gr = 0.61803398874989484820;
    double a = 0.01, b = 4.0;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = midrise_distortion(bits, x1);
    double f2 = midrise_distortion(bits, x2);
    for (int it = 0; it < 200 && (b - a) > 1e-12; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = midrise_distortion(bits, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = midrise_distortion(bits, x2);
        }
    }
    return 0.5 * (a + b);
}

double mmse_distortion(int bits) { return midrise_distortion(bits, mmse_stepsize(bits)); }

QuantizerSpec calibrate(int bits, double power_re, double power_im) {
    QuantizerSpec q;
    if (bits == QuantizerSpec::kInfinite) {
        q.bits = QuantizerSpec::kInfinite;
        return q;
    }
    check_bits(bits);
    if (power_re <= 0.0 || power_im <= 0.0)
        throw std::invalid_argument("calibrate: component powers must be positive");
    const double step = mmse_stepsize(bits);
    q.bits = bits;
    q.delta_re = std::sqrt(power_re) * step;
    q.delta_im = std::sqrt(power_im) * step;
    return q;
}

QuantizedObs quantize(const QuantizerSpec& spec, const cmat& u) {
    QuantizedObs obs;
    obs.spec = spec;
    obs.rows = u.rows;
    obs.cols = u.cols;
    if (spec.is_infinite()) {
        obs.raw = u;
        return obs;
    }
    obs.bins_re.resize(u.size());
    obs.bins_im.resize(u.size());
    for (size_t i = 0; i < u.size(); ++i) {
        obs.bins_re[i] = static_cast<int16_t>(spec.bin_of(u.data[i].real(), false));
        obs.bins_im[i] = static_cast<int16_t>(spec.bin_of(u.data[i].imag(), true));
    }
    return obs;
}

cmat reconstruct(const QuantizedObs& obs) {
    if (obs.spec.is_infinite()) return obs.raw;
    cmat u(obs.rows, obs.cols);
    for (size_t i = 0; i < u.size(); ++i)
        u.data[i] = cplx(obs.spec.recon_level(obs.bins_re[i], false),
                         obs.spec.recon_level(obs.bins_im[i], true));
    return u;
}

void write_stepsize_table_csv(const std::string& path, int max_bits) {
    check_bits(max_bits);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_stepsize_table_csv: cannot open " + path);
    out << "b,delta,distortion\n";
    out.precision(12);
    for (int b = 1; b <= max_bits; ++b) {
        double step = mmse_stepsize(b);
        out << b << ',' << step << ',' << midrise_distortion(b, step) << '\n';
    }
}

}  // namespace fewbit
