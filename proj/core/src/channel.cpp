#include "fewbit/channel.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "fewbit/dft.hpp"

namespace fewbit {

ChannelRealization::ChannelRealization(cvec taps, int m_hint) : h(std::move(taps)) {
    if (h.empty()) throw std::invalid_argument("ChannelRealization: empty tap vector");
    if (m_hint > 0) {
        cached_freq_ = freq_response(m_hint);
        cached_m_ = m_hint;
    }
}

cvec ChannelRealization::freq_response(int m) const {
    if (m < length()) throw std::invalid_argument("freq_response: m < L");
    if (m == cached_m_) return cached_freq_;
    cvec f(m, cplx(0.0, 0.0));
    std::copy(h.begin(), h.end(), f.begin());
    fft_unitary(f);
    const double s = std::sqrt(static_cast<double>(m));
    for (cplx& v : f) v *= s;
    return f;
}

cmat apply_channel(const ChannelRealization& ch, const cmat& x, double noise_var, Rng& rng) {
    if (x.rows < ch.length()) throw std::invalid_argument("apply_channel: M < L");
    if (noise_var < 0.0) throw std::invalid_argument("apply_channel: negative noise variance");
    const cvec freq = ch.freq_response(x.rows);
    cmat u(x.rows, x.cols);
    cvec work(x.rows);
    for (int k = 0; k < x.cols; ++k) {
        std::copy(x.col(k), x.col(k) + x.rows, work.begin());
        fft_unitary(work);
        for (int m = 0; m < x.rows; ++m) work[m] *= freq[m];
        ifft_unitary(work);
        std::copy(work.begin(), work.end(), u.col(k));
    }
    if (noise_var > 0.0) {
        const double s = std::sqrt(noise_var);
        for (cplx& v : u.data) v += s * rng.cgauss();
    }
    return u;
}

ChannelRealization generate_channel(const ChannelGenSpec& spec, Rng& rng) {
    if (spec.l <= 0) throw std::invalid_argument("generate_channel: L must be positive");
    if (spec.sparsity <= 0.0 || spec.sparsity > 1.0)
        throw std::invalid_argument("generate_channel: sparsity must be in (0,1]");
    // exponential PDP, scaled so E||h||^2 = sparsity * sum(nu_l) = 1
    std::vector<double> nu(spec.l);
    double sum = 0.0;
    for (int l = 0; l < spec.l; ++l) {
        nu[l] = std::pow(10.0, -spec.decay_db_per_tap * l / 10.0);
        sum += nu[l];
    }
    const double scale = 1.0 / (spec.sparsity * sum);
    cvec h(spec.l, cplx(0.0, 0.0));
    bool any = false;
    // draw one Bernoulli and one complex Gaussian per tap in fixed order so
    // the stream layout is stable
    for (int l = 0; l < spec.l; ++l) {
        bool active = rng.uniform() < spec.sparsity;
        cplx g = rng.cgauss();
        if (active) {
            h[l] = g * std::sqrt(nu[l] * scale);
            any = true;
        }
    }
    if (!any) h[0] = rng.cgauss() * std::sqrt(nu[0] * scale);
    return ChannelRealization(std::move(h));
}

ChannelRealization load_channel(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_channel: cannot open " + path);
    std::map<int, cplx> taps;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // strip comments and blanks
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r\n,") == std::string::npos) continue;
        std::istringstream ss(line);
        std::string f0, f1, f2, extra;
        if (!std::getline(ss, f0, ',') || !std::getline(ss, f1, ',') || !std::getline(ss, f2, ','))
            throw std::runtime_error("load_channel: malformed row at line " + std::to_string(lineno));
        if (std::getline(ss, extra, ',') && extra.find_first_not_of(" \t\r\n") != std::string::npos)
            throw std::runtime_error("load_channel: too many fields at line " + std::to_string(lineno));
        int lag;
        double re, im;
        try {
            lag = std::stoi(f0);
            re = std::stod(f1);
            im = std::stod(f2);
        } catch (const std::exception&) {
            throw std::runtime_error("load_channel: malformed row at line " + std::to_string(lineno));
        }
        if (lag < 0) throw std::runtime_error("load_channel: negative lag at line " + std::to_string(lineno));
        if (!taps.emplace(lag, cplx(re, im)).second)
            throw std::runtime_error("load_channel: duplicate lag " + std::to_string(lag));
    }
    if (taps.empty()) throw std::runtime_error("load_channel: no taps in " + path);
    cvec h(taps.rbegin()->first + 1, cplx(0.0, 0.0));
    for (const auto& [lag, v] : taps) h[lag] = v;
    return ChannelRealization(std::move(h));
}

void save_channel(const ChannelRealization& ch, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_channel: cannot open " + path);
    out.precision(17);
    for (int l = 0; l < ch.length(); ++l)
        out << l << ',' << ch.h[l].real() << ',' << ch.h[l].imag() << '\n';
}

}  // namespace fewbit
