#include "fewbit/frame.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "fewbit/golay.hpp"

namespace fewbit {

namespace {

int ilog2_exact(int v) {
    int g = 0;
    while ((1 << g) < v) ++g;
    return ((1 << g) == v) ? g : -1;
}

}  // namespace

Modulation modulation_from_string(const std::string& s) {
    if (s == "pi2-bpsk") return Modulation::Pi2Bpsk;
    if (s == "qpsk-gray") return Modulation::QpskGray;
    if (s == "16qam-gray") return Modulation::Qam16Gray;
    throw std::invalid_argument("unknown modulation: " + s);
}

std::string modulation_name(Modulation mod) {
    switch (mod) {
        case Modulation::Pi2Bpsk: return "pi2-bpsk";
        case Modulation::QpskGray: return "qpsk-gray";
        case Modulation::Qam16Gray: return "16qam-gray";
    }
    return "?";
}

void bits_of_symbol(int j, int a, uint8_t* out) {
    for (int i = 0; i < a; ++i) out[i] = static_cast<uint8_t>((j >> (a - 1 - i)) & 1);
}

cvec make_alphabet(Modulation mod, int& bits_per_symbol) {
    switch (mod) {
        case Modulation::Pi2Bpsk: {
            bits_per_symbol = 1;
            return {cplx(1.0, 0.0), cplx(-1.0, 0.0)};
        }
        case Modulation::QpskGray: {
            bits_per_symbol = 2;
            const double s = 1.0 / std::sqrt(2.0);
            cvec pts(4);
            for (int j = 0; j < 4; ++j) {
                int c1 = (j >> 1) & 1, c2 = j & 1;
                pts[j] = cplx((1 - 2 * c1) * s, (1 - 2 * c2) * s);
            }
            return pts;
        }
        case Modulation::Qam16Gray: {
            bits_per_symbol = 4;
            // 2-bit Gray levels: 00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3
            auto level = [](int b0, int b1) {
                static const double lv[2][2] = {{-3.0, -1.0}, {+3.0, +1.0}};
                return lv[b0][b1];
            };
            const double s = 1.0 / std::sqrt(10.0);
            cvec pts(16);
            for (int j = 0; j < 16; ++j) {
                int c1 = (j >> 3) & 1, c2 = (j >> 2) & 1, c3 = (j >> 1) & 1, c4 = j & 1;
                pts[j] = cplx(level(c1, c2) * s, level(c3, c4) * s);
            }
            return pts;
        }
    }
    throw std::logic_error("make_alphabet: bad modulation");
}

FrameSpec FrameSpec::make(int m, int k_p, int k_d, int n_d, int n_g, int n_c, Modulation mod) {
    FrameSpec s;
    s.m = m;
    s.k_p = k_p;
    s.k_d = k_d;
    s.n_d = n_d;
    s.n_g = n_g;
    s.n_c = n_c;
    s.mod = mod;
    s.alphabet = make_alphabet(mod, s.a);
    s.validate();
    return s;
}

void FrameSpec::validate() const {
    if (m <= 0 || k_p < 0 || k_d < 0 || n_d < 0 || n_g < 0 || n_c < 0)
        throw std::invalid_argument("FrameSpec: negative dimension");
    if (m != n_d + n_g) throw std::invalid_argument("FrameSpec: M != N_D + N_G");
    if (n_c > m) throw std::invalid_argument("FrameSpec: N_C > M");
    if (k() <= 0) throw std::invalid_argument("FrameSpec: no blocks");
    if (static_cast<int>(alphabet.size()) != (1 << a))
        throw std::invalid_argument("FrameSpec: alphabet size != 2^A");
    double p = 0.0;
    for (const cplx& s : alphabet) p += std::norm(s);
    p /= static_cast<double>(alphabet.size());
    if (std::abs(p - 1.0) > 1e-12) throw std::invalid_argument("FrameSpec: alphabet mean power != 1");
    if (k_p > 0) {
        if (m % 4 != 0 || ilog2_exact(m / 4) < 1)
            throw std::invalid_argument("FrameSpec: pilot pattern needs M/4 a power of two >= 2");
    }
    if (n_g > 0 && ilog2_exact(n_g) < 1)
        throw std::invalid_argument("FrameSpec: guard length must be a power of two >= 2");
}

cplx Frame::rotation(int n) const {
    if (spec.mod != Modulation::Pi2Bpsk) return cplx(1.0, 0.0);
    switch (n & 3) {
        case 0: return cplx(1.0, 0.0);
        case 1: return cplx(0.0, 1.0);
        case 2: return cplx(-1.0, 0.0);
        default: return cplx(0.0, -1.0);
    }
}

cvec pilot_block(const FrameSpec& spec, int block_index) {
    const int q = spec.m / 4;
    const int g = ilog2_exact(q);
    if (g < 1) throw std::invalid_argument("pilot_block: M/4 must be a power of two >= 2");
    auto [ga, gb] = golay_pair(g);
    // quarter sign/sequence patterns; both end in -g_a so every block shares
    // the same CP tail
    struct Part {
        const std::vector<double>* seq;
        double sign;
    };
    const Part pat_a[4] = {{&gb, -1.0}, {&ga, -1.0}, {&gb, +1.0}, {&ga, -1.0}};
    const Part pat_b[4] = {{&gb, -1.0}, {&ga, +1.0}, {&gb, -1.0}, {&ga, -1.0}};
    const Part* pat = (block_index % 2 == 0) ? pat_a : pat_b;
    cvec out;
    out.reserve(spec.m);
    for (int p = 0; p < 4; ++p)
        for (int i = 0; i < q; ++i) out.emplace_back(pat[p].sign * (*pat[p].seq)[i], 0.0);
    return out;
}

cvec guard_sequence(const FrameSpec& spec) {
    if (spec.n_g == 0) return {};
    auto [ga, gb] = golay_pair(ilog2_exact(spec.n_g));
    (void)gb;
    cvec out(spec.n_g);
    for (int i = 0; i < spec.n_g; ++i) out[i] = cplx(ga[i], 0.0);
    return out;
}

Frame build_frame(const FrameSpec& spec, const cvec& data_symbols) {
    spec.validate();
    if (static_cast<int>(data_symbols.size()) != spec.data_symbols())
        throw std::invalid_argument("build_frame: data symbol count mismatch");

    Frame f;
    f.spec = spec;
    f.x = cmat(spec.m, spec.k());
    f.known.assign(f.x.size(), 0);

    for (int k = 0; k < spec.k_p; ++k) {
        cvec blk = pilot_block(spec, k);
        for (int m = 0; m < spec.m; ++m) {
            f.x(m, k) = blk[m];
            f.known[static_cast<size_t>(k) * spec.m + m] = 1;
        }
    }
    // CP rule: all pilot blocks share the same length-N_C tail
    for (int k = 1; k < spec.k_p; ++k)
        for (int i = 0; i < spec.n_c; ++i)
            if (f.x(spec.m - spec.n_c + i, k) != f.x(spec.m - spec.n_c + i, 0))
                throw std::invalid_argument("build_frame: pilot blocks do not share a CP tail; reduce N_C");

    cvec guard = guard_sequence(spec);
    for (int k = spec.k_p; k < spec.k(); ++k) {
        for (int m = 0; m < spec.n_d; ++m) f.x(m, k) = data_symbols[(k - spec.k_p) * spec.n_d + m];
        for (int i = 0; i < spec.n_g; ++i) {
            f.x(spec.n_d + i, k) = guard[i];
            f.known[static_cast<size_t>(k) * spec.m + spec.n_d + i] = 1;
        }
    }
    return f;
}

cvec map_bits(const FrameSpec& spec, const std::vector<uint8_t>& bits) {
    if (static_cast<int>(bits.size()) != spec.coded_bits())
        throw std::invalid_argument("map_bits: bit count mismatch");
    const int n_sym = spec.data_symbols();
    cvec out(n_sym);
    for (int n = 0; n < n_sym; ++n) {
        int j = 0;
        for (int i = 0; i < spec.a; ++i) {
            uint8_t b = bits[n * spec.a + i];
            if (b > 1) throw std::invalid_argument("map_bits: non-binary input");
            j = (j << 1) | b;
        }
        cplx s = spec.alphabet[j];
        if (spec.mod == Modulation::Pi2Bpsk) {
            static const cplx rot[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
            s *= rot[n & 3];
        }
        out[n] = s;
    }
    return out;
}

std::vector<uint8_t> unmap_hard(const FrameSpec& spec, const cvec& symbols) {
    std::vector<uint8_t> bits(symbols.size() * spec.a);
    for (size_t n = 0; n < symbols.size(); ++n) {
        cplx s = symbols[n];
        if (spec.mod == Modulation::Pi2Bpsk) {
            static const cplx derot[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
            s *= derot[n & 3];
        }
        int best = 0;
        double best_d = std::norm(s - spec.alphabet[0]);
        for (size_t j = 1; j < spec.alphabet.size(); ++j) {
            double d = std::norm(s - spec.alphabet[j]);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(j);
            }
        }
        bits_of_symbol(best, spec.a, bits.data() + n * spec.a);
    }
    return bits;
}

FrameSpec frame_spec_from_kv(const std::map<std::string, std::string>& kv) {
    auto need = [&](const std::string& key) {
        auto it = kv.find(key);
        if (it == kv.end()) throw std::invalid_argument("frame spec: missing key " + key);
        return it->second;
    };
    return FrameSpec::make(std::stoi(need("frame.m")), std::stoi(need("frame.kp")),
                           std::stoi(need("frame.kd")), std::stoi(need("frame.nd")),
                           std::stoi(need("frame.ng")), std::stoi(need("frame.nc")),
                           modulation_from_string(need("modulation")));
}

void export_frame_csv(const Frame& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_frame_csv: cannot open " + path);
    out << "row,col,re,im,known\n";
    out.precision(17);
    for (int k = 0; k < f.spec.k(); ++k)
        for (int m = 0; m < f.spec.m; ++m)
            out << m << ',' << k << ',' << f.x(m, k).real() << ',' << f.x(m, k).imag() << ','
                << (f.is_known(m, k) ? 1 : 0) << '\n';
}

}  // namespace fewbit
