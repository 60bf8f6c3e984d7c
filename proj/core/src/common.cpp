#include "fewbit/common.hpp"

#include <cmath>

namespace fewbit {

double norm_sq(const cvec& v) {
    double s = 0.0;
    for (const cplx& x : v) s += std::norm(x);
    return s;
}

double fro_norm_sq(const cmat& a) { return norm_sq(a.data); }

int Rng::uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
    // rejection sampling over the top bits to avoid modulo bias
    const uint64_t bound = UINT64_MAX - UINT64_MAX % static_cast<uint64_t>(n);
    uint64_t u;
    do {
        u = eng_();
    } while (u >= bound);
    return static_cast<int>(u % static_cast<uint64_t>(n));
}

double Rng::gauss() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // Box-Muller; u1 in (0,1]
    double u1 = (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.28318530717958647692 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

uint64_t mix_seed(uint64_t base, uint64_t a, uint64_t b, uint64_t c) {
    auto splitmix = [](uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    uint64_t s = base;
    uint64_t h = splitmix(s);
    s ^= a;
    h ^= splitmix(s);
    s ^= b;
    h ^= splitmix(s);
    s ^= c;
    h ^= splitmix(s);
    return h;
}

}  // namespace fewbit
