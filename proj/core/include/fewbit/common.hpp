#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace fewbit {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

// Column-major complex matrix, sized once and indexed (row, col).
struct cmat {
    int rows = 0;
    int cols = 0;
    cvec data;

    cmat() = default;
    cmat(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c)) {}

    cplx& operator()(int m, int k) { return data[static_cast<size_t>(k) * rows + m]; }
    const cplx& operator()(int m, int k) const { return data[static_cast<size_t>(k) * rows + m]; }

    cplx* col(int k) { return data.data() + static_cast<size_t>(k) * rows; }
    const cplx* col(int k) const { return data.data() + static_cast<size_t>(k) * rows; }

    size_t size() const { return data.size(); }
    void fill(cplx v) { std::fill(data.begin(), data.end(), v); }
};

double norm_sq(const cvec& v);
double fro_norm_sq(const cmat& a);

// mt19937_64 with explicit Box-Muller so streams do not depend on the
// standard library's distribution internals.
class Rng {
  public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    // uniform in [0,1)
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    int uniform_int(int n);  // [0, n)

    double gauss();
    cplx cgauss() {
        // CN(0,1): each component N(0, 1/2)
        constexpr double half = 0.70710678118654752440;
        return {gauss() * half, gauss() * half};
    }

  private:
    std::mt19937_64 eng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// splitmix64-based combiner for deriving per-trial substream seeds
uint64_t mix_seed(uint64_t base, uint64_t a, uint64_t b = 0, uint64_t c = 0);

}  // namespace fewbit
