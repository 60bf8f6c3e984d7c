#include "fewbit/golay.hpp"

#include <stdexcept>

namespace fewbit {

std::pair<std::vector<double>, std::vector<double>> golay_pair(int log2_len) {
    if (log2_len < 1 || log2_len > 10)
        throw std::invalid_argument("golay_pair: log2_len must be in [1,10]");
    std::vector<double> a{1.0}, b{1.0};
    for (int s = 0; s < log2_len; ++s) {
        std::vector<double> na(a.size() * 2), nb(a.size() * 2);
        for (size_t i = 0; i < a.size(); ++i) {
            na[i] = a[i];
            na[i + a.size()] = b[i];
            nb[i] = a[i];
            nb[i + a.size()] = -b[i];
        }
        a = std::move(na);
        b = std::move(nb);
    }
    return {a, b};
}

double aperiodic_autocorr(const std::vector<double>& x, int tau) {
    double s = 0.0;
    for (size_t i = 0; i + tau < x.size(); ++i) s += x[i] * x[i + tau];
    return s;
}

}  // namespace fewbit
