#pragma once

#include <utility>
#include <vector>

namespace fewbit {

// Complementary +/-1 pair of length 2^log2_len built by recursive doubling:
// a' = [a b], b' = [a -b]. The aperiodic autocorrelations satisfy
// R_a(tau) + R_b(tau) = 2*len*delta(tau) exactly. log2_len must be in [1,10].
std::pair<std::vector<double>, std::vector<double>> golay_pair(int log2_len);

// Aperiodic autocorrelation sum(x[i]*x[i+tau]) for tau >= 0.
double aperiodic_autocorr(const std::vector<double>& x, int tau);

}  // namespace fewbit
