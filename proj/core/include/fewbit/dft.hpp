#pragma once

#include "fewbit/common.hpp"

namespace fewbit {

// Unitary M-point DFT helpers. fft_unitary applies F_M (forward transform
// scaled by 1/sqrt(M)); ifft_unitary applies F_M^H. Each executed transform
// increments a thread-local counter so callers can assert per-iteration
// transform budgets.

void fft_unitary(cplx* x, int m);
void ifft_unitary(cplx* x, int m);

inline void fft_unitary(cvec& x) { fft_unitary(x.data(), static_cast<int>(x.size())); }
inline void ifft_unitary(cvec& x) { ifft_unitary(x.data(), static_cast<int>(x.size())); }

long fft_transform_count();
void fft_reset_transform_count();

}  // namespace fewbit
