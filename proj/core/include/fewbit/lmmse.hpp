#pragma once

#include "fewbit/bussgang.hpp"
#include "fewbit/common.hpp"

namespace fewbit {

struct LmmseResult {
    cmat xhat;                 // posterior symbol means, pinned where v = 0
    std::vector<double> xvar;  // per position, column-major
    cmat qhat;                 // extrinsic means
    std::vector<double> qvar;  // extrinsic variances, 0 at pinned positions
};

// Exact LMMSE on the linearized model y = (1-eta)(I_K (x) H) x + w_eff with
// the channel estimate treated as exact. Priors are per-position means mu and
// variances v; positions with v = 0 are pinned. The MK x MK system is solved
// as K independent M x M blocks (the model is block diagonal).
LmmseResult lmmse_equalize_exact(const cmat& y_recon, const cvec& hhat, const BussgangParams& bg,
                                 const cmat& mu, const std::vector<double>& v);

// Same contract; Diag(v) is replaced by mean(v) I so each block reduces to a
// frequency-domain scalar Wiener filter. Uses 4K+1 M-point transforms.
LmmseResult lmmse_equalize_fast(const cmat& y_recon, const cvec& hhat, const BussgangParams& bg,
                                const cmat& mu, const std::vector<double>& v);

}  // namespace fewbit
