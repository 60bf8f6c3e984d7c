#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fewbit/common.hpp"

namespace fewbit {

// Binary linear code given by its parity-check matrix. Construction performs
// GF(2) elimination once to pick an information set and build the systematic
// encoder; dependent parity rows are dropped.
struct CodeSpec {
    int n_c = 0;  // code length
    int n_b = 0;  // information length
    std::vector<std::vector<int>> check_neighbors;  // per check: variable indices
    std::vector<std::vector<int>> var_neighbors;    // per variable: check indices
    std::vector<int> info_positions;                // size n_b
    std::vector<int> parity_positions;              // size n_c - n_b
    // parity_expr[i] lists the info positions (indices into info bit vector)
    // whose sum gives the bit at parity_positions[i]
    std::vector<std::vector<int>> parity_expr;

    double rate() const { return static_cast<double>(n_b) / n_c; }
    int num_checks() const { return static_cast<int>(check_neighbors.size()); }

    static CodeSpec from_rows(std::vector<std::vector<int>> check_rows, int n);
    static CodeSpec from_alist(const std::string& path);
    // Rate-1/2 irregular LDPC (column weights 2/3/4, average 3) built with a
    // progressive edge-growth style greedy placement from a fixed seed.
    static CodeSpec make_default(int n, uint64_t seed);

    void write_alist(const std::string& path) const;
};

std::vector<uint8_t> encode(const CodeSpec& code, const std::vector<uint8_t>& info);
bool parity_check(const CodeSpec& code, const std::vector<uint8_t>& codeword);

struct Interleaver {
    std::vector<int> perm;  // output[i] = input[perm[i]]
    std::vector<int> inv;

    static Interleaver make(int n, uint64_t seed);

    template <typename T>
    std::vector<T> apply(const std::vector<T>& in) const {
        std::vector<T> out(in.size());
        for (size_t i = 0; i < in.size(); ++i) out[i] = in[perm[i]];
        return out;
    }
    template <typename T>
    std::vector<T> invert(const std::vector<T>& in) const {
        std::vector<T> out(in.size());
        for (size_t i = 0; i < in.size(); ++i) out[i] = in[inv[i]];
        return out;
    }
};

enum class BeliefTag { Prior, Posterior, Extrinsic };

// Per-coded-bit beliefs in LLR form, llr = log(P(c=0)/P(c=1)), clamped to
// +/-kLlrClamp. The tag tracks which side of the extrinsic bookkeeping the
// values are on.
struct BitBeliefs {
    static constexpr double kLlrClamp = 30.0;

    std::vector<double> llr;
    BeliefTag tag = BeliefTag::Prior;

    static BitBeliefs uniform(int n, BeliefTag t = BeliefTag::Prior) {
        BitBeliefs b;
        b.llr.assign(n, 0.0);
        b.tag = t;
        return b;
    }
    static double clamp_llr(double v) {
        return std::max(-kLlrClamp, std::min(kLlrClamp, v));
    }
    double prob_one(int i) const { return 1.0 / (1.0 + std::exp(llr[i])); }
    int size() const { return static_cast<int>(llr.size()); }
};

struct DecodeResult {
    BitBeliefs posterior;
    std::vector<uint8_t> hard_bits;  // full codeword decision
    std::vector<uint8_t> info_bits;
    bool parity_ok = false;
    int iters_used = 0;
};

// Sum-product BP with per-iteration parity early exit.
DecodeResult decode_soft(const CodeSpec& code, const BitBeliefs& priors, int max_ldpc_iters);

// gamma_j = prod_a Pr{c_a = bit a of symbol j} over the 2^a-point alphabet.
void bits_to_symbol_pmf(const double* llr_group, int a, double* pmf_out);

// Pr{c_a = 1} = sum of pmf over symbols whose bit a is 1, returned as LLRs.
void symbol_pmf_to_bit_llrs(const double* pmf, int a, double* llr_out);

BitBeliefs extrinsic_divide(const BitBeliefs& posterior, const BitBeliefs& prior);

}  // namespace fewbit
