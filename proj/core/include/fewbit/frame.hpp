#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "fewbit/common.hpp"

namespace fewbit {

enum class Modulation { Pi2Bpsk, QpskGray, Qam16Gray };

Modulation modulation_from_string(const std::string& s);
std::string modulation_name(Modulation mod);

// Unit-mean-energy alphabet for the modulation; sets bits_per_symbol.
cvec make_alphabet(Modulation mod, int& bits_per_symbol);

// MSB-first coded-bit pattern of alphabet index j (c_1 ... c_A).
void bits_of_symbol(int j, int a, uint8_t* out);

struct FrameSpec {
    int m = 0;    // symbols per block
    int k_p = 0;  // pilot blocks
    int k_d = 0;  // data blocks
    int n_d = 0;  // data symbols per block
    int n_g = 0;  // guard symbols per block
    int n_c = 0;  // cyclic-prefix length
    int a = 0;    // bits per symbol
    Modulation mod = Modulation::QpskGray;
    cvec alphabet;

    static FrameSpec make(int m, int k_p, int k_d, int n_d, int n_g, int n_c, Modulation mod);

    int k() const { return k_p + k_d; }
    int data_symbols() const { return k_d * n_d; }
    int coded_bits() const { return a * data_symbols(); }
    void validate() const;
};

// The frame's M x K symbol matrix plus the known/unknown partition. Columns
// 1..K_P are pilot blocks; data columns are [data; guard]. Positions are
// mapped to the coded-symbol stream index n in block order.
struct Frame {
    FrameSpec spec;
    cmat x;                      // M x K
    std::vector<uint8_t> known;  // M x K, column-major

    bool is_known(int m, int k) const { return known[static_cast<size_t>(k) * spec.m + m] != 0; }

    // coded-symbol index for an unknown position, -1 for pilot/guard
    int data_index(int m, int k) const {
        if (k < spec.k_p || m >= spec.n_d) return -1;
        return (k - spec.k_p) * spec.n_d + m;
    }

    // per-baud rotation of the data alphabet (pi/2-BPSK), identity otherwise
    cplx rotation(int n) const;

    int unknown_count() const { return spec.data_symbols(); }
};

// Pilot block content (block_index in [0, K_P)): alternating concatenated
// +/-Golay quarter patterns, all ending in the same length-N_C tail.
cvec pilot_block(const FrameSpec& spec, int block_index);

// Length-N_G guard: the Golay a-sequence at unit symbol energy.
cvec guard_sequence(const FrameSpec& spec);

Frame build_frame(const FrameSpec& spec, const cvec& data_symbols);

cvec map_bits(const FrameSpec& spec, const std::vector<uint8_t>& bits);
std::vector<uint8_t> unmap_hard(const FrameSpec& spec, const cvec& symbols);

FrameSpec frame_spec_from_kv(const std::map<std::string, std::string>& kv);
void export_frame_csv(const Frame& f, const std::string& path);

}  // namespace fewbit
