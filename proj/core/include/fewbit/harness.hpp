#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fewbit/channel.hpp"
#include "fewbit/coding.hpp"
#include "fewbit/config.hpp"
#include "fewbit/frame.hpp"
#include "fewbit/turbo.hpp"

namespace fewbit {

enum class ReceiverKind { Pbigamp, PbigampBussgang, GolayLmmseExact, GolayLmmseFast, Pcsi };

std::string receiver_name(ReceiverKind r);
ReceiverKind receiver_from_string(const std::string& s);

struct ScenarioConfig {
    FrameSpec frame;
    bool channel_from_file = false;
    std::string channel_file;
    ChannelGenSpec chan_gen;
    std::vector<int> bits;  // QuantizerSpec::kInfinite for the unquantized ADC
    std::vector<double> ebn0_db;
    std::vector<ReceiverKind> receivers;
    int trials = 100;
    uint64_t seed = 1;
    int workers = 1;
    double mismatch_db = 0.0;
    std::string code_file;  // alist path; empty builds the default code
    uint64_t code_seed = 7;
    uint64_t interleaver_seed = 11;
    TurboConfig turbo;
    bool empirical_quantizer_power = false;

    static ScenarioConfig from_kv(const KvMap& kv);
    std::vector<std::string> validate() const;
};

struct ResultRow {
    std::string receiver;
    int bits = 0;
    double ebn0_db = 0.0;
    double mismatch_db = 0.0;
    double ber = 0.0;
    double nmse = 0.0;
    long frames = 0;
    long bit_errors = 0;
    double mean_turbo_iters = 0.0;
    double mean_eq_iters = 0.0;
    double wall_time_s = 0.0;  // excluded from determinism comparisons
};

double noise_variance_from_ebn0(double ebn0_db, double rate, int bits_per_symbol, double sym_var);

// Full Monte-Carlo sweep. Per-trial randomness is bound to the trial index,
// so results are identical for any worker count, and all receivers and bit
// depths at one (trial, Eb/N0) see the same channel, bits, and noise.
std::vector<ResultRow> run_sweep(const ScenarioConfig& cfg, std::ostream* log = nullptr);

std::string bits_label(int bits);
int bits_from_label(const std::string& s);

void write_results_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::vector<ResultRow> read_results_csv(const std::string& path);

std::string summarize(const std::vector<ResultRow>& rows);
void write_gnuplot_data(const std::vector<ResultRow>& rows, const std::string& dir);

}  // namespace fewbit
