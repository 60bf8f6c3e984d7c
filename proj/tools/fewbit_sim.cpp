// Monte-Carlo driver for the few-bit single-carrier receiver library.

#include <CLI11.hpp>

#include <iostream>

#include "fewbit/channel.hpp"
#include "fewbit/config.hpp"
#include "fewbit/frame.hpp"
#include "fewbit/harness.hpp"
#include "fewbit/quantizer.hpp"

using namespace fewbit;

namespace {

int cmd_sweep(const std::string& config_path, const std::string& out_path, const KvMap& overrides,
              bool pcsi) {
    KvMap kv = config_path.empty() ? KvMap{} : parse_kv_file(config_path);
    for (const auto& [k, v] : overrides) kv[k] = v;
    ScenarioConfig cfg = ScenarioConfig::from_kv(kv);
    if (pcsi) {
        bool present = false;
        for (ReceiverKind r : cfg.receivers) present |= (r == ReceiverKind::Pcsi);
        if (!present) cfg.receivers.push_back(ReceiverKind::Pcsi);
    }
    auto errs = cfg.validate();
    if (!errs.empty()) {
        std::cerr << "configuration errors:\n";
        for (const auto& e : errs) std::cerr << "  - " << e << "\n";
        return 2;
    }
    std::vector<ResultRow> rows = run_sweep(cfg, &std::cerr);
    write_results_csv(rows, out_path);
    std::cerr << "wrote " << rows.size() << " rows to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"few-bit single-carrier receiver simulator"};
    app.require_subcommand(1);

    // sweep
    std::string config_path, out_path = "results.csv";
    std::string seed_s, workers_s, receivers_s, bits_s, ebn0_s, trials_s, mismatch_s, chanfile_s;
    bool pcsi = false;
    auto* sweep = app.add_subcommand("sweep", "run a Monte-Carlo BER/NMSE sweep");
    sweep->add_option("--config", config_path, "key=value scenario config file");
    sweep->add_option("--out", out_path, "output CSV path");
    sweep->add_option("--seed", seed_s, "base seed");
    sweep->add_option("--workers", workers_s, "worker thread count");
    sweep->add_option("--receivers", receivers_s, "comma list: pbigamp,pbigamp-bussgang,golay-lmmse,golay-lmmse-fast,pcsi");
    sweep->add_option("--bits", bits_s, "comma list of ADC bit depths (1..8 or inf)");
    sweep->add_option("--ebn0", ebn0_s, "comma list of Eb/N0 grid points in dB");
    sweep->add_option("--trials", trials_s, "Monte-Carlo trials per grid point");
    sweep->add_option("--mismatch-db", mismatch_s, "assumed-vs-true noise variance offset in dB");
    sweep->add_option("--channel-file", chanfile_s, "CSV of channel taps (lag,re,im)");
    sweep->add_flag("--pcsi", pcsi, "add the perfect-CSI reference receiver");

    // summarize
    std::string sum_csv, plots_dir;
    auto* summ = app.add_subcommand("summarize", "print a table from a results CSV");
    summ->add_option("csv", sum_csv, "results CSV")->required();
    summ->add_option("--plots-dir", plots_dir, "also write gnuplot-ready .dat files here");

    // stepsize-table
    std::string table_out = "stepsizes.csv";
    int table_max_bits = 8;
    auto* table = app.add_subcommand("stepsize-table", "export MMSE quantizer stepsizes as CSV");
    table->add_option("--out", table_out, "output CSV path");
    table->add_option("--max-bits", table_max_bits, "largest bit depth");

    // export-frame
    std::string frame_config, frame_out = "frame.csv";
    auto* fexp = app.add_subcommand("export-frame", "build a pilot-only frame and export it as CSV");
    fexp->add_option("--config", frame_config, "key=value frame config")->required();
    fexp->add_option("--out", frame_out, "output CSV path");

    // gen-channel
    std::string chan_out = "channel.csv";
    int chan_l = 64;
    double chan_decay = 0.4, chan_sparsity = 0.25;
    uint64_t chan_seed = 1;
    auto* cgen = app.add_subcommand("gen-channel", "draw a synthetic sparse channel and export it");
    cgen->add_option("--out", chan_out, "output CSV path");
    cgen->add_option("--taps", chan_l, "tap count L");
    cgen->add_option("--decay-db", chan_decay, "PDP decay in dB per tap");
    cgen->add_option("--sparsity", chan_sparsity, "active-tap probability");
    cgen->add_option("--seed", chan_seed, "seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) {
            KvMap overrides;
            if (!seed_s.empty()) overrides["seed"] = seed_s;
            if (!workers_s.empty()) overrides["workers"] = workers_s;
            if (!receivers_s.empty()) overrides["receivers"] = receivers_s;
            if (!bits_s.empty()) overrides["bits"] = bits_s;
            if (!ebn0_s.empty()) overrides["ebn0_db"] = ebn0_s;
            if (!trials_s.empty()) overrides["trials"] = trials_s;
            if (!mismatch_s.empty()) overrides["mismatch_db"] = mismatch_s;
            if (!chanfile_s.empty()) {
                overrides["channel.source"] = "file";
                overrides["channel.file"] = chanfile_s;
            }
            return cmd_sweep(config_path, out_path, overrides, pcsi);
        }
        if (summ->parsed()) {
            std::vector<ResultRow> rows = read_results_csv(sum_csv);
            std::cout << summarize(rows);
            if (!plots_dir.empty()) {
                write_gnuplot_data(rows, plots_dir);
                std::cerr << "wrote plot data to " << plots_dir << "\n";
            }
            return 0;
        }
        if (table->parsed()) {
            write_stepsize_table_csv(table_out, table_max_bits);
            std::cerr << "wrote " << table_out << "\n";
            return 0;
        }
        if (fexp->parsed()) {
            FrameSpec spec = frame_spec_from_kv(parse_kv_file(frame_config));
            FrameSpec pilot_only =
                FrameSpec::make(spec.m, spec.k_p, 0, spec.n_d, spec.n_g, spec.n_c, spec.mod);
            Frame f = build_frame(pilot_only, {});
            export_frame_csv(f, frame_out);
            std::cerr << "wrote " << frame_out << "\n";
            return 0;
        }
        if (cgen->parsed()) {
            ChannelGenSpec spec;
            spec.l = chan_l;
            spec.decay_db_per_tap = chan_decay;
            spec.sparsity = chan_sparsity;
            spec.seed = chan_seed;
            Rng rng(spec.seed);
            save_channel(generate_channel(spec, rng), chan_out);
            std::cerr << "wrote " << chan_out << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
