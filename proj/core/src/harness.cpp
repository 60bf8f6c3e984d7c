#include "fewbit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "fewbit/golay_estimator.hpp"
#include "fewbit/quantizer.hpp"

namespace fewbit {

std::string receiver_name(ReceiverKind r) {
    switch (r) {
        case ReceiverKind::Pbigamp: return "pbigamp";
        case ReceiverKind::PbigampBussgang: return "pbigamp-bussgang";
        case ReceiverKind::GolayLmmseExact: return "golay-lmmse";
        case ReceiverKind::GolayLmmseFast: return "golay-lmmse-fast";
        case ReceiverKind::Pcsi: return "pcsi";
    }
    return "?";
}

ReceiverKind receiver_from_string(const std::string& s) {
    if (s == "pbigamp") return ReceiverKind::Pbigamp;
    if (s == "pbigamp-bussgang") return ReceiverKind::PbigampBussgang;
    if (s == "golay-lmmse" || s == "lmmse-exact") return ReceiverKind::GolayLmmseExact;
    if (s == "golay-lmmse-fast" || s == "lmmse-fast") return ReceiverKind::GolayLmmseFast;
    if (s == "pcsi") return ReceiverKind::Pcsi;
    throw std::invalid_argument("unknown receiver: " + s);
}

std::string bits_label(int bits) {
    return bits == QuantizerSpec::kInfinite ? "inf" : std::to_string(bits);
}

int bits_from_label(const std::string& s) {
    if (s == "inf") return QuantizerSpec::kInfinite;
    return std::stoi(s);
}

double noise_variance_from_ebn0(double ebn0_db, double rate, int bits_per_symbol, double sym_var) {
    if (rate <= 0.0 || bits_per_symbol <= 0)
        throw std::invalid_argument("noise_variance_from_ebn0: bad rate or bits per symbol");
    return sym_var / (rate * bits_per_symbol * std::pow(10.0, ebn0_db / 10.0));
}

ScenarioConfig ScenarioConfig::from_kv(const KvMap& kv) {
    ScenarioConfig c;
    c.frame = frame_spec_from_kv(kv);
    c.channel_from_file = kv_str(kv, "channel.source", "generate") == "file";
    c.channel_file = kv_str(kv, "channel.file", "");
    c.chan_gen.l = kv_int(kv, "channel.l", 64);
    c.chan_gen.decay_db_per_tap = kv_double(kv, "channel.decay_db", 0.4);
    c.chan_gen.sparsity = kv_double(kv, "channel.sparsity", 0.25);
    for (const std::string& b : split_list(kv_str(kv, "bits", "inf")))
        c.bits.push_back(bits_from_label(b));
    c.ebn0_db = parse_double_list(kv_str(kv, "ebn0_db", "10"));
    for (const std::string& r : split_list(kv_str(kv, "receivers", "pbigamp")))
        c.receivers.push_back(receiver_from_string(r));
    c.trials = kv_int(kv, "trials", 100);
    c.seed = static_cast<uint64_t>(kv_int(kv, "seed", 1));
    c.workers = kv_int(kv, "workers", 1);
    c.mismatch_db = kv_double(kv, "mismatch_db", 0.0);
    c.code_file = kv_str(kv, "code.file", "");
    c.code_seed = static_cast<uint64_t>(kv_int(kv, "code.seed", 7));
    c.interleaver_seed = static_cast<uint64_t>(kv_int(kv, "interleaver.seed", 11));
    c.turbo.max_turbo_iters = kv_int(kv, "turbo.max_iters", 20);
    c.turbo.max_ldpc_iters = kv_int(kv, "turbo.ldpc_iters", 50);
    c.turbo.parity_early_exit = kv_bool(kv, "turbo.parity_early_exit", true);
    c.turbo.eq.t_max = kv_int(kv, "eq.t_max", 50);
    c.turbo.eq.min_iters = kv_int(kv, "eq.min_iters", 7);
    c.turbo.eq.stop_tol = kv_double(kv, "eq.stop_tol", 0.01);
    c.turbo.eq.damping = kv_double(kv, "eq.damping", 1.0);
    c.turbo.eq.em_enabled = kv_bool(kv, "eq.em", true);
    c.turbo.eq.scale_enabled = kv_bool(kv, "eq.scale", true);
    c.empirical_quantizer_power = kv_bool(kv, "quantizer.empirical_power", false);
    return c;
}

std::vector<std::string> ScenarioConfig::validate() const {
    std::vector<std::string> errs;
    try {
        frame.validate();
    } catch (const std::exception& e) {
        errs.push_back(std::string("frame: ") + e.what());
    }
    if (trials < 1) errs.push_back("trials must be >= 1");
    if (workers < 1) errs.push_back("workers must be >= 1");
    if (bits.empty()) errs.push_back("bit-depth list is empty");
    if (ebn0_db.empty()) errs.push_back("Eb/N0 grid is empty");
    if (receivers.empty()) errs.push_back("receiver list is empty");
    for (int b : bits)
        if (b != QuantizerSpec::kInfinite && (b < 1 || b > 8))
            errs.push_back("bit depth must be 1..8 or inf");
    if (!channel_from_file) {
        if (chan_gen.l < 1) errs.push_back("channel.l must be >= 1");
        if (chan_gen.sparsity <= 0.0 || chan_gen.sparsity > 1.0)
            errs.push_back("channel.sparsity must be in (0,1]");
        const int lmax = std::min(frame.n_c, frame.n_g) - 1;
        if (chan_gen.l > lmax)
            errs.push_back("channel.l exceeds min(N_C, N_G) - 1 = " + std::to_string(lmax));
    } else if (channel_file.empty()) {
        errs.push_back("channel.source=file requires channel.file");
    }
    if (turbo.max_turbo_iters < 1) errs.push_back("turbo.max_iters must be >= 1");
    if (turbo.eq.t_max < turbo.eq.min_iters) errs.push_back("eq.t_max must be >= eq.min_iters");
    if (turbo.eq.stop_tol <= 0.0) errs.push_back("eq.stop_tol must be positive");
    if (turbo.eq.damping <= 0.0 || turbo.eq.damping > 1.0)
        errs.push_back("eq.damping must be in (0,1]");
    return errs;
}

namespace {

struct Tally {
    long bit_errors = 0;
    long frames = 0;
    double nmse_sum = 0.0;
    double turbo_sum = 0.0;
    double eq_sum = 0.0;
    double wall_sum = 0.0;

    void merge(const Tally& o) {
        bit_errors += o.bit_errors;
        frames += o.frames;
        nmse_sum += o.nmse_sum;
        turbo_sum += o.turbo_sum;
        eq_sum += o.eq_sum;
        wall_sum += o.wall_sum;
    }
};

GmmPrior initial_gmm(int l_taps) {
    const double per_tap = 1.0 / l_taps;
    return GmmPrior::shared({0.5, 0.5}, {1.8 * per_tap, 0.2 * per_tap});
}

}  // namespace

std::vector<ResultRow> run_sweep(const ScenarioConfig& cfg, std::ostream* log) {
    {
        std::vector<std::string> errs = cfg.validate();
        if (!errs.empty()) {
            std::string msg = "invalid scenario config:";
            for (const std::string& e : errs) msg += "\n  - " + e;
            throw std::invalid_argument(msg);
        }
    }
    const FrameSpec& fs = cfg.frame;
    CodeSpec code = cfg.code_file.empty() ? CodeSpec::make_default(fs.coded_bits(), cfg.code_seed)
                                          : CodeSpec::from_alist(cfg.code_file);
    if (code.n_c != fs.coded_bits())
        throw std::invalid_argument("code length " + std::to_string(code.n_c) +
                                    " does not match frame coded bits " +
                                    std::to_string(fs.coded_bits()));
    const Interleaver il = Interleaver::make(code.n_c, cfg.interleaver_seed);

    ChannelRealization file_channel;
    if (cfg.channel_from_file) {
        file_channel = load_channel(cfg.channel_file);
        const int lmax = std::min(fs.n_c, fs.n_g) - 1;
        if (file_channel.length() > lmax)
            throw std::invalid_argument("imported channel is longer than min(N_C, N_G) - 1");
    }
    const int l_taps = cfg.channel_from_file ? file_channel.length() : cfg.chan_gen.l;

    const int n_recv = static_cast<int>(cfg.receivers.size());
    const int n_bits = static_cast<int>(cfg.bits.size());
    const int n_ebn0 = static_cast<int>(cfg.ebn0_db.size());
    const int n_rows = n_recv * n_bits * n_ebn0;
    auto row_idx = [&](int r, int b, int e) { return (r * n_bits + b) * n_ebn0 + e; };

    std::vector<double> sigma_w(n_ebn0);
    for (int e = 0; e < n_ebn0; ++e)
        sigma_w[e] = noise_variance_from_ebn0(cfg.ebn0_db[e], code.rate(), fs.a, 1.0);
    const double mismatch_lin = std::pow(10.0, cfg.mismatch_db / 10.0);

    std::vector<std::vector<Tally>> per_trial(cfg.trials, std::vector<Tally>(n_rows));

    auto run_trial = [&](int trial) {
        Rng rng(mix_seed(cfg.seed, 0xA11CE, static_cast<uint64_t>(trial)));
        ChannelRealization ch =
            cfg.channel_from_file ? file_channel : generate_channel(cfg.chan_gen, rng);

        std::vector<uint8_t> info(code.n_b);
        for (uint8_t& b : info) b = static_cast<uint8_t>(rng.next_u64() & 1);
        const std::vector<uint8_t> cw = encode(code, info);
        const std::vector<uint8_t> tx_bits = il.apply(cw);
        const Frame frame = build_frame(fs, map_bits(fs, tx_bits));

        Rng noise_rng(mix_seed(cfg.seed, 0x0153, static_cast<uint64_t>(trial)));
        const cmat u_clean = apply_channel(ch, frame.x, 0.0, rng);
        cmat w_std(fs.m, fs.k());
        for (cplx& w : w_std.data) w = noise_rng.cgauss();

        const double h_norm2 = norm_sq(ch.h);
        const double mk = static_cast<double>(fs.m) * fs.k();

        for (int e = 0; e < n_ebn0; ++e) {
            const double nv_true = sigma_w[e];
            const double nv_asm = nv_true * mismatch_lin;
            cmat u = u_clean;
            const double ns = std::sqrt(nv_true);
            for (size_t i = 0; i < u.size(); ++i) u.data[i] += ns * w_std.data[i];
            const double measured_power = fro_norm_sq(u);

            // analytic receive power used for ADC calibration; the ensemble
            // tap energy is 1 for generated channels
            const double e_h = cfg.channel_from_file ? h_norm2 : 1.0;
            double power_c = e_h + nv_true;
            if (cfg.empirical_quantizer_power) power_c = measured_power / mk;

            for (int b = 0; b < n_bits; ++b) {
                const QuantizerSpec qspec = calibrate(cfg.bits[b], 0.5 * power_c, 0.5 * power_c);
                const QuantizedObs obs = quantize(qspec, u);
                const double eta = compute_eta(qspec, power_c);
                const double e_sig_asm = std::max(measured_power / mk - nv_asm, 0.0);
                const BussgangParams bg = bussgang_params(eta, 1.0, e_sig_asm, nv_asm);

                GolayEstimate golay;
                bool have_golay = false;
                for (int r = 0; r < n_recv; ++r) {
                    const ReceiverKind kind = cfg.receivers[r];
                    TurboConfig tc = cfg.turbo;
                    tc.eq.measured_power = measured_power;
                    tc.eq.symbol_var = 1.0;
                    cvec h0;
                    double hv0 = 0.0;
                    if (kind == ReceiverKind::Pcsi) {
                        tc.kind = EqualizerKind::Pbigamp;
                        tc.eq.channel_known = true;
                        tc.eq.em_enabled = false;
                        tc.eq.scale_enabled = false;
                        h0 = ch.h;
                        hv0 = 0.0;
                    } else {
                        if (!have_golay) {
                            golay = golay_channel_estimate(obs, frame, l_taps, bg, nv_asm,
                                                           measured_power);
                            have_golay = true;
                        }
                        h0 = golay.hhat;
                        hv0 = golay.hvar;
                        switch (kind) {
                            case ReceiverKind::Pbigamp: tc.kind = EqualizerKind::Pbigamp; break;
                            case ReceiverKind::PbigampBussgang:
                                tc.kind = EqualizerKind::PbigampBussgang;
                                break;
                            case ReceiverKind::GolayLmmseExact:
                                tc.kind = EqualizerKind::LmmseExact;
                                break;
                            case ReceiverKind::GolayLmmseFast:
                                tc.kind = EqualizerKind::LmmseFast;
                                break;
                            default: break;
                        }
                    }

                    const auto t0 = std::chrono::steady_clock::now();
                    TurboResult res = run_turbo(obs, frame, initial_gmm(l_taps), code, il, tc,
                                                nv_asm, h0, hv0, bg, &info);
                    const auto t1 = std::chrono::steady_clock::now();

                    long errors = 0;
                    for (size_t i = 0; i < info.size(); ++i)
                        if (info[i] != res.info_bits[i]) ++errors;
                    double nmse = 0.0;
                    if (kind != ReceiverKind::Pcsi) {
                        double err2 = 0.0;
                        for (int l = 0; l < l_taps; ++l) err2 += std::norm(res.hhat[l] - ch.h[l]);
                        nmse = err2 / h_norm2;
                    }

                    Tally& t = per_trial[trial][row_idx(r, b, e)];
                    t.bit_errors += errors;
                    t.frames += 1;
                    t.nmse_sum += nmse;
                    t.turbo_sum += res.turbo_iters;
                    t.eq_sum += res.eq_iters_total;
                    t.wall_sum += std::chrono::duration<double>(t1 - t0).count();
                }
            }
        }
    };

    if (cfg.workers <= 1) {
        for (int t = 0; t < cfg.trials; ++t) run_trial(t);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        const int n_threads = std::min(cfg.workers, cfg.trials);
        pool.reserve(n_threads);
        for (int w = 0; w < n_threads; ++w)
            pool.emplace_back([&]() {
                for (;;) {
                    const int t = next.fetch_add(1);
                    if (t >= cfg.trials) return;
                    run_trial(t);
                }
            });
        for (std::thread& th : pool) th.join();
    }

    // merge in trial order so the reduction does not depend on worker count
    std::vector<Tally> total(n_rows);
    for (int t = 0; t < cfg.trials; ++t)
        for (int i = 0; i < n_rows; ++i) total[i].merge(per_trial[t][i]);

    std::vector<ResultRow> rows;
    rows.reserve(n_rows);
    for (int r = 0; r < n_recv; ++r)
        for (int b = 0; b < n_bits; ++b)
            for (int e = 0; e < n_ebn0; ++e) {
                const Tally& t = total[row_idx(r, b, e)];
                ResultRow row;
                row.receiver = receiver_name(cfg.receivers[r]);
                row.bits = cfg.bits[b];
                row.ebn0_db = cfg.ebn0_db[e];
                row.mismatch_db = cfg.mismatch_db;
                row.frames = t.frames;
                row.bit_errors = t.bit_errors;
                row.ber = static_cast<double>(t.bit_errors) /
                          (static_cast<double>(t.frames) * code.n_b);
                row.nmse = t.nmse_sum / t.frames;
                row.mean_turbo_iters = t.turbo_sum / t.frames;
                row.mean_eq_iters = t.eq_sum / t.frames;
                row.wall_time_s = t.wall_sum;
                rows.push_back(row);
                if (log)
                    *log << row.receiver << " b=" << bits_label(row.bits)
                         << " ebn0=" << row.ebn0_db << " ber=" << row.ber << " nmse=" << row.nmse
                         << "\n";
            }
    return rows;
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

void write_results_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_results_csv: cannot open " + path);
    out << "receiver,bits,ebn0_db,mismatch_db,ber,nmse,frames,bit_errors,mean_turbo_iters,"
           "mean_eq_iters,wall_time_s\n";
    for (const ResultRow& r : rows)
        out << r.receiver << ',' << bits_label(r.bits) << ',' << fmt_double(r.ebn0_db) << ','
            << fmt_double(r.mismatch_db) << ',' << fmt_double(r.ber) << ',' << fmt_double(r.nmse)
            << ',' << r.frames << ',' << r.bit_errors << ',' << fmt_double(r.mean_turbo_iters)
            << ',' << fmt_double(r.mean_eq_iters) << ',' << fmt_double(r.wall_time_s) << '\n';
}

std::vector<ResultRow> read_results_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_results_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("read_results_csv: empty file");
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string f;
        ResultRow r;
        std::getline(ss, r.receiver, ',');
        std::getline(ss, f, ',');
        r.bits = bits_from_label(f);
        std::getline(ss, f, ',');
        r.ebn0_db = std::stod(f);
        std::getline(ss, f, ',');
        r.mismatch_db = std::stod(f);
        std::getline(ss, f, ',');
        r.ber = std::stod(f);
        std::getline(ss, f, ',');
        r.nmse = std::stod(f);
        std::getline(ss, f, ',');
        r.frames = std::stol(f);
        std::getline(ss, f, ',');
        r.bit_errors = std::stol(f);
        std::getline(ss, f, ',');
        r.mean_turbo_iters = std::stod(f);
        std::getline(ss, f, ',');
        r.mean_eq_iters = std::stod(f);
        std::getline(ss, f, ',');
        r.wall_time_s = std::stod(f);
        rows.push_back(r);
    }
    if (rows.empty()) throw std::runtime_error("read_results_csv: no data rows");
    return rows;
}

std::string summarize(const std::vector<ResultRow>& rows) {
    if (rows.empty()) throw std::invalid_argument("summarize: no rows");
    std::ostringstream out;
    out << "receiver            bits   Eb/N0[dB]  mismatch    BER          NMSE[dB]   frames  "
           "turbo  eq-iters\n";
    std::vector<std::string> recv_names;
    for (const ResultRow& r : rows) {
        if (std::find(recv_names.begin(), recv_names.end(), r.receiver) == recv_names.end())
            recv_names.push_back(r.receiver);
        char buf[256];
        const double nmse_db = r.nmse > 0.0 ? 10.0 * std::log10(r.nmse) : -999.0;
        std::snprintf(buf, sizeof(buf), "%-18s  %-5s  %8.2f  %8.2f   %.4e  %9.2f  %6ld  %5.1f  %7.1f\n",
                      r.receiver.c_str(), bits_label(r.bits).c_str(), r.ebn0_db, r.mismatch_db,
                      r.ber, nmse_db, r.frames, r.mean_turbo_iters, r.mean_eq_iters);
        out << buf;
    }
    if (recv_names.size() == 2) {
        out << "\npaired BER difference (" << recv_names[0] << " - " << recv_names[1] << "):\n";
        for (const ResultRow& a : rows) {
            if (a.receiver != recv_names[0]) continue;
            for (const ResultRow& b : rows) {
                if (b.receiver != recv_names[1] || b.bits != a.bits || b.ebn0_db != a.ebn0_db ||
                    b.mismatch_db != a.mismatch_db)
                    continue;
                char buf[128];
                std::snprintf(buf, sizeof(buf), "  bits=%-4s ebn0=%6.2f  dBER=%+.4e\n",
                              bits_label(a.bits).c_str(), a.ebn0_db, a.ber - b.ber);
                out << buf;
            }
        }
    }
    return out.str();
}

void write_gnuplot_data(const std::vector<ResultRow>& rows, const std::string& dir) {
    if (rows.empty()) throw std::invalid_argument("write_gnuplot_data: no rows");
    std::map<std::string, std::vector<const ResultRow*>> groups;
    for (const ResultRow& r : rows) groups[r.receiver + "_b" + bits_label(r.bits)].push_back(&r);
    for (auto& [name, list] : groups) {
        std::sort(list.begin(), list.end(),
                  [](const ResultRow* a, const ResultRow* b) { return a->ebn0_db < b->ebn0_db; });
        std::ofstream out(dir + "/" + name + ".dat");
        if (!out) throw std::runtime_error("write_gnuplot_data: cannot open output in " + dir);
        out << "# ebn0_db ber nmse\n";
        for (const ResultRow* r : list)
            out << fmt_double(r->ebn0_db) << ' ' << fmt_double(r->ber) << ' ' << fmt_double(r->nmse)
                << '\n';
    }
}

}  // namespace fewbit
