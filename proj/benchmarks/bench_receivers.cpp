// Relative-cost measurements for the equalizer paths: per-iteration PBiGAMP
// sweeps at several bit depths, exact vs fast LMMSE, and the estimators they
// share. Absolute times are machine-dependent; the ratios are the point.

#include <benchmark/benchmark.h>

#include "fewbit/bussgang.hpp"
#include "fewbit/channel.hpp"
#include "fewbit/dft.hpp"
#include "fewbit/golay_estimator.hpp"
#include "fewbit/lmmse.hpp"
#include "fewbit/pbigamp.hpp"
#include "fewbit/quantizer.hpp"

using namespace fewbit;

namespace {

struct Setup {
    FrameSpec spec;
    Frame frame;
    ChannelRealization ch;
    QuantizedObs obs;
    QuantizerSpec qspec;
    double noise_var = 0.02;
    SymbolPriors priors;
    GmmPrior prior;
    cvec h0;

    explicit Setup(int bits)
        : spec(FrameSpec::make(512, 2, 4, 448, 64, 128, Modulation::Qam16Gray)),
          frame(build_frame(spec, draw_symbols(spec))),
          ch(draw_channel()),
          priors(SymbolPriors::uniform(spec.data_symbols(), 1 << spec.a)),
          prior(GmmPrior::shared({0.5, 0.5}, {2.0 / 64, 0.02 / 64})) {
        Rng rng(3);
        cmat u = apply_channel(ch, frame.x, noise_var, rng);
        qspec = calibrate(bits, 0.5 * (1 + noise_var), 0.5 * (1 + noise_var));
        obs = quantize(qspec, u);
        const BussgangParams bg = bussgang_params(compute_eta(qspec, 1 + noise_var), 1.0, 1.0,
                                                  noise_var);
        h0 = golay_channel_estimate(obs, frame, 64, bg, noise_var).hhat;
    }

    static cvec draw_symbols(const FrameSpec& spec) {
        Rng rng(1);
        std::vector<uint8_t> bits(spec.coded_bits());
        for (auto& b : bits) b = static_cast<uint8_t>(rng.next_u64() & 1);
        return map_bits(spec, bits);
    }
    static ChannelRealization draw_channel() {
        ChannelGenSpec g;
        g.l = 64;
        Rng rng(2);
        return generate_channel(g, rng);
    }
};

void pbigamp_iteration(benchmark::State& state) {
    Setup s(static_cast<int>(state.range(0)));
    EqualizerConfig cfg;
    EqualizerState st = init_state(s.frame, s.h0, 0.01, s.priors);
    GmmPrior prior = s.prior;
    for (auto _ : state) {
        iterate(st, s.obs, s.frame, prior, s.priors, s.noise_var, cfg);
        benchmark::DoNotOptimize(st.xhat.data.data());
    }
}
BENCHMARK(pbigamp_iteration)->Arg(1)->Arg(2)->Arg(3)->Arg(4);

void pbigamp_iteration_unquantized(benchmark::State& state) {
    Setup s(QuantizerSpec::kInfinite);
    EqualizerConfig cfg;
    EqualizerState st = init_state(s.frame, s.h0, 0.01, s.priors);
    GmmPrior prior = s.prior;
    for (auto _ : state) {
        iterate(st, s.obs, s.frame, prior, s.priors, s.noise_var, cfg);
        benchmark::DoNotOptimize(st.xhat.data.data());
    }
}
BENCHMARK(pbigamp_iteration_unquantized);

void lmmse_pass(benchmark::State& state) {
    Setup s(3);
    const bool fast = state.range(0) != 0;
    const BussgangParams bg = bussgang_params(compute_eta(s.qspec, 1 + s.noise_var), 1.0, 1.0,
                                              s.noise_var);
    cmat y = reconstruct(s.obs);
    cmat mu = s.frame.x;
    std::vector<double> v(y.size(), 0.0);
    for (int k = s.spec.k_p; k < s.spec.k(); ++k)
        for (int m = 0; m < s.spec.n_d; ++m) {
            mu(m, k) = cplx(0.0, 0.0);
            v[static_cast<size_t>(k) * s.spec.m + m] = 1.0;
        }
    for (auto _ : state) {
        LmmseResult r = fast ? lmmse_equalize_fast(y, s.h0, bg, mu, v)
                             : lmmse_equalize_exact(y, s.h0, bg, mu, v);
        benchmark::DoNotOptimize(r.xhat.data.data());
    }
}
BENCHMARK(lmmse_pass)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void golay_estimate(benchmark::State& state) {
    Setup s(3);
    const BussgangParams bg = bussgang_params(compute_eta(s.qspec, 1 + s.noise_var), 1.0, 1.0,
                                              s.noise_var);
    for (auto _ : state) {
        GolayEstimate e = golay_channel_estimate(s.obs, s.frame, 64, bg, s.noise_var);
        benchmark::DoNotOptimize(e.hhat.data());
    }
}
BENCHMARK(golay_estimate);

void unitary_fft(benchmark::State& state) {
    cvec x(512);
    Rng rng(4);
    for (cplx& v : x) v = rng.cgauss();
    for (auto _ : state) {
        fft_unitary(x);
        benchmark::DoNotOptimize(x.data());
    }
}
BENCHMARK(unitary_fft);

}  // namespace

BENCHMARK_MAIN();
