#include "fewbit/dft.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <unordered_map>

namespace fewbit {

namespace {

// FFTW's planner is not thread-safe; plan creation/destruction is serialized.
// Each thread owns its plans and scratch buffer, sized per transform length.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct PlanEntry {
    fftw_complex* buf = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

struct PlanCache {
    std::unordered_map<int, PlanEntry> plans;

    PlanEntry& get(int m) {
        auto it = plans.find(m);
        if (it != plans.end()) return it->second;
        std::lock_guard<std::mutex> lock(planner_mutex());
        PlanEntry e;
        e.buf = fftw_alloc_complex(static_cast<size_t>(m));
        e.fwd = fftw_plan_dft_1d(m, e.buf, e.buf, FFTW_FORWARD, FFTW_ESTIMATE);
        e.bwd = fftw_plan_dft_1d(m, e.buf, e.buf, FFTW_BACKWARD, FFTW_ESTIMATE);
        return plans.emplace(m, e).first->second;
    }

    ~PlanCache() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        for (auto& [m, e] : plans) {
            fftw_destroy_plan(e.fwd);
            fftw_destroy_plan(e.bwd);
            fftw_free(e.buf);
        }
    }
};

thread_local PlanCache t_cache;
thread_local long t_count = 0;

void execute(cplx* x, int m, bool forward) {
    if (m <= 0) throw std::invalid_argument("dft: length must be positive");
    PlanEntry& e = t_cache.get(m);
    std::memcpy(e.buf, x, sizeof(cplx) * static_cast<size_t>(m));
    fftw_execute(forward ? e.fwd : e.bwd);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    auto* out = reinterpret_cast<cplx*>(e.buf);
    for (int i = 0; i < m; ++i) x[i] = out[i] * scale;
    ++t_count;
}

}  // namespace

void fft_unitary(cplx* x, int m) { execute(x, m, true); }
void ifft_unitary(cplx* x, int m) { execute(x, m, false); }

long fft_transform_count() { return t_count; }
void fft_reset_transform_count() { t_count = 0; }

}  // namespace fewbit
