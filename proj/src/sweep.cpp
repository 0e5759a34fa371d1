#include <exception>

#include "rvsim/report.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rvsim {

SweepResult run_sweep(const std::vector<CoreConfig>& cores,
                      const std::vector<KernelSpec>& kernels, int jobs,
                      const EnergyWeights& weights) {
    if (cores.empty() || kernels.empty())
        throw SimError(ErrCode::ParameterOutOfRange,
                       "sweep needs a nonempty core list and kernel list");
    weights.validate();
    for (const auto& c : cores) c.validate();

    // One golden run per kernel; the stream is shared read-only by all cores.
    struct PreparedKernel {
        GeneratedKernel gk;
        std::vector<RetireRecord> stream;
    };
    std::vector<PreparedKernel> prep(kernels.size());
    for (size_t i = 0; i < kernels.size(); i++) {
        prep[i].gk = generate(kernels[i]);
        prep[i].stream = golden_stream(prep[i].gk);
    }

    SweepResult res;
    res.rows.resize(kernels.size() * cores.size());
    std::exception_ptr failure = nullptr;

    // Each (core, kernel) pair owns its simulator and memory hierarchy, so
    // pairs are embarrassingly parallel; results land in preallocated slots,
    // making row order independent of scheduling.
    const long total = long(res.rows.size());
#ifdef _OPENMP
    const int threads = jobs > 0 ? jobs : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
    for (long i = 0; i < total; i++) {
        const size_t ki = size_t(i) / cores.size();
        const size_t ci = size_t(i) % cores.size();
        try {
            SweepRow& row = res.rows[size_t(i)];
            row.metrics = run_core(cores[ci], prep[ki].stream, prep[ki].gk.name,
                                   prep[ki].gk.bytes_copied);
            row.energy = estimate_energy(row.metrics, weights);
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    (void)jobs;

    // Normalized bandwidth per kernel: divide by the scalar preset's figure
    // (or the first core's, if no "cva6" is in the list).
    for (size_t ki = 0; ki < kernels.size(); ki++) {
        size_t base_ci = 0;
        for (size_t ci = 0; ci < cores.size(); ci++)
            if (cores[ci].name == "cva6") base_ci = ci;
        double base_bw = res.rows[ki * cores.size() + base_ci].metrics.bandwidth();
        if (base_bw <= 0.0) continue;
        for (size_t ci = 0; ci < cores.size(); ci++) {
            SweepRow& row = res.rows[ki * cores.size() + ci];
            row.norm_bandwidth = row.metrics.bandwidth() / base_bw;
        }
    }
    return res;
}

std::string sweep_csv(const SweepResult& r) {
    std::string out = csv_header() + "\n";
    for (const auto& row : r.rows)
        out += csv_row(row.metrics, row.energy, row.norm_bandwidth) + "\n";
    return out;
}

}  // namespace rvsim
