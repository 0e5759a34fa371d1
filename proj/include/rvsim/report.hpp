#pragma once

// Report emission (deterministic JSON, versioned CSV, aligned text tables),
// the per-(core, stream) run entry point, and the multi-core sweep.

#include <string>
#include <vector>

#include "rvsim/config.hpp"
#include "rvsim/golden.hpp"
#include "rvsim/inorder.hpp"
#include "rvsim/metrics.hpp"
#include "rvsim/workloads.hpp"

namespace rvsim {

// Run the golden model over a generated kernel; throws if it does not halt
// within the kernel's instruction budget.
std::vector<RetireRecord> golden_stream(const GeneratedKernel& gk, u64 max_instrs = 0);

// Run one core model over a committed stream with a fresh memory hierarchy.
RunMetrics run_core(const CoreConfig& cfg, const std::vector<RetireRecord>& stream,
                    const std::string& kernel_name = "", u64 bytes_copied = 0,
                    const SimOptions& opt = {}, std::vector<IssueEvent>* issue_log = nullptr);

// ---------------------------------------------------------------------------
// Emission.  JSON is key-ordered and therefore byte-identical for identical
// runs; the CSV column set is versioned and locked by a golden-file test.
// ---------------------------------------------------------------------------
inline constexpr const char* kReportSchema = "rvsim-report-v1";
inline constexpr const char* kCsvSchema = "rvsim-csv-v1";

std::string metrics_to_json(const RunMetrics& m, const EnergyBreakdown& e,
                            double norm_bandwidth = 0.0);
std::string csv_header();
std::string csv_row(const RunMetrics& m, const EnergyBreakdown& e, double norm_bandwidth = 0.0);

struct SweepRow {
    RunMetrics metrics;
    EnergyBreakdown energy;
    double norm_bandwidth = 0.0;  // copy kernels: bandwidth / scalar-preset bandwidth
};

struct SweepResult {
    std::vector<SweepRow> rows;  // kernel-major, then core, in input order
};

// Simulate every (core, kernel) pair.  jobs: 0 = all available threads,
// 1 = serial reference path, n = at most n threads.  Row order and content
// are independent of the thread count.
SweepResult run_sweep(const std::vector<CoreConfig>& cores,
                      const std::vector<KernelSpec>& kernels, int jobs = 0,
                      const EnergyWeights& weights = {});

std::string sweep_csv(const SweepResult& r);
std::string metrics_table(const std::vector<SweepRow>& rows);

}  // namespace rvsim
