#pragma once

#include <array>
#include <string>
#include <vector>

#include "rvsim/common.hpp"
#include "rvsim/isa.hpp"
#include "rvsim/memhier.hpp"
#include "rvsim/predictors.hpp"

namespace rvsim {

// One attributed cause per stalled issue-slot-0 cycle.
enum class StallCause {
    FetchStarve,
    RawDependency,
    WawDependency,
    StructuralFu,
    StructuralWbPort,
    ScoreboardFull,
    LsuFull,
    MispredictRedirect,
    CacheMiss,
};
inline constexpr size_t kStallCauseCount = 9;
const char* stall_cause_name(StallCause c);

struct StallBreakdown {
    std::array<u64, kStallCauseCount> cycles{};

    u64& operator[](StallCause c) { return cycles[size_t(c)]; }
    u64 operator[](StallCause c) const { return cycles[size_t(c)]; }
    u64 total() const;
};

struct RunMetrics {
    std::string core;
    std::string kernel;

    u64 cycles = 0;
    u64 retired = 0;
    double ipc() const { return cycles ? double(retired) / double(cycles) : 0.0; }

    FrontendStats branch;
    CacheStats icache;
    CacheStats dcache;
    CacheStats llc;
    u64 mem_accesses = 0;
    u64 mem_writebacks = 0;

    StallBreakdown stalls;
    u64 busy_cycles = 0;  // slot-0 issued (or committed work) cycles

    u32 peak_retires = 0;  // max instructions retired in any single cycle
    u64 rename_stalls = 0;
    u64 store_forwards = 0;
    u64 rob_writes = 0;  // ROB entries created (OoO)
    u64 renames = 0;     // physical-register allocations (OoO)
    std::array<u64, kFuClassCount> fu_ops{};
    std::vector<u64> rob_occupancy_hist;  // OoO only: index = entries occupied

    u64 bytes_copied = 0;  // copy kernels: payload bytes moved per run
    double bandwidth() const { return cycles && bytes_copied ? double(bytes_copied) / double(cycles) : 0.0; }

    u64 stream_digest = 0;  // digest of the committed sequence (lockstep check)
    u64 dispatched = 0;     // instructions entered into the backend
};

// Uncalibrated activity-count energy model: linear event weights plus a
// leakage term per cycle. Unit-free (weights are relative picojoule-like
// numbers); useful for comparing runs, not for absolute power.
struct EnergyWeights {
    double fetch = 1.0;
    double decode = 0.5;
    double alu_op = 1.0;
    double mul_op = 3.0;
    double div_op = 8.0;
    double fp_op = 4.0;
    double l1_access = 2.0;
    double llc_access = 10.0;
    double mem_access = 50.0;
    double rob_write = 1.0;
    double rename = 0.5;
    double leakage_per_cycle = 1.0;

    void validate() const;  // all weights must be non-negative
};

struct EnergyBreakdown {
    double fetch = 0, decode = 0, execute = 0, memory = 0, control = 0, leakage = 0;
    double total() const { return fetch + decode + execute + memory + control + leakage; }
};

EnergyBreakdown estimate_energy(const RunMetrics& m, const EnergyWeights& w);

}  // namespace rvsim
