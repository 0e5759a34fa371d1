#pragma once

// Built-in microkernel generators plus the external trace-ingestion path.
// Every generator is pure: the same KernelSpec always yields byte-identical
// programs and oracle data.

#include <string>
#include <utility>
#include <vector>

#include "rvsim/common.hpp"
#include "rvsim/golden.hpp"
#include "rvsim/predictors.hpp"

namespace rvsim {

enum class KernelKind {
    MatmulInt,        // dense N x N int64 matrix multiply
    Seqcopy,          // sequential 8-byte-word copy
    Sgcopy,           // gather copy through a permuted index array
    Branchy,          // eight data-driven branch sites per iteration
    FpNbodyLike,      // all-pairs double-precision force/velocity updates
    DependencyChain,  // serial add chain (no extractable parallelism)
    IndependentAlu,   // wide block of mutually independent ALU ops
};

const char* kernel_kind_name(KernelKind k);
KernelKind kernel_kind_from_name(const std::string& name);  // throws ParameterOutOfRange
std::vector<std::string> kernel_names();

struct KernelSpec {
    KernelKind kind = KernelKind::DependencyChain;
    u32 n = 0;           // matrix dimension / body count (0 = kernel default)
    u64 elements = 0;    // copy kernels: 8-byte words per pass (0 = default)
    u32 iterations = 0;  // loop trips / time steps (0 = default)
    u64 seed = 1;
    double taken_rate = 0.7;      // branchy: requested overall taken fraction
    bool identity_index = false;  // sgcopy: identity mapping instead of a shuffle
};

// A generated program together with its layout and host-side oracle data.
struct GeneratedKernel {
    Program program;
    KernelSpec spec;  // defaults filled in
    std::string name;
    u64 instr_budget = 0;  // generous halting bound for the golden run

    // Copy kernels.
    u64 bytes_copied = 0;  // payload bytes per pass (read + write)
    u64 src_addr = 0, dst_addr = 0, idx_addr = 0, len_bytes = 0;

    // matmul_int.
    u64 a_addr = 0, b_addr = 0, c_addr = 0;
    std::vector<i64> expected_c;  // row-major host-side product

    // fp_nbody_like: x/y/z planes of n doubles each, positions then velocities.
    u64 pos_addr = 0, vel_addr = 0;
    double dt = 0.0, eps = 0.0;

    // branchy: exact dynamic branch/taken counts implied by the outcome bytes.
    u64 expected_branches = 0, expected_taken = 0;

    // dependency_chain / branchy / independent_alu register oracles.
    u64 expected_chain_value = 0;
    u8 chain_reg = 0;
    std::vector<std::pair<u8, u64>> expected_regs;  // final architectural values
};

GeneratedKernel generate(const KernelSpec& spec);  // throws ParameterOutOfRange

// ---------------------------------------------------------------------------
// Trace format: one record per line, `seq pc raw next_pc [M vaddr bytes S|L]`,
// all fields lowercase hex, `#` starts a comment.  Traces carry no store
// data, so digests over store payloads are not preserved across a round trip;
// every timing-relevant field is.
// ---------------------------------------------------------------------------
std::string dump_trace(const std::vector<RetireRecord>& stream);
std::vector<RetireRecord> parse_trace(const std::string& text);
std::vector<RetireRecord> load_trace_file(const std::string& path);

// Project the control transfers of a committed stream into the predictors'
// branch-trace records (see predictors.hpp for the `pc T|N target` text form).
std::vector<BranchTraceRecord> branch_trace_of(const std::vector<RetireRecord>& stream);

}  // namespace rvsim
