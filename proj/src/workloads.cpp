#include "rvsim/workloads.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace rvsim {

namespace {

using M = Mnemonic;

// Register aliases (numeric ABI names).
constexpr u8 kX0 = 0;
constexpr u8 kT0 = 5, kT1 = 6, kT2 = 7;
constexpr u8 kS0 = 8, kS1 = 9;
constexpr u8 kA0 = 10, kA1 = 11, kA2 = 12, kA3 = 13, kA4 = 14, kA5 = 15;
constexpr u8 kA6 = 16;
constexpr u8 kS2 = 18, kS3 = 19, kS4 = 20, kS5 = 21;
constexpr u8 kS6 = 22, kS7 = 23, kS8 = 24, kS9 = 25;

// Data-segment bases, all line- and page-aligned, far from the code at 0x1000.
constexpr u64 kMatBase = 0x100000;
constexpr u64 kBranchyBase = 0x200000;
constexpr u64 kCopySrc = 0x400000;
constexpr u64 kCopyDst = 0x500000;
constexpr u64 kCopyIdx = 0x600000;
constexpr u64 kNbodyPos = 0x700000;
constexpr u64 kNbodyVel = 0x740000;
constexpr u64 kNbodyConst = 0x7c0000;

void push_u64(std::vector<u8>& v, u64 x) {
    for (int i = 0; i < 8; i++) v.push_back(u8(x >> (8 * i)));
}

void push_f64(std::vector<u8>& v, double d) { push_u64(v, std::bit_cast<u64>(d)); }

void require(bool ok, const std::string& what) {
    if (!ok) throw SimError(ErrCode::ParameterOutOfRange, what);
}

GeneratedKernel finish_kernel(Assembler& as, KernelSpec spec, std::vector<Segment> data,
                              u64 dynamic_instrs) {
    GeneratedKernel g;
    g.spec = spec;
    g.name = kernel_kind_name(spec.kind);
    g.program.base = as.base();
    g.program.entry = as.base();
    g.program.code = as.finish();
    g.program.data = std::move(data);
    g.program.validate();
    g.instr_budget = dynamic_instrs * 2 + 10000;
    return g;
}

// ---- independent_alu ------------------------------------------------------
// Loop body: the counter decrement first (so the closing branch's operand is
// long ready), then 96 mutually independent ALU ops, then the loop branch.
// 98 instructions per iteration.
GeneratedKernel gen_independent_alu(KernelSpec spec) {
    if (spec.iterations == 0) spec.iterations = 200;
    require(spec.iterations >= 1 && spec.iterations <= 1000000,
            "independent_alu iterations must be in [1, 1000000]");
    // Every destination register except x0, the counter (t0) and a7 (halt).
    static constexpr u8 kRegs[] = {6,  7,  10, 11, 12, 13, 14, 15, 16, 18, 19, 20,
                                   21, 22, 23, 24, 25, 26, 27, 28, 29, 30, 31};
    constexpr u32 kNumRegs = 23;

    Assembler as(0x1000);
    as.li(kT0, i64(spec.iterations));
    as.label("loop");
    as.emit(M::ADDI, kT0, kT0, 0, -1);
    for (u32 k = 0; k < 96; k++)
        as.emit(M::ADDI, kRegs[k % kNumRegs], kX0, 0, i64((k * 37 + 11) & 0x3ff));
    as.emit_branch(M::BNE, kT0, kX0, "loop");
    as.halt();

    GeneratedKernel g = finish_kernel(as, spec, {}, u64(spec.iterations) * 98 + 8);
    u64 last_imm[32] = {};
    for (u32 k = 0; k < 96; k++) last_imm[kRegs[k % kNumRegs]] = (k * 37 + 11) & 0x3ff;
    for (u8 r : kRegs) g.expected_regs.push_back({r, last_imm[r]});
    g.expected_regs.push_back({kT0, 0});
    g.expected_regs.push_back({17, 0});  // halt convention clears a7
    return g;
}

// ---- dependency_chain -----------------------------------------------------
// 64 serially dependent adds per iteration; no extractable parallelism.
GeneratedKernel gen_dependency_chain(KernelSpec spec) {
    if (spec.iterations == 0) spec.iterations = 300;
    require(spec.iterations >= 1 && spec.iterations <= 1000000,
            "dependency_chain iterations must be in [1, 1000000]");

    Assembler as(0x1000);
    as.emit(M::ADDI, kT1, kX0, 0, 0);
    as.li(kT0, i64(spec.iterations));
    as.label("loop");
    for (u32 k = 0; k < 64; k++) as.emit(M::ADDI, kT1, kT1, 0, 1);
    as.emit(M::ADDI, kT0, kT0, 0, -1);
    as.emit_branch(M::BNE, kT0, kX0, "loop");
    as.halt();

    GeneratedKernel g = finish_kernel(as, spec, {}, u64(spec.iterations) * 66 + 8);
    g.expected_chain_value = u64(spec.iterations) * 64;
    g.chain_reg = kT1;
    g.expected_regs.push_back({kT1, g.expected_chain_value});
    return g;
}

// ---- branchy ---------------------------------------------------------------
// Eight branch sites per iteration read one precomputed outcome byte: bit k
// decides site k.  Sites 0-2 follow short periodic patterns (history
// predictors can learn them, a bimodal counter cannot), site 3 is always
// taken, and sites 4-7 are Bernoulli draws whose thresholds are solved so the
// overall taken rate (including the loop branch) matches the request.
GeneratedKernel gen_branchy(KernelSpec spec) {
    if (spec.iterations == 0) spec.iterations = 11112;  // ~100k dynamic branches
    require(spec.iterations >= 1 && spec.iterations <= 1000000,
            "branchy iterations must be in [1, 1000000]");
    // Fixed sites contribute 1/2 + 2/3 + 3/4 + 1 = 35/12 of the site sum;
    // the loop branch contributes 1 of the 9 branches per iteration.
    double psum = 9.0 * spec.taken_rate - 1.0 - 35.0 / 12.0;
    require(psum >= 0.0 && psum <= 4.0, "branchy taken_rate must be in [0.44, 0.87]");
    int total_thresh = int(std::lround(psum * 256.0));
    int tau[4];
    for (int k = 0; k < 4; k++) tau[k] = total_thresh / 4 + (k < total_thresh % 4 ? 1 : 0);

    Rng rng(spec.seed);
    std::vector<u8> outcome(spec.iterations);
    u64 site_taken = 0;
    for (u32 i = 0; i < spec.iterations; i++) {
        bool s[8];
        s[0] = (i % 2) == 0;
        s[1] = (i % 3) != 0;
        s[2] = (i % 4) < 3;
        s[3] = true;
        for (int k = 0; k < 4; k++) s[4 + k] = (rng.next() & 0xff) < u64(tau[k]);
        u8 b = 0;
        for (int k = 0; k < 8; k++)
            if (s[k]) {
                b |= u8(1u << k);
                site_taken++;
            }
        outcome[i] = b;
    }

    Assembler as(0x1000);
    as.li(kA0, i64(kBranchyBase));
    as.li(kT0, i64(spec.iterations));
    as.emit(M::ADDI, kS3, kX0, 0, 0);
    as.label("loop");
    as.emit(M::LBU, kA1, kA0, 0, 0);
    as.emit(M::ADDI, kA0, kA0, 0, 1);
    for (int k = 0; k < 8; k++) {
        std::string skip = "site" + std::to_string(k);
        as.emit(M::ANDI, kA2, kA1, 0, i64(1) << k);
        as.emit_branch(M::BNE, kA2, kX0, skip);
        as.emit(M::ADDI, kS3, kS3, 0, 1);
        as.label(skip);
    }
    as.emit(M::ADDI, kT0, kT0, 0, -1);
    as.emit_branch(M::BNE, kT0, kX0, "loop");
    as.halt();

    u64 dyn = u64(spec.iterations) * 28 + 16;
    GeneratedKernel g = finish_kernel(as, spec, {{kBranchyBase, std::move(outcome)}}, dyn);
    g.expected_branches = u64(spec.iterations) * 9;
    g.expected_taken = site_taken + (spec.iterations - 1);
    g.expected_chain_value = u64(spec.iterations) * 8 - site_taken;
    g.chain_reg = kS3;
    g.expected_regs.push_back({kS3, g.expected_chain_value});
    return g;
}

// ---- matmul_int -----------------------------------------------------------
GeneratedKernel gen_matmul_int(KernelSpec spec) {
    if (spec.n == 0) spec.n = 32;
    require(spec.n >= 4 && spec.n <= 128 && spec.n % 4 == 0,
            "matmul_int n must be a multiple of 4 in [4, 128]");
    const u64 n = spec.n;
    const u64 mat_bytes = n * n * 8;
    const u64 a_addr = kMatBase;
    const u64 b_addr = a_addr + mat_bytes;
    const u64 c_addr = b_addr + mat_bytes;

    Rng rng(spec.seed);
    std::vector<i64> a(n * n), b(n * n);
    for (auto& v : a) v = i64(rng.next() & 0xff) - 128;
    for (auto& v : b) v = i64(rng.next() & 0xff) - 128;
    std::vector<i64> c(n * n, 0);
    for (u64 i = 0; i < n; i++)
        for (u64 k = 0; k < n; k++) {
            i64 aik = a[i * n + k];
            for (u64 j = 0; j < n; j++) c[i * n + j] += aik * b[k * n + j];
        }

    std::vector<u8> ab_bytes;
    ab_bytes.reserve(2 * mat_bytes);
    for (i64 v : a) push_u64(ab_bytes, u64(v));
    for (i64 v : b) push_u64(ab_bytes, u64(v));

    // Register-blocked row-major product, the shape an optimizing compiler
    // emits for this loop nest: C is computed a 1x4 strip at a time, the four
    // partial sums live in registers for the whole k loop, and each k
    // iteration loads A[i][k] once plus four consecutive elements of B's row
    // k. C is written exactly once per element, after its strip finishes.
    Assembler as(0x1000);
    as.li(kS0, i64(n));            // i counter
    as.li(kT1, i64(a_addr));       // A row base
    as.li(kA6, i64(c_addr));       // C cursor (row-major, never rewinds)
    as.li(kS2, i64(n * 8));        // row stride in bytes
    as.label("outer_i");
    as.li(kS1, i64(n / 4));        // strip counter
    as.li(kA0, i64(b_addr));       // B base of current column strip
    as.label("strip_j");
    as.emit(M::ADDI, kA2, kT1, 0, 0);  // A cursor = row base
    as.emit(M::ADDI, kA1, kA0, 0, 0);  // B cursor = strip base
    as.emit(M::ADDI, kS6, kX0, 0, 0);  // four strip accumulators
    as.emit(M::ADDI, kS7, kX0, 0, 0);
    as.emit(M::ADDI, kS8, kX0, 0, 0);
    as.emit(M::ADDI, kS9, kX0, 0, 0);
    as.li(kT0, i64(n));            // k counter
    as.label("inner_k");
    as.emit(M::LD, kS3, kA2, 0, 0);    // aik
    as.emit(M::ADDI, kA2, kA2, 0, 8);
    as.emit(M::LD, kA3, kA1, 0, 0);    // B[k][j .. j+3]
    as.emit(M::LD, kA4, kA1, 0, 8);
    as.emit(M::LD, kA5, kA1, 0, 16);
    as.emit(M::LD, kT2, kA1, 0, 24);
    as.emit(M::ADD, kA1, kA1, kS2);    // B cursor to next row
    as.emit(M::ADDI, kT0, kT0, 0, -1);
    as.emit(M::MUL, kA3, kA3, kS3);
    as.emit(M::MUL, kA4, kA4, kS3);
    as.emit(M::MUL, kA5, kA5, kS3);
    as.emit(M::MUL, kT2, kT2, kS3);
    as.emit(M::ADD, kS6, kS6, kA3);
    as.emit(M::ADD, kS7, kS7, kA4);
    as.emit(M::ADD, kS8, kS8, kA5);
    as.emit(M::ADD, kS9, kS9, kT2);
    as.emit_branch(M::BNE, kT0, kX0, "inner_k");
    as.emit(M::SD, 0, kA6, kS6, 0);    // store the finished strip of C
    as.emit(M::SD, 0, kA6, kS7, 8);
    as.emit(M::SD, 0, kA6, kS8, 16);
    as.emit(M::SD, 0, kA6, kS9, 24);
    as.emit(M::ADDI, kA6, kA6, 0, 32);
    as.emit(M::ADDI, kA0, kA0, 0, 32); // next four columns of B
    as.emit(M::ADDI, kS1, kS1, 0, -1);
    as.emit_branch(M::BNE, kS1, kX0, "strip_j");
    as.emit(M::ADD, kT1, kT1, kS2);    // next row of A
    as.emit(M::ADDI, kS0, kS0, 0, -1);
    as.emit_branch(M::BNE, kS0, kX0, "outer_i");
    as.halt();

    u64 dyn = n * n * n * 5 + n * n * 8 + n * 8 + 64;
    GeneratedKernel g = finish_kernel(as, spec, {{a_addr, std::move(ab_bytes)}}, dyn);
    g.a_addr = a_addr;
    g.b_addr = b_addr;
    g.c_addr = c_addr;
    g.expected_c = std::move(c);
    return g;
}

// ---- seqcopy / sgcopy -----------------------------------------------------
std::vector<u8> random_payload(u64 words, u64 seed) {
    Rng rng(seed ^ 0x5eedc0de);
    std::vector<u8> bytes;
    bytes.reserve(words * 8);
    for (u64 i = 0; i < words; i++) push_u64(bytes, rng.next());
    return bytes;
}

GeneratedKernel gen_seqcopy(KernelSpec spec) {
    if (spec.elements == 0) spec.elements = 32768;  // 256 KiB
    require(spec.elements >= 16 && spec.elements <= 131072,
            "seqcopy elements must be in [16, 131072]");
    const u64 words = spec.elements;

    // Unrolled by four, the way a streaming copy compiles at -O3: per block,
    // four loads, the pointer bumps (covering load latency), four stores.
    Assembler as(0x1000);
    as.li(kA0, i64(kCopySrc));
    as.li(kA1, i64(kCopyDst));
    as.li(kT0, i64(words / 4));
    as.label("loop4");
    as.emit(M::LD, kA2, kA0, 0, 0);
    as.emit(M::LD, kA3, kA0, 0, 8);
    as.emit(M::LD, kA4, kA0, 0, 16);
    as.emit(M::LD, kA5, kA0, 0, 24);
    as.emit(M::ADDI, kA0, kA0, 0, 32);
    as.emit(M::ADDI, kT0, kT0, 0, -1);
    as.emit(M::SD, 0, kA1, kA2, 0);
    as.emit(M::SD, 0, kA1, kA3, 8);
    as.emit(M::SD, 0, kA1, kA4, 16);
    as.emit(M::SD, 0, kA1, kA5, 24);
    as.emit(M::ADDI, kA1, kA1, 0, 32);
    as.emit_branch(M::BNE, kT0, kX0, "loop4");
    if (words % 4) {
        as.li(kT0, i64(words % 4));
        as.label("tail");
        as.emit(M::LD, kA2, kA0, 0, 0);
        as.emit(M::ADDI, kA0, kA0, 0, 8);
        as.emit(M::ADDI, kT0, kT0, 0, -1);
        as.emit(M::SD, 0, kA1, kA2, 0);
        as.emit(M::ADDI, kA1, kA1, 0, 8);
        as.emit_branch(M::BNE, kT0, kX0, "tail");
    }
    as.halt();

    GeneratedKernel g = finish_kernel(as, spec, {{kCopySrc, random_payload(words, spec.seed)}},
                                      words * 6 + 48);
    g.src_addr = kCopySrc;
    g.dst_addr = kCopyDst;
    g.len_bytes = words * 8;
    g.bytes_copied = 2 * g.len_bytes;
    return g;
}

GeneratedKernel gen_sgcopy(KernelSpec spec) {
    if (spec.elements == 0) spec.elements = 32768;
    require(spec.elements >= 16 && spec.elements <= 131072,
            "sgcopy elements must be in [16, 131072]");
    const u64 words = spec.elements;

    std::vector<u64> idx(words);
    std::iota(idx.begin(), idx.end(), u64(0));
    if (!spec.identity_index) {
        Rng rng(spec.seed);
        for (u64 i = words - 1; i > 0; i--) std::swap(idx[i], idx[rng.below(i + 1)]);
    }
    std::vector<u8> idx_bytes;
    idx_bytes.reserve(words * 8);
    for (u64 v : idx) push_u64(idx_bytes, v);

    // Unrolled by four like compiled gather code: four index loads, four
    // address computations, four gathers, then the four stores.
    Assembler as(0x1000);
    as.li(kA0, i64(kCopySrc));
    as.li(kA1, i64(kCopyDst));
    as.li(kA2, i64(kCopyIdx));
    as.li(kT0, i64(words / 4));
    as.label("loop4");
    as.emit(M::LD, kA3, kA2, 0, 0);   // four indices
    as.emit(M::LD, kA4, kA2, 0, 8);
    as.emit(M::LD, kA5, kA2, 0, 16);
    as.emit(M::LD, kT1, kA2, 0, 24);
    as.emit(M::SLLI, kA3, kA3, 0, 3);
    as.emit(M::ADD, kA3, kA3, kA0);   // &src[index]
    as.emit(M::SLLI, kA4, kA4, 0, 3);
    as.emit(M::ADD, kA4, kA4, kA0);
    as.emit(M::SLLI, kA5, kA5, 0, 3);
    as.emit(M::ADD, kA5, kA5, kA0);
    as.emit(M::SLLI, kT1, kT1, 0, 3);
    as.emit(M::ADD, kT1, kT1, kA0);
    as.emit(M::LD, kA3, kA3, 0, 0);   // four gathers
    as.emit(M::LD, kA4, kA4, 0, 0);
    as.emit(M::LD, kA5, kA5, 0, 0);
    as.emit(M::LD, kT1, kT1, 0, 0);
    as.emit(M::ADDI, kA2, kA2, 0, 32);
    as.emit(M::ADDI, kT0, kT0, 0, -1);
    as.emit(M::SD, 0, kA1, kA3, 0);
    as.emit(M::SD, 0, kA1, kA4, 8);
    as.emit(M::SD, 0, kA1, kA5, 16);
    as.emit(M::SD, 0, kA1, kT1, 24);
    as.emit(M::ADDI, kA1, kA1, 0, 32);
    as.emit_branch(M::BNE, kT0, kX0, "loop4");
    if (words % 4) {
        as.li(kT0, i64(words % 4));
        as.label("tail");
        as.emit(M::LD, kA3, kA2, 0, 0);
        as.emit(M::SLLI, kA3, kA3, 0, 3);
        as.emit(M::ADD, kA3, kA3, kA0);
        as.emit(M::LD, kA4, kA3, 0, 0);
        as.emit(M::ADDI, kA2, kA2, 0, 8);
        as.emit(M::ADDI, kT0, kT0, 0, -1);
        as.emit(M::SD, 0, kA1, kA4, 0);
        as.emit(M::ADDI, kA1, kA1, 0, 8);
        as.emit_branch(M::BNE, kT0, kX0, "tail");
    }
    as.halt();

    std::vector<Segment> data = {{kCopySrc, random_payload(words, spec.seed)},
                                 {kCopyIdx, std::move(idx_bytes)}};
    GeneratedKernel g = finish_kernel(as, spec, std::move(data), words * 9 + 64);
    g.src_addr = kCopySrc;
    g.dst_addr = kCopyDst;
    g.idx_addr = kCopyIdx;
    g.len_bytes = words * 8;
    g.bytes_copied = 2 * g.len_bytes;
    return g;
}

// ---- fp_nbody_like --------------------------------------------------------
// All-pairs softened inverse-square-style interaction in double precision:
// per pair 3 subs, 1 mul, 5 fused multiply-adds, 1 add, and 1 divide.
// Struct-of-arrays layout: x/y/z planes of n doubles, positions then
// velocities; the plane stride must fit a 12-bit load offset, hence n <= 120.
GeneratedKernel gen_fp_nbody(KernelSpec spec) {
    if (spec.n == 0) spec.n = 64;
    if (spec.iterations == 0) spec.iterations = 16;
    require(spec.n >= 2 && spec.n <= 120, "fp_nbody_like n must be in [2, 120]");
    require(spec.iterations >= 1 && spec.iterations <= 64,
            "fp_nbody_like steps must be in [1, 64]");
    const u64 n = spec.n;
    const i64 n8 = i64(n * 8);
    const i64 n16 = 2 * n8;
    const double dt = 0.015625;  // 1/64, exactly representable
    const double eps = 0.5;

    Rng rng(spec.seed);
    std::vector<u8> pos_bytes, vel_bytes, const_bytes;
    for (u64 i = 0; i < 3 * n; i++) push_f64(pos_bytes, rng.unit() * 2.0 - 1.0);
    for (u64 i = 0; i < 3 * n; i++) push_f64(vel_bytes, (rng.unit() - 0.5) * 0.0625);
    push_f64(const_bytes, 1.0);
    push_f64(const_bytes, dt);
    push_f64(const_bytes, eps);

    Assembler as(0x1000);
    as.li(kT1, i64(kNbodyConst));
    as.emit(M::FLD, 20, kT1, 0, 0);   // f20 = 1.0
    as.emit(M::FLD, 21, kT1, 0, 8);   // f21 = dt
    as.emit(M::FLD, 22, kT1, 0, 16);  // f22 = eps
    as.li(kS4, i64(kNbodyPos));
    as.li(kS5, i64(kNbodyVel));
    as.li(kT0, i64(spec.iterations));
    as.label("step_loop");
    as.li(kS0, i64(n));
    as.emit(M::ADDI, kA0, kS4, 0, 0);  // &px[i]
    as.emit(M::ADDI, kA2, kS5, 0, 0);  // &vx[i]
    as.label("i_loop");
    as.emit(M::FLD, 10, kA0, 0, 0);
    as.emit(M::FLD, 11, kA0, 0, n8);
    as.emit(M::FLD, 12, kA0, 0, n16);
    as.emit(M::FMV_D_X, 3, kX0, 0, 0);  // acc = 0
    as.emit(M::FMV_D_X, 4, kX0, 0, 0);
    as.emit(M::FMV_D_X, 5, kX0, 0, 0);
    as.li(kS1, i64(n));
    as.emit(M::ADDI, kA1, kS4, 0, 0);  // &px[j]
    as.label("j_loop");
    as.emit(M::FLD, 13, kA1, 0, 0);
    as.emit(M::FLD, 14, kA1, 0, n8);
    as.emit(M::FLD, 15, kA1, 0, n16);
    as.emit(M::FSUB_D, 0, 13, 10);
    as.emit(M::FSUB_D, 1, 14, 11);
    as.emit(M::FSUB_D, 2, 15, 12);
    as.emit(M::FMUL_D, 6, 0, 0);
    as.emit(M::FMADD_D, 6, 1, 1, 0, 6);
    as.emit(M::FMADD_D, 6, 2, 2, 0, 6);
    as.emit(M::FADD_D, 6, 6, 22);
    as.emit(M::FDIV_D, 7, 20, 6);
    as.emit(M::FMADD_D, 3, 0, 7, 0, 3);
    as.emit(M::FMADD_D, 4, 1, 7, 0, 4);
    as.emit(M::FMADD_D, 5, 2, 7, 0, 5);
    as.emit(M::ADDI, kA1, kA1, 0, 8);
    as.emit(M::ADDI, kS1, kS1, 0, -1);
    as.emit_branch(M::BNE, kS1, kX0, "j_loop");
    as.emit(M::FLD, 16, kA2, 0, 0);
    as.emit(M::FMADD_D, 16, 3, 21, 0, 16);
    as.emit(M::FSD, 0, kA2, 16, 0);
    as.emit(M::FLD, 17, kA2, 0, n8);
    as.emit(M::FMADD_D, 17, 4, 21, 0, 17);
    as.emit(M::FSD, 0, kA2, 17, n8);
    as.emit(M::FLD, 18, kA2, 0, n16);
    as.emit(M::FMADD_D, 18, 5, 21, 0, 18);
    as.emit(M::FSD, 0, kA2, 18, n16);
    as.emit(M::ADDI, kA0, kA0, 0, 8);
    as.emit(M::ADDI, kA2, kA2, 0, 8);
    as.emit(M::ADDI, kS0, kS0, 0, -1);
    as.emit_branch(M::BNE, kS0, kX0, "i_loop");
    as.li(kS0, i64(n));
    as.emit(M::ADDI, kA0, kS4, 0, 0);
    as.emit(M::ADDI, kA2, kS5, 0, 0);
    as.label("p_loop");
    as.emit(M::FLD, 16, kA0, 0, 0);
    as.emit(M::FLD, 17, kA2, 0, 0);
    as.emit(M::FMADD_D, 16, 17, 21, 0, 16);
    as.emit(M::FSD, 0, kA0, 16, 0);
    as.emit(M::FLD, 16, kA0, 0, n8);
    as.emit(M::FLD, 17, kA2, 0, n8);
    as.emit(M::FMADD_D, 16, 17, 21, 0, 16);
    as.emit(M::FSD, 0, kA0, 16, n8);
    as.emit(M::FLD, 16, kA0, 0, n16);
    as.emit(M::FLD, 17, kA2, 0, n16);
    as.emit(M::FMADD_D, 16, 17, 21, 0, 16);
    as.emit(M::FSD, 0, kA0, 16, n16);
    as.emit(M::ADDI, kA0, kA0, 0, 8);
    as.emit(M::ADDI, kA2, kA2, 0, 8);
    as.emit(M::ADDI, kS0, kS0, 0, -1);
    as.emit_branch(M::BNE, kS0, kX0, "p_loop");
    as.emit(M::ADDI, kT0, kT0, 0, -1);
    as.emit_branch(M::BNE, kT0, kX0, "step_loop");
    as.halt();

    u64 dyn = u64(spec.iterations) * (n * n * 17 + n * 34 + 24) + 16;
    std::vector<Segment> data = {{kNbodyPos, std::move(pos_bytes)},
                                 {kNbodyVel, std::move(vel_bytes)},
                                 {kNbodyConst, std::move(const_bytes)}};
    GeneratedKernel g = finish_kernel(as, spec, std::move(data), dyn);
    g.pos_addr = kNbodyPos;
    g.vel_addr = kNbodyVel;
    g.dt = dt;
    g.eps = eps;
    return g;
}

}  // namespace

const char* kernel_kind_name(KernelKind k) {
    switch (k) {
        case KernelKind::MatmulInt: return "matmul_int";
        case KernelKind::Seqcopy: return "seqcopy";
        case KernelKind::Sgcopy: return "sgcopy";
        case KernelKind::Branchy: return "branchy";
        case KernelKind::FpNbodyLike: return "fp_nbody_like";
        case KernelKind::DependencyChain: return "dependency_chain";
        case KernelKind::IndependentAlu: return "independent_alu";
    }
    return "unknown";
}

KernelKind kernel_kind_from_name(const std::string& name) {
    for (KernelKind k :
         {KernelKind::MatmulInt, KernelKind::Seqcopy, KernelKind::Sgcopy, KernelKind::Branchy,
          KernelKind::FpNbodyLike, KernelKind::DependencyChain, KernelKind::IndependentAlu})
        if (name == kernel_kind_name(k)) return k;
    throw SimError(ErrCode::ParameterOutOfRange, "unknown kernel: " + name);
}

std::vector<std::string> kernel_names() {
    return {"matmul_int",    "seqcopy",          "sgcopy",         "branchy",
            "fp_nbody_like", "dependency_chain", "independent_alu"};
}

GeneratedKernel generate(const KernelSpec& spec) {
    switch (spec.kind) {
        case KernelKind::MatmulInt: return gen_matmul_int(spec);
        case KernelKind::Seqcopy: return gen_seqcopy(spec);
        case KernelKind::Sgcopy: return gen_sgcopy(spec);
        case KernelKind::Branchy: return gen_branchy(spec);
        case KernelKind::FpNbodyLike: return gen_fp_nbody(spec);
        case KernelKind::DependencyChain: return gen_dependency_chain(spec);
        case KernelKind::IndependentAlu: return gen_independent_alu(spec);
    }
    throw SimError(ErrCode::ParameterOutOfRange, "unknown kernel kind");
}

// ---------------------------------------------------------------------------
// Trace I/O
// ---------------------------------------------------------------------------

std::string dump_trace(const std::vector<RetireRecord>& stream) {
    std::string out = "# trace v1: seq pc raw next_pc [M vaddr bytes S|L]\n";
    char buf[160];
    for (const auto& r : stream) {
        if (r.is_mem()) {
            std::snprintf(buf, sizeof buf, "%llx %llx %llx %llx M %llx %x %c\n",
                          (unsigned long long)r.seq, (unsigned long long)r.pc,
                          (unsigned long long)r.instr.raw, (unsigned long long)r.next_pc,
                          (unsigned long long)r.mem_vaddr, r.mem_bytes,
                          r.is_store() ? 'S' : 'L');
        } else {
            std::snprintf(buf, sizeof buf, "%llx %llx %llx %llx\n", (unsigned long long)r.seq,
                          (unsigned long long)r.pc, (unsigned long long)r.instr.raw,
                          (unsigned long long)r.next_pc);
        }
        out += buf;
    }
    return out;
}

namespace {

u64 parse_hex(const std::string& tok, size_t lineno, const char* field) {
    try {
        size_t used = 0;
        u64 v = std::stoull(tok, &used, 16);
        if (used != tok.size())
            throw SimError(ErrCode::ParseError, std::string("trailing junk in ") + field);
        return v;
    } catch (const SimError&) {
        throw;
    } catch (const std::exception&) {
        throw SimError(ErrCode::ParseError, "line " + std::to_string(lineno) + ": bad " + field +
                                                " value '" + tok + "'");
    }
}

std::vector<std::string> tokenize(std::string line) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string t;
    while (ls >> t) toks.push_back(t);
    return toks;
}

}  // namespace

std::vector<RetireRecord> parse_trace(const std::string& text) {
    std::vector<RetireRecord> out;
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        lineno++;
        std::vector<std::string> toks = tokenize(line);
        if (toks.empty()) continue;
        if (toks.size() != 4 && toks.size() != 8)
            throw SimError(ErrCode::ParseError,
                           "line " + std::to_string(lineno) +
                               ": expected `seq pc raw next_pc [M vaddr bytes S|L]`");
        RetireRecord r;
        r.seq = parse_hex(toks[0], lineno, "seq");
        r.pc = parse_hex(toks[1], lineno, "pc");
        u64 raw = parse_hex(toks[2], lineno, "raw");
        r.next_pc = parse_hex(toks[3], lineno, "next_pc");
        if (r.seq != out.size())
            throw SimError(ErrCode::ParseError, "line " + std::to_string(lineno) +
                                                    ": seq must count up from 0, got " +
                                                    to_hex(r.seq));
        if (raw > 0xffffffffULL)
            throw SimError(ErrCode::ParseError,
                           "line " + std::to_string(lineno) + ": raw exceeds 32 bits");
        try {
            r.instr = decode(u32(raw));
        } catch (const SimError& e) {
            throw SimError(ErrCode::ParseError,
                           "line " + std::to_string(lineno) + ": " + e.what());
        }
        const Instr& ins = r.instr;
        r.is_branch = is_cond_branch(ins.mn);
        r.is_jump = is_jump(ins.mn);
        r.is_call = r.is_jump && (ins.rd == 1 || ins.rd == 5);
        r.is_return = ins.mn == M::JALR && (ins.rs1 == 1 || ins.rs1 == 5) && ins.rd == 0;

        const u64 fallthrough = r.pc + ins.width;
        const std::string where = "seq " + to_hex(r.seq);
        if (r.is_branch) {
            r.taken = r.next_pc != fallthrough;
            if (r.taken && r.next_pc != r.pc + u64(ins.imm))
                throw SimError(ErrCode::InconsistentControlFlow,
                               where + ": taken branch target does not match the offset");
        } else if (r.is_jump) {
            r.taken = true;
            if (ins.mn == M::JAL && r.next_pc != r.pc + u64(ins.imm))
                throw SimError(ErrCode::InconsistentControlFlow,
                               where + ": jal target does not match the offset");
            if (ins.mn == M::JALR && (r.next_pc & 1))
                throw SimError(ErrCode::InconsistentControlFlow,
                               where + ": jalr next_pc has bit 0 set");
        } else {
            if (r.next_pc != fallthrough)
                throw SimError(ErrCode::InconsistentControlFlow,
                               where + ": next_pc != pc + width on a non-branch");
        }

        const bool is_mem_class = ins.fu == FuClass::LOAD || ins.fu == FuClass::FP_LOAD ||
                                  ins.fu == FuClass::STORE || ins.fu == FuClass::FP_STORE;
        if (toks.size() == 8) {
            if (toks[4] != "M")
                throw SimError(ErrCode::ParseError,
                               "line " + std::to_string(lineno) + ": expected 'M' marker");
            if (!is_mem_class)
                throw SimError(ErrCode::ParseError,
                               "line " + std::to_string(lineno) +
                                   ": memory operand on a non-memory instruction");
            r.mem_vaddr = parse_hex(toks[5], lineno, "vaddr");
            u64 bytes = parse_hex(toks[6], lineno, "bytes");
            if (bytes == 0 || bytes > 8)
                throw SimError(ErrCode::ParseError,
                               "line " + std::to_string(lineno) + ": bytes must be 1..8");
            r.mem_bytes = u32(bytes);
            bool stored = toks[7] == "S";
            if (!stored && toks[7] != "L")
                throw SimError(ErrCode::ParseError,
                               "line " + std::to_string(lineno) + ": expected S or L");
            if (stored != r.is_store())
                throw SimError(ErrCode::ParseError,
                               "line " + std::to_string(lineno) +
                                   ": S/L marker contradicts the opcode");
        } else if (is_mem_class) {
            throw SimError(ErrCode::ParseError, "line " + std::to_string(lineno) +
                                                    ": missing memory operand for " +
                                                    mnemonic_name(ins.mn));
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<RetireRecord> load_trace_file(const std::string& path) {
    return parse_trace(read_text_file(path));
}

std::vector<BranchTraceRecord> branch_trace_of(const std::vector<RetireRecord>& stream) {
    std::vector<BranchTraceRecord> out;
    for (const auto& r : stream) {
        if (!r.is_control_transfer()) continue;
        u64 target = r.taken ? r.next_pc : r.pc + u64(r.instr.imm);
        out.push_back({r.pc, r.taken, target});
    }
    return out;
}

}  // namespace rvsim
