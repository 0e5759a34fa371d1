// Kernel generators vs independent host oracles (matmul product, copy
// payloads, branch counts, fp n-body with fused multiply-adds), the trace
// text format round trip, and generator determinism.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "rvsim/golden.hpp"
#include "rvsim/isa.hpp"
#include "rvsim/workloads.hpp"

using namespace rvsim;
using M = Mnemonic;

namespace {

RunResult run_halting(const GeneratedKernel& g) {
    RunResult r = run(g.program, g.instr_budget ? g.instr_budget : 10'000'000);
    REQUIRE(r.status == RunStatus::Halted);
    return r;
}

std::vector<double> segment_doubles(const GeneratedKernel& g, u64 addr) {
    for (const Segment& s : g.program.data) {
        if (s.addr != addr) continue;
        REQUIRE(s.bytes.size() % 8 == 0);
        std::vector<double> out(s.bytes.size() / 8);
        for (size_t i = 0; i < out.size(); i++) {
            u64 bits = 0;
            for (int b = 7; b >= 0; b--) bits = (bits << 8) | s.bytes[i * 8 + size_t(b)];
            out[i] = std::bit_cast<double>(bits);
        }
        return out;
    }
    FAIL("segment not found");
    return {};
}

u64 read_u64(const ArchState& st, u64 addr) { return st.mem.read(addr, 8); }

}  // namespace

TEST_CASE("matmul kernel: golden memory matches an independent host product") {
    KernelSpec s;
    s.kind = KernelKind::MatmulInt;
    s.n = 8;
    s.seed = 3;
    GeneratedKernel g = generate(s);
    const u64 n = g.spec.n;
    REQUIRE(g.expected_c.size() == n * n);

    // Recompute the product from the program's own data segment.
    const Segment& ab = g.program.data.at(0);
    REQUIRE(ab.addr == g.a_addr);
    REQUIRE(ab.bytes.size() == 2 * n * n * 8);
    std::vector<i64> a(n * n), b(n * n);
    for (u64 i = 0; i < n * n; i++) {
        u64 va = 0, vb = 0;
        for (int k = 7; k >= 0; k--) {
            va = (va << 8) | ab.bytes[i * 8 + u64(k)];
            vb = (vb << 8) | ab.bytes[(n * n + i) * 8 + u64(k)];
        }
        a[i] = i64(va);
        b[i] = i64(vb);
    }
    std::vector<i64> want(n * n, 0);
    for (u64 i = 0; i < n; i++)
        for (u64 k = 0; k < n; k++)
            for (u64 j = 0; j < n; j++) want[i * n + j] += a[i * n + k] * b[k * n + j];
    CHECK(want == g.expected_c);

    RunResult r = run_halting(g);
    for (u64 i = 0; i < n * n; i++)
        CHECK(read_u64(r.state, g.c_addr + i * 8) == u64(g.expected_c[i]));
}

TEST_CASE("seqcopy moves the payload verbatim") {
    KernelSpec s;
    s.kind = KernelKind::Seqcopy;
    s.elements = 64;
    s.seed = 5;
    GeneratedKernel g = generate(s);
    CHECK(g.len_bytes == 64 * 8);
    CHECK(g.bytes_copied == 2 * g.len_bytes);

    RunResult r = run_halting(g);
    CHECK(r.state.mem.digest_range(g.dst_addr, g.len_bytes) ==
          r.state.mem.digest_range(g.src_addr, g.len_bytes));
    for (u64 off = 0; off < g.len_bytes; off += 8)
        CHECK(read_u64(r.state, g.dst_addr + off) == read_u64(r.state, g.src_addr + off));
}

TEST_CASE("sgcopy with the identity index equals seqcopy") {
    KernelSpec seq;
    seq.kind = KernelKind::Seqcopy;
    seq.elements = 48;
    seq.seed = 11;
    KernelSpec sg = seq;
    sg.kind = KernelKind::Sgcopy;
    sg.identity_index = true;

    GeneratedKernel gs = generate(seq);
    GeneratedKernel gg = generate(sg);
    RunResult rs = run_halting(gs);
    RunResult rg = run_halting(gg);
    REQUIRE(gs.len_bytes == gg.len_bytes);
    CHECK(rs.state.mem.digest_range(gs.dst_addr, gs.len_bytes) ==
          rg.state.mem.digest_range(gg.dst_addr, gg.len_bytes));
}

TEST_CASE("sgcopy with a shuffled index writes a permutation of the source") {
    KernelSpec s;
    s.kind = KernelKind::Sgcopy;
    s.elements = 64;
    s.seed = 1;
    GeneratedKernel g = generate(s);
    RunResult r = run_halting(g);

    std::vector<u64> src(64), dst(64);
    for (u64 i = 0; i < 64; i++) {
        src[i] = read_u64(r.state, g.src_addr + i * 8);
        dst[i] = read_u64(r.state, g.dst_addr + i * 8);
    }
    CHECK(src != dst);  // the shuffle actually permuted something
    std::sort(src.begin(), src.end());
    std::sort(dst.begin(), dst.end());
    CHECK(src == dst);
}

TEST_CASE("branchy kernel: exact dynamic branch counts and chain register") {
    KernelSpec s;
    s.kind = KernelKind::Branchy;
    s.iterations = 500;
    s.seed = 9;
    GeneratedKernel g = generate(s);
    RunResult r = run_halting(g);

    u64 branches = 0, taken = 0;
    for (const auto& rec : r.stream) {
        if (!rec.is_branch) continue;
        branches++;
        if (rec.taken) taken++;
    }
    CHECK(branches == g.expected_branches);
    CHECK(taken == g.expected_taken);
    CHECK(g.expected_branches == u64(s.iterations) * 9);
    CHECK(r.state.get_x(g.chain_reg) == g.expected_chain_value);
    for (auto [reg, val] : g.expected_regs) CHECK(r.state.get_x(reg) == val);
}

TEST_CASE("branchy kernel hits the requested taken rate") {
    KernelSpec s;
    s.kind = KernelKind::Branchy;
    s.iterations = 20000;
    s.taken_rate = 0.7;
    GeneratedKernel g = generate(s);
    double achieved = double(g.expected_taken) / double(g.expected_branches);
    CHECK(achieved == doctest::Approx(0.7).epsilon(0.02));

    s.taken_rate = 0.5;
    s.seed = 4;
    GeneratedKernel g2 = generate(s);
    double a2 = double(g2.expected_taken) / double(g2.expected_branches);
    CHECK(a2 == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("dependency chain accumulates exactly 64 per iteration") {
    KernelSpec s;
    s.kind = KernelKind::DependencyChain;
    s.iterations = 37;
    GeneratedKernel g = generate(s);
    CHECK(g.expected_chain_value == 37u * 64u);
    RunResult r = run_halting(g);
    CHECK(r.state.get_x(g.chain_reg) == g.expected_chain_value);
}

TEST_CASE("independent alu register oracles") {
    KernelSpec s;
    s.kind = KernelKind::IndependentAlu;
    s.iterations = 5;
    GeneratedKernel g = generate(s);
    REQUIRE_FALSE(g.expected_regs.empty());
    RunResult r = run_halting(g);
    for (auto [reg, val] : g.expected_regs) CHECK(r.state.get_x(reg) == val);
}

TEST_CASE("fp n-body matches a host simulation bit for bit") {
    KernelSpec s;
    s.kind = KernelKind::FpNbodyLike;
    s.n = 4;
    s.iterations = 3;
    s.seed = 2;
    GeneratedKernel g = generate(s);
    const u64 n = g.spec.n;

    std::vector<double> pos = segment_doubles(g, g.pos_addr);  // x,y,z planes
    std::vector<double> vel = segment_doubles(g, g.vel_addr);
    REQUIRE(pos.size() == 3 * n);
    REQUIRE(vel.size() == 3 * n);

    // Host replay of the kernel's arithmetic, fused ops included, in the
    // same evaluation order.
    for (u32 step = 0; step < g.spec.iterations; step++) {
        for (u64 i = 0; i < n; i++) {
            double px = pos[i], py = pos[n + i], pz = pos[2 * n + i];
            double ax = 0.0, ay = 0.0, az = 0.0;
            for (u64 j = 0; j < n; j++) {
                double dx = pos[j] - px;
                double dy = pos[n + j] - py;
                double dz = pos[2 * n + j] - pz;
                double r2 = dx * dx;
                r2 = std::fma(dy, dy, r2);
                r2 = std::fma(dz, dz, r2);
                r2 = r2 + g.eps;
                double inv = 1.0 / r2;
                ax = std::fma(dx, inv, ax);
                ay = std::fma(dy, inv, ay);
                az = std::fma(dz, inv, az);
            }
            vel[i] = std::fma(ax, g.dt, vel[i]);
            vel[n + i] = std::fma(ay, g.dt, vel[n + i]);
            vel[2 * n + i] = std::fma(az, g.dt, vel[2 * n + i]);
        }
        for (u64 i = 0; i < n; i++) {
            pos[i] = std::fma(vel[i], g.dt, pos[i]);
            pos[n + i] = std::fma(vel[n + i], g.dt, pos[n + i]);
            pos[2 * n + i] = std::fma(vel[2 * n + i], g.dt, pos[2 * n + i]);
        }
    }

    RunResult r = run_halting(g);
    for (u64 i = 0; i < 3 * n; i++) {
        CHECK(read_u64(r.state, g.pos_addr + i * 8) == std::bit_cast<u64>(pos[i]));
        CHECK(read_u64(r.state, g.vel_addr + i * 8) == std::bit_cast<u64>(vel[i]));
    }
}

TEST_CASE("trace text round trips every timing-relevant field") {
    KernelSpec s;
    s.kind = KernelKind::Seqcopy;
    s.elements = 24;
    GeneratedKernel g = generate(s);
    std::vector<RetireRecord> stream = run_halting(g).stream;

    std::string text = dump_trace(stream);
    std::vector<RetireRecord> parsed = parse_trace(text);
    REQUIRE(parsed.size() == stream.size());
    CHECK(dump_trace(parsed) == text);

    for (size_t i = 0; i < stream.size(); i++) {
        const RetireRecord &a = stream[i], &b = parsed[i];
        CHECK(a.seq == b.seq);
        CHECK(a.pc == b.pc);
        CHECK(a.next_pc == b.next_pc);
        CHECK(a.instr.raw == b.instr.raw);
        CHECK(a.instr.mn == b.instr.mn);
        CHECK(a.is_branch == b.is_branch);
        CHECK(a.is_jump == b.is_jump);
        CHECK(a.is_call == b.is_call);
        CHECK(a.is_return == b.is_return);
        CHECK(a.taken == b.taken);
        CHECK(a.mem_vaddr == b.mem_vaddr);
        CHECK(a.mem_bytes == b.mem_bytes);
    }
}

TEST_CASE("trace parser rejects malformed input") {
    auto line_for = [](const AsmInst& d, u64 pc, u64 next, const char* mem = "") {
        char buf[128];
        std::snprintf(buf, sizeof buf, "0 %llx %llx %llx%s\n", (unsigned long long)pc,
                      (unsigned long long)encode(d), (unsigned long long)next, mem);
        return std::string(buf);
    };
    AsmInst nop{.mn = M::ADDI};
    AsmInst ld{.mn = M::LD, .rd = 10, .rs1 = 2, .imm = 16};
    AsmInst beq{.mn = M::BEQ, .rs1 = 1, .rs2 = 2, .imm = -4};

    // Comments and blank lines are fine.
    CHECK(parse_trace("# empty\n\n").empty());
    CHECK(parse_trace(line_for(nop, 0x1000, 0x1004)).size() == 1);

    // seq must count from zero.
    CHECK_THROWS_AS(parse_trace("1 1000 13 1004\n"), SimError);
    // Wrong token count.
    CHECK_THROWS_AS(parse_trace("0 1000 13 1004 M\n"), SimError);
    // Bad hex and oversized raw.
    CHECK_THROWS_AS(parse_trace("0 zz 13 1004\n"), SimError);
    CHECK_THROWS_AS(parse_trace("0 1000 123456789 1004\n"), SimError);
    // Memory marker rules.
    CHECK_THROWS_AS(parse_trace(line_for(nop, 0x1000, 0x1004, " M 2000 8 L")), SimError);
    CHECK_THROWS_AS(parse_trace(line_for(ld, 0x1000, 0x1004)), SimError);
    CHECK_THROWS_AS(parse_trace(line_for(ld, 0x1000, 0x1004, " X 2000 8 L")), SimError);
    CHECK_THROWS_AS(parse_trace(line_for(ld, 0x1000, 0x1004, " M 2000 0 L")), SimError);
    CHECK_THROWS_AS(parse_trace(line_for(ld, 0x1000, 0x1004, " M 2000 9 L")), SimError);
    CHECK_THROWS_AS(parse_trace(line_for(ld, 0x1000, 0x1004, " M 2000 8 S")), SimError);
    CHECK(parse_trace(line_for(ld, 0x1000, 0x1004, " M 2000 8 L")).size() == 1);

    // Control-flow consistency.
    CHECK_THROWS_AS(parse_trace(line_for(nop, 0x1000, 0x1010)), SimError);     // bad fallthrough
    CHECK_THROWS_AS(parse_trace(line_for(beq, 0x1000, 0x1008)), SimError);     // bad taken target
    CHECK(parse_trace(line_for(beq, 0x1000, 0x0ffc)).at(0).taken);             // matches imm -4
    CHECK_FALSE(parse_trace(line_for(beq, 0x1000, 0x1004)).at(0).taken);       // fallthrough
}

TEST_CASE("branch_trace_of projects control transfers with resolved targets") {
    Assembler as(0x1000);
    as.li(5, 0);
    as.li(6, 3);
    as.label("loop");
    as.emit(M::ADDI, 5, 5, 0, 1);
    as.emit_branch(M::BNE, 5, 6, "loop");
    as.halt();
    Program p;
    p.base = 0x1000;
    p.entry = 0x1000;
    p.code = as.finish();
    RunResult r = run(p, 1000);
    REQUIRE(r.status == RunStatus::Halted);

    std::vector<BranchTraceRecord> bt = branch_trace_of(r.stream);
    REQUIRE(bt.size() == 3);  // the loop branch executes three times
    u64 branch_pc = as.label_addr("loop") + 4;
    u64 loop_head = as.label_addr("loop");
    CHECK(bt[0].pc == branch_pc);
    CHECK(bt[0].taken);
    CHECK(bt[0].target == loop_head);
    CHECK(bt[1].taken);
    CHECK(bt[1].target == loop_head);
    CHECK_FALSE(bt[2].taken);
    CHECK(bt[2].target == loop_head);  // not-taken still reports the would-be target
}

TEST_CASE("generators are deterministic in the spec and differ across seeds") {
    KernelSpec s;
    s.kind = KernelKind::Sgcopy;
    s.elements = 128;
    s.seed = 42;
    GeneratedKernel a = generate(s);
    GeneratedKernel b = generate(s);
    CHECK(a.program.code == b.program.code);
    REQUIRE(a.program.data.size() == b.program.data.size());
    for (size_t i = 0; i < a.program.data.size(); i++) {
        CHECK(a.program.data[i].addr == b.program.data[i].addr);
        CHECK(a.program.data[i].bytes == b.program.data[i].bytes);
    }
    CHECK(stream_digest(run_halting(a).stream) == stream_digest(run_halting(b).stream));

    s.seed = 43;
    GeneratedKernel c = generate(s);
    CHECK(a.program.data[0].bytes != c.program.data[0].bytes);  // payload reseeded
}

TEST_CASE("generate() rejects out-of-range parameters") {
    auto reject = [](KernelKind k, auto&& tweak) {
        KernelSpec s;
        s.kind = k;
        tweak(s);
        CHECK_THROWS_AS(generate(s), SimError);
    };
    reject(KernelKind::MatmulInt, [](KernelSpec& s) { s.n = 1; });
    reject(KernelKind::MatmulInt, [](KernelSpec& s) { s.n = 129; });
    reject(KernelKind::Seqcopy, [](KernelSpec& s) { s.elements = 8; });
    reject(KernelKind::Seqcopy, [](KernelSpec& s) { s.elements = 200000; });
    reject(KernelKind::Sgcopy, [](KernelSpec& s) { s.elements = 8; });
    reject(KernelKind::Branchy, [](KernelSpec& s) { s.taken_rate = 0.3; });
    reject(KernelKind::Branchy, [](KernelSpec& s) { s.taken_rate = 0.95; });
    reject(KernelKind::Branchy, [](KernelSpec& s) { s.iterations = 2000000; });
    reject(KernelKind::FpNbodyLike, [](KernelSpec& s) { s.n = 121; });
    reject(KernelKind::FpNbodyLike, [](KernelSpec& s) { s.iterations = 65; });
    reject(KernelKind::DependencyChain, [](KernelSpec& s) { s.iterations = 2000000; });
    reject(KernelKind::IndependentAlu, [](KernelSpec& s) { s.iterations = 2000000; });
}

TEST_CASE("kernel names round trip") {
    std::vector<std::string> names = kernel_names();
    CHECK(names.size() == 7);
    for (const std::string& nm : names) {
        KernelKind k = kernel_kind_from_name(nm);
        CHECK(kernel_kind_name(k) == nm);
    }
    CHECK_THROWS_AS(kernel_kind_from_name("bogus"), SimError);
    CHECK_THROWS_AS(kernel_kind_from_name(""), SimError);
}
