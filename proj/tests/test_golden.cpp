// Golden-model tests: every program here has an independent host-side oracle
// (arithmetic recomputed with host integer/FP semantics, memory contents
// rebuilt by hand), plus run-status and stream-invariant checks.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "rvsim/golden.hpp"

using namespace rvsim;
using M = Mnemonic;

namespace {

Program make_prog(Assembler& a, std::vector<Segment> data = {}) {
    Program p;
    p.base = a.base();
    p.code = a.finish();
    p.data = std::move(data);
    p.entry = a.base();
    p.validate();
    return p;
}

RunResult run_halting(Assembler& a, std::vector<Segment> data = {}) {
    RunResult r = run(make_prog(a, std::move(data)), 1'000'000);
    REQUIRE(r.status == RunStatus::Halted);
    return r;
}

i64 sx32(u32 v) { return i64(i32(v)); }
using i128 = __int128;
using u128 = unsigned __int128;

// Host-side reference semantics for the two-register ALU/MUL/DIV ops.
u64 host_eval(M mn, u64 a, u64 b) {
    i64 sa = i64(a), sb = i64(b);
    switch (mn) {
        case M::ADD: return a + b;
        case M::SUB: return a - b;
        case M::SLL: return a << (b & 63);
        case M::SLT: return sa < sb ? 1 : 0;
        case M::SLTU: return a < b ? 1 : 0;
        case M::XOR: return a ^ b;
        case M::SRL: return a >> (b & 63);
        case M::SRA: return u64(sa >> (b & 63));
        case M::OR: return a | b;
        case M::AND: return a & b;
        case M::ADDW: return u64(sx32(u32(a) + u32(b)));
        case M::SUBW: return u64(sx32(u32(a) - u32(b)));
        case M::SLLW: return u64(sx32(u32(a) << (b & 31)));
        case M::SRLW: return u64(sx32(u32(a) >> (b & 31)));
        case M::SRAW: return u64(sx32(u32(i32(u32(a)) >> (b & 31))));
        case M::MUL: return a * b;
        case M::MULH: return u64((i128(sa) * i128(sb)) >> 64);
        case M::MULHU: return u64((u128(a) * u128(b)) >> 64);
        case M::MULHSU: return u64((i128(sa) * i128(u128(b))) >> 64);
        case M::DIV:
            if (sb == 0) return u64(-1);
            if (sa == INT64_MIN && sb == -1) return u64(INT64_MIN);
            return u64(sa / sb);
        case M::DIVU: return b == 0 ? ~u64(0) : a / b;
        case M::REM:
            if (sb == 0) return a;
            if (sa == INT64_MIN && sb == -1) return 0;
            return u64(sa % sb);
        case M::REMU: return b == 0 ? a : a % b;
        case M::MULW: return u64(sx32(u32(a) * u32(b)));
        case M::DIVW: {
            i32 x = i32(u32(a)), y = i32(u32(b));
            if (y == 0) return u64(-1);
            if (x == INT32_MIN && y == -1) return u64(sx32(u32(INT32_MIN)));
            return u64(i64(x / y));
        }
        case M::DIVUW: {
            u32 x = u32(a), y = u32(b);
            return y == 0 ? u64(-1) : u64(sx32(x / y));
        }
        case M::REMW: {
            i32 x = i32(u32(a)), y = i32(u32(b));
            if (y == 0) return u64(i64(x));
            if (x == INT32_MIN && y == -1) return 0;
            return u64(i64(x % y));
        }
        case M::REMUW: {
            u32 x = u32(a), y = u32(b);
            return y == 0 ? u64(sx32(x)) : u64(sx32(x % y));
        }
        default: REQUIRE(false); return 0;
    }
}

void push_u64(std::vector<u8>& v, u64 x) {
    for (int i = 0; i < 8; i++) v.push_back(u8(x >> (8 * i)));
}

void push_f64(std::vector<u8>& v, double d) { push_u64(v, std::bit_cast<u64>(d)); }

}  // namespace

TEST_CASE("iterative fibonacci(10) == 55") {
    Assembler a(0x1000);
    a.li(10, 10);  // a0 = n
    a.li(5, 0);    // t0 = fib(0)
    a.li(6, 1);    // t1 = fib(1)
    a.label("loop");
    a.emit_branch(M::BEQ, 10, 0, "done");
    a.emit(M::ADD, 7, 5, 6);      // t2 = t0 + t1
    a.emit(M::ADDI, 5, 6, 0, 0);  // t0 = t1
    a.emit(M::ADDI, 6, 7, 0, 0);  // t1 = t2
    a.emit(M::ADDI, 10, 10, 0, -1);
    a.emit_jal(0, "loop");
    a.label("done");
    a.halt();
    RunResult r = run_halting(a);
    CHECK(r.state.x[5] == 55);  // fib(10)
    CHECK(r.state.x[6] == 89);  // fib(11)
    CHECK(r.state.retired == r.stream.size());
}

TEST_CASE("li constant materialization") {
    const i64 values[] = {0,
                          1,
                          -1,
                          42,
                          -42,
                          2047,
                          -2048,
                          2048,
                          -2049,
                          0x7fffffff,
                          i64(0x80000000ull),
                          -2147483648ll,
                          0x12345678,
                          i64(0x123456789abcdef0ull),
                          i64(0xfedcba9876543210ull),
                          INT64_MAX,
                          INT64_MIN,
                          1ll << 40,
                          -(1ll << 40) + 3};
    for (i64 v : values) {
        CAPTURE(v);
        Assembler a(0x1000);
        a.li(10, v);
        a.halt();
        RunResult r = run_halting(a);
        CHECK(r.state.x[10] == u64(v));
    }
}

TEST_CASE("two-register op oracles (ALU, M extension)") {
    const M ops[] = {M::ADD,  M::SUB,    M::SLL,  M::SLT,  M::SLTU, M::XOR,  M::SRL,
                     M::SRA,  M::OR,     M::AND,  M::ADDW, M::SUBW, M::SLLW, M::SRLW,
                     M::SRAW, M::MUL,    M::MULH, M::MULHU, M::MULHSU, M::DIV, M::DIVU,
                     M::REM,  M::REMU,   M::MULW, M::DIVW, M::DIVUW, M::REMW, M::REMUW};
    const std::pair<u64, u64> pairs[] = {
        {5, 3},
        {0, 0},
        {u64(-1), 1},
        {1, u64(-1)},
        {u64(INT64_MIN), u64(-1)},          // signed division overflow case
        {u64(INT64_MAX), 2},
        {123456789, u64(-987654321)},
        {0xdeadbeefcafebabeull, 0x123456789abcdef0ull},
        {u64(sx32(u32(INT32_MIN))), u64(-1)},  // 32-bit overflow case for W forms
        {42, 0},                               // division by zero
    };
    for (M op : ops) {
        for (auto [va, vb] : pairs) {
            CAPTURE(mnemonic_name(op));
            CAPTURE(va);
            CAPTURE(vb);
            Assembler a(0x1000);
            a.li(10, i64(va));
            a.li(11, i64(vb));
            a.emit(op, 12, 10, 11);
            a.halt();
            RunResult r = run_halting(a);
            CHECK(r.state.x[12] == host_eval(op, va, vb));
        }
    }
}

TEST_CASE("immediate op oracles") {
    struct Case {
        M mn;
        u64 a;
        i64 imm;
        u64 expect;
    };
    const u64 v = 0xdeadbeefcafebabeull;
    const Case cases[] = {
        {M::ADDI, 100, -101, u64(-1)},
        {M::SLTI, u64(-5), -4, 1},
        {M::SLTI, 5, -4, 0},
        {M::SLTIU, 3, -1, 1},  // imm sign-extends then compares unsigned
        {M::XORI, v, -1, ~v},
        {M::ORI, 0xf0, 0x0f, 0xff},
        {M::ANDI, v, 0xff, v & 0xff},
        {M::SLLI, 1, 63, 1ull << 63},
        {M::SRLI, u64(-1), 63, 1},
        {M::SRAI, u64(INT64_MIN), 63, u64(-1)},
        {M::ADDIW, 0x7fffffff, 1, u64(sx32(0x80000000u))},
        {M::SLLIW, 1, 31, u64(sx32(0x80000000u))},
        {M::SRLIW, u64(0xffffffffull), 1, 0x7fffffff},
        {M::SRAIW, u64(sx32(0x80000000u)), 31, u64(-1)},
    };
    for (const Case& c : cases) {
        CAPTURE(mnemonic_name(c.mn));
        Assembler a(0x1000);
        a.li(10, i64(c.a));
        a.emit(c.mn, 12, 10, 0, c.imm);
        a.halt();
        RunResult r = run_halting(a);
        CHECK(r.state.x[12] == c.expect);
    }
}

TEST_CASE("lui and auipc") {
    Assembler a(0x1000);
    a.emit(M::LUI, 10, 0, 0, 0x12345000);
    a.emit(M::LUI, 11, 0, 0, i64(i32(0x80000000)));  // negative upper immediate
    a.emit(M::AUIPC, 12, 0, 0, 0x1000);              // pc 0x1008 + 0x1000
    a.halt();
    RunResult r = run_halting(a);
    CHECK(r.state.x[10] == 0x12345000u);
    CHECK(r.state.x[11] == u64(i64(i32(0x80000000))));
    CHECK(r.state.x[12] == 0x2008u);
}

TEST_CASE("load sign/zero extension oracles") {
    std::vector<u8> bytes = {0x80, 0xff, 0x7f, 0x01, 0x00, 0x80, 0xee, 0xcd};
    Segment seg{0x2000, bytes};
    Assembler a(0x1000);
    a.li(5, 0x2000);
    a.emit(M::LB, 10, 5, 0, 0);   // 0x80 -> -128
    a.emit(M::LBU, 11, 5, 0, 0);  // 0x80 -> 128
    a.emit(M::LH, 12, 5, 0, 0);   // 0xff80 -> -128
    a.emit(M::LHU, 13, 5, 0, 0);  // 0xff80 -> 65408
    a.emit(M::LW, 14, 5, 0, 0);   // 0x017fff80
    a.emit(M::LWU, 15, 5, 0, 4);  // 0xcdee8000
    a.emit(M::LD, 16, 5, 0, 0);
    a.halt();
    RunResult r = run_halting(a, {seg});
    CHECK(r.state.x[10] == u64(i64(-128)));
    CHECK(r.state.x[11] == 128);
    CHECK(r.state.x[12] == u64(i64(i16(0xff80))));
    CHECK(r.state.x[13] == 0xff80u);
    CHECK(r.state.x[14] == u64(i64(i32(0x017fff80))));
    CHECK(r.state.x[15] == 0xcdee8000ull);
    CHECK(r.state.x[16] == 0xcdee8000017fff80ull);
}

TEST_CASE("store width oracles against hand-built memory") {
    Assembler a(0x1000);
    a.li(5, 0x3000);
    a.li(10, i64(0xa1b2c3d4e5f60718ull));
    a.emit(M::SD, 0, 5, 10, 0);
    a.emit(M::SW, 0, 5, 10, 8);
    a.emit(M::SH, 0, 5, 10, 12);
    a.emit(M::SB, 0, 5, 10, 14);
    a.halt();
    RunResult r = run_halting(a);
    CHECK(r.state.mem.read(0x3000, 8) == 0xa1b2c3d4e5f60718ull);
    CHECK(r.state.mem.read(0x3008, 4) == 0xe5f60718ull);
    CHECK(r.state.mem.read(0x300c, 2) == 0x0718ull);
    CHECK(r.state.mem.read(0x300e, 1) == 0x18ull);

    // Independent oracle: rebuild the same bytes by hand and compare digests.
    SparseMemory ref;
    ref.write(0x3000, 8, 0xa1b2c3d4e5f60718ull);
    ref.write(0x3008, 4, 0xe5f60718ull);
    ref.write(0x300c, 2, 0x0718ull);
    ref.write(0x300e, 1, 0x18ull);
    CHECK(r.state.mem.digest_range(0x3000, 16) == ref.digest_range(0x3000, 16));

    // Store records carry address, width, and data.
    int stores = 0;
    for (const auto& rec : r.stream) {
        if (rec.is_store()) {
            stores++;
            CHECK(rec.mem_vaddr >= 0x3000);
            CHECK(rec.mem_bytes >= 1);
        }
    }
    CHECK(stores == 4);
    CHECK(store_digest(r.stream) != 0);
}

TEST_CASE("branch comparison semantics") {
    struct Case {
        M mn;
        u64 a, b;
        bool taken;
    };
    const Case cases[] = {
        {M::BEQ, 7, 7, true},        {M::BEQ, 7, 8, false},
        {M::BNE, 7, 8, true},        {M::BNE, 7, 7, false},
        {M::BLT, u64(-1), 1, true},  {M::BLT, 1, u64(-1), false},
        {M::BGE, 1, u64(-1), true},  {M::BGE, u64(-1), 1, false},
        {M::BGE, 5, 5, true},        {M::BLTU, 1, u64(-1), true},
        {M::BLTU, u64(-1), 1, false}, {M::BGEU, u64(-1), 1, true},
        {M::BGEU, 1, u64(-1), false},
    };
    for (const Case& c : cases) {
        CAPTURE(mnemonic_name(c.mn));
        CAPTURE(c.a);
        CAPTURE(c.b);
        Assembler a(0x1000);
        a.li(10, i64(c.a));
        a.li(11, i64(c.b));
        a.emit_branch(c.mn, 10, 11, "hit");
        a.li(12, 111);
        a.emit_jal(0, "end");
        a.label("hit");
        a.li(12, 222);
        a.label("end");
        a.halt();
        RunResult r = run_halting(a);
        CHECK(r.state.x[12] == (c.taken ? 222u : 111u));
        bool found = false;
        for (const auto& rec : r.stream) {
            if (rec.is_branch) {
                found = true;
                CHECK(rec.taken == c.taken);
                CHECK(rec.instr.mn == c.mn);
            }
        }
        CHECK(found);
    }
}

TEST_CASE("call/return classification and link registers") {
    Assembler a(0x1000);
    a.emit_jal(1, "func");  // call via ra
    a.label("after");
    a.li(10, 7);
    a.emit_jal(0, "tail");  // plain jump: not a call
    a.label("func");
    a.emit(M::ADDI, 11, 1, 0, 0);   // t? = ra (link value observable)
    a.emit(M::JALR, 0, 1, 0, 0);    // return
    a.label("tail");
    a.halt();
    RunResult r = run_halting(a);

    u64 after = a.label_addr("after");
    CHECK(r.state.x[11] == after);  // jal wrote pc+4 into ra
    CHECK(r.state.x[10] == 7);

    int calls = 0, returns = 0, plain_jumps = 0;
    for (const auto& rec : r.stream) {
        if (!rec.is_jump) continue;
        if (rec.is_call) {
            calls++;
            CHECK(rec.taken);
            CHECK(rec.instr.rd == 1);
        } else if (rec.is_return) {
            returns++;
            CHECK(rec.instr.mn == M::JALR);
            CHECK(rec.instr.rs1 == 1);
            CHECK(rec.instr.rd == 0);
            CHECK(rec.next_pc == after);
        } else {
            plain_jumps++;
        }
    }
    CHECK(calls == 1);
    CHECK(returns == 1);
    CHECK(plain_jumps == 1);

    // Alternate link register x5 also counts as a call.
    Assembler b(0x1000);
    b.emit_jal(5, "f");
    b.label("f");
    b.halt();
    RunResult rb = run_halting(b);
    CHECK(rb.stream[0].is_call);
}

TEST_CASE("memory copy loop reproduces the source block") {
    std::vector<u8> src_bytes;
    for (int i = 0; i < 64; i++) src_bytes.push_back(u8(i * 7 + 3));
    Assembler a(0x1000);
    a.li(5, 0x2000);  // src
    a.li(6, 0x3000);  // dst
    a.li(7, 8);       // 8 doublewords
    a.label("loop");
    a.emit(M::LD, 10, 5, 0, 0);
    a.emit(M::SD, 0, 6, 10, 0);
    a.emit(M::ADDI, 5, 5, 0, 8);
    a.emit(M::ADDI, 6, 6, 0, 8);
    a.emit(M::ADDI, 7, 7, 0, -1);
    a.emit_branch(M::BNE, 7, 0, "loop");
    a.halt();
    RunResult r = run_halting(a, {{0x2000, src_bytes}});
    CHECK(r.state.mem.digest_range(0x3000, 64) == r.state.mem.digest_range(0x2000, 64));
    for (int i = 0; i < 64; i++) CHECK(r.state.mem.read_u8(0x3000 + i) == src_bytes[size_t(i)]);
}

TEST_CASE("fp oracles incl. fused multiply-add") {
    const double A = 134217729.0;  // 2^27 + 1; A*A is not exactly representable
    const double B = A;
    const double C = -(A * B);  // host double rounding
    const double D = 1.5, E = 0.25;
    REQUIRE(std::fma(A, B, C) != A * B + C);  // fusedness is observable

    std::vector<u8> consts;
    push_f64(consts, A);
    push_f64(consts, B);
    push_f64(consts, C);
    push_f64(consts, D);
    push_f64(consts, E);

    Assembler a(0x1000);
    a.li(5, 0x2000);
    a.li(6, 0x3000);
    a.emit(M::FLD, 0, 5, 0, 0);   // fa? = f0..f4
    a.emit(M::FLD, 1, 5, 0, 8);
    a.emit(M::FLD, 2, 5, 0, 16);
    a.emit(M::FLD, 3, 5, 0, 24);
    a.emit(M::FLD, 4, 5, 0, 32);
    a.emit(M::FMADD_D, 10, 0, 1, 0, 2);   // f10 = fma(A, B, C); rs3 = f2
    a.emit(M::FADD_D, 11, 3, 4);          // 1.5 + 0.25
    a.emit(M::FSUB_D, 12, 3, 4);          // 1.5 - 0.25
    a.emit(M::FMUL_D, 13, 3, 4);          // 0.375
    a.emit(M::FDIV_D, 14, 3, 4);          // 6.0
    a.emit(M::FSD, 0, 6, 10, 0);
    a.emit(M::FSD, 0, 6, 11, 8);
    a.emit(M::FSD, 0, 6, 12, 16);
    a.emit(M::FSD, 0, 6, 13, 24);
    a.emit(M::FSD, 0, 6, 14, 32);
    a.li(10, 7);
    a.emit(M::FCVT_D_L, 15, 10);          // 7 -> 7.0
    a.emit(M::FMV_X_D, 11, 15);           // bits of 7.0 -> x11
    a.emit(M::FCVT_L_D, 12, 3);           // 1.5 -> rounds to nearest even = 2
    a.li(13, i64(0x3ff0000000000000ull)); // bits of 1.0
    a.emit(M::FMV_D_X, 16, 13);
    a.emit(M::FMV_X_D, 14, 16);
    a.halt();
    RunResult r = run_halting(a, {{0x2000, consts}});

    CHECK(r.state.mem.read(0x3000, 8) == std::bit_cast<u64>(std::fma(A, B, C)));
    CHECK(r.state.mem.read(0x3008, 8) == std::bit_cast<u64>(1.75));
    CHECK(r.state.mem.read(0x3010, 8) == std::bit_cast<u64>(1.25));
    CHECK(r.state.mem.read(0x3018, 8) == std::bit_cast<u64>(0.375));
    CHECK(r.state.mem.read(0x3020, 8) == std::bit_cast<u64>(6.0));
    CHECK(r.state.x[11] == std::bit_cast<u64>(7.0));
    CHECK(r.state.x[12] == 2);
    CHECK(r.state.x[14] == 0x3ff0000000000000ull);
}

TEST_CASE("halt, fault, and budget statuses") {
    {
        Assembler a(0x1000);
        a.li(10, 1);
        a.halt();
        RunResult r = run(make_prog(a));
        CHECK(r.status == RunStatus::Halted);
        CHECK(r.state.halted);
        CHECK(r.stream.back().instr.mn == M::ECALL);
        CHECK(r.stream.back().instr.fu == FuClass::SYSTEM);
    }
    {
        Assembler a(0x1000);
        a.li(17, 5);  // unsupported syscall number
        a.emit(M::ECALL);
        RunResult r = run(make_prog(a));
        CHECK(r.status == RunStatus::Fault);
        CHECK(r.diagnostic.find("ecall") != std::string::npos);
    }
    {
        Assembler a(0x1000);
        a.emit(M::EBREAK);
        RunResult r = run(make_prog(a));
        CHECK(r.status == RunStatus::Fault);
    }
    {
        Assembler a(0x1000);
        a.label("spin");
        a.emit_jal(0, "spin");
        RunResult r = run(make_prog(a), 50);
        CHECK(r.status == RunStatus::BudgetExceeded);
        CHECK(r.stream.size() == 50);
    }
    {
        Program p;
        p.base = 0x1000;
        p.code = {0, 0, 0, 0};  // all-zero word: illegal encoding
        p.entry = 0x1000;
        RunResult r = run(p);
        CHECK(r.status == RunStatus::Fault);
    }
}

TEST_CASE("instret csr reads the retired count") {
    Assembler a(0x1000);
    a.emit(M::ADDI, 1, 0, 0, 1);
    a.emit(M::ADDI, 2, 0, 0, 2);
    a.emit(M::CSRRS, 10, 0, 0, 0xC02);  // instret
    a.halt();
    RunResult r = run_halting(a);
    CHECK(r.state.x[10] == 2);

    // Unsupported CSR numbers fault.
    Assembler b(0x1000);
    b.emit(M::CSRRS, 10, 0, 0, 0x300);
    RunResult rb = run(make_prog(b));
    CHECK(rb.status == RunStatus::Fault);
}

TEST_CASE("stream sequencing invariants") {
    Assembler a(0x1000);
    a.li(5, 0x2000);
    a.li(7, 4);
    a.label("loop");
    a.emit(M::LD, 10, 5, 0, 0);
    a.emit(M::ADDI, 10, 10, 0, 1);
    a.emit(M::SD, 0, 5, 10, 0);
    a.emit(M::ADDI, 7, 7, 0, -1);
    a.emit_branch(M::BNE, 7, 0, "loop");
    a.halt();
    std::vector<u8> zeros(8, 0);
    RunResult r = run_halting(a, {{0x2000, zeros}});

    for (size_t i = 0; i < r.stream.size(); i++) {
        const RetireRecord& rec = r.stream[i];
        CHECK(rec.seq == i);
        if (i + 1 < r.stream.size()) CHECK(rec.next_pc == r.stream[i + 1].pc);
        bool ct = rec.is_control_transfer();
        if (!ct) CHECK(rec.next_pc == rec.pc + rec.instr.width);
        if (rec.is_jump) CHECK(rec.taken);  // jumps always redirect
        if (rec.is_branch) CHECK(rec.taken == (rec.next_pc != rec.pc + rec.instr.width));
        if (!ct) CHECK_FALSE(rec.taken);
        bool memclass = rec.instr.fu == FuClass::LOAD || rec.instr.fu == FuClass::STORE ||
                        rec.instr.fu == FuClass::FP_LOAD || rec.instr.fu == FuClass::FP_STORE;
        CHECK(rec.is_mem() == memclass);
        CHECK(rec.is_store() ==
              (rec.instr.fu == FuClass::STORE || rec.instr.fu == FuClass::FP_STORE));
    }
    CHECK(r.state.mem.read(0x2000, 8) == 4);  // incremented four times
}

TEST_CASE("digests: deterministic, order-sensitive") {
    Assembler a1(0x1000);
    a1.li(10, 123);
    a1.halt();
    Program p1 = make_prog(a1);

    RunResult ra = run(p1);
    RunResult rb = run(p1);
    CHECK(stream_digest(ra.stream) == stream_digest(rb.stream));
    CHECK(store_digest(ra.stream) == store_digest(rb.stream));

    Assembler a2(0x1000);
    a2.li(10, 124);
    a2.halt();
    RunResult rc = run(make_prog(a2));
    CHECK(stream_digest(ra.stream) != stream_digest(rc.stream));
}

TEST_CASE("flat binary dump/load round trip") {
    Assembler a(0x1000);
    a.li(10, 99);
    a.halt();
    Program p = make_prog(a);
    std::string text = dump_flat_binary_text(p);
    Program q = load_flat_binary_text(text);
    CHECK(q.base == p.base);
    CHECK(q.entry == p.entry);
    CHECK(q.code == p.code);
    RunResult r = run(q);
    REQUIRE(r.status == RunStatus::Halted);
    CHECK(r.state.x[10] == 99);

    // The format is a single code image: data segments are rejected.
    Assembler a2(0x1000);
    a2.halt();
    Program with_data = make_prog(a2, {{0x2000, {1, 2, 3, 4}}});
    CHECK_THROWS_AS(dump_flat_binary_text(with_data), SimError);

    CHECK_THROWS_AS(load_flat_binary_text("not a header\n"), SimError);
}

TEST_CASE("sparse memory primitives") {
    SparseMemory m;
    CHECK(m.read(0x5000, 8) == 0);  // untouched memory reads as zero
    m.write(0x5000, 8, 0x1122334455667788ull);
    CHECK(m.read(0x5000, 8) == 0x1122334455667788ull);
    CHECK(m.read(0x5004, 4) == 0x11223344ull);
    CHECK(m.read_u8(0x5007) == 0x11);
    // Cross-page write/read (page size 4096).
    m.write(0x5ffe, 4, 0xaabbccddull);
    CHECK(m.read(0x5ffe, 4) == 0xaabbccddull);
    CHECK(m.read_u8(0x6000) == 0xbb);  // little-endian: dd cc bb aa from 0x5ffe
    u64 d1 = m.digest_range(0x5000, 16);
    m.write_u8(0x5001, 0x99);
    CHECK(m.digest_range(0x5000, 16) != d1);
}
