#include "rvsim/golden.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <sstream>

namespace rvsim {

namespace {

u64 sext32(u32 v) { return u64(i64(i32(v))); }

u64 record_store_digest(u64 vaddr, u32 bytes, u64 data) {
    u64 s = vaddr ^ (u64(bytes) << 56) ^ (data * 0x9e3779b97f4a7c15ULL);
    return splitmix64(s);
}

i64 fcvt_l_d_sat(double v) {
    if (std::isnan(v)) return INT64_MAX;
    if (v >= 9223372036854775808.0) return INT64_MAX;
    if (v < -9223372036854775808.0) return INT64_MIN;
    return i64(std::nearbyint(v));
}

}  // namespace

const u8* SparseMemory::page_ro(u64 addr) const {
    auto it = pages_.find(addr / kPageBytes);
    return it == pages_.end() ? nullptr : it->second->data();
}

u8* SparseMemory::page_rw(u64 addr) {
    auto& p = pages_[addr / kPageBytes];
    if (!p) p = std::make_unique<std::array<u8, kPageBytes>>();
    return p->data();
}

u8 SparseMemory::read_u8(u64 addr) const {
    const u8* p = page_ro(addr);
    return p ? p[addr % kPageBytes] : 0;
}

void SparseMemory::write_u8(u64 addr, u8 v) { page_rw(addr)[addr % kPageBytes] = v; }

u64 SparseMemory::read(u64 addr, u32 bytes) const {
    u64 v = 0;
    for (u32 i = 0; i < bytes; ++i) v |= u64(read_u8(addr + i)) << (8 * i);
    return v;
}

void SparseMemory::write(u64 addr, u32 bytes, u64 v) {
    for (u32 i = 0; i < bytes; ++i) write_u8(addr + i, u8(v >> (8 * i)));
}

u64 SparseMemory::digest_range(u64 addr, u64 len) const {
    Digest d;
    for (u64 i = 0; i < len; ++i) d.feed(read_u8(addr + i));
    return d.value();
}

double ArchState::get_f(u8 r) const { return std::bit_cast<double>(f[r]); }
void ArchState::set_f(u8 r, double v) { f[r] = std::bit_cast<u64>(v); }

void Program::validate() const {
    struct Range {
        u64 lo, hi;
    };
    std::vector<Range> rs;
    if (!code.empty()) rs.push_back({base, base + code.size()});
    for (const auto& s : data)
        if (!s.bytes.empty()) rs.push_back({s.addr, s.addr + s.bytes.size()});
    std::sort(rs.begin(), rs.end(), [](const Range& a, const Range& b) { return a.lo < b.lo; });
    for (size_t i = 1; i < rs.size(); ++i)
        if (rs[i].lo < rs[i - 1].hi)
            throw SimError(ErrCode::ConfigError, "program segments overlap at 0x" + to_hex(rs[i].lo));
    if (entry < base || entry >= base + code.size())
        throw SimError(ErrCode::ConfigError, "entry 0x" + to_hex(entry) + " outside code");
}

const char* run_status_name(RunStatus s) {
    switch (s) {
        case RunStatus::Halted: return "halted";
        case RunStatus::BudgetExceeded: return "budget_exceeded";
        case RunStatus::Fault: return "fault";
    }
    return "?";
}

GoldenSim::GoldenSim(const Program& prog, IsaSubset subset) : subset_(subset) {
    subset_.validate();
    prog.validate();
    for (size_t i = 0; i < prog.code.size(); ++i) state_.mem.write_u8(prog.base + i, prog.code[i]);
    for (const auto& s : prog.data)
        for (size_t i = 0; i < s.bytes.size(); ++i) state_.mem.write_u8(s.addr + i, s.bytes[i]);
    state_.pc = prog.entry;
}

RetireRecord GoldenSim::step() {
    ArchState& st = state_;
    const u64 pc = st.pc;
    if (pc & 1) throw SimError(ErrCode::MisalignedAccess, "instruction fetch at 0x" + to_hex(pc));
    u32 raw = u32(st.mem.read(pc, 2));
    if ((raw & 3) == 3) raw |= u32(st.mem.read(pc + 2, 2)) << 16;

    Instr in;
    try {
        in = decode(raw, subset_);
    } catch (const SimError& e) {
        throw SimError(e.code(), std::string(e.what()) + " at pc=0x" + to_hex(pc));
    }

    RetireRecord r;
    r.seq = st.retired;
    r.pc = pc;
    r.instr = in;
    u64 next = pc + in.width;
    bool cond_taken = false;

    const u64 a = st.get_x(in.rs1);
    const u64 b = st.get_x(in.rs2);
    const double fa = st.get_f(in.rs1);
    const double fb = st.get_f(in.rs2);
    const double fc = st.get_f(in.rs3);

    auto load = [&](u32 bytes, bool sign) {
        u64 ea = a + u64(in.imm);
        if (bytes > 1 && (ea % bytes) != 0)
            throw SimError(ErrCode::MisalignedAccess,
                           std::string(mnemonic_name(in.mn)) + " at vaddr 0x" + to_hex(ea));
        u64 v = st.mem.read(ea, bytes);
        if (sign && bytes < 8) {
            int sh = 64 - 8 * int(bytes);
            v = u64((i64(v) << sh) >> sh);
        }
        r.mem_vaddr = ea;
        r.mem_bytes = bytes;
        return v;
    };
    auto store = [&](u32 bytes, u64 data) {
        u64 ea = a + u64(in.imm);
        if (bytes > 1 && (ea % bytes) != 0)
            throw SimError(ErrCode::MisalignedAccess,
                           std::string(mnemonic_name(in.mn)) + " at vaddr 0x" + to_hex(ea));
        if (bytes < 8) data &= (1ULL << (8 * bytes)) - 1;
        st.mem.write(ea, bytes, data);
        r.mem_vaddr = ea;
        r.mem_bytes = bytes;
        r.store_data = data;
        r.store_data_digest = record_store_digest(ea, bytes, data);
    };

    using M = Mnemonic;
    switch (in.mn) {
        case M::LUI: st.set_x(in.rd, u64(in.imm)); break;
        case M::AUIPC: st.set_x(in.rd, pc + u64(in.imm)); break;
        case M::JAL:
            st.set_x(in.rd, pc + in.width);
            next = pc + u64(in.imm);
            break;
        case M::JALR:
            st.set_x(in.rd, pc + in.width);
            next = (a + u64(in.imm)) & ~u64(1);
            break;
        case M::BEQ: cond_taken = a == b; goto branch;
        case M::BNE: cond_taken = a != b; goto branch;
        case M::BLT: cond_taken = i64(a) < i64(b); goto branch;
        case M::BGE: cond_taken = i64(a) >= i64(b); goto branch;
        case M::BLTU: cond_taken = a < b; goto branch;
        case M::BGEU:
            cond_taken = a >= b;
        branch:
            if (cond_taken) next = pc + u64(in.imm);
            break;
        case M::LB: st.set_x(in.rd, load(1, true)); break;
        case M::LH: st.set_x(in.rd, load(2, true)); break;
        case M::LW: st.set_x(in.rd, load(4, true)); break;
        case M::LD: st.set_x(in.rd, load(8, true)); break;
        case M::LBU: st.set_x(in.rd, load(1, false)); break;
        case M::LHU: st.set_x(in.rd, load(2, false)); break;
        case M::LWU: st.set_x(in.rd, load(4, false)); break;
        case M::SB: store(1, b); break;
        case M::SH: store(2, b); break;
        case M::SW: store(4, b); break;
        case M::SD: store(8, b); break;
        case M::ADDI: st.set_x(in.rd, a + u64(in.imm)); break;
        case M::SLTI: st.set_x(in.rd, i64(a) < in.imm ? 1 : 0); break;
        case M::SLTIU: st.set_x(in.rd, a < u64(in.imm) ? 1 : 0); break;
        case M::XORI: st.set_x(in.rd, a ^ u64(in.imm)); break;
        case M::ORI: st.set_x(in.rd, a | u64(in.imm)); break;
        case M::ANDI: st.set_x(in.rd, a & u64(in.imm)); break;
        case M::SLLI: st.set_x(in.rd, a << (in.imm & 63)); break;
        case M::SRLI: st.set_x(in.rd, a >> (in.imm & 63)); break;
        case M::SRAI: st.set_x(in.rd, u64(i64(a) >> (in.imm & 63))); break;
        case M::ADD: st.set_x(in.rd, a + b); break;
        case M::SUB: st.set_x(in.rd, a - b); break;
        case M::SLL: st.set_x(in.rd, a << (b & 63)); break;
        case M::SLT: st.set_x(in.rd, i64(a) < i64(b) ? 1 : 0); break;
        case M::SLTU: st.set_x(in.rd, a < b ? 1 : 0); break;
        case M::XOR: st.set_x(in.rd, a ^ b); break;
        case M::SRL: st.set_x(in.rd, a >> (b & 63)); break;
        case M::SRA: st.set_x(in.rd, u64(i64(a) >> (b & 63))); break;
        case M::OR: st.set_x(in.rd, a | b); break;
        case M::AND: st.set_x(in.rd, a & b); break;
        case M::ADDIW: st.set_x(in.rd, sext32(u32(a) + u32(in.imm))); break;
        case M::SLLIW: st.set_x(in.rd, sext32(u32(a) << (in.imm & 31))); break;
        case M::SRLIW: st.set_x(in.rd, sext32(u32(a) >> (in.imm & 31))); break;
        case M::SRAIW: st.set_x(in.rd, sext32(u32(i32(u32(a)) >> (in.imm & 31)))); break;
        case M::ADDW: st.set_x(in.rd, sext32(u32(a) + u32(b))); break;
        case M::SUBW: st.set_x(in.rd, sext32(u32(a) - u32(b))); break;
        case M::SLLW: st.set_x(in.rd, sext32(u32(a) << (b & 31))); break;
        case M::SRLW: st.set_x(in.rd, sext32(u32(a) >> (b & 31))); break;
        case M::SRAW: st.set_x(in.rd, sext32(u32(i32(u32(a)) >> (b & 31)))); break;
        case M::FENCE: break;
        case M::ECALL:
            if (st.get_x(17) == 0)
                st.halted = true;
            else
                throw SimError(ErrCode::IllegalInstruction,
                               "unsupported ecall a7=" + std::to_string(st.get_x(17)) +
                                   " at pc=0x" + to_hex(pc));
            break;
        case M::EBREAK:
            throw SimError(ErrCode::IllegalInstruction, "ebreak at pc=0x" + to_hex(pc));
        case M::CSRRS: {
            u64 csr = u64(in.imm);
            if ((csr != 0xC00 && csr != 0xC02) || in.rs1 != 0)
                throw SimError(ErrCode::IllegalInstruction,
                               "unsupported csr access 0x" + to_hex(csr) + " at pc=0x" + to_hex(pc));
            st.set_x(in.rd, st.retired);
            break;
        }
        case M::MUL: st.set_x(in.rd, a * b); break;
        case M::MULH:
            st.set_x(in.rd, u64((__int128(i64(a)) * __int128(i64(b))) >> 64));
            break;
        case M::MULHSU:
            st.set_x(in.rd, u64((__int128(i64(a)) * __int128(b)) >> 64));
            break;
        case M::MULHU:
            st.set_x(in.rd,
                     u64((static_cast<unsigned __int128>(a) * static_cast<unsigned __int128>(b)) >> 64));
            break;
        case M::DIV:
            st.set_x(in.rd, b == 0 ? u64(-1)
                            : (i64(a) == INT64_MIN && i64(b) == -1) ? u64(INT64_MIN)
                                                                    : u64(i64(a) / i64(b)));
            break;
        case M::DIVU: st.set_x(in.rd, b == 0 ? UINT64_MAX : a / b); break;
        case M::REM:
            st.set_x(in.rd, b == 0 ? a
                            : (i64(a) == INT64_MIN && i64(b) == -1) ? 0
                                                                    : u64(i64(a) % i64(b)));
            break;
        case M::REMU: st.set_x(in.rd, b == 0 ? a : a % b); break;
        case M::MULW: st.set_x(in.rd, sext32(u32(a) * u32(b))); break;
        case M::DIVW: {
            i32 ai = i32(u32(a)), bi = i32(u32(b));
            i32 q = bi == 0 ? -1 : (ai == INT32_MIN && bi == -1) ? INT32_MIN : ai / bi;
            st.set_x(in.rd, sext32(u32(q)));
            break;
        }
        case M::DIVUW: {
            u32 au = u32(a), bu = u32(b);
            st.set_x(in.rd, sext32(bu == 0 ? UINT32_MAX : au / bu));
            break;
        }
        case M::REMW: {
            i32 ai = i32(u32(a)), bi = i32(u32(b));
            i32 q = bi == 0 ? ai : (ai == INT32_MIN && bi == -1) ? 0 : ai % bi;
            st.set_x(in.rd, sext32(u32(q)));
            break;
        }
        case M::REMUW: {
            u32 au = u32(a), bu = u32(b);
            st.set_x(in.rd, sext32(bu == 0 ? au : au % bu));
            break;
        }
        case M::FLD: st.f[in.rd] = load(8, false); break;
        case M::FSD: store(8, st.f[in.rs2]); break;
        case M::FADD_D: st.set_f(in.rd, fa + fb); break;
        case M::FSUB_D: st.set_f(in.rd, fa - fb); break;
        case M::FMUL_D: st.set_f(in.rd, fa * fb); break;
        case M::FDIV_D: st.set_f(in.rd, fa / fb); break;
        case M::FMADD_D: st.set_f(in.rd, std::fma(fa, fb, fc)); break;
        case M::FMV_X_D: st.set_x(in.rd, st.f[in.rs1]); break;
        case M::FMV_D_X: st.f[in.rd] = a; break;
        case M::FCVT_D_L: st.set_f(in.rd, double(i64(a))); break;
        case M::FCVT_L_D: st.set_x(in.rd, u64(fcvt_l_d_sat(fa))); break;
        default:
            throw SimError(ErrCode::IllegalInstruction,
                           std::string("unexecutable mnemonic ") + mnemonic_name(in.mn));
    }

    r.next_pc = next;
    r.is_branch = is_cond_branch(in.mn);
    r.is_jump = is_jump(in.mn);
    r.is_call = r.is_jump && (in.rd == 1 || in.rd == 5);
    r.is_return = in.mn == M::JALR && (in.rs1 == 1 || in.rs1 == 5) && in.rd == 0;
    r.taken = r.is_jump || cond_taken;

    st.pc = next;
    st.retired += 1;
    return r;
}

RunResult run(const Program& prog, u64 max_instrs, IsaSubset subset) {
    RunResult res;
    GoldenSim sim(prog, subset);
    res.stream.reserve(std::min<u64>(max_instrs, 1 << 20));
    while (!sim.halted()) {
        if (sim.state().retired >= max_instrs) {
            res.status = RunStatus::BudgetExceeded;
            res.diagnostic = "instruction budget " + std::to_string(max_instrs) + " exhausted";
            res.state = std::move(sim.state());
            return res;
        }
        try {
            res.stream.push_back(sim.step());
        } catch (const SimError& e) {
            res.status = RunStatus::Fault;
            res.diagnostic = e.what();
            res.state = std::move(sim.state());
            return res;
        }
    }
    res.status = RunStatus::Halted;
    res.state = std::move(sim.state());
    return res;
}

u64 stream_digest(const std::vector<RetireRecord>& stream) {
    Digest d;
    for (const auto& r : stream) {
        d.feed(r.seq);
        d.feed(r.pc);
        d.feed(r.next_pc);
        d.feed(r.instr.raw);
        d.feed(u64(r.is_branch) | u64(r.is_jump) << 1 | u64(r.is_call) << 2 |
               u64(r.is_return) << 3 | u64(r.taken) << 4);
        d.feed(r.mem_vaddr);
        d.feed(r.mem_bytes);
        d.feed(r.store_data_digest);
    }
    return d.value();
}

u64 store_digest(const std::vector<RetireRecord>& stream) {
    Digest d;
    for (const auto& r : stream) {
        if (!r.is_store()) continue;
        d.feed(r.mem_vaddr);
        d.feed(r.mem_bytes);
        d.feed(r.store_data);
    }
    return d.value();
}

Program load_flat_binary_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    Program prog;
    bool header_seen = false;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        std::istringstream ls(line);
        std::string tok;
        while (ls >> tok) {
            if (!header_seen) {
                try {
                    if (tok.rfind("base=", 0) == 0) {
                        prog.base = std::stoull(tok.substr(5), nullptr, 16);
                        continue;
                    }
                    if (tok.rfind("entry=", 0) == 0) {
                        prog.entry = std::stoull(tok.substr(6), nullptr, 16);
                        header_seen = true;
                        continue;
                    }
                } catch (const std::exception&) {
                    throw SimError(ErrCode::ParseError,
                                   "line " + std::to_string(line_no) + ": bad hex in '" + tok + "'");
                }
                throw SimError(ErrCode::ParseError,
                               "line " + std::to_string(line_no) + ": expected base=/entry= header, got '" + tok + "'");
            }
            if (tok.size() != 2 || !std::isxdigit(u8(tok[0])) || !std::isxdigit(u8(tok[1])))
                throw SimError(ErrCode::ParseError,
                               "line " + std::to_string(line_no) + ": bad hex byte '" + tok + "'");
            prog.code.push_back(u8(std::stoul(tok, nullptr, 16)));
        }
    }
    if (!header_seen) throw SimError(ErrCode::ParseError, "missing base=/entry= header");
    prog.validate();
    return prog;
}

Program load_flat_binary_file(const std::string& path) {
    FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw SimError(ErrCode::ParseError, "cannot open " + path);
    std::string text;
    char buf[4096];
    size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, n);
    std::fclose(f);
    return load_flat_binary_text(text);
}

std::string dump_flat_binary_text(const Program& prog) {
    if (!prog.data.empty())
        throw SimError(ErrCode::ConfigError, "flat binary format holds a single code image");
    std::string out = "base=" + to_hex(prog.base) + " entry=" + to_hex(prog.entry) + "\n";
    char b[4];
    for (size_t i = 0; i < prog.code.size(); ++i) {
        std::snprintf(b, sizeof b, "%02x", prog.code[i]);
        out += b;
        out += (i % 16 == 15) ? '\n' : ' ';
    }
    if (!out.empty() && out.back() == ' ') out.back() = '\n';
    return out;
}

}  // namespace rvsim
