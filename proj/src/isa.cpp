#include "rvsim/isa.hpp"

#include <array>

namespace rvsim {

namespace {

constexpr std::array<const char*, kMnemonicCount> kNames = {
    "lui", "auipc", "jal", "jalr",
    "beq", "bne", "blt", "bge", "bltu", "bgeu",
    "lb", "lh", "lw", "ld", "lbu", "lhu", "lwu",
    "sb", "sh", "sw", "sd",
    "addi", "slti", "sltiu", "xori", "ori", "andi", "slli", "srli", "srai",
    "add", "sub", "sll", "slt", "sltu", "xor", "srl", "sra", "or", "and",
    "addiw", "slliw", "srliw", "sraiw",
    "addw", "subw", "sllw", "srlw", "sraw",
    "fence", "ecall", "ebreak",
    "mul", "mulh", "mulhsu", "mulhu", "div", "divu", "rem", "remu",
    "mulw", "divw", "divuw", "remw", "remuw",
    "csrrs",
    "fld", "fsd",
    "fadd.d", "fsub.d", "fmul.d", "fdiv.d", "fmadd.d",
    "fmv.x.d", "fmv.d.x", "fcvt.d.l", "fcvt.l.d",
    "c.addi", "c.li", "c.mv", "c.add",
    "c.lw", "c.ld", "c.sw", "c.sd",
    "c.beqz", "c.bnez", "c.j", "c.jr", "c.jalr",
};

i64 sext(u64 v, int bits) {
    return static_cast<i64>(v << (64 - bits)) >> (64 - bits);
}

u32 bits(u32 v, int hi, int lo) {
    return (v >> lo) & ((1u << (hi - lo + 1)) - 1);
}

[[noreturn]] void bad_encoding(u32 raw) {
    throw SimError(ErrCode::UnsupportedEncoding, "raw=0x" + to_hex(raw));
}

void check_reg(u32 r) {
    if (r > 31) throw SimError(ErrCode::OperandOutOfRange, "register index " + std::to_string(r));
}
void check_reg_prime(u32 r) {
    check_reg(r);
    if (r < 8 || r > 15)
        throw SimError(ErrCode::OperandOutOfRange, "compressed form needs x8-x15, got x" + std::to_string(r));
}
void check_imm_range(i64 imm, i64 lo, i64 hi, const char* what) {
    if (imm < lo || imm > hi)
        throw SimError(ErrCode::OperandOutOfRange, std::string(what) + " immediate " + std::to_string(imm));
}
void check_mult(i64 imm, i64 m, const char* what) {
    if (imm % m != 0)
        throw SimError(ErrCode::OperandOutOfRange,
                       std::string(what) + " immediate " + std::to_string(imm) + " not a multiple of " + std::to_string(m));
}

u32 enc_r(u32 f7, u8 rs2, u8 rs1, u32 f3, u8 rd, u32 op) {
    return (f7 << 25) | (u32(rs2) << 20) | (u32(rs1) << 15) | (f3 << 12) | (u32(rd) << 7) | op;
}
u32 enc_i(i64 imm, u8 rs1, u32 f3, u8 rd, u32 op) {
    return (u32(imm & 0xfff) << 20) | (u32(rs1) << 15) | (f3 << 12) | (u32(rd) << 7) | op;
}
u32 enc_s(i64 imm, u8 rs2, u8 rs1, u32 f3, u32 op) {
    u32 u = u32(imm & 0xfff);
    return (bits(u, 11, 5) << 25) | (u32(rs2) << 20) | (u32(rs1) << 15) | (f3 << 12) | (bits(u, 4, 0) << 7) | op;
}
u32 enc_b(i64 imm, u8 rs2, u8 rs1, u32 f3, u32 op) {
    u32 u = u32(imm & 0x1fff);
    return (bits(u, 12, 12) << 31) | (bits(u, 10, 5) << 25) | (u32(rs2) << 20) | (u32(rs1) << 15) |
           (f3 << 12) | (bits(u, 4, 1) << 8) | (bits(u, 11, 11) << 7) | op;
}
u32 enc_u(i64 imm, u8 rd, u32 op) {
    return (u32(imm) & 0xfffff000u) | (u32(rd) << 7) | op;
}
u32 enc_j(i64 imm, u8 rd, u32 op) {
    u32 u = u32(imm & 0x1fffff);
    return (bits(u, 20, 20) << 31) | (bits(u, 10, 1) << 21) | (bits(u, 11, 11) << 20) |
           (bits(u, 19, 12) << 12) | (u32(rd) << 7) | op;
}

Instr make(u32 raw, Mnemonic mn, u8 rd, u8 rs1, u8 rs2, i64 imm, u8 width, u8 rs3 = 0) {
    Instr in;
    in.raw = raw;
    in.mn = mn;
    in.rd = rd;
    in.rs1 = rs1;
    in.rs2 = rs2;
    in.rs3 = rs3;
    in.imm = imm;
    in.fu = classify(mn);
    in.width = width;
    in.is_compressed = width == 2;
    return in;
}

Instr decode16(u32 raw16, const IsaSubset& subset) {
    u32 raw = raw16 & 0xffff;
    if (raw == 0) throw SimError(ErrCode::IllegalInstruction, "all-zero instruction word");
    if (!subset.c) bad_encoding(raw);
    u32 quad = raw & 3;
    u32 f3 = bits(raw, 15, 13);
    if (quad == 0) {
        u8 rs1p = u8(bits(raw, 9, 7) + 8);
        u8 rxp = u8(bits(raw, 4, 2) + 8);
        if (f3 == 2) {  // c.lw
            i64 imm = i64((bits(raw, 12, 10) << 3) | (bits(raw, 6, 6) << 2) | (bits(raw, 5, 5) << 6));
            return make(raw, Mnemonic::LW, rxp, rs1p, 0, imm, 2);
        }
        if (f3 == 3) {  // c.ld
            i64 imm = i64((bits(raw, 12, 10) << 3) | (bits(raw, 6, 5) << 6));
            return make(raw, Mnemonic::LD, rxp, rs1p, 0, imm, 2);
        }
        if (f3 == 6) {  // c.sw
            i64 imm = i64((bits(raw, 12, 10) << 3) | (bits(raw, 6, 6) << 2) | (bits(raw, 5, 5) << 6));
            return make(raw, Mnemonic::SW, 0, rs1p, rxp, imm, 2);
        }
        if (f3 == 7) {  // c.sd
            i64 imm = i64((bits(raw, 12, 10) << 3) | (bits(raw, 6, 5) << 6));
            return make(raw, Mnemonic::SD, 0, rs1p, rxp, imm, 2);
        }
        bad_encoding(raw);
    }
    if (quad == 1) {
        if (f3 == 0) {  // c.addi (c.nop when rd=0, imm=0)
            u8 rd = u8(bits(raw, 11, 7));
            i64 imm = sext((bits(raw, 12, 12) << 5) | bits(raw, 6, 2), 6);
            return make(raw, Mnemonic::ADDI, rd, rd, 0, imm, 2);
        }
        if (f3 == 2) {  // c.li
            u8 rd = u8(bits(raw, 11, 7));
            i64 imm = sext((bits(raw, 12, 12) << 5) | bits(raw, 6, 2), 6);
            return make(raw, Mnemonic::ADDI, rd, 0, 0, imm, 2);
        }
        if (f3 == 5) {  // c.j
            u64 imm = (u64(bits(raw, 12, 12)) << 11) | (u64(bits(raw, 8, 8)) << 10) |
                      (u64(bits(raw, 10, 9)) << 8) | (u64(bits(raw, 6, 6)) << 7) |
                      (u64(bits(raw, 7, 7)) << 6) | (u64(bits(raw, 2, 2)) << 5) |
                      (u64(bits(raw, 11, 11)) << 4) | (u64(bits(raw, 5, 3)) << 1);
            return make(raw, Mnemonic::JAL, 0, 0, 0, sext(imm, 12), 2);
        }
        if (f3 == 6 || f3 == 7) {  // c.beqz / c.bnez
            u8 rs1p = u8(bits(raw, 9, 7) + 8);
            u64 imm = (u64(bits(raw, 12, 12)) << 8) | (u64(bits(raw, 6, 5)) << 6) |
                      (u64(bits(raw, 2, 2)) << 5) | (u64(bits(raw, 11, 10)) << 3) |
                      (u64(bits(raw, 4, 3)) << 1);
            return make(raw, f3 == 6 ? Mnemonic::BEQ : Mnemonic::BNE, 0, rs1p, 0, sext(imm, 9), 2);
        }
        bad_encoding(raw);
    }
    // quad == 2
    if (f3 == 4) {
        u8 rd = u8(bits(raw, 11, 7));
        u8 rs2 = u8(bits(raw, 6, 2));
        bool hi = bits(raw, 12, 12) != 0;
        if (!hi && rs2 == 0 && rd != 0) return make(raw, Mnemonic::JALR, 0, rd, 0, 0, 2);   // c.jr
        if (!hi && rs2 != 0 && rd != 0) return make(raw, Mnemonic::ADD, rd, 0, rs2, 0, 2);  // c.mv
        if (hi && rs2 == 0 && rd != 0) return make(raw, Mnemonic::JALR, 1, rd, 0, 0, 2);    // c.jalr
        if (hi && rs2 != 0 && rd != 0) return make(raw, Mnemonic::ADD, rd, rd, rs2, 0, 2);  // c.add
    }
    bad_encoding(raw);
}

Instr decode32(u32 raw, const IsaSubset& subset) {
    u32 op = raw & 0x7f;
    u8 rd = u8(bits(raw, 11, 7));
    u8 rs1 = u8(bits(raw, 19, 15));
    u8 rs2 = u8(bits(raw, 24, 20));
    u32 f3 = bits(raw, 14, 12);
    u32 f7 = bits(raw, 31, 25);
    i64 imm_i = sext(bits(raw, 31, 20), 12);
    auto need_m = [&] { if (!subset.m) bad_encoding(raw); };
    auto need_d = [&] { if (!subset.d) bad_encoding(raw); };

    switch (op) {
        case 0x37: return make(raw, Mnemonic::LUI, rd, 0, 0, i64(i32(raw & 0xfffff000u)), 4);
        case 0x17: return make(raw, Mnemonic::AUIPC, rd, 0, 0, i64(i32(raw & 0xfffff000u)), 4);
        case 0x6f: {
            u64 imm = (u64(bits(raw, 31, 31)) << 20) | (u64(bits(raw, 19, 12)) << 12) |
                      (u64(bits(raw, 20, 20)) << 11) | (u64(bits(raw, 30, 21)) << 1);
            return make(raw, Mnemonic::JAL, rd, 0, 0, sext(imm, 21), 4);
        }
        case 0x67:
            if (f3 != 0) bad_encoding(raw);
            return make(raw, Mnemonic::JALR, rd, rs1, 0, imm_i, 4);
        case 0x63: {
            u64 imm = (u64(bits(raw, 31, 31)) << 12) | (u64(bits(raw, 7, 7)) << 11) |
                      (u64(bits(raw, 30, 25)) << 5) | (u64(bits(raw, 11, 8)) << 1);
            i64 simm = sext(imm, 13);
            static constexpr Mnemonic kBr[8] = {Mnemonic::BEQ,  Mnemonic::BNE,  Mnemonic::BEQ, Mnemonic::BEQ,
                                                Mnemonic::BLT,  Mnemonic::BGE,  Mnemonic::BLTU, Mnemonic::BGEU};
            if (f3 == 2 || f3 == 3) bad_encoding(raw);
            return make(raw, kBr[f3], 0, rs1, rs2, simm, 4);
        }
        case 0x03: {
            static constexpr Mnemonic kLd[8] = {Mnemonic::LB,  Mnemonic::LH,  Mnemonic::LW, Mnemonic::LD,
                                                Mnemonic::LBU, Mnemonic::LHU, Mnemonic::LWU, Mnemonic::LB};
            if (f3 == 7) bad_encoding(raw);
            return make(raw, kLd[f3], rd, rs1, 0, imm_i, 4);
        }
        case 0x23: {
            i64 imm = sext((bits(raw, 31, 25) << 5) | bits(raw, 11, 7), 12);
            static constexpr Mnemonic kSt[4] = {Mnemonic::SB, Mnemonic::SH, Mnemonic::SW, Mnemonic::SD};
            if (f3 > 3) bad_encoding(raw);
            return make(raw, kSt[f3], 0, rs1, rs2, imm, 4);
        }
        case 0x13:
            switch (f3) {
                case 0: return make(raw, Mnemonic::ADDI, rd, rs1, 0, imm_i, 4);
                case 2: return make(raw, Mnemonic::SLTI, rd, rs1, 0, imm_i, 4);
                case 3: return make(raw, Mnemonic::SLTIU, rd, rs1, 0, imm_i, 4);
                case 4: return make(raw, Mnemonic::XORI, rd, rs1, 0, imm_i, 4);
                case 6: return make(raw, Mnemonic::ORI, rd, rs1, 0, imm_i, 4);
                case 7: return make(raw, Mnemonic::ANDI, rd, rs1, 0, imm_i, 4);
                case 1:
                    if (bits(raw, 31, 26) != 0) bad_encoding(raw);
                    return make(raw, Mnemonic::SLLI, rd, rs1, 0, i64(bits(raw, 25, 20)), 4);
                case 5:
                    if (bits(raw, 31, 26) == 0) return make(raw, Mnemonic::SRLI, rd, rs1, 0, i64(bits(raw, 25, 20)), 4);
                    if (bits(raw, 31, 26) == 0x10) return make(raw, Mnemonic::SRAI, rd, rs1, 0, i64(bits(raw, 25, 20)), 4);
                    bad_encoding(raw);
            }
            bad_encoding(raw);
        case 0x1b:
            switch (f3) {
                case 0: return make(raw, Mnemonic::ADDIW, rd, rs1, 0, imm_i, 4);
                case 1:
                    if (f7 != 0) bad_encoding(raw);
                    return make(raw, Mnemonic::SLLIW, rd, rs1, 0, i64(rs2), 4);
                case 5:
                    if (f7 == 0) return make(raw, Mnemonic::SRLIW, rd, rs1, 0, i64(rs2), 4);
                    if (f7 == 0x20) return make(raw, Mnemonic::SRAIW, rd, rs1, 0, i64(rs2), 4);
                    bad_encoding(raw);
            }
            bad_encoding(raw);
        case 0x33:
            if (f7 == 0x01) {
                need_m();
                static constexpr Mnemonic kM[8] = {Mnemonic::MUL,  Mnemonic::MULH, Mnemonic::MULHSU, Mnemonic::MULHU,
                                                   Mnemonic::DIV,  Mnemonic::DIVU, Mnemonic::REM,    Mnemonic::REMU};
                return make(raw, kM[f3], rd, rs1, rs2, 0, 4);
            }
            if (f7 == 0x00) {
                static constexpr Mnemonic kR[8] = {Mnemonic::ADD, Mnemonic::SLL, Mnemonic::SLT, Mnemonic::SLTU,
                                                   Mnemonic::XOR, Mnemonic::SRL, Mnemonic::OR,  Mnemonic::AND};
                return make(raw, kR[f3], rd, rs1, rs2, 0, 4);
            }
            if (f7 == 0x20) {
                if (f3 == 0) return make(raw, Mnemonic::SUB, rd, rs1, rs2, 0, 4);
                if (f3 == 5) return make(raw, Mnemonic::SRA, rd, rs1, rs2, 0, 4);
            }
            bad_encoding(raw);
        case 0x3b:
            if (f7 == 0x01) {
                need_m();
                switch (f3) {
                    case 0: return make(raw, Mnemonic::MULW, rd, rs1, rs2, 0, 4);
                    case 4: return make(raw, Mnemonic::DIVW, rd, rs1, rs2, 0, 4);
                    case 5: return make(raw, Mnemonic::DIVUW, rd, rs1, rs2, 0, 4);
                    case 6: return make(raw, Mnemonic::REMW, rd, rs1, rs2, 0, 4);
                    case 7: return make(raw, Mnemonic::REMUW, rd, rs1, rs2, 0, 4);
                }
                bad_encoding(raw);
            }
            if (f7 == 0x00) {
                switch (f3) {
                    case 0: return make(raw, Mnemonic::ADDW, rd, rs1, rs2, 0, 4);
                    case 1: return make(raw, Mnemonic::SLLW, rd, rs1, rs2, 0, 4);
                    case 5: return make(raw, Mnemonic::SRLW, rd, rs1, rs2, 0, 4);
                }
                bad_encoding(raw);
            }
            if (f7 == 0x20) {
                if (f3 == 0) return make(raw, Mnemonic::SUBW, rd, rs1, rs2, 0, 4);
                if (f3 == 5) return make(raw, Mnemonic::SRAW, rd, rs1, rs2, 0, 4);
            }
            bad_encoding(raw);
        case 0x0f:
            if (f3 == 0) return make(raw, Mnemonic::FENCE, 0, 0, 0, 0, 4);
            bad_encoding(raw);
        case 0x73:
            if (raw == 0x00000073) {
                // Halt convention inspects x17; surface that as an rs1 read.
                return make(raw, Mnemonic::ECALL, 0, 17, 0, 0, 4);
            }
            if (raw == 0x00100073) return make(raw, Mnemonic::EBREAK, 0, 0, 0, 0, 4);
            if (f3 == 2) return make(raw, Mnemonic::CSRRS, rd, rs1, 0, i64(bits(raw, 31, 20)), 4);
            bad_encoding(raw);
        case 0x07:
            need_d();
            if (f3 == 3) return make(raw, Mnemonic::FLD, rd, rs1, 0, imm_i, 4);
            bad_encoding(raw);
        case 0x27:
            need_d();
            if (f3 == 3) {
                i64 imm = sext((bits(raw, 31, 25) << 5) | bits(raw, 11, 7), 12);
                return make(raw, Mnemonic::FSD, 0, rs1, rs2, imm, 4);
            }
            bad_encoding(raw);
        case 0x43:
            need_d();
            if (bits(raw, 26, 25) != 1) bad_encoding(raw);
            return make(raw, Mnemonic::FMADD_D, rd, rs1, rs2, 0, 4, u8(bits(raw, 31, 27)));
        case 0x53: {
            need_d();
            switch (f7) {
                case 0x01: return make(raw, Mnemonic::FADD_D, rd, rs1, rs2, 0, 4);
                case 0x05: return make(raw, Mnemonic::FSUB_D, rd, rs1, rs2, 0, 4);
                case 0x09: return make(raw, Mnemonic::FMUL_D, rd, rs1, rs2, 0, 4);
                case 0x0d: return make(raw, Mnemonic::FDIV_D, rd, rs1, rs2, 0, 4);
                case 0x71:
                    if (rs2 == 0 && f3 == 0) return make(raw, Mnemonic::FMV_X_D, rd, rs1, 0, 0, 4);
                    bad_encoding(raw);
                case 0x79:
                    if (rs2 == 0 && f3 == 0) return make(raw, Mnemonic::FMV_D_X, rd, rs1, 0, 0, 4);
                    bad_encoding(raw);
                case 0x61:
                    if (rs2 == 2) return make(raw, Mnemonic::FCVT_L_D, rd, rs1, 0, 0, 4);
                    bad_encoding(raw);
                case 0x69:
                    if (rs2 == 2) return make(raw, Mnemonic::FCVT_D_L, rd, rs1, 0, 0, 4);
                    bad_encoding(raw);
            }
            bad_encoding(raw);
        }
    }
    bad_encoding(raw);
}

}  // namespace

const char* fu_class_name(FuClass c) {
    static constexpr const char* kFu[kFuClassCount] = {
        "alu", "mul", "div", "bru", "load", "store",
        "fp_alu", "fp_mul", "fp_div", "fp_load", "fp_store", "csr", "system"};
    return kFu[static_cast<int>(c)];
}

const char* mnemonic_name(Mnemonic m) { return kNames[static_cast<int>(m)]; }

Mnemonic mnemonic_from_name(const std::string& name) {
    for (int i = 0; i < kMnemonicCount; ++i)
        if (name == kNames[i]) return static_cast<Mnemonic>(i);
    throw SimError(ErrCode::UnsupportedMnemonic, name);
}

FuClass classify(Mnemonic m) {
    using M = Mnemonic;
    switch (m) {
        case M::JAL: case M::JALR:
        case M::BEQ: case M::BNE: case M::BLT: case M::BGE: case M::BLTU: case M::BGEU:
        case M::C_BEQZ: case M::C_BNEZ: case M::C_J: case M::C_JR: case M::C_JALR:
            return FuClass::BRU;
        case M::LB: case M::LH: case M::LW: case M::LD: case M::LBU: case M::LHU: case M::LWU:
        case M::C_LW: case M::C_LD:
            return FuClass::LOAD;
        case M::SB: case M::SH: case M::SW: case M::SD:
        case M::C_SW: case M::C_SD:
            return FuClass::STORE;
        case M::MUL: case M::MULH: case M::MULHSU: case M::MULHU: case M::MULW:
            return FuClass::MUL;
        case M::DIV: case M::DIVU: case M::REM: case M::REMU:
        case M::DIVW: case M::DIVUW: case M::REMW: case M::REMUW:
            return FuClass::DIV;
        case M::CSRRS:
            return FuClass::CSR;
        case M::FENCE: case M::ECALL: case M::EBREAK:
            return FuClass::SYSTEM;
        case M::FLD:
            return FuClass::FP_LOAD;
        case M::FSD:
            return FuClass::FP_STORE;
        case M::FADD_D: case M::FSUB_D: case M::FMV_X_D: case M::FMV_D_X:
        case M::FCVT_D_L: case M::FCVT_L_D:
            return FuClass::FP_ALU;
        case M::FMUL_D: case M::FMADD_D:
            return FuClass::FP_MUL;
        case M::FDIV_D:
            return FuClass::FP_DIV;
        default:
            return FuClass::ALU;
    }
}

bool is_cond_branch(Mnemonic m) {
    using M = Mnemonic;
    switch (m) {
        case M::BEQ: case M::BNE: case M::BLT: case M::BGE: case M::BLTU: case M::BGEU:
        case M::C_BEQZ: case M::C_BNEZ:
            return true;
        default:
            return false;
    }
}

bool is_jump(Mnemonic m) {
    using M = Mnemonic;
    switch (m) {
        case M::JAL: case M::JALR: case M::C_J: case M::C_JR: case M::C_JALR:
            return true;
        default:
            return false;
    }
}

OperandUse operand_use(Mnemonic m) {
    using M = Mnemonic;
    OperandUse u;
    switch (m) {
        case M::LUI: case M::AUIPC: case M::C_LI:
            u.writes_rd = true;
            break;
        case M::JAL: case M::C_J:
            u.writes_rd = true;
            break;
        case M::JALR: case M::C_JR: case M::C_JALR:
            u.reads_rs1 = true;
            u.writes_rd = true;
            break;
        case M::BEQ: case M::BNE: case M::BLT: case M::BGE: case M::BLTU: case M::BGEU:
            u.reads_rs1 = u.reads_rs2 = true;
            break;
        case M::C_BEQZ: case M::C_BNEZ:
            u.reads_rs1 = true;
            break;
        case M::LB: case M::LH: case M::LW: case M::LD: case M::LBU: case M::LHU: case M::LWU:
        case M::C_LW: case M::C_LD:
            u.reads_rs1 = true;
            u.writes_rd = true;
            break;
        case M::SB: case M::SH: case M::SW: case M::SD: case M::C_SW: case M::C_SD:
            u.reads_rs1 = u.reads_rs2 = true;
            break;
        case M::ADDI: case M::SLTI: case M::SLTIU: case M::XORI: case M::ORI: case M::ANDI:
        case M::SLLI: case M::SRLI: case M::SRAI:
        case M::ADDIW: case M::SLLIW: case M::SRLIW: case M::SRAIW:
        case M::C_ADDI:
            u.reads_rs1 = true;
            u.writes_rd = true;
            break;
        case M::ADD: case M::SUB: case M::SLL: case M::SLT: case M::SLTU: case M::XOR:
        case M::SRL: case M::SRA: case M::OR: case M::AND:
        case M::ADDW: case M::SUBW: case M::SLLW: case M::SRLW: case M::SRAW:
        case M::MUL: case M::MULH: case M::MULHSU: case M::MULHU:
        case M::DIV: case M::DIVU: case M::REM: case M::REMU:
        case M::MULW: case M::DIVW: case M::DIVUW: case M::REMW: case M::REMUW:
        case M::C_ADD:
            u.reads_rs1 = u.reads_rs2 = true;
            u.writes_rd = true;
            break;
        case M::C_MV:
            u.reads_rs2 = true;
            u.writes_rd = true;
            break;
        case M::FENCE: case M::EBREAK:
            break;
        case M::ECALL:
            u.reads_rs1 = true;  // the halt convention inspects x17 (decode sets rs1=17)
            break;
        case M::CSRRS:
            u.reads_rs1 = true;
            u.writes_rd = true;
            break;
        case M::FLD:
            u.reads_rs1 = true;
            u.writes_rd = true;
            u.rd_fp = true;
            break;
        case M::FSD:
            u.reads_rs1 = u.reads_rs2 = true;
            u.rs2_fp = true;
            break;
        case M::FADD_D: case M::FSUB_D: case M::FMUL_D: case M::FDIV_D:
            u.reads_rs1 = u.reads_rs2 = true;
            u.rs1_fp = u.rs2_fp = true;
            u.writes_rd = true;
            u.rd_fp = true;
            break;
        case M::FMADD_D:
            u.reads_rs1 = u.reads_rs2 = u.reads_rs3 = true;
            u.rs1_fp = u.rs2_fp = u.rs3_fp = true;
            u.writes_rd = true;
            u.rd_fp = true;
            break;
        case M::FMV_X_D:
            u.reads_rs1 = true;
            u.rs1_fp = true;
            u.writes_rd = true;
            break;
        case M::FMV_D_X:
            u.reads_rs1 = true;
            u.writes_rd = true;
            u.rd_fp = true;
            break;
        case M::FCVT_D_L:
            u.reads_rs1 = true;
            u.writes_rd = true;
            u.rd_fp = true;
            break;
        case M::FCVT_L_D:
            u.reads_rs1 = true;
            u.rs1_fp = true;
            u.writes_rd = true;
            break;
        case M::COUNT_:
            break;
    }
    return u;
}

Instr decode(u32 raw, const IsaSubset& subset) {
    if ((raw & 3) != 3) return decode16(raw, subset);
    return decode32(raw, subset);
}

u32 encode(const AsmInst& d) {
    using M = Mnemonic;
    check_reg(d.rd);
    check_reg(d.rs1);
    check_reg(d.rs2);
    check_reg(d.rs3);
    switch (d.mn) {
        case M::LUI:
        case M::AUIPC:
            // imm is the full sign-extended 32-bit value the instruction produces.
            check_mult(d.imm, 0x1000, "U-type");
            check_imm_range(d.imm, INT32_MIN, INT32_MAX, "U-type");
            return enc_u(d.imm, d.rd, d.mn == M::LUI ? 0x37 : 0x17);
        case M::JAL:
            check_mult(d.imm, 2, "jal");
            check_imm_range(d.imm, -(1ll << 20), (1ll << 20) - 2, "jal");
            return enc_j(d.imm, d.rd, 0x6f);
        case M::JALR:
            check_imm_range(d.imm, -2048, 2047, "jalr");
            return enc_i(d.imm, d.rs1, 0, d.rd, 0x67);
        case M::BEQ: case M::BNE: case M::BLT: case M::BGE: case M::BLTU: case M::BGEU: {
            check_mult(d.imm, 2, "branch");
            check_imm_range(d.imm, -4096, 4094, "branch");
            static constexpr u32 kF3[] = {0, 1, 4, 5, 6, 7};
            u32 f3 = kF3[int(d.mn) - int(M::BEQ)];
            return enc_b(d.imm, d.rs2, d.rs1, f3, 0x63);
        }
        case M::LB: case M::LH: case M::LW: case M::LD: case M::LBU: case M::LHU: case M::LWU: {
            check_imm_range(d.imm, -2048, 2047, "load");
            static constexpr u32 kF3[] = {0, 1, 2, 3, 4, 5, 6};
            return enc_i(d.imm, d.rs1, kF3[int(d.mn) - int(M::LB)], d.rd, 0x03);
        }
        case M::SB: case M::SH: case M::SW: case M::SD:
            check_imm_range(d.imm, -2048, 2047, "store");
            return enc_s(d.imm, d.rs2, d.rs1, u32(int(d.mn) - int(M::SB)), 0x23);
        case M::ADDI: case M::SLTI: case M::SLTIU: case M::XORI: case M::ORI: case M::ANDI: {
            check_imm_range(d.imm, -2048, 2047, "I-type");
            static constexpr u32 kF3[] = {0, 2, 3, 4, 6, 7};
            return enc_i(d.imm, d.rs1, kF3[int(d.mn) - int(M::ADDI)], d.rd, 0x13);
        }
        case M::SLLI:
            check_imm_range(d.imm, 0, 63, "shamt");
            return enc_i(d.imm, d.rs1, 1, d.rd, 0x13);
        case M::SRLI:
            check_imm_range(d.imm, 0, 63, "shamt");
            return enc_i(d.imm, d.rs1, 5, d.rd, 0x13);
        case M::SRAI:
            check_imm_range(d.imm, 0, 63, "shamt");
            return enc_i(d.imm | 0x400, d.rs1, 5, d.rd, 0x13);
        case M::ADDIW:
            check_imm_range(d.imm, -2048, 2047, "addiw");
            return enc_i(d.imm, d.rs1, 0, d.rd, 0x1b);
        case M::SLLIW:
            check_imm_range(d.imm, 0, 31, "shamt");
            return enc_i(d.imm, d.rs1, 1, d.rd, 0x1b);
        case M::SRLIW:
            check_imm_range(d.imm, 0, 31, "shamt");
            return enc_i(d.imm, d.rs1, 5, d.rd, 0x1b);
        case M::SRAIW:
            check_imm_range(d.imm, 0, 31, "shamt");
            return enc_i(d.imm | 0x400, d.rs1, 5, d.rd, 0x1b);
        case M::ADD:  return enc_r(0x00, d.rs2, d.rs1, 0, d.rd, 0x33);
        case M::SUB:  return enc_r(0x20, d.rs2, d.rs1, 0, d.rd, 0x33);
        case M::SLL:  return enc_r(0x00, d.rs2, d.rs1, 1, d.rd, 0x33);
        case M::SLT:  return enc_r(0x00, d.rs2, d.rs1, 2, d.rd, 0x33);
        case M::SLTU: return enc_r(0x00, d.rs2, d.rs1, 3, d.rd, 0x33);
        case M::XOR:  return enc_r(0x00, d.rs2, d.rs1, 4, d.rd, 0x33);
        case M::SRL:  return enc_r(0x00, d.rs2, d.rs1, 5, d.rd, 0x33);
        case M::SRA:  return enc_r(0x20, d.rs2, d.rs1, 5, d.rd, 0x33);
        case M::OR:   return enc_r(0x00, d.rs2, d.rs1, 6, d.rd, 0x33);
        case M::AND:  return enc_r(0x00, d.rs2, d.rs1, 7, d.rd, 0x33);
        case M::ADDW: return enc_r(0x00, d.rs2, d.rs1, 0, d.rd, 0x3b);
        case M::SUBW: return enc_r(0x20, d.rs2, d.rs1, 0, d.rd, 0x3b);
        case M::SLLW: return enc_r(0x00, d.rs2, d.rs1, 1, d.rd, 0x3b);
        case M::SRLW: return enc_r(0x00, d.rs2, d.rs1, 5, d.rd, 0x3b);
        case M::SRAW: return enc_r(0x20, d.rs2, d.rs1, 5, d.rd, 0x3b);
        case M::FENCE: return 0x0000000f;
        case M::ECALL: return 0x00000073;
        case M::EBREAK: return 0x00100073;
        case M::MUL:    return enc_r(0x01, d.rs2, d.rs1, 0, d.rd, 0x33);
        case M::MULH:   return enc_r(0x01, d.rs2, d.rs1, 1, d.rd, 0x33);
        case M::MULHSU: return enc_r(0x01, d.rs2, d.rs1, 2, d.rd, 0x33);
        case M::MULHU:  return enc_r(0x01, d.rs2, d.rs1, 3, d.rd, 0x33);
        case M::DIV:    return enc_r(0x01, d.rs2, d.rs1, 4, d.rd, 0x33);
        case M::DIVU:   return enc_r(0x01, d.rs2, d.rs1, 5, d.rd, 0x33);
        case M::REM:    return enc_r(0x01, d.rs2, d.rs1, 6, d.rd, 0x33);
        case M::REMU:   return enc_r(0x01, d.rs2, d.rs1, 7, d.rd, 0x33);
        case M::MULW:   return enc_r(0x01, d.rs2, d.rs1, 0, d.rd, 0x3b);
        case M::DIVW:   return enc_r(0x01, d.rs2, d.rs1, 4, d.rd, 0x3b);
        case M::DIVUW:  return enc_r(0x01, d.rs2, d.rs1, 5, d.rd, 0x3b);
        case M::REMW:   return enc_r(0x01, d.rs2, d.rs1, 6, d.rd, 0x3b);
        case M::REMUW:  return enc_r(0x01, d.rs2, d.rs1, 7, d.rd, 0x3b);
        case M::CSRRS:
            check_imm_range(d.imm, 0, 4095, "csr");
            return enc_i(d.imm, d.rs1, 2, d.rd, 0x73);
        case M::FLD:
            check_imm_range(d.imm, -2048, 2047, "fld");
            return enc_i(d.imm, d.rs1, 3, d.rd, 0x07);
        case M::FSD:
            check_imm_range(d.imm, -2048, 2047, "fsd");
            return enc_s(d.imm, d.rs2, d.rs1, 3, 0x27);
        case M::FADD_D: return enc_r(0x01, d.rs2, d.rs1, 0, d.rd, 0x53);
        case M::FSUB_D: return enc_r(0x05, d.rs2, d.rs1, 0, d.rd, 0x53);
        case M::FMUL_D: return enc_r(0x09, d.rs2, d.rs1, 0, d.rd, 0x53);
        case M::FDIV_D: return enc_r(0x0d, d.rs2, d.rs1, 0, d.rd, 0x53);
        case M::FMADD_D:
            return (u32(d.rs3) << 27) | (1u << 25) | (u32(d.rs2) << 20) | (u32(d.rs1) << 15) |
                   (u32(d.rd) << 7) | 0x43;
        case M::FMV_X_D: return enc_r(0x71, 0, d.rs1, 0, d.rd, 0x53);
        case M::FMV_D_X: return enc_r(0x79, 0, d.rs1, 0, d.rd, 0x53);
        case M::FCVT_D_L: return enc_r(0x69, 2, d.rs1, 0, d.rd, 0x53);
        case M::FCVT_L_D: return enc_r(0x61, 2, d.rs1, 0, d.rd, 0x53);
        case M::C_ADDI:
            if (d.rd != d.rs1)
                throw SimError(ErrCode::OperandOutOfRange, "c.addi needs rd == rs1");
            check_imm_range(d.imm, -32, 31, "c.addi");
            return (u32(d.imm & 0x20) << 7) | (u32(d.rd) << 7) | (u32(d.imm & 0x1f) << 2) | 0x01;
        case M::C_LI:
            check_imm_range(d.imm, -32, 31, "c.li");
            return (2u << 13) | (u32(d.imm & 0x20) << 7) | (u32(d.rd) << 7) | (u32(d.imm & 0x1f) << 2) | 0x01;
        case M::C_MV:
            if (d.rd == 0 || d.rs2 == 0)
                throw SimError(ErrCode::OperandOutOfRange, "c.mv needs rd != x0 and rs2 != x0");
            return (4u << 13) | (u32(d.rd) << 7) | (u32(d.rs2) << 2) | 0x02;
        case M::C_ADD:
            if (d.rd == 0 || d.rs2 == 0 || d.rd != d.rs1)
                throw SimError(ErrCode::OperandOutOfRange, "c.add needs rd == rs1, both != x0");
            return (4u << 13) | (1u << 12) | (u32(d.rd) << 7) | (u32(d.rs2) << 2) | 0x02;
        case M::C_LW: case M::C_SW: {
            check_reg_prime(d.rs1);
            check_reg_prime(d.mn == M::C_LW ? d.rd : d.rs2);
            check_mult(d.imm, 4, "c.lw/c.sw");
            check_imm_range(d.imm, 0, 124, "c.lw/c.sw");
            u32 u = u32(d.imm);
            u32 w = ((d.mn == M::C_LW ? 2u : 6u) << 13) | (bits(u, 5, 3) << 10) | ((u32(d.rs1) - 8) << 7) |
                    (bits(u, 2, 2) << 6) | (bits(u, 6, 6) << 5) |
                    ((u32(d.mn == M::C_LW ? d.rd : d.rs2) - 8) << 2) | 0x00;
            return w;
        }
        case M::C_LD: case M::C_SD: {
            check_reg_prime(d.rs1);
            check_reg_prime(d.mn == M::C_LD ? d.rd : d.rs2);
            check_mult(d.imm, 8, "c.ld/c.sd");
            check_imm_range(d.imm, 0, 248, "c.ld/c.sd");
            u32 u = u32(d.imm);
            u32 w = ((d.mn == M::C_LD ? 3u : 7u) << 13) | (bits(u, 5, 3) << 10) | ((u32(d.rs1) - 8) << 7) |
                    (bits(u, 7, 6) << 5) | ((u32(d.mn == M::C_LD ? d.rd : d.rs2) - 8) << 2) | 0x00;
            return w;
        }
        case M::C_BEQZ: case M::C_BNEZ: {
            check_reg_prime(d.rs1);
            check_mult(d.imm, 2, "c.beqz/c.bnez");
            check_imm_range(d.imm, -256, 254, "c.beqz/c.bnez");
            u32 u = u32(d.imm & 0x1ff);
            return ((d.mn == M::C_BEQZ ? 6u : 7u) << 13) | (bits(u, 8, 8) << 12) | (bits(u, 4, 3) << 10) |
                   ((u32(d.rs1) - 8) << 7) | (bits(u, 7, 6) << 5) | (bits(u, 2, 1) << 3) |
                   (bits(u, 5, 5) << 2) | 0x01;
        }
        case M::C_J: {
            check_mult(d.imm, 2, "c.j");
            check_imm_range(d.imm, -2048, 2046, "c.j");
            u32 u = u32(d.imm & 0xfff);
            return (5u << 13) | (bits(u, 11, 11) << 12) | (bits(u, 4, 4) << 11) | (bits(u, 9, 8) << 9) |
                   (bits(u, 10, 10) << 8) | (bits(u, 6, 6) << 7) | (bits(u, 7, 7) << 6) |
                   (bits(u, 3, 1) << 3) | (bits(u, 5, 5) << 2) | 0x01;
        }
        case M::C_JR:
            if (d.rs1 == 0) throw SimError(ErrCode::OperandOutOfRange, "c.jr needs rs1 != x0");
            return (4u << 13) | (u32(d.rs1) << 7) | 0x02;
        case M::C_JALR:
            if (d.rs1 == 0) throw SimError(ErrCode::OperandOutOfRange, "c.jalr needs rs1 != x0");
            return (4u << 13) | (1u << 12) | (u32(d.rs1) << 7) | 0x02;
        case M::COUNT_:
            break;
    }
    throw SimError(ErrCode::UnsupportedMnemonic, "mnemonic id " + std::to_string(int(d.mn)));
}

void Assembler::label(const std::string& name) {
    if (!labels_.emplace(name, here()).second)
        throw SimError(ErrCode::ParseError, "duplicate label " + name);
}

u64 Assembler::label_addr(const std::string& name) const {
    auto it = labels_.find(name);
    if (it == labels_.end()) throw SimError(ErrCode::ParseError, "unknown label " + name);
    return it->second;
}

void Assembler::put(u32 word, u8 width) {
    for (u8 i = 0; i < width; ++i) code_.push_back(u8(word >> (8 * i)));
}

void Assembler::emit(Mnemonic mn, u8 rd, u8 rs1, u8 rs2, i64 imm, u8 rs3) {
    u32 w = encode({mn, rd, rs1, rs2, rs3, imm});
    put(w, (w & 3) == 3 ? 4 : 2);
}

void Assembler::emit_branch(Mnemonic mn, u8 rs1, u8 rs2, const std::string& target) {
    if (!is_cond_branch(mn) || mn == Mnemonic::C_BEQZ || mn == Mnemonic::C_BNEZ)
        throw SimError(ErrCode::UnsupportedMnemonic, "emit_branch takes 32-bit conditional branches");
    fixups_.push_back({code_.size(), mn, rs1, rs2, target});
    emit(mn, 0, rs1, rs2, 0);
}

void Assembler::emit_jal(u8 rd, const std::string& target) {
    fixups_.push_back({code_.size(), Mnemonic::JAL, rd, 0, target});
    emit(Mnemonic::JAL, rd, 0, 0, 0);
}

void Assembler::li(u8 rd, i64 value) {
    if (value >= -2048 && value <= 2047) {
        emit(Mnemonic::ADDI, rd, 0, 0, value);
        return;
    }
    if (value >= INT32_MIN && value <= INT32_MAX) {
        i64 hi_val = i64(i32(u32((value + 0x800) >> 12) << 12));
        i64 lo = i64(i32(u32(value) - u32(hi_val)));
        emit(Mnemonic::LUI, rd, 0, 0, hi_val);
        if (lo != 0) emit(Mnemonic::ADDIW, rd, rd, 0, lo);
        return;
    }
    li(rd, value >> 11);
    emit(Mnemonic::SLLI, rd, rd, 0, 11);
    if (value & 0x7ff) emit(Mnemonic::ORI, rd, rd, 0, value & 0x7ff);
}

void Assembler::halt() {
    li(17, 0);
    emit(Mnemonic::ECALL);
}

std::vector<u8> Assembler::finish() {
    if (finished_) return code_;
    for (const auto& fx : fixups_) {
        u64 pc = base_ + fx.offset;
        i64 delta = i64(label_addr(fx.target)) - i64(pc);
        u32 w;
        if (fx.mn == Mnemonic::JAL)
            w = encode({Mnemonic::JAL, fx.rs1, 0, 0, 0, delta});
        else
            w = encode({fx.mn, 0, fx.rs1, fx.rs2, 0, delta});
        for (int i = 0; i < 4; ++i) code_[fx.offset + i] = u8(w >> (8 * i));
    }
    finished_ = true;
    return code_;
}

}  // namespace rvsim
