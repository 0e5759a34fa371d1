#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rvsim/common.hpp"

namespace rvsim {

enum class FuClass : u8 {
    ALU,
    MUL,
    DIV,
    BRU,
    LOAD,
    STORE,
    FP_ALU,
    FP_MUL,
    FP_DIV,
    FP_LOAD,
    FP_STORE,
    CSR,
    SYSTEM,
};
constexpr int kFuClassCount = 13;
const char* fu_class_name(FuClass c);

enum class Mnemonic : u16 {
    // RV64I
    LUI, AUIPC, JAL, JALR,
    BEQ, BNE, BLT, BGE, BLTU, BGEU,
    LB, LH, LW, LD, LBU, LHU, LWU,
    SB, SH, SW, SD,
    ADDI, SLTI, SLTIU, XORI, ORI, ANDI, SLLI, SRLI, SRAI,
    ADD, SUB, SLL, SLT, SLTU, XOR, SRL, SRA, OR, AND,
    ADDIW, SLLIW, SRLIW, SRAIW,
    ADDW, SUBW, SLLW, SRLW, SRAW,
    FENCE, ECALL, EBREAK,
    // M
    MUL, MULH, MULHSU, MULHU, DIV, DIVU, REM, REMU,
    MULW, DIVW, DIVUW, REMW, REMUW,
    // Zicsr (reads of cycle/instret only)
    CSRRS,
    // D (minimal)
    FLD, FSD,
    FADD_D, FSUB_D, FMUL_D, FDIV_D, FMADD_D,
    FMV_X_D, FMV_D_X, FCVT_D_L, FCVT_L_D,
    // C — encoder-only mnemonics; decode expands them to the base forms above.
    C_ADDI, C_LI, C_MV, C_ADD,
    C_LW, C_LD, C_SW, C_SD,
    C_BEQZ, C_BNEZ, C_J, C_JR, C_JALR,
    COUNT_,
};
constexpr int kMnemonicCount = static_cast<int>(Mnemonic::COUNT_);

const char* mnemonic_name(Mnemonic m);
Mnemonic mnemonic_from_name(const std::string& name);  // throws UnsupportedMnemonic

struct IsaSubset {
    bool i = true;
    bool m = true;
    bool c = true;
    bool d = true;  // the minimal slice of D listed above

    void validate() const {
        if ((m || c || d) && !i)
            throw SimError(ErrCode::ConfigError, "extension flags require base I");
    }
};

struct Instr {
    u32 raw = 0;
    Mnemonic mn = Mnemonic::ADDI;
    u8 rd = 0, rs1 = 0, rs2 = 0, rs3 = 0;
    i64 imm = 0;
    FuClass fu = FuClass::ALU;
    bool is_compressed = false;
    u8 width = 4;
};

// Which operand fields an instruction actually reads/writes, and in which
// register file. Total over mnemonics; drives hazard tracking everywhere.
struct OperandUse {
    bool reads_rs1 = false, reads_rs2 = false, reads_rs3 = false;
    bool rs1_fp = false, rs2_fp = false, rs3_fp = false;
    bool writes_rd = false, rd_fp = false;
};
OperandUse operand_use(Mnemonic m);

FuClass classify(Mnemonic m);
bool is_cond_branch(Mnemonic m);
bool is_jump(Mnemonic m);  // JAL/JALR (and their compressed forms)
inline bool is_control_transfer(Mnemonic m) { return is_cond_branch(m) || is_jump(m); }

Instr decode(u32 raw, const IsaSubset& subset = IsaSubset{});

struct AsmInst {
    Mnemonic mn = Mnemonic::ADDI;
    u8 rd = 0, rs1 = 0, rs2 = 0, rs3 = 0;
    i64 imm = 0;
};
u32 encode(const AsmInst& d);  // 16-bit results are returned in the low half

// Two-pass mini-assembler: emit instructions and labels, resolve branch/jump
// targets at finish(). Emits into a flat byte buffer at a fixed base address.
class Assembler {
  public:
    explicit Assembler(u64 base) : base_(base) {}

    u64 here() const { return base_ + code_.size(); }
    u64 base() const { return base_; }

    void label(const std::string& name);
    u64 label_addr(const std::string& name) const;

    void emit(Mnemonic mn, u8 rd = 0, u8 rs1 = 0, u8 rs2 = 0, i64 imm = 0, u8 rs3 = 0);
    // Branch/jump with a label target; offset patched at finish().
    void emit_branch(Mnemonic mn, u8 rs1, u8 rs2, const std::string& target);
    void emit_jal(u8 rd, const std::string& target);

    void li(u8 rd, i64 value);      // expands to addi / lui+addiw / shift+ori chain
    void halt();                    // li a7, 0; ecall

    std::vector<u8> finish();       // resolves fixups; assembler stays usable read-only

  private:
    void put(u32 word, u8 width);

    u64 base_;
    std::vector<u8> code_;
    std::unordered_map<std::string, u64> labels_;
    struct Fixup {
        size_t offset;   // into code_
        Mnemonic mn;
        u8 rs1, rs2;
        std::string target;
    };
    std::vector<Fixup> fixups_;
    bool finished_ = false;
};

}  // namespace rvsim
