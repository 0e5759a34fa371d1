#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "rvsim/isa.hpp"

namespace rvsim {

// Sparse byte-addressable memory, 4 KiB pages.
class SparseMemory {
  public:
    static constexpr u64 kPageBytes = 4096;

    u8 read_u8(u64 addr) const;
    void write_u8(u64 addr, u8 v);
    u64 read(u64 addr, u32 bytes) const;      // little-endian, bytes <= 8
    void write(u64 addr, u32 bytes, u64 v);
    u64 digest_range(u64 addr, u64 len) const;
    size_t pages() const { return pages_.size(); }

  private:
    const u8* page_ro(u64 addr) const;
    u8* page_rw(u64 addr);
    std::unordered_map<u64, std::unique_ptr<std::array<u8, kPageBytes>>> pages_;
};

struct ArchState {
    u64 pc = 0;
    u64 x[32] = {};
    u64 f[32] = {};  // raw IEEE-754 bit patterns
    SparseMemory mem;
    u64 retired = 0;
    bool halted = false;

    u64 get_x(u8 r) const { return r == 0 ? 0 : x[r]; }
    void set_x(u8 r, u64 v) {
        if (r != 0) x[r] = v;
    }
    double get_f(u8 r) const;
    void set_f(u8 r, double v);
};

struct RetireRecord {
    u64 seq = 0;
    u64 pc = 0;
    u64 next_pc = 0;
    Instr instr;
    bool is_branch = false;   // conditional branch
    bool is_jump = false;     // jal/jalr
    bool is_call = false;
    bool is_return = false;
    bool taken = false;       // any control transfer that redirected
    u64 mem_vaddr = 0;        // loads/stores only
    u32 mem_bytes = 0;
    u64 store_data = 0;       // raw stored bytes (low mem_bytes valid)
    u64 store_data_digest = 0;

    bool is_control_transfer() const { return is_branch || is_jump; }
    bool is_mem() const { return mem_bytes != 0; }
    bool is_store() const {
        return instr.fu == FuClass::STORE || instr.fu == FuClass::FP_STORE;
    }
};

struct Segment {
    u64 addr = 0;
    std::vector<u8> bytes;
};

struct Program {
    u64 base = 0;
    std::vector<u8> code;
    std::vector<Segment> data;
    u64 entry = 0;

    void validate() const;  // non-overlapping segments, entry within code
};

enum class RunStatus { Halted, BudgetExceeded, Fault };
const char* run_status_name(RunStatus s);

struct RunResult {
    ArchState state;
    std::vector<RetireRecord> stream;
    RunStatus status = RunStatus::Halted;
    std::string diagnostic;
};

class GoldenSim {
  public:
    explicit GoldenSim(const Program& prog, IsaSubset subset = IsaSubset{});

    RetireRecord step();  // throws SimError on faults
    bool halted() const { return state_.halted; }
    ArchState& state() { return state_; }
    const ArchState& state() const { return state_; }

  private:
    ArchState state_;
    IsaSubset subset_;
};

RunResult run(const Program& prog, u64 max_instrs = 100'000'000, IsaSubset subset = IsaSubset{});

// Order-sensitive digest over the committed stream; used for lockstep checks.
u64 stream_digest(const std::vector<RetireRecord>& stream);
// Digest over (vaddr, bytes, data) of every store, in program order.
u64 store_digest(const std::vector<RetireRecord>& stream);

// Flat-binary text format: header `base=<hex> entry=<hex>`, then hex bytes.
Program load_flat_binary_text(const std::string& text);
Program load_flat_binary_file(const std::string& path);
std::string dump_flat_binary_text(const Program& prog);

}  // namespace rvsim
