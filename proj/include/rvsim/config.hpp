#pragma once

#include <map>
#include <string>
#include <vector>

#include "rvsim/common.hpp"
#include "rvsim/isa.hpp"
#include "rvsim/memhier.hpp"
#include "rvsim/predictors.hpp"

namespace rvsim {

enum class CoreKind { InOrderScalar, InOrderDual, OutOfOrder };
const char* core_kind_name(CoreKind k);

// Execution latencies in cycles. Pipelined units accept a new op every cycle;
// unpipelined units are busy for the whole latency.
struct FuLatencies {
    u32 alu = 1;
    u32 bru = 1;
    u32 mul = 3;    // pipelined
    u32 div = 20;   // unpipelined
    u32 fp_alu = 4;  // pipelined
    u32 fp_mul = 4;  // pipelined
    u32 fp_div = 16;  // unpipelined
    u32 store_agen = 1;

    u32 of(FuClass fu) const;
    bool pipelined(FuClass fu) const;
};

struct CoreConfig {
    std::string name = "cva6";
    CoreKind kind = CoreKind::InOrderScalar;

    u32 issue_width = 1;   // decode/issue slots per cycle
    u32 commit_width = 2;  // in-order: instrs/cycle; OoO: ROB entries/cycle
    u32 pipeline_depth = 6;
    u32 fetch_bytes_per_cycle = 4;
    u32 instr_buffer_entries = 8;
    u32 scoreboard_entries = 8;  // in-order in-flight window
    u32 rob_entries = 64;        // OoO
    u32 compaction_max = 3;      // instrs per ROB entry
    u32 phys_int_regs = 96;      // OoO rename pool
    u32 phys_fp_regs = 64;

    u32 n_alu = 1;
    u32 n_mul = 1;
    u32 n_div = 1;
    u32 n_bru = 1;
    u32 n_fpu = 1;
    u32 lsu_ports = 2;  // OoO: ports usable by load or store each
    u32 load_q = 2;
    u32 store_q = 4;

    u32 mispredict_penalty = 5;
    bool renaming = false;         // WAW elimination (producer tracking)
    bool alu_forwarding = false;   // same-cycle ALU->ALU within an issue pair
    bool fpu_dual_issue = false;   // FP may pair with non-FP (FP store restriction applies)

    PredictorConfig predictor;
    FuLatencies lat;
    MemHierConfig mem;

    void validate() const;
};

std::vector<std::string> preset_names();
bool is_preset(const std::string& name);
CoreConfig make_preset(const std::string& name);  // ConfigError on unknown preset

// Flat key-value config file with one [section] per core preset. Keys before
// any section header apply to every core. parse_config_file returns
// section -> {key -> value}; load_core_config applies the file's global and
// per-preset overrides on top of the named preset.
using ConfigSections = std::map<std::string, std::map<std::string, std::string>>;
ConfigSections parse_config_file(const std::string& text);
ConfigSections parse_config_path(const std::string& path);
void apply_override(CoreConfig& cfg, const std::string& key, const std::string& value);
CoreConfig load_core_config(const std::string& preset, const ConfigSections& sections);

}  // namespace rvsim
