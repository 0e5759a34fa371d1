#include "rvsim/config.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <sstream>

namespace rvsim {

const char* core_kind_name(CoreKind k) {
    switch (k) {
        case CoreKind::InOrderScalar: return "inorder_scalar";
        case CoreKind::InOrderDual: return "inorder_dual";
        case CoreKind::OutOfOrder: return "out_of_order";
    }
    return "?";
}

u32 FuLatencies::of(FuClass fu) const {
    switch (fu) {
        case FuClass::ALU: return alu;
        case FuClass::BRU: return bru;
        case FuClass::MUL: return mul;
        case FuClass::DIV: return div;
        case FuClass::FP_ALU: return fp_alu;
        case FuClass::FP_MUL: return fp_mul;
        case FuClass::FP_DIV: return fp_div;
        case FuClass::STORE:
        case FuClass::FP_STORE: return store_agen;
        case FuClass::CSR:
        case FuClass::SYSTEM: return 1;
        case FuClass::LOAD:
        case FuClass::FP_LOAD: return 1;  // memory latency comes from the hierarchy
    }
    return 1;
}

bool FuLatencies::pipelined(FuClass fu) const {
    switch (fu) {
        case FuClass::DIV:
        case FuClass::FP_DIV: return false;
        default: return true;
    }
}

void CoreConfig::validate() const {
    auto need = [&](bool ok, const std::string& what) {
        if (!ok) throw SimError(ErrCode::ConfigError, name + ": " + what);
    };
    need(issue_width >= 1 && issue_width <= 8, "issue_width out of range");
    need(commit_width >= 1, "commit_width must be positive");
    need(fetch_bytes_per_cycle >= 4, "fetch_bytes_per_cycle must be at least 4");
    need(instr_buffer_entries >= 1, "instr_buffer_entries must be positive");
    need(scoreboard_entries >= issue_width, "scoreboard must hold at least one issue group");
    need(rob_entries >= 1, "rob_entries must be positive");
    need(compaction_max >= 1 && compaction_max <= 3, "compaction_max must be 1..3");
    need(phys_int_regs >= 33, "phys_int_regs must exceed the architectural 32");
    need(phys_fp_regs >= 33, "phys_fp_regs must exceed the architectural 32");
    need(n_alu >= 1 && n_bru >= 1, "at least one ALU and one BRU required");
    need(n_mul >= 1 && n_div >= 1 && n_fpu >= 1, "unit counts must be positive");
    need(lsu_ports >= 1, "lsu_ports must be positive");
    need(load_q >= 1 && store_q >= 1, "queue depths must be positive");
    need(mispredict_penalty >= 1, "mispredict_penalty must be positive");
    need(lat.alu >= 1 && lat.bru >= 1 && lat.mul >= 1 && lat.div >= 1 && lat.fp_alu >= 1 &&
             lat.fp_mul >= 1 && lat.fp_div >= 1 && lat.store_agen >= 1,
         "all latencies must be at least 1");
    mem.validate();
}

std::vector<std::string> preset_names() { return {"cva6", "cva6s+", "c910"}; }

bool is_preset(const std::string& name) {
    auto names = preset_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

CoreConfig make_preset(const std::string& name) {
    CoreConfig c;
    c.name = name;
    if (name == "cva6") {
        c.kind = CoreKind::InOrderScalar;
        c.issue_width = 1;
        c.commit_width = 2;
        c.pipeline_depth = 6;
        c.fetch_bytes_per_cycle = 4;
        c.n_alu = 1;
        c.n_fpu = 1;
        c.load_q = 2;
        c.store_q = 4;
        c.mispredict_penalty = 5;
        c.renaming = false;
        c.alu_forwarding = false;
        c.fpu_dual_issue = false;
        c.predictor.kind = PredictorKind::Bimodal;
        c.predictor.bht_entries = 128;
        c.predictor.btb_entries = 32;
        c.predictor.btb_ways = 1;
        c.predictor.ras_depth = 2;
        c.mem.miss_slots = 1;
    } else if (name == "cva6s+") {
        c.kind = CoreKind::InOrderDual;
        c.issue_width = 2;
        c.commit_width = 2;
        c.pipeline_depth = 6;
        c.fetch_bytes_per_cycle = 8;
        c.n_alu = 2;
        c.n_fpu = 1;
        c.load_q = 2;
        c.store_q = 4;
        c.mispredict_penalty = 5;
        c.renaming = true;
        c.alu_forwarding = true;
        c.fpu_dual_issue = true;
        c.predictor.kind = PredictorKind::TwoLevel;
        c.predictor.bht_entries = 128;
        c.predictor.history_bits = 3;
        c.predictor.btb_entries = 32;
        c.predictor.btb_ways = 1;
        c.predictor.ras_depth = 2;
        c.mem.miss_slots = 1;
    } else if (name == "c910") {
        c.kind = CoreKind::OutOfOrder;
        c.issue_width = 3;
        c.commit_width = 3;  // ROB entries per cycle; up to 9 instructions
        c.pipeline_depth = 12;
        c.fetch_bytes_per_cycle = 16;
        c.instr_buffer_entries = 16;
        c.rob_entries = 64;
        c.compaction_max = 3;
        c.phys_int_regs = 96;
        c.phys_fp_regs = 64;
        c.n_alu = 2;
        c.n_fpu = 2;
        c.lsu_ports = 2;
        c.load_q = 16;
        c.store_q = 12;
        c.mispredict_penalty = 11;
        c.renaming = true;
        c.alu_forwarding = false;
        c.fpu_dual_issue = true;
        c.predictor.kind = PredictorKind::Hybrid;
        c.predictor.global_history_bits = 12;
        c.predictor.local_entries = 1024;
        c.predictor.local_history_bits = 8;
        c.predictor.chooser_entries = 1024;
        c.predictor.btb_entries = 4096;
        c.predictor.btb_ways = 4;
        c.predictor.l0_btb_entries = 16;
        c.predictor.ras_depth = 12;
        c.predictor.loop_buffer = true;
        c.predictor.loop_buffer_entries = 16;
        // The C910's data cache is physically indexed, so it never pays the
        // index-speculation retry the VIPT cores use to cover the three
        // aliased index bits.
        c.mem.l1d.indexing = CacheIndexing::Pipt;
        c.mem.miss_slots = 8;
    } else {
        throw SimError(ErrCode::ConfigError, "unknown core preset '" + name + "'");
    }
    return c;
}

namespace {

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

u32 parse_u32(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        unsigned long v = std::stoul(value, &pos, 0);
        if (pos != value.size() || v > 0xFFFFFFFFul) throw std::invalid_argument("range");
        return u32(v);
    } catch (const std::exception&) {
        throw SimError(ErrCode::ConfigError, "key '" + key + "': expected a number, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
    if (value == "0" || value == "false" || value == "no" || value == "off") return false;
    throw SimError(ErrCode::ConfigError, "key '" + key + "': expected a boolean, got '" + value + "'");
}

CacheIndexing parse_indexing(const std::string& key, const std::string& value) {
    if (value == "vipt") return CacheIndexing::ViptSpeculative;
    if (value == "pipt") return CacheIndexing::Pipt;
    throw SimError(ErrCode::ConfigError, "key '" + key + "': expected vipt or pipt, got '" + value + "'");
}

}  // namespace

ConfigSections parse_config_file(const std::string& text) {
    ConfigSections out;
    std::string section;  // "" = global
    out[section];
    std::istringstream is(text);
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        line_no++;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw SimError(ErrCode::ConfigError,
                               "config line " + std::to_string(line_no) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw SimError(ErrCode::ConfigError,
                               "config line " + std::to_string(line_no) + ": empty section name");
            out[section];
            continue;
        }
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw SimError(ErrCode::ConfigError,
                           "config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw SimError(ErrCode::ConfigError,
                           "config line " + std::to_string(line_no) + ": empty key or value");
        out[section][key] = value;
    }
    return out;
}

ConfigSections parse_config_path(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw SimError(ErrCode::ConfigError, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config_file(ss.str());
}

void apply_override(CoreConfig& cfg, const std::string& key, const std::string& value) {
    auto u = [&] { return parse_u32(key, value); };
    auto b = [&] { return parse_bool(key, value); };

    if (key == "issue_width") cfg.issue_width = u();
    else if (key == "commit_width") cfg.commit_width = u();
    else if (key == "pipeline_depth") cfg.pipeline_depth = u();
    else if (key == "fetch_bytes_per_cycle") cfg.fetch_bytes_per_cycle = u();
    else if (key == "instr_buffer_entries") cfg.instr_buffer_entries = u();
    else if (key == "scoreboard_entries") cfg.scoreboard_entries = u();
    else if (key == "rob_entries") cfg.rob_entries = u();
    else if (key == "compaction_max") cfg.compaction_max = u();
    else if (key == "phys_int_regs") cfg.phys_int_regs = u();
    else if (key == "phys_fp_regs") cfg.phys_fp_regs = u();
    else if (key == "n_alu") cfg.n_alu = u();
    else if (key == "n_mul") cfg.n_mul = u();
    else if (key == "n_div") cfg.n_div = u();
    else if (key == "n_bru") cfg.n_bru = u();
    else if (key == "n_fpu") cfg.n_fpu = u();
    else if (key == "lsu_ports") cfg.lsu_ports = u();
    else if (key == "load_q") cfg.load_q = u();
    else if (key == "store_q") cfg.store_q = u();
    else if (key == "mispredict_penalty") cfg.mispredict_penalty = u();
    else if (key == "renaming") cfg.renaming = b();
    else if (key == "alu_forwarding") cfg.alu_forwarding = b();
    else if (key == "fpu_dual_issue") cfg.fpu_dual_issue = b();
    else if (key == "predictor.kind") cfg.predictor.kind = predictor_kind_from_name(value);
    else if (key == "predictor.bht_entries") cfg.predictor.bht_entries = u();
    else if (key == "predictor.history_bits") cfg.predictor.history_bits = u();
    else if (key == "predictor.global_history_bits") cfg.predictor.global_history_bits = u();
    else if (key == "predictor.local_entries") cfg.predictor.local_entries = u();
    else if (key == "predictor.local_history_bits") cfg.predictor.local_history_bits = u();
    else if (key == "predictor.chooser_entries") cfg.predictor.chooser_entries = u();
    else if (key == "predictor.btb_entries") cfg.predictor.btb_entries = u();
    else if (key == "predictor.btb_ways") cfg.predictor.btb_ways = u();
    else if (key == "predictor.l0_btb_entries") cfg.predictor.l0_btb_entries = u();
    else if (key == "predictor.ras_depth") cfg.predictor.ras_depth = u();
    else if (key == "predictor.loop_buffer") cfg.predictor.loop_buffer = b();
    else if (key == "predictor.loop_buffer_entries") cfg.predictor.loop_buffer_entries = u();
    else if (key == "lat.alu") cfg.lat.alu = u();
    else if (key == "lat.bru") cfg.lat.bru = u();
    else if (key == "lat.mul") cfg.lat.mul = u();
    else if (key == "lat.div") cfg.lat.div = u();
    else if (key == "lat.fp_alu") cfg.lat.fp_alu = u();
    else if (key == "lat.fp_mul") cfg.lat.fp_mul = u();
    else if (key == "lat.fp_div") cfg.lat.fp_div = u();
    else if (key == "lat.store_agen") cfg.lat.store_agen = u();
    else if (key == "mem.l1i_size") cfg.mem.l1i.size_bytes = u();
    else if (key == "mem.l1i_ways") cfg.mem.l1i.ways = u();
    else if (key == "mem.l1d_size") cfg.mem.l1d.size_bytes = u();
    else if (key == "mem.l1d_ways") cfg.mem.l1d.ways = u();
    else if (key == "mem.line_bytes") {
        cfg.mem.l1i.line_bytes = u();
        cfg.mem.l1d.line_bytes = cfg.mem.l1i.line_bytes;
    } else if (key == "mem.l1i_indexing") cfg.mem.l1i.indexing = parse_indexing(key, value);
    else if (key == "mem.l1d_indexing") cfg.mem.l1d.indexing = parse_indexing(key, value);
    else if (key == "mem.indexing") {
        cfg.mem.l1i.indexing = parse_indexing(key, value);
        cfg.mem.l1d.indexing = cfg.mem.l1i.indexing;
    } else if (key == "mem.llc_size") cfg.mem.llc_size_bytes = u();
    else if (key == "mem.llc_ways") cfg.mem.llc_ways = u();
    else if (key == "mem.ifetch_hit_latency") cfg.mem.ifetch_hit_latency = u();
    else if (key == "mem.load_use_latency") cfg.mem.load_use_latency = u();
    else if (key == "mem.store_hit_latency") cfg.mem.store_hit_latency = u();
    else if (key == "mem.llc_base_latency") cfg.mem.llc_base_latency = u();
    else if (key == "mem.mem_base_latency") cfg.mem.mem_base_latency = u();
    else if (key == "mem.vipt_retry_penalty") cfg.mem.vipt_retry_penalty = u();
    else if (key == "mem.miss_slots") cfg.mem.miss_slots = u();
    else throw SimError(ErrCode::ConfigError, "unknown config key '" + key + "'");
}

CoreConfig load_core_config(const std::string& preset, const ConfigSections& sections) {
    CoreConfig cfg = make_preset(preset);
    auto apply_section = [&](const std::string& name) {
        auto it = sections.find(name);
        if (it == sections.end()) return;
        for (const auto& [k, v] : it->second) apply_override(cfg, k, v);
    };
    apply_section("");
    apply_section(preset);
    cfg.validate();
    return cfg;
}

}  // namespace rvsim
