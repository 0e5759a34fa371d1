#include "rvsim/report.hpp"

#include <algorithm>
#include <cstdio>

#include "json.hpp"
#include "rvsim/ooo.hpp"

namespace rvsim {

const char* stall_cause_name(StallCause c) {
    switch (c) {
        case StallCause::FetchStarve: return "fetch_starve";
        case StallCause::RawDependency: return "raw_dependency";
        case StallCause::WawDependency: return "waw_dependency";
        case StallCause::StructuralFu: return "structural_fu";
        case StallCause::StructuralWbPort: return "structural_wb_port";
        case StallCause::ScoreboardFull: return "scoreboard_full";
        case StallCause::LsuFull: return "lsu_full";
        case StallCause::MispredictRedirect: return "mispredict_redirect";
        case StallCause::CacheMiss: return "cache_miss";
    }
    return "unknown";
}

u64 StallBreakdown::total() const {
    u64 sum = 0;
    for (u64 v : cycles) sum += v;
    return sum;
}

void EnergyWeights::validate() const {
    const double ws[] = {fetch,      decode,    alu_op, mul_op,    div_op,
                         fp_op,      l1_access, llc_access, mem_access, rob_write,
                         rename,     leakage_per_cycle};
    for (double w : ws)
        if (!(w >= 0.0))
            throw SimError(ErrCode::ParameterOutOfRange, "energy weights must be non-negative");
}

EnergyBreakdown estimate_energy(const RunMetrics& m, const EnergyWeights& w) {
    w.validate();
    EnergyBreakdown e;
    e.fetch = w.fetch * double(m.icache.accesses);
    e.decode = w.decode * double(m.dispatched);
    auto ops = [&](FuClass f) { return double(m.fu_ops[size_t(f)]); };
    e.execute = w.alu_op * (ops(FuClass::ALU) + ops(FuClass::BRU) + ops(FuClass::CSR) +
                            ops(FuClass::SYSTEM)) +
                w.mul_op * ops(FuClass::MUL) + w.div_op * ops(FuClass::DIV) +
                w.fp_op * (ops(FuClass::FP_ALU) + ops(FuClass::FP_MUL) + ops(FuClass::FP_DIV));
    e.memory = w.l1_access * double(m.dcache.accesses) + w.llc_access * double(m.llc.accesses) +
               w.mem_access * double(m.mem_accesses + m.mem_writebacks);
    e.control = w.rob_write * double(m.rob_writes) + w.rename * double(m.renames);
    e.leakage = w.leakage_per_cycle * double(m.cycles);
    return e;
}

std::vector<RetireRecord> golden_stream(const GeneratedKernel& gk, u64 max_instrs) {
    RunResult rr = run(gk.program, max_instrs ? max_instrs : gk.instr_budget);
    if (rr.status == RunStatus::BudgetExceeded)
        throw SimError(ErrCode::InstructionBudgetExceeded, gk.name + ": " + rr.diagnostic);
    if (rr.status == RunStatus::Fault)
        throw SimError(ErrCode::IllegalInstruction, gk.name + ": " + rr.diagnostic);
    return std::move(rr.stream);
}

RunMetrics run_core(const CoreConfig& cfg, const std::vector<RetireRecord>& stream,
                    const std::string& kernel_name, u64 bytes_copied, const SimOptions& opt,
                    std::vector<IssueEvent>* issue_log) {
    MemHier mem(cfg.mem);
    RunMetrics m = cfg.kind == CoreKind::OutOfOrder
                       ? simulate_ooo(cfg, stream, mem, opt)
                       : simulate_inorder(cfg, stream, mem, opt, issue_log);
    m.kernel = kernel_name;
    m.bytes_copied = bytes_copied;
    return m;
}

// ---------------------------------------------------------------------------
// Emission
// ---------------------------------------------------------------------------

namespace {

using ojson = nlohmann::ordered_json;

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double rate(u64 part, u64 whole) { return whole ? double(part) / double(whole) : 0.0; }

ojson cache_json(const CacheStats& c) {
    ojson j;
    j["accesses"] = c.accesses;
    j["hits"] = c.hits;
    j["misses"] = c.misses;
    j["miss_rate"] = rate(c.misses, c.accesses);
    j["evictions"] = c.evictions;
    j["writebacks"] = c.writebacks;
    j["retries"] = c.retries;
    return j;
}

}  // namespace

std::string metrics_to_json(const RunMetrics& m, const EnergyBreakdown& e,
                            double norm_bandwidth) {
    ojson j;
    j["schema"] = kReportSchema;
    j["core"] = m.core;
    j["kernel"] = m.kernel;
    j["cycles"] = m.cycles;
    j["retired"] = m.retired;
    j["ipc"] = m.ipc();

    ojson b;
    b["control_transfers"] = m.branch.control_transfers();
    b["mispredicts"] = m.branch.mispredicts();
    b["mispredict_rate"] = rate(m.branch.mispredicts(), m.branch.control_transfers());
    b["branches"] = m.branch.branches;
    b["branch_mispredicts"] = m.branch.branch_mispredicts;
    b["jumps"] = m.branch.jumps;
    b["jump_mispredicts"] = m.branch.jump_mispredicts;
    b["returns"] = m.branch.returns;
    b["return_mispredicts"] = m.branch.return_mispredicts;
    b["l0_hits"] = m.branch.l0_hits;
    b["loop_supplied"] = m.branch.loop_supplied;
    j["branch"] = std::move(b);

    j["icache"] = cache_json(m.icache);
    j["dcache"] = cache_json(m.dcache);
    j["llc"] = cache_json(m.llc);
    j["memory"] = ojson{{"accesses", m.mem_accesses}, {"writebacks", m.mem_writebacks}};

    ojson s;
    for (size_t i = 0; i < kStallCauseCount; i++)
        s[stall_cause_name(StallCause(i))] = m.stalls.cycles[i];
    s["total"] = m.stalls.total();
    j["stalls"] = std::move(s);
    j["busy_cycles"] = m.busy_cycles;
    j["dispatched"] = m.dispatched;

    j["peak_retires"] = m.peak_retires;
    j["rename_stalls"] = m.rename_stalls;
    j["store_forwards"] = m.store_forwards;
    j["rob_writes"] = m.rob_writes;
    j["renames"] = m.renames;

    ojson f;
    for (int i = 0; i < kFuClassCount; i++)
        f[fu_class_name(FuClass(i))] = m.fu_ops[size_t(i)];
    j["fu_ops"] = std::move(f);
    if (!m.rob_occupancy_hist.empty()) j["rob_occupancy_hist"] = m.rob_occupancy_hist;

    if (m.bytes_copied) {
        ojson bw;
        bw["bytes_copied"] = m.bytes_copied;
        bw["bytes_per_cycle"] = m.bandwidth();
        if (norm_bandwidth > 0.0) bw["normalized"] = norm_bandwidth;
        j["bandwidth"] = std::move(bw);
    }

    ojson en;
    en["fetch"] = e.fetch;
    en["decode"] = e.decode;
    en["execute"] = e.execute;
    en["memory"] = e.memory;
    en["control"] = e.control;
    en["leakage"] = e.leakage;
    en["total"] = e.total();
    j["energy"] = std::move(en);

    j["stream_digest"] = to_hex(m.stream_digest);
    return j.dump(2) + "\n";
}

std::string csv_header() {
    std::string h = "schema,core,kernel,cycles,retired,ipc,control_transfers,mispredicts,"
                    "mispredict_rate,branches,branch_mispredicts,jumps,jump_mispredicts,"
                    "returns,return_mispredicts,icache_accesses,icache_misses,icache_retries,"
                    "dcache_accesses,dcache_misses,dcache_retries,llc_accesses,llc_misses,"
                    "mem_accesses,mem_writebacks";
    for (size_t i = 0; i < kStallCauseCount; i++)
        h += std::string(",stall_") + stall_cause_name(StallCause(i));
    h += ",busy_cycles,dispatched,peak_retires,rename_stalls,store_forwards,rob_writes,"
         "renames,bytes_copied,bandwidth,norm_bandwidth,energy_total,stream_digest";
    return h;
}

std::string csv_row(const RunMetrics& m, const EnergyBreakdown& e, double norm_bandwidth) {
    std::string r;
    auto add = [&](const std::string& v) {
        if (!r.empty()) r += ',';
        r += v;
    };
    add(kCsvSchema);
    add(m.core);
    add(m.kernel);
    add(std::to_string(m.cycles));
    add(std::to_string(m.retired));
    add(fmt_double(m.ipc()));
    add(std::to_string(m.branch.control_transfers()));
    add(std::to_string(m.branch.mispredicts()));
    add(fmt_double(rate(m.branch.mispredicts(), m.branch.control_transfers())));
    add(std::to_string(m.branch.branches));
    add(std::to_string(m.branch.branch_mispredicts));
    add(std::to_string(m.branch.jumps));
    add(std::to_string(m.branch.jump_mispredicts));
    add(std::to_string(m.branch.returns));
    add(std::to_string(m.branch.return_mispredicts));
    add(std::to_string(m.icache.accesses));
    add(std::to_string(m.icache.misses));
    add(std::to_string(m.icache.retries));
    add(std::to_string(m.dcache.accesses));
    add(std::to_string(m.dcache.misses));
    add(std::to_string(m.dcache.retries));
    add(std::to_string(m.llc.accesses));
    add(std::to_string(m.llc.misses));
    add(std::to_string(m.mem_accesses));
    add(std::to_string(m.mem_writebacks));
    for (size_t i = 0; i < kStallCauseCount; i++) add(std::to_string(m.stalls.cycles[i]));
    add(std::to_string(m.busy_cycles));
    add(std::to_string(m.dispatched));
    add(std::to_string(m.peak_retires));
    add(std::to_string(m.rename_stalls));
    add(std::to_string(m.store_forwards));
    add(std::to_string(m.rob_writes));
    add(std::to_string(m.renames));
    add(std::to_string(m.bytes_copied));
    add(fmt_double(m.bandwidth()));
    add(fmt_double(norm_bandwidth));
    add(fmt_double(e.total()));
    add(to_hex(m.stream_digest));
    return r;
}

std::string metrics_table(const std::vector<SweepRow>& rows) {
    const char* headers[] = {"core",      "kernel",   "cycles",  "retired",
                             "ipc",       "mispred%", "i$miss%", "d$miss%",
                             "bytes/cyc", "norm_bw",  "energy"};
    constexpr size_t kCols = sizeof(headers) / sizeof(headers[0]);
    std::vector<std::array<std::string, kCols>> cells;
    for (const auto& row : rows) {
        const RunMetrics& m = row.metrics;
        std::array<std::string, kCols> c;
        c[0] = m.core;
        c[1] = m.kernel;
        c[2] = std::to_string(m.cycles);
        c[3] = std::to_string(m.retired);
        c[4] = fmt_double(m.ipc());
        c[5] = fmt_double(100.0 * rate(m.branch.mispredicts(), m.branch.control_transfers()));
        c[6] = fmt_double(100.0 * rate(m.icache.misses, m.icache.accesses));
        c[7] = fmt_double(100.0 * rate(m.dcache.misses, m.dcache.accesses));
        c[8] = m.bytes_copied ? fmt_double(m.bandwidth()) : std::string("-");
        c[9] = row.norm_bandwidth > 0.0 ? fmt_double(row.norm_bandwidth) : std::string("-");
        c[10] = fmt_double(row.energy.total());
        cells.push_back(std::move(c));
    }
    std::array<size_t, kCols> width{};
    for (size_t i = 0; i < kCols; i++) width[i] = std::string(headers[i]).size();
    for (const auto& c : cells)
        for (size_t i = 0; i < kCols; i++) width[i] = std::max(width[i], c[i].size());

    std::string out;
    auto emit_row = [&](const std::array<std::string, kCols>& c) {
        for (size_t i = 0; i < kCols; i++) {
            if (i) out += "  ";
            // Left-align the name columns, right-align numbers.
            if (i < 2) {
                out += c[i];
                out.append(width[i] - c[i].size(), ' ');
            } else {
                out.append(width[i] - c[i].size(), ' ');
                out += c[i];
            }
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        out += '\n';
    };
    std::array<std::string, kCols> hdr;
    for (size_t i = 0; i < kCols; i++) hdr[i] = headers[i];
    emit_row(hdr);
    for (const auto& c : cells) emit_row(c);
    return out;
}

}  // namespace rvsim
