#include "rvsim/inorder.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <unordered_set>

namespace rvsim {

namespace {

bool is_fp_class(FuClass f) {
    switch (f) {
        case FuClass::FP_ALU:
        case FuClass::FP_MUL:
        case FuClass::FP_DIV:
        case FuClass::FP_LOAD:
        case FuClass::FP_STORE: return true;
        default: return false;
    }
}

bool is_fpu_exec(FuClass f) {
    return f == FuClass::FP_ALU || f == FuClass::FP_MUL || f == FuClass::FP_DIV;
}

bool is_load_class(FuClass f) { return f == FuClass::LOAD || f == FuClass::FP_LOAD; }
bool is_store_class(FuClass f) { return f == FuClass::STORE || f == FuClass::FP_STORE; }

// Issue-port group an instruction competes in (pair-internal structural rule).
enum class PortGroup { Alu, Mul, Div, Bru, Fpu, LoadPort, StorePort, Sys };

PortGroup port_group(FuClass f) {
    switch (f) {
        case FuClass::ALU: return PortGroup::Alu;
        case FuClass::MUL: return PortGroup::Mul;
        case FuClass::DIV: return PortGroup::Div;
        case FuClass::BRU: return PortGroup::Bru;
        case FuClass::FP_ALU:
        case FuClass::FP_MUL:
        case FuClass::FP_DIV: return PortGroup::Fpu;
        case FuClass::LOAD:
        case FuClass::FP_LOAD: return PortGroup::LoadPort;
        case FuClass::STORE:
        case FuClass::FP_STORE: return PortGroup::StorePort;
        case FuClass::CSR:
        case FuClass::SYSTEM: return PortGroup::Sys;
    }
    return PortGroup::Sys;
}

// True when `b` reads the register `a` writes (same register space).
bool reads_result_of(const Instr& a, const Instr& b) {
    OperandUse ua = operand_use(a.mn);
    if (!ua.writes_rd) return false;
    if (!ua.rd_fp && a.rd == 0) return false;
    OperandUse ub = operand_use(b.mn);
    if (ub.reads_rs1 && ub.rs1_fp == ua.rd_fp && b.rs1 == a.rd) return true;
    if (ub.reads_rs2 && ub.rs2_fp == ua.rd_fp && b.rs2 == a.rd) return true;
    if (ub.reads_rs3 && ub.rs3_fp == ua.rd_fp && b.rs3 == a.rd) return true;
    return false;
}

bool writes_same_reg(const Instr& a, const Instr& b) {
    OperandUse ua = operand_use(a.mn);
    OperandUse ub = operand_use(b.mn);
    if (!ua.writes_rd || !ub.writes_rd) return false;
    if (ua.rd_fp != ub.rd_fp) return false;
    if (!ua.rd_fp && a.rd == 0) return false;
    return a.rd == b.rd;
}

}  // namespace

PairDecision issue_pair_legal(const Instr& a, bool a_taken_ct, const Instr& b,
                              const CoreConfig& cfg) {
    if (a_taken_ct) return {false, "taken_control_transfer"};

    FuClass fa = a.fu, fb = b.fu;
    if (!cfg.fpu_dual_issue && (is_fp_class(fa) || is_fp_class(fb)))
        return {false, "fpu_single_issue"};
    if ((fa == FuClass::FP_STORE && is_fpu_exec(fb)) || (is_fpu_exec(fa) && fb == FuClass::FP_STORE))
        return {false, "fp_store_fpu_conflict"};
    if (fa == FuClass::CSR || fa == FuClass::SYSTEM || fb == FuClass::CSR ||
        fb == FuClass::SYSTEM)
        return {false, "serialize"};

    if (port_group(fa) == port_group(fb)) {
        u32 capacity = 1;
        switch (port_group(fa)) {
            case PortGroup::Alu: capacity = cfg.n_alu; break;
            case PortGroup::Mul: capacity = cfg.n_mul; break;
            case PortGroup::Div: capacity = cfg.n_div; break;
            case PortGroup::Bru: capacity = cfg.n_bru; break;
            case PortGroup::Fpu: capacity = cfg.n_fpu; break;
            default: capacity = 1; break;  // one load port, one store port
        }
        if (capacity < 2) return {false, "structural_fu"};
    }

    if (reads_result_of(a, b)) {
        bool forwardable =
            cfg.alu_forwarding && fa == FuClass::ALU && fb == FuClass::ALU;
        if (!forwardable) return {false, "intra_pair_raw"};
    }
    if (writes_same_reg(a, b) && !cfg.renaming) return {false, "intra_pair_waw"};
    return {};
}

namespace {

struct SbEntry {
    u64 idx = 0;
    u64 complete = 0;
    bool load = false;
};

struct SqEntry {
    u64 idx = 0;
    u64 vaddr = 0;
    u32 bytes = 0;
    u64 drain_cycle = 0;  // 0 = not yet scheduled (store not committed)
    u64 free_at = 0;      // 0 = not yet drained
};

StallCause cause_of_pair_reason(const char* reason) {
    std::string r = reason;
    if (r == "intra_pair_raw") return StallCause::RawDependency;
    if (r == "intra_pair_waw") return StallCause::WawDependency;
    if (r == "taken_control_transfer") return StallCause::FetchStarve;
    return StallCause::StructuralFu;
}

}  // namespace

RunMetrics simulate_inorder(const CoreConfig& cfg, const std::vector<RetireRecord>& stream,
                            MemHier& mem, const SimOptions& opt,
                            std::vector<IssueEvent>* issue_log) {
    cfg.validate();
    if (stream.empty()) throw SimError(ErrCode::EmptyStream, "empty retirement stream");
    if (cfg.kind == CoreKind::OutOfOrder)
        throw SimError(ErrCode::ConfigError, cfg.name + ": not an in-order configuration");

    const u64 n = stream.size();
    const u64 lag = cfg.mem.ifetch_hit_latency;  // fetch-to-issue depth

    PredictorSuite suite(cfg.predictor);
    FetchUnit fetch(stream, suite, mem, cfg.fetch_bytes_per_cycle, cfg.instr_buffer_entries);

    RunMetrics m;
    m.core = cfg.name;
    m.retired = n;
    m.stream_digest = stream_digest(stream);

    std::vector<u64> complete(n, ~u64(0));
    std::vector<u8> load_missed(n, 0);
    std::array<i64, 32> int_prod{}, fp_prod{};
    int_prod.fill(-1);
    fp_prod.fill(-1);

    std::deque<SbEntry> sb;
    std::vector<SqEntry> sq;
    sq.reserve(cfg.store_q);
    u64 sq_last_drain = 0;

    std::vector<u64> div_busy(cfg.n_div, 0);
    std::vector<u64> fpu_busy(cfg.n_fpu, 0);
    const bool shared_wb_port = cfg.n_alu >= 2;
    std::unordered_set<u64> wb_claims;

    u64 t = 0;
    u64 committed = 0;
    const u64 limit = opt.cycle_limit ? opt.cycle_limit : 10000 + n * 200;

    while (committed < n) {
        // --- Store-queue drains scheduled for this cycle (post-commit, 1/cycle).
        for (auto& e : sq) {
            if (e.drain_cycle == t && e.free_at == 0) {
                MemResponse r = mem.access(AccessKind::Store, e.vaddr, e.bytes, t);
                e.free_at = t + std::max<u64>(1, r.latency);
            }
        }
        std::erase_if(sq, [&](const SqEntry& e) { return e.free_at != 0 && e.free_at <= t; });

        // --- Commit: in order, completed, up to commit_width per cycle.
        u32 commits = 0;
        while (commits < cfg.commit_width && !sb.empty() && complete[sb.front().idx] <= t) {
            SbEntry head = sb.front();
            if (head.idx != committed)
                throw SimError(ErrCode::StreamMismatch, "commit order diverged from the stream");
            const RetireRecord& rec = stream[head.idx];
            suite.on_retire(rec);
            m.fu_ops[size_t(rec.instr.fu)]++;
            if (is_store_class(rec.instr.fu)) {
                for (auto& e : sq) {
                    if (e.idx == head.idx) {
                        e.drain_cycle = std::max(t + 1, sq_last_drain + 1);
                        sq_last_drain = e.drain_cycle;
                        break;
                    }
                }
            }
            sb.pop_front();
            commits++;
            committed++;
        }
        m.peak_retires = std::max<u32>(m.peak_retires, commits);

        // --- Issue: up to issue_width per cycle, program order, slot 0 gates slot 1.
        u32 alu_used = 0, mul_used = 0, div_used = 0, bru_used = 0, fpu_used = 0;
        u32 loads_used = 0, stores_used = 0;
        bool slot0_issued = false;
        bool slot0_taken_ct = false;
        u64 slot0_idx = ~u64(0);
        StallCause slot0_cause = StallCause::FetchStarve;
        i64 log_seq0 = -1, log_seq1 = -1;
        const char* log_reason = "";

        u64 inflight_loads = 0;
        for (const auto& e : sb)
            if (e.load && complete[e.idx] > t) inflight_loads++;

        for (u32 s = 0; s < cfg.issue_width; s++) {
            if (s > 0 && !slot0_issued) {
                m.stalls[slot0_cause]++;  // cascade: nothing can pass slot 0
                continue;
            }
            // Candidate = current front of the fetch buffer.
            bool redirect_shadow = fetch.last_redirect_resume() != 0 &&
                                   t < fetch.last_redirect_resume() + lag;
            if (fetch.buffer_empty()) {
                StallCause c = (fetch.awaiting_redirect() || redirect_shadow)
                                   ? StallCause::MispredictRedirect
                                   : StallCause::FetchStarve;
                m.stalls[c]++;
                if (s == 0) slot0_cause = c;
                continue;
            }
            const FetchedInstr& fi = fetch.peek(0);
            const RetireRecord& rec = stream[fi.idx];
            const Instr& in = rec.instr;

            auto stall = [&](StallCause c, const char* reason = "") {
                m.stalls[c]++;
                if (s == 0) slot0_cause = c;
                else log_reason = reason[0] ? reason : stall_cause_name(c);
            };

            if (fi.ready_cycle > t) {
                if (fi.icache_miss) stall(StallCause::CacheMiss);
                else if (redirect_shadow) stall(StallCause::MispredictRedirect);
                else stall(StallCause::FetchStarve);
                continue;
            }
            if (sb.size() >= cfg.scoreboard_entries) {
                stall(StallCause::ScoreboardFull);
                continue;
            }
            if (s > 0) {
                PairDecision pd =
                    issue_pair_legal(stream[slot0_idx].instr, slot0_taken_ct, in, cfg);
                if (!pd.legal) {
                    stall(cause_of_pair_reason(pd.reason), pd.reason);
                    continue;
                }
            }

            // Operand readiness (RAW) with optional intra-pair ALU forwarding.
            OperandUse use = operand_use(in.mn);
            bool blocked_raw = false, blocked_by_miss = false;
            auto check_src = [&](bool reads, bool fp, u8 reg) {
                if (!reads || blocked_raw) return;
                if (!fp && reg == 0) return;
                i64 p = fp ? fp_prod[reg] : int_prod[reg];
                if (p < 0 || complete[p] <= t) return;
                if (s > 0 && u64(p) == slot0_idx && cfg.alu_forwarding &&
                    stream[slot0_idx].instr.fu == FuClass::ALU && in.fu == FuClass::ALU)
                    return;  // forwarded within the pair
                blocked_raw = true;
                blocked_by_miss = load_missed[p] != 0;
            };
            check_src(use.reads_rs1, use.rs1_fp, in.rs1);
            check_src(use.reads_rs2, use.rs2_fp, in.rs2);
            check_src(use.reads_rs3, use.rs3_fp, in.rs3);
            if (blocked_raw) {
                stall(blocked_by_miss ? StallCause::CacheMiss : StallCause::RawDependency,
                      "raw_dependency");
                continue;
            }
            if (!cfg.renaming && use.writes_rd && !(in.rd == 0 && !use.rd_fp)) {
                i64 p = use.rd_fp ? fp_prod[in.rd] : int_prod[in.rd];
                if (p >= 0 && complete[p] > t) {
                    stall(StallCause::WawDependency, "waw_dependency");
                    continue;
                }
            }

            // Structural: per-cycle unit counts plus unpipelined busy units.
            FuClass fu = in.fu;
            int claim_div = -1, claim_fpu = -1;
            bool fu_ok = true;
            switch (port_group(fu)) {
                case PortGroup::Alu: fu_ok = alu_used < cfg.n_alu; break;
                case PortGroup::Mul: fu_ok = mul_used < cfg.n_mul; break;
                case PortGroup::Bru: fu_ok = bru_used < cfg.n_bru; break;
                case PortGroup::Div: {
                    fu_ok = false;
                    if (div_used < cfg.n_div) {
                        for (u32 i = 0; i < cfg.n_div; i++)
                            if (div_busy[i] <= t) {
                                claim_div = int(i);
                                fu_ok = true;
                                break;
                            }
                    }
                    break;
                }
                case PortGroup::Fpu: {
                    fu_ok = false;
                    u32 free_inst = 0;
                    int first_free = -1;
                    for (u32 i = 0; i < cfg.n_fpu; i++)
                        if (fpu_busy[i] <= t) {
                            free_inst++;
                            if (first_free < 0) first_free = int(i);
                        }
                    if (fpu_used < free_inst) {
                        fu_ok = true;
                        if (fu == FuClass::FP_DIV) claim_fpu = first_free;
                    }
                    break;
                }
                case PortGroup::LoadPort:
                case PortGroup::StorePort:
                case PortGroup::Sys: fu_ok = true; break;
            }
            if (!fu_ok) {
                stall(StallCause::StructuralFu, "structural_fu");
                continue;
            }
            if (is_load_class(fu)) {
                if (loads_used >= 1) {
                    stall(StallCause::StructuralFu, "structural_fu");
                    continue;
                }
                if (inflight_loads >= cfg.load_q) {
                    stall(StallCause::LsuFull, "lsu_full");
                    continue;
                }
            }
            if (is_store_class(fu)) {
                if (stores_used >= 1) {
                    stall(StallCause::StructuralFu, "structural_fu");
                    continue;
                }
                if (sq.size() >= cfg.store_q) {
                    stall(StallCause::LsuFull, "lsu_full");
                    continue;
                }
            }

            // Completion time; loads talk to the hierarchy at issue.
            u64 comp;
            bool this_load_missed = false;
            if (is_load_class(fu)) {
                MemResponse r = mem.access(AccessKind::Load, rec.mem_vaddr, rec.mem_bytes, t);
                comp = t + r.latency;
                this_load_missed = r.level != ServiceLevel::L1Hit;
            } else if (is_store_class(fu)) {
                comp = t + cfg.lat.store_agen;  // address generation; data drains post-commit
            } else {
                comp = t + cfg.lat.of(fu);
            }

            // Shared writeback port: the second ALU and the FPU may not
            // complete in the same cycle; the later issuer waits.
            bool wants_shared_port =
                shared_wb_port && ((fu == FuClass::ALU && alu_used == 1) || is_fpu_exec(fu));
            if (wants_shared_port && wb_claims.count(comp)) {
                stall(StallCause::StructuralWbPort, "structural_wb_port");
                continue;
            }

            // ---- Issue accepted.
            if (wants_shared_port) wb_claims.insert(comp);
            if (claim_div >= 0) div_busy[claim_div] = comp;
            if (claim_fpu >= 0) fpu_busy[claim_fpu] = comp;
            switch (port_group(fu)) {
                case PortGroup::Alu: alu_used++; break;
                case PortGroup::Mul: mul_used++; break;
                case PortGroup::Div: div_used++; break;
                case PortGroup::Bru: bru_used++; break;
                case PortGroup::Fpu: fpu_used++; break;
                case PortGroup::LoadPort: loads_used++; break;
                case PortGroup::StorePort: stores_used++; break;
                case PortGroup::Sys: break;
            }
            if (is_load_class(fu)) inflight_loads++;
            if (is_store_class(fu))
                sq.push_back({fi.idx, rec.mem_vaddr, rec.mem_bytes, 0, 0});

            complete[fi.idx] = comp;
            load_missed[fi.idx] = this_load_missed ? 1 : 0;
            if (use.writes_rd) {
                if (use.rd_fp) fp_prod[in.rd] = i64(fi.idx);
                else if (in.rd != 0) int_prod[in.rd] = i64(fi.idx);
            }
            sb.push_back({fi.idx, comp, is_load_class(fu)});
            m.busy_cycles++;
            m.dispatched++;

            bool taken_ct = rec.is_control_transfer() && rec.taken;
            if (fi.outcome.mispredict) {
                u64 delay = cfg.mispredict_penalty > lag ? cfg.mispredict_penalty - lag : 1;
                fetch.resolve_redirect(t + delay);
            }
            if (s == 0) {
                slot0_issued = true;
                slot0_idx = fi.idx;
                slot0_taken_ct = taken_ct;
                log_seq0 = i64(rec.seq);
            } else {
                log_seq1 = i64(rec.seq);
            }
            fetch.pop_front();
        }
        if (opt.collect_issue_log && issue_log && log_seq0 >= 0)
            issue_log->push_back({t, log_seq0, log_seq1, log_reason});

        // --- Fetch fills the buffer for later cycles.
        fetch.cycle(t);

        t++;
        if (t > limit)
            throw SimError(ErrCode::StreamMismatch,
                           "cycle limit exceeded without forward progress at instruction " +
                               std::to_string(committed) + "/" + std::to_string(n));
    }

    m.cycles = t;
    m.branch = suite.stats();
    m.icache = mem.l1i_stats();
    m.dcache = mem.l1d_stats();
    m.llc = mem.llc_stats();
    m.mem_accesses = mem.mem_accesses();
    m.mem_writebacks = mem.mem_writebacks();
    return m;
}

}  // namespace rvsim
