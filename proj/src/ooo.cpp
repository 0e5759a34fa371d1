#include "rvsim/ooo.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

namespace rvsim {

// ---------------------------------------------------------------------------
// RobModel
// ---------------------------------------------------------------------------

RobModel::RobModel(u32 entries, u32 compaction_max)
    : capacity_(entries), compaction_max_(compaction_max) {
    if (entries == 0)
        throw SimError(ErrCode::ParameterOutOfRange, "rob entries must be positive");
    if (compaction_max == 0)
        throw SimError(ErrCode::ParameterOutOfRange, "rob compaction width must be positive");
}

bool RobModel::can_push() const {
    if (!entries_.empty()) {
        const Entry& tail = entries_.back();
        if (!tail.closed && tail.count < compaction_max_) return true;
    }
    return entries_.size() < capacity_;
}

void RobModel::push(u64 idx, bool closes) {
    if (!entries_.empty()) {
        Entry& tail = entries_.back();
        if (!tail.closed && tail.count < compaction_max_) {
            if (tail.first_idx + tail.count != idx)
                throw SimError(ErrCode::StreamMismatch,
                               "rob compaction requires consecutive instructions");
            tail.count++;
            if (closes) tail.closed = true;
            instrs_++;
            return;
        }
    }
    if (entries_.size() >= capacity_)
        throw SimError(ErrCode::ParameterOutOfRange, "push into a full reorder buffer");
    entries_.push_back({idx, 1, closes});
    created_++;
    instrs_++;
}

const RobModel::Entry& RobModel::head() const {
    if (entries_.empty())
        throw SimError(ErrCode::ParameterOutOfRange, "head of an empty reorder buffer");
    return entries_.front();
}

void RobModel::pop_head() {
    if (entries_.empty())
        throw SimError(ErrCode::ParameterOutOfRange, "pop from an empty reorder buffer");
    instrs_ -= entries_.front().count;
    entries_.pop_front();
}

bool RobModel::closes_entry(const RetireRecord& rec) {
    // Control transfers end their entry so a redirect never splits one.
    // Unpipelined divides get their own boundary, and stores close the entry
    // so an overlapping younger load always sits in a younger entry than the
    // store it must wait for (entry retirement is strictly ordered).
    if (rec.is_control_transfer()) return true;
    FuClass fu = rec.instr.fu;
    return fu == FuClass::DIV || fu == FuClass::FP_DIV || fu == FuClass::STORE ||
           fu == FuClass::FP_STORE;
}

std::vector<u32> RobModel::compact(const std::vector<RetireRecord>& recs, u32 compaction_max) {
    if (compaction_max == 0)
        throw SimError(ErrCode::ParameterOutOfRange, "rob compaction width must be positive");
    std::vector<u32> sizes;
    u32 cur = 0;
    for (const auto& rec : recs) {
        cur++;
        if (closes_entry(rec) || cur == compaction_max) {
            sizes.push_back(cur);
            cur = 0;
        }
    }
    if (cur != 0) sizes.push_back(cur);
    return sizes;
}

// ---------------------------------------------------------------------------
// RenameState
// ---------------------------------------------------------------------------

RenameState::RenameState(u32 phys_int, u32 phys_fp) : total_int_(phys_int), total_fp_(phys_fp) {
    if (phys_int < 33 || phys_fp < 33)
        throw SimError(ErrCode::ParameterOutOfRange,
                       "renaming needs more physical than architectural registers");
    for (i32 i = 0; i < 32; i++) {
        map_int_[size_t(i)] = i;
        map_fp_[size_t(i)] = i;
    }
    free_int_.reserve(phys_int - 32);
    free_fp_.reserve(phys_fp - 32);
    for (u32 p = 32; p < phys_int; p++) free_int_.push_back(i32(p));
    for (u32 p = 32; p < phys_fp; p++) free_fp_.push_back(i32(p));
}

bool RenameState::can_allocate(Mnemonic mn, u8 rd) const {
    OperandUse use = operand_use(mn);
    if (!use.writes_rd) return true;
    if (!use.rd_fp && rd == 0) return true;  // x0 is never renamed
    return use.rd_fp ? !free_fp_.empty() : !free_int_.empty();
}

RenameState::Dest RenameState::allocate(Mnemonic mn, u8 rd) {
    OperandUse use = operand_use(mn);
    Dest d;
    if (!use.writes_rd) return d;
    if (!use.rd_fp && rd == 0) return d;
    auto& free_list = use.rd_fp ? free_fp_ : free_int_;
    auto& map = use.rd_fp ? map_fp_ : map_int_;
    if (free_list.empty())
        throw SimError(ErrCode::ParameterOutOfRange, "rename free list exhausted");
    d.phys = free_list.back();
    free_list.pop_back();
    d.old_phys = map[rd];
    d.fp = use.rd_fp;
    d.allocated = true;
    map[rd] = d.phys;
    allocs_++;
    return d;
}

void RenameState::release(const Dest& d) {
    if (!d.allocated) return;
    (d.fp ? free_fp_ : free_int_).push_back(d.old_phys);
}

i32 RenameState::lookup(u8 arch, bool fp) const {
    if (arch >= 32)
        throw SimError(ErrCode::ParameterOutOfRange, "architectural register out of range");
    return fp ? map_fp_[arch] : map_int_[arch];
}

// ---------------------------------------------------------------------------
// simulate_ooo
// ---------------------------------------------------------------------------

namespace {

bool is_load_class(FuClass f) { return f == FuClass::LOAD || f == FuClass::FP_LOAD; }
bool is_store_class(FuClass f) { return f == FuClass::STORE || f == FuClass::FP_STORE; }

struct OpState {
    i32 src[3] = {-1, -1, -1};  // physical sources (-1 = none / x0)
    bool src_fp[3] = {false, false, false};
    RenameState::Dest dest;
    u64 disp_cycle = 0;
    bool mispredict = false;  // fetch-time outcome; redirect resolves at issue
};

struct OooSqEntry {
    u64 idx = 0;
    u64 vaddr = 0;
    u32 bytes = 0;
    u64 agen_cycle = ~u64(0);  // completion of address generation (set at issue)
    u64 drain_cycle = 0;       // 0 = not yet retired
    u64 free_at = 0;           // 0 = not yet drained
};

}  // namespace

RunMetrics simulate_ooo(const CoreConfig& cfg, const std::vector<RetireRecord>& stream,
                        MemHier& mem, const SimOptions& opt) {
    cfg.validate();
    if (stream.empty()) throw SimError(ErrCode::EmptyStream, "empty retirement stream");
    if (cfg.kind != CoreKind::OutOfOrder)
        throw SimError(ErrCode::ConfigError, cfg.name + ": not an out-of-order configuration");

    const u64 n = stream.size();
    // Redirect shadow spans fetch -> rename -> issue for this pipeline.
    const u64 lag = cfg.mem.ifetch_hit_latency + 1;

    PredictorSuite suite(cfg.predictor);
    FetchUnit fetch(stream, suite, mem, cfg.fetch_bytes_per_cycle, cfg.instr_buffer_entries);

    RunMetrics m;
    m.core = cfg.name;
    m.retired = n;
    m.stream_digest = stream_digest(stream);
    m.rob_occupancy_hist.assign(cfg.rob_entries + 1, 0);

    std::vector<u64> complete(n, ~u64(0));

    RobModel rob(cfg.rob_entries, cfg.compaction_max);
    RenameState rn(cfg.phys_int_regs, cfg.phys_fp_regs);
    // Cycle from which a physical register's value is available; producers
    // set it at issue, consumers wait on it.
    std::vector<u64> ready_int(cfg.phys_int_regs, 0);
    std::vector<u64> ready_fp(cfg.phys_fp_regs, 0);

    std::unordered_map<u64, OpState> ops;  // in-flight instructions by stream index
    std::deque<u64> waiting;               // dispatched, not yet issued (program order)
    std::vector<u64> lq;                   // in-flight loads
    std::vector<OooSqEntry> sq;
    u64 sq_last_drain = 0;

    std::vector<u64> div_busy(cfg.n_div, 0);
    std::vector<u64> fpu_busy(cfg.n_fpu, 0);

    u64 t = 0;
    u64 committed = 0;
    const u64 limit = opt.cycle_limit ? opt.cycle_limit : 10000 + n * 200;

    while (committed < n) {
        // --- Store-queue drains scheduled for this cycle (post-retire, 1/cycle).
        for (auto& e : sq) {
            if (e.drain_cycle == t && e.free_at == 0) {
                MemResponse r = mem.access(AccessKind::Store, e.vaddr, e.bytes, t);
                e.free_at = t + std::max<u64>(1, r.latency);
            }
        }
        std::erase_if(sq, [&](const OooSqEntry& e) { return e.free_at != 0 && e.free_at <= t; });
        std::erase_if(lq, [&](u64 idx) { return complete[idx] <= t; });

        // --- Retire whole ROB entries, oldest first, up to commit_width.
        u32 entries_retired = 0;
        u32 instrs_retired = 0;
        while (entries_retired < cfg.commit_width && !rob.empty()) {
            const RobModel::Entry& head = rob.head();
            bool done = true;
            for (u64 i = head.first_idx; i < head.first_idx + head.count; i++)
                if (complete[i] > t) {
                    done = false;
                    break;
                }
            if (!done) break;
            for (u64 i = head.first_idx; i < head.first_idx + head.count; i++) {
                if (i != committed)
                    throw SimError(ErrCode::StreamMismatch,
                                   "retire order diverged from the stream");
                const RetireRecord& rec = stream[i];
                suite.on_retire(rec);
                m.fu_ops[size_t(rec.instr.fu)]++;
                if (is_store_class(rec.instr.fu)) {
                    for (auto& e : sq) {
                        if (e.idx == i) {
                            e.drain_cycle = std::max(t + 1, sq_last_drain + 1);
                            sq_last_drain = e.drain_cycle;
                            break;
                        }
                    }
                }
                auto it = ops.find(i);
                if (it != ops.end()) {
                    rn.release(it->second.dest);
                    ops.erase(it);
                }
                committed++;
            }
            instrs_retired += head.count;
            rob.pop_head();
            entries_retired++;
        }
        m.peak_retires = std::max(m.peak_retires, instrs_retired);

        // --- Issue: oldest-ready-first over per-class port budgets.
        u32 alu_left = cfg.n_alu;
        u32 mul_left = cfg.n_mul;
        u32 bru_left = cfg.n_bru;
        u32 lsu_left = cfg.lsu_ports;
        u32 fpu_issued = 0;

        std::vector<size_t> issued_pos;
        for (size_t wi = 0; wi < waiting.size(); wi++) {
            u64 idx = waiting[wi];
            OpState& op = ops.at(idx);
            if (op.disp_cycle >= t) break;  // this and everything younger arrived this cycle

            bool srcs_ready = true;
            for (int k = 0; k < 3; k++) {
                i32 p = op.src[k];
                if (p < 0) continue;
                u64 rc = op.src_fp[k] ? ready_fp[size_t(p)] : ready_int[size_t(p)];
                if (rc > t) {
                    srcs_ready = false;
                    break;
                }
            }
            if (!srcs_ready) continue;

            const RetireRecord& rec = stream[idx];
            FuClass fu = rec.instr.fu;

            int claim_div = -1;
            int claim_fpu = -1;
            bool forward = false;
            bool port_ok = true;
            switch (fu) {
                case FuClass::ALU:
                case FuClass::CSR:
                case FuClass::SYSTEM: port_ok = alu_left > 0; break;
                case FuClass::MUL: port_ok = mul_left > 0; break;
                case FuClass::BRU: port_ok = bru_left > 0; break;
                case FuClass::DIV: {
                    port_ok = false;
                    for (u32 i = 0; i < cfg.n_div; i++)
                        if (div_busy[i] <= t) {
                            claim_div = int(i);
                            port_ok = true;
                            break;
                        }
                    break;
                }
                case FuClass::FP_ALU:
                case FuClass::FP_MUL:
                case FuClass::FP_DIV: {
                    u32 free_inst = 0;
                    int first_free = -1;
                    for (u32 i = 0; i < cfg.n_fpu; i++)
                        if (fpu_busy[i] <= t) {
                            free_inst++;
                            if (first_free < 0) first_free = int(i);
                        }
                    port_ok = fpu_issued < free_inst;
                    if (port_ok && fu == FuClass::FP_DIV) claim_fpu = first_free;
                    break;
                }
                case FuClass::LOAD:
                case FuClass::FP_LOAD: {
                    port_ok = lsu_left > 0;
                    if (!port_ok) break;
                    // Conservative disambiguation: every older store must have
                    // a generated address.  Exact overlap forwards from the
                    // queue; partial overlap waits until the store drains.
                    for (const auto& e : sq) {
                        if (e.idx >= idx) continue;
                        if (e.agen_cycle > t) {
                            port_ok = false;
                            break;
                        }
                        u64 lo = std::max(e.vaddr, rec.mem_vaddr);
                        u64 hi = std::min(e.vaddr + e.bytes, rec.mem_vaddr + rec.mem_bytes);
                        if (lo >= hi) continue;
                        if (e.vaddr == rec.mem_vaddr && e.bytes == rec.mem_bytes) {
                            forward = true;
                        } else {
                            port_ok = false;
                            break;
                        }
                    }
                    break;
                }
                case FuClass::STORE:
                case FuClass::FP_STORE: port_ok = lsu_left > 0; break;
            }
            if (!port_ok) continue;

            // ---- Issue accepted: compute the completion cycle.
            u64 comp;
            if (is_load_class(fu)) {
                if (forward) {
                    comp = t + 1;  // store-to-load forward, no cache access
                    m.store_forwards++;
                } else {
                    MemResponse r = mem.access(AccessKind::Load, rec.mem_vaddr, rec.mem_bytes, t);
                    comp = t + r.latency;
                }
                lsu_left--;
            } else if (is_store_class(fu)) {
                comp = t + cfg.lat.store_agen;  // address generation; data drains post-retire
                for (auto& e : sq)
                    if (e.idx == idx) {
                        e.agen_cycle = comp;
                        break;
                    }
                lsu_left--;
            } else {
                comp = t + cfg.lat.of(fu);
                switch (fu) {
                    case FuClass::ALU:
                    case FuClass::CSR:
                    case FuClass::SYSTEM: alu_left--; break;
                    case FuClass::MUL: mul_left--; break;
                    case FuClass::BRU: bru_left--; break;
                    case FuClass::DIV: div_busy[claim_div] = comp; break;
                    case FuClass::FP_ALU:
                    case FuClass::FP_MUL:
                    case FuClass::FP_DIV:
                        fpu_issued++;
                        if (claim_fpu >= 0) fpu_busy[claim_fpu] = comp;
                        break;
                    default: break;
                }
            }

            complete[idx] = comp;
            if (op.dest.allocated)
                (op.dest.fp ? ready_fp : ready_int)[size_t(op.dest.phys)] = comp;
            if (op.mispredict) {
                u64 delay = cfg.mispredict_penalty > lag ? cfg.mispredict_penalty - lag : 1;
                fetch.resolve_redirect(t + delay);
            }
            issued_pos.push_back(wi);
        }
        for (size_t i = issued_pos.size(); i-- > 0;)
            waiting.erase(waiting.begin() + long(issued_pos[i]));

        // --- Dispatch/rename: in order, up to issue_width per cycle.  A
        // blocked slot blocks everything younger with the same cause.
        bool blocked = false;
        StallCause blocked_cause = StallCause::FetchStarve;
        for (u32 s = 0; s < cfg.issue_width; s++) {
            if (blocked) {
                m.stalls[blocked_cause]++;
                continue;
            }
            auto stall = [&](StallCause c) {
                m.stalls[c]++;
                blocked = true;
                blocked_cause = c;
            };
            bool redirect_shadow = fetch.last_redirect_resume() != 0 &&
                                   t < fetch.last_redirect_resume() + lag;
            if (fetch.buffer_empty()) {
                stall((fetch.awaiting_redirect() || redirect_shadow)
                          ? StallCause::MispredictRedirect
                          : StallCause::FetchStarve);
                continue;
            }
            const FetchedInstr& fi = fetch.peek(0);
            const RetireRecord& rec = stream[fi.idx];
            const Instr& in = rec.instr;
            if (fi.ready_cycle > t) {
                if (fi.icache_miss) stall(StallCause::CacheMiss);
                else if (redirect_shadow) stall(StallCause::MispredictRedirect);
                else stall(StallCause::FetchStarve);
                continue;
            }
            if (!rob.can_push()) {
                stall(StallCause::ScoreboardFull);
                continue;
            }
            if (!rn.can_allocate(in.mn, in.rd)) {
                m.rename_stalls++;
                stall(StallCause::ScoreboardFull);
                continue;
            }
            if (is_load_class(in.fu) && lq.size() >= cfg.load_q) {
                stall(StallCause::LsuFull);
                continue;
            }
            if (is_store_class(in.fu) && sq.size() >= cfg.store_q) {
                stall(StallCause::LsuFull);
                continue;
            }

            // ---- Dispatch accepted: rename and enter the window.
            OpState op;
            op.disp_cycle = t;
            op.mispredict = fi.outcome.mispredict;
            OperandUse use = operand_use(in.mn);
            auto take_src = [&](int k, bool reads, bool fp, u8 reg) {
                if (!reads) return;
                if (!fp && reg == 0) return;
                op.src[k] = rn.lookup(reg, fp);
                op.src_fp[k] = fp;
            };
            take_src(0, use.reads_rs1, use.rs1_fp, in.rs1);
            take_src(1, use.reads_rs2, use.rs2_fp, in.rs2);
            take_src(2, use.reads_rs3, use.rs3_fp, in.rs3);
            op.dest = rn.allocate(in.mn, in.rd);
            if (op.dest.allocated)
                (op.dest.fp ? ready_fp : ready_int)[size_t(op.dest.phys)] = ~u64(0);
            rob.push(fi.idx, RobModel::closes_entry(rec));
            if (is_load_class(in.fu)) lq.push_back(fi.idx);
            if (is_store_class(in.fu)) sq.push_back({fi.idx, rec.mem_vaddr, rec.mem_bytes,
                                                     ~u64(0), 0, 0});
            ops.emplace(fi.idx, op);
            waiting.push_back(fi.idx);
            m.busy_cycles++;
            m.dispatched++;
            fetch.pop_front();
        }

        m.rob_occupancy_hist[rob.entries_used()]++;

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
    m.rob_writes = rob.entries_created();
    m.renames = rn.allocations();
    return m;
}

}  // namespace rvsim
