#include "rvsim/memhier.hpp"

#include <algorithm>
#include <string>

namespace rvsim {

namespace {

bool is_pow2(u64 v) { return v != 0 && (v & (v - 1)) == 0; }

u32 log2u(u32 v) {
    u32 n = 0;
    while ((1u << n) < v) n++;
    return n;
}

}  // namespace

const char* service_level_name(ServiceLevel s) {
    switch (s) {
        case ServiceLevel::L1Hit: return "l1";
        case ServiceLevel::LlcHit: return "llc";
        case ServiceLevel::Memory: return "mem";
    }
    return "?";
}

void CacheGeometry::validate(const char* what) const {
    if (!is_pow2(size_bytes) || !is_pow2(ways) || !is_pow2(line_bytes))
        throw SimError(ErrCode::ParameterOutOfRange,
                       std::string(what) + ": cache size, ways and line size must be powers of two");
    if (line_bytes < 8 || ways == 0 || size_bytes < ways * line_bytes)
        throw SimError(ErrCode::ParameterOutOfRange,
                       std::string(what) + ": inconsistent cache geometry");
}

void MemHierConfig::validate() const {
    l1i.validate("l1i");
    l1d.validate("l1d");
    if (!is_pow2(llc_size_bytes) || !is_pow2(llc_ways))
        throw SimError(ErrCode::ParameterOutOfRange, "llc: size and ways must be powers of two");
    if (llc_size_bytes < llc_ways * l1d.line_bytes)
        throw SimError(ErrCode::ParameterOutOfRange, "llc: inconsistent geometry");
    if (miss_slots == 0)
        throw SimError(ErrCode::ParameterOutOfRange, "miss_slots must be at least 1");
    if (ifetch_hit_latency == 0 || load_use_latency == 0)
        throw SimError(ErrCode::ParameterOutOfRange, "hit latencies must be nonzero");
}

// ---------------------------------------------------------------------------
// L1Cache

L1Cache::L1Cache(const CacheGeometry& geo, const char* name) : geo_(geo) {
    geo_.validate(name);
    u32 line_shift = log2u(geo_.line_bytes);
    u32 index_bits = log2u(geo_.sets());
    u32 top = line_shift + index_bits;  // one past the highest index bit
    spec_bits_ = 0;
    if (geo_.indexing == CacheIndexing::ViptSpeculative && top > 12) spec_bits_ = top - 12;
    lines_.resize(size_t(geo_.sets()) * geo_.ways);
    stamp_.resize(lines_.size(), 0);
}

L1Cache::Result L1Cache::access(u64 vaddr, bool is_store) {
    Result res;
    stats_.accesses++;

    if (spec_bits_ != 0) {
        u32 actual = speculated_value(vaddr);
        if (actual != index_predictor_) {
            // The speculative index was built from stale upper bits; the access
            // replays with the translated index (identity translation here).
            res.retried = true;
            stats_.retries++;
            index_predictor_ = actual;
        }
    }

    u32 set = set_of(vaddr);
    u64 tag = vaddr / geo_.line_bytes;
    Line* base = &lines_[size_t(set) * geo_.ways];
    tick_++;

    for (u32 w = 0; w < geo_.ways; w++) {
        if (base[w].valid && base[w].tag == tag) {
            res.hit = true;
            stats_.hits++;
            if (is_store) base[w].dirty = true;
            stamp_[size_t(set) * geo_.ways + w] = tick_;
            return res;
        }
    }

    stats_.misses++;
    // Victim: invalid way first, else least recently used.
    u32 victim = 0;
    bool found_invalid = false;
    for (u32 w = 0; w < geo_.ways; w++) {
        if (!base[w].valid) {
            victim = w;
            found_invalid = true;
            break;
        }
    }
    if (!found_invalid) {
        u64 best = stamp_[size_t(set) * geo_.ways];
        for (u32 w = 1; w < geo_.ways; w++) {
            u64 s = stamp_[size_t(set) * geo_.ways + w];
            if (s < best) {
                best = s;
                victim = w;
            }
        }
        stats_.evictions++;
        if (base[victim].dirty) {
            res.evicted_dirty = true;
            res.evicted_line_addr = base[victim].tag * geo_.line_bytes;
            stats_.writebacks++;
        }
    }
    base[victim].valid = true;
    base[victim].dirty = is_store;
    base[victim].tag = tag;
    stamp_[size_t(set) * geo_.ways + victim] = tick_;
    return res;
}

// ---------------------------------------------------------------------------
// Llc

Llc::Llc(u32 size_bytes, u32 ways, u32 line_bytes)
    : sets_(size_bytes / (ways * line_bytes)), ways_(ways), line_bytes_(line_bytes) {
    if (!is_pow2(sets_) || !is_pow2(ways_))
        throw SimError(ErrCode::ParameterOutOfRange, "llc: sets and ways must be powers of two");
    lines_.resize(size_t(sets_) * ways_);
    plru_.resize(size_t(sets_) * (ways_ > 1 ? ways_ - 1 : 1), 0);
}

u32 Llc::victim_of(u32 set) const {
    if (ways_ == 1) return 0;
    const u32* t = &plru_[size_t(set) * (ways_ - 1)];
    u32 node = 0;
    u32 levels = log2u(ways_);
    for (u32 i = 0; i < levels; i++) node = 2 * node + 1 + t[node];
    return node - (ways_ - 1);
}

void Llc::touch(u32 set, u32 way) {
    if (ways_ == 1) return;
    u32* t = &plru_[size_t(set) * (ways_ - 1)];
    u32 levels = log2u(ways_);
    u32 node = 0;
    for (u32 i = 0; i < levels; i++) {
        u32 dir = (way >> (levels - 1 - i)) & 1;
        t[node] = 1 - dir;  // point the tree away from the way just used
        node = 2 * node + 1 + dir;
    }
}

Llc::Result Llc::access(u64 addr, bool mark_dirty) {
    Result res;
    stats_.accesses++;
    u64 tag = addr / line_bytes_;
    u32 set = u32(tag) & (sets_ - 1);
    Line* base = &lines_[size_t(set) * ways_];
    for (u32 w = 0; w < ways_; w++) {
        if (base[w].valid && base[w].tag == tag) {
            res.hit = true;
            stats_.hits++;
            if (mark_dirty) base[w].dirty = true;
            touch(set, w);
            return res;
        }
    }
    stats_.misses++;
    u32 victim = ways_;
    for (u32 w = 0; w < ways_; w++) {
        if (!base[w].valid) {
            victim = w;
            break;
        }
    }
    if (victim == ways_) {
        victim = victim_of(set);
        stats_.evictions++;
        if (base[victim].dirty) {
            res.evicted_dirty = true;
            stats_.writebacks++;
        }
    }
    base[victim].valid = true;
    base[victim].dirty = mark_dirty;
    base[victim].tag = tag;
    touch(set, victim);
    return res;
}

void Llc::install_writeback(u64 addr) {
    // Dirty line arriving from an L1; full-line write, so no fetch from memory
    // and no hit/miss accounting.
    u64 tag = addr / line_bytes_;
    u32 set = u32(tag) & (sets_ - 1);
    Line* base = &lines_[size_t(set) * ways_];
    for (u32 w = 0; w < ways_; w++) {
        if (base[w].valid && base[w].tag == tag) {
            base[w].dirty = true;
            touch(set, w);
            return;
        }
    }
    u32 victim = ways_;
    for (u32 w = 0; w < ways_; w++) {
        if (!base[w].valid) {
            victim = w;
            break;
        }
    }
    if (victim == ways_) {
        victim = victim_of(set);
        stats_.evictions++;
        if (base[victim].dirty) stats_.writebacks++;
    }
    base[victim].valid = true;
    base[victim].dirty = true;
    base[victim].tag = tag;
    touch(set, victim);
}

// ---------------------------------------------------------------------------
// MemHier

namespace {
const MemHierConfig& validated(const MemHierConfig& cfg) {
    cfg.validate();
    return cfg;
}
}  // namespace

MemHier::MemHier(const MemHierConfig& cfg)
    : cfg_(validated(cfg)),
      l1i_(cfg_.l1i, "l1i"),
      l1d_(cfg_.l1d, "l1d"),
      llc_(cfg_.llc_size_bytes, cfg_.llc_ways, cfg_.l1d.line_bytes) {
    slot_busy_until_.resize(cfg_.miss_slots, 0);
}

u64 MemHier::line_fill_latency(ServiceLevel level) const {
    // Critical-word-last fill: base access latency plus one cycle per
    // remaining bus beat of the 64-byte line (8 beats of 8 bytes).
    u32 beats = cfg_.l1d.line_bytes / 8;
    switch (level) {
        case ServiceLevel::L1Hit: return 0;
        case ServiceLevel::LlcHit: return cfg_.llc_base_latency + (beats - 1);
        case ServiceLevel::Memory: return cfg_.mem_base_latency + (beats - 1);
    }
    return 0;
}

MemResponse MemHier::miss_path(L1Cache& l1, const L1Cache::Result& r, u64 line_addr, u64 now,
                               u64 base_latency) {
    // The L1 tags were already updated (line installed); here we charge the
    // fill latency, route the victim writeback, and occupy a miss slot for
    // data-side fills.
    if (r.evicted_dirty) {
        llc_.install_writeback(r.evicted_line_addr);
    }
    Llc::Result lr = llc_.access(line_addr, false);
    ServiceLevel level;
    if (lr.hit) {
        level = ServiceLevel::LlcHit;
    } else {
        level = ServiceLevel::Memory;
        mem_accesses_++;
    }
    if (lr.evicted_dirty) mem_writebacks_++;

    u64 start = now;
    bool data_side = (&l1 == &l1d_);
    size_t slot = 0;
    if (data_side) {
        // Claim the slot that frees up first; the fill cannot start before it.
        for (size_t i = 1; i < slot_busy_until_.size(); i++) {
            if (slot_busy_until_[i] < slot_busy_until_[slot]) slot = i;
        }
        start = std::max(start, slot_busy_until_[slot]);
    }
    u64 ready = start + line_fill_latency(level);
    if (data_side) {
        // The requester sees the fill latency only, but dirty victims must
        // still travel out over the same 64-bit bus before the slot can
        // accept another fill: an L1 victim pays the LLC transaction, an
        // LLC victim the memory transaction. With a single outstanding-miss
        // slot this throttles streaming write traffic; with many slots the
        // drains overlap other fills.
        u64 release = ready;
        if (r.evicted_dirty) release += line_fill_latency(ServiceLevel::LlcHit);
        if (lr.evicted_dirty) release += line_fill_latency(ServiceLevel::Memory);
        slot_busy_until_[slot] = release;
    }
    line_ready_[line_addr] = ready;

    MemResponse resp;
    resp.level = level;
    resp.retried = r.retried;
    resp.latency = (ready - now) + base_latency;
    if (r.retried) resp.latency += cfg_.vipt_retry_penalty;
    return resp;
}

MemResponse MemHier::access(AccessKind kind, u64 vaddr, u32 bytes, u64 now) {
    u32 line = cfg_.l1d.line_bytes;
    if (bytes == 0 || (vaddr % line) + bytes > line)
        throw SimError(ErrCode::UnalignedLineCrossing,
                       "access at 0x" + to_hex(vaddr) + " of " + std::to_string(bytes) +
                           " bytes crosses a cache line boundary");

    L1Cache& l1 = (kind == AccessKind::Ifetch) ? l1i_ : l1d_;
    u64 base_latency = kind == AccessKind::Ifetch ? cfg_.ifetch_hit_latency
                       : kind == AccessKind::Load ? cfg_.load_use_latency
                                                  : cfg_.store_hit_latency;
    u64 line_addr = vaddr / line * line;
    bool is_store = kind == AccessKind::Store;

    L1Cache::Result r = l1.access(vaddr, is_store);
    MemResponse resp;
    resp.retried = r.retried;
    if (r.hit) {
        resp.level = ServiceLevel::L1Hit;
        resp.latency = base_latency;
        // A hit on a line whose fill is still in flight waits for the fill;
        // such merged accesses count as hits.
        auto it = line_ready_.find(line_addr);
        if (it != line_ready_.end()) {
            if (it->second > now) {
                resp.latency = (it->second - now) + base_latency;
            } else {
                line_ready_.erase(it);
            }
        }
        if (r.retried) resp.latency += cfg_.vipt_retry_penalty;
        return resp;
    }
    return miss_path(l1, r, line_addr, now, base_latency);
}

MemResponse MemHier::ifetch_range(u64 addr, u32 bytes, u64 now) {
    u32 line = cfg_.l1i.line_bytes;
    MemResponse out;
    out.level = ServiceLevel::L1Hit;
    out.latency = 0;
    u64 cur = addr;
    u64 end = addr + bytes;
    while (cur < end) {
        u64 line_end = cur / line * line + line;
        u32 chunk = u32(std::min<u64>(end, line_end) - cur);
        MemResponse r = access(AccessKind::Ifetch, cur, chunk, now);
        out.latency = std::max(out.latency, r.latency);
        if (int(r.level) > int(out.level)) out.level = r.level;
        out.retried = out.retried || r.retried;
        cur += chunk;
    }
    return out;
}

}  // namespace rvsim
