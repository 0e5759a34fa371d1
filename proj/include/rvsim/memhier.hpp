#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "rvsim/common.hpp"

namespace rvsim {

enum class AccessKind { Ifetch, Load, Store };
enum class ServiceLevel { L1Hit, LlcHit, Memory };
const char* service_level_name(ServiceLevel s);

enum class CacheIndexing { ViptSpeculative, Pipt };

struct CacheGeometry {
    u32 size_bytes = 65536;
    u32 ways = 2;
    u32 line_bytes = 64;
    CacheIndexing indexing = CacheIndexing::ViptSpeculative;

    u32 sets() const { return size_bytes / (ways * line_bytes); }
    void validate(const char* what) const;
};

struct CacheStats {
    u64 accesses = 0;
    u64 hits = 0;
    u64 misses = 0;
    u64 evictions = 0;
    u64 writebacks = 0;
    u64 retries = 0;  // VIPT speculative-index mispredicts
};

struct MemResponse {
    u64 latency = 0;
    ServiceLevel level = ServiceLevel::L1Hit;
    bool retried = false;
};

struct MemHierConfig {
    CacheGeometry l1i;
    CacheGeometry l1d;
    u32 llc_size_bytes = 512 * 1024;
    u32 llc_ways = 8;
    u32 ifetch_hit_latency = 1;
    u32 load_use_latency = 2;
    u32 store_hit_latency = 1;
    u32 llc_base_latency = 8;
    u32 mem_base_latency = 10;  // LLC-miss path: LLC base + 2 crossing overhead
    u32 vipt_retry_penalty = 2;
    u32 miss_slots = 1;  // outstanding data-side line fills

    void validate() const;
};

// Tag-only L1 with true-LRU replacement and optional speculative-index
// anti-aliasing: the set index needs bits above the 4 KiB page offset, which
// are speculated from the previous access and verified against translation.
class L1Cache {
  public:
    L1Cache(const CacheGeometry& geo, const char* name);

    // Returns hit/miss and whether the speculative index mispredicted
    // (identity translation makes the corrected index equal the virtual one).
    struct Result {
        bool hit = false;
        bool retried = false;
        bool evicted_dirty = false;
        u64 evicted_line_addr = 0;
    };
    Result access(u64 vaddr, bool is_store);

    u32 set_of(u64 vaddr) const { return u32(vaddr / geo_.line_bytes) & (geo_.sets() - 1); }
    u32 speculated_bits() const { return spec_bits_; }
    u32 speculated_value(u64 vaddr) const {
        return spec_bits_ == 0 ? 0 : u32(vaddr >> 12) & ((1u << spec_bits_) - 1);
    }

    const CacheStats& stats() const { return stats_; }
    const CacheGeometry& geometry() const { return geo_; }

  private:
    struct Line {
        bool valid = false;
        bool dirty = false;
        u64 tag = 0;
    };
    CacheGeometry geo_;
    u32 spec_bits_;          // index bits above the page offset (0 for PIPT or small caches)
    u32 index_predictor_ = 0;
    std::vector<Line> lines_;  // sets x ways
    std::vector<u64> stamp_;   // per line true-LRU stamps
    u64 tick_ = 0;
    CacheStats stats_;
};

// Tag-only LLC with tree pseudo-LRU replacement.
class Llc {
  public:
    Llc(u32 size_bytes, u32 ways, u32 line_bytes);

    struct Result {
        bool hit = false;
        bool evicted_dirty = false;
    };
    Result access(u64 addr, bool mark_dirty);
    void install_writeback(u64 addr);  // dirty line arriving from L1; no latency modeled

    const CacheStats& stats() const { return stats_; }

  private:
    struct Line {
        bool valid = false;
        bool dirty = false;
        u64 tag = 0;
    };
    u32 victim_of(u32 set) const;
    void touch(u32 set, u32 way);

    u32 sets_, ways_, line_bytes_;
    std::vector<Line> lines_;
    std::vector<u32> plru_;  // tree bits per set
    CacheStats stats_;
};

class MemHier {
  public:
    explicit MemHier(const MemHierConfig& cfg);

    // One access that must not cross a line boundary. `now` is the current
    // cycle; the response latency already includes any queueing for an
    // outstanding-miss slot or an in-flight fill of the same line.
    MemResponse access(AccessKind kind, u64 vaddr, u32 bytes, u64 now);

    // Instruction fetch of [addr, addr+bytes): split at line boundaries;
    // the group is ready when its slowest line is.
    MemResponse ifetch_range(u64 addr, u32 bytes, u64 now);

    u64 line_fill_latency(ServiceLevel level) const;

    const CacheStats& l1i_stats() const { return l1i_.stats(); }
    const CacheStats& l1d_stats() const { return l1d_.stats(); }
    const CacheStats& llc_stats() const { return llc_.stats(); }
    u64 mem_accesses() const { return mem_accesses_; }
    u64 mem_writebacks() const { return mem_writebacks_; }
    const MemHierConfig& config() const { return cfg_; }

  private:
    MemResponse miss_path(L1Cache& l1, const L1Cache::Result& r, u64 line_addr, u64 now,
                          u64 base_latency);

    MemHierConfig cfg_;
    L1Cache l1i_;
    L1Cache l1d_;
    Llc llc_;
    u64 mem_accesses_ = 0;
    u64 mem_writebacks_ = 0;
    std::vector<u64> slot_busy_until_;              // data-side outstanding-miss slots
    std::unordered_map<u64, u64> line_ready_;       // line addr -> fill completion cycle
};

}  // namespace rvsim
