#pragma once

// Out-of-order core timing model: 3-wide rename/dispatch, oldest-ready-first
// issue across dedicated function-unit ports, a compacting reorder buffer
// (several consecutive instructions share one entry), and entry-granular
// retirement.  The ROB and rename structures are standalone classes so their
// invariants can be exercised directly in tests.

#include <array>
#include <cstddef>
#include <deque>
#include <vector>

#include "rvsim/common.hpp"
#include "rvsim/config.hpp"
#include "rvsim/golden.hpp"
#include "rvsim/inorder.hpp"  // SimOptions
#include "rvsim/isa.hpp"
#include "rvsim/memhier.hpp"
#include "rvsim/metrics.hpp"

namespace rvsim {

// --------------------------------------------------------------------------
// Compacting reorder buffer.
//
// Each ROB entry holds up to `compaction_max` consecutive instructions.  An
// entry is closed early by any control transfer or unpipelined divide, so a
// taken branch always ends its entry.  Retirement frees whole entries,
// oldest first.
// --------------------------------------------------------------------------
class RobModel {
  public:
    struct Entry {
        u64 first_idx = 0;  // stream index of the first instruction in the entry
        u32 count = 0;      // instructions packed into the entry
        bool closed = false;
    };

    RobModel(u32 entries, u32 compaction_max);

    // True when push() would succeed: either the tail entry is open with
    // spare slots, or a fresh entry can be allocated.
    bool can_push() const;

    // Append one instruction; `closes` seals the entry after the append.
    void push(u64 idx, bool closes);

    bool empty() const { return entries_.empty(); }
    const Entry& head() const;
    void pop_head();

    size_t entries_used() const { return entries_.size(); }
    u64 instrs_in_flight() const { return instrs_; }
    u32 capacity() const { return capacity_; }
    u32 compaction_max() const { return compaction_max_; }
    u64 entries_created() const { return created_; }

    // True when the record ends its ROB entry (control transfer or
    // unpipelined divide).
    static bool closes_entry(const RetireRecord& rec);

    // Pure packing rule: entry sizes for a window of consecutive records.
    static std::vector<u32> compact(const std::vector<RetireRecord>& recs, u32 compaction_max);

  private:
    u32 capacity_;
    u32 compaction_max_;
    std::deque<Entry> entries_;
    u64 instrs_ = 0;
    u64 created_ = 0;
};

// --------------------------------------------------------------------------
// Register renaming state: architectural-to-physical maps and free lists for
// the integer and floating-point spaces.  x0 is never renamed.  A writer
// holds its previous mapping until retirement, at which point release()
// returns the old physical register to the free list.
// --------------------------------------------------------------------------
class RenameState {
  public:
    struct Dest {
        i32 phys = -1;      // newly allocated physical register
        i32 old_phys = -1;  // previous mapping, freed at retire
        bool fp = false;
        bool allocated = false;
    };

    RenameState(u32 phys_int, u32 phys_fp);

    // Whether an instruction with this mnemonic could allocate its
    // destination right now (always true for instructions without one).
    bool can_allocate(Mnemonic mn, u8 rd) const;

    Dest allocate(Mnemonic mn, u8 rd);
    void release(const Dest& d);

    i32 lookup(u8 arch, bool fp) const;
    u32 free_int() const { return static_cast<u32>(free_int_.size()); }
    u32 free_fp() const { return static_cast<u32>(free_fp_.size()); }
    u32 total_int() const { return total_int_; }
    u32 total_fp() const { return total_fp_; }
    u64 allocations() const { return allocs_; }

  private:
    std::array<i32, 32> map_int_{};
    std::array<i32, 32> map_fp_{};
    std::vector<i32> free_int_;
    std::vector<i32> free_fp_;
    u32 total_int_ = 0;
    u32 total_fp_ = 0;
    u64 allocs_ = 0;
};

// Run the out-of-order core over a committed-instruction stream.
RunMetrics simulate_ooo(const CoreConfig& cfg, const std::vector<RetireRecord>& stream,
                        MemHier& mem, const SimOptions& opt = {});

}  // namespace rvsim
