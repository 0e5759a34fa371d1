#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rvsim/common.hpp"

namespace rvsim {

// All direction predictors: 2-bit saturating counters initialized to 1
// (weakly not-taken), histories zeroed. predict() is pure; update() is called
// once per retired branch in retirement order.

class BimodalBht {
  public:
    explicit BimodalBht(u32 entries = 128);
    bool predict(u64 pc) const;
    void update(u64 pc, bool taken);
    u64 digest() const;
    u32 entries() const { return u32(counters_.size()); }
    u8 counter(u32 i) const { return counters_[i]; }

  private:
    u32 index(u64 pc) const { return u32(pc >> 2) & (u32(counters_.size()) - 1); }
    std::vector<u8> counters_;
};

class TwoLevelBht {
  public:
    TwoLevelBht(u32 entries = 128, u32 history_bits = 3);
    bool predict(u64 pc) const;
    void update(u64 pc, bool taken);
    u64 digest() const;
    u32 entries() const { return u32(histories_.size()); }
    u32 history_bits() const { return history_bits_; }
    u8 history(u32 i) const { return histories_[i]; }
    u8 pattern_counter(u32 entry, u32 hist) const {
        return pattern_[(entry << history_bits_) | hist];
    }

  private:
    u32 index(u64 pc) const { return u32(pc >> 2) & (u32(histories_.size()) - 1); }
    u32 history_bits_;
    std::vector<u8> histories_;
    std::vector<u8> pattern_;
};

// Tournament of a gshare-style global component and a private-history local
// component, arbitrated by a per-PC chooser.
class HybridBht {
  public:
    HybridBht(u32 global_history_bits = 12, u32 local_entries = 1024, u32 local_history_bits = 8,
              u32 chooser_entries = 1024);
    bool predict(u64 pc) const;
    const char* predict_source(u64 pc) const;  // "global" | "local"
    void update(u64 pc, bool taken);
    u64 digest() const;

  private:
    u32 global_index(u64 pc) const { return (u32(ghr_) ^ u32(pc >> 2)) & (u32(global_.size()) - 1); }
    bool global_predict(u64 pc) const { return global_[global_index(pc)] >= 2; }
    u32 chooser_index(u64 pc) const { return u32(pc >> 2) & (u32(chooser_.size()) - 1); }

    u32 ghr_bits_;
    u64 ghr_ = 0;
    std::vector<u8> global_;
    TwoLevelBht local_;
    std::vector<u8> chooser_;  // >=2 selects global
};

struct BtbEntry {
    bool valid = false;
    u64 tag = 0;
    u64 target = 0;
};

enum class BtbReplacement { DirectMapped, Lru, RoundRobin };

class Btb {
  public:
    Btb(u32 entries, u32 ways, BtbReplacement repl);
    std::optional<u64> predict(u64 pc) const;
    void update(u64 pc, u64 target);  // install/refresh on taken control transfers
    u32 occupancy() const;
    u64 digest() const;

  private:
    u32 set_of(u64 pc) const { return u32(pc >> 1) & (sets_ - 1); }
    u64 tag_of(u64 pc) const { return pc >> 1; }  // full tag; index bits redundant but harmless

    u32 sets_, ways_;
    BtbReplacement repl_;
    std::vector<BtbEntry> entries_;        // sets_ x ways_
    std::vector<u64> lru_stamp_;           // per entry, for Lru
    std::vector<u32> rr_next_;             // per set, for RoundRobin
    u64 tick_ = 0;
};

class Ras {
  public:
    explicit Ras(u32 depth);
    void push(u64 return_addr);
    std::optional<u64> pop();
    u32 size() const { return count_; }
    u32 depth() const { return depth_; }
    u64 digest() const;

  private:
    u32 depth_;
    std::vector<u64> ring_;
    u32 top_ = 0;    // index of next push slot
    u32 count_ = 0;  // valid entries, <= depth_
};

// Fetch-side loop buffer: captures a small backward-branch loop body and
// supplies it without I-cache accesses while the same body re-executes
// unchanged. Any taken control transfer other than the closing backward
// branch aborts capture/replay.
class LoopBuffer {
  public:
    explicit LoopBuffer(u32 capacity = 16) : capacity_(capacity) {}

    // Called for every fetched instruction, in fetch order; taken_ct/target
    // describe this instruction's own control transfer, if any.
    // Returns true when this instruction was supplied from the buffer.
    bool on_fetch(u64 pc, bool taken_ct, u64 target);
    bool active() const { return state_ == State::Active; }
    u64 supplied() const { return supplied_; }

  private:
    enum class State { Idle, Recording, Active };
    u32 capacity_;
    State state_ = State::Idle;
    u64 loop_start_ = 0, loop_branch_ = 0;
    u32 recorded_ = 0;
    u64 supplied_ = 0;
};

struct BranchTraceRecord {
    u64 pc = 0;
    bool taken = false;
    u64 target = 0;
};

// Direction-prediction mispredict rate over a (pc, outcome) stream:
// predict-then-update per record. Works on any of the BHT classes.
template <typename Predictor>
double mispredict_rate(const std::vector<BranchTraceRecord>& stream, Predictor& p) {
    if (stream.empty()) throw SimError(ErrCode::EmptyStream, "branch stream is empty");
    u64 wrong = 0;
    for (const auto& r : stream) {
        if (p.predict(r.pc) != r.taken) ++wrong;
        p.update(r.pc, r.taken);
    }
    return double(wrong) / double(stream.size());
}

std::vector<BranchTraceRecord> parse_branch_trace(const std::string& text);
std::string format_branch_trace(const std::vector<BranchTraceRecord>& stream);

// ---------------------------------------------------------------------------
// Whole-front-end bundle: one direction predictor, one or two BTB levels,
// a RAS, and optionally a loop buffer, driven by the committed stream.

enum class PredictorKind { Bimodal, TwoLevel, Hybrid };
const char* predictor_kind_name(PredictorKind k);
PredictorKind predictor_kind_from_name(const std::string& name);

struct PredictorConfig {
    PredictorKind kind = PredictorKind::Bimodal;
    u32 bht_entries = 128;
    u32 history_bits = 3;  // two-level private history width
    // Hybrid (global + local + chooser) geometry.
    u32 global_history_bits = 12;
    u32 local_entries = 1024;
    u32 local_history_bits = 8;
    u32 chooser_entries = 1024;
    // Target prediction.
    u32 btb_entries = 32;
    u32 btb_ways = 1;        // 1 = direct-mapped
    u32 l0_btb_entries = 0;  // 0 = no L0 level; L0 is fully associative, LRU
    u32 ras_depth = 2;
    bool loop_buffer = false;
    u32 loop_buffer_entries = 16;
};

struct FetchOutcome {
    bool mispredict = false;    // wrong direction or no/incorrect fetch-time target
    u32 bubbles = 0;            // extra fetch bubbles on a correct prediction (L0 miss, L1 hit)
    bool loop_supplied = false; // instruction supplied by the loop buffer (no I-cache access)
};

struct FrontendStats {
    u64 branches = 0;  // conditional branches seen
    u64 branch_mispredicts = 0;
    u64 jumps = 0;  // unconditional jumps, calls included
    u64 jump_mispredicts = 0;
    u64 returns = 0;
    u64 return_mispredicts = 0;
    u64 l0_hits = 0;
    u64 loop_supplied = 0;

    u64 control_transfers() const { return branches + jumps + returns; }
    u64 mispredicts() const {
        return branch_mispredicts + jump_mispredicts + return_mispredicts;
    }
};

struct RetireRecord;  // golden.hpp

class PredictorSuite {
  public:
    explicit PredictorSuite(const PredictorConfig& cfg);

    // Called once per instruction in fetch (== commit) order; consults the
    // direction predictor, BTB levels, RAS and loop buffer.
    FetchOutcome on_fetch(const RetireRecord& rec);
    // Called once per instruction in retirement order; trains BHT and BTBs.
    void on_retire(const RetireRecord& rec);

    const FrontendStats& stats() const { return stats_; }
    u64 digest() const;

  private:
    bool predict_direction(u64 pc) const;
    void update_direction(u64 pc, bool taken);
    // Returns predicted target and whether it came from the L0 level.
    struct TargetPrediction {
        std::optional<u64> target;
        bool from_l0 = false;
    };
    TargetPrediction predict_target(u64 pc);

    PredictorConfig cfg_;
    std::unique_ptr<BimodalBht> bimodal_;
    std::unique_ptr<TwoLevelBht> two_level_;
    std::unique_ptr<HybridBht> hybrid_;
    std::unique_ptr<Btb> l0_btb_;
    Btb btb_;
    Ras ras_;
    std::unique_ptr<LoopBuffer> loop_;
    FrontendStats stats_;
};

}  // namespace rvsim
