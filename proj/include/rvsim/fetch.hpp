#pragma once

#include <deque>
#include <vector>

#include "rvsim/golden.hpp"
#include "rvsim/memhier.hpp"
#include "rvsim/predictors.hpp"

namespace rvsim {

// One instruction sitting in the fetch buffer, tagged with the front-end
// prediction outcome observed when it was fetched.
struct FetchedInstr {
    u64 idx = 0;  // index into the committed stream
    FetchOutcome outcome;
    u64 ready_cycle = 0;   // cycle from which the instruction may issue
    bool icache_miss = false;  // group's fetch went past the L1 (or retried)
};

// Replays the committed stream through a byte-budgeted fetch front end:
// groups of consecutive instructions are fetched each cycle until the byte
// budget, a taken control transfer, or a predicted-wrong control transfer
// ends the group. A mispredicted control transfer stops fetch entirely until
// the back end resolves it (resolve_redirect).
class FetchUnit {
  public:
    FetchUnit(const std::vector<RetireRecord>& stream, PredictorSuite& suite, MemHier& mem,
              u32 fetch_bytes_per_cycle, u32 buffer_entries);

    void cycle(u64 t);  // fetch phase: run after the issue phase of cycle t

    bool buffer_empty() const { return buffer_.empty(); }
    size_t buffer_size() const { return buffer_.size(); }
    const FetchedInstr& peek(size_t i) const { return buffer_[i]; }
    void pop_front() { buffer_.pop_front(); }

    // Called by the back end when the mispredicted control transfer issues;
    // fetch resumes at resume_cycle.
    void resolve_redirect(u64 resume_cycle);
    bool awaiting_redirect() const { return awaiting_redirect_; }
    u64 last_redirect_resume() const { return last_redirect_resume_; }

    bool exhausted() const { return next_idx_ == stream_->size(); }

    u64 fetch_groups() const { return fetch_groups_; }
    u64 fetched_instrs() const { return fetched_instrs_; }

  private:
    const std::vector<RetireRecord>* stream_;
    PredictorSuite* suite_;
    MemHier* mem_;
    u32 fetch_bytes_;
    u32 buffer_entries_;

    std::deque<FetchedInstr> buffer_;
    u64 next_idx_ = 0;
    u64 fetch_allowed_ = 0;  // earliest cycle the next group may be fetched
    bool awaiting_redirect_ = false;
    u64 last_redirect_resume_ = 0;
    u64 fetch_groups_ = 0;
    u64 fetched_instrs_ = 0;
};

}  // namespace rvsim
