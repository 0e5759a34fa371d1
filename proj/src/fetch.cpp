#include "rvsim/fetch.hpp"

namespace rvsim {

FetchUnit::FetchUnit(const std::vector<RetireRecord>& stream, PredictorSuite& suite, MemHier& mem,
                     u32 fetch_bytes_per_cycle, u32 buffer_entries)
    : stream_(&stream),
      suite_(&suite),
      mem_(&mem),
      fetch_bytes_(fetch_bytes_per_cycle),
      buffer_entries_(buffer_entries) {}

void FetchUnit::cycle(u64 t) {
    if (awaiting_redirect_ || t < fetch_allowed_) return;
    if (next_idx_ >= stream_->size()) return;
    if (buffer_.size() >= buffer_entries_) return;

    u64 first_pc = (*stream_)[next_idx_].pc;
    u32 budget = fetch_bytes_;
    u64 group_bytes = 0;
    size_t group_begin = buffer_.size();
    bool all_loop_supplied = true;
    bool ends_group = false;

    while (next_idx_ < stream_->size() && buffer_.size() < buffer_entries_) {
        const RetireRecord& rec = (*stream_)[next_idx_];
        if (rec.instr.width > budget) break;

        FetchOutcome outcome = suite_->on_fetch(rec);
        FetchedInstr fi;
        fi.idx = next_idx_;
        fi.outcome = outcome;
        buffer_.push_back(fi);
        next_idx_++;
        budget -= rec.instr.width;
        if (!outcome.loop_supplied) {
            all_loop_supplied = false;
            group_bytes = (rec.pc + rec.instr.width) - first_pc;
        }

        if (outcome.mispredict) {
            awaiting_redirect_ = true;
            ends_group = true;
            break;
        }
        if (rec.is_control_transfer() && rec.taken) {
            fetch_allowed_ = t + 1 + outcome.bubbles;
            ends_group = true;
            break;
        }
    }
    if (buffer_.size() == group_begin) return;  // nothing fetched (budget/buffer)
    if (!ends_group) fetch_allowed_ = t + 1;

    fetch_groups_++;
    fetched_instrs_ += buffer_.size() - group_begin;

    // Loop-buffer-supplied instructions bypass the I-cache entirely.
    u64 ready;
    bool miss = false;
    if (all_loop_supplied) {
        ready = t + 1;
    } else {
        // The first loop-supplied instructions of a partially supplied group
        // still ride on the group's single I-cache access.
        MemResponse r = mem_->ifetch_range(first_pc, u32(group_bytes), t);
        ready = t + r.latency;
        miss = r.level != ServiceLevel::L1Hit || r.retried;
    }
    for (size_t i = group_begin; i < buffer_.size(); i++) {
        buffer_[i].ready_cycle = ready;
        buffer_[i].icache_miss = miss;
    }
}

void FetchUnit::resolve_redirect(u64 resume_cycle) {
    awaiting_redirect_ = false;
    fetch_allowed_ = resume_cycle;
    last_redirect_resume_ = resume_cycle;
}

}  // namespace rvsim
