#include "rvsim/predictors.hpp"

#include <sstream>

#include "rvsim/golden.hpp"

namespace rvsim {

namespace {

void check_pow2(u32 v, const char* what) {
    if (v == 0 || (v & (v - 1)) != 0)
        throw SimError(ErrCode::ParameterOutOfRange, std::string(what) + " must be a power of two");
}

void bump(u8& counter, bool taken) {
    if (taken) {
        if (counter < 3) ++counter;
    } else {
        if (counter > 0) --counter;
    }
}

u64 table_digest(const std::vector<u8>& t, u64 seed) {
    Digest d;
    d.feed(seed);
    for (u8 v : t) d.feed(v);
    return d.value();
}

}  // namespace

BimodalBht::BimodalBht(u32 entries) {
    check_pow2(entries, "bht entries");
    counters_.assign(entries, 1);
}

bool BimodalBht::predict(u64 pc) const { return counters_[index(pc)] >= 2; }

void BimodalBht::update(u64 pc, bool taken) { bump(counters_[index(pc)], taken); }

u64 BimodalBht::digest() const { return table_digest(counters_, 0xb1); }

TwoLevelBht::TwoLevelBht(u32 entries, u32 history_bits) : history_bits_(history_bits) {
    check_pow2(entries, "bht entries");
    if (history_bits_ == 0 || history_bits_ > 16)
        throw SimError(ErrCode::ParameterOutOfRange, "history bits out of range");
    histories_.assign(entries, 0);
    pattern_.assign(u64(entries) << history_bits_, 1);
}

bool TwoLevelBht::predict(u64 pc) const {
    u32 i = index(pc);
    return pattern_[(u64(i) << history_bits_) | histories_[i]] >= 2;
}

void TwoLevelBht::update(u64 pc, bool taken) {
    u32 i = index(pc);
    u64 pi = (u64(i) << history_bits_) | histories_[i];
    bump(pattern_[pi], taken);
    histories_[i] = u8(((histories_[i] << 1) | u8(taken)) & ((1u << history_bits_) - 1));
}

u64 TwoLevelBht::digest() const {
    Digest d;
    d.feed(table_digest(histories_, 0x21));
    d.feed(table_digest(pattern_, 0x22));
    return d.value();
}

HybridBht::HybridBht(u32 global_history_bits, u32 local_entries, u32 local_history_bits,
                     u32 chooser_entries)
    : ghr_bits_(global_history_bits), local_(local_entries, local_history_bits) {
    if (ghr_bits_ == 0 || ghr_bits_ > 24)
        throw SimError(ErrCode::ParameterOutOfRange, "global history bits out of range");
    check_pow2(chooser_entries, "chooser entries");
    global_.assign(1u << ghr_bits_, 1);
    chooser_.assign(chooser_entries, 1);
}

bool HybridBht::predict(u64 pc) const {
    return chooser_[chooser_index(pc)] >= 2 ? global_predict(pc) : local_.predict(pc);
}

const char* HybridBht::predict_source(u64 pc) const {
    return chooser_[chooser_index(pc)] >= 2 ? "global" : "local";
}

void HybridBht::update(u64 pc, bool taken) {
    bool g = global_predict(pc);
    bool l = local_.predict(pc);
    if (g != l) bump(chooser_[chooser_index(pc)], g == taken);
    bump(global_[global_index(pc)], taken);
    local_.update(pc, taken);
    ghr_ = ((ghr_ << 1) | u64(taken)) & ((1ULL << ghr_bits_) - 1);
}

u64 HybridBht::digest() const {
    Digest d;
    d.feed(ghr_);
    d.feed(table_digest(global_, 0x31));
    d.feed(local_.digest());
    d.feed(table_digest(chooser_, 0x32));
    return d.value();
}

Btb::Btb(u32 entries, u32 ways, BtbReplacement repl) : ways_(ways), repl_(repl) {
    if (ways == 0 || entries == 0 || entries % ways != 0)
        throw SimError(ErrCode::ParameterOutOfRange, "btb geometry");
    sets_ = entries / ways;
    check_pow2(sets_, "btb sets");
    entries_.assign(entries, BtbEntry{});
    lru_stamp_.assign(entries, 0);
    rr_next_.assign(sets_, 0);
}

std::optional<u64> Btb::predict(u64 pc) const {
    u32 s = set_of(pc);
    u64 tag = tag_of(pc);
    for (u32 w = 0; w < ways_; ++w) {
        const BtbEntry& e = entries_[s * ways_ + w];
        if (e.valid && e.tag == tag) return e.target;
    }
    return std::nullopt;
}

void Btb::update(u64 pc, u64 target) {
    u32 s = set_of(pc);
    u64 tag = tag_of(pc);
    ++tick_;
    u32 base = s * ways_;
    for (u32 w = 0; w < ways_; ++w) {
        BtbEntry& e = entries_[base + w];
        if (e.valid && e.tag == tag) {
            e.target = target;
            lru_stamp_[base + w] = tick_;
            return;
        }
    }
    u32 victim = 0;
    for (u32 w = 0; w < ways_; ++w) {
        if (!entries_[base + w].valid) {
            victim = w;
            goto install;
        }
    }
    switch (repl_) {
        case BtbReplacement::DirectMapped:
            victim = 0;
            break;
        case BtbReplacement::Lru: {
            u64 best = UINT64_MAX;
            for (u32 w = 0; w < ways_; ++w)
                if (lru_stamp_[base + w] < best) {
                    best = lru_stamp_[base + w];
                    victim = w;
                }
            break;
        }
        case BtbReplacement::RoundRobin:
            victim = rr_next_[s];
            rr_next_[s] = (rr_next_[s] + 1) % ways_;
            break;
    }
install:
    entries_[base + victim] = {true, tag, target};
    lru_stamp_[base + victim] = tick_;
}

u32 Btb::occupancy() const {
    u32 n = 0;
    for (const auto& e : entries_) n += e.valid ? 1 : 0;
    return n;
}

u64 Btb::digest() const {
    Digest d;
    for (const auto& e : entries_) {
        d.feed(e.valid);
        d.feed(e.tag);
        d.feed(e.target);
    }
    return d.value();
}

Ras::Ras(u32 depth) : depth_(depth), ring_(depth, 0) {
    if (depth == 0) throw SimError(ErrCode::ParameterOutOfRange, "ras depth must be positive");
}

void Ras::push(u64 return_addr) {
    ring_[top_] = return_addr;
    top_ = (top_ + 1) % depth_;
    if (count_ < depth_) ++count_;  // overflow overwrites the oldest entry
}

std::optional<u64> Ras::pop() {
    if (count_ == 0) return std::nullopt;
    top_ = (top_ + depth_ - 1) % depth_;
    --count_;
    return ring_[top_];
}

u64 Ras::digest() const {
    Digest d;
    d.feed(top_);
    d.feed(count_);
    for (u64 v : ring_) d.feed(v);
    return d.value();
}

bool LoopBuffer::on_fetch(u64 pc, bool taken_ct, u64 target) {
    switch (state_) {
        case State::Idle:
            if (taken_ct && target < pc) {  // backward taken branch starts a capture
                state_ = State::Recording;
                loop_start_ = target;
                loop_branch_ = pc;
                recorded_ = 0;
            }
            return false;
        case State::Recording:
            if (pc < loop_start_ || pc > loop_branch_) {  // body left before closing the loop
                state_ = State::Idle;
                return on_fetch(pc, taken_ct, target);
            }
            ++recorded_;
            if (recorded_ > capacity_) {  // body too large to capture
                state_ = State::Idle;
                return false;
            }
            if (taken_ct) {
                if (pc == loop_branch_ && target == loop_start_) {
                    state_ = State::Active;
                } else {  // a different taken transfer: not a straight re-executable body
                    state_ = State::Idle;
                    return on_fetch(pc, taken_ct, target);
                }
            }
            return false;
        case State::Active:
            if (pc < loop_start_ || pc > loop_branch_) {  // loop exit
                state_ = State::Idle;
                return on_fetch(pc, taken_ct, target);
            }
            if (taken_ct && !(pc == loop_branch_ && target == loop_start_)) {
                state_ = State::Idle;  // body diverged; next fetch refills from I-cache
            } else if (pc == loop_branch_ && !taken_ct) {
                state_ = State::Idle;  // final iteration falls through
            }
            ++supplied_;
            return true;
    }
    return false;
}

std::vector<BranchTraceRecord> parse_branch_trace(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<BranchTraceRecord> out;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
        std::istringstream ls(line);
        std::string pc_s, dir_s, tgt_s;
        if (!(ls >> pc_s)) continue;  // blank line
        if (!(ls >> dir_s >> tgt_s) || (dir_s != "T" && dir_s != "N"))
            throw SimError(ErrCode::ParseError,
                           "branch trace line " + std::to_string(line_no) + ": want '<pc-hex> <T|N> <target-hex>'");
        std::string extra;
        if (ls >> extra)
            throw SimError(ErrCode::ParseError,
                           "branch trace line " + std::to_string(line_no) + ": trailing token '" + extra + "'");
        try {
            out.push_back({std::stoull(pc_s, nullptr, 16), dir_s == "T", std::stoull(tgt_s, nullptr, 16)});
        } catch (const std::exception&) {
            throw SimError(ErrCode::ParseError, "branch trace line " + std::to_string(line_no) + ": bad hex");
        }
    }
    return out;
}

std::string format_branch_trace(const std::vector<BranchTraceRecord>& stream) {
    std::string out;
    for (const auto& r : stream) {
        out += to_hex(r.pc);
        out += r.taken ? " T " : " N ";
        out += to_hex(r.target);
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// PredictorSuite

const char* predictor_kind_name(PredictorKind k) {
    switch (k) {
        case PredictorKind::Bimodal: return "bimodal";
        case PredictorKind::TwoLevel: return "two_level";
        case PredictorKind::Hybrid: return "hybrid";
    }
    return "?";
}

PredictorKind predictor_kind_from_name(const std::string& name) {
    if (name == "bimodal") return PredictorKind::Bimodal;
    if (name == "two_level") return PredictorKind::TwoLevel;
    if (name == "hybrid") return PredictorKind::Hybrid;
    throw SimError(ErrCode::ConfigError, "unknown predictor kind '" + name + "'");
}

PredictorSuite::PredictorSuite(const PredictorConfig& cfg)
    : cfg_(cfg),
      btb_(cfg.btb_entries, cfg.btb_ways,
           cfg.btb_ways == 1 ? BtbReplacement::DirectMapped : BtbReplacement::RoundRobin),
      ras_(cfg.ras_depth) {
    switch (cfg_.kind) {
        case PredictorKind::Bimodal:
            bimodal_ = std::make_unique<BimodalBht>(cfg_.bht_entries);
            break;
        case PredictorKind::TwoLevel:
            two_level_ = std::make_unique<TwoLevelBht>(cfg_.bht_entries, cfg_.history_bits);
            break;
        case PredictorKind::Hybrid:
            hybrid_ =
                std::make_unique<HybridBht>(cfg_.global_history_bits, cfg_.local_entries,
                                            cfg_.local_history_bits, cfg_.chooser_entries);
            break;
    }
    if (cfg_.l0_btb_entries > 0)
        l0_btb_ = std::make_unique<Btb>(cfg_.l0_btb_entries, cfg_.l0_btb_entries,
                                        BtbReplacement::Lru);
    if (cfg_.loop_buffer) loop_ = std::make_unique<LoopBuffer>(cfg_.loop_buffer_entries);
}

bool PredictorSuite::predict_direction(u64 pc) const {
    if (bimodal_) return bimodal_->predict(pc);
    if (two_level_) return two_level_->predict(pc);
    return hybrid_->predict(pc);
}

void PredictorSuite::update_direction(u64 pc, bool taken) {
    if (bimodal_) bimodal_->update(pc, taken);
    else if (two_level_) two_level_->update(pc, taken);
    else hybrid_->update(pc, taken);
}

PredictorSuite::TargetPrediction PredictorSuite::predict_target(u64 pc) {
    if (l0_btb_) {
        if (auto t = l0_btb_->predict(pc)) {
            stats_.l0_hits++;
            return {t, true};
        }
    }
    return {btb_.predict(pc), false};
}

FetchOutcome PredictorSuite::on_fetch(const RetireRecord& rec) {
    FetchOutcome out;
    bool is_ct = rec.is_control_transfer();
    if (loop_) {
        bool taken_ct = is_ct && rec.taken;
        out.loop_supplied = loop_->on_fetch(rec.pc, taken_ct, taken_ct ? rec.next_pc : 0);
        if (out.loop_supplied) stats_.loop_supplied++;
    }
    if (!is_ct) return out;

    u64 fallthrough = rec.pc + rec.instr.width;

    if (rec.instr.mn == Mnemonic::JALR) {
        // Indirect: RAS for returns, BTB otherwise (and as empty-RAS fallback).
        if (rec.is_call) ras_.push(fallthrough);
        bool predicted = false;
        if (rec.is_return) {
            stats_.returns++;
            if (auto top = ras_.pop()) {
                predicted = (*top == rec.next_pc);
                if (!predicted) stats_.return_mispredicts++;
                out.mispredict = !predicted;
                return out;
            }
            // Empty RAS: fall through to the BTB.
            TargetPrediction tp = predict_target(rec.pc);
            predicted = tp.target && *tp.target == rec.next_pc;
            if (predicted && !tp.from_l0 && l0_btb_) out.bubbles = 1;
            if (!predicted) stats_.return_mispredicts++;
            out.mispredict = !predicted;
            return out;
        }
        stats_.jumps++;
        TargetPrediction tp = predict_target(rec.pc);
        predicted = tp.target && *tp.target == rec.next_pc;
        if (predicted && !tp.from_l0 && l0_btb_) out.bubbles = 1;
        if (!predicted) stats_.jump_mispredicts++;
        out.mispredict = !predicted;
        return out;
    }

    if (rec.is_jump) {  // direct jumps: JAL / c.j
        stats_.jumps++;
        if (rec.is_call) ras_.push(fallthrough);
        TargetPrediction tp = predict_target(rec.pc);
        bool predicted = tp.target && *tp.target == rec.next_pc;
        if (predicted && !tp.from_l0 && l0_btb_) out.bubbles = 1;
        if (!predicted) stats_.jump_mispredicts++;
        out.mispredict = !predicted;
        return out;
    }

    // Conditional branch: direction first, then (if taken) the target.
    stats_.branches++;
    bool dir = predict_direction(rec.pc);
    if (dir != rec.taken) {
        stats_.branch_mispredicts++;
        out.mispredict = true;
        return out;
    }
    if (rec.taken) {
        TargetPrediction tp = predict_target(rec.pc);
        bool target_ok = tp.target && *tp.target == rec.next_pc;
        if (!target_ok) {
            stats_.branch_mispredicts++;
            out.mispredict = true;
            return out;
        }
        if (!tp.from_l0 && l0_btb_) out.bubbles = 1;
    }
    return out;
}

void PredictorSuite::on_retire(const RetireRecord& rec) {
    if (!rec.is_control_transfer()) return;
    if (rec.is_branch) update_direction(rec.pc, rec.taken);
    if (rec.taken) {
        btb_.update(rec.pc, rec.next_pc);
        if (l0_btb_) l0_btb_->update(rec.pc, rec.next_pc);
    }
}

u64 PredictorSuite::digest() const {
    Digest d;
    if (bimodal_) d.feed(bimodal_->digest());
    if (two_level_) d.feed(two_level_->digest());
    if (hybrid_) d.feed(hybrid_->digest());
    d.feed(btb_.digest());
    if (l0_btb_) d.feed(l0_btb_->digest());
    d.feed(ras_.digest());
    return d.value();
}

}  // namespace rvsim
