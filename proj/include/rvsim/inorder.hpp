#pragma once

#include <vector>

#include "rvsim/config.hpp"
#include "rvsim/fetch.hpp"
#include "rvsim/golden.hpp"
#include "rvsim/memhier.hpp"
#include "rvsim/metrics.hpp"

namespace rvsim {

// Static dual-issue pair rule: can `b` issue in the second slot alongside
// `a` in the first, ignoring dynamic operand/unit state?
struct PairDecision {
    bool legal = true;
    const char* reason = "ok";
};
PairDecision issue_pair_legal(const Instr& a, bool a_taken_ct, const Instr& b,
                              const CoreConfig& cfg);

// One line of the issue log (diagnostics / pairing audits). seq1 < 0 means
// the second slot stayed empty; reason tells why.
struct IssueEvent {
    u64 cycle = 0;
    i64 seq0 = -1;
    i64 seq1 = -1;
    const char* slot1_reason = "";
};

struct SimOptions {
    bool collect_issue_log = false;
    u64 cycle_limit = 0;  // 0 = automatic guard based on stream length
};

RunMetrics simulate_inorder(const CoreConfig& cfg, const std::vector<RetireRecord>& stream,
                            MemHier& mem, const SimOptions& opt = {},
                            std::vector<IssueEvent>* issue_log = nullptr);

}  // namespace rvsim
