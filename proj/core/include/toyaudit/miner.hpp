#pragma once

#include <cstdint>
#include <set>
#include <string>

#include "toyaudit/token_space.hpp"

namespace toyaudit {

struct MinerConfig {
    std::string target;  // base URL, e.g. http://127.0.0.1:8473
    TokenSpace space;
    int workers{1};
    std::uint64_t seed{0};
    bool unlimited_budget{true};
    std::uint64_t suffix_budget{0};  // probes per prefix when bounded
    double target_fraction{1.0};     // <1 stops once that share of planted tokens is in
    std::size_t known_planted_count{0};  // required for fraction mode (testbed use)
    int request_delay_ms{0};             // enforced across all workers
    int oracle_valid_status{301};
    int oracle_invalid_status{404};
    std::string prefix_path_template{"/api/photo/{}"};
    std::string token_path_template{"/api/photo/{}/{}"};  // prefix, then full token
    bool allow_non_loopback{false};  // --i-own-this-target
    int timeout_s{5};
};

struct MiningResult {
    std::set<std::string> valid_prefixes;
    std::set<std::string> recovered_tokens;
    std::uint64_t probes_sent{0};
    double elapsed_seconds{0.0};
    std::uint64_t prefix_probes{0};
    std::uint64_t suffix_probes{0};
    std::string completion;  // complete | budget_exhausted | fraction_reached
};

// Number of oracle probes a full sweep needs (A^P) — the dry-run figure.
std::uint64_t planned_prefix_probes(const MinerConfig& config);

// Phase 1: every prefix exactly once against the truncated-token oracle.
// Throws OracleAmbiguous on a status that is neither the valid nor the
// invalid one, TargetUnreachable on transport failure, NonLoopbackTarget
// unless the acknowledgment flag is set.
std::set<std::string> sweep_prefixes(const MinerConfig& config,
                                     std::uint64_t* probes_out = nullptr);

// Phase 2: workers walk their disjoint suffix streams for each prefix.
MiningResult mine_suffixes(const MinerConfig& config, const std::set<std::string>& prefixes);

// Both phases plus wall-clock accounting.
MiningResult run_miner(const MinerConfig& config);

std::string mining_result_to_json(const MiningResult& result);

struct RuntimeEstimate {
    double seconds{0.0};
    std::string human;
};

// seconds = probes * fraction * rtt / workers; the human string switches
// units at 120 s / 120 min / 48 h / 730 days.
RuntimeEstimate estimate_runtime(std::uint64_t probes, double rtt_seconds, int workers,
                                 double fraction);

}  // namespace toyaudit
