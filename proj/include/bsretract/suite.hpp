#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bsretract/io.hpp"

namespace bsretract {

struct SuiteConfig {
    std::vector<int> p_list;
    std::vector<int> q_list;
    int n_max = 3;
    std::vector<std::uint64_t> seeds;
    FlowConfig flow;
    PipelineOptions pipeline;
    RandomRepOptions rep_options;
    unsigned threads = 0;  // 0: hardware concurrency, capped by BSRETRACT_THREADS
};

/// Outcome of one random_rep -> full_pipeline run and its hard-invariant checks.
struct RunRecord {
    int p = 0;
    int q = 0;
    int n = 0;
    std::uint64_t seed = 0;
    bool converged = false;            // flow reached cfg.tol
    bool meets_moment_threshold = false;  // final |mu| <= 1e-8 (1 + energy)
    std::string failure;               // stage error text, empty on success
    PipelineDiagnostics diagnostics;
    double idempotence_defect = 0.0;
    std::vector<std::string> violations;
    Json manifest;
    std::string manifest_hash;
};

struct SuiteReport {
    std::vector<RunRecord> runs;
    std::vector<std::pair<int, int>> rejected_pairs;  // fail the group hypotheses

    bool hard_invariants_hold() const;
    Json to_json() const;
};

/// Thresholds for the hard invariants checked per run.
inline constexpr double kEndpointTol = 1e-8;
inline constexpr double kIdempotenceTol = 1e-9;
inline constexpr double kMomentThreshold = 1e-8;

/// Sweeps random_rep over (p, q, n, seed); deterministic output ordering.
SuiteReport run_suite(const SuiteConfig& config);

/// Runs one grid point; exposed for callers that schedule their own work.
RunRecord run_one(int p, int q, int n, std::uint64_t seed, const SuiteConfig& config);

/// Worker count after applying BSRETRACT_THREADS.
unsigned worker_count(unsigned requested);

Json flow_config_json(const FlowConfig& cfg);

}  // namespace bsretract
