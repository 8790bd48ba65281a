#include "bsretract/suite.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <map>
#include <thread>

namespace bsretract {

namespace {

struct GridPoint {
    int p, q, n;
    std::uint64_t seed;
};

double rep_distance(const Rep& x, const Rep& y) { return std::max((x.a - y.a).norm(), (x.b - y.b).norm()); }

void check(RunRecord& rec, bool ok, const char* what) {
    if (!ok) rec.violations.emplace_back(what);
}

}  // namespace

Json flow_config_json(const FlowConfig& cfg) {
    return Json{{"tol", cfg.tol},       {"max_iter", cfg.max_iter}, {"eta0", cfg.eta0},
                {"armijo", cfg.armijo}, {"shrink", cfg.shrink},     {"sl", cfg.sl_mode}};
}

unsigned worker_count(unsigned requested) {
    unsigned n = requested == 0 ? std::max(1U, std::thread::hardware_concurrency()) : requested;
    if (const char* env = std::getenv("BSRETRACT_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
    }
    return n;
}

RunRecord run_one(int p, int q, int n, std::uint64_t seed, const SuiteConfig& config) {
    RunRecord rec;
    rec.p = p;
    rec.q = q;
    rec.n = n;
    rec.seed = seed;
    try {
        RandomRepOptions rep_options = config.rep_options;
        rep_options.special_linear = rep_options.special_linear || config.flow.sl_mode;
        const Rep start = random_rep(p, q, n, seed, rep_options);
        PipelineResult result = full_pipeline(start, config.flow, config.pipeline);
        const PipelineDiagnostics& d = result.diagnostics;
        rec.diagnostics = d;
        rec.converged = result.converged;
        rec.meets_moment_threshold = d.final_moment_norm <= kMomentThreshold * (1.0 + d.final_energy);

        const double drift_cap = kEndpointTol + 10.0 * d.initial_residual;
        check(rec, d.energy_monotone, "energy_monotone");
        check(rec, d.flow_max_residual <= drift_cap, "flow_residual");
        if (result.converged) {
            check(rec, d.order_within_bound, "order_within_bound");
            check(rec, d.order_divides_bound, "order_divides_bound");
            check(rec, d.eigenvalue_orders_admissible, "eigenvalue_orders_admissible");
            check(rec, d.normality_defect <= config.pipeline.normality_tol, "normality");
            check(rec, d.max_path_residual <= drift_cap, "path_residual");
            check(rec, d.path_exponent_constant, "path_exponent_constant");
            check(rec, verify_unitary_rep(result.endpoint, kEndpointTol), "endpoint_unitary");
            try {
                const PipelineResult again = full_pipeline(result.endpoint, config.flow, config.pipeline);
                rec.idempotence_defect = rep_distance(again.endpoint, result.endpoint);
                check(rec, again.converged && rec.idempotence_defect <= kIdempotenceTol, "idempotence");
            } catch (const Error& e) {
                rec.violations.emplace_back("idempotence");
                rec.failure = std::string("idempotence rerun: ") + e.what();
            }
        }
    } catch (const PipelineError& e) {
        rec.failure = e.what();
        // Structure missing at a point the flow certified is a hard violation.
        if (e.stage() != PipelineStage::Input) rec.violations.emplace_back(std::string("stage:") + std::string(to_string(e.stage())));
        else rec.violations.emplace_back("input");
    } catch (const Error& e) {
        rec.failure = e.what();
        rec.violations.emplace_back("construction");
    }

    rec.manifest = Json{{"command", "pipeline"},
                        {"parameters",
                         {{"p", p}, {"q", q}, {"n", n}, {"seed", seed}, {"flow", flow_config_json(config.flow)},
                          {"order_tol", config.pipeline.order_tol},
                          {"normality_tol", config.pipeline.normality_tol},
                          {"num_samples", config.pipeline.num_samples}}},
                        {"inputs", Json::array()},
                        {"outcome",
                         {{"converged", rec.converged},
                          {"violations", rec.violations},
                          {"failure", rec.failure}}}};
    rec.manifest_hash = git_blob_hash(rec.manifest.dump());
    return rec;
}

SuiteReport run_suite(const SuiteConfig& config) {
    SuiteReport report;
    std::vector<GridPoint> grid;
    for (int p : config.p_list) {
        for (int q : config.q_list) {
            if (!BSGroup::valid(p, q)) {
                report.rejected_pairs.emplace_back(p, q);
                continue;
            }
            for (int n = 1; n <= config.n_max; ++n) {
                for (std::uint64_t seed : config.seeds) grid.push_back({p, q, n, seed});
            }
        }
    }

    report.runs.resize(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < grid.size(); i = next++) {
            const GridPoint& g = grid[i];
            report.runs[i] = run_one(g.p, g.q, g.n, g.seed, config);
        }
    };
    const unsigned threads = std::min<std::size_t>(worker_count(config.threads), std::max<std::size_t>(grid.size(), 1));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return report;
}

bool SuiteReport::hard_invariants_hold() const {
    return std::all_of(runs.begin(), runs.end(), [](const RunRecord& r) { return r.violations.empty(); });
}

Json SuiteReport::to_json() const {
    Json runs_json = Json::array();
    Json manifests = Json::object();
    std::size_t converged = 0, threshold = 0, clean = 0;
    long total_iterations = 0;
    std::map<std::int64_t, int> order_hist;
    std::map<std::int64_t, int> exponent_hist;
    for (const RunRecord& r : runs) {
        converged += r.converged ? 1 : 0;
        threshold += r.meets_moment_threshold ? 1 : 0;
        clean += r.violations.empty() ? 1 : 0;
        total_iterations += r.diagnostics.flow_iterations;
        if (r.converged && r.failure.empty()) {
            ++order_hist[r.diagnostics.detected_order];
            ++exponent_hist[r.diagnostics.normality_exponent];
        }
        runs_json.push_back(Json{{"p", r.p},
                                 {"q", r.q},
                                 {"n", r.n},
                                 {"seed", r.seed},
                                 {"converged", r.converged},
                                 {"meets_moment_threshold", r.meets_moment_threshold},
                                 {"failure", r.failure},
                                 {"violations", r.violations},
                                 {"idempotence_defect", r.idempotence_defect},
                                 {"diagnostics", bsretract::to_json(r.diagnostics)},
                                 {"manifest_hash", r.manifest_hash}});
        manifests[r.manifest_hash] = r.manifest;
    }
    Json orders = Json::object(), exponents = Json::object();
    for (const auto& [k, v] : order_hist) orders[std::to_string(k)] = v;
    for (const auto& [k, v] : exponent_hist) exponents[std::to_string(k)] = v;
    Json rejected = Json::array();
    for (const auto& [p, q] : rejected_pairs) rejected.push_back(Json::array({p, q}));

    const auto rate = [&](std::size_t x) { return runs.empty() ? 1.0 : static_cast<double>(x) / runs.size(); };
    return Json{{"summary",
                 {{"runs", runs.size()},
                  {"converged", converged},
                  {"convergence_rate", rate(converged)},
                  {"moment_threshold_rate", rate(threshold)},
                  {"structural_pass_rate", rate(clean)},
                  {"hard_invariants_hold", hard_invariants_hold()},
                  {"total_flow_iterations", total_iterations},
                  {"order_histogram", orders},
                  {"exponent_histogram", exponents},
                  {"rejected_pairs", rejected}}},
                {"runs", runs_json},
                {"manifests", manifests}};
}

}  // namespace bsretract
