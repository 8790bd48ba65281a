// Acceptance harness: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "bsretract/cli.hpp"
#include "bsretract/io.hpp"
#include "bsretract/random.hpp"
#include "bsretract/suite.hpp"
#include "oracles.hpp"

using namespace bsretract;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

// |A B^p A^-1 - B^q| with plain Eigen arithmetic.
double residual_oracle(const CMatrix& a, const CMatrix& b, int p, int q) {
    auto power = [](const CMatrix& m, int k) {
        const CMatrix base = k < 0 ? CMatrix(m.inverse()) : m;
        CMatrix out = CMatrix::Identity(m.rows(), m.cols());
        for (int i = 0; i < std::abs(k); ++i) out = out * base;
        return out;
    };
    return (a * power(b, p) * a.inverse() - power(b, q)).norm();
}

BigInt gap_oracle(int p, int q, int k) {
    return abs(boost::multiprecision::pow(BigInt(p), k) - boost::multiprecision::pow(BigInt(q), k));
}

// ---------------------------------------------------------------------------
// Criteria 1-4 share one sweep over the grid.

struct GridRun {
    int p, q, n;
    std::uint64_t seed;
    Rep start;
    PipelineResult result;
    std::string error;
};

struct Grid {
    std::vector<GridRun> runs;
    double seconds = 0.0;
};

Grid run_grid() {
    std::vector<std::pair<int, int>> pairs;
    for (auto [p, q] : {std::pair{1, 2}, {2, 3}, {1, 3}, {2, 5}, {3, 5}}) {
        for (int sp : {1, -1}) {
            for (int sq : {1, -1}) pairs.emplace_back(sp * p, sq * q);
        }
    }
    Grid grid;
    const auto t0 = std::chrono::steady_clock::now();
    for (auto [p, q] : pairs) {
        for (int n = 1; n <= 4; ++n) {
            for (std::uint64_t seed = 0; seed < 5; ++seed) {
                Rep start = random_rep(p, q, n, seed);
                try {
                    PipelineResult r = full_pipeline(start);
                    grid.runs.push_back({p, q, n, seed, std::move(start), std::move(r), {}});
                } catch (const Error& e) {
                    grid.runs.push_back({p, q, n, seed, start, PipelineResult{start, false, {}, {}, {}}, e.what()});
                }
            }
        }
    }
    grid.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return grid;
}

Outcome criterion_convergence(const Grid& g) {
    int meets = 0, monotone = 0, steps = 0, bad_steps = 0;
    for (const auto& run : g.runs) {
        const auto& recs = run.result.trace.records;
        if (!run.error.empty() || recs.empty()) continue;
        const auto& last = recs.back();
        if (last.moment_norm <= 1e-8 * (1.0 + last.energy) && run.result.trace.iterations() <= 100000) ++meets;
        bool mono = true;
        for (std::size_t i = 1; i < recs.size(); ++i) {
            ++steps;
            const bool ok = recs[i - 1].decrease <= 0.0 &&
                            recs[i].energy <= recs[i - 1].energy * (1.0 + 8 * std::numeric_limits<double>::epsilon());
            if (!ok) {
                ++bad_steps;
                mono = false;
            }
        }
        monotone += mono ? 1 : 0;
    }
    const double total = static_cast<double>(g.runs.size());
    const double rate = meets / total;
    Outcome o;
    o.pass = rate >= 0.95 && bad_steps == 0 && monotone == static_cast<int>(g.runs.size()) && g.seconds <= 300.0;
    o.detail = std::to_string(g.runs.size()) + " runs, moment threshold met " + fmt("%.1f%%", 100 * rate) + ", " +
               std::to_string(bad_steps) + "/" + std::to_string(steps) + " non-monotone steps, " +
               fmt("%.1fs", g.seconds);
    return o;
}

Outcome criterion_structure(const Grid& g) {
    int converged = 0, ok = 0;
    std::string first_failure;
    for (const auto& run : g.runs) {
        if (!run.result.converged && run.error.empty()) continue;
        ++converged;
        bool pass = run.error.empty() && run.result.path.has_value();
        if (pass) {
            const auto& d = run.result.diagnostics;
            const BigInt bound = order_bound(run.p, run.q, run.n);
            BigInt bound_oracle = 1;
            for (int k = 1; k <= run.n; ++k) bound_oracle *= gap_oracle(run.p, run.q, k);
            pass = pass && bound == bound_oracle && d.detected_order >= 1 && BigInt(d.detected_order) <= bound;
            // Eigenvalues of the certified unitary B: each near a root of unity
            // whose order divides |p^k - q^k| for some k <= n.
            const Rep& u = run.result.path->start();
            for (Complex z : eigvals(u.b)) {
                bool found = false;
                for (const auto& r : d.eigenvalue_roots) {
                    if (std::abs(z - r.value()) > 1e-6) continue;
                    for (int k = 1; k <= run.n && !found; ++k) found = gap_oracle(run.p, run.q, k) % r.order == 0;
                }
                pass = pass && found;
            }
            // Normality, recomputed.
            CMatrix bj = CMatrix::Identity(u.dim(), u.dim());
            for (std::int64_t j = 0; j < d.normality_exponent; ++j) bj = bj * u.b;
            pass = pass && (u.a * u.b * u.a.inverse() - bj).norm() <= 1e-6;
        }
        if (pass) {
            ++ok;
        } else if (first_failure.empty()) {
            first_failure = " first failure (" + std::to_string(run.p) + "," + std::to_string(run.q) +
                            ") n=" + std::to_string(run.n) + " seed=" + std::to_string(run.seed) + " " + run.error;
        }
    }
    return {converged > 0 && ok == converged,
            std::to_string(ok) + "/" + std::to_string(converged) + " converged endpoints certified" + first_failure};
}

Outcome criterion_variety(const Grid& g) {
    int violations = 0, checked = 0;
    double worst_flow = 0.0, worst_path = 0.0;
    for (const auto& run : g.runs) {
        if (!run.error.empty()) {
            ++violations;
            continue;
        }
        const double initial = residual_oracle(run.start.a, run.start.b, run.p, run.q);
        const double cap = 1e-8 + 10.0 * initial;
        ++checked;
        const double flow_res = run.result.trace.max_residual;
        worst_flow = std::max(worst_flow, flow_res);
        if (!(flow_res <= cap)) ++violations;
        if (run.result.path) {
            if (run.result.path->samples.size() != 100) ++violations;
            for (const auto& s : run.result.path->samples) {
                const double r = residual_oracle(s.rep.a, s.rep.b, run.p, run.q);
                worst_path = std::max(worst_path, r);
                if (!(r <= cap)) ++violations;
            }
        }
        // Endpoint of the flow, recomputed.
        if (!(residual_oracle(run.result.endpoint.a, run.result.endpoint.b, run.p, run.q) <= cap)) ++violations;
    }
    return {violations == 0 && checked > 0, std::to_string(violations) + " violations; max flow residual " +
                                                 fmt("%.2e", worst_flow) + ", max path residual " +
                                                 fmt("%.2e", worst_path)};
}

Outcome criterion_endpoint(const Grid& g) {
    int converged = 0, unitary = 0, idempotent = 0;
    double worst_idem = 0.0;
    for (const auto& run : g.runs) {
        if (!run.result.converged || !run.error.empty()) continue;
        ++converged;
        const Rep& e = run.result.endpoint;
        const bool direct = (e.a.adjoint() * e.a - CMatrix::Identity(e.dim(), e.dim())).norm() <= 1e-8 &&
                            (e.b.adjoint() * e.b - CMatrix::Identity(e.dim(), e.dim())).norm() <= 1e-8 &&
                            residual_oracle(e.a, e.b, run.p, run.q) <= 1e-8;
        if (verify_unitary_rep(e, 1e-8) && direct) ++unitary;
        try {
            const PipelineResult again = full_pipeline(e);
            const double d = std::max((again.endpoint.a - e.a).norm(), (again.endpoint.b - e.b).norm());
            worst_idem = std::max(worst_idem, d);
            if (again.converged && d <= 1e-9) ++idempotent;
        } catch (const Error&) {
        }
    }
    return {converged > 0 && unitary == converged && idempotent == converged,
            std::to_string(unitary) + "/" + std::to_string(converged) + " unitary endpoints, " +
                std::to_string(idempotent) + "/" + std::to_string(converged) + " idempotent (max defect " +
                fmt("%.2e", worst_idem) + ")"};
}

// ---------------------------------------------------------------------------

Outcome criterion_kappa() {
    CounterRng rng(0x6b617070);
    int ok = 0, unitary_groups = 0, unitary_ok = 0;
    double worst_inv = 0.0, worst_id = 0.0;
    std::string failure;
    const int trials = 1000;
    for (int trial = 0; trial < trials; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(4));
        const int r = 1 + static_cast<int>(rng.below(24));
        Eigen::VectorXcd d(n);
        for (int i = 0; i < n; ++i) d(i) = std::polar(1.0, kTwoPi * double(rng.below(r)) / r);
        d(0) = std::polar(1.0, kTwoPi / r);  // exact order r
        const bool is_unitary = trial % 2 == 1;
        const CMatrix s = is_unitary ? random_unitary(rng, n) : random_well_conditioned(rng, n, 100.0);
        const CMatrix b = s * d.asDiagonal() * s.inverse();
        try {
            const std::int64_t order = detect_finite_order(b, 24, 1e-6);
            if (order != r) throw Error(ErrorCode::NotFiniteOrder, "detected order " + std::to_string(order));
            const FiniteCyclicGroup h = generated_group(b, order);
            const HermitianForm f = averaged_form(h);
            double inv = 0.0;
            for (const CMatrix& e : h.elements) inv = std::max(inv, (e.adjoint() * f.q * e - f.q).norm());
            worst_inv = std::max(worst_inv, inv);
            bool pass = inv <= 1e-8;
            if (is_unitary) {
                ++unitary_groups;
                const double id = (f.q - CMatrix::Identity(n, n)).norm();
                worst_id = std::max(worst_id, id);
                if (id <= 1e-10) ++unitary_ok;
                pass = pass && id <= 1e-10;
            }
            ok += pass ? 1 : 0;
        } catch (const Error& e) {
            if (failure.empty()) failure = std::string(" first error: ") + e.what();
        }
    }
    return {ok == trials, std::to_string(ok) + "/" + std::to_string(trials) + " groups; max |h'Qh - Q| " +
                              fmt("%.2e", worst_inv) + ", unitary groups with Q = I: " + std::to_string(unitary_ok) +
                              "/" + std::to_string(unitary_groups) + " (max " + fmt("%.2e", worst_id) + ")" + failure};
}

Outcome criterion_census() {
    int pairs = 0, mismatches = 0, blocks = 0, bad_blocks = 0;
    double worst = 0.0;
    CounterRng rng(0x63656e);
    for (int p = -7; p <= 7; ++p) {
        for (int q = -7; q <= 7; ++q) {
            if (!BSGroup::valid(p, q)) continue;
            ++pairs;
            const CensusReport r = enumerate_orbits(p, q, 4);
            std::set<oracle::OrbitKey> got;
            for (const auto& d : r.orbits) got.insert({d.modulus, d.multiplier, d.orbit});
            if (got != oracle::brute_force_orbits(p, q, 4) || got.size() != r.orbits.size() || !r.gaps.empty()) {
                ++mismatches;
            }
            for (const auto& d : r.orbits) {
                if (d.modulus > 10000) continue;
                ++blocks;
                const Complex chi = std::polar(rng.uniform(0.5, 2.0), kTwoPi * rng.uniform());
                const Rep rep = from_orbit_datum(d, chi);
                const double res = residual_oracle(rep.a, rep.b, p, q);
                worst = std::max(worst, res);
                if (!(res <= 1e-12)) ++bad_blocks;
            }
        }
    }
    const CensusReport bs23 = enumerate_orbits(2, 3, 2);
    const std::vector<OrbitDatum> want{{2, 3, 1, 0, {0}}, {2, 3, 5, 4, {1, 4}}, {2, 3, 5, 4, {2, 3}}};
    const bool exact = bs23.orbits == want;
    return {mismatches == 0 && bad_blocks == 0 && exact && pairs > 0,
            std::to_string(pairs) + " (p,q) pairs, " + std::to_string(mismatches) + " brute-force mismatches; " +
                std::to_string(blocks) + " blocks, max residual " + fmt("%.2e", worst) +
                (exact ? "; BS(2,3) n=2 exact" : "; BS(2,3) n=2 WRONG")};
}

Outcome criterion_gradient() {
    CounterRng rng(0x67726164);
    const std::vector<std::pair<int, int>> pairs{{1, 2}, {2, 3}, {-1, 3}, {2, -5}, {3, 5}};
    int ok = 0;
    double worst = 0.0;
    const int points = 100;
    for (int i = 0; i < points; ++i) {
        const auto [p, q] = pairs[rng.below(pairs.size())];
        const int n = 1 + static_cast<int>(rng.below(4));
        const Rep x = random_rep(p, q, n, rng());
        const CMatrix h = random_unit_hermitian(rng, n);
        const CMatrix mu = moment_map(x);
        const double exact = 2.0 * (h.adjoint() * mu).trace().real();
        const double scale = std::max(std::abs(exact), 2.0 * mu.norm() * h.norm());
        bool pass = true;
        for (double t : {1e-4, 1e-5}) {
            const CMatrix g = oracle::expm(t * h), gi = oracle::expm(-t * h);
            const double fd = (oracle::energy(g * x.a * gi, g * x.b * gi) - oracle::energy(gi * x.a * g, gi * x.b * g)) /
                              (2.0 * t);
            const double err = scale > 0.0 ? std::abs(fd - exact) / scale : std::abs(fd);
            worst = std::max(worst, err);
            pass = pass && err <= 1e-3;
        }
        ok += pass ? 1 : 0;
    }
    return {ok == points, std::to_string(ok) + "/" + std::to_string(points) + " points, max relative error " +
                              fmt("%.2e", worst)};
}

Outcome criterion_falsifiability() {
    const fs::path dir = fs::temp_directory_path() / ("bsretract_acceptance_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
    const auto at = [&](const char* name) { return (dir / name).string(); };
    std::vector<std::string> failures;
    const auto expect = [&](const std::string& what, bool cond) {
        if (!cond) failures.push_back(what);
    };

    for (auto [p, q] : {std::pair{2, 2}, {2, 4}}) {
        const std::string tag = "(" + std::to_string(p) + "," + std::to_string(q) + ")";
        const std::string ps = std::to_string(p), qs = std::to_string(q);
        expect("census " + tag, cli::run({"census", "--p", ps, "--q", qs, "--n-max", "2", "--out", at("c.jsonl")}) ==
                                    cli::kExitBadInput &&
                                    !fs::exists(at("c.jsonl")));
        expect("construct " + tag,
               cli::run({"construct", "--p", ps, "--q", qs, "--n", "2", "--out", at("r.json")}) == cli::kExitBadInput &&
                   !fs::exists(at("r.json")));
        Json j = to_json(Rep(BSGroup(2, 3), CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)));
        j["p"] = p;
        j["q"] = q;
        write_text_file(at("in.json"), j.dump());
        for (const char* cmd : {"flow", "retract", "pipeline", "verify"}) {
            expect(std::string(cmd) + " " + tag,
                   cli::run({cmd, "--in", at("in.json"), "--out", at("out.json"), "--json", at("d.json")}) ==
                           cli::kExitBadInput &&
                       !fs::exists(at("out.json")));
        }
        bool threw = false;
        try {
            BSGroup(p, q);
        } catch (const Error& e) {
            threw = e.code() == ErrorCode::InvalidGroup;
        }
        expect("BSGroup " + tag, threw);
        SuiteConfig cfg;
        cfg.p_list = {p};
        cfg.q_list = {q};
        cfg.seeds = {0};
        const SuiteReport s = run_suite(cfg);
        expect("suite " + tag, s.runs.empty() && s.rejected_pairs.size() == 1);
    }
    fs::remove_all(dir);
    std::string detail = failures.empty() ? "(2,2) and (2,4) refused by every command" : "accepted:";
    for (const auto& f : failures) detail += " " + f;
    return {failures.empty(), detail};
}

}  // namespace

int main() {
    const Grid grid = run_grid();
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 Kempf-Ness convergence", [&] { return criterion_convergence(grid); }},
        {"2 Structural predictions (order bound, roots of unity, normality)", [&] { return criterion_structure(grid); }},
        {"3 Variety conservation along flows and retraction paths", [&] { return criterion_variety(grid); }},
        {"4 Endpoint membership in Hom(BS(p,q), U(n)) and idempotence", [&] { return criterion_endpoint(grid); }},
        {"5 kappa-map invariance and unitary fixed point", criterion_kappa},
        {"6 Census exactness", criterion_census},
        {"7 Moment-map gradient correctness", criterion_gradient},
        {"8 Falsifiability gate", criterion_falsifiability},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        failed += o.pass ? 0 : 1;
    }
    std::fflush(stdout);
    return failed == 0 ? 0 : 1;
}
