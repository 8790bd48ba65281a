#include "bsretract/kempfness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bsretract/random.hpp"

namespace bsretract {

namespace {

constexpr int kMaxBacktracks = 200;

// Conjugation by g = exp(-eta mu) written as increments so that the energy
// difference is formed from the small quantities directly.
struct Step {
    CMatrix a;
    CMatrix b;
    double decrease;
};

Step trial_step(const Rep& rep, const CMatrix& mu, double eta) {
    const ExpHermIncrements inc = exp_herm_increments(-eta * mu);
    auto moved = [&](const CMatrix& x, CMatrix& out) {
        // g X g^-1 - X = D X + X E + D X E with D = g - I, E = g^-1 - I.
        const CMatrix dx = inc.forward * x;
        const CMatrix delta = dx + x * inc.backward + dx * inc.backward;
        out = x + delta;
        // |X + delta|^2 - |X|^2 = 2 Re <X, delta> + |delta|^2
        return 2.0 * (x.conjugate().cwiseProduct(delta)).sum().real() + delta.squaredNorm();
    };
    Step s;
    const double da = moved(rep.a, s.a);
    const double db = moved(rep.b, s.b);
    s.decrease = da + db;
    return s;
}

double safe_residual(const Rep& rep) {
    try {
        return relation_residual(rep);
    } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
    }
}

}  // namespace

void FlowConfig::validate() const {
    const bool ok = tol > 0.0 && max_iter > 0 && eta0 > 0.0 && armijo > 0.0 && armijo < 1.0 &&
                    shrink > 0.0 && shrink < 1.0;
    if (!ok) throw Error(ErrorCode::InvalidArgument, "flow configuration out of range");
}

bool FlowTrace::energy_monotone() const {
    constexpr double kSlack = 8.0 * std::numeric_limits<double>::epsilon();
    for (std::size_t i = 1; i < records.size(); ++i) {
        const FlowRecord& prev = records[i - 1];
        if (prev.decrease > 0.0) return false;
        if (records[i].energy > prev.energy * (1.0 + kSlack)) return false;
    }
    return true;
}

double kn_energy(const Rep& rep) { return rep.a.squaredNorm() + rep.b.squaredNorm(); }

CMatrix moment_map(const Rep& rep, bool sl_mode) {
    CMatrix mu = rep.a * rep.a.adjoint() - rep.a.adjoint() * rep.a + rep.b * rep.b.adjoint() -
                 rep.b.adjoint() * rep.b;
    mu = (mu + mu.adjoint()) * 0.5;
    if (sl_mode) {
        const Complex shift = mu.trace() / static_cast<double>(rep.dim());
        mu.diagonal().array() -= shift;
    }
    return mu;
}

Rep flow_step(const Rep& rep, double eta, bool sl_mode) {
    if (!(eta > 0.0)) throw Error(ErrorCode::InvalidArgument, "step must be positive");
    Step s = trial_step(rep, moment_map(rep, sl_mode), eta);
    return Rep(rep.group, std::move(s.a), std::move(s.b));
}

FlowResult flow(const Rep& start, const FlowConfig& cfg) {
    cfg.validate();
    FlowResult result{start, {}};
    FlowTrace& trace = result.trace;
    Rep& rep = result.rep;
    trace.initial_residual = cfg.track_residual ? safe_residual(rep) : 0.0;
    trace.max_residual = trace.initial_residual;

    for (long iter = 0;; ++iter) {
        const CMatrix mu = moment_map(rep, cfg.sl_mode);
        const double energy = kn_energy(rep);
        const double mu_norm = mu.norm();
        trace.records.push_back({iter, energy, mu_norm, 0.0, 0.0});
        if (mu_norm <= cfg.tol * (1.0 + energy)) {
            trace.outcome = FlowOutcome::Converged;
            break;
        }
        if (iter >= cfg.max_iter) break;

        // Armijo: accept when F(new) - F(old) <= -armijo * eta * 2 |mu|^2.
        const double slope = 2.0 * mu_norm * mu_norm;
        double eta = cfg.eta0;
        bool accepted = false;
        for (int bt = 0; bt < kMaxBacktracks; ++bt, eta *= cfg.shrink) {
            Step s = trial_step(rep, mu, eta);
            if (s.decrease <= -cfg.armijo * eta * slope) {
                trace.records.back().step = eta;
                trace.records.back().decrease = s.decrease;
                rep.a = std::move(s.a);
                rep.b = std::move(s.b);
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            trace.stalled = true;
            break;
        }
        if (cfg.track_residual) trace.max_residual = std::max(trace.max_residual, safe_residual(rep));
    }
    return result;
}

MinimalityReport verify_minimal(const Rep& rep, int samples, double spread, double tol, std::uint64_t seed) {
    CounterRng rng(seed);
    const double base = kn_energy(rep);
    double margin = std::numeric_limits<double>::infinity();
    const int n = rep.dim();
    for (int i = 0; i < samples; ++i) {
        const CMatrix h = random_unit_hermitian(rng, n);
        const double s = spread * (1.0 - rng.uniform());  // (0, spread]
        const CMatrix g = exp_herm(s * h);
        const CMatrix g_inv = exp_herm(-s * h);
        margin = std::min(margin, kn_energy(conjugate(rep, g, g_inv)) - base);
    }
    MinimalityReport report;
    report.samples = samples;
    report.min_margin = samples > 0 ? margin : 0.0;
    report.tol = tol;
    report.pass = report.min_margin >= -tol;
    return report;
}

}  // namespace bsretract
