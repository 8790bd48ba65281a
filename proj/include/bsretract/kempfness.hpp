#pragma once

#include <cstdint>
#include <vector>

#include "bsretract/bsrep.hpp"

namespace bsretract {

struct FlowConfig {
    double tol = 1e-10;     // stop when |mu|_HS <= tol * (1 + energy)
    long max_iter = 100000;
    double eta0 = 0.1;      // initial step, reset every iteration
    double armijo = 0.5;
    double shrink = 0.5;
    bool sl_mode = false;
    bool track_residual = true;

    /// Throws InvalidArgument.
    void validate() const;
};

struct FlowRecord {
    long iter = 0;
    double energy = 0.0;
    double moment_norm = 0.0;
    double step = 0.0;       // accepted eta (0 for the final record)
    double decrease = 0.0;   // energy change of the accepted step, computed without cancellation
};

enum class FlowOutcome { Converged, IterBudget };

struct FlowTrace {
    std::vector<FlowRecord> records;  // one per visited point, the last one is the endpoint
    FlowOutcome outcome = FlowOutcome::IterBudget;
    bool stalled = false;             // line search found no admissible step
    double initial_residual = 0.0;
    double max_residual = 0.0;

    long iterations() const { return records.empty() ? 0 : static_cast<long>(records.size()) - 1; }
    const FlowRecord& final_record() const { return records.back(); }

    /// Every accepted step lowered the energy: its exact decrease is <= 0 and
    /// the recomputed energies never rise beyond floating-point rounding.
    bool energy_monotone() const;
};

struct FlowResult {
    Rep rep;
    FlowTrace trace;
};

/// |A|^2 + |B|^2 (Hilbert-Schmidt).
double kn_energy(const Rep& rep);

/// mu = [A, A^dagger] + [B, B^dagger], the gradient at the identity of
/// g -> |g . rho|^2 along Hermitian directions: d/dt F(e^{tH} . rho) = 2 Re tr(H mu).
CMatrix moment_map(const Rep& rep, bool sl_mode = false);

/// Conjugation by exp(-eta mu).
Rep flow_step(const Rep& rep, double eta, bool sl_mode = false);

/// Armijo-backtracked moment-map descent on the conjugation orbit.
FlowResult flow(const Rep& rep, const FlowConfig& cfg = {});

struct MinimalityReport {
    int samples = 0;
    double min_margin = 0.0;  // min over samples of F(g . rho) - F(rho)
    double tol = 0.0;
    bool pass = false;
};

/// Sampling probe of "|rho| <= |g . rho| for all g" with g = exp(s H), |H| = 1,
/// s uniform in (0, spread]. Can refute minimality, never prove it.
MinimalityReport verify_minimal(const Rep& rep, int samples, double spread, double tol, std::uint64_t seed);

}  // namespace bsretract
