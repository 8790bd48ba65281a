#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bsretract/compactify.hpp"
#include "bsretract/kempfness.hpp"

namespace bsretract {

struct PathSample {
    double t = 1.0;
    Rep rep;
    double residual = 0.0;
    double unitarity_defect_a = 0.0;
    std::int64_t exponent = 0;  // j with A_t B A_t^-1 = B^j
};

/// A_t = U P^t for t from 1 down to 0, with B held fixed.
struct RetractionPath {
    std::vector<PathSample> samples;
    CMatrix unitary_factor;
    CMatrix positive_factor;
    double commutator_defect = 0.0;  // |[P, B]| / |P|

    const Rep& start() const { return samples.front().rep; }
    const Rep& endpoint() const { return samples.back().rep; }
    double max_residual() const;
    bool exponent_constant() const;
};

inline constexpr double kPolarCommutatorTol = 1e-6;
inline constexpr double kNormalityTol = 1e-6;

/// Polar-scaling retraction of rho(a) with rho(b) unitary of the given order.
/// Throws InvalidArgument when B is not unitary, NotNormalizing, or
/// PolarObstruction when |[P, B]| > 1e-6 |P|.
RetractionPath retract_a(const Rep& rep, std::int64_t order, int num_samples = 100);

enum class PipelineStage { Input, Flow, Order, Group, Form, Unitary, Normality, Retract };

std::string_view to_string(PipelineStage stage);

class PipelineError : public Error {
public:
    PipelineError(PipelineStage stage, const Error& cause)
        : Error(cause.code(), std::string(to_string(stage)) + " stage: " + cause.what()), stage_(stage) {}

    PipelineStage stage() const noexcept { return stage_; }

private:
    PipelineStage stage_;
};

struct PipelineOptions {
    double order_tol = 1e-6;
    double normality_tol = kNormalityTol;
    int num_samples = 100;
};

struct PipelineDiagnostics {
    long flow_iterations = 0;
    FlowOutcome flow_outcome = FlowOutcome::IterBudget;
    bool flow_stalled = false;
    double initial_energy = 0.0;
    double final_energy = 0.0;
    double final_moment_norm = 0.0;
    double initial_residual = 0.0;
    double flow_max_residual = 0.0;
    bool energy_monotone = true;

    std::int64_t detected_order = 0;
    std::string order_bound;  // decimal, exact
    bool order_within_bound = false;
    bool order_divides_bound = false;
    std::vector<RootOfUnity> eigenvalue_roots;
    bool eigenvalue_orders_admissible = false;  // each divides |p^k - q^k| for some k <= n

    std::int64_t normality_exponent = 0;
    double normality_defect = 0.0;
    double form_deviation = 0.0;        // |Q - I|
    double form_invariance_defect = 0.0;
    double commutator_defect = 0.0;
    double max_path_residual = 0.0;
    bool path_exponent_constant = false;

    double unitarity_defect_a = 0.0;
    double unitarity_defect_b = 0.0;
    double endpoint_residual = 0.0;
    double eigvec_condition_a = 0.0;
    double eigvec_condition_b = 0.0;
};

struct PipelineResult {
    Rep endpoint;                       // flow endpoint when not converged
    bool converged = false;
    PipelineDiagnostics diagnostics;
    FlowTrace trace;
    std::optional<RetractionPath> path;
};

/// flow -> detect order -> <B> -> averaged form -> conjugate into U(n) ->
/// retract A. Stage errors surface as PipelineError; a flow that exhausts its
/// budget returns converged = false with the diagnostics gathered so far.
PipelineResult full_pipeline(const Rep& rep, const FlowConfig& cfg = {}, const PipelineOptions& options = {});

/// |A^dagger A - I|, |B^dagger B - I| and the relation residual all <= tol.
bool verify_unitary_rep(const Rep& rep, double tol);

/// Whether every snapped order divides |p^k - q^k| for some 1 <= k <= n.
bool orders_admissible(const std::vector<RootOfUnity>& roots, int p, int q, int n);

}  // namespace bsretract
