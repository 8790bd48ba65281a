#include "bsretract/retraction.hpp"

#include <algorithm>
#include <limits>

namespace bsretract {

std::string_view to_string(PipelineStage stage) {
    switch (stage) {
        case PipelineStage::Input: return "input";
        case PipelineStage::Flow: return "flow";
        case PipelineStage::Order: return "order";
        case PipelineStage::Group: return "group";
        case PipelineStage::Form: return "form";
        case PipelineStage::Unitary: return "unitary";
        case PipelineStage::Normality: return "normality";
        case PipelineStage::Retract: return "retract";
    }
    return "unknown";
}

double RetractionPath::max_residual() const {
    double worst = 0.0;
    for (const auto& s : samples) worst = std::max(worst, s.residual);
    return worst;
}

bool RetractionPath::exponent_constant() const {
    return std::all_of(samples.begin(), samples.end(),
                       [&](const PathSample& s) { return s.exponent == samples.front().exponent; });
}

RetractionPath retract_a(const Rep& rep, std::int64_t order, int num_samples) {
    if (num_samples < 2) throw Error(ErrorCode::InvalidArgument, "need at least two path samples");
    if (unitarity_defect(rep.b) > 1e-8) throw Error(ErrorCode::InvalidArgument, "rho(b) is not unitary");
    normality_exponent(rep, order, kNormalityTol);

    const PolarFactors pf = polar(rep.a);
    RetractionPath path;
    path.unitary_factor = pf.unitary;
    path.positive_factor = pf.positive;
    path.commutator_defect = commutator_norm(pf.positive, rep.b) / pf.positive.norm();
    if (path.commutator_defect > kPolarCommutatorTol) {
        throw Error(ErrorCode::PolarObstruction,
                    "|[P, B]| / |P| = " + std::to_string(path.commutator_defect));
    }

    path.samples.reserve(static_cast<std::size_t>(num_samples));
    for (int i = 0; i < num_samples; ++i) {
        const double t = 1.0 - static_cast<double>(i) / (num_samples - 1);
        CMatrix a_t = i == 0 ? rep.a : CMatrix(pf.unitary * herm_power(pf.positive, t));
        Rep sample(rep.group, std::move(a_t), rep.b);
        const std::int64_t best = closest_power(sample, order).exponent;
        const double residual = relation_residual(sample);
        const double defect = unitarity_defect(sample.a);
        path.samples.push_back({t, std::move(sample), residual, defect, best});
    }
    return path;
}

bool orders_admissible(const std::vector<RootOfUnity>& roots, int p, int q, int n) {
    std::vector<BigInt> gaps;
    for (int k = 1; k <= n; ++k) gaps.push_back(power_gap(p, q, k));
    return std::all_of(roots.begin(), roots.end(), [&](const RootOfUnity& r) {
        return std::any_of(gaps.begin(), gaps.end(), [&](const BigInt& g) { return g % r.order == 0; });
    });
}

bool verify_unitary_rep(const Rep& rep, double tol) {
    if (unitarity_defect(rep.a) > tol || unitarity_defect(rep.b) > tol) return false;
    try {
        return relation_residual(rep) <= tol;
    } catch (const Error&) {
        return false;
    }
}

namespace {

template <typename F>
auto staged(PipelineStage stage, F&& f) {
    try {
        return f();
    } catch (const PipelineError&) {
        throw;
    } catch (const Error& e) {
        throw PipelineError(stage, e);
    }
}

}  // namespace

PipelineResult full_pipeline(const Rep& rep, const FlowConfig& cfg, const PipelineOptions& options) {
    const int p = rep.group.p(), q = rep.group.q(), n = rep.dim();
    const double input_residual = staged(PipelineStage::Input, [&] { return relation_residual(rep); });
    if (!(input_residual <= kRepTolerance)) {
        throw PipelineError(PipelineStage::Input,
                            Error(ErrorCode::InvalidInput,
                                  "relation residual " + std::to_string(input_residual) + " exceeds 1e-8"));
    }

    FlowResult flowed = staged(PipelineStage::Flow, [&] { return flow(rep, cfg); });
    PipelineResult result{flowed.rep, false, {}, std::move(flowed.trace), std::nullopt};
    PipelineDiagnostics& diag = result.diagnostics;
    const FlowTrace& trace = result.trace;
    diag.flow_iterations = trace.iterations();
    diag.flow_outcome = trace.outcome;
    diag.flow_stalled = trace.stalled;
    diag.initial_energy = trace.records.front().energy;
    diag.final_energy = trace.final_record().energy;
    diag.final_moment_norm = trace.final_record().moment_norm;
    diag.initial_residual = trace.initial_residual;
    diag.flow_max_residual = trace.max_residual;
    diag.energy_monotone = trace.energy_monotone();
    const BigInt bound = order_bound(p, q, n);
    diag.order_bound = bound.str();
    if (trace.outcome != FlowOutcome::Converged) return result;

    const Rep& kn_point = result.endpoint;
    const std::int64_t cap = eigenvalue_order_cap(p, q, n);
    diag.eigenvalue_roots = staged(PipelineStage::Order, [&] {
        return snapped_eigenvalues(kn_point.b, cap, options.order_tol);
    });
    diag.eigenvalue_orders_admissible = orders_admissible(diag.eigenvalue_roots, p, q, n);
    const std::int64_t order = staged(PipelineStage::Order, [&] {
        return detect_finite_order(kn_point.b, cap, options.order_tol);
    });
    diag.detected_order = order;
    diag.order_within_bound = BigInt(order) <= bound;
    diag.order_divides_bound = bound % order == 0;

    const NormalityFit fit = staged(PipelineStage::Normality, [&] {
        return normality_exponent(kn_point, order, options.normality_tol);
    });
    diag.normality_exponent = fit.exponent;
    diag.normality_defect = fit.defect;

    const FiniteCyclicGroup group = staged(PipelineStage::Group, [&] { return generated_group(kn_point.b, order); });
    const HermitianForm form = staged(PipelineStage::Form, [&] { return averaged_form(group); });
    diag.form_deviation = (form.q - CMatrix::Identity(n, n)).norm();
    diag.form_invariance_defect = form_invariance_defect(group, form);
    const Rep unitary_b = staged(PipelineStage::Unitary, [&] { return conjugate_into_unitary(kn_point, form); });

    RetractionPath path = staged(PipelineStage::Retract, [&] {
        return retract_a(unitary_b, order, options.num_samples);
    });
    diag.commutator_defect = path.commutator_defect;
    diag.max_path_residual = path.max_residual();
    diag.path_exponent_constant = path.exponent_constant();

    const Rep& end = path.endpoint();
    diag.unitarity_defect_a = unitarity_defect(end.a);
    diag.unitarity_defect_b = unitarity_defect(end.b);
    diag.endpoint_residual = relation_residual(end);
    diag.eigvec_condition_a = eigenvector_condition(kn_point.a);
    diag.eigvec_condition_b = eigenvector_condition(kn_point.b);

    result.endpoint = end;
    result.converged = true;
    result.path = std::move(path);
    return result;
}

}  // namespace bsretract
