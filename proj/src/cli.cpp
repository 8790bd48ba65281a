#include "bsretract/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "bsretract/suite.hpp"

namespace bsretract::cli {

namespace {

struct GlobalOptions {
    std::optional<double> tol;
    std::optional<long> max_iter;
    std::uint64_t seed = 0;
    bool sl = false;
    std::string json_path;
    std::string path_csv;
    std::string trace_csv;
    std::string manifest_path;
};

struct Io {
    std::string in = "-";
    std::string out = "-";
};

FlowConfig flow_config(const GlobalOptions& g) {
    FlowConfig cfg;
    if (g.tol) cfg.tol = *g.tol;
    if (g.max_iter) cfg.max_iter = *g.max_iter;
    cfg.sl_mode = g.sl;
    return cfg;
}

/// Collects what a run did so it can be replayed: command, parameters,
/// hashed inputs, outputs, outcome.
class Manifest {
public:
    explicit Manifest(std::string command) : json_{{"command", std::move(command)}} {
        json_["parameters"] = Json::object();
        json_["inputs"] = Json::array();
        json_["outputs"] = Json::array();
    }

    Json& parameters() { return json_["parameters"]; }

    void input(const std::string& path, std::string_view content) {
        json_["inputs"].push_back(Json{{"path", path}, {"hash", git_blob_hash(content)}});
    }
    void output(const std::string& path) {
        if (!path.empty()) json_["outputs"].push_back(path);
    }

    void emit(const GlobalOptions& g, const std::string& primary_out, int exit_code, Json outcome = Json::object()) {
        outcome["exit_code"] = exit_code;
        json_["outcome"] = std::move(outcome);
        std::string target = g.manifest_path;
        if (target.empty() && !primary_out.empty() && primary_out != "-") target = primary_out + ".manifest.json";
        if (target.empty()) {
            std::cerr << "manifest: " << json_.dump() << '\n';
        } else {
            write_text_file(target, dump(json_));
        }
    }

private:
    Json json_;
};

void write_optional(const std::string& path, const std::string& text, Manifest& m) {
    if (path.empty()) return;
    write_text_file(path, text);
    m.output(path);
}

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::InvalidGroup:
        case ErrorCode::InvalidInput:
        case ErrorCode::ParseError:
        case ErrorCode::InvalidArgument:
        case ErrorCode::SingularMatrix:
            return kExitBadInput;
        default:
            return kExitStructure;
    }
}

Rep load_rep(const std::string& path, Manifest& m) {
    const std::string text = read_text_file(path);
    m.input(path, text);
    Json j;
    try {
        j = Json::parse(text);
    } catch (const Json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
    }
    return rep_from_json(j);
}

void gate_residual(const Rep& rep) {
    const double r = relation_residual(rep);
    if (!(r <= kRepTolerance)) {
        throw Error(ErrorCode::InvalidInput, "relation residual " + format_double(r) + " exceeds 1e-8");
    }
}

// --- census ---------------------------------------------------------------

struct CensusArgs {
    int p = 0, q = 0, n_max = 1;
    std::string out = "-";
    std::string csv;
    std::uint64_t factor_cap = CensusOptions{}.factor_cap;
    std::int64_t modulus_cap = CensusOptions{}.modulus_cap;
};

int cmd_census(const CensusArgs& a, const GlobalOptions& g) {
    Manifest m("census");
    m.parameters() = Json{{"p", a.p}, {"q", a.q}, {"n_max", a.n_max}, {"factor_cap", a.factor_cap},
                          {"modulus_cap", a.modulus_cap}};
    if (!BSGroup::valid(a.p, a.q) || a.n_max < 1) {
        std::cerr << "census: invalid parameters (need coprime nonzero p, q with |p| != |q|, n_max >= 1)\n";
        m.emit(g, a.out, kExitBadInput);
        return kExitBadInput;
    }
    const CensusReport report = enumerate_orbits(a.p, a.q, a.n_max, {a.factor_cap, a.modulus_cap});
    std::ostringstream lines;
    std::map<std::pair<int, std::int64_t>, int> counts;
    for (const auto& d : report.orbits) {
        lines << to_json(d).dump() << '\n';
        ++counts[{d.length(), d.modulus}];
    }
    write_text_file(a.out, lines.str());
    m.output(a.out);

    std::ostringstream csv;
    csv << "k,N,orbit_count\n";
    for (const auto& [key, count] : counts) csv << key.first << ',' << key.second << ',' << count << '\n';
    write_optional(a.csv, csv.str(), m);

    Json gaps = Json::array();
    for (const auto& gap : report.gaps) {
        std::cerr << "census: k=" << gap.k << " divisor " << gap.value << " not expanded (" << gap.reason << ")\n";
        gaps.push_back(Json{{"k", gap.k}, {"value", gap.value}, {"reason", gap.reason}});
    }
    m.emit(g, a.out, kExitOk,
           Json{{"records", report.orbits.size()}, {"order_bound", order_bound(a.p, a.q, a.n_max).str()},
                {"gaps", gaps}});
    return kExitOk;
}

// --- construct -------------------------------------------------------------

struct ConstructArgs {
    int p = 0, q = 0, n = 1;
    std::int64_t modulus = 0;
    std::vector<std::int64_t> orbit;
    double chi_re = 1.0, chi_im = 0.0;
    std::string out = "-";
};

int cmd_construct(const ConstructArgs& a, const GlobalOptions& g) {
    Manifest m("construct");
    m.parameters() = Json{{"p", a.p}, {"q", a.q}, {"n", a.n}, {"seed", g.seed}, {"sl", g.sl}};
    std::optional<Rep> rep;
    if (!a.orbit.empty()) {
        m.parameters()["N"] = a.modulus;
        m.parameters()["orbit"] = a.orbit;
        m.parameters()["chi"] = Json::array({a.chi_re, a.chi_im});
        const BSGroup group(a.p, a.q);
        if (a.modulus < 1) throw Error(ErrorCode::InvalidArgument, "--modulus must be >= 1");
        std::int64_t u = 0;
        if (a.modulus > 1) u = mod_floor(a.q, a.modulus) * mod_inverse(group.p(), a.modulus) % a.modulus;
        rep = from_orbit_datum(OrbitDatum{a.p, a.q, a.modulus, u, a.orbit}, Complex(a.chi_re, a.chi_im));
        if (g.sl) rep = to_special_linear(*rep);
    } else {
        RandomRepOptions opts;
        opts.special_linear = g.sl;
        rep = random_rep(a.p, a.q, a.n, g.seed, opts);
    }
    write_text_file(a.out, dump(to_json(*rep)));
    m.output(a.out);
    m.emit(g, a.out, kExitOk, Json{{"residual", relation_residual(*rep)}});
    return kExitOk;
}

// --- flow ------------------------------------------------------------------

int cmd_flow(const Io& io, const GlobalOptions& g) {
    Manifest m("flow");
    const FlowConfig cfg = flow_config(g);
    m.parameters() = flow_config_json(cfg);
    const Rep rep = load_rep(io.in, m);
    gate_residual(rep);
    const FlowResult result = flow(rep, cfg);
    write_text_file(io.out, dump(to_json(result.rep)));
    m.output(io.out);
    if (!g.trace_csv.empty()) {
        std::ostringstream csv;
        write_trace_csv(csv, result.trace);
        write_optional(g.trace_csv, csv.str(), m);
    }
    const Json summary = flow_summary_json(result.trace);
    write_optional(g.json_path, dump(summary), m);
    const int code = result.trace.outcome == FlowOutcome::Converged ? kExitOk : kExitFlowBudget;
    m.emit(g, io.out, code, summary);
    return code;
}

// --- retract ---------------------------------------------------------------

int cmd_retract(const Io& io, int samples, const GlobalOptions& g) {
    Manifest m("retract");
    m.parameters() = Json{{"samples", samples}};
    const Rep rep = load_rep(io.in, m);
    gate_residual(rep);
    const int p = rep.group.p(), q = rep.group.q(), n = rep.dim();
    const BigInt bound = order_bound(p, q, n);
    const std::int64_t order = detect_finite_order(rep.b, eigenvalue_order_cap(p, q, n), 1e-6);
    const FiniteCyclicGroup group = generated_group(rep.b, order);
    const HermitianForm form = averaged_form(group);
    const Rep unitary_b = conjugate_into_unitary(rep, form);
    const RetractionPath path = retract_a(unitary_b, order, samples);
    const Rep& end = path.endpoint();

    write_text_file(io.out, dump(to_json(end)));
    m.output(io.out);
    if (!g.path_csv.empty()) {
        std::ostringstream csv;
        write_path_csv(csv, path);
        write_optional(g.path_csv, csv.str(), m);
    }
    const bool ok = verify_unitary_rep(end, kEndpointTol);
    const Json diag{{"detected_order", order},
                    {"order_bound", bound.str()},
                    {"normality_exponent", path.samples.front().exponent},
                    {"form_deviation", (form.q - CMatrix::Identity(n, n)).norm()},
                    {"commutator_defect", path.commutator_defect},
                    {"max_path_residual", path.max_residual()},
                    {"exponent_constant", path.exponent_constant()},
                    {"unitarity_defect_a", unitarity_defect(end.a)},
                    {"unitarity_defect_b", unitarity_defect(end.b)},
                    {"endpoint_unitary", ok}};
    write_optional(g.json_path, dump(diag), m);
    const int code = ok ? kExitOk : kExitStructure;
    m.emit(g, io.out, code, diag);
    return code;
}

// --- pipeline --------------------------------------------------------------

int cmd_pipeline(const Io& io, int samples, const GlobalOptions& g) {
    Manifest m("pipeline");
    const FlowConfig cfg = flow_config(g);
    m.parameters() = flow_config_json(cfg);
    m.parameters()["samples"] = samples;
    const Rep rep = load_rep(io.in, m);

    PipelineOptions opts;
    opts.num_samples = samples;
    Json diag_json;
    int code = kExitOk;
    try {
        const PipelineResult result = full_pipeline(rep, cfg, opts);
        write_text_file(io.out, dump(to_json(result.endpoint)));
        m.output(io.out);
        if (!g.trace_csv.empty()) {
            std::ostringstream csv;
            write_trace_csv(csv, result.trace);
            write_optional(g.trace_csv, csv.str(), m);
        }
        if (!g.path_csv.empty() && result.path) {
            std::ostringstream csv;
            write_path_csv(csv, *result.path);
            write_optional(g.path_csv, csv.str(), m);
        }
        diag_json = to_json(result.diagnostics);
        if (!result.converged) {
            code = kExitFlowBudget;
        } else {
            code = verify_unitary_rep(result.endpoint, kEndpointTol) ? kExitOk : kExitStructure;
        }
        diag_json["status"] = result.converged ? "converged" : "flow_budget";
    } catch (const PipelineError& e) {
        code = e.stage() == PipelineStage::Input ? kExitBadInput : kExitStructure;
        diag_json = Json{{"status", "error"}, {"stage", to_string(e.stage())}, {"error", e.what()}};
    }
    if (g.json_path.empty()) {
        std::cerr << diag_json.dump() << '\n';
    } else {
        write_optional(g.json_path, dump(diag_json), m);
    }
    m.emit(g, io.out, code, Json{{"status", diag_json["status"]}});
    return code;
}

// --- verify ----------------------------------------------------------------

int cmd_verify(const Io& io, int samples, const GlobalOptions& g) {
    Manifest m("verify");
    m.parameters() = Json{{"samples", samples}, {"seed", g.seed}};
    const Rep rep = load_rep(io.in, m);
    const int p = rep.group.p(), q = rep.group.q(), n = rep.dim();
    const BigInt bound = order_bound(p, q, n);

    Json report{{"p", p},
                {"q", q},
                {"n", n},
                {"residual", relation_residual(rep)},
                {"energy", kn_energy(rep)},
                {"moment_norm", moment_map(rep).norm()},
                {"order_bound", bound.str()}};
    int code = kExitOk;
    try {
        const std::int64_t order = detect_finite_order(rep.b, eigenvalue_order_cap(p, q, n), 1e-6);
        report["detected_order"] = order;
        report["order_divides_bound"] = bound % order == 0;
        Json roots = Json::array();
        const auto snapped = snapped_eigenvalues(rep.b, eigenvalue_order_cap(p, q, n), 1e-6);
        for (const auto& r : snapped) roots.push_back(to_json(r));
        report["eigenvalue_roots"] = roots;
        report["eigenvalue_orders_admissible"] = orders_admissible(snapped, p, q, n);
        const NormalityFit fit = normality_exponent(rep, order, kNormalityTol);
        report["normality_exponent"] = fit.exponent;
        report["normality_defect"] = fit.defect;
        const FiniteCyclicGroup group = generated_group(rep.b, order);
        const HermitianForm form = averaged_form(group);
        report["kappa"] = Json{{"deviation_from_identity", (form.q - CMatrix::Identity(n, n)).norm()},
                               {"invariance_defect", form_invariance_defect(group, form)}};
    } catch (const Error& e) {
        report["structure_error"] = e.what();
        code = exit_code_for(e) == kExitBadInput ? kExitBadInput : kExitStructure;
    }
    report["minimality"] = to_json(verify_minimal(rep, samples, 2.0, 1e-6, g.seed));
    const std::string target = g.json_path.empty() ? io.out : g.json_path;
    write_text_file(target, dump(report));
    m.output(target);
    m.emit(g, target, code);
    return code;
}

// --- suite -----------------------------------------------------------------

struct SuiteArgs {
    std::vector<int> p_list{-3, -2, -1, 1, 2, 3};
    std::vector<int> q_list{-3, -2, -1, 1, 2, 3};
    int n_max = 3;
    int seeds = 5;
    unsigned threads = 0;
    std::string report = "-";
};

int cmd_suite(const SuiteArgs& a, const GlobalOptions& g) {
    Manifest m("suite");
    SuiteConfig cfg;
    cfg.p_list = a.p_list;
    cfg.q_list = a.q_list;
    cfg.n_max = a.n_max;
    for (int s = 0; s < a.seeds; ++s) cfg.seeds.push_back(g.seed + static_cast<std::uint64_t>(s));
    cfg.flow = flow_config(g);
    cfg.threads = a.threads;
    m.parameters() = Json{{"p_list", a.p_list}, {"q_list", a.q_list}, {"n_max", a.n_max},
                          {"seeds", cfg.seeds},   {"flow", flow_config_json(cfg.flow)}};

    const SuiteReport report = run_suite(cfg);
    Json j = report.to_json();
    write_text_file(a.report, dump(j));
    m.output(a.report);
    const int code = report.hard_invariants_hold() ? kExitOk : kExitInvariant;
    m.emit(g, a.report, code, j["summary"]);
    return code;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Retraction of Baumslag-Solitar representation varieties onto unitary representations"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--tol", g.tol, "flow stopping threshold on |mu| / (1 + energy)");
    app.add_option("--max-iter", g.max_iter, "flow iteration budget");
    app.add_option("--seed", g.seed, "64-bit seed");
    app.add_flag("--sl", g.sl, "work in SL_n / SU_n");
    app.add_option("--json", g.json_path, "write the JSON report/diagnostics here");
    app.add_option("--path-csv", g.path_csv, "retraction path samples (t, residual, unitarity_defect_A)");
    app.add_option("--trace-csv", g.trace_csv, "flow trace (iter, energy, moment_norm, step)");
    app.add_option("--manifest", g.manifest_path, "run manifest path");

    CensusArgs census;
    auto* c_census = app.add_subcommand("census", "orbit data of root-of-unity eigenvalue cycles");
    c_census->add_option("--p", census.p)->required();
    c_census->add_option("--q", census.q)->required();
    c_census->add_option("--n-max", census.n_max)->required();
    c_census->add_option("--out", census.out, "JSON lines output");
    c_census->add_option("--csv", census.csv, "summary CSV (k, N, orbit_count)");
    c_census->add_option("--factor-cap", census.factor_cap);
    c_census->add_option("--modulus-cap", census.modulus_cap);

    ConstructArgs construct;
    auto* c_construct = app.add_subcommand("construct", "build a representation (random or from an orbit)");
    c_construct->add_option("--p", construct.p)->required();
    c_construct->add_option("--q", construct.q)->required();
    c_construct->add_option("--n", construct.n, "dimension for random_rep");
    c_construct->add_option("--modulus", construct.modulus, "N for an orbit block");
    c_construct->add_option("--orbit", construct.orbit, "orbit exponents, e.g. 1,4")->delimiter(',');
    c_construct->add_option("--chi-re", construct.chi_re);
    c_construct->add_option("--chi-im", construct.chi_im);
    c_construct->add_option("--out", construct.out);

    Io flow_io, retract_io, pipeline_io, verify_io;
    int retract_samples = 100, pipeline_samples = 100, verify_samples = 200;
    auto add_io = [](CLI::App* sub, Io& io) {
        sub->add_option("--in", io.in, "input Rep JSON ('-' for stdin)");
        sub->add_option("--out", io.out, "output path ('-' for stdout)");
    };
    auto* c_flow = app.add_subcommand("flow", "moment-map descent to the Kempf-Ness set");
    add_io(c_flow, flow_io);
    auto* c_retract = app.add_subcommand("retract", "conjugate <B> into U(n) and retract A to its unitary factor");
    add_io(c_retract, retract_io);
    c_retract->add_option("--samples", retract_samples);
    auto* c_pipeline = app.add_subcommand("pipeline", "flow, compactify and retract");
    add_io(c_pipeline, pipeline_io);
    c_pipeline->add_option("--samples", pipeline_samples);
    auto* c_verify = app.add_subcommand("verify", "structural report for a representation");
    add_io(c_verify, verify_io);
    c_verify->add_option("--samples", verify_samples, "minimality probe samples");

    SuiteArgs suite;
    auto* c_suite = app.add_subcommand("suite", "batch verification over a parameter grid");
    c_suite->add_option("--p-list", suite.p_list)->delimiter(',');
    c_suite->add_option("--q-list", suite.q_list)->delimiter(',');
    c_suite->add_option("--n-max", suite.n_max);
    c_suite->add_option("--seeds", suite.seeds, "number of seeds per grid point");
    c_suite->add_option("--threads", suite.threads);
    c_suite->add_option("--report", suite.report);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadInput;
    }

    try {
        if (*c_census) return cmd_census(census, g);
        if (*c_construct) return cmd_construct(construct, g);
        if (*c_flow) return cmd_flow(flow_io, g);
        if (*c_retract) return cmd_retract(retract_io, retract_samples, g);
        if (*c_pipeline) return cmd_pipeline(pipeline_io, pipeline_samples, g);
        if (*c_verify) return cmd_verify(verify_io, verify_samples, g);
        if (*c_suite) return cmd_suite(suite, g);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitBadInput;
    }
    return kExitBadInput;
}

}  // namespace bsretract::cli
