#include "bsretract/io.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <openssl/evp.h>

namespace bsretract {

namespace {

[[noreturn]] void parse_fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

}  // namespace

Json to_json(const CMatrix& m) {
    Json re = Json::array(), im = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json rr = Json::array(), ir = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            rr.push_back(m(i, j).real());
            ir.push_back(m(i, j).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ir));
    }
    return Json{{"n", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

CMatrix cmatrix_from_json(const Json& j) {
    try {
        const int n = j.at("n").get<int>();
        if (n < 1) parse_fail("matrix dimension must be positive");
        const Json& re = j.at("re");
        const Json& im = j.at("im");
        if (re.size() != static_cast<std::size_t>(n) || im.size() != static_cast<std::size_t>(n)) {
            parse_fail("matrix rows do not match n");
        }
        CMatrix m(n, n);
        for (int r = 0; r < n; ++r) {
            if (re[r].size() != static_cast<std::size_t>(n) || im[r].size() != static_cast<std::size_t>(n)) {
                parse_fail("matrix columns do not match n");
            }
            for (int c = 0; c < n; ++c) m(r, c) = Complex(re[r][c].get<double>(), im[r][c].get<double>());
        }
        require_square_finite(m, "matrix");
        return m;
    } catch (const Json::exception& e) {
        parse_fail(std::string("malformed matrix: ") + e.what());
    }
}

Json to_json(const Rep& rep) {
    return Json{{"p", rep.group.p()}, {"q", rep.group.q()}, {"n", rep.dim()}, {"A", to_json(rep.a)},
                {"B", to_json(rep.b)}};
}

Rep rep_from_json(const Json& j) {
    int p = 0, q = 0, n = 0;
    try {
        p = j.at("p").get<int>();
        q = j.at("q").get<int>();
        n = j.at("n").get<int>();
    } catch (const Json::exception& e) {
        parse_fail(std::string("malformed representation: ") + e.what());
    }
    const BSGroup group(p, q);
    if (!j.contains("A") || !j.contains("B")) parse_fail("representation needs both A and B");
    CMatrix a = cmatrix_from_json(j["A"]);
    CMatrix b = cmatrix_from_json(j["B"]);
    if (a.rows() != n || b.rows() != n) parse_fail("matrix dimension differs from n");
    return Rep(group, std::move(a), std::move(b));
}

Json to_json(const OrbitDatum& d) {
    return Json{{"p", d.p}, {"q", d.q}, {"N", d.modulus}, {"u", d.multiplier}, {"k", d.length()},
                {"orbit", d.orbit}};
}

OrbitDatum orbit_from_json(const Json& j) {
    try {
        OrbitDatum d;
        d.p = j.at("p").get<int>();
        d.q = j.at("q").get<int>();
        d.modulus = j.at("N").get<std::int64_t>();
        d.multiplier = j.at("u").get<std::int64_t>();
        d.orbit = j.at("orbit").get<std::vector<std::int64_t>>();
        if (j.contains("k") && j.at("k").get<int>() != d.length()) parse_fail("k differs from orbit length");
        return d;
    } catch (const Json::exception& e) {
        parse_fail(std::string("malformed orbit datum: ") + e.what());
    }
}

Json to_json(const RootOfUnity& r) { return Json{{"N", r.order}, {"m", r.exponent}}; }

std::string_view to_string(FlowOutcome outcome) {
    return outcome == FlowOutcome::Converged ? "Converged" : "IterBudget";
}

Json to_json(const PipelineDiagnostics& d) {
    Json roots = Json::array();
    for (const auto& r : d.eigenvalue_roots) roots.push_back(to_json(r));
    return Json{
        {"flow",
         {{"outcome", to_string(d.flow_outcome)},
          {"iterations", d.flow_iterations},
          {"stalled", d.flow_stalled},
          {"initial_energy", d.initial_energy},
          {"final_energy", d.final_energy},
          {"final_moment_norm", d.final_moment_norm},
          {"initial_residual", d.initial_residual},
          {"max_residual", d.flow_max_residual},
          {"energy_monotone", d.energy_monotone}}},
        {"order",
         {{"detected", d.detected_order},
          {"bound", d.order_bound},
          {"within_bound", d.order_within_bound},
          {"divides_bound", d.order_divides_bound},
          {"eigenvalue_roots", std::move(roots)},
          {"eigenvalue_orders_admissible", d.eigenvalue_orders_admissible}}},
        {"normality", {{"exponent", d.normality_exponent}, {"defect", d.normality_defect}}},
        {"form", {{"deviation_from_identity", d.form_deviation}, {"invariance_defect", d.form_invariance_defect}}},
        {"retraction",
         {{"commutator_defect", d.commutator_defect},
          {"max_path_residual", d.max_path_residual},
          {"exponent_constant", d.path_exponent_constant}}},
        {"endpoint",
         {{"unitarity_defect_a", d.unitarity_defect_a},
          {"unitarity_defect_b", d.unitarity_defect_b},
          {"residual", d.endpoint_residual},
          {"eigvec_condition_a", d.eigvec_condition_a},
          {"eigvec_condition_b", d.eigvec_condition_b}}},
    };
}

Json to_json(const MinimalityReport& r) {
    return Json{{"samples", r.samples}, {"min_margin", r.min_margin}, {"tol", r.tol}, {"pass", r.pass}};
}

Json flow_summary_json(const FlowTrace& trace) {
    return Json{{"outcome", to_string(trace.outcome)},
                {"iterations", trace.iterations()},
                {"stalled", trace.stalled},
                {"initial_energy", trace.records.front().energy},
                {"final_energy", trace.final_record().energy},
                {"final_moment_norm", trace.final_record().moment_norm},
                {"initial_residual", trace.initial_residual},
                {"max_residual", trace.max_residual},
                {"energy_monotone", trace.energy_monotone()}};
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_trace_csv(std::ostream& os, const FlowTrace& trace) {
    os << "iter,energy,moment_norm,step\n";
    for (const auto& r : trace.records) {
        os << r.iter << ',' << format_double(r.energy) << ',' << format_double(r.moment_norm) << ','
           << format_double(r.step) << '\n';
    }
}

void write_path_csv(std::ostream& os, const RetractionPath& path) {
    os << "t,residual,unitarity_defect_A\n";
    for (const auto& s : path.samples) {
        os << format_double(s.t) << ',' << format_double(s.residual) << ',' << format_double(s.unitarity_defect_a)
           << '\n';
    }
}

std::string git_blob_hash(std::string_view content) {
    const std::string header = "blob " + std::to_string(content.size()) + '\0';
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr);
    EVP_DigestUpdate(ctx, header.data(), header.size());
    EVP_DigestUpdate(ctx, content.data(), content.size());
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[digest[i] >> 4U];
        out += kHex[digest[i] & 0xFU];
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ostringstream ss;
    if (path == "-") {
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, std::string_view text) {
    if (path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
    out << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace bsretract
