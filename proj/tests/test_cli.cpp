#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "bsretract/cli.hpp"
#include "bsretract/io.hpp"
#include "bsretract/random.hpp"
#include "bsretract/suite.hpp"

using namespace bsretract;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("bsretract_cli_" + std::to_string(CounterRng(std::random_device{}())()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::vector<std::string> lines_of(const std::string& path) {
    std::ifstream in(path);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty()) out.push_back(line);
    }
    return out;
}

void write_rep(const std::string& path, const Rep& r) { write_text_file(path, dump(to_json(r))); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("census command") {
    TempDir dir;
    const std::string out = dir / "c.jsonl", csv = dir / "c.csv";
    CHECK(cli::run({"census", "--p", "2", "--q", "3", "--n-max", "2", "--out", out, "--csv", csv}) == cli::kExitOk);
    const auto recs = lines_of(out);
    REQUIRE(recs.size() == 3);
    CHECK(Json::parse(recs[1])["orbit"] == Json::array({1, 4}));
    CHECK(lines_of(csv) == std::vector<std::string>{"k,N,orbit_count", "1,1,1", "2,5,2"});
    CHECK(fs::exists(out + ".manifest.json"));

    CHECK(cli::run({"census", "--p", "1", "--q", "2", "--n-max", "1", "--out", out}) == cli::kExitOk);
    CHECK(lines_of(out).size() == 1);

    CHECK(cli::run({"census", "--p", "2", "--q", "2", "--n-max", "2", "--out", dir / "bad.jsonl"}) ==
          cli::kExitBadInput);
    CHECK_FALSE(fs::exists(dir / "bad.jsonl"));
    CHECK(cli::run({"census", "--p", "2", "--q", "4", "--n-max", "2", "--out", dir / "bad.jsonl"}) ==
          cli::kExitBadInput);
}

TEST_CASE("argument errors exit 2") {
    CHECK(cli::run({}) == cli::kExitBadInput);
    CHECK(cli::run({"frobnicate"}) == cli::kExitBadInput);
    CHECK(cli::run({"census", "--p", "2"}) == cli::kExitBadInput);
    CHECK(cli::run({"census", "--p", "x", "--q", "3", "--n-max", "2"}) == cli::kExitBadInput);
    CHECK(cli::run({"--help"}) == cli::kExitOk);
}

TEST_CASE("construct, flow, retract, verify") {
    TempDir dir;
    const std::string rep = dir / "r.json";
    CHECK(cli::run({"construct", "--p", "2", "--q", "3", "--n", "3", "--seed", "7", "--out", rep}) == 0);
    const Rep r = rep_from_json(Json::parse(read_text_file(rep)));
    CHECK(r.dim() == 3);
    const Rep expected = random_rep(2, 3, 3, 7);
    CHECK(r.a == expected.a);

    // Global flags are accepted before the subcommand too.
    CHECK(cli::run({"--seed", "7", "construct", "--p", "2", "--q", "3", "--n", "3", "--out", dir / "r2.json"}) == 0);
    CHECK(read_text_file(rep) == read_text_file(dir / "r2.json"));

    const std::string flowed = dir / "f.json", trace = dir / "t.csv";
    CHECK(cli::run({"flow", "--in", rep, "--out", flowed, "--trace-csv", trace}) == cli::kExitOk);
    CHECK(lines_of(trace).front() == "iter,energy,moment_norm,step");
    CHECK(cli::run({"flow", "--in", rep, "--out", dir / "f2.json", "--max-iter", "1", "--tol", "1e-14"}) ==
          cli::kExitFlowBudget);

    const std::string retracted = dir / "u.json", path_csv = dir / "p.csv";
    // Retract needs B of finite order; the flowed endpoint qualifies.
    CHECK(cli::run({"retract", "--in", flowed, "--out", retracted, "--path-csv", path_csv, "--json",
                    dir / "rd.json"}) == cli::kExitOk);
    CHECK(lines_of(path_csv).size() == 101);
    CHECK(verify_unitary_rep(rep_from_json(Json::parse(read_text_file(retracted))), 1e-8));

    const std::string report = dir / "v.json";
    CHECK(cli::run({"verify", "--in", flowed, "--json", report, "--samples", "50"}) == cli::kExitOk);
    const Json v = Json::parse(read_text_file(report));
    CHECK(v["order_bound"] == "95");
    CHECK(v.contains("normality_exponent"));
    CHECK(v["minimality"]["pass"] == true);

    // The unflowed input is an exact conjugate of a unitary rep: its structure
    // certifies, but it is not a minimal vector.
    CHECK(cli::run({"verify", "--in", rep, "--json", dir / "v2.json", "--samples", "200"}) == cli::kExitOk);
    CHECK(Json::parse(read_text_file(dir / "v2.json"))["minimality"]["pass"] == false);
}

TEST_CASE("construct from an orbit") {
    TempDir dir;
    const std::string rep = dir / "o.json";
    CHECK(cli::run({"construct", "--p", "2", "--q", "3", "--modulus", "5", "--orbit", "1,4", "--out", rep}) == 0);
    const Rep r = rep_from_json(Json::parse(read_text_file(rep)));
    CHECK(relation_residual(r) <= 1e-12);
    CHECK(cli::run({"construct", "--p", "2", "--q", "3", "--modulus", "5", "--orbit", "1,3", "--out", rep}) ==
          cli::kExitStructure);
}

TEST_CASE("pipeline exit codes") {
    TempDir dir;
    const std::string unitary = dir / "u.json";
    write_rep(unitary, from_orbit_datum(OrbitDatum{2, 3, 5, 4, {1, 4}}, 1.0));
    const std::string diag = dir / "d.json";
    CHECK(cli::run({"pipeline", "--in", unitary, "--out", dir / "e.json", "--json", diag}) == cli::kExitOk);
    CHECK(Json::parse(read_text_file(diag))["status"] == "converged");

    const std::string conj = dir / "c.json";
    write_rep(conj, random_rep(2, 3, 2, 3));
    CHECK(cli::run({"pipeline", "--in", conj, "--out", dir / "e2.json", "--json", diag, "--path-csv",
                    dir / "p.csv", "--trace-csv", dir / "t.csv"}) == cli::kExitOk);
    CHECK(fs::exists(dir / "p.csv"));

    // Residual 0.5: rejected at the input gate, diagnostics still written.
    Rep bad = from_orbit_datum(OrbitDatum{2, 3, 5, 4, {1, 4}}, 1.0);
    bad.a(0, 0) = 0.3;
    const std::string corrupt = dir / "bad.json";
    write_rep(corrupt, bad);
    CHECK(relation_residual(bad) > 0.1);
    CHECK(cli::run({"pipeline", "--in", corrupt, "--out", dir / "e3.json", "--json", diag}) == cli::kExitBadInput);
    const Json d = Json::parse(read_text_file(diag));
    CHECK(d["status"] == "error");
    CHECK(d["stage"] == "input");
    CHECK_FALSE(fs::exists(dir / "e3.json"));

    CHECK(cli::run({"pipeline", "--in", conj, "--out", dir / "e4.json", "--json", diag, "--max-iter", "1"}) ==
          cli::kExitFlowBudget);

    // Invalid group in the file.
    Json j = to_json(from_orbit_datum(OrbitDatum{2, 3, 1, 0, {0}}, 1.0));
    j["q"] = 2;
    write_text_file(dir / "g.json", j.dump());
    CHECK(cli::run({"pipeline", "--in", dir / "g.json", "--out", dir / "e5.json"}) == cli::kExitBadInput);
    write_text_file(dir / "junk.json", "{not json");
    CHECK(cli::run({"pipeline", "--in", dir / "junk.json", "--out", dir / "e6.json"}) == cli::kExitBadInput);
    CHECK(cli::run({"pipeline", "--in", dir / "missing.json", "--out", dir / "e7.json"}) == cli::kExitBadInput);
}

TEST_CASE("outputs are deterministic and manifests hash inputs") {
    TempDir dir;
    write_rep(dir / "in.json", random_rep(3, 5, 3, 11));
    for (const char* name : {"a", "b"}) {
        const std::string base = dir / name;
        CHECK(cli::run({"pipeline", "--in", dir / "in.json", "--out", base + ".json", "--json", base + ".d.json",
                        "--path-csv", base + ".csv", "--manifest", base + ".m.json"}) == 0);
    }
    for (const char* ext : {".json", ".d.json", ".csv"}) {
        CHECK(read_text_file(dir / (std::string("a") + ext)) == read_text_file(dir / (std::string("b") + ext)));
    }
    const Json m = Json::parse(read_text_file(dir / "a.m.json"));
    CHECK(m["command"] == "pipeline");
    CHECK(m["inputs"][0]["hash"] == git_blob_hash(read_text_file(dir / "in.json")));
    CHECK(m["outcome"]["exit_code"] == 0);
    Json ma = m, mb = Json::parse(read_text_file(dir / "b.m.json"));
    ma.erase("outputs");
    mb.erase("outputs");
    CHECK(ma == mb);
}

TEST_CASE("suite command") {
    TempDir dir;
    const std::string report = dir / "s.json";
    CHECK(cli::run({"suite", "--p-list", "2,-2", "--q-list", "3,2", "--n-max", "3", "--seeds", "2", "--report",
                    report}) == cli::kExitOk);
    const Json j = Json::parse(read_text_file(report));
    CHECK(j["summary"]["runs"] == 2 * 1 * 3 * 2 + 0);  // (2,3), (-2,3); (±2, 2) rejected
    CHECK(j["summary"]["hard_invariants_hold"] == true);
    CHECK(j["summary"]["rejected_pairs"].size() == 2);
    for (const auto& run : j["runs"]) {
        const std::string hash = run["manifest_hash"];
        CHECK(hash.size() == 40);
        REQUIRE(j["manifests"].contains(hash));
        CHECK(git_blob_hash(j["manifests"][hash].dump()) == hash);
    }

    CHECK(cli::run({"suite", "--seeds", "0", "--report", dir / "empty.json"}) == cli::kExitOk);
    CHECK(Json::parse(read_text_file(dir / "empty.json"))["runs"].empty());
}

TEST_CASE("suite library on an empty grid") {
    SuiteConfig cfg;
    const SuiteReport r = run_suite(cfg);
    CHECK(r.runs.empty());
    CHECK(r.hard_invariants_hold());
}

TEST_CASE("suite on (2,3), n = 4: orders divide the bound") {
    SuiteConfig cfg;
    cfg.p_list = {2};
    cfg.q_list = {3};
    cfg.n_max = 4;
    cfg.seeds = {0, 1, 2, 3, 4, 5};
    const SuiteReport r = run_suite(cfg);
    CHECK(r.hard_invariants_hold());
    const std::int64_t bound = 1 * 5 * 19 * 65;
    for (const auto& run : r.runs) {
        if (run.n == 4 && run.converged) CHECK(bound % run.diagnostics.detected_order == 0);
    }
}

TEST_CASE("worker_count honors the environment cap") {
    setenv("BSRETRACT_THREADS", "1", 1);
    CHECK(worker_count(8) == 1);
    unsetenv("BSRETRACT_THREADS");
    CHECK(worker_count(3) == 3);
}

}
