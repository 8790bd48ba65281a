#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "bsretract/census.hpp"
#include "bsretract/retraction.hpp"

namespace bsretract {

using Json = nlohmann::ordered_json;

// {"n": int, "re": [[...]], "im": [[...]]}, row-major.
Json to_json(const CMatrix& m);
CMatrix cmatrix_from_json(const Json& j);

// {"p", "q", "n", "A", "B"}; parsing enforces the group hypotheses (InvalidGroup).
Json to_json(const Rep& rep);
Rep rep_from_json(const Json& j);

Json to_json(const OrbitDatum& d);
OrbitDatum orbit_from_json(const Json& j);

Json to_json(const RootOfUnity& r);
Json to_json(const PipelineDiagnostics& d);
Json to_json(const MinimalityReport& r);
Json flow_summary_json(const FlowTrace& trace);

std::string_view to_string(FlowOutcome outcome);

/// Fixed 17-significant-digit formatting for CSV output.
std::string format_double(double x);

void write_trace_csv(std::ostream& os, const FlowTrace& trace);
void write_path_csv(std::ostream& os, const RetractionPath& path);

/// git blob id: SHA-1 of "blob <size>\0" + content, lowercase hex.
std::string git_blob_hash(std::string_view content);

std::string read_text_file(const std::string& path);  // "-" reads stdin
void write_text_file(const std::string& path, std::string_view text);  // "-" writes stdout

/// Pretty JSON with a trailing newline; stable for identical input.
std::string dump(const Json& j);

}  // namespace bsretract
