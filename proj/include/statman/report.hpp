#pragma once

#include <string>

#include "statman/diagnostics.hpp"

namespace statman {

inline constexpr const char* kToolVersion = "1.0.0";

/// Schema-stable JSON serialization of a diagnostics report.  Key order is
/// fixed and every numeric value is finite, so the same report always
/// serializes to identical bytes.
std::string report_to_json(const DiagnosticsReport& rep);

/// Human-readable rendering: identity table sorted worst-first, classifier
/// verdicts, constant-curvature fit, theorem tables, and the alpha scan.
std::string report_to_text(const DiagnosticsReport& rep);

}  // namespace statman
