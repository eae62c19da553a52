#pragma once

#include <string>

#include "statman/chart.hpp"

namespace statman {

/// A chart loaded from a manifold description file (restricted JSON).
struct ManifoldFile {
    std::string name;
    Chart chart;
};

/// Parses a manifold document from JSON text.  Throws ParseError on schema
/// violations: missing keys, both or neither of builtin/custom, an
/// asymmetric metric matrix, cubic indices out of range, or conflicting
/// duplicate cubic entries.
ManifoldFile parse_manifold(const std::string& json_text);

/// Reads and parses the file at `path`; ParseError when unreadable.
ManifoldFile load_manifold(const std::string& path);

}  // namespace statman
