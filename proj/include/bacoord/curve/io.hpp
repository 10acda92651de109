#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "bacoord/curve/spectral_data.hpp"

namespace bacoord {

/// Parse a `.bacurve` document.
///
/// Throws SyntaxError for malformed JSON (with line and column), SchemaError for
/// missing, unknown, duplicate or mistyped fields, and InvariantError when a
/// per-type invariant fails. Cross-entity conditions (distinctness of marked
/// points, counting rules, involution compatibility) are left to the validators
/// so that they can be reported together.
SpectralData parse_spectral_data(std::string_view text);

/// Reads the file, then parses. I/O failures raise std::runtime_error.
SpectralData load_spectral_data(const std::filesystem::path& path);

/// Inverse of parse_spectral_data. Numbers are written with round-trip precision.
std::string serialize_spectral_data(const SpectralData& data, int indent = 2);

}  // namespace bacoord
