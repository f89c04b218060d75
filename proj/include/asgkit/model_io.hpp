#pragma once

#include <string>
#include <string_view>

#include "asgkit/model.hpp"

namespace asgkit {

// Textual model-description format, versioned by a leading `asm-version: 1`
// header line.  write_model and read_model round-trip: reading a written
// model yields an equal ModelSet.

std::string write_model(const ModelSet& model);

// Throws Error{ModelFileError} on malformed input and the build_model /
// errors for semantic problems.
ModelSet read_model(std::string_view text);

}  // namespace asgkit
