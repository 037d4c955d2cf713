#pragma once

#include <filesystem>

#include "overgaze/sessions/session.hpp"

namespace og::sessions {

// Canonical JSON-lines serialization. Line 1 is the header
// {"version":1,"meta":{...}}, then one line per game record, one per gaze
// sample, and a final survey line, each tagged with "k". Key order and
// number formatting are fixed, so equal sessions serialize to equal bytes.
// Timestamps are seconds with six decimals; pixel coordinates and pupil
// sizes carry three decimals (values are recorded on a millipixel grid).
std::string serialize_session(const SessionLog& session);

// Validates, serializes and writes atomically.
void write_session(const SessionLog& session, const std::filesystem::path& path);

// Parses and fully validates. Throws ParseError with the 1-based line
// number for malformed input and ValidationError with a field path for
// invariant violations.
SessionLog parse_session(const std::string& text);
SessionLog read_session(const std::filesystem::path& path);

}  // namespace og::sessions
