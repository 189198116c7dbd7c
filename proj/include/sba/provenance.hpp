#pragma once

#include <string>

namespace sba {

inline constexpr const char* kArtifactVersion = "0.1.0";

// FNV-1a 64-bit digest of a file's bytes, hex-encoded.
std::string file_digest(const std::string& path);

}  // namespace sba
