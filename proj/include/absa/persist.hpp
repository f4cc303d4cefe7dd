#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "absa/pipeline.hpp"

namespace absa::persist {

// Archive layout (all integers little-endian):
//   8 bytes   magic "ABSA\0ARC"
//   u64       header length H
//   H bytes   JSON header: format_version, kind, metadata, body structure
//   u64       payload length P (number of doubles)
//   8*P bytes IEEE-754 doubles referenced from the header by offset/count
inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::string_view kExtension = ".absa";

std::string serialize(const ModelBundle& bundle, std::string_view timestamp);
ModelBundle deserialize(std::string_view bytes);

/// Writes through a temporary file and renames it over `path`.
void save(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle load(const std::filesystem::path& path);

/// Current UTC time as YYYY-MM-DDTHH:MM:SSZ.
std::string utc_timestamp();

}  // namespace absa::persist
