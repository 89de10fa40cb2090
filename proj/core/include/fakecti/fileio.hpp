#pragma once

#include <string>
#include <string_view>

namespace fakecti
{

/// Writes via a sibling temporary file and rename, so readers never observe a
/// partial file. Throws Error(IoFailure).
void write_file_atomic(const std::string& path, std::string_view content);

/// Throws Error(IoFailure).
std::string read_file(const std::string& path);

bool file_exists(const std::string& path);

} // namespace fakecti
