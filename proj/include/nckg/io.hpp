#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "nckg/error.hpp"

namespace nckg {

class IoError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temp file, then renames over `path`, so readers never
/// see a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace nckg
