#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string_view>

#include "nckg/gateway.hpp"

namespace nckg::cli {

using Getenv = std::function<const char*(const char*)>;

struct AppConfig {
  std::filesystem::path store_path = "nckg.ttls";
  std::filesystem::path ontology_path;  // empty: built-in ontology
  GatewayConfig gateway;
  std::size_t top_k = 2;
  std::size_t max_depth = 8;
  std::filesystem::path output_dir = "out";
};

/// Reads the JSON config file; keys mirror AppConfig, gateway settings nest under "gateway".
AppConfig load_config(const std::filesystem::path& path);

/// "mock:<script>" or "http".
void apply_backend(GatewayConfig& cfg, std::string_view spec);

/// Runs one command. Returns the process exit code: 0 ok, 1 failure, 2 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const Getenv& getenv = nullptr);

}  // namespace nckg::cli
