#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace socmap::cli {

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// Reproducibility record written next to every command's outputs. Holds no
// timestamps, so identical runs produce identical manifests.
struct manifest {
  std::string command;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> config;
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;  // digested, listed relative to the output directory
  std::vector<std::pair<std::string, std::string>> settings;  // effective flag overrides
};

// Writes <dir>/manifest.json and returns its path.
std::filesystem::path write_manifest(const std::filesystem::path& dir, const manifest& m);

}  // namespace socmap::cli
