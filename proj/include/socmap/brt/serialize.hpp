#pragma once

#include <socmap/brt/boosting.hpp>

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace socmap::brt {

inline constexpr std::uint32_t model_format_version = 1;

// Little-endian binary layout documented in docs/model_format.md. Reading
// back a written model reproduces it exactly.
std::vector<std::uint8_t> serialize(const boosted_model& model);
boosted_model deserialize(std::span<const std::uint8_t> bytes);

void save_model(const std::filesystem::path& path, const boosted_model& model);
boosted_model load_model(const std::filesystem::path& path);

}  // namespace socmap::brt
