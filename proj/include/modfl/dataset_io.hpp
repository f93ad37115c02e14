#pragma once

#include <filesystem>

#include "modfl/molp.hpp"

namespace mdfl {

inline constexpr const char* kVersion = "0.1.0";

// Dataset directory layout: manifest.json (benchmark, seed, splits, version)
// plus one instance_NNNNN.json per instance.
void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace mdfl
