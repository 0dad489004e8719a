#pragma once

// Pool directory layout:
//   {pool}/class_{m}/sample_{i}.mxt   one rank-1 float32 tensor per sample
//   {pool}/labels.csv                 "path,label" header, then one row per
//                                     sample with the path relative to {pool}

#include <filesystem>

#include "tribound/synthlab.hpp"

namespace tribound {

/// Throws InsufficientSamples when the directory or labels.csv is missing and
/// ConfigError for malformed rows or ragged sample shapes.
LabeledPool read_pool_dir(const std::filesystem::path& dir);

/// Samples are numbered per class in pool order. Values are stored as float32.
void write_pool_dir(const std::filesystem::path& dir, const LabeledPool& pool);

}  // namespace tribound
