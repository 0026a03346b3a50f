#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Core>

#include "thinfb/grid.hpp"

namespace thinfb {

/// Raw little-endian float64 values plus "<path>.json" with
/// {n, h, parity_tag, description}.
void write_snapshot(const std::filesystem::path& path, const GridField& f, const std::string& description = "");
GridField read_snapshot(const std::filesystem::path& path);

/// Plain float64 array I/O shared by snapshot and coefficient bundles.
void write_f64(const std::filesystem::path& path, const double* data, std::size_t count);
Eigen::ArrayXd read_f64(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& path);

}  // namespace thinfb
