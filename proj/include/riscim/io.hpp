#pragma once

#include <filesystem>
#include <string>

#include "riscim/fields.hpp"
#include "riscim/recon.hpp"

namespace riscim {

void ensure_directory(const std::filesystem::path& dir);

/// FieldMap as CSV rows x,y,z,re,im.
void write_field_csv(const FieldMap& field, const std::filesystem::path& path);

/// Magnitude of grid-shaped complex samples as a binary PGM (P5), max
/// normalized; first row is the largest y (north up).
void write_magnitude_pgm(const CVector& values, const PlaneGrid& grid,
                         const std::filesystem::path& path);

/// Reconstruction as CSV rows x,y,magnitude,phase.
void write_image_csv(const CVector& sigma, const PlaneGrid& grid,
                     const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     const std::string& content);

}  // namespace riscim
