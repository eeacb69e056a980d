#pragma once

#include <filesystem>
#include <string>

#include "sppa/kde.hpp"

namespace sppa {

enum class PgmMode { pgm8, pgm16 };

PgmMode pgm_mode_from_name(std::string_view name);
std::string_view pgm_mode_name(PgmMode mode);

/// Binary P5 image of the raster, values scaled linearly from
/// [min, max] onto [0, maxval]; a constant raster maps to all zeros.
/// The top image row is the maximum-y raster row. 16-bit samples are
/// big-endian per the format.
std::string render_pgm(const Raster& raster, PgmMode mode);

/// key=value sidecar describing the scaling and the raster geometry.
std::string render_pgm_sidecar(const Raster& raster, PgmMode mode);

/// Writes the image and `<path>.txt` beside it; both atomically.
void write_pgm_with_sidecar(const std::filesystem::path& path, const Raster& raster, PgmMode mode);

/// Plain-text raster exchange format: key=value header, then `data`,
/// then one line of full-precision values per row.
std::string render_raster_text(const Raster& raster);
Raster parse_raster_text(std::string_view text, std::string_view source_name);

}  // namespace sppa
