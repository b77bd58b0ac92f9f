#pragma once

#include <filesystem>
#include <string>

#include "difs/raster.hpp"

namespace difs {

// 8-bit grayscale, intensity -> round(v*255).  PGM (P5) is the bit-exact
// reference format; the PNG writer is a minimal encoder on top of zlib.
std::string encode_pgm(const RasterImage& img);
void write_pgm(const std::filesystem::path& path, const RasterImage& img);
void write_png(const std::filesystem::path& path, const RasterImage& img);

// dispatches on the extension (.pgm / .png)
void write_image(const std::filesystem::path& path, const RasterImage& img);

// Binary PGM (P5, maxval <= 255) mapped linearly to [0,1]; the caller owns
// the viewport assignment (world rect defaults match the raster size).
RasterImage read_pgm(const std::filesystem::path& path);

} // namespace difs
