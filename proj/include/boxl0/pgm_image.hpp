#pragma once

#include <cstddef>
#include <string>

#include "boxl0/operators.hpp"

namespace boxl0 {

// 8-bit grayscale image with pixels scaled to [0, 1], row-major.
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  Vector pixels;
};

// Binary PGM (P5) with maxval <= 255. Throws Io on unreadable or malformed files.
GrayImage read_pgm(const std::string& path);

// Values are clamped to [0, 1] and rounded to 0..255.
void write_pgm(const std::string& path, const GrayImage& image);

}  // namespace boxl0
