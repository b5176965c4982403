#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cgd/signal.hpp"

namespace cgd::io {

/// `.f64v`: 8-byte little-endian length, then that many little-endian IEEE-754 doubles.
void write_f64v(const std::filesystem::path& path, const Vector& values);
Vector read_f64v(const std::filesystem::path& path);

struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major
};

/// Binary 8-bit PGM (P5, maxval 255).
void write_pgm(const std::filesystem::path& path, const GrayImage& image);
GrayImage read_pgm(const std::filesystem::path& path);

/// Row-major flatten of a signal into a width x (n/width) image;
/// pixel = clamp(round(value * scale), 0, 255).
GrayImage to_image(const Vector& values, int width, double scale);
/// Inverse of to_image up to 8-bit rounding: value = pixel / scale.
Vector from_image(const GrayImage& image, double scale);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace cgd::io
