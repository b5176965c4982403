#include "cgd/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cgd/error.hpp"

namespace cgd::io {

namespace {

void put_u64_le(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64_le(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

void write_f64v(const std::filesystem::path& path, const Vector& values) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(8 + 8 * static_cast<std::size_t>(values.size()));
  put_u64_le(bytes, static_cast<std::uint64_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) put_u64_le(bytes, std::bit_cast<std::uint64_t>(values(i)));
  write_bytes(path, bytes);
}

Vector read_f64v(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  if (bytes.size() < 8) throw IoError(path.string() + ": truncated .f64v header");
  const std::uint64_t n = get_u64_le(bytes.data());
  if (bytes.size() != 8 + 8 * n) {
    throw IoError(path.string() + ": .f64v length field " + std::to_string(n) + " does not match file size");
  }
  Vector v(static_cast<Eigen::Index>(n));
  for (std::uint64_t i = 0; i < n; ++i) {
    v(static_cast<Eigen::Index>(i)) = std::bit_cast<double>(get_u64_le(bytes.data() + 8 + 8 * i));
  }
  return v;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  if (image.width <= 0 || image.height <= 0 ||
      image.pixels.size() != static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.height)) {
    throw DimensionError("write_pgm: pixel count does not match width x height");
  }
  std::ostringstream header;
  header << "P5\n" << image.width << ' ' << image.height << "\n255\n";
  const std::string h = header.str();
  std::vector<std::uint8_t> bytes(h.begin(), h.end());
  bytes.insert(bytes.end(), image.pixels.begin(), image.pixels.end());
  write_bytes(path, bytes);
}

GrayImage read_pgm(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  std::size_t pos = 0;
  // Next whitespace-delimited header token, skipping '#' comments.
  auto token = [&]() -> std::string {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    std::string t;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) t.push_back(static_cast<char>(bytes[pos++]));
    return t;
  };
  if (token() != "P5") throw IoError(path.string() + ": not a binary PGM (P5)");
  GrayImage img;
  try {
    img.width = std::stoi(token());
    img.height = std::stoi(token());
    if (std::stoi(token()) != 255) throw IoError(path.string() + ": only maxval 255 is supported");
  } catch (const std::logic_error&) {
    throw IoError(path.string() + ": malformed PGM header");
  }
  ++pos;  // single whitespace after maxval
  const std::size_t count = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.height);
  if (img.width <= 0 || img.height <= 0 || bytes.size() < pos + count) {
    throw IoError(path.string() + ": truncated PGM raster");
  }
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                    bytes.begin() + static_cast<std::ptrdiff_t>(pos + count));
  return img;
}

GrayImage to_image(const Vector& values, int width, double scale) {
  if (width <= 0 || values.size() % width != 0) {
    throw DimensionError("to_image: length " + std::to_string(values.size()) + " is not a multiple of width " +
                         std::to_string(width));
  }
  GrayImage img;
  img.width = width;
  img.height = static_cast<int>(values.size() / width);
  img.pixels.resize(static_cast<std::size_t>(values.size()));
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double p = std::clamp(std::round(values(i) * scale), 0.0, 255.0);
    img.pixels[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(p);
  }
  return img;
}

Vector from_image(const GrayImage& image, double scale) {
  Vector v(static_cast<Eigen::Index>(image.pixels.size()));
  for (std::size_t i = 0; i < image.pixels.size(); ++i) v(static_cast<Eigen::Index>(i)) = image.pixels[i] / scale;
  return v;
}

}  // namespace cgd::io
