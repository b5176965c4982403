#pragma once

#include <filesystem>
#include <string>

#include "cgd/code.hpp"

namespace cgd {

enum class ExchangeFormat { kF64v, kPgm };

std::string_view to_string(ExchangeFormat f) noexcept;
ExchangeFormat parse_exchange_format(std::string_view name);

/// How to drive an external codec binary.
///
/// Command templates are run with /bin/sh -c after substituting {in} and {out}
/// by single-quoted temp-file paths. The encode command reads the signal in the
/// exchange format and writes the compressed file; the decode command reads
/// the compressed file and writes the signal back in the exchange format.
struct ExternalCodecSpec {
  std::string encode_command;
  std::string decode_command;
  ExchangeFormat format = ExchangeFormat::kF64v;
  double timeout_seconds = 30.0;
  int image_width = 0;         ///< PGM only; 0 means a single row of n pixels
  double pixel_scale = 255.0;  ///< PGM only; pixel = round(value * scale)
  /// Directory for temp files; empty means $CGD_TMPDIR, else the system temp directory.
  std::filesystem::path temp_dir;
};

/// Compression code backed by an external program (JPEG, JPEG2000, ...).
///
/// Streams are the raw bytes of the compressed file. Each call gets its own
/// temp directory, removed on success and kept on failure for inspection.
class ExternalCodec final : public CompressionCode {
 public:
  ExternalCodec(Eigen::Index n, ExternalCodecSpec spec);

  [[nodiscard]] std::string name() const override { return "external"; }
  [[nodiscard]] Eigen::Index length() const override { return n_; }
  [[nodiscard]] const ExternalCodecSpec& spec() const noexcept { return spec_; }

  [[nodiscard]] BitStream encode(const Eigen::Ref<const Vector>& x) const override;
  [[nodiscard]] Vector decode(const BitStream& bits) const override;
  [[nodiscard]] Vector project(const Eigen::Ref<const Vector>& x) const override;

  [[nodiscard]] std::optional<std::uint64_t> rate_bits() const override { return std::nullopt; }
  [[nodiscard]] double distortion_bound() const override;

 private:
  [[nodiscard]] std::filesystem::path make_workdir() const;
  void write_signal(const std::filesystem::path& path, const Vector& x) const;
  [[nodiscard]] Vector read_signal(const std::filesystem::path& path) const;
  [[nodiscard]] std::string extension() const;

  Eigen::Index n_;
  ExternalCodecSpec spec_;
};

/// external_project(x, spec): round trip through the codec binaries.
Vector external_project(const Eigen::Ref<const Vector>& x, const ExternalCodecSpec& spec);

struct CommandResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string output;  ///< combined stdout/stderr
};

/// Runs `command` under /bin/sh with a wall-clock timeout (the whole process group is killed on expiry).
CommandResult run_command(const std::string& command, double timeout_seconds, const std::filesystem::path& log_file);

}  // namespace cgd
