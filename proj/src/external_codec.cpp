#include "cgd/external_codec.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <limits>
#include <thread>

#include "cgd/error.hpp"
#include "cgd/io.hpp"

namespace cgd {

namespace fs = std::filesystem;

std::string_view to_string(ExchangeFormat f) noexcept { return f == ExchangeFormat::kPgm ? "pgm" : "f64v"; }

ExchangeFormat parse_exchange_format(std::string_view name) {
  if (name == "f64v") return ExchangeFormat::kF64v;
  if (name == "pgm") return ExchangeFormat::kPgm;
  throw ConfigError("unknown exchange format '" + std::string(name) + "'");
}

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

std::string substitute(std::string tmpl, const fs::path& in, const fs::path& out) {
  const std::pair<std::string, std::string> subs[] = {{"{in}", shell_quote(in.string())},
                                                      {"{out}", shell_quote(out.string())}};
  for (const auto& [key, value] : subs) {
    for (std::size_t pos = tmpl.find(key); pos != std::string::npos; pos = tmpl.find(key, pos + value.size())) {
      tmpl.replace(pos, key.size(), value);
    }
  }
  return tmpl;
}

std::string read_text(const fs::path& path) {
  try {
    const auto bytes = io::read_bytes(path);
    return {bytes.begin(), bytes.end()};
  } catch (const IoError&) {
    return {};
  }
}

}  // namespace

CommandResult run_command(const std::string& command, double timeout_seconds, const fs::path& log_file) {
  CommandResult result;
  const pid_t pid = ::fork();
  if (pid < 0) throw CodecError("fork failed while running: " + command);
  if (pid == 0) {
    ::setpgid(0, 0);
    const int fd = ::open(log_file.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd >= 0) {
      ::dup2(fd, STDOUT_FILENO);
      ::dup2(fd, STDERR_FILENO);
      ::close(fd);
    }
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::setpgid(pid, pid);

  const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_seconds);
  int status = 0;
  while (true) {
    const pid_t r = ::waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0) throw CodecError("waitpid failed while running: " + command);
    if (std::chrono::steady_clock::now() >= deadline) {
      ::kill(-pid, SIGKILL);
      ::waitpid(pid, &status, 0);
      result.timed_out = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  if (!result.timed_out) result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  result.output = read_text(log_file);
  return result;
}

ExternalCodec::ExternalCodec(Eigen::Index n, ExternalCodecSpec spec) : n_(n), spec_(std::move(spec)) {
  if (n_ < 1) throw DomainError("external codec: n must be >= 1");
  if (spec_.encode_command.empty() || spec_.decode_command.empty()) {
    throw ConfigError("external codec: encode and decode commands are required");
  }
  if (!(spec_.timeout_seconds > 0.0)) throw ConfigError("external codec: timeout must be > 0");
  if (spec_.format == ExchangeFormat::kPgm) {
    const int width = spec_.image_width == 0 ? static_cast<int>(n_) : spec_.image_width;
    if (width <= 0 || n_ % width != 0) throw ConfigError("external codec: image width must divide n");
    if (!(spec_.pixel_scale > 0.0)) throw ConfigError("external codec: pixel_scale must be > 0");
  }
}

double ExternalCodec::distortion_bound() const { return std::numeric_limits<double>::infinity(); }

std::string ExternalCodec::extension() const { return spec_.format == ExchangeFormat::kPgm ? ".pgm" : ".f64v"; }

fs::path ExternalCodec::make_workdir() const {
  static std::atomic<std::uint64_t> counter{0};
  fs::path base = spec_.temp_dir;
  if (base.empty()) {
    const char* env = std::getenv("CGD_TMPDIR");
    base = env != nullptr && *env != '\0' ? fs::path(env) : fs::temp_directory_path();
  }
  fs::create_directories(base);
  const fs::path dir = base / ("cgd-codec-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::create_directories(dir);
  return dir;
}

void ExternalCodec::write_signal(const fs::path& path, const Vector& x) const {
  if (spec_.format == ExchangeFormat::kF64v) {
    io::write_f64v(path, x);
  } else {
    const int width = spec_.image_width == 0 ? static_cast<int>(n_) : spec_.image_width;
    io::write_pgm(path, io::to_image(x, width, spec_.pixel_scale));
  }
}

Vector ExternalCodec::read_signal(const fs::path& path) const {
  Vector v = spec_.format == ExchangeFormat::kF64v ? io::read_f64v(path)
                                                   : io::from_image(io::read_pgm(path), spec_.pixel_scale);
  if (v.size() != n_) {
    throw CodecError("external codec returned " + std::to_string(v.size()) + " samples, expected " +
                     std::to_string(n_));
  }
  if (!all_finite(v)) throw CodecError("external codec returned non-finite samples");
  return v;
}

namespace {

void run_or_throw(const std::string& stage, const std::string& command, double timeout, const fs::path& dir) {
  const CommandResult r = run_command(command, timeout, dir / (stage + ".log"));
  if (r.timed_out) throw CodecError(stage + " command timed out after " + std::to_string(timeout) + " s: " + command);
  if (r.exit_code != 0) {
    throw CodecError(stage + " command exited with " + std::to_string(r.exit_code) + ": " + command +
                     (r.output.empty() ? "" : "\n" + r.output) + "\n(temp files kept in " + dir.string() + ")");
  }
}

}  // namespace

BitStream ExternalCodec::encode(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != n_) throw DimensionError("external encode: length mismatch");
  const fs::path dir = make_workdir();
  const fs::path in = dir / ("signal" + extension());
  const fs::path out = dir / "code.bin";
  write_signal(in, x);
  run_or_throw("encode", substitute(spec_.encode_command, in, out), spec_.timeout_seconds, dir);
  std::vector<std::uint8_t> bytes;
  try {
    bytes = io::read_bytes(out);
  } catch (const IoError& e) {
    throw CodecError(std::string("encode command produced no output: ") + e.what());
  }
  fs::remove_all(dir);
  const std::size_t bits = bytes.size() * 8;
  return BitStream(std::move(bytes), bits);
}

Vector ExternalCodec::decode(const BitStream& bits) const {
  const fs::path dir = make_workdir();
  const fs::path in = dir / "code.bin";
  const fs::path out = dir / ("decoded" + extension());
  io::write_bytes(in, bits.bytes());
  run_or_throw("decode", substitute(spec_.decode_command, in, out), spec_.timeout_seconds, dir);
  Vector v;
  try {
    v = read_signal(out);
  } catch (const IoError& e) {
    throw CodecError(std::string("decode command output unreadable: ") + e.what() + " (temp files kept in " +
                     dir.string() + ")");
  }
  fs::remove_all(dir);
  return v;
}

Vector ExternalCodec::project(const Eigen::Ref<const Vector>& x) const { return decode(encode(x)); }

Vector external_project(const Eigen::Ref<const Vector>& x, const ExternalCodecSpec& spec) {
  return ExternalCodec(x.size(), spec).project(x);
}

}  // namespace cgd
