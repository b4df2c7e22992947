#pragma once

// Binary checkpoint of a PairState. Little-endian layout:
//
//   magic       8 bytes  "INTWNSE1"
//   version     u32      (currently 1)
//   resolution  u32
//   timestep    f64
//   clock       f64
//   step index  u64
//   field 1     resolution^2 complex coefficients, interleaved (re, im) f64,
//               row-major in FFT wavenumber order (kx index major)
//   field 2     same
//   crc32       u32      zlib CRC-32 of every preceding byte

#include <cstdint>
#include <filesystem>
#include <stdexcept>

#include "nsesync/timestepper.hpp"

namespace nsesync {

inline constexpr char kCheckpointMagic[8] = {'I', 'N', 'T', 'W', 'N', 'S', 'E', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The checkpoint path does not exist or cannot be opened.
class CheckpointMissing : public CheckpointError {
 public:
  explicit CheckpointMissing(const std::filesystem::path& path)
      : CheckpointError("checkpoint not found: " + path.string()), path_(path) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

struct Checkpoint {
  PairState state;
  double dt = 0.0;
};

/// Writes atomically (temporary file + rename). Throws CheckpointError on I/O failure.
void save_checkpoint(const PairState& state, double dt, const std::filesystem::path& path);

/// Throws CheckpointError for a missing file, bad magic, unknown version,
/// truncation or CRC mismatch. Never returns a partially read state.
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Throws CheckpointError naming both resolutions when they differ.
void require_resolution(const Checkpoint& checkpoint, const SpectralGrid& grid);

}  // namespace nsesync
