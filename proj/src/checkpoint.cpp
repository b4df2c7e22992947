#include "nsesync/checkpoint.hpp"

#include <zlib.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

namespace nsesync {

namespace {

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const unsigned char*>(p);
    buf_.insert(buf_.end(), c, c + n);
  }
  template <class U>
  void uint(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
  }
  void f64(double v) { uint(std::bit_cast<std::uint64_t>(v)); }
  std::vector<unsigned char>& data() { return buf_; }

 private:
  std::vector<unsigned char> buf_;
};

class Reader {
 public:
  Reader(const std::vector<unsigned char>& buf, std::size_t end, const std::string& path)
      : buf_(buf), end_(end), path_(path) {}
  void need(std::size_t n) const {
    if (pos_ + n > end_) throw CheckpointError("checkpoint truncated: " + path_);
  }
  template <class U>
  U uint() {
    need(sizeof(U));
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= U(buf_[pos_ + i]) << (8 * i);
    pos_ += sizeof(U);
    return v;
  }
  double f64() { return std::bit_cast<double>(uint<std::uint64_t>()); }
  const unsigned char* take(std::size_t n) {
    need(n);
    const unsigned char* p = buf_.data() + pos_;
    pos_ += n;
    return p;
  }

 private:
  const std::vector<unsigned char>& buf_;
  std::size_t end_;
  std::string path_;
  std::size_t pos_ = 0;
};

std::uint32_t crc_of(const unsigned char* p, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks for very large grids
  while (n > 0) {
    const uInt chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, p, chunk);
    p += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

constexpr std::size_t kHeaderBytes = 8 + 4 + 4 + 8 + 8 + 8;

}  // namespace

void save_checkpoint(const PairState& state, double dt, const std::filesystem::path& path) {
  const SpectralGrid& grid = state.psi1.grid();
  if (!(state.psi2.grid() == grid)) throw CheckpointError("pair fields live on different grids");
  Writer w;
  w.data().reserve(kHeaderBytes + 2 * grid.size() * 16 + 4);
  w.bytes(kCheckpointMagic, sizeof kCheckpointMagic);
  w.uint<std::uint32_t>(kCheckpointVersion);
  w.uint<std::uint32_t>(static_cast<std::uint32_t>(grid.resolution()));
  w.f64(dt);
  w.f64(state.t);
  w.uint<std::uint64_t>(state.step);
  for (const StreamFunction* s : {&state.psi1, &state.psi2}) {
    for (const Complex& c : s->psi.coeffs()) {
      w.f64(c.real());
      w.f64(c.imag());
    }
  }
  w.uint<std::uint32_t>(crc_of(w.data().data(), w.data().size()));

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot open checkpoint for writing: " + tmp.string());
    out.write(reinterpret_cast<const char*>(w.data().data()), std::streamsize(w.data().size()));
    if (!out) throw CheckpointError("failed writing checkpoint: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw CheckpointError("cannot move checkpoint into place: " + path.string() + ": " + ec.message());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const std::string name = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointMissing(path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (buf.size() < sizeof kCheckpointMagic ||
      std::memcmp(buf.data(), kCheckpointMagic, sizeof kCheckpointMagic) != 0) {
    throw CheckpointError("not a checkpoint (bad magic): " + name);
  }
  if (buf.size() < kHeaderBytes + 4) throw CheckpointError("checkpoint truncated: " + name);

  Reader r(buf, buf.size() - 4, name);
  r.take(sizeof kCheckpointMagic);
  const auto version = r.uint<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version) + ": " + name);
  }
  const auto resolution = r.uint<std::uint32_t>();
  const double dt = r.f64();
  const double t = r.f64();
  const auto step = r.uint<std::uint64_t>();

  const std::size_t n = resolution;
  const std::size_t expected = kHeaderBytes + 2 * n * n * 16 + 4;
  if (buf.size() < expected) throw CheckpointError("checkpoint truncated: " + name);
  if (buf.size() > expected) throw CheckpointError("checkpoint has trailing data: " + name);

  std::uint32_t stored = 0;
  for (int i = 0; i < 4; ++i) stored |= std::uint32_t(buf[buf.size() - 4 + i]) << (8 * i);
  if (stored != crc_of(buf.data(), buf.size() - 4)) throw CheckpointError("checkpoint CRC mismatch: " + name);

  SpectralGrid grid = [&] {
    try {
      return SpectralGrid(int(resolution));
    } catch (const std::invalid_argument&) {
      throw CheckpointError("checkpoint has invalid resolution " + std::to_string(resolution) + ": " + name);
    }
  }();
  auto read_field = [&] {
    std::vector<Complex> coeffs(grid.size());
    for (auto& c : coeffs) {
      const double re = r.f64();
      const double im = r.f64();
      c = Complex(re, im);
    }
    return SpectralField(grid, std::move(coeffs));
  };
  SpectralField a = read_field();
  SpectralField b = read_field();
  return Checkpoint{PairState{{std::move(a)}, {std::move(b)}, t, step}, dt};
}

void require_resolution(const Checkpoint& checkpoint, const SpectralGrid& grid) {
  const int have = checkpoint.state.psi1.grid().resolution();
  if (have != grid.resolution()) {
    std::ostringstream os;
    os << "checkpoint resolution " << have << " does not match configured resolution " << grid.resolution();
    throw CheckpointError(os.str());
  }
}

}  // namespace nsesync
