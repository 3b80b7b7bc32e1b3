#include "nowcast/frame_io.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "binary.hpp"
#include "nowcast/errors.hpp"

namespace nowcast {

namespace detail {

std::vector<char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open " + path.string());
  return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, const std::vector<char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorKind::Io, "write failed: " + path.string());
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  write_file(path, std::vector<char>(text.begin(), text.end()));
}

}  // namespace detail

std::vector<char> encode_frames(const FrameSequence& seq) {
  require(!seq.empty(), ErrorKind::Shape, "cannot save an empty frame sequence");
  detail::ByteWriter w;
  w.bytes(std::string_view(kFrameMagic, 4));
  w.u16(kFrameVersion);
  w.u32(static_cast<std::uint32_t>(seq.size()));
  w.u32(static_cast<std::uint32_t>(seq.rows()));
  w.u32(static_cast<std::uint32_t>(seq.cols()));
  w.u8(static_cast<std::uint8_t>(seq.unit()));
  for (const Field2D& f : seq) {
    for (float v : f.values()) w.f32(v);
  }
  return w.buffer();
}

FrameSequence decode_frames(std::vector<char> bytes) {
  if (bytes.size() < kFrameHeaderBytes) {
    // An empty or short file cannot even hold a header.
    if (bytes.size() >= 4 && std::string_view(bytes.data(), 4) != std::string_view(kFrameMagic, 4)) {
      fail(ErrorKind::Format, "bad frame file magic");
    }
    fail(ErrorKind::Corruption, "frame file shorter than its header");
  }
  detail::ByteReader r(std::move(bytes));
  if (r.bytes(4) != std::string_view(kFrameMagic, 4)) fail(ErrorKind::Format, "bad frame file magic");
  const auto version = r.u16();
  require(version == kFrameVersion, ErrorKind::Format,
          "unsupported frame file version " + std::to_string(version));
  const std::uint64_t n = r.u32();
  const std::uint64_t rows = r.u32();
  const std::uint64_t cols = r.u32();
  const auto tag = r.u8();
  require(tag <= static_cast<std::uint8_t>(Unit::Mm), ErrorKind::Format,
          "unknown unit tag " + std::to_string(tag));
  require(n > 0 && rows > 0 && cols > 0, ErrorKind::Corruption, "frame file declares no data");
  const std::uint64_t plane = rows * cols;
  require(r.remaining() == n * plane * 4, ErrorKind::Corruption,
          "frame payload length does not match header");

  std::vector<Field2D> frames;
  frames.reserve(n);
  for (std::uint64_t t = 0; t < n; ++t) {
    std::vector<float> data(plane);
    for (auto& v : data) {
      v = r.f32();
      if (std::isnan(v) || std::isinf(v)) {
        fail(ErrorKind::Data, "non-finite value in frame " + std::to_string(t));
      }
    }
    frames.emplace_back(rows, cols, std::move(data), static_cast<Unit>(tag));
  }
  return FrameSequence(std::move(frames));
}

FrameSequence load_frames(const std::filesystem::path& path) {
  return decode_frames(detail::read_file(path));
}

void save_frames(const FrameSequence& seq, const std::filesystem::path& path) {
  detail::write_file(path, encode_frames(seq));
}

}  // namespace nowcast
