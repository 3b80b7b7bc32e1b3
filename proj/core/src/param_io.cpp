#include "nowcast/param_io.hpp"

#include <cmath>
#include <string>

#include "binary.hpp"
#include "nowcast/errors.hpp"

namespace nowcast::nn {

namespace {

void write_array(detail::ByteWriter& w, const std::string& name, const std::vector<std::uint32_t>& dims,
                 const std::vector<float>& data) {
  w.u16(static_cast<std::uint16_t>(name.size()));
  w.bytes(name);
  w.u8(static_cast<std::uint8_t>(dims.size()));
  for (auto d : dims) w.u32(d);
  for (float v : data) w.f32(v);
}

void read_array(detail::ByteReader& r, const std::string& expect_name,
                const std::vector<std::uint32_t>& expect_dims, std::vector<float>& out) {
  const auto len = r.u16();
  const std::string name = r.bytes(len);
  require(name == expect_name, ErrorKind::Format,
          "parameter array '" + name + "' found where '" + expect_name + "' was expected");
  const auto ndim = r.u8();
  std::vector<std::uint32_t> dims(ndim);
  for (auto& d : dims) d = r.u32();
  require(dims == expect_dims, ErrorKind::Format, "parameter array '" + name + "' has wrong shape");
  for (float& v : out) {
    v = r.f32();
    require(std::isfinite(v), ErrorKind::Data, "non-finite value in parameter array '" + name + "'");
  }
}

}  // namespace

std::vector<char> encode_params(const NetParams<float>& p) {
  detail::ByteWriter w;
  w.bytes(std::string_view(kParamMagic, 4));
  w.u16(kParamVersion);
  w.u8(static_cast<std::uint8_t>(p.arch.cell));
  w.u8(p.arch.skip ? 1 : 0);
  for (int width : p.arch.widths()) w.u32(static_cast<std::uint32_t>(width));
  std::uint32_t n_arrays = 0;
  p.for_each_conv([&n_arrays](const std::string&, const ConvParams<float>&) { n_arrays += 2; });
  w.u32(n_arrays);
  p.for_each_conv([&w](const std::string& name, const ConvParams<float>& c) {
    const auto out = static_cast<std::uint32_t>(c.out_ch);
    const auto in = static_cast<std::uint32_t>(c.in_ch);
    write_array(w, name + ".kernels", {out, in, kKernel, kKernel}, c.kernels);
    write_array(w, name + ".bias", {out}, c.bias);
  });
  return w.buffer();
}

NetParams<float> decode_params(std::vector<char> bytes) {
  detail::ByteReader r(std::move(bytes));
  if (r.remaining() < 4) fail(ErrorKind::Corruption, "parameter file shorter than its header");
  require(r.bytes(4) == std::string_view(kParamMagic, 4), ErrorKind::Format,
          "bad parameter file magic");
  const auto version = r.u16();
  require(version == kParamVersion, ErrorKind::Format,
          "unsupported parameter file version " + std::to_string(version));
  const auto kind = r.u8();
  require(kind <= 1, ErrorKind::Format, "unknown cell kind tag " + std::to_string(kind));
  Arch arch;
  arch.cell = static_cast<CellKind>(kind);
  const auto skip = r.u8();
  require(skip <= 1, ErrorKind::Format, "skip flag must be 0 or 1");
  arch.skip = skip == 1;
  arch.enc1 = static_cast<int>(r.u32());
  arch.enc2 = static_cast<int>(r.u32());
  arch.hidden1 = static_cast<int>(r.u32());
  arch.hidden2 = static_cast<int>(r.u32());
  arch.dec1 = static_cast<int>(r.u32());
  arch.dec2 = static_cast<int>(r.u32());
  for (int width : arch.widths()) {
    require(width > 0 && width < (1 << 16), ErrorKind::Format, "implausible channel width");
  }
  NetParams<float> p(arch);
  std::uint32_t expected = 0;
  p.for_each_conv([&expected](const std::string&, ConvParams<float>&) { expected += 2; });
  require(r.u32() == expected, ErrorKind::Format, "parameter array count does not match architecture");
  p.for_each_conv([&r](const std::string& name, ConvParams<float>& c) {
    const auto out = static_cast<std::uint32_t>(c.out_ch);
    const auto in = static_cast<std::uint32_t>(c.in_ch);
    read_array(r, name + ".kernels", {out, in, kKernel, kKernel}, c.kernels);
    read_array(r, name + ".bias", {out}, c.bias);
  });
  require(r.remaining() == 0, ErrorKind::Corruption, "trailing bytes after parameter arrays");
  return p;
}

void save_params(const NetParams<float>& p, const std::filesystem::path& path) {
  detail::write_file(path, encode_params(p));
}

NetParams<float> load_params(const std::filesystem::path& path) {
  return decode_params(detail::read_file(path));
}

}  // namespace nowcast::nn
