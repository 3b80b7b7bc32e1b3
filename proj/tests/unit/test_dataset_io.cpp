#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "nowcast/errors.hpp"
#include "nowcast/frame_io.hpp"
#include "nowcast/synthetic.hpp"
#include "nowcast/windows.hpp"

using namespace nowcast;
namespace fs = std::filesystem;

namespace {

fs::path temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "nowcast_test_dataset_io";
  fs::create_directories(dir);
  return dir / name;
}

void write_bytes(const fs::path& p, const std::vector<char>& b) {
  std::ofstream out(p, std::ios::binary);
  out.write(b.data(), static_cast<std::streamsize>(b.size()));
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::Io;
}

FrameSequence counting_sequence(std::size_t n) {
  std::vector<Field2D> frames;
  for (std::size_t i = 0; i < n; ++i) frames.push_back(Field2D::filled(2, 3, static_cast<float>(i), Unit::Normalized));
  return FrameSequence(std::move(frames));
}

}  // namespace

TEST_CASE("save_frames byte layout for a 1-frame 2x2 normalized field") {
  const FrameSequence seq({Field2D(2, 2, {1, 2, 3, 4}, Unit::Normalized)});
  const auto bytes = encode_frames(seq);
  REQUIRE(bytes.size() == 19 + 16);
  CHECK(std::string(bytes.data(), 4) == "W4CF");
  const unsigned char expect_header[] = {'W', '4', 'C', 'F', 1, 0, 1, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0, 1};
  CHECK(std::memcmp(bytes.data(), expect_header, 19) == 0);
  const unsigned char expect_payload[] = {0x00, 0x00, 0x80, 0x3F, 0x00, 0x00, 0x00, 0x40,
                                          0x00, 0x00, 0x40, 0x40, 0x00, 0x00, 0x80, 0x40};
  CHECK(std::memcmp(bytes.data() + 19, expect_payload, 16) == 0);
}

TEST_CASE("save/load round trip is bit-exact on random sequences") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<float> u(-1e4f, 1e4f);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 1 + rng() % 5, r = 1 + rng() % 7, c = 1 + rng() % 9;
    std::vector<Field2D> frames;
    for (std::size_t t = 0; t < n; ++t) {
      std::vector<float> d(r * c);
      for (auto& x : d) x = u(rng);
      frames.emplace_back(r, c, std::move(d), static_cast<Unit>(trial % 4));
    }
    const FrameSequence seq(std::move(frames));
    const auto p = temp_path("rt.w4cf");
    save_frames(seq, p);
    CHECK(load_frames(p) == seq);
    std::ifstream in(p, std::ios::binary);
    std::vector<char> disk((std::istreambuf_iterator<char>(in)), {});
    CHECK(disk == encode_frames(seq));
  }
}

TEST_CASE("load_frames error kinds") {
  auto good = encode_frames(FrameSequence({Field2D(2, 2, {1, 2, 3, 4}, Unit::Kelvin)}));

  auto bad_magic = good;
  std::memcpy(bad_magic.data(), "XXXX", 4);
  write_bytes(temp_path("magic.w4cf"), bad_magic);
  CHECK(kind_of([] { load_frames(temp_path("magic.w4cf")); }) == ErrorKind::Format);

  write_bytes(temp_path("empty.w4cf"), {});
  CHECK(kind_of([] { load_frames(temp_path("empty.w4cf")); }) == ErrorKind::Corruption);

  auto truncated = good;
  truncated.pop_back();
  write_bytes(temp_path("trunc.w4cf"), truncated);
  CHECK(kind_of([] { load_frames(temp_path("trunc.w4cf")); }) == ErrorKind::Corruption);

  auto nan = good;
  const float q = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(nan.data() + 19 + 4, &q, 4);
  write_bytes(temp_path("nan.w4cf"), nan);
  CHECK(kind_of([] { load_frames(temp_path("nan.w4cf")); }) == ErrorKind::Data);

  auto bad_unit = good;
  bad_unit[18] = 9;
  CHECK(kind_of([&] { decode_frames(bad_unit); }) == ErrorKind::Format);

  CHECK(kind_of([] { load_frames(temp_path("missing.w4cf")); }) == ErrorKind::Io);
}

TEST_CASE("make_windows index arithmetic") {
  const auto w1 = make_windows(counting_sequence(20), 1);
  REQUIRE(w1.size() == 13);
  CHECK(w1[0].input[0].at(0, 0) == 0.0f);
  CHECK(w1[0].input[3].at(0, 0) == 3.0f);
  CHECK(w1[0].target[0].at(0, 0) == 4.0f);
  CHECK(w1[0].target[3].at(0, 0) == 7.0f);

  const auto w4 = make_windows(counting_sequence(20), 4);
  REQUIRE(w4.size() == 1);
  CHECK(w4[0].input[0].at(0, 0) == 0.0f);
  CHECK(w4[0].target[0].at(0, 0) == 16.0f);
  CHECK(w4[0].target[3].at(0, 0) == 19.0f);

  CHECK(make_windows(counting_sequence(7), 1).empty());
  CHECK_THROWS_AS(make_windows(counting_sequence(20), 5), Error);
  CHECK_THROWS_AS(make_windows(counting_sequence(20), 0), Error);
}

TEST_CASE("make_windows invariant over lengths and offsets") {
  for (std::size_t len = 1; len <= 30; ++len) {
    for (int off = 1; off <= 4; ++off) {
      const auto ws = make_windows(counting_sequence(len), off);
      const std::size_t expect = len >= 4 + 4 * static_cast<std::size_t>(off) ? len - 4 - 4 * off + 1 : 0;
      CHECK(ws.size() == expect);
      for (const auto& w : ws) {
        const auto last_input = static_cast<std::size_t>(w.input.back().at(0, 0));
        const auto first_target = static_cast<std::size_t>(w.target.front().at(0, 0));
        CHECK(last_input + 4 * (off - 1) + 1 == first_target);
        CHECK(w.offset_hours == off);
        CHECK(w.input.size() == 4);
        CHECK(w.target.size() == 4);
      }
    }
  }
}

TEST_CASE("gen_synthetic is deterministic and bounded") {
  const auto a = gen_synthetic(7, 12, 40, 40);
  const auto b = gen_synthetic(7, 12, 40, 40);
  CHECK(a == b);
  CHECK(a.unit() == Unit::Kelvin);
  CHECK(gen_synthetic(8, 12, 40, 40) != a);
  for (const auto& f : a) {
    CHECK(field_reduce(f, Reduce::Min) >= 180.0);
    CHECK(field_reduce(f, Reduce::Max) <= 300.0);
  }
  const auto one = gen_synthetic(3, 1, 252, 252);
  CHECK(one.size() == 1);
  CHECK(field_reduce(one[0], Reduce::Min) >= 180.0);
  CHECK(field_reduce(one[0], Reduce::Max) <= 300.0);
}

TEST_CASE("gen_synthetic blob drawing respects the regime") {
  SyntheticConfig cfg;
  cfg.seed = 99;
  cfg.n_frames = 4;
  const auto blobs = draw_blobs(cfg);
  CHECK(blobs.size() == cfg.n_blobs);
  for (const auto& b : blobs) {
    const double speed = std::hypot(b.v_row, b.v_col);
    CHECK(speed <= 2.0 + 1e-12);
    CHECK(speed >= cfg.speed_min - 1e-12);
    CHECK(b.min_bt >= 200.0);
    CHECK(b.min_bt <= 260.0);
  }
}

TEST_CASE("gen_synthetic: velocity (1, 0) in (x, y) order moves the argmin one column per frame") {
  // fixed_velocity is (v_row, v_col), so x = 1 px/frame is (0, 1).
  SyntheticConfig cfg;
  cfg.seed = 7;
  cfg.n_frames = 10;
  cfg.rows = 64;
  cfg.cols = 64;
  cfg.n_blobs = 1;
  cfg.noise_k = 0.0;
  cfg.fixed_velocity = std::make_pair(0.0, 1.0);
  const auto seq = gen_synthetic(cfg);
  auto argmin = [](const Field2D& f) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < f.size(); ++i) {
      if (f.values()[i] < f.values()[best]) best = i;
    }
    return std::make_pair(best / f.cols(), best % f.cols());
  };
  for (std::size_t t = 0; t + 1 < seq.size(); ++t) {
    const auto [r0, c0] = argmin(seq[t]);
    const auto [r1, c1] = argmin(seq[t + 1]);
    const long dc = (static_cast<long>(c1) - static_cast<long>(c0) + 64) % 64;
    CHECK(dc >= 0);
    CHECK(dc <= 2);
    CHECK(r1 == r0);
  }
}
