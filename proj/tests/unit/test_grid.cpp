#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "nowcast/errors.hpp"
#include "nowcast/grid.hpp"

using namespace nowcast;

namespace {
Field2D f22(std::vector<float> v, Unit u = Unit::Normalized) { return Field2D(2, 2, std::move(v), u); }
}  // namespace

TEST_CASE("Field2D enforces shape and finiteness") {
  CHECK_THROWS_AS(Field2D(2, 2, {1, 2, 3}, Unit::Kelvin), Error);
  CHECK_THROWS_AS(Field2D(1, 2, {1, std::numeric_limits<float>::quiet_NaN()}, Unit::Kelvin), Error);
  CHECK_THROWS_AS(Field2D(1, 1, {std::numeric_limits<float>::infinity()}, Unit::Kelvin), Error);
  const Field2D f = f22({1, 2, 3, 4});
  CHECK(f.at(1, 0) == 3.0f);
  CHECK(f.unit() == Unit::Normalized);
}

TEST_CASE("field_map examples") {
  const Field2D f = f22({1, 2, 3, 4});
  CHECK(field_map(f, [](float x) { return x + 1; }) == f22({2, 3, 4, 5}));
  CHECK(field_map(f, [](float x) { return x; }) == f);
  const Field2D g(1, 3, {0, -1, 5}, Unit::Normalized);
  CHECK(field_map(g, [](float x) { return std::max(0.0f, x); }) ==
        Field2D(1, 3, {0, 0, 5}, Unit::Normalized));
  CHECK(field_map(f, [](float x) { return x; }, Unit::Kelvin).unit() == Unit::Kelvin);
}

TEST_CASE("field_map identity is bit-exact on random fields") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<float> u(-1e6f, 1e6f);
  std::vector<float> v(97 * 13);
  for (auto& x : v) x = u(rng);
  const Field2D f(97, 13, v, Unit::Kelvin);
  CHECK(field_map(f, [](float x) { return x; }) == f);
}

TEST_CASE("field_map rejects a non-finite result") {
  CHECK_THROWS_AS(field_map(f22({1, 2, 3, 4}), [](float) { return std::nanf(""); }), Error);
}

TEST_CASE("field_reduce examples") {
  const Field2D f = f22({1, 2, 3, 4});
  CHECK(field_reduce(f, Reduce::Sum) == 10.0);
  CHECK(field_reduce(f, Reduce::Mean) == 2.5);
  CHECK(field_reduce(f, Reduce::Max) == 4.0);
  CHECK(field_reduce(f, Reduce::Min) == 1.0);
  CHECK(field_reduce(Field2D::filled(5, 7, 3.25f, Unit::Mm), Reduce::Max) == 3.25);
  CHECK_THROWS_AS(field_reduce(Field2D(), Reduce::Sum), Error);
}

TEST_CASE("field_reduce accumulates in 64 bits") {
  // 1512^2 cells of 0.1f: float accumulation drifts visibly, double does not.
  const std::size_t n = 1512;
  const Field2D f = Field2D::filled(n, n, 0.1f, Unit::MmPerH);
  const double expect = static_cast<double>(0.1f) * n * n;
  CHECK(field_reduce(f, Reduce::Sum) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("stack_to_volume layout") {
  const FrameSequence seq({f22({1, 2, 3, 4}), f22({5, 6, 7, 8})});
  const Volume3D v = stack_to_volume(seq);
  CHECK(v.t() == 2);
  CHECK(v.rows() == 2);
  CHECK(v.cols() == 2);
  CHECK(std::vector<float>(v.values().begin(), v.values().begin() + 4) == std::vector<float>{1, 2, 3, 4});
  CHECK(v.at(1, 1, 0) == 7.0f);
  CHECK(volume_to_sequence(v) == seq);

  const Volume3D one = stack_to_volume(FrameSequence({f22({1, 2, 3, 4})}));
  CHECK(one.t() == 1);
  CHECK(std::vector<float>(one.values().begin(), one.values().end()) == std::vector<float>{1, 2, 3, 4});
}

TEST_CASE("stack_to_volume at radar scale") {
  std::vector<Field2D> frames(16, Field2D::filled(1512, 1512, 0.5f, Unit::MmPerH));
  const Volume3D v = stack_to_volume(FrameSequence(std::move(frames)));
  CHECK(v.t() == 16);
  CHECK(v.rows() == 1512);
  CHECK(v.cols() == 1512);
}

TEST_CASE("reduce over a singleton volume matches the field") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<float> u(0, 10);
  std::vector<float> d(6 * 9);
  for (auto& x : d) x = u(rng);
  const Field2D f(6, 9, d, Unit::Mm);
  const Volume3D v = stack_to_volume(FrameSequence({f}));
  double s = 0;
  for (float x : v.values()) s += x;
  CHECK(field_reduce(f, Reduce::Sum) == s);
}

TEST_CASE("FrameSequence invariants") {
  CHECK_THROWS_AS(FrameSequence(std::vector<Field2D>{}), Error);
  CHECK_THROWS_AS(FrameSequence({f22({1, 2, 3, 4}), Field2D(1, 4, {1, 2, 3, 4}, Unit::Normalized)}), Error);
  CHECK_THROWS_AS(FrameSequence({f22({1, 2, 3, 4}), f22({1, 2, 3, 4}, Unit::Kelvin)}), Error);
  const FrameSequence seq({f22({1, 1, 1, 1}), f22({2, 2, 2, 2}), f22({3, 3, 3, 3})});
  CHECK(seq.slice(1, 2)[0] == f22({2, 2, 2, 2}));
  CHECK_THROWS_AS(seq.slice(2, 2), Error);
  CHECK(FrameSequence::kStepMinutes == 15);
}
