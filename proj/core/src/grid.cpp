#include "nowcast/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nowcast/errors.hpp"

namespace nowcast {

namespace {

void require_finite(std::span<const float> data, const char* what) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!std::isfinite(data[i])) {
      fail(ErrorKind::Data, std::string(what) + ": non-finite value at index " +
                                std::to_string(i));
    }
  }
}

}  // namespace

std::string_view to_string(Unit unit) {
  switch (unit) {
    case Unit::Kelvin: return "kelvin";
    case Unit::Normalized: return "normalized";
    case Unit::MmPerH: return "mm_per_h";
    case Unit::Mm: return "mm";
  }
  return "unknown";
}

Field2D::Field2D(std::size_t rows, std::size_t cols, std::vector<float> data, Unit unit)
    : rows_(rows), cols_(cols), data_(std::move(data)), unit_(unit) {
  require(data_.size() == rows_ * cols_, ErrorKind::Shape,
          "Field2D data length " + std::to_string(data_.size()) + " != " +
              std::to_string(rows_) + "x" + std::to_string(cols_));
  require_finite(data_, "Field2D");
}

Field2D Field2D::filled(std::size_t rows, std::size_t cols, float value, Unit unit) {
  return Field2D(rows, cols, std::vector<float>(rows * cols, value), unit);
}

FrameSequence::FrameSequence(std::vector<Field2D> frames) : frames_(std::move(frames)) {
  require(!frames_.empty(), ErrorKind::Shape, "FrameSequence must be non-empty");
  const Field2D& first = frames_.front();
  for (std::size_t i = 1; i < frames_.size(); ++i) {
    require(frames_[i].same_shape(first), ErrorKind::Shape,
            "FrameSequence frame " + std::to_string(i) + " has a different shape");
    require(frames_[i].unit() == first.unit(), ErrorKind::Shape,
            "FrameSequence frame " + std::to_string(i) + " has a different unit");
  }
}

FrameSequence FrameSequence::slice(std::size_t first, std::size_t count) const {
  require(first + count <= frames_.size() && count > 0, ErrorKind::Shape,
          "FrameSequence slice out of range");
  return FrameSequence(std::vector<Field2D>(frames_.begin() + static_cast<long>(first),
                                            frames_.begin() + static_cast<long>(first + count)));
}

Volume3D::Volume3D(std::size_t t, std::size_t rows, std::size_t cols, std::vector<float> data,
                   Unit unit)
    : t_(t), rows_(rows), cols_(cols), data_(std::move(data)), unit_(unit) {
  require(data_.size() == t_ * rows_ * cols_, ErrorKind::Shape, "Volume3D data length mismatch");
  require_finite(data_, "Volume3D");
}

Field2D field_map(const Field2D& f, const std::function<float(float)>& g,
                  std::optional<Unit> out_unit) {
  std::vector<float> out(f.size());
  std::ranges::transform(f.values(), out.begin(), g);
  return Field2D(f.rows(), f.cols(), std::move(out), out_unit.value_or(f.unit()));
}

double field_reduce(const Field2D& f, Reduce op) {
  require(!f.empty(), ErrorKind::Shape, "field_reduce on an empty field");
  auto values = f.values();
  switch (op) {
    case Reduce::Sum:
    case Reduce::Mean: {
      double acc = 0.0;
      for (float v : values) acc += v;
      return op == Reduce::Sum ? acc : acc / static_cast<double>(values.size());
    }
    case Reduce::Max: return *std::ranges::max_element(values);
    case Reduce::Min: return *std::ranges::min_element(values);
  }
  return 0.0;
}

Volume3D stack_to_volume(const FrameSequence& seq) {
  require(!seq.empty(), ErrorKind::Shape, "stack_to_volume of an empty sequence");
  const std::size_t plane = seq.rows() * seq.cols();
  std::vector<float> data;
  data.reserve(seq.size() * plane);
  for (const Field2D& f : seq) {
    require(f.rows() == seq.rows() && f.cols() == seq.cols(), ErrorKind::Shape,
            "stack_to_volume: frame shape mismatch");
    data.insert(data.end(), f.values().begin(), f.values().end());
  }
  return Volume3D(seq.size(), seq.rows(), seq.cols(), std::move(data), seq.unit());
}

FrameSequence volume_to_sequence(const Volume3D& v) {
  std::vector<Field2D> frames;
  frames.reserve(v.t());
  for (std::size_t t = 0; t < v.t(); ++t) {
    auto plane = v.frame(t);
    frames.emplace_back(v.rows(), v.cols(), std::vector<float>(plane.begin(), plane.end()),
                        v.unit());
  }
  return FrameSequence(std::move(frames));
}

}  // namespace nowcast
