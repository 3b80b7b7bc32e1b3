#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace nowcast {

/// Physical meaning of the values in a grid. Checked at module boundaries only.
enum class Unit : unsigned char { Kelvin = 0, Normalized = 1, MmPerH = 2, Mm = 3 };

std::string_view to_string(Unit unit);

/// Single-channel row-major 2D grid. Storage is 32-bit; every stored value is
/// finite (enforced at construction).
class Field2D {
 public:
  Field2D() = default;
  Field2D(std::size_t rows, std::size_t cols, std::vector<float> data, Unit unit);

  static Field2D filled(std::size_t rows, std::size_t cols, float value, Unit unit);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }
  Unit unit() const noexcept { return unit_; }

  float at(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<const float> values() const noexcept { return data_; }

  bool same_shape(const Field2D& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const Field2D&, const Field2D&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> data_;
  Unit unit_ = Unit::Normalized;
};

/// Time-ordered frames on a fixed 15-minute step. Non-empty, homogeneous.
class FrameSequence {
 public:
  static constexpr int kStepMinutes = 15;

  FrameSequence() = default;
  explicit FrameSequence(std::vector<Field2D> frames);

  std::size_t size() const noexcept { return frames_.size(); }
  bool empty() const noexcept { return frames_.empty(); }
  const Field2D& operator[](std::size_t i) const { return frames_[i]; }
  const Field2D& front() const { return frames_.front(); }
  const Field2D& back() const { return frames_.back(); }
  std::size_t rows() const { return frames_.front().rows(); }
  std::size_t cols() const { return frames_.front().cols(); }
  Unit unit() const { return frames_.front().unit(); }

  auto begin() const noexcept { return frames_.begin(); }
  auto end() const noexcept { return frames_.end(); }
  const std::vector<Field2D>& frames() const noexcept { return frames_; }

  /// Frames [first, first + count).
  FrameSequence slice(std::size_t first, std::size_t count) const;

  friend bool operator==(const FrameSequence&, const FrameSequence&) = default;

 private:
  std::vector<Field2D> frames_;
};

/// t-major, then row-major 3D grid.
class Volume3D {
 public:
  Volume3D() = default;
  Volume3D(std::size_t t, std::size_t rows, std::size_t cols, std::vector<float> data,
           Unit unit);

  std::size_t t() const noexcept { return t_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  Unit unit() const noexcept { return unit_; }

  float at(std::size_t t, std::size_t r, std::size_t c) const {
    return data_[(t * rows_ + r) * cols_ + c];
  }
  std::span<const float> values() const noexcept { return data_; }
  std::span<const float> frame(std::size_t t) const {
    return std::span<const float>(data_).subspan(t * rows_ * cols_, rows_ * cols_);
  }

  friend bool operator==(const Volume3D&, const Volume3D&) = default;

 private:
  std::size_t t_ = 0;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> data_;
  Unit unit_ = Unit::MmPerH;
};

enum class Reduce { Sum, Max, Min, Mean };

/// Elementwise map. The result carries `out_unit` if given, else f's unit.
Field2D field_map(const Field2D& f, const std::function<float(float)>& g,
                  std::optional<Unit> out_unit = std::nullopt);

/// Exact reduction with 64-bit accumulation. Throws on an empty field.
double field_reduce(const Field2D& f, Reduce op);

Volume3D stack_to_volume(const FrameSequence& seq);

/// Inverse of stack_to_volume.
FrameSequence volume_to_sequence(const Volume3D& v);

}  // namespace nowcast
