#pragma once

#include <cstddef>
#include <vector>

#include "nowcast/grid.hpp"

namespace nowcast {

inline constexpr std::size_t kInputFrames = 4;
inline constexpr std::size_t kFramesPerHour = 4;

/// One supervised example for the model specialised at `offset_hours`.
/// With t0 the index of the last input frame, the targets are frames
/// t0 + 4(offset_hours - 1) + 1 ... t0 + 4 offset_hours.
struct TrainingWindow {
  FrameSequence input;
  FrameSequence target;
  int offset_hours = 1;
  std::size_t start = 0;  // index of the first input frame in the source sequence
};

/// Index of the first target frame for a window starting at `start`.
constexpr std::size_t first_target_index(std::size_t start, int offset_hours) {
  return start + kInputFrames - 1 + kFramesPerHour * static_cast<std::size_t>(offset_hours - 1) + 1;
}

/// Number of stride-1 windows a sequence of `length` frames yields.
constexpr std::size_t window_count(std::size_t length, int offset_hours) {
  const std::size_t need = kInputFrames + kFramesPerHour * static_cast<std::size_t>(offset_hours);
  return length < need ? 0 : length - need + 1;
}

/// All stride-1 windows; too-short sequences give an empty list.
/// offset_hours must be in 1..4.
std::vector<TrainingWindow> make_windows(const FrameSequence& seq, int offset_hours);

}  // namespace nowcast
