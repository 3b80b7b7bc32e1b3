#include "nowcast/windows.hpp"

#include <string>

#include "nowcast/errors.hpp"

namespace nowcast {

std::vector<TrainingWindow> make_windows(const FrameSequence& seq, int offset_hours) {
  require(offset_hours >= 1 && offset_hours <= 4, ErrorKind::Config,
          "offset_hours must be in 1..4, got " + std::to_string(offset_hours));
  std::vector<TrainingWindow> out;
  const std::size_t n = window_count(seq.size(), offset_hours);
  out.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    out.push_back(TrainingWindow{
        .input = seq.slice(s, kInputFrames),
        .target = seq.slice(first_target_index(s, offset_hours), kFramesPerHour),
        .offset_hours = offset_hours,
        .start = s,
    });
  }
  return out;
}

}  // namespace nowcast
