#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "nowcast/grid.hpp"

namespace nowcast {

inline constexpr double kEventThresholdMmH = 2.0;
inline constexpr std::size_t kTopEvents = 5;

struct MaskVolume {
  std::size_t t = 0, rows = 0, cols = 0;
  std::vector<std::uint8_t> cells;  // 0/1, same layout as Volume3D

  bool at(std::size_t ti, std::size_t r, std::size_t c) const {
    return cells[(ti * rows + r) * cols + c] != 0;
  }
  std::size_t count() const;
};

struct LabelVolume {
  std::size_t t = 0, rows = 0, cols = 0;
  std::vector<std::uint32_t> labels;  // 0 = background, components 1..count
  std::uint32_t count = 0;

  std::uint32_t at(std::size_t ti, std::size_t r, std::size_t c) const {
    return labels[(ti * rows + r) * cols + c];
  }
};

/// true where value > thr.
MaskVolume threshold_volume(const Volume3D& v, double thr = kEventThresholdMmH);

/// Offsets (dt, dr, dc) connecting two voxels: every component in [-1, 1],
/// |dt| + |dr| + |dc| <= 2, i.e. shared faces and edges but not corners.
/// Union-find over a single scan; labels are numbered 1..K in order of each
/// component's first voxel in (t, row, col) scan order.
LabelVolume label_components_18(const MaskVolume& mask);

struct EventRecord {
  std::uint32_t event_id = 0;
  std::size_t t_start = 0;
  std::size_t t_end = 0;  // inclusive
  std::size_t duration_frames = 0;
  // Bounding box (inclusive) and centroid from the central frame
  // floor((t_start + t_end) / 2).
  std::size_t bbox_row0 = 0, bbox_col0 = 0, bbox_row1 = 0, bbox_col1 = 0;
  double centroid_row = 0.0;
  double centroid_col = 0.0;
  std::size_t footprint_px = 0;  // distinct (row, col) touched over the lifetime
  double max_intensity = 0.0;    // mm/h
  std::size_t voxel_count = 0;
  int duration_min = 0;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

std::vector<EventRecord> extract_events(const LabelVolume& labels, const Volume3D& v,
                                        int frame_minutes = 15);

/// Sorted by max_intensity desc, voxel_count desc, event_id asc; at most k.
std::vector<EventRecord> select_top_events(std::vector<EventRecord> events, std::size_t k = kTopEvents);

/// threshold -> label -> extract -> top k.
std::vector<EventRecord> detect_events(const Volume3D& rain, double thr = kEventThresholdMmH,
                                       std::size_t k = kTopEvents, int frame_minutes = 15);

inline constexpr const char* kEventCsvHeader =
    "sequence_id,event_rank,t_start,t_end,centroid_row,centroid_col,bbox_row0,bbox_col0,"
    "bbox_row1,bbox_col1,footprint_px,max_intensity_mm_h,duration_min";

/// One CSV data row as written to disk (reals carry 3 decimals).
struct EventCsvRow {
  std::string sequence_id;
  int event_rank = 0;
  std::size_t t_start = 0, t_end = 0;
  double centroid_row = 0.0, centroid_col = 0.0;
  std::size_t bbox_row0 = 0, bbox_col0 = 0, bbox_row1 = 0, bbox_col1 = 0;
  std::size_t footprint_px = 0;
  double max_intensity = 0.0;
  int duration_min = 0;

  friend bool operator==(const EventCsvRow&, const EventCsvRow&) = default;
};

/// Row view of a record, reals rounded the way the CSV writes them.
EventCsvRow to_csv_row(const EventRecord& e, const std::string& sequence_id, int rank);

std::string format_events_csv(std::span<const EventRecord> events, const std::string& sequence_id);
void export_events_csv(std::span<const EventRecord> events, const std::string& sequence_id,
                       const std::filesystem::path& path);
std::vector<EventCsvRow> parse_events_csv(const std::string& text);

}  // namespace nowcast
