#include "nowcast/events.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <utility>

#include "binary.hpp"
#include "nowcast/errors.hpp"

namespace nowcast {

std::size_t MaskVolume::count() const {
  return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), std::uint8_t{1}));
}

MaskVolume threshold_volume(const Volume3D& v, double thr) {
  require(std::isfinite(thr), ErrorKind::Data, "event threshold must be finite");
  MaskVolume m{v.t(), v.rows(), v.cols(), std::vector<std::uint8_t>(v.size())};
  auto values = v.values();
  for (std::size_t i = 0; i < values.size(); ++i) m.cells[i] = values[i] > thr ? 1 : 0;
  return m;
}

namespace {

// Already-visited half of the 18-neighbourhood in (t, row, col) scan order.
constexpr std::array<std::array<int, 3>, 9> kBackNeighbours = {{
    {-1, 0, 0}, {-1, -1, 0}, {-1, 1, 0}, {-1, 0, -1}, {-1, 0, 1},
    {0, -1, -1}, {0, -1, 0}, {0, -1, 1}, {0, 0, -1},
}};

struct DisjointSet {
  std::vector<std::uint32_t> parent{0};

  std::uint32_t make() {
    parent.push_back(static_cast<std::uint32_t>(parent.size()));
    return parent.back();
  }
  std::uint32_t find(std::uint32_t x) {
    std::uint32_t root = x;
    while (parent[root] != root) root = parent[root];
    while (parent[x] != root) x = std::exchange(parent[x], root);
    return root;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent[b] = a; else parent[a] = b;
  }
};

}  // namespace

LabelVolume label_components_18(const MaskVolume& mask) {
  require(mask.cells.size() == mask.t * mask.rows * mask.cols, ErrorKind::Shape,
          "mask volume size mismatch");
  LabelVolume out{mask.t, mask.rows, mask.cols, std::vector<std::uint32_t>(mask.cells.size(), 0), 0};
  const auto T = static_cast<long>(mask.t);
  const auto R = static_cast<long>(mask.rows);
  const auto C = static_cast<long>(mask.cols);
  auto index = [R, C](long t, long r, long c) { return static_cast<std::size_t>((t * R + r) * C + c); };

  DisjointSet ds;
  for (long t = 0; t < T; ++t) {
    for (long r = 0; r < R; ++r) {
      for (long c = 0; c < C; ++c) {
        const std::size_t here = index(t, r, c);
        if (!mask.cells[here]) continue;
        std::uint32_t label = 0;
        for (const auto& [dt, dr, dc] : kBackNeighbours) {
          const long nt = t + dt, nr = r + dr, nc = c + dc;
          if (nt < 0 || nr < 0 || nr >= R || nc < 0 || nc >= C) continue;
          const std::uint32_t n = out.labels[index(nt, nr, nc)];
          if (n == 0) continue;
          if (label == 0) label = n; else ds.unite(label, n);
        }
        out.labels[here] = label == 0 ? ds.make() : label;
      }
    }
  }

  // Renumber roots to 1..K by first appearance in scan order.
  std::vector<std::uint32_t> final_id(ds.parent.size(), 0);
  for (auto& l : out.labels) {
    if (l == 0) continue;
    const std::uint32_t root = ds.find(l);
    if (final_id[root] == 0) final_id[root] = ++out.count;
    l = final_id[root];
  }
  return out;
}

std::vector<EventRecord> extract_events(const LabelVolume& labels, const Volume3D& v,
                                        int frame_minutes) {
  require(labels.t == v.t() && labels.rows == v.rows() && labels.cols == v.cols() &&
              labels.labels.size() == v.size(),
          ErrorKind::Shape, "label volume does not match the rainfall volume");
  const std::size_t K = labels.count;
  std::vector<EventRecord> ev(K);
  std::vector<bool> seen(K, false);
  for (std::size_t k = 0; k < K; ++k) ev[k].event_id = static_cast<std::uint32_t>(k + 1);

  const std::size_t plane = v.rows() * v.cols();
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    const std::uint32_t l = labels.labels[i];
    if (l == 0) continue;
    require(l <= K, ErrorKind::Shape, "label exceeds component count");
    EventRecord& e = ev[l - 1];
    const std::size_t t = i / plane;
    const double value = v.values()[i];
    if (!seen[l - 1]) {
      seen[l - 1] = true;
      e.t_start = e.t_end = t;
      e.max_intensity = value;
    }
    e.t_start = std::min(e.t_start, t);
    e.t_end = std::max(e.t_end, t);
    e.max_intensity = std::max(e.max_intensity, value);
    e.voxel_count += 1;
  }

  std::vector<std::size_t> central(K);
  std::vector<double> sum_r(K, 0.0), sum_c(K, 0.0);
  std::vector<std::size_t> n_central(K, 0);
  for (std::size_t k = 0; k < K; ++k) {
    central[k] = (ev[k].t_start + ev[k].t_end) / 2;
    ev[k].duration_frames = ev[k].t_end - ev[k].t_start + 1;
    ev[k].duration_min = static_cast<int>(ev[k].duration_frames) * frame_minutes;
  }
  for (std::size_t i = 0; i < labels.labels.size(); ++i) {
    const std::uint32_t l = labels.labels[i];
    if (l == 0 || i / plane != central[l - 1]) continue;
    const std::size_t r = (i % plane) / v.cols();
    const std::size_t c = i % v.cols();
    EventRecord& e = ev[l - 1];
    if (n_central[l - 1] == 0) {
      e.bbox_row0 = e.bbox_row1 = r;
      e.bbox_col0 = e.bbox_col1 = c;
    }
    e.bbox_row0 = std::min(e.bbox_row0, r);
    e.bbox_row1 = std::max(e.bbox_row1, r);
    e.bbox_col0 = std::min(e.bbox_col0, c);
    e.bbox_col1 = std::max(e.bbox_col1, c);
    sum_r[l - 1] += static_cast<double>(r);
    sum_c[l - 1] += static_cast<double>(c);
    n_central[l - 1] += 1;
  }
  for (std::size_t k = 0; k < K; ++k) {
    ev[k].centroid_row = sum_r[k] / static_cast<double>(n_central[k]);
    ev[k].centroid_col = sum_c[k] / static_cast<double>(n_central[k]);
  }

  // Footprint: distinct labels per (row, col) column across time.
  std::vector<std::uint32_t> column;
  for (std::size_t p = 0; p < plane; ++p) {
    column.clear();
    for (std::size_t t = 0; t < v.t(); ++t) {
      const std::uint32_t l = labels.labels[t * plane + p];
      if (l != 0 && std::find(column.begin(), column.end(), l) == column.end()) column.push_back(l);
    }
    for (std::uint32_t l : column) ev[l - 1].footprint_px += 1;
  }
  return ev;
}

std::vector<EventRecord> select_top_events(std::vector<EventRecord> events, std::size_t k) {
  std::sort(events.begin(), events.end(), [](const EventRecord& a, const EventRecord& b) {
    if (a.max_intensity != b.max_intensity) return a.max_intensity > b.max_intensity;
    if (a.voxel_count != b.voxel_count) return a.voxel_count > b.voxel_count;
    return a.event_id < b.event_id;
  });
  if (events.size() > k) events.resize(k);
  return events;
}

std::vector<EventRecord> detect_events(const Volume3D& rain, double thr, std::size_t k,
                                       int frame_minutes) {
  const auto labels = label_components_18(threshold_volume(rain, thr));
  return select_top_events(extract_events(labels, rain, frame_minutes), k);
}

namespace {

std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

EventCsvRow to_csv_row(const EventRecord& e, const std::string& sequence_id, int rank) {
  return EventCsvRow{
      .sequence_id = sequence_id,
      .event_rank = rank,
      .t_start = e.t_start,
      .t_end = e.t_end,
      .centroid_row = std::strtod(fixed3(e.centroid_row).c_str(), nullptr),
      .centroid_col = std::strtod(fixed3(e.centroid_col).c_str(), nullptr),
      .bbox_row0 = e.bbox_row0,
      .bbox_col0 = e.bbox_col0,
      .bbox_row1 = e.bbox_row1,
      .bbox_col1 = e.bbox_col1,
      .footprint_px = e.footprint_px,
      .max_intensity = std::strtod(fixed3(e.max_intensity).c_str(), nullptr),
      .duration_min = e.duration_min,
  };
}

std::string format_events_csv(std::span<const EventRecord> events, const std::string& sequence_id) {
  require(sequence_id.find_first_of(",\n\r") == std::string::npos, ErrorKind::Data,
          "sequence id must not contain commas or line breaks");
  std::ostringstream out;
  out << kEventCsvHeader << '\n';
  int rank = 0;
  for (const auto& e : events) {
    out << sequence_id << ',' << ++rank << ',' << e.t_start << ',' << e.t_end << ','
        << fixed3(e.centroid_row) << ',' << fixed3(e.centroid_col) << ',' << e.bbox_row0 << ','
        << e.bbox_col0 << ',' << e.bbox_row1 << ',' << e.bbox_col1 << ',' << e.footprint_px << ','
        << fixed3(e.max_intensity) << ',' << e.duration_min << '\n';
  }
  return out.str();
}

void export_events_csv(std::span<const EventRecord> events, const std::string& sequence_id,
                       const std::filesystem::path& path) {
  detail::write_text_file(path, format_events_csv(events, sequence_id));
}

std::vector<EventCsvRow> parse_events_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && line == kEventCsvHeader, ErrorKind::Format,
          "event CSV header mismatch");
  std::vector<EventCsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    require(f.size() == 13, ErrorKind::Format, "event CSV row must have 13 fields");
    auto u = [](const std::string& s) { return static_cast<std::size_t>(std::stoull(s)); };
    rows.push_back(EventCsvRow{
        .sequence_id = f[0],
        .event_rank = std::stoi(f[1]),
        .t_start = u(f[2]),
        .t_end = u(f[3]),
        .centroid_row = std::strtod(f[4].c_str(), nullptr),
        .centroid_col = std::strtod(f[5].c_str(), nullptr),
        .bbox_row0 = u(f[6]),
        .bbox_col0 = u(f[7]),
        .bbox_row1 = u(f[8]),
        .bbox_col1 = u(f[9]),
        .footprint_px = u(f[10]),
        .max_intensity = std::strtod(f[11].c_str(), nullptr),
        .duration_min = std::stoi(f[12]),
    });
  }
  return rows;
}

}  // namespace nowcast
