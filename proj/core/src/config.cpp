#include "nowcast/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <type_traits>

#include "nowcast/errors.hpp"

namespace nowcast {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  if constexpr (std::is_unsigned_v<T>) {
    if (value.find('-') != std::string::npos) {
      fail(ErrorKind::Config, "bad value for '" + key + "': '" + value + "' must be non-negative");
    }
  }
  std::istringstream in(value);
  T out{};
  in >> out;
  if (!in || !(in >> std::ws).eof()) {
    fail(ErrorKind::Config, "bad value for '" + key + "': '" + value + "'");
  }
  return out;
}

bool parse_flag(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true") return true;
  if (value == "0" || value == "false") return false;
  fail(ErrorKind::Config, "bad value for '" + key + "': expected 0 or 1");
}

}  // namespace

void PipelineConfig::validate() const {
  preprocess.validate();
  train.validate();
  transform.validate();
  arch.validate();
  require(jobs >= 0, ErrorKind::Config, "jobs must be >= 0");
}

nn::Arch parse_arch(const std::string& spec, nn::CellKind cell) {
  if (spec == "full") return nn::Arch::full(cell);
  if (spec == "desk") return nn::Arch::desk(cell);
  if (spec == "mini") return nn::Arch::mini(cell);
  std::vector<int> w;
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) w.push_back(parse_number<int>("arch", trim(item)));
  require(w.size() == 6, ErrorKind::Config, "arch needs full|desk|mini or six widths");
  nn::Arch a{cell, w[0], w[1], w[2], w[3], w[4], w[5]};
  a.validate();
  return a;
}

RegionOfInterest parse_roi(const std::string& spec) {
  std::istringstream in(spec);
  RegionOfInterest roi;
  long r0 = -1, c0 = -1, r1 = -1, c1 = -1;
  in >> roi.id >> r0 >> c0 >> r1 >> c1;
  require(static_cast<bool>(in) && r0 >= 0 && c0 >= 0 && r0 < r1 && c0 < c1, ErrorKind::Config,
          "roi must be '<id> <row0> <col0> <row1> <col1>' with row0 < row1, col0 < col1");
  roi.row0 = static_cast<std::size_t>(r0);
  roi.col0 = static_cast<std::size_t>(c0);
  roi.row1 = static_cast<std::size_t>(r1);
  roi.col1 = static_cast<std::size_t>(c1);
  return roi;
}

void apply_setting(PipelineConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "norm_divisor") cfg.preprocess.norm_divisor = parse_number<double>(key, value);
  else if (key == "pad_to") cfg.preprocess.pad_to = parse_number<std::size_t>(key, value);
  else if (key == "mask_fill") cfg.preprocess.mask_fill = parse_number<float>(key, value);
  else if (key == "epochs") cfg.train.epochs = parse_number<int>(key, value);
  else if (key == "batch_size") cfg.train.batch_size = parse_number<int>(key, value);
  else if (key == "lr") cfg.train.lr = parse_number<double>(key, value);
  else if (key == "seed") cfg.train.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "jobs") cfg.jobs = parse_number<int>(key, value);
  else if (key == "max_windows") cfg.max_windows = parse_number<std::size_t>(key, value);
  else if (key == "alpha") cfg.transform.alpha = parse_number<double>(key, value);
  else if (key == "beta") cfg.transform.beta = parse_number<double>(key, value);
  else if (key == "cell") cfg.arch.cell = nn::parse_cell_kind(value);
  else if (key == "arch") cfg.arch = parse_arch(value, cfg.arch.cell);
  else if (key == "skip") cfg.arch.skip = parse_flag(key, value);
  else if (key == "data_dir") cfg.data_dir = value;
  else if (key == "checkpoint_dir") cfg.checkpoint_dir = value;
  else if (key == "output_dir") cfg.output_dir = value;
  else if (key == "roi") cfg.rois.push_back(parse_roi(value));
  else fail(ErrorKind::Config, "unknown config key '" + key + "'");
}

PipelineConfig parse_config(const std::string& text) {
  PipelineConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, ErrorKind::Config,
            "line " + std::to_string(lineno) + ": expected 'key = value'");
    apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  cfg.validate();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_environment(PipelineConfig& cfg) {
  if (const char* s = std::getenv("NOWCAST_SEED"); s != nullptr && *s != '\0') {
    cfg.train.seed = parse_number<std::uint64_t>("NOWCAST_SEED", s);
  }
}

}  // namespace nowcast
