#include "nowcast/cascade.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "binary.hpp"
#include "nowcast/errors.hpp"
#include "nowcast/param_io.hpp"

namespace nowcast {

namespace {

// Runs fn(0..3) on at most `jobs` threads; each model writes only its own slot.
void for_each_model(int jobs, const std::function<void(int)>& fn) {
  const int workers = std::clamp(jobs, 1, kCascadeModels);
  if (workers == 1) {
    for (int k = 0; k < kCascadeModels; ++k) fn(k);
    return;
  }
  std::vector<std::jthread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&fn, w, workers] {
      for (int k = w; k < kCascadeModels; k += workers) fn(k);
    });
  }
}

}  // namespace

std::uint64_t model_seed(std::uint64_t seed, int offset_hours) {
  return seed * 0x100000001B3ULL + static_cast<std::uint64_t>(offset_hours);
}

CascadeTrainResult train_cascade(const std::vector<FrameSequence>& preprocessed,
                                 const TrainConfig& cfg, const nn::Arch& arch,
                                 std::size_t max_windows, int model_jobs,
                                 const std::function<void(int, int, double)>& log) {
  require(!preprocessed.empty(), ErrorKind::Data, "train_cascade needs at least one sequence");
  CascadeTrainResult res;
  res.cascade.arch = arch;
  std::mutex log_mutex;
  auto train_one = [&](int k) {
    const int offset = k + 1;
    std::vector<TrainingWindow> windows;
    for (const auto& seq : preprocessed) {
      for (auto& w : make_windows(seq, offset)) {
        if (max_windows != 0 && windows.size() >= max_windows) break;
        windows.push_back(std::move(w));
      }
    }
    TrainConfig c = cfg;
    c.seed = model_seed(cfg.seed, offset);
    auto tr = train_model(windows, c, arch, [&](int epoch, double loss) {
      if (!log) return;
      const std::lock_guard lock(log_mutex);
      log(offset, epoch, loss);
    });
    res.cascade.models[k] = std::move(tr.params);
    res.epoch_loss[k] = std::move(tr.epoch_loss);
  };
  for_each_model(model_jobs, train_one);
  return res;
}

FrameSequence cascade_predict(const CascadeModel& c, const FrameSequence& input,
                              std::size_t out_rows, std::size_t out_cols, int model_jobs) {
  require(input.size() == kInputFrames, ErrorKind::Shape,
          "cascade_predict expects exactly 4 input frames, got " + std::to_string(input.size()));
  require(input.unit() == Unit::Normalized, ErrorKind::Data,
          "cascade_predict expects preprocessed (normalized) frames");
  std::vector<nn::Tensor<float>> x;
  for (const Field2D& f : input) x.push_back(to_tensor(f));

  std::array<std::vector<nn::Tensor<float>>, kCascadeModels> outs;
  auto run = [&](int k) { outs[k] = nn::model_forward<float>(x, c.models[k]); };
  for_each_model(model_jobs, run);

  std::vector<Field2D> frames;
  frames.reserve(kForecastFrames);
  for (const auto& o : outs) {
    for (const auto& t : o) {
      frames.push_back(crop_center(from_tensor(t, Unit::Normalized), out_rows, out_cols));
    }
  }
  return FrameSequence(std::move(frames));
}

std::vector<Field2D> persistence_predict(const FrameSequence& input, std::size_t n) {
  require(!input.empty(), ErrorKind::Shape, "persistence needs at least one input frame");
  return std::vector<Field2D>(n, input.back());
}

std::string preprocess_hash(const PreprocessConfig& cfg) {
  std::ostringstream canon;
  canon.precision(17);
  canon << "norm_divisor=" << cfg.norm_divisor << ";pad_to=" << cfg.pad_to
        << ";mask_fill=" << cfg.mask_fill;
  // FNV-1a, 64 bit.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canon.str()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string model_file(int offset) { return "model_h" + std::to_string(offset) + ".w4cp"; }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<int> parse_ints(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(trim(item)));
    } catch (const std::exception&) {
      fail(ErrorKind::Format, "manifest: bad integer list '" + s + "'");
    }
  }
  return out;
}

}  // namespace

void save_checkpoint(const CascadeModel& c, const PreprocessConfig& pre,
                     const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ostringstream m;
  m << "format = w4c-cascade 1\n";
  m << "cell = " << nn::to_string(c.arch.cell) << "\n";
  m << "offsets = 1,2,3,4\n";
  const auto w = c.arch.widths();
  m << "arch = " << w[0] << "," << w[1] << "," << w[2] << "," << w[3] << "," << w[4] << ","
    << w[5] << "\n";
  m << "skip = " << (c.arch.skip ? 1 : 0) << "\n";
  m << "preprocess_hash = " << preprocess_hash(pre) << "\n";
  for (int k = 0; k < kCascadeModels; ++k) {
    require(c.models[k].arch == c.arch, ErrorKind::Shape, "cascade models disagree on architecture");
    nn::save_params(c.models[k], dir / model_file(k + 1));
    m << "model_h" << (k + 1) << " = " << model_file(k + 1) << "\n";
  }
  detail::write_text_file(dir / "manifest.txt", m.str());
}

CheckpointManifest read_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.txt");
  if (!in) fail(ErrorKind::Io, "cannot open " + (dir / "manifest.txt").string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  require(kv["format"] == "w4c-cascade 1", ErrorKind::Format, "unrecognised checkpoint manifest");
  CheckpointManifest m;
  m.cell = nn::parse_cell_kind(kv["cell"]);
  const auto offsets = parse_ints(kv["offsets"]);
  require(offsets == std::vector<int>{1, 2, 3, 4}, ErrorKind::Format,
          "manifest offsets must be 1,2,3,4");
  const auto w = parse_ints(kv["arch"]);
  require(w.size() == 6, ErrorKind::Format, "manifest arch needs six widths");
  m.arch = nn::Arch{m.cell, w[0], w[1], w[2], w[3], w[4], w[5]};
  require(kv["skip"] == "0" || kv["skip"] == "1", ErrorKind::Format, "manifest skip must be 0 or 1");
  m.arch.skip = kv["skip"] == "1";
  m.preprocess_hash = kv["preprocess_hash"];
  return m;
}

CascadeModel load_checkpoint(const std::filesystem::path& dir, const PreprocessConfig& pre) {
  const auto m = read_manifest(dir);
  require(m.preprocess_hash == preprocess_hash(pre), ErrorKind::Config,
          "checkpoint was trained with different preprocessing settings");
  CascadeModel c;
  c.arch = m.arch;
  for (int k = 0; k < kCascadeModels; ++k) {
    c.models[k] = nn::load_params(dir / model_file(k + 1));
    require(c.models[k].arch == m.arch, ErrorKind::Format,
            model_file(k + 1) + " does not match the manifest architecture");
  }
  return c;
}

}  // namespace nowcast
