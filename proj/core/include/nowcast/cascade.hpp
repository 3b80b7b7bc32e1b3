#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nowcast/model.hpp"
#include "nowcast/preprocess.hpp"
#include "nowcast/train.hpp"

namespace nowcast {

inline constexpr int kCascadeModels = 4;
inline constexpr std::size_t kForecastFrames = 16;

/// Four independent models; models[k] forecasts hour k+1 (frames 4k+1..4k+4).
struct CascadeModel {
  nn::Arch arch;
  std::array<nn::NetParams<float>, kCascadeModels> models;

  nn::CellKind cell_kind() const { return arch.cell; }
  friend bool operator==(const CascadeModel&, const CascadeModel&) = default;
};

struct CascadeTrainResult {
  CascadeModel cascade;
  std::array<std::vector<double>, kCascadeModels> epoch_loss;
};

/// Seed of the model for `offset_hours`, derived from the run seed.
std::uint64_t model_seed(std::uint64_t seed, int offset_hours);

/// Trains the four offsets on stride-1 windows of the preprocessed sequences,
/// keeping at most `max_windows` per offset (0 = all). `model_jobs` > 1 trains
/// the offsets concurrently; results are identical either way.
CascadeTrainResult train_cascade(const std::vector<FrameSequence>& preprocessed,
                                 const TrainConfig& cfg, const nn::Arch& arch,
                                 std::size_t max_windows = 0, int model_jobs = 1,
                                 const std::function<void(int offset, int epoch, double loss)>& log = {});

/// 16 normalized frames: model k fills frames 4k..4k+3. Each frame is cropped
/// to out_rows x out_cols (the pre-padding size).
FrameSequence cascade_predict(const CascadeModel& c, const FrameSequence& input,
                              std::size_t out_rows, std::size_t out_cols, int model_jobs = 1);

/// n copies of the last input frame.
std::vector<Field2D> persistence_predict(const FrameSequence& input, std::size_t n);

/// Stable hash of the preprocessing settings recorded in checkpoints.
std::string preprocess_hash(const PreprocessConfig& cfg);

struct CheckpointManifest {
  nn::CellKind cell = nn::CellKind::ConvGru;
  std::array<int, kCascadeModels> offsets{1, 2, 3, 4};
  nn::Arch arch;
  std::string preprocess_hash;
};

/// Writes model_h{1..4}.w4cp and manifest.txt into dir (created if missing).
void save_checkpoint(const CascadeModel& c, const PreprocessConfig& pre,
                     const std::filesystem::path& dir);
CheckpointManifest read_manifest(const std::filesystem::path& dir);
/// Loads and validates a checkpoint against the expected preprocessing.
CascadeModel load_checkpoint(const std::filesystem::path& dir, const PreprocessConfig& pre);

}  // namespace nowcast
