#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nowcast/model.hpp"
#include "nowcast/preprocess.hpp"
#include "nowcast/rainfall.hpp"
#include "nowcast/train.hpp"

namespace nowcast {

/// Everything a pipeline run needs. Parsed from `key = value` lines with `#`
/// comments; unknown keys are rejected.
///
///   norm_divisor, pad_to, mask_fill         preprocessing
///   epochs, batch_size, lr, seed            training
///   jobs                                    worker cap for the 4 cascade models (0 = auto)
///   max_windows                             per-offset window cap (0 = all)
///   alpha, beta                             BT -> rain transform
///   cell                                    convgru | convlstm
///   arch                                    full | desk | mini | six comma-separated widths
///   skip                                    0 | 1, persistence skip connection (after arch)
///   data_dir, checkpoint_dir, output_dir
///   roi                                     "<id> <row0> <col0> <row1> <col1>", repeatable
struct PipelineConfig {
  PreprocessConfig preprocess;
  TrainConfig train;
  TransformCoeffs transform;
  nn::Arch arch = nn::Arch::full();
  std::size_t max_windows = 0;
  int jobs = 0;
  std::filesystem::path data_dir = "data";
  std::filesystem::path checkpoint_dir = "checkpoint";
  std::filesystem::path output_dir = "out";
  std::vector<RegionOfInterest> rois;

  void validate() const;
};

/// Applies one key/value to cfg; throws Config on unknown keys or bad values.
void apply_setting(PipelineConfig& cfg, const std::string& key, const std::string& value);

PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);

/// NOWCAST_SEED, when set, replaces the configured seed.
void apply_environment(PipelineConfig& cfg);

nn::Arch parse_arch(const std::string& spec, nn::CellKind cell);
RegionOfInterest parse_roi(const std::string& spec);

}  // namespace nowcast
