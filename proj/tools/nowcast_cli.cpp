// nowcast: command-line driver for the satellite nowcasting pipeline.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "nowcast/cascade.hpp"
#include "nowcast/config.hpp"
#include "nowcast/errors.hpp"
#include "nowcast/events.hpp"
#include "nowcast/experiments.hpp"
#include "nowcast/frame_io.hpp"
#include "nowcast/rainfall.hpp"
#include "nowcast/report.hpp"
#include "nowcast/synthetic.hpp"
#include "nowcast/verify.hpp"

namespace fs = std::filesystem;
using namespace nowcast;

namespace {

constexpr int kUsageExit = 2;

// Options shared by commands that read the pipeline config. Unset flags leave
// the config file (and NOWCAST_SEED) in charge.
struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<int> epochs;
  std::optional<int> batch_size;
  std::optional<double> lr;
  std::optional<std::size_t> max_windows;
  std::optional<std::size_t> pad_to;
  std::optional<std::string> cell;
  std::optional<std::string> arch;
  std::optional<double> alpha;
  std::optional<double> beta;
  std::vector<std::string> rois;

  void add_to(CLI::App* cmd, bool training) {
    cmd->add_option("--config", config, "key = value pipeline config file")->check(CLI::ExistingFile);
    cmd->add_option("--seed", seed, "run seed (overrides config and NOWCAST_SEED)");
    cmd->add_option("--jobs", jobs, "worker cap for the four cascade models (0 = auto)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--pad-to", pad_to, "padded model grid size")->check(CLI::PositiveNumber);
    if (training) {
      cmd->add_option("--epochs", epochs, "training epochs")->check(CLI::NonNegativeNumber);
      cmd->add_option("--batch-size", batch_size, "minibatch size")->check(CLI::PositiveNumber);
      cmd->add_option("--lr", lr, "Adam learning rate")->check(CLI::PositiveNumber);
      cmd->add_option("--max-windows", max_windows, "per-offset window cap (0 = all)");
      cmd->add_option("--cell", cell, "recurrent cell")->check(CLI::IsMember({"convgru", "convlstm"}));
      cmd->add_option("--arch", arch, "full | desk | mini | six comma-separated widths");
    } else {
      cmd->add_option("--alpha", alpha, "transform coefficient alpha")->check(CLI::PositiveNumber);
      cmd->add_option("--beta", beta, "transform exponent beta")->check(CLI::PositiveNumber);
      cmd->add_option("--roi", rois, "region of interest '<id> <row0> <col0> <row1> <col1>'");
    }
  }

  PipelineConfig resolve() const {
    PipelineConfig cfg = config.empty() ? PipelineConfig{} : load_config(config);
    apply_environment(cfg);
    if (seed) cfg.train.seed = *seed;
    if (jobs) cfg.jobs = *jobs;
    if (epochs) cfg.train.epochs = *epochs;
    if (batch_size) cfg.train.batch_size = *batch_size;
    if (lr) cfg.train.lr = *lr;
    if (max_windows) cfg.max_windows = *max_windows;
    if (pad_to) cfg.preprocess.pad_to = *pad_to;
    if (cell) cfg.arch.cell = nn::parse_cell_kind(*cell);
    if (arch) cfg.arch = parse_arch(*arch, cfg.arch.cell);
    if (alpha) cfg.transform.alpha = *alpha;
    if (beta) cfg.transform.beta = *beta;
    for (const auto& r : rois) cfg.rois.push_back(parse_roi(r));
    cfg.validate();
    return cfg;
  }
};

int model_jobs(const PipelineConfig& cfg) {
  if (cfg.jobs > 0) return cfg.jobs;
  return static_cast<int>(std::clamp(std::thread::hardware_concurrency(), 1u, 4u));
}

// A frame file, or every *.w4cf file of a directory in name order.
std::vector<fs::path> frame_files(const fs::path& p) {
  require(fs::exists(p), ErrorKind::Io, "no such file or directory: " + p.string());
  if (!fs::is_directory(p)) return {p};
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(p)) {
    if (e.is_regular_file() && e.path().extension() == ".w4cf") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  require(!out.empty(), ErrorKind::Io, "no .w4cf files in " + p.string());
  return out;
}

std::vector<FrameSequence> load_training_data(const fs::path& data, const PreprocessConfig& pre) {
  std::vector<FrameSequence> seqs;
  for (const auto& f : frame_files(data)) {
    const FrameSequence raw = load_frames(f);
    require(raw.unit() == Unit::Kelvin, ErrorKind::Data, f.string() + " is not in kelvin");
    seqs.push_back(preprocess_sequence(raw, pre));
  }
  return seqs;
}

void write_loss_csv(const std::array<std::vector<double>, kCascadeModels>& losses,
                    const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path.string());
  out << "offset_hours,epoch,loss\n";
  char buf[64];
  for (int k = 0; k < kCascadeModels; ++k) {
    for (std::size_t e = 0; e < losses[k].size(); ++e) {
      std::snprintf(buf, sizeof buf, "%d,%zu,%.6f\n", k + 1, e + 1, losses[k][e]);
      out << buf;
    }
  }
}

auto epoch_logger() {
  return [](int offset, int epoch, double loss) {
    std::fprintf(stderr, "  h%d epoch %d loss %.6f\n", offset, epoch, loss);
  };
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::uint64_t seed = 0;
  std::size_t frames = 0;
  std::size_t rows = kSatelliteGrid;
  std::size_t cols = kSatelliteGrid;
  std::size_t blobs = 5;
  double speed_min = 0.5;
  double speed_max = 2.0;
  std::string out;
  std::string name = "synth.w4cf";
};

int cmd_synth(const SynthArgs& a) {
  SyntheticConfig s;
  s.seed = a.seed;
  s.n_frames = a.frames;
  s.rows = a.rows;
  s.cols = a.cols;
  s.n_blobs = a.blobs;
  s.speed_min = a.speed_min;
  s.speed_max = a.speed_max;
  const FrameSequence seq = gen_synthetic(s);
  fs::create_directories(a.out);
  const fs::path path = fs::path(a.out) / a.name;
  save_frames(seq, path);
  std::printf("wrote %s: %zu frames %zux%zu kelvin\n", path.string().c_str(), seq.size(),
              seq.rows(), seq.cols());
  return 0;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  CommonFlags common;
  std::string data;
  std::string checkpoint;
};

int cmd_train(const TrainArgs& a) {
  PipelineConfig cfg = a.common.resolve();
  const fs::path data = a.data.empty() ? cfg.data_dir : fs::path(a.data);
  const fs::path ckpt = a.checkpoint.empty() ? cfg.checkpoint_dir : fs::path(a.checkpoint);
  const auto seqs = load_training_data(data, cfg.preprocess);
  std::fprintf(stderr, "training %s cascade on %zu sequence(s)\n",
               std::string(nn::to_string(cfg.arch.cell)).c_str(), seqs.size());
  const auto res = train_cascade(seqs, cfg.train, cfg.arch, cfg.max_windows, model_jobs(cfg),
                                 epoch_logger());
  save_checkpoint(res.cascade, cfg.preprocess, ckpt);
  write_loss_csv(res.epoch_loss, ckpt / "loss.csv");
  std::printf("wrote checkpoint %s\n", ckpt.string().c_str());
  return 0;
}

// ---------------------------------------------------------------- finetune

struct FinetuneArgs {
  CommonFlags common;
  std::string data;
  std::string checkpoint;
  std::string out;
};

int cmd_finetune(const FinetuneArgs& a) {
  PipelineConfig cfg = a.common.resolve();
  const fs::path data = a.data.empty() ? cfg.data_dir : fs::path(a.data);
  const fs::path in = a.checkpoint.empty() ? cfg.checkpoint_dir : fs::path(a.checkpoint);
  const CascadeModel base = load_checkpoint(in, cfg.preprocess);
  const auto seqs = load_training_data(data, cfg.preprocess);

  CascadeModel tuned = base;
  std::array<std::vector<double>, kCascadeModels> losses;
  for (int k = 0; k < kCascadeModels; ++k) {
    const int offset = k + 1;
    std::vector<TrainingWindow> windows;
    for (const auto& seq : seqs) {
      for (auto& w : make_windows(seq, offset)) {
        if (cfg.max_windows != 0 && windows.size() >= cfg.max_windows) break;
        windows.push_back(std::move(w));
      }
    }
    TrainConfig tc = cfg.train;
    tc.seed = model_seed(cfg.train.seed, offset);
    auto log = epoch_logger();
    auto r = fine_tune(base.models[k], windows, tc,
                       [&](int epoch, double loss) { log(offset, epoch, loss); });
    tuned.models[k] = std::move(r.params);
    losses[k] = std::move(r.epoch_loss);
  }
  save_checkpoint(tuned, cfg.preprocess, a.out);
  write_loss_csv(losses, fs::path(a.out) / "loss.csv");
  std::printf("wrote checkpoint %s\n", a.out.c_str());
  return 0;
}

// ---------------------------------------------------------------- forecast

struct ForecastArgs {
  CommonFlags common;
  std::string checkpoint;
  std::string input;
  std::size_t start = 0;
  std::string out;
  std::string baseline = "none";
};

int cmd_forecast(const ForecastArgs& a) {
  PipelineConfig cfg = a.common.resolve();
  const FrameSequence raw = load_frames(a.input);
  require(raw.unit() == Unit::Kelvin, ErrorKind::Data, a.input + " is not in kelvin");
  require(a.start + kInputFrames <= raw.size(), ErrorKind::Data,
          "input needs 4 frames from --start " + std::to_string(a.start));
  const FrameSequence inputs = preprocess_sequence(raw.slice(a.start, kInputFrames), cfg.preprocess);

  FrameSequence bt = [&] {
    if (a.baseline == "persistence") {
      const Field2D last = crop_center(inputs.back(), raw.rows(), raw.cols());
      return FrameSequence(std::vector<Field2D>(kForecastFrames, last));
    }
    const fs::path ckpt = a.checkpoint.empty() ? cfg.checkpoint_dir : fs::path(a.checkpoint);
    const CascadeModel model = load_checkpoint(ckpt, cfg.preprocess);
    return cascade_predict(model, inputs, raw.rows(), raw.cols(), model_jobs(cfg));
  }();

  std::vector<Field2D> rain;
  for (const Field2D& f : bt) {
    rain.push_back(upsample_bilinear(bt_to_rain(denormalize_bt(f, cfg.preprocess), cfg.transform)));
  }
  const Field2D total = cumulative_rain(rain);

  std::vector<RegionOfInterest> rois = cfg.rois;
  if (rois.empty()) rois.push_back({"domain", 0, 0, total.rows(), total.cols()});
  std::vector<std::pair<std::string, ThresholdCDF>> cdfs;
  for (const auto& roi : rois) cdfs.emplace_back(roi.id, to_threshold_cdf(roi_average(total, roi)));

  const fs::path out(a.out);
  fs::create_directories(out);
  save_frames(bt, out / "forecast_bt.w4cf");
  save_frames(FrameSequence(rain), out / "rain.w4cf");
  save_frames(FrameSequence({total}), out / "cumulative.w4cf");
  write_cdf_csv(cdfs, out / "cdf.csv");
  std::printf("wrote %s: 16 BT frames %zux%zu, 16 rain frames %zux%zu, %zu ROI CDF(s)\n",
              out.string().c_str(), bt.rows(), bt.cols(), total.rows(), total.cols(), cdfs.size());
  return 0;
}

// ---------------------------------------------------------------- events

struct EventsArgs {
  std::string input;
  std::string out;
  std::size_t top = kTopEvents;
  double threshold = kEventThresholdMmH;
  std::string sequence_id;
};

int cmd_events(const EventsArgs& a) {
  const FrameSequence rain = load_frames(a.input);
  require(rain.unit() == Unit::MmPerH, ErrorKind::Data, a.input + " is not a mm/h rain volume");
  const auto events = detect_events(stack_to_volume(rain), a.threshold, a.top);
  const std::string id = a.sequence_id.empty() ? fs::path(a.input).stem().string() : a.sequence_id;
  const fs::path out(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  export_events_csv(events, id, out);
  std::printf("wrote %s: %zu event(s)\n", a.out.c_str(), events.size());
  return 0;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::vector<std::string> preds;
  std::vector<std::string> models;
  std::string truth;
  std::string out;
  std::string experiment;
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs;
  std::optional<std::size_t> windows;
  std::optional<int> finetune_epochs;
  bool no_convlstm = false;
};

bool is_rain(Unit u) { return u == Unit::MmPerH || u == Unit::Mm; }

SsimConfig ssim_for(const FrameSequence& truth) {
  SsimConfig sc;
  if (truth.unit() == Unit::Normalized) {
    sc.data_range = 1.0;
  } else if (is_rain(truth.unit())) {
    double hi = 1.0;
    for (const Field2D& f : truth) hi = std::max(hi, field_reduce(f, Reduce::Max));
    sc.data_range = hi;
  }
  return sc;
}

void write_plots(const std::map<std::string, std::vector<PlotSeries>>& by_metric, const fs::path& out) {
  for (const auto& [metric, series] : by_metric) write_line_plot(series, out / (metric + ".ppm"));
}

int eval_files(const EvalArgs& a) {
  require(!a.preds.empty() && !a.truth.empty(), ErrorKind::Config,
          "eval needs --pred and --truth (or --experiment)");
  require(a.models.empty() || a.models.size() == a.preds.size(), ErrorKind::Config,
          "give one --model name per --pred");
  const FrameSequence truth = load_frames(a.truth);
  const SsimConfig sc = ssim_for(truth);
  std::vector<MetricRow> rows;
  std::map<std::string, std::vector<PlotSeries>> plots;
  std::ostringstream curves;
  curves << "model,lead_time,rmse,ssim\n";
  for (std::size_t m = 0; m < a.preds.size(); ++m) {
    const std::string name = a.models.empty() ? fs::path(a.preds[m]).stem().string() : a.models[m];
    const FrameSequence pred = load_frames(a.preds[m]);
    require(pred.size() == truth.size(), ErrorKind::Shape,
            a.preds[m] + " has " + std::to_string(pred.size()) + " frames, truth has " +
                std::to_string(truth.size()));
    require(pred.unit() == truth.unit(), ErrorKind::Data, a.preds[m] + " and truth differ in unit");
    PlotSeries rmse_s{name, {}};
    PlotSeries ssim_s{name, {}};
    for (std::size_t j = 0; j < truth.size(); ++j) {
      const int lead = static_cast<int>(j + 1);
      const double r = rmse(pred[j], truth[j]);
      const double s = ssim(pred[j], truth[j], sc);
      rows.push_back({name, "rmse", lead, r});
      rows.push_back({name, "ssim", lead, s});
      rows.push_back({name, "bias", lead, bias(pred[j], truth[j])});
      if (is_rain(truth.unit())) {
        for (double thr : {0.5, 1.0}) {
          const auto sc2 = pod_far_f1(contingency(pred[j], truth[j], thr));
          const std::string tag = thr == 0.5 ? "0.5" : "1.0";
          if (sc2.pod) rows.push_back({name, "pod@" + tag, lead, *sc2.pod});
          if (sc2.far) rows.push_back({name, "far@" + tag, lead, *sc2.far});
          if (sc2.f1) rows.push_back({name, "f1@" + tag, lead, *sc2.f1});
        }
      }
      rmse_s.values.push_back(r);
      ssim_s.values.push_back(s);
      char buf[128];
      std::snprintf(buf, sizeof buf, "%s,%d,%.6f,%.6f\n", name.c_str(), lead, r, s);
      curves << buf;
    }
    plots["rmse"].push_back(std::move(rmse_s));
    plots["ssim"].push_back(std::move(ssim_s));
  }
  const fs::path out(a.out);
  fs::create_directories(out);
  write_metrics_csv(rows, out / "metrics.csv");
  std::ofstream(out / "curves.csv", std::ios::binary) << curves.str();
  write_plots(plots, out);
  std::printf("wrote %s: metrics.csv, curves.csv, rmse.ppm, ssim.ppm\n", out.string().c_str());
  return 0;
}

int eval_experiment(const EvalArgs& a) {
  ExperimentConfig cfg;
  if (a.seed) cfg.seed = *a.seed;
  if (const char* env = std::getenv("NOWCAST_SEED"); env && !a.seed) {
    PipelineConfig tmp;
    apply_environment(tmp);
    cfg.seed = tmp.train.seed;
  }
  if (a.epochs) cfg.train.epochs = *a.epochs;
  if (a.windows) cfg.train_windows = *a.windows;
  if (a.finetune_epochs) cfg.finetune_epochs = *a.finetune_epochs;
  cfg.include_convlstm = !a.no_convlstm;
  auto log = [](const std::string& line) { std::fprintf(stderr, "  %s\n", line.c_str()); };
  const fs::path out(a.out);
  fs::create_directories(out);
  if (a.experiment == "comparison") {
    const auto report = run_comparison(cfg, log);
    std::ofstream(out / "comparison.csv", std::ios::binary) << report.to_csv();
    std::vector<PlotSeries> rmse_s;
    std::vector<PlotSeries> ssim_s;
    for (const auto& m : report.models) {
      rmse_s.push_back({m.model, {m.rmse.begin(), m.rmse.end()}});
      ssim_s.push_back({m.model, {m.ssim.begin(), m.ssim.end()}});
    }
    write_line_plot(rmse_s, out / "rmse.ppm");
    write_line_plot(ssim_s, out / "ssim.ppm");
    for (const auto& m : report.models) {
      std::printf("%-12s hourly RMSE (K): %.3f %.3f %.3f %.3f\n", m.model.c_str(), m.hour_rmse[0],
                  m.hour_rmse[1], m.hour_rmse[2], m.hour_rmse[3]);
    }
  } else {
    const auto report = run_transfer(cfg, log);
    std::ofstream(out / "transfer.csv", std::ios::binary) << report.to_csv();
    std::printf("region A RMSE %.3f -> %.3f K, region B RMSE %.3f -> %.3f K\n", report.rmse_a_before,
                report.rmse_a_after, report.rmse_b_before, report.rmse_b_after);
  }
  return 0;
}

int cmd_eval(const EvalArgs& a) { return a.experiment.empty() ? eval_files(a) : eval_experiment(a); }

// ---------------------------------------------------------------- calibrate

struct CalibrateArgs {
  std::string bt;
  std::string rain;
  std::string out;
};

int cmd_calibrate(const CalibrateArgs& a) {
  const FrameSequence bt = load_frames(a.bt);
  const FrameSequence rain = load_frames(a.rain);
  require(bt.unit() == Unit::Kelvin && rain.unit() == Unit::MmPerH, ErrorKind::Data,
          "calibrate needs a kelvin BT file and a mm/h rain file");
  require(bt.size() == rain.size() && bt.rows() == rain.rows() && bt.cols() == rain.cols(),
          ErrorKind::Shape, "BT and rain files must share frame count and grid");
  std::vector<CalibrationSample> samples;
  for (std::size_t t = 0; t < bt.size(); ++t) {
    const auto& kv = bt[t].values();
    const auto& rv = rain[t].values();
    for (std::size_t i = 0; i < kv.size(); ++i) samples.push_back({kv[i], rv[i]});
  }
  const TransformCoeffs c = calibrate_transform(samples);
  char buf[128];
  std::snprintf(buf, sizeof buf, "alpha = %.9g\nbeta = %.9g\n", c.alpha, c.beta);
  if (!a.out.empty()) {
    std::ofstream out(a.out, std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + a.out);
    out << buf;
  }
  std::fputs(buf, stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Satellite brightness-temperature nowcasting pipeline"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "generate synthetic brightness-temperature frames");
  c_synth->add_option("--seed", synth.seed, "generator seed");
  c_synth->add_option("--frames", synth.frames, "number of frames")->required()->check(CLI::PositiveNumber);
  c_synth->add_option("--rows", synth.rows, "grid rows")->check(CLI::PositiveNumber);
  c_synth->add_option("--cols", synth.cols, "grid columns")->check(CLI::PositiveNumber);
  c_synth->add_option("--blobs", synth.blobs, "number of cloud blobs")->check(CLI::PositiveNumber);
  c_synth->add_option("--speed-min", synth.speed_min, "minimum blob speed (px/frame)")
      ->check(CLI::NonNegativeNumber);
  c_synth->add_option("--speed-max", synth.speed_max, "maximum blob speed (px/frame)")
      ->check(CLI::NonNegativeNumber);
  c_synth->add_option("--out", synth.out, "output directory")->required();
  c_synth->add_option("--name", synth.name, "output file name");

  TrainArgs train;
  auto* c_train = app.add_subcommand("train", "train the four-model cascade");
  train.common.add_to(c_train, true);
  c_train->add_option("--data", train.data, "frame file or directory of .w4cf files");
  c_train->add_option("--checkpoint", train.checkpoint, "checkpoint output directory");

  FinetuneArgs finetune;
  auto* c_ft = app.add_subcommand("finetune", "fine-tune a trained cascade on new data");
  finetune.common.add_to(c_ft, true);
  c_ft->add_option("--data", finetune.data, "frame file or directory of .w4cf files");
  c_ft->add_option("--checkpoint", finetune.checkpoint, "pretrained checkpoint directory");
  c_ft->add_option("--out", finetune.out, "fine-tuned checkpoint directory")->required();

  ForecastArgs forecast;
  auto* c_fc = app.add_subcommand("forecast", "forecast 16 frames, rainfall and ROI CDFs");
  forecast.common.add_to(c_fc, false);
  c_fc->add_option("--checkpoint", forecast.checkpoint, "checkpoint directory");
  c_fc->add_option("--input", forecast.input, "kelvin frame file")->required()->check(CLI::ExistingFile);
  c_fc->add_option("--start", forecast.start, "index of the first of the 4 input frames");
  c_fc->add_option("--out", forecast.out, "output directory")->required();
  c_fc->add_option("--baseline", forecast.baseline, "none | persistence")
      ->check(CLI::IsMember({"none", "persistence"}));

  EventsArgs events;
  auto* c_ev = app.add_subcommand("events", "extract the top rainfall events from a rain volume");
  c_ev->add_option("--input", events.input, "mm/h rain frame file")->required()->check(CLI::ExistingFile);
  c_ev->add_option("--out", events.out, "event CSV path")->required();
  c_ev->add_option("--top", events.top, "number of events kept")->check(CLI::PositiveNumber);
  c_ev->add_option("--threshold", events.threshold, "rain-rate threshold (mm/h, strict)")
      ->check(CLI::NonNegativeNumber);
  c_ev->add_option("--sequence-id", events.sequence_id, "sequence identifier (default: file stem)");

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "score forecasts or run a synthetic experiment");
  c_eval->add_option("--pred", eval.preds, "forecast frame file (repeatable)");
  c_eval->add_option("--model", eval.models, "model name for each --pred");
  c_eval->add_option("--truth", eval.truth, "observed frame file");
  c_eval->add_option("--out", eval.out, "report directory")->required();
  c_eval->add_option("--experiment", eval.experiment, "comparison | transfer")
      ->check(CLI::IsMember({"comparison", "transfer"}));
  c_eval->add_option("--seed", eval.seed, "experiment seed");
  c_eval->add_option("--epochs", eval.epochs, "experiment training epochs")->check(CLI::PositiveNumber);
  c_eval->add_option("--windows", eval.windows, "experiment training windows per offset")
      ->check(CLI::PositiveNumber);
  c_eval->add_option("--finetune-epochs", eval.finetune_epochs, "transfer fine-tune epochs")
      ->check(CLI::NonNegativeNumber);
  c_eval->add_flag("--no-convlstm", eval.no_convlstm, "skip the ConvLSTM cascade in comparisons");

  CalibrateArgs calib;
  auto* c_cal = app.add_subcommand("calibrate", "fit the BT-to-rain power law to paired fields");
  c_cal->add_option("--bt", calib.bt, "kelvin frame file")->required()->check(CLI::ExistingFile);
  c_cal->add_option("--rain", calib.rain, "mm/h frame file on the same grid")->required()->check(CLI::ExistingFile);
  c_cal->add_option("--out", calib.out, "write 'alpha = ..' / 'beta = ..' config lines here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageExit;
  }

  try {
    if (c_synth->parsed()) return cmd_synth(synth);
    if (c_train->parsed()) return cmd_train(train);
    if (c_ft->parsed()) return cmd_finetune(finetune);
    if (c_fc->parsed()) return cmd_forecast(forecast);
    if (c_ev->parsed()) return cmd_events(events);
    if (c_eval->parsed()) return cmd_eval(eval);
    if (c_cal->parsed()) return cmd_calibrate(calib);
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", std::string(to_string(e.kind())).c_str(), e.what());
    return e.kind() == ErrorKind::Config ? kUsageExit : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kUsageExit;
}
