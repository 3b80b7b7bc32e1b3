// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nowcast/errors.hpp"
#include "nowcast/events.hpp"
#include "nowcast/experiments.hpp"
#include "nowcast/frame_io.hpp"
#include "nowcast/param_io.hpp"
#include "nowcast/preprocess.hpp"
#include "nowcast/rainfall.hpp"
#include "nowcast/synthetic.hpp"
#include "nowcast/verify.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace nowcast;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Field2D random_field(std::mt19937_64& rng, std::size_t r, std::size_t c, float lo, float hi, Unit unit) {
  std::uniform_real_distribution<float> u(lo, hi);
  std::vector<float> v(r * c);
  for (float& x : v) x = u(rng);
  return Field2D(r, c, std::move(v), unit);
}

// 1 ------------------------------------------------------------------------
Outcome gradient_check() {
  std::mt19937_64 rng(1);
  double worst_max = 0, worst_p99 = 0;
  bool ok = true;
  for (auto kind : {nn::CellKind::ConvGru, nn::CellKind::ConvLstm}) {
    auto p = nn::init_params<double>(nn::Arch::mini(kind), 17);
    std::uniform_real_distribution<double> b(-0.2, 0.2);
    p.for_each_conv([&](const std::string&, nn::ConvParams<double>& c) {
      for (double& v : c.bias) v = b(rng);
    });
    std::vector<nn::Tensor<double>> x, y;
    for (int i = 0; i < 4; ++i) {
      x.push_back(oracle::random_tensor(rng, 1, 8, 8, 0.6, 1.0));
      y.push_back(oracle::random_tensor(rng, 1, 8, 8, 0.6, 1.0));
    }
    const auto g = oracle::check_model_gradients(p, x, y);
    worst_max = std::max(worst_max, g.max_rel);
    worst_p99 = std::max(worst_p99, g.p99_rel);
    ok = ok && g.max_rel < 1e-2 && g.p99_rel < 1e-3;
  }
  return {ok, "max rel " + fmt("%.2e", worst_max) + ", p99 rel " + fmt("%.2e", worst_p99) +
                  " (convgru and convlstm, 8x8)"};
}

// 2 ------------------------------------------------------------------------
Outcome otsu_oracle() {
  std::mt19937_64 rng(2);
  std::normal_distribution<float> lowc(0.3f, 0.05f), highc(0.9f, 0.05f);
  std::bernoulli_distribution coin(0.4);
  int matches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Field2D f;
    if (trial % 2 == 0) {
      f = random_field(rng, 16, 16, 0.0f, 1.0f, Unit::Normalized);
    } else {
      std::vector<float> v(256);
      for (float& x : v) x = coin(rng) ? lowc(rng) : highc(rng);
      f = Field2D(16, 16, std::move(v), Unit::Normalized);
    }
    if (otsu_search(f).bin == oracle::otsu_bin(f)) ++matches;
  }
  return {matches == 100, std::to_string(matches) + "/100 exact bin matches"};
}

// 3 ------------------------------------------------------------------------
MaskVolume pair_mask(int dt, int dr, int dc) {
  MaskVolume m;
  m.t = m.rows = m.cols = 2;
  m.cells.assign(8, 0);
  m.cells[0] = 1;
  m.cells[(static_cast<std::size_t>(dt) * 2 + dr) * 2 + dc] = 1;
  return m;
}

Outcome labelling_oracle() {
  std::mt19937_64 rng(3);
  int matches = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto m = oracle::random_mask(rng, 8, 16, 16, 0.2);
    if (oracle::partition(label_components_18(m).labels) == oracle::partition(oracle::bfs_label_18(m))) ++matches;
  }
  const auto corner = label_components_18(pair_mask(1, 1, 1)).count;
  const auto edge = label_components_18(pair_mask(1, 1, 0)).count;
  return {matches == 50 && corner == 2 && edge == 1,
          std::to_string(matches) + "/50 partitions equal; corner pair " + std::to_string(corner) +
              " components, edge pair " + std::to_string(edge)};
}

// 4 ------------------------------------------------------------------------
Outcome transform_algebra() {
  const double zero = bt_to_rain(300.0, TransformCoeffs{});
  const double hand = bt_to_rain(260.0, TransformCoeffs{0.01, 1.5});
  std::vector<CalibrationSample> s;
  for (double t = 190.0; t < 299.5; t += 2.5) s.push_back({t, 0.02 * std::pow(300.0 - t, 1.2)});
  const auto c = calibrate_transform(s);
  const bool ok = zero == 0.0 && std::abs(hand - 2.52982) < 1e-4 && std::abs(c.alpha - 0.02) < 1e-6 &&
                  std::abs(c.beta - 1.2) < 1e-6;
  return {ok, "R(300) = " + fmt("%g", zero) + ", R(260) = " + fmt("%.5f", hand) + ", fit alpha " +
                  fmt("%.8f", c.alpha) + " beta " + fmt("%.8f", c.beta)};
}

// 5 ------------------------------------------------------------------------
Outcome crps_checks(int n_random) {
  double degenerate = 0;
  for (double y : {0.0, 1.0, 3.7, 12.0}) degenerate = std::max(degenerate, crps_step(ThresholdCDF{{{y, 1.0}}}, y));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> obs(0.0, 25.0);
  double worst = 0;
  for (int i = 0; i < n_random; ++i) {
    const auto cdf = oracle::random_cdf(rng);
    const double y = obs(rng);
    const double upper = std::max(cdf.pairs.back().first, y) + 1.0;
    worst = std::max(worst, std::abs(crps_step(cdf, y, upper) - oracle::crps_quadrature(cdf, y, upper)));
  }
  return {degenerate < 1e-9 && worst < 1e-3,
          "degenerate " + fmt("%.1e", degenerate) + ", max |exact - quadrature| " + fmt("%.2e", worst) + " over " +
              std::to_string(n_random) + " CDFs"};
}

// 6 ------------------------------------------------------------------------
Outcome metric_identities(const std::vector<std::pair<Field2D, Field2D>>& pairs) {
  bool ok = true;
  double worst_self = 0, worst_ssim = 0;
  int ordered = 0;
  for (const auto& [p, o] : pairs) {
    worst_self = std::max(worst_self, rmse(o, o));
    worst_ssim = std::max(worst_ssim, std::abs(ssim(o, o) - 1.0));
    if (rmse(p, o) >= std::abs(bias(p, o))) ++ordered;
  }
  const auto s = pod_far_f1({10, 0, 0, 0});
  const bool perfect = s.pod == 1.0 && s.far == 0.0 && s.f1 == 1.0;
  ok = worst_self == 0.0 && worst_ssim == 0.0 && ordered == static_cast<int>(pairs.size()) && perfect;
  return {ok, "rmse(x,x) " + fmt("%g", worst_self) + ", |ssim(x,x)-1| " + fmt("%g", worst_ssim) + ", rmse>=|bias| " +
                  std::to_string(ordered) + "/" + std::to_string(pairs.size()) + ", pod/far/f1 perfect " +
                  (perfect ? "(1,0,1)" : "wrong")};
}

std::vector<std::pair<Field2D, Field2D>> random_pairs(int n) {
  std::mt19937_64 rng(6);
  std::vector<std::pair<Field2D, Field2D>> out;
  for (int i = 0; i < n; ++i)
    out.emplace_back(random_field(rng, 16, 16, 200, 300, Unit::Kelvin), random_field(rng, 16, 16, 200, 300, Unit::Kelvin));
  return out;
}

// 7 ------------------------------------------------------------------------
Outcome skill_ordering(const fs::path& work) {
  ExperimentConfig cfg;
  cfg.include_convlstm = false;
  const auto t0 = std::chrono::steady_clock::now();
  const auto report = run_comparison(cfg, [](const std::string& line) { std::cerr << "  [7] " << line << "\n"; });
  const double minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;
  write_metrics_csv(report.rows(), work / "comparison.csv");
  const auto& gru = report.find("convgru");
  const auto& per = report.find("persistence");
  bool beats = true, monotone = true;
  std::string d;
  for (int h = 0; h < 4; ++h) {
    const double gain = 1.0 - gru.hour_rmse[h] / per.hour_rmse[h];
    beats = beats && gain >= 0.10;
    if (h > 0) monotone = monotone && per.hour_rmse[h] >= per.hour_rmse[h - 1];
    d += "h" + std::to_string(h + 1) + " " + fmt("%.2f", gru.hour_rmse[h]) + "K vs " + fmt("%.2f", per.hour_rmse[h]) +
         "K (" + fmt("%.1f", 100 * gain) + "%); ";
  }
  d += std::string("persistence monotone ") + (monotone ? "yes" : "no") + "; " + fmt("%.1f", minutes) + " min";
  return {beats && monotone && minutes < 30.0, d};
}

// 8 ------------------------------------------------------------------------
Outcome transfer() {
  const ExperimentConfig cfg;
  const auto r = run_transfer(cfg, [](const std::string& line) { std::cerr << "  [8] " << line << "\n"; });
  return {r.rmse_b_after < r.rmse_b_before,
          "region B " + fmt("%.3f", r.rmse_b_before) + "K -> " + fmt("%.3f", r.rmse_b_after) + "K; region A " +
              fmt("%.3f", r.rmse_a_before) + "K -> " + fmt("%.3f", r.rmse_a_after) + "K"};
}

// 9 ------------------------------------------------------------------------
std::string quote(const std::string& s) { return "'" + s + "'"; }

bool run(const std::string& cmd) {
  std::cerr << "  [9] " << cmd << "\n";
  return std::system((cmd + " > /dev/null").c_str()) == 0;
}

std::vector<char> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism(const std::string& cli, const fs::path& work) {
  const fs::path root = work / "determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string exe = quote(cli);
  if (!run(exe + " synth --seed 7 --frames 40 --rows 28 --cols 28 --out " + quote((root / "data").string())))
    return {false, "synth failed"};
  for (const char* name : {"a", "b"}) {
    const fs::path r = root / name;
    const std::string common = " --seed 7 --pad-to 32";
    const bool ok =
        run(exe + " train --data " + quote((root / "data").string()) + " --checkpoint " + quote((r / "ckpt").string()) +
            common + " --arch mini --epochs 2 --batch-size 5 --max-windows 10") &&
        run(exe + " forecast --checkpoint " + quote((r / "ckpt").string()) + " --input " +
            quote((root / "data" / "synth.w4cf").string()) + " --start 10 --out " + quote((r / "forecast").string()) +
            common + " --roi 'north 0 0 14 28' --roi 'south 14 0 28 28'") &&
        run(exe + " events --input " + quote((r / "forecast" / "rain.w4cf").string()) + " --out " +
            quote((r / "events.csv").string()));
    if (!ok) return {false, std::string("pipeline run ") + name + " failed"};
  }
  std::set<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root / "a"))
    if (e.is_regular_file()) files.insert(fs::relative(e.path(), root / "a"));
  for (const auto& e : fs::recursive_directory_iterator(root / "b"))
    if (e.is_regular_file()) files.insert(fs::relative(e.path(), root / "b"));
  const std::set<std::string> required{"ckpt/manifest.txt", "ckpt/model_h1.w4cp", "ckpt/model_h4.w4cp",
                                       "forecast/forecast_bt.w4cf", "forecast/rain.w4cf", "forecast/cdf.csv",
                                       "events.csv"};
  int identical = 0;
  std::string diff;
  for (const auto& f : files) {
    if (fs::exists(root / "a" / f) && fs::exists(root / "b" / f) && slurp(root / "a" / f) == slurp(root / "b" / f))
      ++identical;
    else
      diff += " " + f.string();
  }
  bool have_all = true;
  for (const auto& r : required) have_all = have_all && files.contains(r);
  return {have_all && identical == static_cast<int>(files.size()),
          std::to_string(identical) + "/" + std::to_string(files.size()) + " artifacts byte-identical" +
              (diff.empty() ? "" : "; differing:" + diff) + (have_all ? "" : "; missing required artifacts")};
}

// 10 -----------------------------------------------------------------------
Outcome round_trips(const fs::path& work) {
  std::mt19937_64 rng(10);
  std::vector<Field2D> frames;
  for (int i = 0; i < 5; ++i) frames.push_back(random_field(rng, 13, 17, 180, 300, Unit::Kelvin));
  const FrameSequence seq(frames);
  save_frames(seq, work / "rt.w4cf");
  const bool frames_ok = load_frames(work / "rt.w4cf") == seq && slurp(work / "rt.w4cf") == encode_frames(seq);

  const auto p = nn::init_params<float>(nn::Arch::desk(nn::CellKind::ConvLstm), 10);
  nn::save_params(p, work / "rt.w4cp");
  const bool params_ok = nn::load_params(work / "rt.w4cp") == p;

  std::vector<float> rain(6 * 20 * 20);
  std::uniform_real_distribution<float> u(0.0f, 12.0f);
  for (float& v : rain) {
    v = u(rng);
    if (v < 9.6f) v = 0.0f;  // sparse wet cells give several events
  }
  const auto events = detect_events(Volume3D(6, 20, 20, rain, Unit::MmPerH));
  export_events_csv(events, "rt", work / "rt_events.csv");
  std::ifstream in(work / "rt_events.csv", std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  const auto parsed = parse_events_csv(ss.str());
  bool events_ok = parsed.size() == events.size() && !events.empty();
  for (std::size_t i = 0; events_ok && i < events.size(); ++i)
    events_ok = parsed[i] == to_csv_row(events[i], "rt", static_cast<int>(i + 1));
  return {frames_ok && params_ok && events_ok,
          std::string("frames ") + (frames_ok ? "bit-exact" : "MISMATCH") + ", params " +
              (params_ok ? "bit-exact" : "MISMATCH") + ", events " + std::to_string(parsed.size()) + " records " +
              (events_ok ? "equal" : "MISMATCH")};
}

// 11 -----------------------------------------------------------------------
Outcome metric_suite() {
  // Synthetic pred/truth rainfall: truth from the generator, prediction from
  // the same scene one frame later.
  const auto bt = gen_synthetic(SyntheticConfig{.seed = 11, .n_frames = 6, .rows = 48, .cols = 48});
  std::vector<std::pair<Field2D, Field2D>> pairs;
  std::size_t categorical = 0;
  for (std::size_t t = 0; t + 1 < bt.size(); ++t) {
    const auto truth = bt_to_rain(bt[t], TransformCoeffs{});
    const auto pred = bt_to_rain(bt[t + 1], TransformCoeffs{});
    pairs.emplace_back(pred, truth);
    SsimConfig sc;
    sc.data_range = 50.0;
    (void)ssim(pred, truth, sc);
    for (double thr : {0.5, 1.0}) {
      const auto s = pod_far_f1(contingency(pred, truth, thr));
      if (s.pod && s.far && s.f1) ++categorical;
    }
  }
  const auto c5 = crps_checks(20);
  const auto c6 = metric_identities(pairs);

  std::vector<float> v(400, 0.0f);
  for (std::size_t i = 0; i < 20; ++i) v[i] = 7.0f;  // exactly 5% wet
  const Field2D boundary(20, 20, v, Unit::Mm);
  v[20] = 7.0f;  // 5.25%
  const Field2D above(20, 20, v, Unit::Mm);
  const std::vector<Field2D> scenes{boundary, above};
  const auto kept = active_scene_filter(scenes);
  const bool filter_ok = kept.size() == 1 && kept.front().first == 1;
  return {c5.pass && c6.pass && filter_ok && categorical > 0,
          std::string("crps ") + (c5.pass ? "ok" : "FAIL") + ", identities " + (c6.pass ? "ok" : "FAIL") +
              ", categorical scores defined on " + std::to_string(categorical) + " cases, 5% frame " +
              (filter_ok ? "excluded" : "NOT excluded")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string cli;
  fs::path work = "acceptance_work";
  std::vector<int> only;
  app.add_option("--cli", cli, "path to the nowcast executable")->required();
  app.add_option("--workdir", work, "scratch directory");
  app.add_option("--only", only, "run just these criteria");
  CLI11_PARSE(app, argc, argv);
  fs::create_directories(work);

  const std::vector<std::function<Outcome()>> criteria{
      gradient_check,
      otsu_oracle,
      labelling_oracle,
      transform_algebra,
      [] { return crps_checks(20); },
      [] { return metric_identities(random_pairs(100)); },
      [&] { return skill_ordering(work); },
      transfer,
      [&] { return determinism(cli, work); },
      [&] { return round_trips(work); },
      metric_suite,
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i + 1);
    if (!only.empty() && std::find(only.begin(), only.end(), n) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << " (" << fmt("%.1f", secs) << " s) "
              << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
