// Copyright 2026 The holoverify Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// holoverify command-line front end.
//
//   holoverify synth     --out DIR
//   holoverify split     --out DIR
//   holoverify train     --split FILE --out CKPT
//   holoverify calibrate --checkpoint CKPT --split FILE --out FILE
//   holoverify evaluate  --checkpoint CKPT --calibration FILE --split FILE --out DIR
//   holoverify infer     --checkpoint CKPT --calibration FILE --out FILE
//   holoverify baseline  --split FILE --out DIR
//   holoverify attribute --checkpoint CKPT --clip ID --out PNG
//
// Every subcommand reads the experiment config given by --config (see config/experiment.json);
// flags and --set key.path=value override its keys. The dataset root comes from --data-root,
// then dataset.root, then the HOLOVERIFY_DATA_ROOT environment variable.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "holoverify/holoverify.hpp"

namespace hv = holoverify;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json default_config() {
  auto train = hv::to_json(hv::TrainConfig{});
  train.erase("seed");  // the top-level seed drives every stage
  return {{"seed", 0},
          {"dataset", {{"root", ""}, {"kind", "synthetic"}, {"rois", ""}, {"target_fps", nullptr},
                       {"midv2020_root", ""}}},
          {"synth", hv::to_json(hv::SynthSpec{})},
          {"split", {{"n_runs", 5}}},
          {"train", train},
          {"decision", {{"min_buffer", hv::kDefaultMinBuffer}}},
          {"baseline", {{"s_grid", {30, 40, 50}}, {"h_grid", {0.01, 0.02, 0.03}}, {"t_grid", {0}}}},
          {"attribution", {{"steps", 64}}}};
}

/// Options shared by every subcommand.
struct Common {
  std::string config_path;
  std::string data_root;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
};

/// Effective configuration: defaults, then the config file, then --set, then typed flags.
struct Context {
  json cfg;
  std::uint64_t seed = 0;
  std::string hash;

  [[nodiscard]] fs::path data_root() const {
    const auto root = cfg["dataset"].value("root", "");
    if (root.empty()) throw hv::Error("no dataset root: pass --data-root, set dataset.root or HOLOVERIFY_DATA_ROOT");
    return root;
  }

  [[nodiscard]] hv::TrainConfig train_config() const { return hv::train_config_from_json(cfg["train"]); }
  [[nodiscard]] int min_buffer() const { return cfg["decision"].value("min_buffer", hv::kDefaultMinBuffer); }

  [[nodiscard]] json stamp() const { return {{"seed", seed}, {"config_hash", hash}}; }
};

json parse_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception&) {
    return text;  // bare strings need no quotes
  }
}

void set_path(json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw hv::Error("--set expects key.path=value, got '" + assignment + "'");
  json* node = &root;
  std::string path = assignment.substr(0, eq);
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    node = &(*node)[path.substr(start, dot - start)];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = parse_value(assignment.substr(eq + 1));
}

Context make_context(const Common& c, const std::function<void(json&)>& flag_overrides = {}) {
  Context ctx;
  ctx.cfg = default_config();
  if (!c.config_path.empty()) hv::merge_into(ctx.cfg, hv::load_json_file(c.config_path));
  for (const auto& s : c.sets) set_path(ctx.cfg, s);
  if (c.seed) ctx.cfg["seed"] = *c.seed;
  if (!c.data_root.empty()) ctx.cfg["dataset"]["root"] = c.data_root;
  if (ctx.cfg["dataset"].value("root", "").empty())
    if (const char* env = std::getenv("HOLOVERIFY_DATA_ROOT")) ctx.cfg["dataset"]["root"] = env;
  if (flag_overrides) flag_overrides(ctx.cfg);
  ctx.seed = ctx.cfg["seed"].get<std::uint64_t>();
  // The hash covers what determines results, not where files live.
  json hashed = ctx.cfg;
  hashed["dataset"].erase("root");
  hashed["dataset"].erase("midv2020_root");
  ctx.hash = hv::config_hash(hashed);
  return ctx;
}

// ---------------------------------------------------------------------------
// Dataset access

struct Dataset {
  std::vector<hv::ClipRecord> clips;
  hv::RoiConfig rois;
};

hv::RoiConfig load_rois(const Context& ctx, const fs::path& root) {
  const auto explicit_path = ctx.cfg["dataset"].value("rois", "");
  const fs::path path = explicit_path.empty() ? root / "rois.json" : fs::path(explicit_path);
  return hv::RoiConfig::load(path);
}

std::vector<hv::ClipRecord> scan(const Context& ctx, const fs::path& root, hv::DatasetKind kind) {
  hv::ScanReport report;
  auto clips = hv::scan_dataset(root, kind, &report);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  const auto& fps = ctx.cfg["dataset"]["target_fps"];
  if (fps.is_number())
    for (auto& c : clips) c = hv::resample_clip(std::move(c), fps.get<double>());
  return clips;
}

Dataset load_dataset(const Context& ctx) {
  const auto root = ctx.data_root();
  const auto kind = hv::parse_dataset_kind(ctx.cfg["dataset"].value("kind", "synthetic"));
  return {scan(ctx, root, kind), load_rois(ctx, root)};
}

std::vector<hv::PreparedClip> prepare(const std::vector<hv::ClipRecord>& clips, const hv::RoiConfig& rois) {
  return hv::prepare_clips(clips, rois);
}

hv::SplitClips split_clips(const Dataset& d, const std::string& split_path) {
  const auto plan = hv::load_split(split_path);
  return hv::apply_split(plan, d.clips);
}

hv::EncoderModel load_model(const std::string& path, json* meta = nullptr) {
  if (path.empty()) throw hv::Error("no checkpoint given");
  return hv::load_checkpoint(path, meta);
}

// ---------------------------------------------------------------------------
// Reports: every evaluate/baseline call drops one file per run into <out>/runs and the
// tables are rebuilt from all of them, so repeated calls accumulate runs and ablations.

hv::AblationSetting setting_from_meta(const json& meta) {
  hv::AblationSetting s;
  s.architecture = meta.value("architecture", "");
  const auto tc = meta.value("train_config", json::object());
  if (meta.value("untrained", false)) {
    s.training_data = "none";
    return s;
  }
  s.augmentation = tc.value("aug", json::object()).value("enabled", true);
  s.strategy = tc.value("mode", "contrastive") == "classifier" ? "classifier" : "triplet";
  s.training_data = tc.value("train_data", "full");
  return s;
}

void write_table(const fs::path& dir, const std::string& stem, hv::ReportTable t, const Context& ctx) {
  t.meta["seed"] = ctx.seed;
  t.meta["config_hash"] = ctx.hash;
  fs::create_directories(dir);
  std::ofstream(dir / (stem + ".txt")) << hv::to_text(t);
  std::ofstream(dir / (stem + ".csv")) << hv::to_csv(t);
  std::ofstream(dir / (stem + ".json")) << hv::to_json(t).dump(2) << '\n';
}

void rebuild_tables(const fs::path& out, const Context& ctx) {
  std::vector<hv::RunResult> runs, main_rows;
  std::vector<hv::AblationSetting> settings;
  for (const auto& entry : fs::directory_iterator(out / "runs")) {
    if (entry.path().extension() != ".json") continue;
    const auto j = hv::load_json_file(entry.path());
    auto r = hv::run_result_from_json(j);
    if (j.contains("setting")) {
      const auto& s = j["setting"];
      hv::AblationSetting a{s.value("augmentation", true), s.value("strategy", "triplet"),
                            s.value("training_data", "full"), s.value("architecture", "")};
      if (std::none_of(settings.begin(), settings.end(), [&](const auto& x) { return x.method() == a.method(); }))
        settings.push_back(a);
      if (a.augmentation && a.strategy == "triplet" && a.training_data == "full") {
        auto row = r;
        row.method = "OUR - " + a.architecture;
        main_rows.push_back(std::move(row));
      }
    } else {
      main_rows.push_back(r);
    }
    runs.push_back(std::move(r));
  }
  std::sort(settings.begin(), settings.end(), [](const auto& a, const auto& b) { return a.method() < b.method(); });
  write_table(out, "table2_results", hv::results_report(main_rows), ctx);
  write_table(out, "table3_ablations", hv::ablation_report(settings, runs), ctx);
  std::cout << hv::to_text(hv::results_report(main_rows));
}

void save_run(const fs::path& out, const hv::RunResult& r, const Context& ctx,
              const std::optional<hv::AblationSetting>& setting) {
  auto j = hv::to_json(r);
  j.update(ctx.stamp());
  std::string stem = r.method + "_" + r.strategy + "_" + std::string(hv::to_string(r.dataset_tag)) + "_run" +
                     std::to_string(r.run_id);
  if (setting) {
    j["setting"] = {{"augmentation", setting->augmentation},
                    {"strategy", setting->strategy},
                    {"training_data", setting->training_data},
                    {"architecture", setting->architecture}};
    stem = setting->method() + "_" + r.strategy + "_" + std::string(hv::to_string(r.dataset_tag)) + "_run" +
           std::to_string(r.run_id);
  }
  for (auto& ch : stem)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '-') ch = '_';
  hv::save_json_file(out / "runs" / (stem + ".json"), j);
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_synth(const Context& ctx, const std::string& out) {
  const auto spec = hv::synth_spec_from_json(ctx.cfg["synth"]);
  hv::generate_dataset(spec, out, ctx.seed);
  auto stamp = hv::load_json_file(fs::path(out) / "synth_spec.json");
  stamp.update(ctx.stamp());
  hv::save_json_file(fs::path(out) / "synth_spec.json", stamp);
  std::cout << "wrote " << hv::plan_clips(spec, ctx.seed).size() << " clips to " << out << '\n';
  return 0;
}

int cmd_split(const Context& ctx, const std::string& out) {
  const auto d = load_dataset(ctx);
  const int n_runs = ctx.cfg["split"].value("n_runs", 5);
  auto plans = hv::generate_splits(d.clips, n_runs, ctx.seed);
  fs::create_directories(out);
  for (auto& p : plans) {
    p.config_hash = ctx.hash;
    const auto path = fs::path(out) / ("run" + std::to_string(p.run_id) + ".split");
    hv::save_split(p, path);
    const auto s = hv::apply_split(p, d.clips);
    std::cout << path.string() << ": " << s.train.size() << " train, " << s.validation.size() << " validation, "
              << s.test_vanilla.size() << " test, " << s.test_photo_replacement.size() << " photo replacement\n";
  }
  return 0;
}

int cmd_train(const Context& ctx, const std::string& split, const std::string& out, bool untrained) {
  auto tc = ctx.train_config();
  tc.seed = ctx.seed;
  const auto d = load_dataset(ctx);
  const auto s = split_clips(d, split);
  json meta = ctx.stamp();
  meta["train_config"] = hv::to_json(tc);
  meta["split"] = split;
  meta["run_id"] = hv::load_split(split).run_id;
  if (untrained) {
    auto model = hv::detail::init_model(tc, false);
    model.config_hash = ctx.hash;
    meta["untrained"] = true;
    hv::save_checkpoint(model, out, meta);
    std::cout << "saved untrained " << hv::to_string(tc.architecture) << " to " << out << '\n';
    return 0;
  }
  const auto train = prepare(s.train, d.rois);
  const auto val = prepare(s.validation, d.rois);
  auto log = [](const hv::EpochRecord& r) {
    std::cout << "epoch " << r.epoch << " loss " << r.train_loss << " criterion " << r.criterion << std::endl;
  };
  auto result = tc.mode == hv::TrainMode::classifier ? hv::train_classifier(train, val, tc, log)
                                                     : hv::train(train, val, tc, log);
  result.model.config_hash = ctx.hash;
  json history = json::array();
  for (const auto& h : result.history) history.push_back(hv::to_json(h));
  meta["history"] = history;
  meta["selected_epoch"] = result.selected_epoch;
  meta["selection"] = hv::to_string(result.selection);
  hv::save_checkpoint(result.model, out, meta);
  std::cout << "selected epoch " << result.selected_epoch << ", saved " << out << '\n';
  return 0;
}

json calibration_file(const hv::EncoderModel& model, const hv::ValidationInputs& val, int min_buffer,
                      const Context& ctx) {
  json out = ctx.stamp();
  out["checkpoint_config_hash"] = model.config_hash;
  out["whole"] = hv::to_json(hv::calibrate_model(model, val, hv::Strategy::whole, min_buffer));
  if (!model.is_classifier())
    out["cumulative"] = hv::to_json(hv::calibrate_model(model, val, hv::Strategy::cumulative, min_buffer));
  return out;
}

int cmd_calibrate(const Context& ctx, const std::string& ckpt, const std::string& split, const std::string& out) {
  const auto model = load_model(ckpt);
  const auto d = load_dataset(ctx);
  const auto s = split_clips(d, split);
  const auto val = hv::ValidationInputs::build(prepare(s.validation, d.rois), ctx.train_config().aug);
  const auto j = calibration_file(model, val, ctx.min_buffer(), ctx);
  hv::save_json_file(out, j);
  std::cout << "whole-video threshold " << j["whole"]["threshold"] << " (validation F "
            << j["whole"]["validation_fscore"] << ")\n";
  return 0;
}

std::vector<hv::CalibrationResult> load_calibrations(const std::string& path) {
  const auto j = hv::load_json_file(path);
  std::vector<hv::CalibrationResult> out;
  for (const char* key : {"whole", "cumulative"})
    if (j.contains(key)) out.push_back(hv::calibration_from_json(j[key]));
  if (out.empty()) throw hv::Error(path + ": no calibration found");
  return out;
}

int cmd_evaluate(const Context& ctx, const std::string& ckpt, const std::string& calib, const std::string& split,
                 const std::string& out) {
  json meta;
  const auto model = load_model(ckpt, &meta);
  const auto cals = load_calibrations(calib);
  const auto d = load_dataset(ctx);
  const auto plan = hv::load_split(split);
  const auto s = hv::apply_split(plan, d.clips);
  const auto aug = ctx.train_config().aug;
  std::vector<std::pair<hv::DatasetTag, hv::ValidationInputs>> sets;
  sets.emplace_back(hv::DatasetTag::holo_vanilla, hv::ValidationInputs::build(prepare(s.test_vanilla, d.rois), aug));
  if (!s.test_photo_replacement.empty())
    sets.emplace_back(hv::DatasetTag::holo_photo_replacement,
                      hv::ValidationInputs::build(prepare(s.test_photo_replacement, d.rois), aug));
  const auto midv2020 = ctx.cfg["dataset"].value("midv2020_root", "");
  if (!midv2020.empty()) {
    const auto clips = scan(ctx, midv2020, hv::DatasetKind::midv_2020);
    sets.emplace_back(hv::DatasetTag::midv2020_clips,
                      hv::ValidationInputs::build(prepare(clips, load_rois(ctx, midv2020)), aug));
  }
  const auto setting = setting_from_meta(meta);
  for (const auto& cal : cals)
    for (const auto& [tag, inputs] : sets) {
      if (inputs.frames.empty()) continue;
      const auto r = hv::evaluate_model(model, inputs, cal, tag, plan.run_id, ctx.min_buffer());
      save_run(out, r, ctx, setting);
      std::cout << setting.method() << " " << r.strategy << " " << hv::to_string(tag) << ": "
                << hv::headline_metric(r) << '\n';
    }
  rebuild_tables(out, ctx);
  return 0;
}

int cmd_infer(const Context& ctx, const std::string& ckpt, const std::string& calib, const std::string& clip_filter,
              const std::string& out) {
  const auto model = load_model(ckpt);
  const auto cals = load_calibrations(calib);
  const auto d = load_dataset(ctx);
  const auto aug = ctx.train_config().aug;
  std::ofstream dump(out);
  if (!dump) throw hv::Error("cannot write " + out);
  dump << "# seed " << ctx.seed << " config_hash " << ctx.hash << '\n';
  dump << "clip_id,strategy,score,verdict,stop_index\n";
  std::size_t n = 0;
  for (const auto& c : d.clips) {
    if (!clip_filter.empty() && c.clip_id.find(clip_filter) == std::string::npos) continue;
    hv::ValidationInputs one;
    one.clip_ids = {c.clip_id};
    one.labels = {c.label};
    one.frames = {hv::clip_inputs(hv::prepare_clip(c, d.rois), aug)};
    for (const auto& cal : cals) {
      const auto r = hv::evaluate_model(model, one, cal, hv::DatasetTag::holo_vanilla, 0, ctx.min_buffer());
      const auto& o = r.clips.front();
      dump << o.clip_id << ',' << r.strategy << ',' << o.score << ',' << hv::to_string(o.verdict) << ','
           << o.stop_index << '\n';
    }
    ++n;
  }
  if (n == 0) throw hv::Error("no clip matches '" + clip_filter + "'");
  std::cout << "scored " << n << " clips into " << out << '\n';
  return 0;
}

int cmd_baseline(const Context& ctx, const std::string& split, const std::string& out) {
  const auto d = load_dataset(ctx);
  const auto plan = hv::load_split(split);
  const auto s = hv::apply_split(plan, d.clips);
  const auto& b = ctx.cfg["baseline"];
  const auto s_grid = b["s_grid"].get<std::vector<double>>();
  const auto h_grid = b["h_grid"].get<std::vector<double>>();
  const auto t_grid = b["t_grid"].get<std::vector<int>>();
  auto convert = [&](const std::vector<hv::ClipRecord>& clips) {
    std::vector<hv::BaselineClip> v;
    for (const auto& c : clips) v.push_back(hv::prepare_baseline_clip(c, &d.rois));
    return v;
  };
  const auto val = convert(s.validation), test = convert(s.test_vanilla), test_pr = convert(s.test_photo_replacement);
  const auto sweep = hv::parameter_sweep(test, s_grid, h_grid, t_grid);
  write_table(out, "table1_baseline_sweep", hv::sweep_report(sweep), ctx);
  std::cout << hv::to_text(hv::sweep_report(sweep));
  for (auto strategy : {hv::Strategy::whole, hv::Strategy::cumulative}) {
    const auto params = hv::calibrate_baseline(val, s_grid, h_grid, t_grid, strategy);
    for (const auto* set : {&test, &test_pr}) {
      if (set->empty()) continue;
      hv::RunResult r;
      r.run_id = plan.run_id;
      r.dataset_tag = set == &test ? hv::DatasetTag::holo_vanilla : hv::DatasetTag::holo_photo_replacement;
      r.method = "Baseline (no tracking)";
      r.strategy = std::string(hv::to_string(strategy));
      for (const auto& c : *set) {
        const auto dec = hv::baseline_decide(c.frames, params, strategy);
        r.clips.push_back({c.clip_id, dec.verdict, c.label, dec.score, dec.stop_index});
      }
      save_run(out, r, ctx, std::nullopt);
    }
  }
  rebuild_tables(out, ctx);
  return 0;
}

int cmd_attribute(const Context& ctx, const std::string& ckpt, const std::string& clip_id, int frame,
                  const std::string& out) {
  const auto model = load_model(ckpt);
  const auto d = load_dataset(ctx);
  const auto it = std::find_if(d.clips.begin(), d.clips.end(), [&](const auto& c) { return c.clip_id == clip_id; });
  if (it == d.clips.end()) throw hv::Error("clip not found: " + clip_id);
  const auto prepared = hv::prepare_clip(*it, d.rois);
  if (frame < 0 || static_cast<std::size_t>(frame) >= prepared.rois.size())
    throw hv::Error("frame index out of range for " + clip_id);
  const auto aug = ctx.train_config().aug;
  const auto input = hv::eval_transform(prepared.rois[static_cast<std::size_t>(frame)], aug);
  const auto attr = hv::attribute_frame(model, input, hv::black_baseline(aug), ctx.cfg["attribution"].value("steps", 64));
  hv::write_image(out, hv::render_attribution(attr, hv::denormalize(input, aug)));
  std::cout << "wrote " << out << '\n';
  try {
    const auto region = hv::input_region(hv::layout_for_name(it->document_model).overlay,
                                         d.rois.get(it->document_model), aug);
    std::cout << "mean |attribution| inside/outside the overlay: " << hv::region_ratio(attr, region) << '\n';
  } catch (const hv::Error&) {
    // Not a synthetic model: no known overlay region.
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hologram verification in ID-document video clips"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "Experiment config (JSON)")->check(CLI::ExistingFile);
    sub->add_option("--data-root", common.data_root, "Dataset root (overrides dataset.root)");
    sub->add_option("--seed", common.seed, "Seed (overrides seed)");
    sub->add_option("--set", common.sets, "Override a config key: key.path=value");
  };

  std::string out, split, ckpt, calib, clip;
  int frame = 3;
  std::optional<int> models, identities, frames, epochs, batch, runs;
  std::optional<std::string> arch, mode, train_data, format;
  bool no_aug = false, untrained = false;

  auto* synth = app.add_subcommand("synth", "Render a synthetic dataset");
  add_common(synth);
  synth->add_option("--out", out, "Output directory")->required();
  synth->add_option("--models", models, "Document models");
  synth->add_option("--identities", identities, "Identities per model");
  synth->add_option("--frames", frames, "Frames per clip");
  synth->add_option("--format", format, "Image format (jpg or png)");

  auto* split_cmd = app.add_subcommand("split", "Write the identity splits of every run");
  add_common(split_cmd);
  split_cmd->add_option("--out", out, "Output directory")->required();
  split_cmd->add_option("--runs", runs, "Number of runs");

  auto* train = app.add_subcommand("train", "Train an encoder on one split");
  add_common(train);
  train->add_option("--split", split, "Split file")->required();
  train->add_option("--out", out, "Checkpoint path")->required();
  train->add_option("--epochs", epochs, "Epochs");
  train->add_option("--batch-size", batch, "Batch size");
  train->add_option("--arch", arch, "resnet18, mobilevit_xxs or mobilenetv3_small050");
  train->add_option("--mode", mode, "contrastive or classifier");
  train->add_option("--train-data", train_data, "full or originals_only");
  train->add_flag("--no-aug", no_aug, "Disable augmentation");
  train->add_flag("--untrained", untrained, "Save the initial weights without training");

  auto* calibrate = app.add_subcommand("calibrate", "Fit decision thresholds on the validation clips");
  add_common(calibrate);
  calibrate->add_option("--checkpoint", ckpt, "Checkpoint")->required();
  calibrate->add_option("--split", split, "Split file")->required();
  calibrate->add_option("--out", out, "Calibration file")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Score the test clips and write the report tables");
  add_common(evaluate);
  evaluate->add_option("--checkpoint", ckpt, "Checkpoint")->required();
  evaluate->add_option("--calibration", calib, "Calibration file")->required();
  evaluate->add_option("--split", split, "Split file")->required();
  evaluate->add_option("--out", out, "Report directory")->required();

  auto* infer = app.add_subcommand("infer", "Score clips and dump per-clip verdicts");
  add_common(infer);
  infer->add_option("--checkpoint", ckpt, "Checkpoint")->required();
  infer->add_option("--calibration", calib, "Calibration file")->required();
  infer->add_option("--clip", clip, "Only clips whose id contains this text");
  infer->add_option("--out", out, "Score dump (CSV)")->required();

  auto* baseline = app.add_subcommand("baseline", "Sweep and evaluate the pixel-statistics baseline");
  add_common(baseline);
  baseline->add_option("--split", split, "Split file")->required();
  baseline->add_option("--out", out, "Report directory")->required();

  auto* attribute = app.add_subcommand("attribute", "Integrated-gradients map of one frame");
  add_common(attribute);
  attribute->add_option("--checkpoint", ckpt, "Checkpoint")->required();
  attribute->add_option("--clip", clip, "Clip id")->required();
  attribute->add_option("--frame", frame, "Frame index");
  attribute->add_option("--out", out, "Output image")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    auto overrides = [&](json& cfg) {
      if (models) cfg["synth"]["n_models"] = *models;
      if (identities) cfg["synth"]["n_identities"] = *identities;
      if (frames) cfg["synth"]["frames_per_clip"] = *frames;
      if (format) cfg["synth"]["image_format"] = *format;
      if (runs) cfg["split"]["n_runs"] = *runs;
      if (epochs) cfg["train"]["max_epochs"] = *epochs;
      if (batch) cfg["train"]["batch_size"] = *batch;
      if (arch) cfg["train"]["architecture"] = *arch;
      if (mode) cfg["train"]["mode"] = *mode;
      if (train_data) cfg["train"]["train_data"] = *train_data;
      if (no_aug) cfg["train"]["aug"]["enabled"] = false;
    };
    const auto ctx = make_context(common, overrides);
    if (*synth) return cmd_synth(ctx, out);
    if (*split_cmd) return cmd_split(ctx, out);
    if (*train) return cmd_train(ctx, split, out, untrained);
    if (*calibrate) return cmd_calibrate(ctx, ckpt, split, out);
    if (*evaluate) return cmd_evaluate(ctx, ckpt, calib, split, out);
    if (*infer) return cmd_infer(ctx, ckpt, calib, clip, out);
    if (*baseline) return cmd_baseline(ctx, split, out);
    if (*attribute) return cmd_attribute(ctx, ckpt, clip, frame, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
