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

// Frame encoder trained with the triplet margin loss, plus the frame-classifier ablation.

#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <torch/torch.h>

#include "holoverify/augment.hpp"
#include "holoverify/backbones.hpp"
#include "holoverify/catalog.hpp"
#include "holoverify/decision.hpp"
#include "holoverify/triplets.hpp"

namespace holoverify {

// ---------------------------------------------------------------------------
// Triplet margin loss

/// Gradients of the per-triplet loss with respect to a, p and n.
struct TripletLossGrad {
  std::vector<double> da, dp, dn;
};

/// max(||a - p|| - ||a - n|| + m, 0). At a zero distance the corresponding gradient term
/// is taken as 0 (a valid subgradient).
inline double triplet_loss(std::span<const double> a, std::span<const double> p, std::span<const double> n,
                           double margin = 1.0, TripletLossGrad* grad = nullptr) {
  if (a.size() != p.size() || a.size() != n.size()) throw Error("triplet vectors differ in length");
  double sap = 0.0, san = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sap += (a[i] - p[i]) * (a[i] - p[i]);
    san += (a[i] - n[i]) * (a[i] - n[i]);
  }
  const double dap = std::sqrt(sap), dan = std::sqrt(san);
  const double l = dap - dan + margin;
  if (grad) {
    grad->da.assign(a.size(), 0.0);
    grad->dp.assign(a.size(), 0.0);
    grad->dn.assign(a.size(), 0.0);
    if (l > 0.0)
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double gp = dap > 0.0 ? (a[i] - p[i]) / dap : 0.0;
        const double gn = dan > 0.0 ? (a[i] - n[i]) / dan : 0.0;
        grad->da[i] = gp - gn;
        grad->dp[i] = -gp;
        grad->dn[i] = gn;
      }
  }
  return std::max(l, 0.0);
}

/// Mean per-triplet loss over rows of [B, D] tensors; differentiable.
inline torch::Tensor triplet_loss(const torch::Tensor& a, const torch::Tensor& p, const torch::Tensor& n,
                                  double margin = 1.0) {
  const auto dap = torch::linalg_vector_norm(a - p, 2, {1});
  const auto dan = torch::linalg_vector_norm(a - n, 2, {1});
  return torch::clamp_min(dap - dan + margin, 0.0).mean();
}

// ---------------------------------------------------------------------------
// Model

enum class InitKind { scratch, pretrained };

inline std::string_view to_string(InitKind k) { return k == InitKind::scratch ? "scratch" : "pretrained"; }

inline InitKind parse_init_kind(std::string_view s) {
  if (s == "scratch") return InitKind::scratch;
  if (s == "pretrained") return InitKind::pretrained;
  throw Error("unknown init kind: " + std::string(s));
}

inline torch::Tensor to_tensor(std::span<const PlanarImage> images) {
  if (images.empty()) throw Error("empty image batch");
  const auto h = images.front().height(), w = images.front().width();
  auto out = torch::empty({static_cast<std::int64_t>(images.size()), 3, h, w});
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i].height() != h || images[i].width() != w) throw Error("mixed image sizes in batch");
    std::memcpy(out[static_cast<std::int64_t>(i)].data_ptr<float>(), images[i].values().data(),
                images[i].values().size() * sizeof(float));
  }
  return out;
}

/// A backbone plus, for the classifier ablation, a two-way linear head.
struct EncoderModel {
  Architecture architecture = Architecture::mobilenetv3_small050;
  InitKind init = InitKind::scratch;
  std::shared_ptr<BackboneImpl> net;
  torch::nn::Linear head{nullptr};
  std::int64_t embedding_dim = 0;
  std::string config_hash;

  static EncoderModel create(Architecture arch, std::uint64_t seed, bool with_head = false) {
    torch::manual_seed(seed & 0x7fffffffffffffffull);
    EncoderModel m;
    m.architecture = arch;
    m.net = make_backbone(arch);
    m.embedding_dim = m.net->feature_dim();
    if (with_head) m.head = torch::nn::Linear(m.embedding_dim, 2);
    m.set_training(false);
    return m;
  }

  [[nodiscard]] bool is_classifier() const { return !head.is_empty(); }

  void set_training(bool on) {
    net->train(on);
    if (!head.is_empty()) head->train(on);
  }

  [[nodiscard]] std::vector<torch::Tensor> parameters() const {
    auto ps = net->parameters();
    if (!head.is_empty())
      for (auto& p : head->parameters()) ps.push_back(p);
    return ps;
  }

  /// Every parameter and buffer, keyed by a stable name.
  [[nodiscard]] std::vector<std::pair<std::string, torch::Tensor>> state() const {
    std::vector<std::pair<std::string, torch::Tensor>> out;
    for (const auto& kv : net->named_parameters()) out.emplace_back("net." + kv.key(), kv.value());
    for (const auto& kv : net->named_buffers()) out.emplace_back("net." + kv.key(), kv.value());
    if (!head.is_empty())
      for (const auto& kv : head->named_parameters()) out.emplace_back("head." + kv.key(), kv.value());
    return out;
  }

  /// [B, 3, H, W] normalized inputs -> [B, embedding_dim]; honours the current train/eval mode.
  torch::Tensor forward(const torch::Tensor& x) const {
    if (x.dim() != 4 || x.size(1) != 3) throw Error("encoder input must be [B, 3, H, W]");
    return net->forward(x);
  }

  /// Eval-mode embeddings of already normalized inputs.
  [[nodiscard]] std::vector<Embedding> embed(std::span<const PlanarImage> inputs, std::size_t chunk = 32) const {
    for (const auto& in : inputs)
      if (in.width() != kNetworkInputSide || in.height() != kNetworkInputSide)
        throw Error("encoder input must be 3x224x224");
    torch::NoGradGuard no_grad;
    net->eval();
    std::vector<Embedding> out;
    for (std::size_t i = 0; i < inputs.size(); i += chunk) {
      const auto batch = to_tensor(inputs.subspan(i, std::min(chunk, inputs.size() - i)));
      const auto f = forward(batch).contiguous();
      if (!torch::isfinite(f).all().item<bool>()) throw Error("non-finite embedding");
      for (std::int64_t r = 0; r < f.size(0); ++r) {
        const float* row = f[r].data_ptr<float>();
        out.emplace_back(row, row + embedding_dim);
      }
    }
    return out;
  }

  [[nodiscard]] Embedding embed_frame(const PlanarImage& input) const {
    return embed(std::span<const PlanarImage>(&input, 1)).front();
  }

  /// Eval-mode attack probability (class 1) for each input.
  [[nodiscard]] std::vector<double> attack_probabilities(std::span<const PlanarImage> inputs,
                                                         std::size_t chunk = 32) const {
    if (!is_classifier()) throw Error("model has no classifier head");
    torch::NoGradGuard no_grad;
    net->eval();
    head.ptr()->eval();
    std::vector<double> out;
    for (std::size_t i = 0; i < inputs.size(); i += chunk) {
      const auto batch = to_tensor(inputs.subspan(i, std::min(chunk, inputs.size() - i)));
      const auto prob = torch::softmax(head.ptr()->forward(forward(batch)), 1).select(1, 1).contiguous();
      for (std::int64_t r = 0; r < prob.size(0); ++r) out.push_back(prob[r].item<double>());
    }
    return out;
  }
};

/// Deterministic network inputs of every ROI of a clip.
inline std::vector<PlanarImage> clip_inputs(const PreparedClip& clip, const AugConfig& aug) {
  std::vector<PlanarImage> out;
  out.reserve(clip.rois.size());
  for (const auto& roi : clip.rois) out.push_back(eval_transform(roi, aug));
  return out;
}

inline EmbeddingSequence embed_clip(const EncoderModel& model, const PreparedClip& clip, const AugConfig& aug) {
  return {clip.record.clip_id, model.embed(clip_inputs(clip, aug))};
}

// ---------------------------------------------------------------------------
// Checkpoints: a magic line, one line of JSON metadata, then a torch archive of tensors.

inline constexpr std::string_view kCheckpointMagic = "holoverify-checkpoint v1";

inline void save_checkpoint(const EncoderModel& m, const std::filesystem::path& path,
                            const nlohmann::json& extra = nlohmann::json::object()) {
  nlohmann::json meta = extra;
  meta["architecture"] = to_string(m.architecture);
  meta["init"] = to_string(m.init);
  meta["embedding_dim"] = m.embedding_dim;
  meta["classifier"] = m.is_classifier();
  meta["config_hash"] = m.config_hash;
  torch::serialize::OutputArchive ar;
  for (const auto& [name, t] : m.state()) ar.write(name, t.detach());
  std::ostringstream blob;
  ar.save_to(blob);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint: " + path.string());
  out << kCheckpointMagic << '\n' << meta.dump() << '\n' << blob.str();
  if (!out) throw Error("failed writing checkpoint: " + path.string());
}

inline nlohmann::json read_checkpoint_meta(std::istream& in, const std::filesystem::path& path) {
  std::string magic, meta;
  if (!std::getline(in, magic) || magic != kCheckpointMagic) throw Error("not a checkpoint file: " + path.string());
  if (!std::getline(in, meta)) throw Error("truncated checkpoint: " + path.string());
  return nlohmann::json::parse(meta);
}

inline EncoderModel load_checkpoint(const std::filesystem::path& path, nlohmann::json* meta_out = nullptr) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("checkpoint not found: " + path.string());
  const auto meta = read_checkpoint_meta(in, path);
  std::stringstream blob;
  blob << in.rdbuf();
  auto m = EncoderModel::create(parse_architecture(meta.at("architecture").get<std::string>()), 0,
                                meta.value("classifier", false));
  m.init = parse_init_kind(meta.value("init", "scratch"));
  m.config_hash = meta.value("config_hash", "");
  if (meta.at("embedding_dim").get<std::int64_t>() != m.embedding_dim)
    throw Error("checkpoint embedding_dim does not match its architecture");
  torch::serialize::InputArchive ar;
  ar.load_from(blob);
  torch::NoGradGuard no_grad;
  for (auto& [name, t] : m.state()) {
    torch::Tensor v;
    if (!ar.try_read(name, v)) throw Error("checkpoint is missing tensor " + name);
    if (v.sizes() != t.sizes()) throw Error("checkpoint tensor has the wrong shape: " + name);
    t.copy_(v);
  }
  if (meta_out) *meta_out = meta;
  return m;
}

/// Initializes the backbone of `m` from another checkpoint of the same architecture.
inline void load_pretrained(EncoderModel& m, const std::filesystem::path& path) {
  const auto src = load_checkpoint(path);
  if (src.architecture != m.architecture) throw Error("pretrained weights are for a different architecture");
  torch::NoGradGuard no_grad;
  const auto from = src.state();
  auto to = m.state();
  for (std::size_t i = 0; i < to.size(); ++i)
    if (to[i].first.rfind("net.", 0) == 0) to[i].second.copy_(from[i].second);
  m.init = InitKind::pretrained;
}

// ---------------------------------------------------------------------------
// Training configuration

enum class TrainMode { contrastive, classifier };
enum class TrainData { full, originals_only };
enum class Selection { automatic, fscore, originals_loss };

inline std::string_view to_string(TrainMode m) { return m == TrainMode::contrastive ? "contrastive" : "classifier"; }
inline std::string_view to_string(TrainData d) { return d == TrainData::full ? "full" : "originals_only"; }
inline std::string_view to_string(Selection s) {
  switch (s) {
    case Selection::automatic: return "auto";
    case Selection::fscore: return "fscore";
    case Selection::originals_loss: return "originals_loss";
  }
  return "?";
}

inline TrainMode parse_train_mode(std::string_view s) {
  if (s == "contrastive") return TrainMode::contrastive;
  if (s == "classifier") return TrainMode::classifier;
  throw Error("unknown training mode: " + std::string(s));
}
inline TrainData parse_train_data(std::string_view s) {
  if (s == "full") return TrainData::full;
  if (s == "originals_only") return TrainData::originals_only;
  throw Error("unknown train_data: " + std::string(s));
}
inline Selection parse_selection(std::string_view s) {
  if (s == "auto") return Selection::automatic;
  if (s == "fscore") return Selection::fscore;
  if (s == "originals_loss") return Selection::originals_loss;
  throw Error("unknown selection mode: " + std::string(s));
}

struct TrainConfig {
  Architecture architecture = Architecture::mobilenetv3_small050;
  double margin = 1.0;
  int max_epochs = 20;
  int batch_size = 32;
  std::uint64_t seed = 0;
  TrainMode mode = TrainMode::contrastive;
  TrainData train_data = TrainData::full;
  Selection selection = Selection::automatic;
  // AdamW; the defaults are the optimizer's standard ones.
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-2;
  int classifier_frames_per_clip = 3;
  std::string pretrained_weights;  // optional checkpoint to initialize the backbone from
  AugConfig aug;
};

inline void validate(const TrainConfig& c) {
  if (!(c.margin >= 0)) throw Error("margin must be non-negative");
  if (c.max_epochs < 1) throw Error("max_epochs must be at least 1");
  if (c.batch_size < 1) throw Error("batch_size must be at least 1");
  if (!(c.lr > 0)) throw Error("learning rate must be positive");
  if (c.classifier_frames_per_clip < 1) throw Error("classifier_frames_per_clip must be at least 1");
  validate(c.aug);
}

inline nlohmann::json to_json(const TrainConfig& c) {
  return {{"architecture", to_string(c.architecture)},
          {"margin", c.margin},
          {"max_epochs", c.max_epochs},
          {"batch_size", c.batch_size},
          {"seed", c.seed},
          {"mode", to_string(c.mode)},
          {"train_data", to_string(c.train_data)},
          {"selection", to_string(c.selection)},
          {"lr", c.lr},
          {"betas", {c.beta1, c.beta2}},
          {"eps", c.eps},
          {"weight_decay", c.weight_decay},
          {"classifier_frames_per_clip", c.classifier_frames_per_clip},
          {"pretrained_weights", c.pretrained_weights},
          {"aug", to_json(c.aug)}};
}

inline TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  if (j.contains("architecture")) c.architecture = parse_architecture(j["architecture"].get<std::string>());
  c.margin = j.value("margin", c.margin);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.seed = j.value("seed", c.seed);
  if (j.contains("mode")) c.mode = parse_train_mode(j["mode"].get<std::string>());
  if (j.contains("train_data")) c.train_data = parse_train_data(j["train_data"].get<std::string>());
  if (j.contains("selection")) c.selection = parse_selection(j["selection"].get<std::string>());
  c.lr = j.value("lr", c.lr);
  if (j.contains("betas")) {
    c.beta1 = j["betas"].at(0);
    c.beta2 = j["betas"].at(1);
  }
  c.eps = j.value("eps", c.eps);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.classifier_frames_per_clip = j.value("classifier_frames_per_clip", c.classifier_frames_per_clip);
  c.pretrained_weights = j.value("pretrained_weights", c.pretrained_weights);
  if (j.contains("aug")) c.aug = aug_config_from_json(j["aug"]);
  validate(c);
  return c;
}

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double criterion = 0.0;
  std::size_t batches = 0;
  std::size_t original_triplets = 0;
  std::size_t attack_triplets = 0;
};

inline nlohmann::json to_json(const EpochRecord& e) {
  return {{"epoch", e.epoch},
          {"train_loss", e.train_loss},
          {"criterion", e.criterion},
          {"batches", e.batches},
          {"original_triplets", e.original_triplets},
          {"attack_triplets", e.attack_triplets}};
}

struct TrainResult {
  EncoderModel model;
  std::vector<EpochRecord> history;
  int selected_epoch = 0;
  Selection selection = Selection::fscore;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// ---------------------------------------------------------------------------
// Validation

/// Network inputs of a clip set, computed once and reused across epochs.
struct ValidationInputs {
  std::vector<std::string> clip_ids;
  std::vector<Label> labels;
  std::vector<std::vector<PlanarImage>> frames;

  static ValidationInputs build(std::span<const PreparedClip> clips, const AugConfig& aug) {
    ValidationInputs v;
    for (const auto& c : clips) {
      v.clip_ids.push_back(c.record.clip_id);
      v.labels.push_back(c.record.label);
      v.frames.push_back(clip_inputs(c, aug));
    }
    return v;
  }

  [[nodiscard]] bool has_both_labels() const {
    const bool att = std::find(labels.begin(), labels.end(), Label::attack) != labels.end();
    const bool orig = std::find(labels.begin(), labels.end(), Label::original) != labels.end();
    return att && orig;
  }
};

/// Whole-clip (or cumulative) decision scores of every clip: the embedding score, or the
/// mean attack probability for a classifier.
inline std::vector<LabeledScore> clip_scores(const EncoderModel& model, const ValidationInputs& v,
                                             Strategy strategy = Strategy::whole,
                                             int min_buffer = kDefaultMinBuffer) {
  std::vector<LabeledScore> out;
  for (std::size_t i = 0; i < v.frames.size(); ++i) {
    double s;
    if (model.is_classifier()) {
      s = mean_probability(model.attack_probabilities(v.frames[i]));
    } else {
      const auto e = model.embed(v.frames[i]);
      s = strategy == Strategy::whole ? video_score(e) : cumulative_score(e, min_buffer);
    }
    out.push_back({s, v.labels[i]});
  }
  return out;
}

/// Higher is better in both modes: the best calibrated validation F-score, or the negated
/// mean triplet loss over deterministic (t, t, t + 1) triplets of original clips.
inline double validation_criterion(const EncoderModel& model, const ValidationInputs& v, Selection mode,
                                   double margin = 1.0) {
  if (v.frames.empty()) throw Error("empty validation set");
  if (mode == Selection::fscore) {
    if (!v.has_both_labels()) throw Error("fscore criterion needs both original and attack validation clips");
    const auto polarity = model.is_classifier() ? Polarity::high_is_attack : Polarity::low_is_attack;
    return calibrate_threshold(clip_scores(model, v), polarity).validation_fscore;
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < v.frames.size(); ++i) {
    if (v.labels[i] != Label::original || v.frames[i].size() < 2) continue;
    const auto e = model.embed(v.frames[i]);
    std::vector<double> a, n;
    for (std::size_t t = 0; t + 1 < e.size(); ++t) {
      a.assign(e[t].begin(), e[t].end());
      n.assign(e[t + 1].begin(), e[t + 1].end());
      sum += triplet_loss(a, a, n, margin);
      ++count;
    }
  }
  if (count == 0) throw Error("originals_loss criterion needs an original validation clip with 2+ frames");
  return -sum / static_cast<double>(count);
}

inline double validation_criterion(const EncoderModel& model, std::span<const PreparedClip> val, Selection mode,
                                   const AugConfig& aug = {}, double margin = 1.0) {
  return validation_criterion(model, ValidationInputs::build(val, aug), mode, margin);
}

// ---------------------------------------------------------------------------
// Training

namespace detail {

using Snapshot = std::vector<torch::Tensor>;

inline Snapshot snapshot(const EncoderModel& m) {
  Snapshot s;
  for (const auto& [name, t] : m.state()) s.push_back(t.detach().clone());
  return s;
}

inline void restore(EncoderModel& m, const Snapshot& s) {
  torch::NoGradGuard no_grad;
  auto st = m.state();
  for (std::size_t i = 0; i < st.size(); ++i) st[i].second.copy_(s[i]);
}

inline EncoderModel init_model(const TrainConfig& cfg, bool with_head) {
  auto model = EncoderModel::create(cfg.architecture, derive_seed(cfg.seed, 0xB0B0u), with_head);
  if (!cfg.pretrained_weights.empty()) load_pretrained(model, cfg.pretrained_weights);
  return model;
}

inline torch::optim::AdamW make_optimizer(const EncoderModel& m, const TrainConfig& cfg) {
  return torch::optim::AdamW(m.parameters(), torch::optim::AdamWOptions(cfg.lr)
                                                 .betas({cfg.beta1, cfg.beta2})
                                                 .eps(cfg.eps)
                                                 .weight_decay(cfg.weight_decay));
}

inline Selection resolve_selection(const TrainConfig& cfg, const ValidationInputs& v) {
  if (cfg.selection != Selection::automatic) return cfg.selection;
  if (cfg.mode == TrainMode::classifier) return Selection::fscore;
  if (cfg.train_data == TrainData::originals_only || !v.has_both_labels()) return Selection::originals_loss;
  return Selection::fscore;
}

inline void check_finite(const torch::Tensor& loss, int epoch, std::size_t batch) {
  if (!std::isfinite(loss.item<double>()))
    throw Error("training diverged: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                std::to_string(batch));
}

}  // namespace detail

/// Triplet training. Each epoch ends with the validation criterion; the returned model
/// holds the weights of the best epoch (later epochs win ties).
inline TrainResult train(std::span<const PreparedClip> train_set, std::span<const PreparedClip> val_set,
                         const TrainConfig& cfg, const EpochCallback& on_epoch = {}) {
  validate(cfg);
  if (cfg.mode != TrainMode::contrastive) throw Error("train() expects contrastive mode; use train_classifier");
  if (train_set.empty()) throw Error("empty training set");
  if (val_set.empty()) throw Error("empty validation set");
  std::vector<PreparedClip> filtered;
  if (cfg.train_data == TrainData::originals_only) {
    for (const auto& c : train_set)
      if (c.record.label == Label::original) filtered.push_back(c);
    if (filtered.empty()) throw Error("originals_only training set holds no original clip");
    train_set = filtered;
  }
  const auto val = ValidationInputs::build(val_set, cfg.aug);
  TrainResult result;
  result.selection = detail::resolve_selection(cfg, val);
  result.model = detail::init_model(cfg, false);
  auto& model = result.model;
  auto opt = detail::make_optimizer(model, cfg);

  double best = -std::numeric_limits<double>::infinity();
  detail::Snapshot best_state;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    EpochStream stream(train_set, cfg.aug, static_cast<std::size_t>(cfg.batch_size),
                       derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch)));
    EpochRecord rec;
    rec.epoch = epoch;
    double loss_sum = 0.0;
    std::size_t seen = 0;
    model.set_training(true);
    while (auto batch = stream.next()) {
      std::vector<PlanarImage> images;
      images.reserve(batch->size() * 3);
      for (const auto& t : *batch) images.push_back(t.anchor);
      for (const auto& t : *batch) images.push_back(t.positive);
      for (const auto& t : *batch) images.push_back(t.negative);
      for (const auto& t : *batch) ++(t.source_label == Label::original ? rec.original_triplets : rec.attack_triplets);
      const auto b = static_cast<std::int64_t>(batch->size());
      const auto emb = model.forward(to_tensor(images));
      const auto loss = triplet_loss(emb.slice(0, 0, b), emb.slice(0, b, 2 * b), emb.slice(0, 2 * b, 3 * b),
                                     cfg.margin);
      detail::check_finite(loss, epoch, rec.batches);
      opt.zero_grad();
      loss.backward();
      opt.step();
      loss_sum += loss.item<double>() * static_cast<double>(b);
      seen += batch->size();
      ++rec.batches;
    }
    model.set_training(false);
    rec.train_loss = loss_sum / static_cast<double>(seen);
    rec.criterion = validation_criterion(model, val, result.selection, cfg.margin);
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (rec.criterion >= best) {
      best = rec.criterion;
      best_state = detail::snapshot(model);
      result.selected_epoch = epoch;
    }
  }
  detail::restore(model, best_state);
  return result;
}

/// Frame-classifier ablation: a two-way head on the backbone trained with cross-entropy on
/// augmented frames of both labels; selection by validation F-score of the mean probability.
inline TrainResult train_classifier(std::span<const PreparedClip> train_set, std::span<const PreparedClip> val_set,
                                    TrainConfig cfg, const EpochCallback& on_epoch = {}) {
  cfg.mode = TrainMode::classifier;
  validate(cfg);
  bool has_att = false, has_orig = false;
  for (const auto& c : train_set) (c.record.label == Label::attack ? has_att : has_orig) = true;
  if (!has_att || !has_orig) throw Error("classifier training needs both original and attack clips");
  if (val_set.empty()) throw Error("empty validation set");
  const auto val = ValidationInputs::build(val_set, cfg.aug);
  TrainResult result;
  result.selection = Selection::fscore;
  result.model = detail::init_model(cfg, true);
  auto& model = result.model;
  auto opt = detail::make_optimizer(model, cfg);

  struct Sample { std::size_t clip; int frame; };
  double best = -std::numeric_limits<double>::infinity();
  detail::Snapshot best_state;
  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto epoch_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(epoch));
    Rng rng(derive_seed(epoch_seed, 0));
    std::vector<Sample> samples;
    for (std::size_t i = 0; i < train_set.size(); ++i) {
      if (train_set[i].rois.empty()) continue;
      for (int k = 0; k < cfg.classifier_frames_per_clip; ++k)
        samples.push_back({i, static_cast<int>(uniform_index(rng, train_set[i].rois.size()))});
    }
    shuffle(samples, rng);
    EpochRecord rec;
    rec.epoch = epoch;
    double loss_sum = 0.0;
    model.set_training(true);
    for (std::size_t start = 0; start < samples.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const auto end = std::min(samples.size(), start + static_cast<std::size_t>(cfg.batch_size));
      std::vector<PlanarImage> images;
      std::vector<std::int64_t> targets;
      for (std::size_t s = start; s < end; ++s) {
        Rng item_rng(derive_seed(epoch_seed, s + 1));
        const auto& clip = train_set[samples[s].clip];
        const auto& roi = clip.rois[static_cast<std::size_t>(samples[s].frame)];
        images.push_back(cfg.aug.enabled
                             ? augment_image(apply_geometric(roi, draw_geometric(cfg.aug, item_rng)), cfg.aug, item_rng)
                             : eval_transform(roi, cfg.aug));
        targets.push_back(clip.record.label == Label::attack ? 1 : 0);
      }
      const auto logits = model.head(model.forward(to_tensor(images)));
      const auto loss = torch::nn::functional::cross_entropy(logits, torch::tensor(targets, torch::kLong));
      detail::check_finite(loss, epoch, rec.batches);
      opt.zero_grad();
      loss.backward();
      opt.step();
      loss_sum += loss.item<double>() * static_cast<double>(end - start);
      ++rec.batches;
    }
    model.set_training(false);
    rec.train_loss = loss_sum / static_cast<double>(samples.size());
    rec.criterion = validation_criterion(model, val, Selection::fscore, cfg.margin);
    result.history.push_back(rec);
    if (on_epoch) on_epoch(rec);
    if (rec.criterion >= best) {
      best = rec.criterion;
      best_state = detail::snapshot(model);
      result.selected_epoch = epoch;
    }
  }
  detail::restore(model, best_state);
  return result;
}

/// Fraction of frames whose arg-max class matches the clip label.
inline double frame_accuracy(const EncoderModel& model, std::span<const PreparedClip> clips, const AugConfig& aug) {
  std::size_t correct = 0, total = 0;
  for (const auto& c : clips) {
    const auto probs = model.attack_probabilities(clip_inputs(c, aug));
    for (double p : probs) {
      correct += (p >= 0.5) == (c.record.label == Label::attack);
      ++total;
    }
  }
  if (total == 0) throw Error("no frames to score");
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace holoverify
