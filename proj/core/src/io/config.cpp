// Copyright 2026 The FSHNN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fshnn/io/config.hpp"

#include <set>
#include <string>

#include "fshnn/error.hpp"
#include "fshnn/io/records.hpp"
#include "json.hpp"

namespace fshnn {

namespace {

using nlohmann::json;

// Walks one JSON object, remembering which keys were read so leftovers can
// be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw FormatError(path_ + ": expected an object");
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = get(key)) {
      if (!v->is_number()) throw FormatError(where(key) + " must be a number");
      out = v->get<double>();
    }
  }

  template <typename U>
  void unsigned_int(const std::string& key, U& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_unsigned()) {
        throw FormatError(where(key) + " must be a non-negative integer");
      }
      out = static_cast<U>(v->get<std::uint64_t>());
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = get(key)) {
      if (!v->is_boolean()) throw FormatError(where(key) + " must be a boolean");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = get(key)) {
      if (!v->is_string()) throw FormatError(where(key) + " must be a string");
      out = v->get<std::string>();
    }
  }

  std::string where(const std::string& key) const { return path_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!seen_.count(key)) throw FormatError("unknown key " + where(key));
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

json lif_to_json(const LifParams& p) {
  return {{"r_resistance", p.r_resistance},
          {"tau_m", p.tau_m},
          {"v_threshold", p.v_threshold},
          {"v_reset", p.v_reset},
          {"dt", p.dt},
          {"reset", p.reset == ResetMode::kSubtract ? "subtract" : "to_value"}};
}

LifParams lif_from_json(const json& j, const std::string& path, LifParams p) {
  ObjectReader r(j, path);
  r.number("r_resistance", p.r_resistance);
  r.number("tau_m", p.tau_m);
  r.number("v_threshold", p.v_threshold);
  r.number("v_reset", p.v_reset);
  r.number("dt", p.dt);
  std::string reset = p.reset == ResetMode::kSubtract ? "subtract" : "to_value";
  r.string("reset", reset);
  if (reset == "subtract") {
    p.reset = ResetMode::kSubtract;
  } else if (reset == "to_value") {
    p.reset = ResetMode::kToValue;
  } else {
    throw FormatError(r.where("reset") + " must be \"to_value\" or \"subtract\"");
  }
  r.finish();
  return p;
}

json layer_to_json(const LayerSpec& l) {
  json j = {{"kind", std::string(to_string(l.kind))}};
  switch (l.kind) {
    case LayerKind::kConv2d:
      j["units"] = l.units;
      j["kernel"] = l.kernel;
      j["stride"] = l.stride;
      j["padding"] = l.padding;
      break;
    case LayerKind::kFc:
      j["units"] = l.units;
      break;
    case LayerKind::kAvgPool:
    case LayerKind::kSpikeMaxPool:
    case LayerKind::kMaxPool:
      j["window"] = l.window;
      break;
    case LayerKind::kDropout:
      j["rate"] = l.rate;
      break;
  }
  j["lif"] = l.lif ? lif_to_json(*l.lif) : json(false);
  j["activation"] = std::string(to_string(l.activation));
  j["tag"] = std::string(to_string(l.tag));
  j["inhibition"] = l.inhibition;
  if (l.has_weights()) j["bias"] = l.has_bias();
  return j;
}

LayerSpec layer_from_json(const json& j, const std::string& path,
                          const LifParams& default_lif) {
  ObjectReader r(j, path);
  std::string kind_name;
  r.string("kind", kind_name);
  if (kind_name.empty()) throw FormatError(path + ".kind is required");
  LayerSpec l;
  try {
    l.kind = parse_layer_kind(kind_name);
  } catch (const Error& e) {
    throw FormatError(r.where("kind") + ": " + e.what());
  }
  r.unsigned_int("units", l.units);
  r.unsigned_int("kernel", l.kernel);
  r.unsigned_int("stride", l.stride);
  r.unsigned_int("padding", l.padding);
  r.unsigned_int("window", l.window);
  r.number("rate", l.rate);
  if (const json* v = r.get("lif")) {
    if (v->is_boolean()) {
      if (v->get<bool>()) l.lif = default_lif;
    } else if (v->is_object()) {
      l.lif = lif_from_json(*v, r.where("lif"), default_lif);
    } else {
      throw FormatError(r.where("lif") + " must be a boolean or an object");
    }
  }
  std::string act = "none", tag = "frozen";
  r.string("activation", act);
  r.string("tag", tag);
  try {
    l.activation = parse_activation(act);
    l.tag = parse_learning_tag(tag);
  } catch (const Error& e) {
    throw FormatError(path + ": " + e.what());
  }
  r.boolean("inhibition", l.inhibition);
  bool bias = false;
  r.boolean("bias", bias);
  if (bias) {
    if (!l.has_weights()) throw FormatError(r.where("bias") + " only applies to conv2d/fc");
    l.bias = Tensor({1});
  }
  r.finish();
  return l;
}

json network_json(const NetworkSpec& net) {
  json layers = json::array();
  for (const auto& l : net.layers) layers.push_back(layer_to_json(l));
  return {{"input_shape", net.input_shape}, {"layers", layers}};
}

NetworkSpec network_from(const json& j, const std::string& path,
                         const LifParams& default_lif) {
  ObjectReader r(j, path);
  NetworkSpec net;
  const json* shape = r.get("input_shape");
  if (!shape || !shape->is_array() || shape->empty()) {
    throw FormatError(path + ".input_shape must be a non-empty array");
  }
  for (const auto& d : *shape) {
    if (!d.is_number_unsigned() || d.get<std::uint64_t>() == 0) {
      throw FormatError(path + ".input_shape entries must be positive integers");
    }
    net.input_shape.push_back(d.get<std::size_t>());
  }
  const json* layers = r.get("layers");
  if (!layers || !layers->is_array() || layers->empty()) {
    throw FormatError(path + ".layers must be a non-empty array");
  }
  for (std::size_t i = 0; i < layers->size(); ++i) {
    net.layers.push_back(layer_from_json((*layers)[i],
                                         path + ".layers[" + std::to_string(i) + "]",
                                         default_lif));
  }
  r.finish();
  net.allocate_parameters();
  return net;
}

json config_to_json(const ExperimentConfig& c) {
  return {
      {"seed", c.seed},
      {"data",
       {{"n_per_class", c.data.n_per_class},
        {"size", c.data.size},
        {"noise_sigma", c.data.noise_sigma}}},
      {"lif", lif_to_json(c.lif)},
      {"encoder", {{"max_rate", c.encoder.max_rate}, {"steps", c.encoder.steps}}},
      {"stdp",
       {{"a_ltp", c.stdp.rule.a_ltp},
        {"a_ltd", c.stdp.rule.a_ltd},
        {"w_lb", c.stdp.rule.w_lb},
        {"w_ub", c.stdp.rule.w_ub},
        {"samples_per_layer", c.stdp.samples_per_layer},
        {"threshold_scale", c.stdp.threshold_scale},
        {"init_low", c.stdp.init_low},
        {"init_high", c.stdp.init_high}}},
      {"stdb",
       {{"alpha", c.stdb.surrogate.alpha},
        {"beta", c.stdb.surrogate.beta},
        {"epochs", c.stdb.epochs},
        {"batch_size", c.stdb.optimizer.batch_size},
        {"momentum", c.stdb.optimizer.momentum},
        {"weight_decay", c.stdb.optimizer.weight_decay},
        {"learning_rate", c.stdb.optimizer.learning_rate},
        {"loss", c.stdb.loss == LossKind::kFocal ? "focal" : "cross_entropy"},
        {"focal_gamma", c.stdb.focal_gamma},
        {"target_accuracy", c.stdb.target_accuracy}}},
      {"init_gain", c.init_gain},
      {"network", network_json(c.network)},
  };
}

void validate_config(const ExperimentConfig& c) {
  c.lif.validate();
  c.encoder.validate();
  c.stdp.rule.validate();
  c.stdb.surrogate.validate();
  c.stdb.optimizer.validate();
  if (c.data.size < 8) throw ParameterError("data.size must be >= 8");
  if (c.data.n_per_class < 1) throw ParameterError("data.n_per_class must be >= 1");
  if (!(c.data.noise_sigma >= 0.0)) throw ParameterError("data.noise_sigma must be >= 0");
  if (!(c.stdp.threshold_scale > 0.0 && c.stdp.threshold_scale <= 1.0)) {
    throw ParameterError("stdp.threshold_scale must lie in (0, 1]");
  }
  if (!(c.stdp.init_low >= c.stdp.rule.w_lb && c.stdp.init_high <= c.stdp.rule.w_ub &&
        c.stdp.init_low <= c.stdp.init_high)) {
    throw ParameterError("stdp init range must lie inside the weight bounds");
  }
  if (c.stdb.epochs < 1) throw ParameterError("stdb.epochs must be >= 1");
  if (!(c.stdb.focal_gamma >= 0.0)) throw ParameterError("stdb.focal_gamma must be >= 0");
  if (!(c.init_gain > 0.0)) throw ParameterError("init_gain must be positive");
  c.network.validate_snn();
}

}  // namespace

ExperimentConfig default_experiment_config() {
  ExperimentConfig c;
  // Output potentials sum over every timestep, so gradients scale with T;
  // small output weights and a small step keep the first epoch stable.
  c.stdb.optimizer.learning_rate = 1e-4;
  c.init_gain = 0.02;
  c.network.input_shape = {1, 16, 16};
  c.network.layers.push_back(
      LayerSpec::conv2d(4, 5).with_lif(c.lif).with_tag(LearningTag::kStdp));
  c.network.layers.push_back(LayerSpec::spike_maxpool(2));
  c.network.layers.push_back(
      LayerSpec::fc(32).with_lif(c.lif).with_tag(LearningTag::kBackprop));
  c.network.layers.push_back(LayerSpec::fc(3).with_tag(LearningTag::kBackprop));
  c.network.allocate_parameters();
  c.stdb.encoder = c.encoder;
  return c;
}

ExperimentConfig parse_experiment_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c = default_experiment_config();
  ObjectReader r(root, "$");
  r.unsigned_int("seed", c.seed);
  if (const json* v = r.get("data")) {
    ObjectReader d(*v, "$.data");
    d.unsigned_int("n_per_class", c.data.n_per_class);
    d.unsigned_int("size", c.data.size);
    d.number("noise_sigma", c.data.noise_sigma);
    d.finish();
  }
  if (const json* v = r.get("lif")) c.lif = lif_from_json(*v, "$.lif", c.lif);
  if (const json* v = r.get("encoder")) {
    ObjectReader e(*v, "$.encoder");
    e.number("max_rate", c.encoder.max_rate);
    e.unsigned_int("steps", c.encoder.steps);
    e.finish();
  }
  if (const json* v = r.get("stdp")) {
    ObjectReader s(*v, "$.stdp");
    s.number("a_ltp", c.stdp.rule.a_ltp);
    s.number("a_ltd", c.stdp.rule.a_ltd);
    s.number("w_lb", c.stdp.rule.w_lb);
    s.number("w_ub", c.stdp.rule.w_ub);
    s.unsigned_int("samples_per_layer", c.stdp.samples_per_layer);
    s.number("threshold_scale", c.stdp.threshold_scale);
    s.number("init_low", c.stdp.init_low);
    s.number("init_high", c.stdp.init_high);
    s.finish();
  }
  if (const json* v = r.get("stdb")) {
    ObjectReader s(*v, "$.stdb");
    s.number("alpha", c.stdb.surrogate.alpha);
    s.number("beta", c.stdb.surrogate.beta);
    s.unsigned_int("timesteps", c.encoder.steps);
    s.unsigned_int("epochs", c.stdb.epochs);
    s.unsigned_int("batch_size", c.stdb.optimizer.batch_size);
    s.number("momentum", c.stdb.optimizer.momentum);
    s.number("weight_decay", c.stdb.optimizer.weight_decay);
    s.number("learning_rate", c.stdb.optimizer.learning_rate);
    std::string loss = c.stdb.loss == LossKind::kFocal ? "focal" : "cross_entropy";
    s.string("loss", loss);
    if (loss == "focal") {
      c.stdb.loss = LossKind::kFocal;
    } else if (loss == "cross_entropy") {
      c.stdb.loss = LossKind::kCrossEntropy;
    } else {
      throw FormatError("$.stdb.loss must be \"cross_entropy\" or \"focal\"");
    }
    s.number("focal_gamma", c.stdb.focal_gamma);
    s.number("target_accuracy", c.stdb.target_accuracy);
    s.finish();
  }
  r.number("init_gain", c.init_gain);
  if (const json* v = r.get("network")) c.network = network_from(*v, "$.network", c.lif);
  r.finish();
  c.stdb.encoder = c.encoder;
  validate_config(c);
  return c;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(read_text(path));
}

std::string experiment_config_to_json(const ExperimentConfig& config) {
  return config_to_json(config).dump(2);
}

std::string network_to_json(const NetworkSpec& net) { return network_json(net).dump(); }

NetworkSpec network_from_json(const std::string& text, const LifParams& default_lif) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("network is not valid JSON: ") + e.what());
  }
  return network_from(j, "$", default_lif);
}

Checkpoint network_to_checkpoint(const NetworkSpec& net,
                                 const std::string& provenance_json) {
  Checkpoint ckpt;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    if (!layer.has_weights()) continue;
    const std::string prefix = "layer" + std::to_string(l);
    ckpt.entries.push_back({prefix + ".weights", layer.weights});
    if (layer.has_bias()) ckpt.entries.push_back({prefix + ".bias", layer.bias});
  }
  json provenance;
  try {
    provenance = json::parse(provenance_json);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("provenance is not valid JSON: ") + e.what());
  }
  ckpt.metadata = json{{"network", network_json(net)}, {"provenance", provenance}}.dump();
  return ckpt;
}

NetworkSpec network_from_checkpoint(const Checkpoint& ckpt) {
  if (!ckpt.crc_mismatches.empty()) {
    throw FormatError("checkpoint CRC32 mismatch in entry '" +
                      ckpt.crc_mismatches.front() + "'");
  }
  json meta;
  try {
    meta = json::parse(ckpt.metadata);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("checkpoint metadata is not valid JSON: ") + e.what());
  }
  if (!meta.is_object() || !meta.contains("network")) {
    throw FormatError("checkpoint metadata has no network description");
  }
  NetworkSpec net = network_from(meta.at("network"), "$.network", LifParams{});
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    auto& layer = net.layers[l];
    if (!layer.has_weights()) continue;
    const std::string prefix = "layer" + std::to_string(l);
    const Tensor* w = ckpt.find(prefix + ".weights");
    if (!w || w->shape() != layer.weights.shape()) {
      throw FormatError("checkpoint entry " + prefix + ".weights missing or mis-shaped");
    }
    layer.weights = *w;
    if (layer.has_bias()) {
      const Tensor* b = ckpt.find(prefix + ".bias");
      if (!b || b->shape() != layer.bias.shape()) {
        throw FormatError("checkpoint entry " + prefix + ".bias missing or mis-shaped");
      }
      layer.bias = *b;
    }
  }
  return net;
}

}  // namespace fshnn
