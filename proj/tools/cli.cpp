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

#include "cli.hpp"

#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "experiments.hpp"
#include "fshnn/coding/coding.hpp"
#include "fshnn/conversion/conversion.hpp"
#include "fshnn/energy/energy.hpp"
#include "fshnn/error.hpp"
#include "fshnn/evaluation/evaluation.hpp"
#include "fshnn/io/checkpoint.hpp"
#include "fshnn/io/config.hpp"
#include "fshnn/io/idx.hpp"
#include "fshnn/io/records.hpp"
#include "fshnn/spiking/simulate.hpp"
#include "fshnn/stdb/stdb.hpp"
#include "fshnn/stdp/stdp.hpp"
#include "fshnn/tailindex/tailindex.hpp"
#include "json.hpp"

namespace fshnn::tools {

namespace {

using Json = nlohmann::ordered_json;

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool quiet = false;
};

struct Options {
  // Data files.
  std::string images;
  std::string labels;
  std::string model_in;
  std::string model_out;
  // gen-data.
  std::optional<std::size_t> n_per_class;
  std::optional<std::size_t> size;
  std::optional<double> noise;
  // convert.
  std::string norm_mode = "channel";
  std::size_t ann_epochs = 100;
  // eval-det / uncertainty.
  std::string dets;
  std::string gts;
  std::string metric = "map";
  std::size_t samples = 20;
  double rate = 0.2;
  // tail-index.
  std::string mode = "synthetic";
  double alpha = 2.0;
  std::size_t n = 0;
  std::size_t batch_size = 32;
  std::size_t passes = 4;
  std::size_t width = 64;
  // energy.
  std::optional<std::size_t> timesteps;
  std::optional<double> mac;
  std::optional<double> ac;
  bool int_constants = false;
};

struct Outcome {
  Json report;
  std::string summary;
};

struct Context {
  Globals globals;
  Options opt;
  ExperimentConfig config;
  std::uint64_t seed = 0;
};

std::string fmt(double v, int precision = 6) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw ParameterError(std::string("missing required flag ") + flag);
}

NetworkSpec load_model(const std::string& path) {
  return network_from_checkpoint(load_checkpoint(path));
}

void save_model(const std::string& path, const NetworkSpec& net, const Json& provenance) {
  save_checkpoint(path, network_to_checkpoint(net, provenance.dump()));
}

struct Data {
  std::vector<Tensor> images;
  std::vector<std::size_t> labels;
};

Data load_data(const Context& ctx, bool need_labels) {
  require(ctx.opt.images, "--images");
  Data d;
  d.images = as_single_channel(read_idx_images(ctx.opt.images));
  if (need_labels) {
    require(ctx.opt.labels, "--labels");
    d.labels = read_idx_labels(ctx.opt.labels);
    if (d.labels.size() != d.images.size()) {
      throw InputError("image and label files hold different sample counts");
    }
  }
  if (d.images.empty()) throw InputError("image file holds no samples");
  return d;
}

Json provenance(const Context& ctx, const char* command) {
  return {{"command", command}, {"seed", ctx.seed}};
}

Outcome cmd_gen_data(Context& ctx) {
  require(ctx.opt.images, "--images");
  require(ctx.opt.labels, "--labels");
  const auto& d = ctx.config.data;
  const std::size_t per_class = ctx.opt.n_per_class.value_or(d.n_per_class);
  const std::size_t size = ctx.opt.size.value_or(d.size);
  const double noise = ctx.opt.noise.value_or(d.noise_sigma);
  const auto ds = generate_synthetic_patterns(per_class, size, noise, ctx.seed);
  write_idx_images(ctx.opt.images, ds.images);
  write_idx_labels(ctx.opt.labels, ds.labels);
  Outcome o;
  o.report = {{"command", "gen-data"}, {"seed", ctx.seed},
              {"samples", ds.images.size()}, {"classes", 3},
              {"n_per_class", per_class}, {"size", size}, {"noise_sigma", noise}};
  o.summary = "wrote " + std::to_string(ds.images.size()) + " patterns (" +
              std::to_string(size) + "x" + std::to_string(size) + ")";
  return o;
}

Outcome cmd_train_stdp(Context& ctx) {
  require(ctx.opt.model_out, "--model-out");
  const Data data = load_data(ctx, false);
  Rng rng(ctx.seed, 1);
  NetworkSpec net = initialized_network(ctx.config, rng);
  const auto schedule = default_schedule(net, ctx.config.stdp.samples_per_layer,
                                         ctx.config.stdp.threshold_scale);
  const auto report = train_stdp_layerwise(net, data.images, schedule,
                                           ctx.config.encoder, ctx.config.stdp.rule, rng);
  Json stages = Json::array();
  for (const auto& s : report.stages) {
    stages.push_back({{"layer", s.layer}, {"samples", s.samples},
                      {"convergence", s.convergence}});
  }
  save_model(ctx.opt.model_out, net, provenance(ctx, "train-stdp"));
  Outcome o;
  o.report = {{"command", "train-stdp"}, {"seed", ctx.seed}, {"stages", stages}};
  o.summary = "trained " + std::to_string(report.stages.size()) + " STDP stage(s)";
  if (!report.stages.empty() && !report.stages.back().convergence.empty()) {
    o.summary += ", final convergence " + fmt(report.stages.back().convergence.back());
  }
  return o;
}

Outcome cmd_train_stdb(Context& ctx) {
  require(ctx.opt.model_out, "--model-out");
  const Data data = load_data(ctx, true);
  Rng rng(ctx.seed, 2);
  NetworkSpec net = ctx.opt.model_in.empty() ? initialized_network(ctx.config, rng)
                                             : load_model(ctx.opt.model_in);
  const auto report = train_stdb(net, data.images, data.labels, ctx.config.stdb, rng);
  Json epochs = Json::array();
  for (const auto& e : report.epochs) {
    epochs.push_back({{"loss", e.loss}, {"accuracy", e.accuracy}});
  }
  save_model(ctx.opt.model_out, net, provenance(ctx, "train-stdb"));
  const double acc = report.epochs.empty() ? 0.0 : report.epochs.back().accuracy;
  Outcome o;
  o.report = {{"command", "train-stdb"}, {"seed", ctx.seed},
              {"epochs_run", report.epochs.size()}, {"train_accuracy", acc},
              {"epochs", epochs}};
  o.summary = "STDB: " + std::to_string(report.epochs.size()) +
              " epoch(s), training accuracy " + fmt(acc, 4);
  return o;
}

Outcome cmd_convert(Context& ctx) {
  require(ctx.opt.model_out, "--model-out");
  const Data data = load_data(ctx, true);
  NormalizationMode mode;
  if (ctx.opt.norm_mode == "layer") {
    mode = NormalizationMode::kLayer;
  } else if (ctx.opt.norm_mode == "channel") {
    mode = NormalizationMode::kChannel;
  } else {
    throw ParameterError("--norm must be layer or channel");
  }
  Rng rng(ctx.seed, 3);
  AnnCheckpoint ann = ann_twin(ctx.config.network, rng);
  AnnTrainingParams train;
  train.epochs = ctx.opt.ann_epochs;
  const double ann_acc =
      train_ann_classifier(ann, data.images, data.labels, train, rng);
  const auto stats = collect_calibration_stats(ann, data.images);
  const NetworkSpec snn = convert_ann_to_snn(ann, stats, mode);
  const auto eval = evaluate_classification(snn, data.images, data.labels,
                                            ctx.config.encoder, rng);
  save_model(ctx.opt.model_out, snn, provenance(ctx, "convert"));
  Json thresholds = Json::array();
  for (const auto& l : snn.layers) {
    if (l.lif) thresholds.push_back(l.lif->v_threshold);
  }
  Outcome o;
  o.report = {{"command", "convert"}, {"seed", ctx.seed},
              {"normalization", ctx.opt.norm_mode}, {"ann_accuracy", ann_acc},
              {"snn_accuracy", eval.accuracy}, {"timesteps", ctx.config.encoder.steps},
              {"thresholds", thresholds}};
  o.summary = "ANN accuracy " + fmt(ann_acc, 4) + " -> SNN accuracy " +
              fmt(eval.accuracy, 4) + " (" + ctx.opt.norm_mode + " norm)";
  return o;
}

Outcome cmd_eval_class(Context& ctx) {
  require(ctx.opt.model_in, "--model-in");
  const Data data = load_data(ctx, true);
  const NetworkSpec net = load_model(ctx.opt.model_in);
  Rng rng(ctx.seed, 4);
  const auto result = evaluate_classification(net, data.images, data.labels,
                                              ctx.config.encoder, rng);
  const std::size_t classes = net.output_size();
  std::vector<std::vector<std::size_t>> confusion(classes,
                                                  std::vector<std::size_t>(classes, 0));
  for (std::size_t i = 0; i < data.labels.size(); ++i) {
    if (data.labels[i] < classes) ++confusion[data.labels[i]][result.predictions[i]];
  }
  Outcome o;
  o.report = {{"command", "eval-class"}, {"seed", ctx.seed},
              {"samples", data.images.size()}, {"accuracy", result.accuracy},
              {"confusion", confusion}};
  o.summary = "accuracy " + fmt(result.accuracy, 4) + " over " +
              std::to_string(data.images.size()) + " samples";
  return o;
}

// 0 selects mAP; otherwise the K of ar@K.
std::size_t parse_metric(const std::string& metric) {
  if (metric == "map") return 0;
  const std::string prefix = "ar@";
  if (metric.rfind(prefix, 0) != 0) {
    throw ParameterError("--metric must be map or ar@K");
  }
  std::size_t k = 0;
  try {
    std::size_t used = 0;
    k = std::stoul(metric.substr(prefix.size()), &used);
    if (used != metric.size() - prefix.size()) k = 0;
  } catch (const std::exception&) {
    k = 0;
  }
  if (k == 0) throw ParameterError("--metric ar@K needs a positive integer K");
  return k;
}

Outcome cmd_eval_det(Context& ctx) {
  require(ctx.opt.dets, "--dets");
  require(ctx.opt.gts, "--gts");
  const std::size_t k = parse_metric(ctx.opt.metric);
  const auto dets = read_detection_records(ctx.opt.dets);
  const auto gts = read_ground_truths(ctx.opt.gts);
  Outcome o;
  o.report = {{"command", "eval-det"}, {"metric", ctx.opt.metric},
              {"detections", dets.size()}, {"ground_truths", gts.size()}};
  if (k == 0) {
    const auto ap = average_precision(dets, gts, 0.5);
    Json per_class = Json::object();
    for (const auto& [c, v] : ap.per_class) per_class[std::to_string(c)] = v;
    o.report["map"] = ap.mean;
    o.report["ap_per_class"] = per_class;
    o.report["skipped_classes"] = ap.skipped_classes;
    o.summary = "mAP@0.5 = " + fmt(ap.mean);
    return o;
  }
  const double ar = average_recall_at_k(dets, gts, k);
  o.report["k"] = k;
  o.report["ar"] = ar;
  o.summary = "AR@" + std::to_string(k) + " = " + fmt(ar);
  return o;
}

Json uncertainty_json(const UncertaintyReport& u) {
  Json cmue = Json::object(), delta = Json::object();
  for (const auto& [c, v] : u.cmue) cmue[std::to_string(c)] = v;
  for (const auto& [c, v] : u.delta) delta[std::to_string(c)] = v;
  return {{"mcmue", u.mcmue}, {"cmue", cmue}, {"delta", delta}};
}

Outcome cmd_uncertainty(Context& ctx) {
  Outcome o;
  if (!ctx.opt.dets.empty()) {
    require(ctx.opt.gts, "--gts");
    const auto split = split_by_correctness(read_detection_records(ctx.opt.dets),
                                            read_ground_truths(ctx.opt.gts));
    const auto u = aggregate_mcmue(split);
    o.report = {{"command", "uncertainty"}, {"source", "detections"}};
    o.report.update(uncertainty_json(u));
    o.summary = "mCMUE = " + fmt(u.mcmue);
    return o;
  }
  require(ctx.opt.model_in, "--model-in");
  const Data data = load_data(ctx, true);
  const NetworkSpec net = with_mc_dropout(load_model(ctx.opt.model_in), ctx.opt.rate);
  Rng rng(ctx.seed, 5);
  std::map<long long, ClassUncertainty> split;
  std::size_t correct = 0;
  double mean_entropy = 0.0;
  for (std::size_t i = 0; i < data.images.size(); ++i) {
    const SpikeTrain input = poisson_encode(data.images[i], ctx.config.encoder, rng);
    const auto samples = mc_dropout_infer(net, input, ctx.opt.samples, ctx.opt.rate, rng);
    const auto summary = summarize_samples(samples);
    const std::size_t pred = argmax(summary.mean);
    const bool ok = pred == data.labels[i];
    correct += ok ? 1 : 0;
    mean_entropy += summary.entropy;
    auto& sets = split[static_cast<long long>(pred)];
    (ok ? sets.correct : sets.incorrect).push_back(summary.entropy);
  }
  const double n = static_cast<double>(data.images.size());
  o.report = {{"command", "uncertainty"}, {"source", "mc-dropout"},
              {"seed", ctx.seed}, {"samples_per_input", ctx.opt.samples},
              {"rate", ctx.opt.rate}, {"accuracy", correct / n},
              {"mean_entropy", mean_entropy / n}};
  try {
    const auto u = aggregate_mcmue(split);
    o.report.update(uncertainty_json(u));
    o.summary = "MC-dropout accuracy " + fmt(correct / n, 4) + ", mCMUE " + fmt(u.mcmue);
  } catch (const InputError&) {
    // Every class was either always right or always wrong.
    o.report["mcmue"] = nullptr;
    o.summary = "MC-dropout accuracy " + fmt(correct / n, 4) +
                ", mCMUE undefined (no class has both correct and incorrect samples)";
  }
  return o;
}

Json estimate_json(const TailIndexEstimate& e) {
  return {{"alpha_hat", e.alpha_hat}, {"K", e.K}, {"K1", e.K1}, {"K2", e.K2},
          {"dropped_zeros", e.dropped_zeros}, {"n_noise_coordinates", e.n_noise_coordinates},
          {"out_of_range", e.out_of_range}};
}

Outcome cmd_tail_index(Context& ctx) {
  const auto& mode = ctx.opt.mode;
  TailIndexEstimate est;
  Json extra = Json::object();
  if (mode == "synthetic") {
    const std::size_t n = ctx.opt.n ? ctx.opt.n : 40000;
    Rng rng(ctx.seed, 6);
    const auto x = sample_alpha_stable(ctx.opt.alpha, 1.0, n, rng);
    est = estimate_tail_index(x);
    extra["alpha"] = ctx.opt.alpha;
  } else if (mode == "sgd") {
    const std::size_t n = ctx.opt.n ? ctx.opt.n : 256;
    est = sgd_noise_run(ctx.config, n, ctx.opt.batch_size, ctx.opt.passes,
                        ctx.opt.width, ctx.seed).estimate;
  } else if (mode == "stdp") {
    const std::size_t n = ctx.opt.n ? ctx.opt.n : 256;
    est = stdp_noise_run(ctx.config, n, ctx.opt.batch_size, ctx.opt.passes, ctx.seed)
              .estimate;
  } else if (mode == "ou") {
    OuProcessSpec spec;
    spec.log_density_gradient = [](double theta) { return -theta; };
    spec.steps = ctx.opt.n ? ctx.opt.n : 100000;
    Rng rng(ctx.seed, 7);
    const auto path = simulate_ou_sampling(spec, 0.0, rng);
    std::vector<double> increments;
    for (std::size_t i = 1; i < path.size(); ++i) increments.push_back(path[i] - path[i - 1]);
    est = estimate_tail_index(increments);
    double mean = 0.0, sq = 0.0;
    for (const double v : path) mean += v;
    mean /= static_cast<double>(path.size());
    for (const double v : path) sq += (v - mean) * (v - mean);
    extra["stationary_variance"] = sq / static_cast<double>(path.size());
    extra["temperature"] = spec.temperature;
  } else {
    throw ParameterError("--mode must be sgd, stdp, synthetic or ou");
  }
  Outcome o;
  o.report = estimate_json(est);
  o.report["mode"] = mode;
  o.report["seed"] = ctx.seed;
  o.report.update(extra);
  o.summary = "tail index (" + mode + "): alpha_hat = " + fmt(est.alpha_hat) +
              " (K=" + std::to_string(est.K) + ", K1=" + std::to_string(est.K1) + ")";
  return o;
}

Outcome cmd_energy(Context& ctx) {
  const NetworkSpec net = ctx.opt.model_in.empty() ? ctx.config.network
                                                   : load_model(ctx.opt.model_in);
  const std::size_t T = ctx.opt.timesteps.value_or(ctx.config.encoder.steps);
  const EnergyConstants constants =
      ctx.opt.int_constants ? EnergyConstants::int32() : EnergyConstants::float32();
  OpCount mac = count_mac_flops(net, net.input_shape);
  OpCount ac = count_ac_flops(net, net.input_shape);
  std::string mode = "structural";
  if (ctx.opt.mac || ctx.opt.ac) {
    if (!ctx.opt.mac || !ctx.opt.ac) throw ParameterError("--mac and --ac go together");
    if (!(*ctx.opt.mac >= 0.0 && *ctx.opt.ac >= 0.0)) {
      throw ParameterError("operation counts must be non-negative");
    }
    mac = OpCount{{}, static_cast<std::uint64_t>(std::llround(*ctx.opt.mac)), false};
    ac = OpCount{{}, static_cast<std::uint64_t>(std::llround(*ctx.opt.ac)), false};
    mode = "given";
  } else if (!ctx.opt.images.empty()) {
    // Measured: mean over the first --samples inputs.
    const Data data = load_data(ctx, false);
    Rng rng(ctx.seed, 8);
    EncoderParams enc = ctx.config.encoder;
    enc.steps = T;
    const std::size_t count = std::min(ctx.opt.samples, data.images.size());
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < count; ++i) {
      const SpikeTrain input = poisson_encode(data.images[i], enc, rng);
      const auto sim = forward_simulate(net, input);
      total += count_ac_flops(net, input, sim.layer_records).total;
    }
    ac = OpCount{{}, total / count, true};
    mode = "measured";
  }
  const double e_ann = inference_energy(mac, constants, EnergyMode::kAnn);
  const double e_snn = inference_energy(ac, constants, EnergyMode::kSnn, T);
  Outcome o;
  o.report = {{"mac", mac.total}, {"ac", ac.total}, {"T", T},
              {"e_ann_j", e_ann}, {"e_snn_j", e_snn}, {"mode", mode},
              {"constants", ctx.opt.int_constants ? "int32" : "float32"}};
  if (e_snn > 0.0) {
    o.report["ratio"] = efficiency_ratio(e_ann, e_snn);
  } else {
    o.report["ratio"] = nullptr;
  }
  o.report["note"] =
      "ratio = (mac * e_mac) / (ac * e_ac * T); published EE figures that "
      "disagree with this product (e.g. 154.88 where the formula gives 24.6) "
      "are not reproduced";
  o.summary = "E_ANN = " + fmt(e_ann) + " J, E_SNN = " + fmt(e_snn) + " J";
  if (e_snn > 0.0) o.summary += ", ratio " + fmt(efficiency_ratio(e_ann, e_snn), 4);
  return o;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const NumericError*>(&e)) return kExitNumeric;
  if (dynamic_cast<const ParameterError*>(&e)) return kExitUsage;
  if (dynamic_cast<const Error*>(&e)) return kExitData;
  if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return kExitData;
  return kExitData;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"fshnn: spiking network training, conversion and analysis", "fshnn"};
  app.require_subcommand(1);
  // Global flags may also follow the subcommand.
  app.fallthrough();
  Context ctx;
  auto& g = ctx.globals;
  auto& opt = ctx.opt;
  app.add_option("--config", g.config, "experiment config (JSON)");
  app.add_option("--seed", g.seed, "RNG seed (overrides the config)");
  app.add_option("--out", g.out, "write the JSON report here");
  app.add_flag("--quiet", g.quiet, "suppress the human summary");

  using Handler = std::function<Outcome(Context&)>;
  std::vector<std::pair<CLI::App*, Handler>> commands;
  auto add = [&](const char* name, const char* help, Handler h) {
    CLI::App* sub = app.add_subcommand(name, help);
    commands.emplace_back(sub, std::move(h));
    return sub;
  };

  auto* gen = add("gen-data", "generate the oriented-bar pattern set", cmd_gen_data);
  gen->add_option("--images", opt.images, "output IDX image file");
  gen->add_option("--labels", opt.labels, "output IDX label file");
  gen->add_option("--n-per-class", opt.n_per_class, "samples per class");
  gen->add_option("--size", opt.size, "image side length (>= 8)");
  gen->add_option("--noise", opt.noise, "Gaussian pixel noise sigma");

  auto* stdp = add("train-stdp", "layer-wise unsupervised STDP training", cmd_train_stdp);
  stdp->add_option("--images", opt.images, "IDX image file");
  stdp->add_option("--model-out", opt.model_out, "output checkpoint");

  auto* stdb = add("train-stdb", "supervised surrogate-gradient training", cmd_train_stdb);
  stdb->add_option("--images", opt.images, "IDX image file");
  stdb->add_option("--labels", opt.labels, "IDX label file");
  stdb->add_option("--model-in", opt.model_in, "starting checkpoint (default: fresh)");
  stdb->add_option("--model-out", opt.model_out, "output checkpoint");

  auto* conv = add("convert", "train a ReLU twin and convert it to an SNN", cmd_convert);
  conv->add_option("--images", opt.images, "IDX image file (training + calibration)");
  conv->add_option("--labels", opt.labels, "IDX label file");
  conv->add_option("--norm", opt.norm_mode, "layer or channel")
      ->check(CLI::IsMember({"layer", "channel"}));
  conv->add_option("--ann-epochs", opt.ann_epochs, "ANN training epochs");
  conv->add_option("--model-out", opt.model_out, "output checkpoint");

  auto* evc = add("eval-class", "classification accuracy of a checkpoint", cmd_eval_class);
  evc->add_option("--images", opt.images, "IDX image file");
  evc->add_option("--labels", opt.labels, "IDX label file");
  evc->add_option("--model-in", opt.model_in, "checkpoint");

  auto* evd = add("eval-det", "mAP@0.5 or AR@K of detection records", cmd_eval_det);
  evd->add_option("--dets", opt.dets, "detections (JSON lines)");
  evd->add_option("--gts", opt.gts, "ground truths (JSON lines)");
  evd->add_option("--metric", opt.metric, "map or ar@K");

  auto* unc = add("uncertainty", "MC-dropout entropy and mCMUE", cmd_uncertainty);
  unc->add_option("--dets", opt.dets, "detections with uncertainty (JSON lines)");
  unc->add_option("--gts", opt.gts, "ground truths (JSON lines)");
  unc->add_option("--model-in", opt.model_in, "checkpoint for MC-dropout inference");
  unc->add_option("--images", opt.images, "IDX image file");
  unc->add_option("--labels", opt.labels, "IDX label file");
  unc->add_option("--samples", opt.samples, "MC samples per input");
  unc->add_option("--rate", opt.rate, "dropout rate");

  auto* tail = add("tail-index", "heavy-tail index of noise samples", cmd_tail_index);
  tail->add_option("--mode", opt.mode, "sgd, stdp, synthetic or ou")
      ->check(CLI::IsMember({"sgd", "stdp", "synthetic", "ou"}));
  tail->add_option("--alpha", opt.alpha, "synthetic: stability index");
  tail->add_option("--n", opt.n, "samples (synthetic), data size (sgd/stdp), steps (ou)");
  tail->add_option("--batch-size", opt.batch_size, "sgd/stdp minibatch size");
  tail->add_option("--passes", opt.passes, "sgd/stdp passes over the data");
  tail->add_option("--width", opt.width, "sgd: hidden width of the two-layer net");

  auto* en = add("energy", "MAC/AC inference energy", cmd_energy);
  en->add_option("--model-in", opt.model_in, "checkpoint (default: config network)");
  en->add_option("--timesteps", opt.timesteps, "SNN timesteps T");
  en->add_option("--mac", opt.mac, "use this ANN MAC count");
  en->add_option("--ac", opt.ac, "use this SNN AC count per timestep");
  en->add_option("--images", opt.images, "measure ACs on these inputs");
  en->add_option("--samples", opt.samples, "inputs to measure");
  en->add_flag("--int", opt.int_constants, "integer-arithmetic constants");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    ctx.config = g.config.empty() ? default_experiment_config()
                                  : load_experiment_config(g.config);
    ctx.seed = g.seed.value_or(ctx.config.seed);
    for (auto& [sub, handler] : commands) {
      if (!sub->parsed()) continue;
      Outcome outcome = handler(ctx);
      if (!g.out.empty()) write_text_atomic(g.out, outcome.report.dump(2) + "\n");
      if (!g.quiet) out << outcome.summary << "\n";
      return kExitOk;
    }
    err << "error: no subcommand\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace fshnn::tools
