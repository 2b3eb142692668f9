#include "xlingevent/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "xlingevent/error.hpp"
#include "xlingevent/metrics.hpp"
#include "xlingevent/rng.hpp"

namespace xlingevent {

namespace {

struct ForwardTrace {
  std::vector<std::vector<double>> activations;  // a0 = x, a1..aL-1 hidden
  std::vector<std::vector<double>> pre;          // z per layer
  std::vector<double> probs;
  double loss = 0.0;  // only set when a label was given
};

void check_model(const MlpModel& model) {
  if (model.layer_dims.size() < 2)
    throw UsageError("MlpModel needs at least input and output dims");
  if (model.weights.size() != model.layer_dims.size() - 1 ||
      model.biases.size() != model.weights.size())
    throw UsageError("MlpModel: weight/bias layer count mismatch");
}

std::vector<double> softmax(const std::vector<double>& z) {
  const double m = *std::max_element(z.begin(), z.end());
  std::vector<double> p(z.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp(z[i] - m);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

// Cross-entropy via log-sum-exp; finite for any finite logits.
double cross_entropy(const std::vector<double>& z, int label) {
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double v : z) sum += std::exp(v - m);
  return -(z[label] - m - std::log(sum));
}

ForwardTrace run_forward(const MlpModel& model, std::span<const double> x,
                         int label) {
  if (x.size() != static_cast<std::size_t>(model.input_dim()))
    throw UsageError("forward: input dimension mismatch (got " +
                     std::to_string(x.size()) + ", model expects " +
                     std::to_string(model.input_dim()) + ")");
  ForwardTrace trace;
  trace.activations.emplace_back(x.begin(), x.end());
  const int layers = model.num_layers();
  for (int l = 0; l < layers; ++l) {
    const int in = model.layer_dims[l];
    const int out = model.layer_dims[l + 1];
    const auto& a = trace.activations.back();
    std::vector<double> z(out);
    for (int o = 0; o < out; ++o) {
      double acc = model.biases[l][o];
      const double* row = model.weights[l].data() + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) acc += row[i] * a[i];
      z[o] = acc;
    }
    trace.pre.push_back(z);
    if (l + 1 < layers) {
      for (double& v : z) v = v > 0.0 ? v : 0.0;  // relu
      trace.activations.push_back(std::move(z));
    } else {
      trace.probs = softmax(z);
      if (label >= 0) trace.loss = cross_entropy(z, label);
    }
  }
  return trace;
}

struct Grads {
  std::vector<std::vector<double>> w;
  std::vector<std::vector<double>> b;

  explicit Grads(const MlpModel& model) {
    for (int l = 0; l < model.num_layers(); ++l) {
      w.emplace_back(model.weights[l].size(), 0.0);
      b.emplace_back(model.biases[l].size(), 0.0);
    }
  }
};

// Adds one example's gradients into accum; returns its loss.
double backprop_example(const MlpModel& model, std::span<const double> x,
                        int label, Grads& accum) {
  const ForwardTrace trace = run_forward(model, x, label);
  const int layers = model.num_layers();

  std::vector<double> delta = trace.probs;
  delta[label] -= 1.0;  // d loss / d logits

  for (int l = layers - 1; l >= 0; --l) {
    const int in = model.layer_dims[l];
    const int out = model.layer_dims[l + 1];
    const auto& a = trace.activations[l];
    for (int o = 0; o < out; ++o) {
      accum.b[l][o] += delta[o];
      double* grow = accum.w[l].data() + static_cast<std::size_t>(o) * in;
      for (int i = 0; i < in; ++i) grow[i] += delta[o] * a[i];
    }
    if (l > 0) {
      std::vector<double> prev(in, 0.0);
      for (int o = 0; o < out; ++o) {
        const double* row =
            model.weights[l].data() + static_cast<std::size_t>(o) * in;
        for (int i = 0; i < in; ++i) prev[i] += row[i] * delta[o];
      }
      const auto& z = trace.pre[l - 1];
      for (int i = 0; i < in; ++i)
        if (z[i] <= 0.0) prev[i] = 0.0;  // relu'
      delta = std::move(prev);
    }
  }
  return trace.loss;
}

void check_dataset(const MlpModel& model, const LabeledVectors& data,
                   const char* name) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (data.x[i].size() != static_cast<std::size_t>(model.input_dim()))
      throw UsageError(std::string(name) + ": example " + std::to_string(i) +
                       " has wrong dimension");
    if (data.y[i] < 0 || data.y[i] >= model.output_dim())
      throw UsageError(std::string(name) + ": label out of range at example " +
                       std::to_string(i));
  }
  if (data.x.size() != data.y.size())
    throw UsageError(std::string(name) + ": feature/label count mismatch");
}

double validation_fbeta(const MlpModel& model, const LabeledVectors& valid,
                        double beta) {
  if (valid.size() == 0) return 0.0;
  std::vector<int> pred(valid.size());
  for (std::size_t i = 0; i < valid.size(); ++i)
    pred[i] = predict_one(model, valid.x[i]).label;
  if (model.output_dim() == 2) return binary_f1(valid.y, pred, beta).f;
  const auto per_class = per_class_prf(valid.y, pred, model.output_dim(), beta);
  return macro_f1(per_class);
}

}  // namespace

MlpModel init_mlp(std::span<const int> dims, std::uint64_t seed) {
  if (dims.size() < 2)
    throw UsageError("init_mlp: need at least input and output dims");
  for (int d : dims)
    if (d <= 0) throw UsageError("init_mlp: non-positive layer dimension");

  MlpModel model;
  model.layer_dims.assign(dims.begin(), dims.end());
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::vector<double> w(static_cast<std::size_t>(fan_out) * fan_in);
    for (double& v : w) v = rng.next_uniform(-limit, limit);
    model.weights.push_back(std::move(w));
    model.biases.emplace_back(fan_out, 0.0);
  }
  return model;
}

std::vector<double> forward(const MlpModel& model, std::span<const double> x) {
  check_model(model);
  return run_forward(model, x, -1).probs;
}

double mean_cross_entropy(const MlpModel& model, const LabeledVectors& data) {
  check_model(model);
  check_dataset(model, data, "mean_cross_entropy");
  if (data.size() == 0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i)
    acc += run_forward(model, data.x[i], data.y[i]).loss;
  return acc / static_cast<double>(data.size());
}

int select_best_epoch(std::span<const double> fbetas) {
  int best = -1;
  double best_val = -1.0;
  for (std::size_t i = 0; i < fbetas.size(); ++i) {
    if (fbetas[i] > best_val) {
      best_val = fbetas[i];
      best = static_cast<int>(i);
    }
  }
  return best;
}

TrainResult train(MlpModel model, const LabeledVectors& train_data,
                  const LabeledVectors& valid_data, const TrainConfig& cfg) {
  check_model(model);
  if (train_data.size() == 0) throw UsageError("train: empty training set");
  check_dataset(model, train_data, "train");
  check_dataset(model, valid_data, "valid");
  if (cfg.learning_rate <= 0 || cfg.momentum < 0 || cfg.batch_size <= 0 ||
      cfg.max_epochs <= 0 || cfg.patience <= 0 || cfg.beta <= 0)
    throw UsageError("train: config values must be positive");

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(train_data.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<std::vector<double>> vel_w, vel_b;
  for (int l = 0; l < model.num_layers(); ++l) {
    vel_w.emplace_back(model.weights[l].size(), 0.0);
    vel_b.emplace_back(model.biases[l].size(), 0.0);
  }

  TrainResult result;
  result.model = model;
  double best_fbeta = -1.0;
  int epochs_since_best = 0;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      Grads grads(model);
      for (std::size_t i = start; i < stop; ++i)
        backprop_example(model, train_data.x[order[i]], train_data.y[order[i]],
                         grads);
      const double scale = 1.0 / static_cast<double>(stop - start);
      for (int l = 0; l < model.num_layers(); ++l) {
        for (std::size_t i = 0; i < model.weights[l].size(); ++i) {
          vel_w[l][i] = cfg.momentum * vel_w[l][i] -
                        cfg.learning_rate * grads.w[l][i] * scale;
          model.weights[l][i] += vel_w[l][i];
        }
        for (std::size_t i = 0; i < model.biases[l].size(); ++i) {
          vel_b[l][i] = cfg.momentum * vel_b[l][i] -
                        cfg.learning_rate * grads.b[l][i] * scale;
          model.biases[l][i] += vel_b[l][i];
        }
      }
    }

    EpochStats stats;
    stats.train_loss = mean_cross_entropy(model, train_data);
    stats.valid_fbeta = validation_fbeta(model, valid_data, cfg.beta);
    result.history.push_back(stats);

    if (stats.valid_fbeta > best_fbeta) {
      best_fbeta = stats.valid_fbeta;
      result.best_epoch = epoch;
      result.model = model;
      epochs_since_best = 0;
    } else {
      ++epochs_since_best;
      if (epochs_since_best >= cfg.patience) break;
    }
  }
  return result;
}

double gradient_check(const MlpModel& model, std::span<const double> x,
                      int label) {
  check_model(model);
  if (label < 0 || label >= model.output_dim())
    throw UsageError("gradient_check: label out of range");

  Grads analytic(model);
  backprop_example(model, x, label, analytic);

  MlpModel probe = model;
  const double h = 1e-5;
  double max_rel = 0.0;
  auto probe_param = [&](double& param, double grad) {
    const double saved = param;
    param = saved + h;
    const double plus = run_forward(probe, x, label).loss;
    param = saved - h;
    const double minus = run_forward(probe, x, label).loss;
    param = saved;
    const double fd = (plus - minus) / (2.0 * h);
    const double rel =
        std::abs(grad - fd) / std::max(1e-8, std::abs(grad) + std::abs(fd));
    max_rel = std::max(max_rel, rel);
  };
  for (int l = 0; l < probe.num_layers(); ++l) {
    for (std::size_t i = 0; i < probe.weights[l].size(); ++i)
      probe_param(probe.weights[l][i], analytic.w[l][i]);
    for (std::size_t i = 0; i < probe.biases[l].size(); ++i)
      probe_param(probe.biases[l][i], analytic.b[l][i]);
  }
  return max_rel;
}

Prediction predict_one(const MlpModel& model, std::span<const double> x) {
  const auto probs = forward(model, x);
  Prediction out;
  if (probs.size() == 2) {
    out.prob_positive = probs[1];
    out.label = probs[1] > 0.5 ? 1 : 0;
  } else {
    out.label = static_cast<int>(
        std::max_element(probs.begin(), probs.end()) - probs.begin());
    out.prob_positive = probs.size() > 1 ? probs[1] : probs[0];
  }
  return out;
}

void save_model(const MlpModel& model, const std::string& path) {
  check_model(model);
  nlohmann::ordered_json j;
  j["format"] = "xlingevent-mlp";
  j["version"] = 1;
  j["activation"] = "relu";
  j["layer_dims"] = model.layer_dims;
  j["weights"] = model.weights;
  j["biases"] = model.biases;
  std::ofstream out(path);
  if (!out) throw DataError("cannot create file: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw DataError("write failed: " + path);
}

MlpModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path + ": malformed JSON: " + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "xlingevent-mlp")
    throw DataError(path + ": not an xlingevent-mlp model file");
  if (j.value("version", 0) != 1)
    throw DataError(path + ": unsupported model version");

  MlpModel model;
  try {
    model.layer_dims = j.at("layer_dims").get<std::vector<int>>();
    model.weights = j.at("weights").get<std::vector<std::vector<double>>>();
    model.biases = j.at("biases").get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": bad model payload: " + e.what());
  }
  check_model(model);
  for (int l = 0; l + 1 < static_cast<int>(model.layer_dims.size()); ++l) {
    const std::size_t expect_w =
        static_cast<std::size_t>(model.layer_dims[l]) * model.layer_dims[l + 1];
    if (model.weights[l].size() != expect_w ||
        model.biases[l].size() !=
            static_cast<std::size_t>(model.layer_dims[l + 1]))
      throw DataError(path + ": weight shapes disagree with layer_dims");
  }
  return model;
}

}  // namespace xlingevent
