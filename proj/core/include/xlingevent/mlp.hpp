#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace xlingevent {

// Feed-forward classification head: ReLU hidden layers, softmax output.
// Weights are row-major (out x in) per layer.
struct MlpModel {
  std::vector<int> layer_dims;  // input, hidden..., output
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  int input_dim() const { return layer_dims.front(); }
  int output_dim() const { return layer_dims.back(); }
  int num_layers() const { return static_cast<int>(weights.size()); }
};

struct TrainConfig {
  double learning_rate = 0.1;
  double momentum = 0.9;
  int batch_size = 16;
  int max_epochs = 100;
  int patience = 10;       // epochs without validation improvement
  double beta = 1.0;       // F_beta used for model selection
  std::uint64_t seed = 1;  // batch shuffling
};

struct LabeledVectors {
  std::vector<std::vector<double>> x;
  std::vector<int> y;

  std::size_t size() const { return y.size(); }
};

struct EpochStats {
  double train_loss = 0.0;   // mean cross-entropy after the epoch's updates
  double valid_fbeta = 0.0;  // selection metric on the validation set
};

struct TrainResult {
  MlpModel model;  // snapshot of the best epoch, not the last
  std::vector<EpochStats> history;
  int best_epoch = -1;
};

/// Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases,
/// deterministic per seed. dims needs >= 2 entries, all positive.
MlpModel init_mlp(std::span<const int> dims, std::uint64_t seed);

/// Class probabilities; they sum to 1 within 1e-9.
std::vector<double> forward(const MlpModel& model, std::span<const double> x);

/// Mean cross-entropy of the model on a labeled set.
double mean_cross_entropy(const MlpModel& model, const LabeledVectors& data);

// Mini-batch SGD with momentum on cross-entropy. After each epoch the
// validation F_beta is computed and the best-scoring epoch's snapshot is
// returned (earliest wins ties). Stops early after `patience` epochs
// without improvement.
TrainResult train(MlpModel model, const LabeledVectors& train_data,
                  const LabeledVectors& valid_data, const TrainConfig& cfg);

/// Index of the epoch a maximising-F selection keeps: first occurrence of
/// the maximum.
int select_best_epoch(std::span<const double> fbetas);

/// Max relative error between analytic gradients and central finite
/// differences (h = 1e-5) of the cross-entropy at (x, label).
double gradient_check(const MlpModel& model, std::span<const double> x,
                      int label);

struct Prediction {
  int label = 0;
  double prob_positive = 0.0;  // P(class 1)
};

/// Binary decision at probability 0.5.
Prediction predict_one(const MlpModel& model, std::span<const double> x);

/// Versioned JSON serialization; save/load round-trips weights exactly.
void save_model(const MlpModel& model, const std::string& path);
MlpModel load_model(const std::string& path);

}  // namespace xlingevent
