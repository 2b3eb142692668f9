#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "testutil.hpp"
#include "xlingevent/error.hpp"
#include "xlingevent/mlp.hpp"

using namespace xlingevent;
using testutil::ScratchDir;

namespace {

MlpModel random_model(Rng& rng, std::vector<int> dims) {
  MlpModel m = init_mlp(dims, rng.next_u64());
  // init_mlp biases are zero; perturb everything for generic positions.
  for (auto& layer : m.biases)
    for (double& b : layer) b = rng.next_uniform(-0.5, 0.5);
  return m;
}

// Two interleaved diagonal bands, linearly separable.
LabeledVectors separable_toy(int n, Rng& rng) {
  LabeledVectors data;
  for (int i = 0; i < n; ++i) {
    const double x = rng.next_uniform(-1.0, 1.0);
    const double y = rng.next_uniform(0.1, 1.0);
    const int label = static_cast<int>(rng.next_index(2));
    data.x.push_back({x, label == 1 ? y : -y});
    data.y.push_back(label);
  }
  return data;
}

}  // namespace

TEST_CASE("init: deterministic per seed, shapes per dims") {
  const std::vector<int> dims{4, 2};
  const MlpModel a = init_mlp(dims, 0);
  const MlpModel b = init_mlp(dims, 0);
  CHECK(a.weights == b.weights);
  const MlpModel c = init_mlp(dims, 1);
  CHECK(a.weights != c.weights);

  const std::vector<int> deep{768, 512, 256, 128, 2};
  const MlpModel big = init_mlp(deep, 7);
  CHECK(big.num_layers() == 4);
  CHECK(big.weights[0].size() == 768u * 512u);
  CHECK(big.weights[3].size() == 128u * 2u);
  for (const auto& layer : big.biases)
    for (double v : layer) CHECK(v == 0.0);

  CHECK_THROWS_AS(init_mlp(std::vector<int>{3}, 0), UsageError);
  CHECK_THROWS_AS(init_mlp(std::vector<int>{3, 0}, 0), UsageError);
}

TEST_CASE("forward: zero weights give the uniform distribution") {
  MlpModel m = init_mlp(std::vector<int>{4, 2}, 0);
  for (auto& layer : m.weights) std::fill(layer.begin(), layer.end(), 0.0);
  const auto p = forward(m, std::vector<double>{1, 2, 3, 4});
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("forward: a large logit saturates toward 1") {
  MlpModel m = init_mlp(std::vector<int>{1, 2}, 0);
  m.weights[0] = {0.0, 50.0};  // logit_1 = 50 * x
  const auto p = forward(m, std::vector<double>{1.0});
  CHECK(p[1] > 0.999999);
}

TEST_CASE("forward: hand-multiplied 2x2 network") {
  MlpModel m;
  m.layer_dims = {2, 2, 2};
  m.weights = {{1.0, -1.0, 0.5, 0.25}, {1.0, 0.0, 0.0, 1.0}};
  m.biases = {{0.1, -0.2}, {0.0, 0.0}};
  const std::vector<double> x{2.0, 1.0};
  // z1 = (1*2 - 1*1 + 0.1, 0.5*2 + 0.25*1 - 0.2) = (1.1, 1.05); relu keeps.
  // logits = (1.1, 1.05); p1 = 1/(1 + e^(1.05-1.1)).
  const auto p = forward(m, x);
  const double expected_p0 = 1.0 / (1.0 + std::exp(1.05 - 1.1));
  CHECK(p[0] == doctest::Approx(expected_p0).epsilon(1e-12));
  CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(forward(m, std::vector<double>{1.0}), UsageError);
}

TEST_CASE("forward: softmax sums to one for wild logits (property)") {
  Rng rng(5);
  for (int iter = 0; iter < 50; ++iter) {
    MlpModel m = init_mlp(std::vector<int>{3, 2}, rng.next_u64());
    for (auto& layer : m.weights)
      for (double& v : layer) v = rng.next_uniform(-200.0, 200.0);
    const std::vector<double> x{rng.next_uniform(-5, 5),
                                rng.next_uniform(-5, 5),
                                rng.next_uniform(-5, 5)};
    const auto p = forward(m, x);
    double sum = 0.0;
    for (double v : p) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("gradient check: random heads stay below 1e-4") {
  Rng rng(9);
  for (int iter = 0; iter < 25; ++iter) {
    const int in = 2 + static_cast<int>(rng.next_index(4));
    const int hidden = 2 + static_cast<int>(rng.next_index(4));
    MlpModel m = random_model(rng, {in, hidden, 2});
    std::vector<double> x(in);
    for (double& v : x) v = rng.next_uniform(-2.0, 2.0);
    const int label = static_cast<int>(rng.next_index(2));
    CHECK(gradient_check(m, x, label) < 1e-4);
  }
}

TEST_CASE("gradient check: zero-weight symmetric point") {
  MlpModel m = init_mlp(std::vector<int>{3, 2}, 0);
  for (auto& layer : m.weights) std::fill(layer.begin(), layer.end(), 0.0);
  const std::vector<double> x{0.3, -0.7, 1.1};
  CHECK(gradient_check(m, x, 1) < 1e-6);
}

TEST_CASE("gradient check: logistic closed form (p - y) x") {
  Rng rng(21);
  MlpModel m = random_model(rng, {3, 2});
  const std::vector<double> x{0.5, -1.25, 2.0};
  const int label = 1;
  const auto probs = forward(m, x);

  // Analytic head gradient for a 1-layer softmax model.
  // dL/dW[o][i] = (p_o - [o == y]) * x_i; recover it from finite
  // differences through gradient_check being tiny, then compare directly.
  CHECK(gradient_check(m, x, label) < 1e-4);
  MlpModel probe = m;
  const double h = 1e-6;
  for (int o = 0; o < 2; ++o)
    for (int i = 0; i < 3; ++i) {
      double& param = probe.weights[0][static_cast<std::size_t>(o) * 3 + i];
      const double saved = param;
      param = saved + h;
      const auto p_plus = forward(probe, x);
      const double loss_plus = -std::log(p_plus[label]);
      param = saved - h;
      const auto p_minus = forward(probe, x);
      const double loss_minus = -std::log(p_minus[label]);
      param = saved;
      const double fd = (loss_plus - loss_minus) / (2 * h);
      const double closed = (probs[o] - (o == label ? 1.0 : 0.0)) * x[i];
      CHECK(fd == doctest::Approx(closed).epsilon(1e-4));
    }
}

TEST_CASE("train: separable toy data reaches training accuracy 1.0") {
  Rng rng(33);
  const LabeledVectors train_set = separable_toy(60, rng);
  TrainConfig cfg;
  cfg.learning_rate = 0.5;
  cfg.batch_size = 8;
  cfg.max_epochs = 200;
  cfg.patience = 200;
  cfg.seed = 5;
  const MlpModel model = init_mlp(std::vector<int>{2, 8, 2}, 5);
  // Validating on the training set makes the kept snapshot the first one
  // that classifies it perfectly.
  const TrainResult result = train(model, train_set, train_set, cfg);

  // Accuracy of the final selected snapshot on the training data.
  int correct = 0;
  for (std::size_t i = 0; i < train_set.size(); ++i)
    correct += predict_one(result.model, train_set.x[i]).label ==
               train_set.y[i];
  CHECK(correct == static_cast<int>(train_set.size()));
}

TEST_CASE("train: fixed seed reproduces history and weights") {
  Rng rng(34);
  const LabeledVectors train_set = separable_toy(40, rng);
  const LabeledVectors valid_set = separable_toy(12, rng);
  TrainConfig cfg;
  cfg.max_epochs = 10;
  cfg.patience = 10;
  cfg.seed = 3;
  const MlpModel model = init_mlp(std::vector<int>{2, 4, 2}, 3);
  const TrainResult a = train(model, train_set, valid_set, cfg);
  const TrainResult b = train(model, train_set, valid_set, cfg);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].train_loss == b.history[i].train_loss);
    CHECK(a.history[i].valid_fbeta == b.history[i].valid_fbeta);
  }
  CHECK(a.model.weights == b.model.weights);
  CHECK(a.best_epoch == b.best_epoch);
}

TEST_CASE("train: early stop halts within patience of the best epoch") {
  Rng rng(35);
  LabeledVectors train_set = separable_toy(30, rng);
  // Constant validation scores: all-1 labels, so F never improves after
  // the first epoch.
  LabeledVectors valid_set;
  for (int i = 0; i < 10; ++i) {
    valid_set.x.push_back({0.0, 1.0});
    valid_set.y.push_back(1);
  }
  TrainConfig cfg;
  cfg.max_epochs = 100;
  cfg.patience = 3;
  cfg.seed = 4;
  const MlpModel model = init_mlp(std::vector<int>{2, 4, 2}, 4);
  const TrainResult result = train(model, train_set, valid_set, cfg);
  CHECK(result.history.size() <=
        static_cast<std::size_t>(result.best_epoch + 1 + cfg.patience));

  CHECK_THROWS_AS(train(model, LabeledVectors{}, valid_set, cfg), UsageError);
}

TEST_CASE("train: selection returns the best epoch, not the last") {
  Rng rng(36);
  const LabeledVectors train_set = separable_toy(50, rng);
  const LabeledVectors valid_set = separable_toy(16, rng);
  TrainConfig cfg;
  cfg.max_epochs = 30;
  cfg.patience = 30;
  cfg.seed = 6;
  const MlpModel model = init_mlp(std::vector<int>{2, 6, 2}, 6);
  const TrainResult result = train(model, train_set, valid_set, cfg);
  std::vector<double> fs;
  for (const auto& e : result.history) fs.push_back(e.valid_fbeta);
  CHECK(result.best_epoch == select_best_epoch(fs));
}

TEST_CASE("select_best_epoch: scripted non-monotone history") {
  const std::vector<double> history{0.2, 0.8, 0.5, 0.8, 0.3};
  CHECK(select_best_epoch(history) == 1);  // earliest maximum wins
  CHECK(select_best_epoch(std::vector<double>{}) == -1);
}

TEST_CASE("train: loss non-increasing at a stable learning rate") {
  Rng rng(37);
  const LabeledVectors train_set = separable_toy(40, rng);
  const LabeledVectors valid_set = separable_toy(10, rng);
  TrainConfig cfg;
  cfg.learning_rate = 0.02;  // fixture-verified stable value
  cfg.momentum = 0.0;
  cfg.batch_size = 40;  // full batch
  cfg.max_epochs = 25;
  cfg.patience = 25;
  cfg.seed = 2;
  const MlpModel model = init_mlp(std::vector<int>{2, 4, 2}, 2);
  const TrainResult result = train(model, train_set, valid_set, cfg);
  for (std::size_t i = 1; i < result.history.size(); ++i)
    CHECK(result.history[i].train_loss <=
          result.history[i - 1].train_loss + 1e-12);
}

TEST_CASE("save/load: bit-identical round trip") {
  Rng rng(38);
  const MlpModel m = random_model(rng, {5, 3, 2});
  ScratchDir dir("mlp");
  save_model(m, dir.file("m.json"));
  const MlpModel back = load_model(dir.file("m.json"));
  CHECK(back.layer_dims == m.layer_dims);
  CHECK(back.weights == m.weights);
  CHECK(back.biases == m.biases);

  std::vector<double> x{0.1, -0.4, 2.0, 1.0, -1.0};
  const auto before = forward(m, x);
  const auto after = forward(back, x);
  CHECK(before == after);

  testutil::write_file(dir.file("junk.json"), "{\"format\":\"other\"}");
  CHECK_THROWS_AS(load_model(dir.file("junk.json")), DataError);
}

TEST_CASE("predict_one: threshold at probability 0.5") {
  MlpModel m = init_mlp(std::vector<int>{1, 2}, 0);
  m.weights[0] = {0.0, 4.0};
  CHECK(predict_one(m, std::vector<double>{1.0}).label == 1);
  CHECK(predict_one(m, std::vector<double>{-1.0}).label == 0);
  // Tie: p1 == 0.5 is not strictly above the threshold.
  m.weights[0] = {0.0, 0.0};
  CHECK(predict_one(m, std::vector<double>{1.0}).label == 0);
}
