#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ef/image.hpp"
#include "ef/pipeline.hpp"
#include "ef/rng.hpp"

namespace ef {

struct AttackSpec;  // attack.hpp; train() optionally runs an inner maximization

/// Multinomial softmax regression on flattened planar pixels: one weight row
/// per class over H*W*C features, plus a bias per class. Deliberately linear
/// so every gradient in the attack path is hand-derivable and auditable.
struct SoftmaxClassifier {
  int height = 0;
  int width = 0;
  int channels = 0;
  int classes = 0;
  std::vector<double> weights;  // classes x feature_count, row-major
  std::vector<double> bias;     // classes

  SoftmaxClassifier() = default;
  SoftmaxClassifier(int h, int w, int c, int n_classes);

  int feature_count() const { return height * width * channels; }
  bool shape_matches(const Image& img) const {
    return img.height == height && img.width == width &&
           img.channels == channels;
  }
};

/// Seeded uniform init in [-0.01, 0.01] for weights, zero bias.
SoftmaxClassifier init_classifier(int h, int w, int c, int classes,
                                  std::uint64_t seed);

struct TrainConfig {
  /// (epoch, lr) milestones; the rate of the last milestone whose epoch is
  /// <= the current epoch applies. Default mirrors the usual
  /// divide-by-10-at-75%-and-90% shape once scaled by epochs.
  std::vector<std::pair<int, double>> lr_milestones;
  double momentum = 0.9;
  double weight_decay = 0.0002;
  int epochs = 30;
  int batch = 16;
  bool augment = false;
  int crop_pad = 4;          // pad-and-crop amount when augmenting
  bool crop_reflect = false; // reflect-fill crop padding instead of zeros
  std::uint64_t seed = 0;

  /// The milestones in effect: lr_milestones if set, otherwise
  /// {(0, 0.1), (75% epochs, 0.01), (90% epochs, 0.001)}.
  std::vector<std::pair<int, double>> effective_milestones() const;
  double lr_at(int epoch) const;
};

struct LabeledDataset {
  std::vector<Image> images;
  std::vector<int> labels;
  int class_count = 0;

  std::size_t size() const { return images.size(); }
};

std::vector<double> logits(const SoftmaxClassifier& model, const Image& image);

/// Stable -log softmax(logits)[label] via max subtraction.
double cross_entropy(const SoftmaxClassifier& model, const Image& image,
                     int label);

/// d cross_entropy / d image = reshape(W^T (softmax - onehot)).
Image input_gradient(const SoftmaxClassifier& model, const Image& image,
                     int label);

/// Parameter-shaped buffer used for gradients and optimizer velocity.
struct ParamVec {
  std::vector<double> weights;
  std::vector<double> bias;
};

/// Mean over the batch of (softmax - onehot) (x) flatten(x) for W and of
/// (softmax - onehot) for b.
ParamVec param_gradient(const SoftmaxClassifier& model,
                        const std::vector<Image>& images,
                        const std::vector<int>& labels);

/// g' = g + weight_decay*theta; v <- momentum*v + g'; theta <- theta - lr*v.
void sgd_momentum_step(SoftmaxClassifier& model, const ParamVec& grads,
                       ParamVec& velocity, double lr, double momentum,
                       double weight_decay);

struct EpochMetrics {
  int epoch = 0;
  double lr = 0.0;
  double mean_loss = 0.0;
  double accuracy = 0.0;  // on the (possibly attacked/transformed) batches
};

struct TrainResult {
  SoftmaxClassifier model;
  std::vector<EpochMetrics> metrics;
};

/// Shuffled minibatch SGD. When cfg.augment: per-example coin-flip horizontal
/// flip then pad-and-random-crop. When attack is given: each example is
/// replaced by its adversarial version (inner maximization) before the
/// gradient step. When preprocess is given: essential_features is applied
/// after the attack, before the model, so the classifier trains in the
/// transformed space. All per-example randomness is derived from cfg.seed,
/// the epoch, and the example's dataset index.
TrainResult train(SoftmaxClassifier model, const LabeledDataset& data,
                  const TrainConfig& cfg, const AttackSpec* attack = nullptr,
                  const EFConfig* preprocess = nullptr);

/// Fraction of argmax-correct predictions; with preprocess, every image runs
/// through essential_features (seeded by preprocess->kmeans.seed) first.
double evaluate(const SoftmaxClassifier& model, const LabeledDataset& data,
                const EFConfig* preprocess = nullptr);

/// Seeded synthetic benchmark: each class is a distinct low-contrast
/// geometric template (disk, square, diamond, ...) with a small color tint
/// on a textured background, plus a class-specific high-frequency
/// pixel-parity texture. The texture separates the classes easily but is
/// fragile under small L-inf perturbations and is erased by the adaptive
/// blur, while the shape and tint survive both -- the split the defense
/// experiments rely on. Position, size, tint, phases and per-pixel noise are
/// jittered per image from rng.
LabeledDataset synth_dataset(int class_count, int per_class, int side,
                             Rng& rng);

/// Versioned little-endian binary model format (magic "EFSM", u32 version,
/// dims, raw doubles) plus a CSV export for audits.
void save_model(const SoftmaxClassifier& model, const std::string& path);
SoftmaxClassifier load_model(const std::string& path);
void save_model_csv(const SoftmaxClassifier& model, const std::string& path);

/// On-disk dataset = directory of PPMs plus labels.csv (filename,label).
void save_dataset(const LabeledDataset& data, const std::string& dir);
LabeledDataset load_dataset(const std::string& dir);

}  // namespace ef
