#include "ef/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "ef/attack.hpp"
#include "ef/csv.hpp"
#include "ef/parallel.hpp"
#include "ef/simd/kernels.hpp"

namespace ef {

namespace {

constexpr double kTwoPi = 6.283185307179586;

void check_model(const SoftmaxClassifier& m, const char* where) {
  if (m.height < 1 || m.width < 1 || (m.channels != 1 && m.channels != 3) ||
      m.classes < 2)
    throw std::invalid_argument(std::string(where) + ": malformed classifier");
  const std::size_t d = static_cast<std::size_t>(m.feature_count());
  if (m.weights.size() != d * m.classes ||
      m.bias.size() != static_cast<std::size_t>(m.classes))
    throw std::invalid_argument(std::string(where) +
                                ": parameter buffer size mismatch");
}

void check_example(const SoftmaxClassifier& m, const Image& img, int label,
                   const char* where) {
  if (!m.shape_matches(img) || img.size() != static_cast<std::size_t>(m.feature_count()))
    throw std::invalid_argument(std::string(where) + ": image shape mismatch");
  if (label < 0 || label >= m.classes)
    throw std::invalid_argument(std::string(where) + ": label out of range");
}

/// Stable softmax; returns the probabilities and, through loss, the
/// cross-entropy at `label` (skipped when label < 0).
double softmax_probs(const std::vector<double>& l, int label,
                     std::vector<double>& p) {
  double m = l[0];
  for (double v : l) m = (v > m) ? v : m;
  double sumexp = 0.0;
  p.resize(l.size());
  for (std::size_t j = 0; j < l.size(); ++j) {
    p[j] = std::exp(l[j] - m);
    sumexp += p[j];
  }
  for (double& v : p) v /= sumexp;
  if (label < 0) return 0.0;
  return std::log(sumexp) + m - l[static_cast<std::size_t>(label)];
}

int argmax(const std::vector<double>& v) {
  int best = 0;
  for (int j = 1; j < static_cast<int>(v.size()); ++j)
    if (v[static_cast<std::size_t>(j)] > v[static_cast<std::size_t>(best)])
      best = j;  // ties keep the lowest index
  return best;
}

}  // namespace

SoftmaxClassifier::SoftmaxClassifier(int h, int w, int c, int n_classes)
    : height(h), width(w), channels(c), classes(n_classes) {
  if (h < 1 || w < 1 || (c != 1 && c != 3) || n_classes < 2)
    throw std::invalid_argument("SoftmaxClassifier: bad dimensions");
  weights.assign(static_cast<std::size_t>(feature_count()) * n_classes, 0.0);
  bias.assign(static_cast<std::size_t>(n_classes), 0.0);
}

SoftmaxClassifier init_classifier(int h, int w, int c, int classes,
                                  std::uint64_t seed) {
  SoftmaxClassifier m(h, w, c, classes);
  Rng rng(derive_seed(seed, seed_stream::kModelInit, 0));
  for (double& v : m.weights) v = rng.uniform(-0.01, 0.01);
  return m;
}

std::vector<double> logits(const SoftmaxClassifier& model, const Image& image) {
  check_model(model, "logits");
  check_example(model, image, 0, "logits");
  const auto& K = simd::kernels();
  const int d = model.feature_count();
  std::vector<double> out(static_cast<std::size_t>(model.classes));
  for (int j = 0; j < model.classes; ++j)
    out[static_cast<std::size_t>(j)] =
        K.dot(model.weights.data() + static_cast<std::size_t>(j) * d,
              image.data.data(), d) +
        model.bias[static_cast<std::size_t>(j)];
  return out;
}

double cross_entropy(const SoftmaxClassifier& model, const Image& image,
                     int label) {
  check_example(model, image, label, "cross_entropy");
  std::vector<double> p;
  return softmax_probs(logits(model, image), label, p);
}

Image input_gradient(const SoftmaxClassifier& model, const Image& image,
                     int label) {
  check_example(model, image, label, "input_gradient");
  std::vector<double> p;
  softmax_probs(logits(model, image), label, p);
  p[static_cast<std::size_t>(label)] -= 1.0;
  const auto& K = simd::kernels();
  const int d = model.feature_count();
  Image grad(image.height, image.width, image.channels);
  for (int j = 0; j < model.classes; ++j)
    K.axpy(p[static_cast<std::size_t>(j)],
           model.weights.data() + static_cast<std::size_t>(j) * d,
           grad.data.data(), d);
  return grad;
}

ParamVec param_gradient(const SoftmaxClassifier& model,
                        const std::vector<Image>& images,
                        const std::vector<int>& labels) {
  check_model(model, "param_gradient");
  if (images.empty() || images.size() != labels.size())
    throw std::invalid_argument("param_gradient: empty or mismatched batch");
  const int b = static_cast<int>(images.size());
  const int d = model.feature_count();
  const auto& K = simd::kernels();

  // Probabilities first (independent per example), then one fixed-order
  // accumulation pass so the result does not depend on scheduling.
  std::vector<std::vector<double>> probs(static_cast<std::size_t>(b));
  parallel_for(b, [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      check_example(model, images[static_cast<std::size_t>(i)],
                    labels[static_cast<std::size_t>(i)], "param_gradient");
      softmax_probs(logits(model, images[static_cast<std::size_t>(i)]), -1,
                    probs[static_cast<std::size_t>(i)]);
    }
  });

  ParamVec g;
  g.weights.assign(model.weights.size(), 0.0);
  g.bias.assign(model.bias.size(), 0.0);
  for (int i = 0; i < b; ++i) {
    const Image& x = images[static_cast<std::size_t>(i)];
    for (int j = 0; j < model.classes; ++j) {
      double a = probs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (j == labels[static_cast<std::size_t>(i)]) a -= 1.0;
      a /= b;
      K.axpy(a, x.data.data(),
             g.weights.data() + static_cast<std::size_t>(j) * d, d);
      g.bias[static_cast<std::size_t>(j)] += a;
    }
  }
  return g;
}

void sgd_momentum_step(SoftmaxClassifier& model, const ParamVec& grads,
                       ParamVec& velocity, double lr, double momentum,
                       double weight_decay) {
  check_model(model, "sgd_momentum_step");
  if (grads.weights.size() != model.weights.size() ||
      grads.bias.size() != model.bias.size())
    throw std::invalid_argument("sgd_momentum_step: gradient size mismatch");
  if (velocity.weights.empty() && velocity.bias.empty()) {
    velocity.weights.assign(model.weights.size(), 0.0);
    velocity.bias.assign(model.bias.size(), 0.0);
  }
  if (velocity.weights.size() != model.weights.size() ||
      velocity.bias.size() != model.bias.size())
    throw std::invalid_argument("sgd_momentum_step: velocity size mismatch");
  const auto& K = simd::kernels();
  K.sgd_update(model.weights.data(), velocity.weights.data(),
               grads.weights.data(), static_cast<int>(model.weights.size()),
               lr, momentum, weight_decay);
  K.sgd_update(model.bias.data(), velocity.bias.data(), grads.bias.data(),
               static_cast<int>(model.bias.size()), lr, momentum,
               weight_decay);
}

std::vector<std::pair<int, double>> TrainConfig::effective_milestones() const {
  std::vector<std::pair<int, double>> ms = lr_milestones;
  if (ms.empty())
    ms = {{0, 0.1}, {epochs * 3 / 4, 0.01}, {epochs * 9 / 10, 0.001}};
  if (ms.front().first != 0)
    throw std::invalid_argument("TrainConfig: first lr milestone must be epoch 0");
  std::vector<std::pair<int, double>> out;
  for (const auto& m : ms) {
    if (m.first < 0 || !(m.second > 0.0))
      throw std::invalid_argument("TrainConfig: bad lr milestone");
    if (!out.empty() && m.first <= out.back().first) {
      // Milestones that collapse onto an earlier epoch (short runs scaling
      // the default schedule down to nothing) are dropped.
      if (m.first == out.back().first) continue;
      throw std::invalid_argument("TrainConfig: lr milestones must increase");
    }
    out.push_back(m);
  }
  return out;
}

double TrainConfig::lr_at(int epoch) const {
  if (epoch < 0) throw std::invalid_argument("lr_at: negative epoch");
  const auto ms = effective_milestones();
  double lr = ms.front().second;
  for (const auto& m : ms)
    if (m.first <= epoch) lr = m.second;
  return lr;
}

namespace {

void check_dataset(const LabeledDataset& data, const char* where) {
  if (data.images.empty() || data.images.size() != data.labels.size())
    throw std::invalid_argument(std::string(where) +
                                ": empty or mismatched dataset");
  for (std::size_t i = 0; i < data.images.size(); ++i) {
    if (!data.images[i].same_shape(data.images[0]))
      throw std::invalid_argument(std::string(where) +
                                  ": images differ in shape");
    if (data.labels[i] < 0 || data.labels[i] >= data.class_count)
      throw std::invalid_argument(std::string(where) + ": label out of range");
  }
}

/// One training example after augmentation, inner maximization, and the
/// transform, all seeded from (cfg.seed, epoch, dataset index).
Image prepare_example(const SoftmaxClassifier& model, const Image& orig,
                      int label, const TrainConfig& cfg,
                      const AttackSpec* attack, const EFConfig* preprocess,
                      int epoch, std::size_t n, std::size_t idx) {
  const std::uint64_t tag = static_cast<std::uint64_t>(epoch) * n + idx;
  Image img = orig;
  if (cfg.augment) {
    Rng aug(derive_seed(cfg.seed, seed_stream::kAugment, tag));
    if (aug.coin_flip()) img = horizontal_flip(img);
    img = pad_and_random_crop(img, cfg.crop_pad, aug, cfg.crop_reflect);
  }
  if (attack) {
    AttackSpec spec = *attack;
    spec.seed = derive_seed(cfg.seed, seed_stream::kTrainAttack, tag);
    img = pgd(model, img, label, spec, preprocess).adversarial;
  }
  if (preprocess) {
    EFConfig ef = *preprocess;
    ef.kmeans.seed = derive_seed(cfg.seed, seed_stream::kTrainEF, tag);
    img = essential_features(img, ef).output;
  }
  return img;
}

}  // namespace

TrainResult train(SoftmaxClassifier model, const LabeledDataset& data,
                  const TrainConfig& cfg, const AttackSpec* attack,
                  const EFConfig* preprocess) {
  check_model(model, "train");
  check_dataset(data, "train");
  if (!model.shape_matches(data.images[0]) || data.class_count > model.classes)
    throw std::invalid_argument("train: model does not fit the dataset");
  if (cfg.epochs < 1 || cfg.batch < 1)
    throw std::invalid_argument("train: epochs and batch must be >= 1");
  if (attack) attack->validate();
  if (preprocess) preprocess->validate();

  const std::size_t n = data.size();
  ParamVec velocity;
  TrainResult result;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double lr = cfg.lr_at(epoch);
    Rng shuffle_rng(derive_seed(cfg.seed, seed_stream::kShuffle,
                                static_cast<std::uint64_t>(epoch)));
    shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch) {
      const std::size_t stop = std::min(n, start + cfg.batch);
      std::vector<Image> batch;
      std::vector<int> labels;
      batch.reserve(stop - start);
      labels.reserve(stop - start);
      for (std::size_t pos = start; pos < stop; ++pos) {
        const std::size_t idx = order[pos];
        batch.push_back(prepare_example(model, data.images[idx],
                                        data.labels[idx], cfg, attack,
                                        preprocess, epoch, n, idx));
        labels.push_back(data.labels[idx]);
      }
      // Metrics reflect the model as it saw this batch, before stepping.
      for (std::size_t i = 0; i < batch.size(); ++i) {
        std::vector<double> p;
        const auto l = logits(model, batch[i]);
        loss_sum += softmax_probs(l, labels[i], p);
        if (argmax(l) == labels[i]) ++correct;
      }
      const ParamVec grads = param_gradient(model, batch, labels);
      sgd_momentum_step(model, grads, velocity, lr, cfg.momentum,
                        cfg.weight_decay);
    }
    result.metrics.push_back({epoch, lr, loss_sum / static_cast<double>(n),
                              static_cast<double>(correct) /
                                  static_cast<double>(n)});
  }
  result.model = std::move(model);
  return result;
}

double evaluate(const SoftmaxClassifier& model, const LabeledDataset& data,
                const EFConfig* preprocess) {
  check_model(model, "evaluate");
  check_dataset(data, "evaluate");
  if (preprocess) preprocess->validate();
  const int n = static_cast<int>(data.size());
  std::vector<char> ok(static_cast<std::size_t>(n), 0);
  parallel_for(n, [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      const Image* x = &data.images[static_cast<std::size_t>(i)];
      Image transformed;
      if (preprocess) {
        transformed = essential_features(*x, *preprocess).output;
        x = &transformed;
      }
      ok[static_cast<std::size_t>(i)] =
          argmax(logits(model, *x)) == data.labels[static_cast<std::size_t>(i)];
    }
  });
  std::size_t correct = 0;
  for (char f : ok) correct += static_cast<std::size_t>(f);
  return static_cast<double>(correct) / static_cast<double>(n);
}

namespace {

/// Each class pairs a geometric template with a class-specific pixel-parity
/// micro-texture. The texture is the dominant cue for natural training
/// (large squared-margin, spread over every pixel) but its per-pixel
/// contrast is tiny, so it dies inside an L-inf ball of radius ~0.03 -- and
/// the 3x3 Sobel operator, a centered difference, cannot see period-2
/// patterns at all, so the adaptive blur files it under "featureless" and
/// smooths it away. The low-contrast shape plus tint is the opposite: weak
/// for natural training but per-pixel robust, and it survives the transform.
/// That split is what lets the defended, adversarially trained model keep
/// accuracy the undefended model cannot.
struct ClassSpec {
  int kind;      // 0 disk, 1 square, 2 diamond, 3 ring, 4 cross
  int tint_ch;   // channel carrying the small class tint
  int parity;    // 0: (-1)^x, 1: (-1)^y, 2: (-1)^(x+y)
  double tex_sign;
};

// The first three shapes are all centrally symmetric blobs of similar area:
// any pair differs only in a thin boundary band, so no single linear
// template gets a large robust margin out of the geometry alone. (An early
// triangle variant taught the undefended model its vertical mass gradient,
// a robust cue strong enough to shrug off the texture-flipping attack.)
constexpr ClassSpec kClasses[] = {
    {0, 0, 0, +1.0},  // disk,    red tint,   column parity
    {1, 1, 1, +1.0},  // square,  green tint, row parity
    {2, 2, 2, +1.0},  // diamond, blue tint,  checkerboard
    {3, 0, 0, -1.0},  // ring,    red tint,   anti column parity
    {4, 1, 1, -1.0},  // cross,   green tint, anti row parity
};

constexpr double kBgBase = 0.22;
constexpr double kBgWave = 0.03;        // low-frequency background texture
constexpr double kShapeContrast = 0.14; // shape brightness above background
constexpr double kTint = 0.06;          // class color offset inside the shape
constexpr double kTexAmp = 0.019;       // parity micro-texture amplitude
constexpr double kNoise = 0.04;         // per-pixel uniform noise bound

bool inside_shape(int kind, double dx, double dy, double r) {
  switch (kind) {
    case 0:
      return dx * dx + dy * dy <= r * r;
    case 1:
      return std::abs(dx) <= 0.9 * r && std::abs(dy) <= 0.9 * r;
    case 2:  // diamond, sized to roughly match the disk's area
      return std::abs(dx) + std::abs(dy) <= 1.15 * r;
    case 3: {
      const double d2 = dx * dx + dy * dy;
      return d2 <= r * r && d2 >= (0.55 * r) * (0.55 * r);
    }
    default:
      return (std::abs(dx) <= 0.35 * r && std::abs(dy) <= r) ||
             (std::abs(dy) <= 0.35 * r && std::abs(dx) <= r);
  }
}

double parity_texture(int parity, int x, int y) {
  const int p = (parity == 0) ? x : (parity == 1) ? y : x + y;
  return (p % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace

LabeledDataset synth_dataset(int class_count, int per_class, int side,
                             Rng& rng) {
  constexpr int kMaxClasses = static_cast<int>(std::size(kClasses));
  if (class_count < 1 || class_count > kMaxClasses)
    throw std::invalid_argument("synth_dataset: class_count must be 1..5");
  if (per_class < 1 || side < 8)
    throw std::invalid_argument(
        "synth_dataset: per_class must be >= 1 and side >= 8");

  LabeledDataset out;
  out.class_count = class_count;
  // Fixed per-image draw order (1 tint jitter, 2 center, 1 size, 2 phase,
  // then side*side*3 noise in buffer order) keeps every image a pure
  // function of its position in the stream.
  for (int cls = 0; cls < class_count; ++cls) {
    const ClassSpec& cs = kClasses[cls];
    for (int i = 0; i < per_class; ++i) {
      const double tj = rng.uniform(-0.01, 0.01);
      const double cx = side / 2.0 + rng.uniform(-2.0, 2.0);
      const double cy = side / 2.0 + rng.uniform(-2.0, 2.0);
      const double r = side * rng.uniform(0.26, 0.32);
      const double px = rng.uniform(0.0, kTwoPi);
      const double py = rng.uniform(0.0, kTwoPi);

      Image img(side, side, 3);
      for (int c = 0; c < 3; ++c)
        for (int y = 0; y < side; ++y)
          for (int x = 0; x < side; ++x) {
            const double bg =
                kBgBase + kBgWave * std::sin(kTwoPi * 2.5 * x / side + px) *
                              std::sin(kTwoPi * 2.5 * y / side + py);
            double v = bg + cs.tex_sign * kTexAmp *
                                parity_texture(cs.parity, x, y);
            if (inside_shape(cs.kind, x - cx, y - cy, r)) {
              v += kShapeContrast;
              if (c == cs.tint_ch) v += kTint + tj;
            }
            v += rng.uniform(-kNoise, kNoise);
            img.at(c, y, x) = std::min(1.0, std::max(0.0, v));
          }
      out.images.push_back(std::move(img));
      out.labels.push_back(cls);
    }
  }
  return out;
}

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& os, double v) {
  const std::uint64_t u = std::bit_cast<std::uint64_t>(v);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& is, const char* path) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4))
    throw std::runtime_error(std::string("load_model: truncated file ") + path);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& is, const char* path) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8))
    throw std::runtime_error(std::string("load_model: truncated file ") + path);
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return std::bit_cast<double>(u);
}

constexpr char kModelMagic[4] = {'E', 'F', 'S', 'M'};
constexpr std::uint32_t kModelVersion = 1;

}  // namespace

void save_model(const SoftmaxClassifier& model, const std::string& path) {
  check_model(model, "save_model");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("save_model: cannot open " + path);
  os.write(kModelMagic, 4);
  put_u32(os, kModelVersion);
  put_u32(os, static_cast<std::uint32_t>(model.height));
  put_u32(os, static_cast<std::uint32_t>(model.width));
  put_u32(os, static_cast<std::uint32_t>(model.channels));
  put_u32(os, static_cast<std::uint32_t>(model.classes));
  for (double v : model.weights) put_f64(os, v);
  for (double v : model.bias) put_f64(os, v);
  if (!os) throw std::runtime_error("save_model: write failed for " + path);
}

SoftmaxClassifier load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_model: cannot open " + path);
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kModelMagic, 4) != 0)
    throw std::runtime_error("load_model: bad magic in " + path);
  const std::uint32_t version = get_u32(is, path.c_str());
  if (version != kModelVersion)
    throw std::runtime_error("load_model: unsupported version in " + path);
  const auto h = static_cast<int>(get_u32(is, path.c_str()));
  const auto w = static_cast<int>(get_u32(is, path.c_str()));
  const auto c = static_cast<int>(get_u32(is, path.c_str()));
  const auto classes = static_cast<int>(get_u32(is, path.c_str()));
  if (h < 1 || w < 1 || (c != 1 && c != 3) || classes < 2 ||
      static_cast<std::int64_t>(h) * w * c * classes > (1 << 28))
    throw std::runtime_error("load_model: implausible dimensions in " + path);
  SoftmaxClassifier m(h, w, c, classes);
  for (double& v : m.weights) v = get_f64(is, path.c_str());
  for (double& v : m.bias) v = get_f64(is, path.c_str());
  char extra;
  if (is.read(&extra, 1))
    throw std::runtime_error("load_model: trailing bytes in " + path);
  return m;
}

void save_model_csv(const SoftmaxClassifier& model, const std::string& path) {
  check_model(model, "save_model_csv");
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_model_csv: cannot open " + path);
  csv_row(os, {"tensor", "row", "col", "value"});
  const int d = model.feature_count();
  for (int j = 0; j < model.classes; ++j)
    for (int f = 0; f < d; ++f)
      csv_row(os, {"weights", std::to_string(j), std::to_string(f),
                   csv_double(model.weights[static_cast<std::size_t>(j) * d +
                                            f])});
  for (int j = 0; j < model.classes; ++j)
    csv_row(os, {"bias", std::to_string(j), "0",
                 csv_double(model.bias[static_cast<std::size_t>(j)])});
  if (!os) throw std::runtime_error("save_model_csv: write failed for " + path);
}

void save_dataset(const LabeledDataset& data, const std::string& dir) {
  check_dataset(data, "save_dataset");
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::ofstream csv(fs::path(dir) / "labels.csv");
  if (!csv) throw std::runtime_error("save_dataset: cannot open labels.csv");
  csv_row(csv, {"filename", "label"});
  char name[32];
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::snprintf(name, sizeof(name), "img_%05zu.ppm", i);
    save_ppm(data.images[i], (fs::path(dir) / name).string());
    csv_row(csv, {name, std::to_string(data.labels[i])});
  }
  if (!csv) throw std::runtime_error("save_dataset: write failed");
}

LabeledDataset load_dataset(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream csv(fs::path(dir) / "labels.csv");
  if (!csv)
    throw std::runtime_error("load_dataset: cannot open labels.csv in " + dir);
  std::string line;
  if (!std::getline(csv, line) || line != "filename,label")
    throw std::runtime_error("load_dataset: labels.csv must start with "
                             "\"filename,label\"");
  LabeledDataset out;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("load_dataset: malformed labels.csv row: " +
                               line);
    const std::string name = line.substr(0, comma);
    int label = 0;
    try {
      label = std::stoi(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw std::runtime_error("load_dataset: bad label in row: " + line);
    }
    if (label < 0)
      throw std::runtime_error("load_dataset: negative label in row: " + line);
    out.images.push_back(load_ppm((fs::path(dir) / name).string()));
    out.labels.push_back(label);
    if (!out.images.back().same_shape(out.images.front()))
      throw std::runtime_error("load_dataset: images differ in shape");
    out.class_count = std::max(out.class_count, label + 1);
  }
  if (out.images.empty())
    throw std::runtime_error("load_dataset: no rows in labels.csv");
  return out;
}

}  // namespace ef
