#include "ef/attack.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "ef/blur.hpp"
#include "ef/edge.hpp"
#include "ef/parallel.hpp"
#include "ef/simd/kernels.hpp"

namespace ef {

AttackMethod parse_attack_method(const std::string& name) {
  if (name == "direct") return AttackMethod::direct;
  if (name == "bpda") return AttackMethod::bpda_identity;
  if (name == "bpda-ag") return AttackMethod::bpda_ag;
  throw std::invalid_argument("unknown attack method \"" + name +
                              "\" (expected direct|bpda|bpda-ag)");
}

const char* attack_method_name(AttackMethod m) {
  switch (m) {
    case AttackMethod::direct: return "direct";
    case AttackMethod::bpda_identity: return "bpda";
    default: return "bpda-ag";
  }
}

void AttackSpec::validate() const {
  if (!(epsilon >= 0.0) || !(alpha >= 0.0))
    throw std::invalid_argument("AttackSpec: epsilon and alpha must be >= 0");
  if (steps < 0) throw std::invalid_argument("AttackSpec: steps must be >= 0");
  if (!std::isfinite(sobel_lambda))
    throw std::invalid_argument("AttackSpec: sobel_lambda must be finite");
}

namespace {

int argmax(const std::vector<double>& v) {
  int best = 0;
  for (int j = 1; j < static_cast<int>(v.size()); ++j)
    if (v[static_cast<std::size_t>(j)] > v[static_cast<std::size_t>(best)])
      best = j;
  return best;
}

/// Objective value at x and (when grad is non-null) its ascent direction,
/// per the attack method. step indexes the per-step transform seed.
double attack_objective(const SoftmaxClassifier& model, const Image& x,
                        int label, const AttackSpec& spec,
                        const EFConfig* defense, int step, Image* grad) {
  double loss;
  if (spec.method == AttackMethod::direct) {
    loss = cross_entropy(model, x, label);
    if (grad) *grad = input_gradient(model, x, label);
  } else {
    EFConfig cfg = *defense;
    cfg.kmeans.seed = derive_seed(spec.seed, seed_stream::kPgdStep,
                                  static_cast<std::uint64_t>(step));
    cfg.emit_intermediates = (spec.method == AttackMethod::bpda_ag);
    const EFResult ef = essential_features(x, cfg);
    loss = cross_entropy(model, ef.output, label);
    if (grad) {
      // Straight-through the quantization in both variants; bpda_ag
      // additionally pulls the gradient back through the adaptive blur's
      // exact adjoint instead of skipping it.
      Image gm = input_gradient(model, ef.output, label);
      *grad = (spec.method == AttackMethod::bpda_ag)
                  ? adaptive_blur_vjp(gm, ef.selection, defense->ladder)
                  : std::move(gm);
    }
  }
  if (spec.sobel_lambda != 0.0) {
    loss += spec.sobel_lambda * mean_sobel_response(x);
    if (grad) {
      const Image gs = mean_sobel_response_gradient(x);
      simd::kernels().axpy(spec.sobel_lambda, gs.data.data(),
                           grad->data.data(),
                           static_cast<int>(grad->size()));
    }
  }
  return loss;
}

}  // namespace

AttackResult pgd(const SoftmaxClassifier& model, const Image& image, int label,
                 const AttackSpec& spec, const EFConfig* defense) {
  spec.validate();
  require_valid_intensities(image, "pgd");
  if (defense) defense->validate();
  if (spec.method != AttackMethod::direct && !defense)
    throw std::invalid_argument(
        "pgd: bpda methods require a defense configuration");
  if (label < 0 || label >= model.classes)
    throw std::invalid_argument("pgd: label out of range");

  const auto& K = simd::kernels();
  const int n = static_cast<int>(image.size());

  // Feasible box: B_inf(image, eps) intersected with [0,1]. The comparison
  // forms mirror the step kernel's min/max selection exactly, which makes
  // eps = 0 reproduce the input bit for bit.
  std::vector<double> lo(static_cast<std::size_t>(n));
  std::vector<double> hi(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double a = image.data[static_cast<std::size_t>(i)] - spec.epsilon;
    const double b = image.data[static_cast<std::size_t>(i)] + spec.epsilon;
    lo[static_cast<std::size_t>(i)] = (a > 0.0) ? a : 0.0;
    hi[static_cast<std::size_t>(i)] = (b < 1.0) ? b : 1.0;
  }

  AttackResult res;
  res.adversarial = image;
  Image& x = res.adversarial;
  if (spec.random_start) {
    Rng rng(derive_seed(spec.seed, seed_stream::kPgdInit, 0));
    for (int i = 0; i < n; ++i) {
      double v = image.data[static_cast<std::size_t>(i)] +
                 rng.uniform(-spec.epsilon, spec.epsilon);
      v = (v > lo[static_cast<std::size_t>(i)]) ? v : lo[static_cast<std::size_t>(i)];
      v = (v < hi[static_cast<std::size_t>(i)]) ? v : hi[static_cast<std::size_t>(i)];
      x.data[static_cast<std::size_t>(i)] = v;
    }
  }

  res.loss_trace.reserve(static_cast<std::size_t>(spec.steps) + 1);
  Image grad;
  for (int t = 0; t < spec.steps; ++t) {
    res.loss_trace.push_back(
        attack_objective(model, x, label, spec, defense, t, &grad));
    K.signed_step_clamp(x.data.data(), grad.data.data(), lo.data(), hi.data(),
                        spec.alpha, x.data.data(), n);
  }
  res.loss_trace.push_back(
      attack_objective(model, x, label, spec, defense, spec.steps, nullptr));

  // Success is judged the same way evaluate() would: the defense runs with
  // its own configured seed, not a step seed.
  const Image* judged = &x;
  Image transformed;
  if (defense) {
    transformed = essential_features(x, *defense).output;
    judged = &transformed;
  }
  res.success = argmax(logits(model, *judged)) != label;
  return res;
}

namespace {

double robust_accuracy(const SoftmaxClassifier& model,
                       const LabeledDataset& data, const AttackSpec& tmpl,
                       const EFConfig* defense) {
  const int n = static_cast<int>(data.size());
  if (n == 0) throw std::invalid_argument("robust_accuracy: empty dataset");
  std::vector<char> held(static_cast<std::size_t>(n), 0);
  parallel_for(n, [&](int lo, int hi) {
    for (int i = lo; i < hi; ++i) {
      AttackSpec spec = tmpl;
      spec.seed = derive_seed(tmpl.seed, seed_stream::kExample,
                              static_cast<std::uint64_t>(i));
      const AttackResult r =
          pgd(model, data.images[static_cast<std::size_t>(i)],
              data.labels[static_cast<std::size_t>(i)], spec, defense);
      held[static_cast<std::size_t>(i)] = !r.success;
    }
  });
  std::size_t correct = 0;
  for (char f : held) correct += static_cast<std::size_t>(f);
  return static_cast<double>(correct) / static_cast<double>(n);
}

}  // namespace

std::vector<SweepPoint> epsilon_sweep(const SoftmaxClassifier& model,
                                      const LabeledDataset& data,
                                      const std::vector<double>& eps_list,
                                      const AttackSpec& spec_template,
                                      const EFConfig* defense) {
  if (eps_list.empty())
    throw std::invalid_argument("epsilon_sweep: empty epsilon list");
  std::vector<SweepPoint> out;
  out.reserve(eps_list.size());
  for (double eps : eps_list) {
    AttackSpec spec = spec_template;
    spec.epsilon = eps;
    out.push_back({eps, robust_accuracy(model, data, spec, defense)});
  }
  return out;
}

std::vector<ReportRow> robustness_report(const SoftmaxClassifier& model,
                                         const LabeledDataset& data,
                                         const EFConfig* defense,
                                         std::uint64_t seed) {
  AttackSpec base;  // the standard eps/alpha/steps setting
  base.seed = seed;

  std::vector<ReportRow> rows;
  rows.push_back({"Natural", evaluate(model, data, defense), false});

  base.method = AttackMethod::direct;
  rows.push_back({"PGD", robust_accuracy(model, data, base, defense), false});
  if (defense) {
    base.method = AttackMethod::bpda_identity;
    rows.push_back({"BPDA", robust_accuracy(model, data, base, defense), false});
    base.method = AttackMethod::bpda_ag;
    rows.push_back(
        {"BPDA+AG", robust_accuracy(model, data, base, defense), false});
  }

  double worst = rows[1].accuracy;
  for (std::size_t i = 2; i < rows.size(); ++i)
    worst = std::min(worst, rows[i].accuracy);
  for (std::size_t i = 1; i < rows.size(); ++i)
    rows[i].worst = rows[i].accuracy == worst;
  return rows;
}

}  // namespace ef
