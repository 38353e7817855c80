#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ef/model.hpp"
#include "ef/pipeline.hpp"

namespace ef {

enum class AttackMethod {
  direct,         // plain PGD on the undefended forward pass
  bpda_identity,  // defended forward, whole transform treated as identity
  bpda_ag,        // defended forward, exact adjoint through the adaptive blur
};

AttackMethod parse_attack_method(const std::string& name);  // direct|bpda|bpda-ag
const char* attack_method_name(AttackMethod m);

struct AttackSpec {
  AttackMethod method = AttackMethod::direct;
  double epsilon = 0.031;  // L-inf radius in [0,1] units
  double alpha = 0.007;    // step size
  int steps = 20;
  bool random_start = false;
  double sobel_lambda = 0.0;  // weight of the mean-Sobel-response term; 0 = off
  std::uint64_t seed = 0;

  void validate() const;
};

struct AttackResult {
  Image adversarial;
  bool success = false;  // prediction != label through the defended forward
  /// Objective value at x_0 .. x_steps (steps+1 entries).
  std::vector<double> loss_trace;
};

/// L-inf PGD: x <- clip(x + alpha*sign(g)) onto B(x0, eps) intersected with
/// [0,1], with g per AttackSpec::method. Defended forward passes re-run
/// essential_features every step with a step-indexed seed derived from
/// spec.seed; success is judged through the defense's own configured seed so
/// it agrees with evaluate(). bpda_ag routes the model's input gradient
/// through adaptive_blur_vjp using the selection map of the current step's
/// forward pass. sobel_lambda adds lambda * grad(mean_sobel_response) to g.
AttackResult pgd(const SoftmaxClassifier& model, const Image& image, int label,
                 const AttackSpec& spec, const EFConfig* defense = nullptr);

struct SweepPoint {
  double epsilon = 0.0;
  double accuracy = 0.0;
};

/// Robust accuracy per epsilon; each example attacks with a seed derived from
/// spec_template.seed and its index, so results are independent of scheduling.
std::vector<SweepPoint> epsilon_sweep(const SoftmaxClassifier& model,
                                      const LabeledDataset& data,
                                      const std::vector<double>& eps_list,
                                      const AttackSpec& spec_template,
                                      const EFConfig* defense = nullptr);

struct ReportRow {
  std::string column;
  double accuracy = 0.0;
  bool worst = false;  // flags the minimum-accuracy attack column
};

/// Natural accuracy plus robust accuracy under the applicable attacks
/// (direct PGD always; bpda / bpda_ag only when a defense is present), at the
/// standard eps 0.031 / alpha 0.007 / 20 steps setting.
std::vector<ReportRow> robustness_report(const SoftmaxClassifier& model,
                                         const LabeledDataset& data,
                                         const EFConfig* defense = nullptr,
                                         std::uint64_t seed = 0);

}  // namespace ef
