#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "ef/attack.hpp"
#include "ef/model.hpp"
#include "ef/pipeline.hpp"
#include "support.hpp"

using ef::AttackMethod;
using ef::AttackResult;
using ef::AttackSpec;
using ef::EFConfig;
using ef::Image;
using ef::LabeledDataset;
using ef::Rng;
using ef::SoftmaxClassifier;
using namespace test_support;

namespace {

// Small defended setup shared by the bpda cases: 12x12 synthetic images.
struct Fixture {
  SoftmaxClassifier model = ef::init_classifier(12, 12, 3, 2, 5);
  LabeledDataset data;
  EFConfig defense = ef::preset("cifar10");

  Fixture() {
    Rng rng(6);
    data = ef::synth_dataset(2, 3, 12, rng);
    defense.kmeans.seed = 11;
  }
};

int defended_prediction(const SoftmaxClassifier& model, const Image& x,
                        const EFConfig& defense) {
  const std::vector<double> z =
      ef::logits(model, ef::essential_features(x, defense).output);
  int best = 0;
  for (int j = 1; j < static_cast<int>(z.size()); ++j)
    if (z[static_cast<std::size_t>(j)] > z[static_cast<std::size_t>(best)])
      best = j;
  return best;
}

}  // namespace

TEST_CASE("attack method names round-trip") {
  CHECK(ef::parse_attack_method("direct") == AttackMethod::direct);
  CHECK(ef::parse_attack_method("bpda") == AttackMethod::bpda_identity);
  CHECK(ef::parse_attack_method("bpda-ag") == AttackMethod::bpda_ag);
  CHECK_THROWS_AS(ef::parse_attack_method("fgsm"), std::invalid_argument);
  for (auto m : {AttackMethod::direct, AttackMethod::bpda_identity,
                 AttackMethod::bpda_ag})
    CHECK(ef::parse_attack_method(ef::attack_method_name(m)) == m);
}

TEST_CASE("AttackSpec validation") {
  AttackSpec spec;
  CHECK_NOTHROW(spec.validate());
  spec.epsilon = -0.1;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = {};
  spec.alpha = -1.0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = {};
  spec.steps = -1;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = {};
  spec.sobel_lambda = std::nan("");
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("epsilon 0 reproduces the input bit for bit") {
  Fixture f;
  const Image& img = f.data.images[0];
  AttackSpec spec;
  spec.epsilon = 0.0;
  spec.alpha = 0.01;
  spec.steps = 5;

  SUBCASE("direct") {
    const AttackResult r = ef::pgd(f.model, img, f.data.labels[0], spec);
    CHECK(bitwise_equal(r.adversarial, img));
    CHECK(r.loss_trace.size() == 6);
  }
  SUBCASE("defended, with random start") {
    spec.method = AttackMethod::bpda_ag;
    spec.random_start = true;
    spec.steps = 2;
    const AttackResult r =
        ef::pgd(f.model, img, f.data.labels[0], spec, &f.defense);
    CHECK(bitwise_equal(r.adversarial, img));
  }
}

TEST_CASE("zero steps leave the input untouched") {
  Fixture f;
  const Image& img = f.data.images[1];
  AttackSpec spec;
  spec.epsilon = 0.05;
  spec.steps = 0;
  const AttackResult r = ef::pgd(f.model, img, f.data.labels[1], spec);
  CHECK(bitwise_equal(r.adversarial, img));
  REQUIRE(r.loss_trace.size() == 1);
  CHECK(r.loss_trace[0] ==
        doctest::Approx(ef::cross_entropy(f.model, img, f.data.labels[1]))
            .epsilon(1e-15));
}

TEST_CASE("iterates respect the epsilon ball and the intensity box") {
  Fixture f;
  const Image& img = f.data.images[2];
  AttackSpec spec;
  spec.epsilon = 0.05;
  spec.alpha = 0.013;
  spec.steps = 10;
  const AttackResult r = ef::pgd(f.model, img, f.data.labels[2], spec);
  for (std::size_t i = 0; i < img.data.size(); ++i) {
    CHECK(std::fabs(r.adversarial.data[i] - img.data[i]) <= 0.05 + 1e-12);
    CHECK(r.adversarial.data[i] >= 0.0);
    CHECK(r.adversarial.data[i] <= 1.0);
  }
}

TEST_CASE("the direct objective never decreases along the ascent") {
  // Cross-entropy of a linear model is convex in the input, and every
  // clamped step moves each coordinate with (or not against) the gradient
  // sign, so the trace must be monotone for the direct method.
  Fixture f;
  AttackSpec spec;
  spec.epsilon = 0.05;
  spec.alpha = 0.005;
  spec.steps = 12;
  for (int i = 0; i < 3; ++i) {
    const AttackResult r =
        ef::pgd(f.model, f.data.images[static_cast<std::size_t>(i)],
                f.data.labels[static_cast<std::size_t>(i)], spec);
    REQUIRE(r.loss_trace.size() == 13);
    for (std::size_t t = 1; t < r.loss_trace.size(); ++t)
      CHECK(r.loss_trace[t] >= r.loss_trace[t - 1] - 1e-12);
  }
}

TEST_CASE("bpda methods demand a defense, and labels must be in range") {
  Fixture f;
  AttackSpec spec;
  spec.method = AttackMethod::bpda_identity;
  CHECK_THROWS_AS(ef::pgd(f.model, f.data.images[0], 0, spec),
                  std::invalid_argument);
  spec.method = AttackMethod::bpda_ag;
  CHECK_THROWS_AS(ef::pgd(f.model, f.data.images[0], 0, spec),
                  std::invalid_argument);

  spec.method = AttackMethod::direct;
  CHECK_THROWS_AS(ef::pgd(f.model, f.data.images[0], -1, spec),
                  std::invalid_argument);
  CHECK_THROWS_AS(ef::pgd(f.model, f.data.images[0], 2, spec),
                  std::invalid_argument);
}

TEST_CASE("with the identity ladder both bpda variants coincide exactly") {
  // sizes = [1] makes the adaptive blur the identity, so routing the
  // gradient through its adjoint changes nothing: the two methods must
  // produce bit-identical adversarial images.
  Fixture f;
  EFConfig defense;
  defense.ladder.sizes = {1};
  defense.kmeans.k = 16;
  defense.kmeans.iterations = 5;
  defense.kmeans.seed = 3;

  AttackSpec spec;
  spec.epsilon = 0.031;
  spec.alpha = 0.01;
  spec.steps = 4;
  spec.seed = 9;

  spec.method = AttackMethod::bpda_identity;
  const AttackResult a =
      ef::pgd(f.model, f.data.images[0], f.data.labels[0], spec, &defense);
  spec.method = AttackMethod::bpda_ag;
  const AttackResult b =
      ef::pgd(f.model, f.data.images[0], f.data.labels[0], spec, &defense);
  CHECK(bitwise_equal(a.adversarial, b.adversarial));
  CHECK(a.loss_trace == b.loss_trace);
}

TEST_CASE("success is judged through the defense's own seed") {
  Fixture f;
  AttackSpec spec;
  spec.method = AttackMethod::bpda_ag;
  spec.epsilon = 0.031;
  spec.alpha = 0.01;
  spec.steps = 3;
  spec.seed = 21;
  for (int i = 0; i < 3; ++i) {
    const AttackResult r =
        ef::pgd(f.model, f.data.images[static_cast<std::size_t>(i)],
                f.data.labels[static_cast<std::size_t>(i)], spec, &f.defense);
    const int pred =
        defended_prediction(f.model, r.adversarial, f.defense);
    CHECK(r.success ==
          (pred != f.data.labels[static_cast<std::size_t>(i)]));
  }
}

TEST_CASE("a random start changes the trajectory reproducibly") {
  Fixture f;
  AttackSpec spec;
  spec.epsilon = 0.05;
  spec.alpha = 0.01;
  spec.steps = 4;
  spec.seed = 31;

  const AttackResult plain =
      ef::pgd(f.model, f.data.images[0], f.data.labels[0], spec);
  spec.random_start = true;
  const AttackResult jittered =
      ef::pgd(f.model, f.data.images[0], f.data.labels[0], spec);
  const AttackResult again =
      ef::pgd(f.model, f.data.images[0], f.data.labels[0], spec);

  CHECK(jittered.loss_trace[0] != plain.loss_trace[0]);
  CHECK(bitwise_equal(jittered.adversarial, again.adversarial));
  // The start point still sits inside the feasible region.
  for (std::size_t i = 0; i < f.data.images[0].data.size(); ++i) {
    CHECK(std::fabs(jittered.adversarial.data[i] -
                    f.data.images[0].data[i]) <= 0.05 + 1e-12);
  }
}

TEST_CASE("the edge-regularized objective shifts the attack") {
  Fixture f;
  AttackSpec spec;
  spec.epsilon = 0.05;
  spec.alpha = 0.01;
  spec.steps = 6;

  const AttackResult plain =
      ef::pgd(f.model, f.data.images[0], f.data.labels[0], spec);
  spec.sobel_lambda = 5.0;
  const AttackResult reg =
      ef::pgd(f.model, f.data.images[0], f.data.labels[0], spec);
  CHECK(!bitwise_equal(plain.adversarial, reg.adversarial));
  CHECK(reg.loss_trace.size() == 7);
  // The regularized objective includes the (nonnegative) edge term.
  CHECK(reg.loss_trace[0] > plain.loss_trace[0]);
}

TEST_CASE("an epsilon-0 sweep equals clean defended accuracy exactly") {
  Fixture f;
  AttackSpec tmpl;
  tmpl.method = AttackMethod::bpda_ag;
  tmpl.alpha = 0.01;
  tmpl.steps = 2;
  tmpl.seed = 77;
  const auto points =
      ef::epsilon_sweep(f.model, f.data, {0.0}, tmpl, &f.defense);
  REQUIRE(points.size() == 1);
  CHECK(points[0].epsilon == 0.0);
  CHECK(points[0].accuracy == ef::evaluate(f.model, f.data, &f.defense));
}

TEST_CASE("sweeps echo their epsilons and stay deterministic") {
  Fixture f;
  AttackSpec tmpl;
  tmpl.alpha = 0.02;
  tmpl.steps = 3;
  tmpl.seed = 13;
  const std::vector<double> eps{0.0, 0.02, 0.05};
  const auto a = ef::epsilon_sweep(f.model, f.data, eps, tmpl);
  const auto b = ef::epsilon_sweep(f.model, f.data, eps, tmpl);
  REQUIRE(a.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a[i].epsilon == eps[i]);
    CHECK(a[i].accuracy == b[i].accuracy);
    CHECK(a[i].accuracy >= 0.0);
    CHECK(a[i].accuracy <= 1.0);
  }
  CHECK_THROWS_AS(ef::epsilon_sweep(f.model, f.data, {}, tmpl),
                  std::invalid_argument);
}

TEST_CASE("the robustness report lists the applicable attacks") {
  Fixture f;

  const auto undefended = ef::robustness_report(f.model, f.data);
  REQUIRE(undefended.size() == 2);
  CHECK(undefended[0].column == "Natural");
  CHECK(undefended[1].column == "PGD");
  CHECK(!undefended[0].worst);
  CHECK(undefended[1].worst);  // the only attack is the worst one

  EFConfig defense = f.defense;
  defense.kmeans.iterations = 3;  // keep the defended report quick
  const auto defended = ef::robustness_report(f.model, f.data, &defense, 5);
  REQUIRE(defended.size() == 4);
  CHECK(defended[1].column == "PGD");
  CHECK(defended[2].column == "BPDA");
  CHECK(defended[3].column == "BPDA+AG");
  double worst = 1.0;
  for (std::size_t i = 1; i < 4; ++i) worst = std::min(worst, defended[i].accuracy);
  for (std::size_t i = 1; i < 4; ++i)
    CHECK(defended[i].worst == (defended[i].accuracy == worst));
  CHECK(!defended[0].worst);
}
