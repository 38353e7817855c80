// ef: command-line front end for the essential-features defense library.
//
// Subcommands: transform, attack, train, eval, sweep, synth. Exit codes:
// 0 success, 1 runtime/I-O failure, 2 usage error. All randomness flows from
// --seed (or the EF_SEED environment variable), so identical invocations
// produce byte-identical outputs regardless of --threads.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "ef/attack.hpp"
#include "ef/csv.hpp"
#include "ef/image.hpp"
#include "ef/model.hpp"
#include "ef/parallel.hpp"
#include "ef/pipeline.hpp"

namespace {

using namespace ef;

// ---------------------------------------------------------------- parsing

std::vector<double> parse_double_list(const std::string& s, const char* flag) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t comma = std::min(s.find(',', pos), s.size());
    const std::string item = s.substr(pos, comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(flag) + ": bad number \"" +
                                  item + "\" in \"" + s + "\"");
    }
    pos = comma + 1;
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& s, const char* flag) {
  std::vector<int> out;
  for (double v : parse_double_list(s, flag)) {
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
      throw std::invalid_argument(std::string(flag) + ": expected integers");
    out.push_back(i);
  }
  return out;
}

// "0:0.1,22:0.01" -> [(0, 0.1), (22, 0.01)]
std::vector<std::pair<int, double>> parse_milestones(const std::string& s) {
  std::vector<std::pair<int, double>> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const std::size_t comma = std::min(s.find(',', pos), s.size());
    const std::string item = s.substr(pos, comma - pos);
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("--lr-milestones: expected epoch:lr pairs, "
                                  "got \"" + item + "\"");
    try {
      out.emplace_back(std::stoi(item.substr(0, colon)),
                       std::stod(item.substr(colon + 1)));
    } catch (const std::exception&) {
      throw std::invalid_argument("--lr-milestones: bad pair \"" + item +
                                  "\"");
    }
    pos = comma + 1;
  }
  return out;
}

// ----------------------------------------------------------------- output

std::ofstream open_out(const std::string& path, const char* what) {
  std::ofstream os(path);
  if (!os)
    throw std::runtime_error(std::string(what) + ": cannot open " + path);
  return os;
}

/// Writes rows to `path`, or to stdout when the path is empty.
void emit_csv(const std::string& path,
              const std::vector<std::vector<std::string>>& rows,
              const char* what) {
  if (path.empty()) {
    for (const auto& r : rows) csv_row(std::cout, r);
    return;
  }
  auto os = open_out(path, what);
  for (const auto& r : rows) csv_row(os, r);
  if (!os) throw std::runtime_error(std::string(what) + ": write failed");
}

/// Planar channels stacked vertically into one grayscale image, so a
/// 3-channel map dumps as a single 3H x W PGM.
Image stack_channels(const Image& img) {
  Image out(img.height * img.channels, img.width, 1);
  out.data = img.data;
  return out;
}

Image selection_as_gray(const KernelSelectionMap& sel, const BlurLadder& ladder) {
  const int m = static_cast<int>(ladder.sizes.size());
  Image out(sel.height * sel.channels, sel.width, 1);
  for (std::size_t i = 0; i < sel.sizes.size(); ++i) {
    int j = 0;
    while (ladder.sizes[static_cast<std::size_t>(j)] != sel.sizes[i]) ++j;
    out.data[i] = (m == 1) ? 1.0 : static_cast<double>(j) / (m - 1);
  }
  return out;
}

// ----------------------------------------------------------- shared flags

struct Common {
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = leave the default (all cores)

  void apply() const {
    if (threads > 0) set_thread_count(threads);
  }
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Master seed (default: $EF_SEED or 0)")
      ->envname("EF_SEED");
  sub->add_option("--threads", c.threads,
                  "Worker-thread cap (default: all cores); results do not "
                  "depend on it");
}

/// Defense/transform configuration assembled from a preset plus overrides.
struct EFFlags {
  std::string preset_name;
  std::string kernels;
  std::string thresholds;  // 0-255 units on the CLI
  int k = 0;
  bool invert_ladder = false;
  bool pooled = false;

  EFConfig build(std::uint64_t seed) const {
    EFConfig cfg = preset(preset_name.empty() ? "cifar10" : preset_name);
    if (!kernels.empty()) cfg.ladder.sizes = parse_int_list(kernels, "--kernels");
    if (!thresholds.empty()) {
      cfg.ladder.thresholds.clear();
      for (double t : parse_double_list(thresholds, "--thresholds"))
        cfg.ladder.thresholds.push_back(t / 255.0);
    }
    if (k > 0) cfg.kmeans.k = k;
    cfg.invert_ladder = invert_ladder;
    cfg.pooled_selection = pooled;
    cfg.kmeans.seed = seed;
    cfg.validate();
    return cfg;
  }
};

// ------------------------------------------------------------- transform

void setup_transform(CLI::App& app) {
  auto sub = app.add_subcommand(
      "transform", "Apply the essential-features transform to one PPM");
  auto c = std::make_shared<Common>();
  auto ef = std::make_shared<EFFlags>();
  auto in = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto dump_edges = std::make_shared<std::string>();
  auto dump_sel = std::make_shared<std::string>();
  auto dump_pal = std::make_shared<std::string>();

  sub->add_option("--input", *in, "Input PPM")->required();
  sub->add_option("--output", *out, "Output PPM")->required();
  sub->add_option("--preset", ef->preset_name, "cifar10|resisc45 (default cifar10)");
  sub->add_option("--kernels", ef->kernels, "Blur ladder sizes, e.g. 3,7,13");
  sub->add_option("--thresholds", ef->thresholds,
                  "Edge thresholds in 0-255 units, e.g. 25,55");
  sub->add_option("--k", ef->k, "Palette size");
  sub->add_flag("--invert-ladder", ef->invert_ladder,
                "Strong edges pick the largest kernel instead of the smallest");
  sub->add_flag("--pooled-selection", ef->pooled,
                "Select kernels from the channel-max edge response");
  sub->add_option("--dump-edges", *dump_edges, "Write the Sobel response as PGM");
  sub->add_option("--dump-selection", *dump_sel,
                  "Write the kernel selection map as PGM");
  sub->add_option("--dump-palette", *dump_pal, "Write the palette as CSV");
  add_common(sub, *c);

  sub->callback([=]() {
    c->apply();
    EFConfig cfg = ef->build(c->seed);
    cfg.emit_intermediates =
        !dump_edges->empty() || !dump_sel->empty() || !dump_pal->empty();
    const Image img = load_ppm(*in);
    const EFResult res = essential_features(img, cfg);
    save_ppm(res.output, *out);
    if (!dump_edges->empty()) save_ppm(stack_channels(res.edge_map), *dump_edges);
    if (!dump_sel->empty())
      save_ppm(selection_as_gray(res.selection, cfg.ladder), *dump_sel);
    if (!dump_pal->empty()) {
      std::vector<std::vector<std::string>> rows = {{"r", "g", "b"}};
      for (int j = 0; j < res.palette.k; ++j)
        rows.push_back({csv_double(res.palette.centers[3 * j + 0]),
                        csv_double(res.palette.centers[3 * j + 1]),
                        csv_double(res.palette.centers[3 * j + 2])});
      emit_csv(*dump_pal, rows, "--dump-palette");
    }
  });
}

// ---------------------------------------------------------------- attack

void setup_attack(CLI::App& app) {
  auto sub = app.add_subcommand(
      "attack", "Run L-inf PGD over a dataset and report per-example results");
  auto c = std::make_shared<Common>();
  auto model_path = std::make_shared<std::string>();
  auto data_dir = std::make_shared<std::string>();
  auto method = std::make_shared<std::string>("direct");
  auto defense = std::make_shared<std::string>();
  auto out_csv = std::make_shared<std::string>();
  auto dump_adv = std::make_shared<std::string>();
  auto spec = std::make_shared<AttackSpec>();

  sub->add_option("--model", *model_path, "Model binary")->required();
  sub->add_option("--data", *data_dir, "Dataset directory")->required();
  sub->add_option("--method", *method, "direct|bpda|bpda-ag (default direct)");
  sub->add_option("--eps", spec->epsilon, "L-inf radius (default 0.031)");
  sub->add_option("--alpha", spec->alpha, "Step size (default 0.007)");
  sub->add_option("--steps", spec->steps, "Iterations (default 20)");
  sub->add_flag("--random-start", spec->random_start,
                "Start from a uniform point in the eps-ball");
  sub->add_option("--sobel-lambda", spec->sobel_lambda,
                  "Weight of the mean-Sobel-response objective term");
  sub->add_option("--defense", *defense,
                  "Defense preset the attack must penetrate (cifar10|resisc45)");
  sub->add_option("--out-csv", *out_csv, "Per-example results CSV (default stdout)");
  sub->add_option("--dump-adv", *dump_adv,
                  "Directory for adversarial PPMs (plus transformed versions "
                  "when defended)");
  add_common(sub, *c);

  sub->callback([=]() {
    c->apply();
    spec->method = parse_attack_method(*method);
    spec->seed = c->seed;
    spec->validate();
    EFConfig def;
    const EFConfig* dp = nullptr;
    if (!defense->empty()) {
      def = preset(*defense);
      def.kmeans.seed = c->seed;
      dp = &def;
    }
    if (spec->method != AttackMethod::direct && !dp)
      throw std::invalid_argument("attack: --method " + *method +
                                  " requires --defense");
    const SoftmaxClassifier model = load_model(*model_path);
    const LabeledDataset data = load_dataset(*data_dir);

    const int n = static_cast<int>(data.size());
    std::vector<AttackResult> results(static_cast<std::size_t>(n));
    std::vector<int> preds(static_cast<std::size_t>(n));
    parallel_for(n, [&](int lo, int hi) {
      for (int i = lo; i < hi; ++i) {
        AttackSpec s = *spec;
        s.seed = derive_seed(spec->seed, seed_stream::kExample,
                             static_cast<std::uint64_t>(i));
        auto& r = results[static_cast<std::size_t>(i)];
        r = pgd(model, data.images[static_cast<std::size_t>(i)],
                data.labels[static_cast<std::size_t>(i)], s, dp);
        // The prediction backing r.success, recomputed for the report.
        Image judged = dp ? essential_features(r.adversarial, def).output
                          : r.adversarial;
        const auto l = logits(model, judged);
        int best = 0;
        for (int j = 1; j < static_cast<int>(l.size()); ++j)
          if (l[static_cast<std::size_t>(j)] > l[static_cast<std::size_t>(best)])
            best = j;
        preds[static_cast<std::size_t>(i)] = best;
      }
    });

    std::vector<std::vector<std::string>> rows = {
        {"index", "label", "prediction", "success", "linf", "final_loss"}};
    std::size_t held = 0;
    for (int i = 0; i < n; ++i) {
      const auto& r = results[static_cast<std::size_t>(i)];
      double linf = 0.0;
      const Image& orig = data.images[static_cast<std::size_t>(i)];
      for (std::size_t j = 0; j < orig.size(); ++j)
        linf = std::max(linf, std::abs(r.adversarial.data[j] - orig.data[j]));
      rows.push_back({std::to_string(i),
                      std::to_string(data.labels[static_cast<std::size_t>(i)]),
                      std::to_string(preds[static_cast<std::size_t>(i)]),
                      r.success ? "1" : "0", csv_double(linf),
                      csv_double(r.loss_trace.back())});
      held += !r.success;
    }
    emit_csv(*out_csv, rows, "--out-csv");
    if (!out_csv->empty()) {
      std::cout << "robust_accuracy,"
                << csv_double(static_cast<double>(held) / n) << "\n";
    }

    if (!dump_adv->empty()) {
      std::filesystem::create_directories(*dump_adv);
      char name[48];
      for (int i = 0; i < n; ++i) {
        const auto& adv = results[static_cast<std::size_t>(i)].adversarial;
        std::snprintf(name, sizeof(name), "adv_%05d.ppm", i);
        save_ppm(adv, (std::filesystem::path(*dump_adv) / name).string());
        if (dp) {
          std::snprintf(name, sizeof(name), "adv_%05d_ef.ppm", i);
          save_ppm(essential_features(adv, def).output,
                   (std::filesystem::path(*dump_adv) / name).string());
        }
      }
    }
  });
}

// ----------------------------------------------------------------- train

void setup_train(CLI::App& app) {
  auto sub = app.add_subcommand("train",
                                "Train the softmax classifier on a dataset");
  auto c = std::make_shared<Common>();
  auto data_dir = std::make_shared<std::string>();
  auto out_path = std::make_shared<std::string>();
  auto metrics_path = std::make_shared<std::string>();
  auto milestones = std::make_shared<std::string>();
  auto adv_train = std::make_shared<std::string>();
  auto defense = std::make_shared<std::string>();
  auto crop_fill = std::make_shared<std::string>("zero");
  auto cfg = std::make_shared<TrainConfig>();
  auto atk = std::make_shared<AttackSpec>();

  sub->add_option("--data", *data_dir, "Training dataset directory")->required();
  sub->add_option("--out", *out_path, "Output model binary")->required();
  sub->add_option("--metrics", *metrics_path, "Per-epoch metrics CSV");
  sub->add_option("--epochs", cfg->epochs, "Training epochs (default 30)");
  sub->add_option("--batch", cfg->batch, "Minibatch size (default 16)");
  sub->add_option("--lr-milestones", *milestones,
                  "epoch:lr pairs, e.g. 0:0.1,22:0.01,27:0.001 (default "
                  "0.1 dropping 10x at 75% and 90%)");
  sub->add_option("--momentum", cfg->momentum, "SGD momentum (default 0.9)");
  sub->add_option("--weight-decay", cfg->weight_decay,
                  "L2 weight decay (default 0.0002)");
  sub->add_flag("--augment", cfg->augment,
                "Random horizontal flip + pad-and-crop");
  sub->add_option("--crop-pad", cfg->crop_pad,
                  "Pad amount for crop augmentation (default 4)");
  sub->add_option("--crop-fill", *crop_fill,
                  "zero|reflect crop padding (default zero)");
  sub->add_option("--adv-train", *adv_train,
                  "Inner-maximization method: direct|bpda|bpda-ag");
  sub->add_option("--eps", atk->epsilon, "Adversarial-training L-inf radius");
  sub->add_option("--alpha", atk->alpha, "Adversarial-training step size");
  sub->add_option("--steps", atk->steps, "Adversarial-training PGD steps");
  sub->add_option("--defense", *defense,
                  "Train in the transformed space of this preset");
  add_common(sub, *c);

  sub->callback([=]() {
    c->apply();
    cfg->seed = c->seed;
    if (!milestones->empty()) cfg->lr_milestones = parse_milestones(*milestones);
    if (*crop_fill == "reflect") cfg->crop_reflect = true;
    else if (*crop_fill != "zero")
      throw std::invalid_argument("--crop-fill: expected zero or reflect");

    const AttackSpec* ap = nullptr;
    if (!adv_train->empty()) {
      atk->method = parse_attack_method(*adv_train);
      ap = atk.get();
    }
    EFConfig def;
    const EFConfig* dp = nullptr;
    if (!defense->empty()) {
      def = preset(*defense);
      def.kmeans.seed = c->seed;
      dp = &def;
    }
    if (ap && atk->method != AttackMethod::direct && !dp)
      throw std::invalid_argument("train: --adv-train " + *adv_train +
                                  " requires --defense");

    const LabeledDataset data = load_dataset(*data_dir);
    SoftmaxClassifier model =
        init_classifier(data.images[0].height, data.images[0].width,
                        data.images[0].channels, data.class_count, c->seed);
    const TrainResult tr = train(std::move(model), data, *cfg, ap, dp);
    save_model(tr.model, *out_path);
    if (!metrics_path->empty()) {
      std::vector<std::vector<std::string>> rows = {
          {"epoch", "lr", "mean_loss", "accuracy"}};
      for (const auto& m : tr.metrics)
        rows.push_back({std::to_string(m.epoch), csv_double(m.lr),
                        csv_double(m.mean_loss), csv_double(m.accuracy)});
      emit_csv(*metrics_path, rows, "--metrics");
    }
    std::cout << "final_epoch_accuracy,"
              << csv_double(tr.metrics.back().accuracy) << "\n";
  });
}

// ------------------------------------------------------------------ eval

void setup_eval(CLI::App& app) {
  auto sub = app.add_subcommand(
      "eval", "Natural + robust accuracy report at the standard attack setting");
  auto c = std::make_shared<Common>();
  auto model_path = std::make_shared<std::string>();
  auto data_dir = std::make_shared<std::string>();
  auto defense = std::make_shared<std::string>();
  auto out_csv = std::make_shared<std::string>();

  sub->add_option("--model", *model_path, "Model binary")->required();
  sub->add_option("--data", *data_dir, "Dataset directory")->required();
  sub->add_option("--defense", *defense, "Defense preset (cifar10|resisc45)");
  sub->add_option("--out-csv", *out_csv, "Report CSV (default stdout)");
  add_common(sub, *c);

  sub->callback([=]() {
    c->apply();
    EFConfig def;
    const EFConfig* dp = nullptr;
    if (!defense->empty()) {
      def = preset(*defense);
      def.kmeans.seed = c->seed;
      dp = &def;
    }
    const SoftmaxClassifier model = load_model(*model_path);
    const LabeledDataset data = load_dataset(*data_dir);
    const auto report = robustness_report(model, data, dp, c->seed);
    std::vector<std::vector<std::string>> rows = {
        {"column", "accuracy", "worst_flag"}};
    for (const auto& r : report)
      rows.push_back({r.column, csv_double(r.accuracy), r.worst ? "1" : "0"});
    emit_csv(*out_csv, rows, "--out-csv");
  });
}

// ----------------------------------------------------------------- sweep

void setup_sweep(CLI::App& app) {
  auto sub = app.add_subcommand("sweep", "Robust accuracy across epsilons");
  auto c = std::make_shared<Common>();
  auto model_path = std::make_shared<std::string>();
  auto data_dir = std::make_shared<std::string>();
  auto eps_list = std::make_shared<std::string>();
  auto method = std::make_shared<std::string>("direct");
  auto defense = std::make_shared<std::string>();
  auto out_csv = std::make_shared<std::string>();
  auto spec = std::make_shared<AttackSpec>();

  sub->add_option("--model", *model_path, "Model binary")->required();
  sub->add_option("--data", *data_dir, "Dataset directory")->required();
  sub->add_option("--eps-list", *eps_list, "Comma-separated epsilons")
      ->required();
  sub->add_option("--method", *method, "direct|bpda|bpda-ag (default direct)");
  sub->add_option("--alpha", spec->alpha, "Step size (default 0.007)");
  sub->add_option("--steps", spec->steps, "Iterations (default 20)");
  sub->add_option("--sobel-lambda", spec->sobel_lambda,
                  "Weight of the mean-Sobel-response objective term");
  sub->add_option("--defense", *defense, "Defense preset (cifar10|resisc45)");
  sub->add_option("--out-csv", *out_csv, "Sweep CSV (default stdout)");
  add_common(sub, *c);

  sub->callback([=]() {
    c->apply();
    spec->method = parse_attack_method(*method);
    spec->seed = c->seed;
    EFConfig def;
    const EFConfig* dp = nullptr;
    if (!defense->empty()) {
      def = preset(*defense);
      def.kmeans.seed = c->seed;
      dp = &def;
    }
    if (spec->method != AttackMethod::direct && !dp)
      throw std::invalid_argument("sweep: --method " + *method +
                                  " requires --defense");
    const SoftmaxClassifier model = load_model(*model_path);
    const LabeledDataset data = load_dataset(*data_dir);
    const auto points = epsilon_sweep(
        model, data, parse_double_list(*eps_list, "--eps-list"), *spec, dp);
    std::vector<std::vector<std::string>> rows = {{"epsilon", "accuracy"}};
    for (const auto& p : points)
      rows.push_back({csv_double(p.epsilon), csv_double(p.accuracy)});
    emit_csv(*out_csv, rows, "--out-csv");
  });
}

// ----------------------------------------------------------------- synth

void setup_synth(CLI::App& app) {
  auto sub = app.add_subcommand(
      "synth", "Materialize the synthetic shapes dataset as PPM + labels.csv");
  auto c = std::make_shared<Common>();
  auto out_dir = std::make_shared<std::string>();
  auto classes = std::make_shared<int>(3);
  auto per_class = std::make_shared<int>(50);
  auto side = std::make_shared<int>(32);

  sub->add_option("--out", *out_dir, "Output dataset directory")->required();
  sub->add_option("--classes", *classes, "Class count, 1-5 (default 3)");
  sub->add_option("--per-class", *per_class, "Examples per class (default 50)");
  sub->add_option("--side", *side, "Image side length (default 32)");
  add_common(sub, *c);

  sub->callback([=]() {
    c->apply();
    Rng rng(derive_seed(c->seed, seed_stream::kSynth, 0));
    save_dataset(synth_dataset(*classes, *per_class, *side, rng), *out_dir);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Essential-features defense: transform, attack, train, "
               "evaluate"};
  app.require_subcommand(1);
  setup_transform(app);
  setup_attack(app);
  setup_train(app);
  setup_eval(app);
  setup_sweep(app);
  setup_synth(app);

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);  // prints help or the parse error
    return rc == 0 ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
