#include "ebm/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include <CLI11.hpp>

#include "ebm/dataset.hpp"
#include "ebm/dbn.hpp"
#include "ebm/errors.hpp"
#include "ebm/io.hpp"
#include "ebm/persistence.hpp"
#include "ebm/rbm.hpp"
#include "ebm/variants.hpp"
#include "ebm/visual.hpp"

namespace ebm::cli {

namespace {

/// Raised for flag combinations CLI11 cannot express; maps to exit code 1.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

class Logger {
 public:
  Logger(std::ostream& out, std::ostream& err) : out_(out), err_(err) {
    if (const char* env = std::getenv("EBM_LOG_LEVEL")) {
      const std::string value = env;
      if (value == "error") level_ = LogLevel::error;
      else if (value == "warn") level_ = LogLevel::warn;
      else if (value == "info") level_ = LogLevel::info;
      else if (value == "debug") level_ = LogLevel::debug;
      else warn("ignoring unknown EBM_LOG_LEVEL '" + value + "'");
    }
  }

  void open_file(const std::string& path) {
    file_.open(path, std::ios::app);
    if (!file_) throw IoError("cannot open log file '" + path + "'");
  }

  void info(const std::string& line) { emit(LogLevel::info, out_, line); }
  void debug(const std::string& line) { emit(LogLevel::debug, out_, line); }
  void warn(const std::string& line) { emit(LogLevel::warn, err_, "warning: " + line); }

  void epoch(const EpochRecord& e) {
    info("epoch=" + std::to_string(e.epoch_index) + " mse=" + fmt(e.mse) + " pl=" + fmt(e.pl) +
         " time_ms=" + std::to_string(e.wall_time_ms));
  }

 private:
  void emit(LogLevel level, std::ostream& stream, const std::string& line) {
    if (level > level_) return;
    stream << line << '\n';
    if (file_.is_open()) file_ << line << '\n' << std::flush;
  }

  std::ostream& out_;
  std::ostream& err_;
  LogLevel level_ = LogLevel::info;
  std::ofstream file_;
};

Shape2d parse_shape(const std::string& text, const char* flag) {
  const auto x = text.find('x');
  try {
    if (x == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    const unsigned long rows = std::stoul(text.substr(0, x), &used);
    if (used != x) throw std::invalid_argument(text);
    const std::string tail = text.substr(x + 1);
    const unsigned long cols = std::stoul(tail, &used);
    if (used != tail.size() || rows == 0 || cols == 0) throw std::invalid_argument(text);
    return {rows, cols};
  } catch (const std::exception&) {
    throw UsageError(std::string(flag) + " expects ROWSxCOLS, got '" + text + "'");
  }
}

/// Loads images (and labels) and applies the preprocessing the model kind expects.
struct DataOptions {
  std::string images;
  std::string labels;
  std::optional<double> binarize;
  std::size_t limit = 0;
};

Dataset load_data(const DataOptions& opts, std::string_view kind, const Standardization* stats,
                  StandardizedDataset* standardized_out = nullptr) {
  Dataset raw = load_idx_images(opts.images);
  if (!opts.labels.empty()) raw = raw.with_labels(load_idx_labels(opts.labels));
  if (opts.limit > 0) raw = raw.head(opts.limit);

  if (kind == "gaussian-rbm") {
    if (opts.binarize) throw UsageError("--binarize does not apply to gaussian-rbm");
    if (stats != nullptr) return apply_standardization(raw, *stats);
    StandardizedDataset s = standardize(raw);
    if (standardized_out != nullptr) *standardized_out = s;
    return s.data;
  }
  if (kind == "sigmoid-rbm") {
    return opts.binarize ? binarize(raw, *opts.binarize) : raw;
  }
  return binarize(raw, opts.binarize.value_or(kDefaultBinarizeThreshold));
}

std::string join_sizes(const std::vector<std::size_t>& sizes) {
  std::string out;
  for (std::size_t i = 0; i < sizes.size(); ++i) out += (i ? "," : "") + std::to_string(sizes[i]);
  return out;
}

const Rbm& primary_rbm(const AnyModel& model) {
  return std::visit(
      [](const auto& m) -> const Rbm& {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Rbm>) return m;
        else if constexpr (std::is_same_v<T, Dbn>) return m.layer(0);
        else return m.base();
      },
      model);
}

VisibleUnits units_of(const AnyModel& model) {
  if (std::holds_alternative<GaussianRbm>(model)) return VisibleUnits::gaussian;
  if (std::holds_alternative<SigmoidRbm>(model)) return VisibleUnits::sigmoid;
  return VisibleUnits::bernoulli;
}

const Standardization* stats_of(const AnyModel& model) {
  if (const auto* g = std::get_if<GaussianRbm>(&model)) return &g->statistics();
  return nullptr;
}

Reconstruction reconstruct_any(const AnyModel& model, const Dataset& data, std::size_t batch_size) {
  return std::visit(
      [&](const auto& m) -> Reconstruction {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Dbn>) return m.reconstruct(data.samples());
        else return m.reconstruct(data, batch_size);
      },
      model);
}

Shape2d default_shape(std::size_t features, std::optional<Shape2d> data_shape) {
  if (data_shape && data_shape->rows * data_shape->cols == features) return *data_shape;
  for (std::size_t side = 1; side * side <= features; ++side) {
    if (side * side == features) return {side, side};
  }
  return {1, features};
}

std::string image_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%05zu.pgm", index);
  return buf;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::string model;
  DataOptions data;
  std::string out;
  std::size_t visible = 0;
  std::size_t hidden = 0;
  std::vector<std::size_t> layers;
  RbmConfig config;
  std::size_t batch_size = 128;
  std::size_t epochs = 5;
  std::optional<double> drop_rate;
  bool scale_for_inference = false;
  std::size_t fine_tune_epochs = 0;
  std::size_t classes = 0;
  double fine_tune_lr = 0.1;
  std::string history_csv;
  bool csv_wall_time = false;
};

void export_history(const TrainingHistory& history, const TrainArgs& args) {
  if (args.history_csv.empty()) return;
  if (args.csv_wall_time) {
    export_history_csv(history, args.history_csv);
    return;
  }
  TrainingHistory stripped;
  for (EpochRecord e : history.epochs()) {
    e.wall_time_ms = 0;
    stripped.push(e);
  }
  export_history_csv(stripped, args.history_csv);
}

int run_train(const TrainArgs& args, Logger& log) {
  if (args.model != "dbn" && args.hidden == 0) throw UsageError("train: --hidden is required for " + args.model);
  if (args.model == "dbn" && args.layers.size() < 2) throw UsageError("train: --layers is required for dbn");
  if (args.model != "dbn" && !args.layers.empty()) throw UsageError("train: --layers only applies to dbn");
  if (args.drop_rate && args.model != "dropout-rbm") throw UsageError("train: --drop-rate only applies to dropout-rbm");
  if (args.fine_tune_epochs > 0 && (args.model != "dbn" || args.data.labels.empty() || args.classes < 2)) {
    throw UsageError("train: fine-tuning needs --model dbn, --labels and --classes >= 2");
  }

  StandardizedDataset standardized{Dataset::from_matrix(Matrix(0, 1)), {}};
  const Dataset data = load_data(args.data, args.model, nullptr, &standardized);
  const std::size_t features = data.num_features();
  if (args.visible != 0 && args.visible != features) {
    throw InvalidArgument("train: --visible " + std::to_string(args.visible) + " but data has " +
                          std::to_string(features) + " features");
  }
  RbmConfig config = args.config;
  config.n_visible = features;
  config.n_hidden = args.hidden;
  log.debug("train: " + std::to_string(data.size()) + " samples, mode " + std::string(to_string(data.mode())));

  const EpochCallback on_epoch = [&log](const EpochRecord& e) { log.epoch(e); };
  std::optional<AnyModel> model;
  const TrainingHistory* history = nullptr;

  if (args.model == "rbm") {
    Rbm rbm(config);
    rbm.fit(data, args.batch_size, args.epochs, on_epoch);
    model.emplace(std::move(rbm));
    history = &std::get<Rbm>(*model).history();
  } else if (args.model == "dropout-rbm") {
    DropoutRbm rbm(config, args.drop_rate.value_or(0.5));
    rbm.fit(data, args.batch_size, args.epochs, on_epoch);
    if (args.scale_for_inference) rbm.scale_for_inference();
    model.emplace(std::move(rbm));
    history = &std::get<DropoutRbm>(*model).base().history();
  } else if (args.model == "gaussian-rbm") {
    GaussianRbm rbm(config);
    rbm.fit(data, args.batch_size, args.epochs, on_epoch);
    model.emplace(std::move(rbm));
    history = &std::get<GaussianRbm>(*model).base().history();
  } else if (args.model == "sigmoid-rbm") {
    SigmoidRbm rbm(config);
    rbm.fit(data, args.batch_size, args.epochs, on_epoch);
    model.emplace(std::move(rbm));
    history = &std::get<SigmoidRbm>(*model).base().history();
  } else {
    if (args.layers.front() != features) {
      throw InvalidArgument("train: --layers starts with " + std::to_string(args.layers.front()) +
                            " but data has " + std::to_string(features) + " features");
    }
    Dbn dbn(args.layers, config);
    for (std::size_t i = 0; i < dbn.num_layers(); ++i) {
      log.info("layer=" + std::to_string(i));
      dbn.fit_layer(i, data, args.batch_size, args.epochs, on_epoch);
    }
    if (args.fine_tune_epochs > 0) {
      FineTuneOptions ft{args.classes, args.batch_size, args.fine_tune_epochs, args.fine_tune_lr};
      for (const FineTuneRecord& r : dbn.fine_tune(data, ft)) {
        log.info("fine_tune_epoch=" + std::to_string(r.epoch_index) + " cross_entropy=" +
                 fmt(r.cross_entropy) + " accuracy=" + fmt(r.accuracy));
      }
    }
    model.emplace(std::move(dbn));
    history = &std::get<Dbn>(*model).layer(0).history();
  }

  save(*model, args.out);
  export_history(*history, args);
  log.info("saved " + std::string(model_kind(*model)) + " model to " + args.out);
  return kExitOk;
}

// ---------------------------------------------------------------- reconstruct

struct ReconstructArgs {
  std::string model_file;
  DataOptions data;
  std::size_t batch_size = 1000;
  std::string out_mse = "-";
  std::string dump_images;
  std::string shape;
};

int run_reconstruct(const ReconstructArgs& args, Logger& log, std::ostream& out) {
  const AnyModel model = load(args.model_file);
  const Dataset data = load_data(args.data, model_kind(model), stats_of(model));
  const Reconstruction rec = reconstruct_any(model, data, args.batch_size);

  if (!args.dump_images.empty()) {
    const Shape2d shape = args.shape.empty()
                              ? default_shape(data.num_features(), Shape2d{data.feature_rows(), data.feature_cols()})
                              : parse_shape(args.shape, "--shape");
    std::filesystem::create_directories(args.dump_images);
    for (Eigen::Index s = 0; s < rec.visible.rows(); ++s) {
      write_pgm(tensor_to_image(rec.visible.row(s), shape),
                std::filesystem::path(args.dump_images) / image_name(static_cast<std::size_t>(s)));
    }
    log.debug("wrote " + std::to_string(rec.visible.rows()) + " images to " + args.dump_images);
  }

  const std::string line = "rec_mse=" + fmt(rec.mse) + "\n";
  if (args.out_mse == "-") {
    out << line;
  } else {
    io::atomic_write(args.out_mse, line);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- sample

struct SampleArgs {
  std::string model_file;
  std::size_t gibbs_steps = 1000;
  std::size_t count = 16;
  std::string init = "random";
  DataOptions data;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string shape;
};

// k sweeps of v -> h -> v on `rbm`, returning the final visible activations.
Matrix run_chain(const Rbm& rbm, Matrix v, std::size_t steps, VisibleUnits units, Rng& rng) {
  Matrix pv = v;
  for (std::size_t k = 0; k < steps; ++k) {
    const Matrix h = bernoulli_sample(rbm.prob_h_given_v(v), rng);
    pv = rbm.visible_mean(h, units);
    v = units == VisibleUnits::bernoulli ? bernoulli_sample(pv, rng) : pv;
  }
  return pv;
}

int run_sample(const SampleArgs& args, Logger& log) {
  if (args.init != "random" && args.init != "data") throw UsageError("sample: --init must be random or data");
  if (args.init == "data" && args.data.images.empty()) throw UsageError("sample: --init data requires --data");
  if (args.count == 0) throw UsageError("sample: --count must be >= 1");

  const AnyModel model = load(args.model_file);
  const VisibleUnits units = units_of(model);
  Rng rng(args.seed);

  const Dbn* dbn = std::get_if<Dbn>(&model);
  const Rbm& top = dbn ? dbn->layer(dbn->num_layers() - 1) : primary_rbm(model);
  const std::size_t bottom_features = primary_rbm(model).n_visible();

  Matrix start;
  std::optional<Shape2d> data_shape;
  if (args.init == "data") {
    const Dataset data = load_data(args.data, model_kind(model), stats_of(model)).head(args.count);
    data_shape = Shape2d{data.feature_rows(), data.feature_cols()};
    start = dbn ? dbn->transform(data.samples(), 0, dbn->num_layers() - 1) : data.samples();
    if (dbn) start = bernoulli_sample(start, rng);
  } else {
    const auto width = static_cast<Eigen::Index>(top.n_visible());
    start = units == VisibleUnits::gaussian ? Matrix(Matrix::Zero(static_cast<Eigen::Index>(args.count), width))
                                            : bernoulli_sample(Matrix(Matrix::Constant(static_cast<Eigen::Index>(args.count), width, 0.5)), rng);
  }

  Matrix visible = run_chain(top, start, args.gibbs_steps, units, rng);
  if (dbn) {
    for (std::size_t i = dbn->num_layers() - 1; i-- > 0;) visible = dbn->layer(i).prob_v_given_h(visible);
  }
  if (const Standardization* stats = stats_of(model)) {
    visible = (visible.array().rowwise() * stats->stddev.transpose().array()).rowwise() +
              stats->mean.transpose().array();
  }

  const Shape2d shape = args.shape.empty() ? default_shape(bottom_features, data_shape) : parse_shape(args.shape, "--shape");
  std::filesystem::create_directories(args.out_dir);
  for (Eigen::Index s = 0; s < visible.rows(); ++s) {
    write_pgm(tensor_to_image(visible.row(s), shape),
              std::filesystem::path(args.out_dir) / image_name(static_cast<std::size_t>(s)));
  }
  log.info("wrote " + std::to_string(visible.rows()) + " samples to " + args.out_dir);
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string model_file;
  DataOptions data;
  std::size_t batch_size = 1000;
  std::uint64_t seed = 0;
};

int run_eval(const EvalArgs& args, std::ostream& out) {
  const AnyModel model = load(args.model_file);
  const Dataset data = load_data(args.data, model_kind(model), stats_of(model));
  const Reconstruction rec = reconstruct_any(model, data, args.batch_size);

  double pl = std::numeric_limits<double>::quiet_NaN();
  if (units_of(model) != VisibleUnits::gaussian) {
    Rng rng(args.seed);
    const Matrix bits = data.mode() == DataMode::binarized
                            ? data.samples()
                            : Matrix((data.samples().array() > kDefaultBinarizeThreshold).cast<double>());
    pl = pseudo_likelihood(primary_rbm(model), bits, rng);
  }
  std::string line = "mse=" + fmt(rec.mse) + " pl=" + fmt(pl);

  if (const Dbn* dbn = std::get_if<Dbn>(&model); dbn && dbn->head() && data.has_labels()) {
    const Prediction pred = dbn->predict(data.samples());
    std::size_t correct = 0;
    for (std::size_t s = 0; s < pred.labels.size(); ++s) {
      if (pred.labels[s] == (*data.labels())[s]) ++correct;
    }
    line += " accuracy=" + fmt(static_cast<double>(correct) / static_cast<double>(data.size()));
  }
  out << line << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- mosaic

struct MosaicArgs {
  std::string model_file;
  std::string out;
  std::string tile;
  std::string grid;
  std::size_t pad = 1;
  std::size_t layer = 0;
};

int run_mosaic(const MosaicArgs& args, Logger& log) {
  const AnyModel model = load(args.model_file);
  const Dbn* dbn = std::get_if<Dbn>(&model);
  if (!dbn && args.layer != 0) throw UsageError("mosaic: --layer only applies to dbn models");
  if (dbn && args.layer >= dbn->num_layers()) throw UsageError("mosaic: --layer out of range");
  const Rbm& rbm = dbn ? dbn->layer(args.layer) : primary_rbm(model);

  const Shape2d tile = args.tile.empty() ? default_shape(rbm.n_visible(), std::nullopt) : parse_shape(args.tile, "--tile");
  Shape2d grid;
  if (args.grid.empty()) {
    const std::size_t units = rbm.n_hidden();
    std::size_t cols = 1;
    while (cols * cols < units) ++cols;
    grid = {(units + cols - 1) / cols, cols};
  } else {
    grid = parse_shape(args.grid, "--grid");
  }
  write_pgm(weight_mosaic(rbm.weights(), tile, grid, args.pad), args.out);
  log.info("wrote mosaic to " + args.out);
  return kExitOk;
}

// ---------------------------------------------------------------- info

void describe_rbm(const Rbm& rbm, const std::string& prefix, std::ostream& out) {
  const RbmConfig& c = rbm.config();
  out << prefix << "n_visible=" << c.n_visible << " n_hidden=" << c.n_hidden << " steps=" << c.steps
      << " learning_rate=" << fmt(c.learning_rate) << " momentum=" << fmt(c.momentum)
      << " decay=" << fmt(c.decay) << " temperature=" << fmt(c.temperature) << " seed=" << c.seed << '\n';
  out << prefix << "epochs_trained=" << rbm.history().epochs().size();
  if (!rbm.history().empty()) {
    const EpochRecord& last = rbm.history().epochs().back();
    out << " last_mse=" << fmt(last.mse) << " last_pl=" << fmt(last.pl);
  }
  out << '\n';
}

int run_info(const std::string& model_file, bool header, std::ostream& out) {
  if (header) {
    out << read_header(model_file) << '\n';
    return kExitOk;
  }
  const AnyModel model = load(model_file);
  out << "kind=" << model_kind(model) << '\n';
  if (const Dbn* dbn = std::get_if<Dbn>(&model)) {
    out << "layers=" << join_sizes(dbn->layer_sizes()) << '\n';
    for (std::size_t i = 0; i < dbn->num_layers(); ++i) {
      describe_rbm(dbn->layer(i), "layer" + std::to_string(i) + ".", out);
    }
    if (dbn->head()) {
      out << "head.classes=" << dbn->head()->num_classes()
          << " fine_tune_epochs=" << dbn->history().fine_tune_epochs().size() << '\n';
    }
    return kExitOk;
  }
  const Rbm& rbm = primary_rbm(model);
  out << "layers=" << rbm.n_visible() << "," << rbm.n_hidden() << '\n';
  describe_rbm(rbm, "", out);
  if (const auto* d = std::get_if<DropoutRbm>(&model)) {
    out << "drop_rate=" << fmt(d->drop_rate()) << " inference_scaled=" << (d->inference_scaled() ? "true" : "false") << '\n';
  }
  return kExitOk;
}

void add_data_flags(CLI::App* cmd, DataOptions& data, bool required) {
  auto* opt = cmd->add_option("--data", data.images, "IDX3 image file");
  if (required) opt->required();
  cmd->add_option("--labels", data.labels, "IDX1 label file");
  cmd->add_option("--binarize", data.binarize, "Binarization threshold in (0,1)")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--limit", data.limit, "Use only the first N samples (0 = all)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Energy-based models: RBM variants and deep belief networks", "ebm"};
  app.require_subcommand(1);

  TrainArgs train;
  std::string log_file;
  auto* train_cmd = app.add_subcommand("train", "Train a model and save it");
  train_cmd->add_option("--model", train.model, "rbm | dropout-rbm | gaussian-rbm | sigmoid-rbm | dbn")
      ->required()
      ->check(CLI::IsMember({"rbm", "dropout-rbm", "gaussian-rbm", "sigmoid-rbm", "dbn"}));
  add_data_flags(train_cmd, train.data, true);
  train_cmd->add_option("--out", train.out, "Output model file (.ebm)")->required();
  train_cmd->add_option("--visible", train.visible, "Expected number of visible units");
  train_cmd->add_option("--hidden", train.hidden, "Number of hidden units")->check(CLI::PositiveNumber);
  train_cmd->add_option("--layers", train.layers, "DBN layer sizes, visible first")->delimiter(',');
  train_cmd->add_option("--steps", train.config.steps, "CD-k Gibbs steps")->check(CLI::PositiveNumber);
  train_cmd->add_option("--lr", train.config.learning_rate, "Learning rate")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--momentum", train.config.momentum, "Momentum in [0,1)")->check(CLI::Range(0.0, 1.0));
  train_cmd->add_option("--decay", train.config.decay, "L2 weight decay")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--temperature", train.config.temperature, "Hidden activation temperature")->check(CLI::PositiveNumber);
  train_cmd->add_option("--batch-size", train.batch_size, "Mini-batch size")->check(CLI::PositiveNumber);
  train_cmd->add_option("--epochs", train.epochs, "Epochs (per layer for dbn)")->check(CLI::PositiveNumber);
  train_cmd->add_option("--seed", train.config.seed, "Random seed");
  train_cmd->add_option("--drop-rate", train.drop_rate, "Hidden dropout probability")->check(CLI::Range(0.0, 1.0));
  train_cmd->add_flag("--scale-for-inference", train.scale_for_inference, "Scale dropout weights before saving");
  train_cmd->add_option("--fine-tune-epochs", train.fine_tune_epochs, "Supervised epochs for dbn");
  train_cmd->add_option("--classes", train.classes, "Number of classes for the softmax head");
  train_cmd->add_option("--fine-tune-lr", train.fine_tune_lr, "Fine-tuning learning rate")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--history-csv", train.history_csv, "Write per-epoch history as CSV");
  train_cmd->add_flag("--csv-wall-time", train.csv_wall_time, "Include measured epoch times in the CSV");
  train_cmd->add_option("--log", log_file, "Append log lines to this file");

  ReconstructArgs rec;
  auto* rec_cmd = app.add_subcommand("reconstruct", "Mean-field reconstruction of a dataset");
  rec_cmd->add_option("--model-file", rec.model_file, "Model file")->required();
  add_data_flags(rec_cmd, rec.data, true);
  rec_cmd->add_option("--batch-size", rec.batch_size, "Batch size")->check(CLI::PositiveNumber);
  rec_cmd->add_option("--out-mse", rec.out_mse, "Where to write rec_mse ('-' = stdout)");
  rec_cmd->add_option("--dump-images", rec.dump_images, "Directory for per-sample PGMs");
  rec_cmd->add_option("--shape", rec.shape, "Image shape ROWSxCOLS");
  rec_cmd->add_option("--log", log_file, "Append log lines to this file");

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample", "Run Gibbs chains and write samples as PGMs");
  sample_cmd->add_option("--model-file", sample.model_file, "Model file")->required();
  sample_cmd->add_option("--gibbs-steps", sample.gibbs_steps, "Gibbs sweeps per chain");
  sample_cmd->add_option("--count", sample.count, "Number of chains");
  sample_cmd->add_option("--init", sample.init, "random | data");
  add_data_flags(sample_cmd, sample.data, false);
  sample_cmd->add_option("--seed", sample.seed, "Random seed");
  sample_cmd->add_option("--out-dir", sample.out_dir, "Output directory")->required();
  sample_cmd->add_option("--shape", sample.shape, "Image shape ROWSxCOLS");
  sample_cmd->add_option("--log", log_file, "Append log lines to this file");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Print reconstruction MSE, pseudo-likelihood and accuracy");
  eval_cmd->add_option("--model-file", eval.model_file, "Model file")->required();
  add_data_flags(eval_cmd, eval.data, true);
  eval_cmd->add_option("--batch-size", eval.batch_size, "Batch size")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--seed", eval.seed, "Seed for the pseudo-likelihood flips");

  MosaicArgs mosaic;
  auto* mosaic_cmd = app.add_subcommand("mosaic", "Write a weight mosaic as PGM");
  mosaic_cmd->add_option("--model-file", mosaic.model_file, "Model file")->required();
  mosaic_cmd->add_option("--out", mosaic.out, "Output PGM")->required();
  mosaic_cmd->add_option("--tile", mosaic.tile, "Tile shape ROWSxCOLS");
  mosaic_cmd->add_option("--grid", mosaic.grid, "Grid shape ROWSxCOLS");
  mosaic_cmd->add_option("--pad", mosaic.pad, "Gutter width in pixels");
  mosaic_cmd->add_option("--layer", mosaic.layer, "DBN layer index");
  mosaic_cmd->add_option("--log", log_file, "Append log lines to this file");

  std::string info_file;
  auto* info_cmd = app.add_subcommand("info", "Describe a saved model");
  bool info_header = false;
  info_cmd->add_option("--model-file", info_file, "Model file")->required();
  info_cmd->add_flag("--header", info_header, "Print the raw JSON header instead of a summary");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  Logger log(out, err);
  try {
    if (!log_file.empty()) log.open_file(log_file);
    if (*train_cmd) return run_train(train, log);
    if (*rec_cmd) return run_reconstruct(rec, log, out);
    if (*sample_cmd) return run_sample(sample, log);
    if (*eval_cmd) return run_eval(eval, out);
    if (*mosaic_cmd) return run_mosaic(mosaic, log);
    if (*info_cmd) return run_info(info_file, info_header, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace ebm::cli
