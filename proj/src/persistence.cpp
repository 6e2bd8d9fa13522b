#include "ebm/persistence.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <optional>
#include <utility>

#include <json.hpp>

#include "ebm/errors.hpp"
#include "ebm/io.hpp"

namespace ebm {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::size_t kPreambleSize = kModelMagic.size() + 4;

// ---------------------------------------------------------------- writing

class PayloadWriter {
 public:
  void add(const std::string& name, const Matrix& m) {
    manifest_.push_back({{"name", name},
                         {"rows", m.rows()},
                         {"cols", m.cols()},
                         {"offset", bytes_.size()}});
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        append_f64(m(r, c));
      }
    }
  }

  void add(const std::string& name, const Vector& v) { add(name, Matrix(v)); }

  Json manifest() const { return manifest_; }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  void append_f64(double x) {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    for (int k = 0; k < 8; ++k) bytes_.push_back(static_cast<std::uint8_t>(bits >> (8 * k)));
  }

  Json manifest_ = Json::array();
  std::vector<std::uint8_t> bytes_;
};

Json nullable(double x) { return std::isnan(x) ? Json(nullptr) : Json(x); }

Json config_json(const RbmConfig& c) {
  return {{"n_visible", c.n_visible},     {"n_hidden", c.n_hidden}, {"steps", c.steps},
          {"learning_rate", c.learning_rate}, {"momentum", c.momentum}, {"decay", c.decay},
          {"temperature", c.temperature}, {"seed", c.seed}};
}

Json history_json(const TrainingHistory& h) {
  Json epochs = Json::array();
  for (const EpochRecord& e : h.epochs()) {
    epochs.push_back({{"epoch", e.epoch_index}, {"mse", e.mse}, {"pl", nullable(e.pl)}});
  }
  Json fine = Json::array();
  for (const FineTuneRecord& f : h.fine_tune_epochs()) {
    fine.push_back({{"epoch", f.epoch_index}, {"cross_entropy", f.cross_entropy}, {"accuracy", f.accuracy}});
  }
  return {{"epochs", epochs}, {"fine_tune", fine}};
}

Json rbm_json(const Rbm& rbm, const std::string& prefix, PayloadWriter& payload) {
  payload.add(prefix + "weights", rbm.weights());
  payload.add(prefix + "visible_bias", rbm.visible_bias());
  payload.add(prefix + "hidden_bias", rbm.hidden_bias());
  payload.add(prefix + "velocity_weights", rbm.velocity_weights());
  payload.add(prefix + "velocity_visible_bias", rbm.velocity_visible_bias());
  payload.add(prefix + "velocity_hidden_bias", rbm.velocity_hidden_bias());
  return {{"config", config_json(rbm.config())},
          {"rng_state", rbm.rng().state()},
          {"history", history_json(rbm.history())}};
}

struct HeaderBuilder {
  Json operator()(const Rbm& m) { return {{"kind", "rbm"}, {"rbm", rbm_json(m, "", payload)}}; }

  Json operator()(const DropoutRbm& m) {
    return {{"kind", "dropout-rbm"},
            {"rbm", rbm_json(m.base(), "", payload)},
            {"dropout",
             {{"drop_rate", m.drop_rate()},
              {"inference_scaled", m.inference_scaled()},
              {"mask_rng_state", m.mask_rng().state()}}}};
  }

  Json operator()(const GaussianRbm& m) {
    Json rbm = rbm_json(m.base(), "", payload);
    payload.add("feature_mean", m.feature_mean());
    payload.add("feature_std", m.feature_std());
    return {{"kind", "gaussian-rbm"}, {"rbm", rbm}};
  }

  Json operator()(const SigmoidRbm& m) {
    return {{"kind", "sigmoid-rbm"}, {"rbm", rbm_json(m.base(), "", payload)}};
  }

  Json operator()(const Dbn& m) {
    Json layers = Json::array();
    for (std::size_t i = 0; i < m.num_layers(); ++i) {
      layers.push_back(rbm_json(m.layer(i), "layer" + std::to_string(i) + ".", payload));
    }
    Json header = {{"kind", "dbn"},
                   {"layers", layers},
                   {"rng_state", m.rng().state()},
                   {"history", history_json(m.history())}};
    if (m.head()) {
      payload.add("head.weights", m.head()->weights);
      payload.add("head.bias", m.head()->bias);
      header["head"] = {{"classes", m.head()->num_classes()}, {"learning_rate", m.head()->learning_rate}};
    }
    return header;
  }

  PayloadWriter payload;
};

// ---------------------------------------------------------------- reading

std::uint32_t read_le32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int k = 3; k >= 0; --k) v = (v << 8) | bytes[offset + static_cast<std::size_t>(k)];
  return v;
}

double read_f64(const std::uint8_t* p) {
  std::uint64_t bits = 0;
  for (int k = 7; k >= 0; --k) bits = (bits << 8) | p[k];
  return std::bit_cast<double>(bits);
}

class TensorTable {
 public:
  TensorTable(const Json& manifest, std::span<const std::uint8_t> payload) : payload_(payload) {
    if (!manifest.is_array()) throw FormatError("model file: tensor manifest must be an array");
    std::vector<std::pair<std::size_t, std::size_t>> extents;
    for (const Json& entry : manifest) {
      Entry e{entry.at("rows").get<std::size_t>(), entry.at("cols").get<std::size_t>(),
              entry.at("offset").get<std::size_t>()};
      const std::string name = entry.at("name").get<std::string>();
      const std::size_t count = e.rows * e.cols;
      if (e.rows != 0 && count / e.rows != e.cols) {
        throw FormatError("model file: tensor '" + name + "' dimensions overflow");
      }
      const std::size_t length = count * 8;
      if (e.offset > payload_.size() || length > payload_.size() - e.offset) {
        throw FormatError("model file: tensor '" + name + "' lies outside the payload (truncated?)");
      }
      if (!entries_.emplace(name, e).second) {
        throw FormatError("model file: duplicate tensor '" + name + "'");
      }
      extents.emplace_back(e.offset, length);
    }
    std::sort(extents.begin(), extents.end());
    std::size_t cursor = 0;
    for (const auto& [offset, length] : extents) {
      if (offset < cursor) throw FormatError("model file: overlapping tensors in manifest");
      cursor = offset + length;
    }
    if (cursor != payload_.size()) {
      throw FormatError("model file: payload size does not match the tensor manifest");
    }
  }

  Matrix matrix(const std::string& name, std::size_t rows, std::size_t cols) const {
    const auto it = entries_.find(name);
    if (it == entries_.end()) throw FormatError("model file: missing tensor '" + name + "'");
    const Entry& e = it->second;
    if (e.rows != rows || e.cols != cols) {
      throw FormatError("model file: tensor '" + name + "' is " + std::to_string(e.rows) + "x" +
                        std::to_string(e.cols) + ", expected " + std::to_string(rows) + "x" +
                        std::to_string(cols));
    }
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    const std::uint8_t* p = payload_.data() + e.offset;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c, p += 8) m(r, c) = read_f64(p);
    }
    return m;
  }

  Vector vector(const std::string& name, std::size_t size) const {
    return matrix(name, size, 1).col(0);
  }

  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    std::size_t rows;
    std::size_t cols;
    std::size_t offset;
  };
  std::span<const std::uint8_t> payload_;
  std::map<std::string, Entry> entries_;
};

RbmConfig config_from(const Json& j) {
  RbmConfig c;
  c.n_visible = j.at("n_visible").get<std::size_t>();
  c.n_hidden = j.at("n_hidden").get<std::size_t>();
  c.steps = j.at("steps").get<std::size_t>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.momentum = j.at("momentum").get<double>();
  c.decay = j.at("decay").get<double>();
  c.temperature = j.at("temperature").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

double nullable_from(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

TrainingHistory history_from(const Json& j) {
  TrainingHistory h;
  for (const Json& e : j.at("epochs")) {
    h.push(EpochRecord{e.at("epoch").get<std::size_t>(), e.at("mse").get<double>(),
                       nullable_from(e.at("pl")), 0});
  }
  for (const Json& f : j.at("fine_tune")) {
    h.push(FineTuneRecord{f.at("epoch").get<std::size_t>(), f.at("cross_entropy").get<double>(),
                          f.at("accuracy").get<double>()});
  }
  return h;
}

Rbm rbm_from(const Json& j, const std::string& prefix, const TensorTable& tensors) {
  Rbm rbm(config_from(j.at("config")));
  const std::size_t m = rbm.n_visible();
  const std::size_t n = rbm.n_hidden();
  rbm.set_weights(tensors.matrix(prefix + "weights", m, n));
  rbm.set_visible_bias(tensors.vector(prefix + "visible_bias", m));
  rbm.set_hidden_bias(tensors.vector(prefix + "hidden_bias", n));
  rbm.set_velocities(tensors.matrix(prefix + "velocity_weights", m, n),
                     tensors.vector(prefix + "velocity_visible_bias", m),
                     tensors.vector(prefix + "velocity_hidden_bias", n));
  rbm.rng().set_state(j.at("rng_state").get<std::uint64_t>());
  rbm.history() = history_from(j.at("history"));
  return rbm;
}

AnyModel model_from(const Json& header, const TensorTable& tensors) {
  const std::string kind = header.at("kind").get<std::string>();
  if (kind == "rbm") {
    return rbm_from(header.at("rbm"), "", tensors);
  }
  if (kind == "dropout-rbm") {
    const Json& d = header.at("dropout");
    return DropoutRbm(rbm_from(header.at("rbm"), "", tensors), d.at("drop_rate").get<double>(),
                      d.at("inference_scaled").get<bool>(), Rng(d.at("mask_rng_state").get<std::uint64_t>()));
  }
  if (kind == "gaussian-rbm") {
    Rbm base = rbm_from(header.at("rbm"), "", tensors);
    const std::size_t m = base.n_visible();
    Standardization stats{tensors.vector("feature_mean", m), tensors.vector("feature_std", m)};
    return GaussianRbm(std::move(base), std::move(stats));
  }
  if (kind == "sigmoid-rbm") {
    return SigmoidRbm(rbm_from(header.at("rbm"), "", tensors));
  }
  if (kind == "dbn") {
    std::vector<Rbm> layers;
    const Json& js = header.at("layers");
    for (std::size_t i = 0; i < js.size(); ++i) {
      layers.push_back(rbm_from(js[i], "layer" + std::to_string(i) + ".", tensors));
    }
    if (layers.empty()) throw FormatError("model file: DBN without layers");
    std::optional<SoftmaxHead> head;
    if (header.contains("head")) {
      const std::size_t classes = header["head"].at("classes").get<std::size_t>();
      SoftmaxHead h;
      h.weights = tensors.matrix("head.weights", layers.back().n_hidden(), classes);
      h.bias = tensors.vector("head.bias", classes);
      h.learning_rate = header["head"].at("learning_rate").get<double>();
      head = std::move(h);
    }
    return Dbn(std::move(layers), std::move(head), history_from(header.at("history")),
               Rng(header.at("rng_state").get<std::uint64_t>()));
  }
  throw UnsupportedVersion("model file: unknown model kind '" + kind + "'");
}

std::size_t expected_tensor_count(const AnyModel& model) {
  return std::visit(
      [](const auto& m) -> std::size_t {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Dbn>) {
          return 6 * m.num_layers() + (m.head() ? 2 : 0);
        } else if constexpr (std::is_same_v<T, GaussianRbm>) {
          return 8;
        } else {
          return 6;
        }
      },
      model);
}

struct ParsedFile {
  Json header;
  std::span<const std::uint8_t> payload;
};

ParsedFile parse_file(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kPreambleSize) {
    throw FormatError("model file: too short for the EBML preamble");
  }
  const std::string_view magic(reinterpret_cast<const char*>(bytes.data()), kModelMagic.size());
  if (magic != kModelMagic) {
    if (magic.starts_with("EBML")) {
      throw UnsupportedVersion("model file: unsupported format version '" + std::string(magic) + "'");
    }
    throw FormatError("model file: bad magic");
  }
  const std::size_t header_len = read_le32(bytes, kModelMagic.size());
  if (header_len > bytes.size() - kPreambleSize) {
    throw FormatError("model file: header length exceeds file size");
  }
  const auto* header_begin = reinterpret_cast<const char*>(bytes.data() + kPreambleSize);
  Json header = Json::parse(header_begin, header_begin + header_len, nullptr, false);
  if (header.is_discarded() || !header.is_object()) {
    throw FormatError("model file: header is not a JSON object");
  }
  const auto version = header.find("version");
  if (version == header.end() || !version->is_string()) {
    throw FormatError("model file: header has no version");
  }
  if (version->get<std::string>() != kModelMagic) {
    throw UnsupportedVersion("model file: unsupported format version '" + version->get<std::string>() + "'");
  }
  return {std::move(header), bytes.subspan(kPreambleSize + header_len)};
}

}  // namespace

std::string_view model_kind(const AnyModel& model) {
  static constexpr std::string_view kinds[] = {"rbm", "dropout-rbm", "gaussian-rbm", "sigmoid-rbm", "dbn"};
  return kinds[model.index()];
}

std::vector<std::uint8_t> encode_model(const AnyModel& model) {
  HeaderBuilder builder;
  Json body = std::visit(builder, model);
  Json header = {{"version", std::string(kModelMagic)}};
  for (auto& [key, value] : body.items()) header[key] = value;
  header["tensors"] = builder.payload.manifest();

  const std::string text = header.dump();
  if (text.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw InvalidArgument("save: header too large");
  }
  std::vector<std::uint8_t> out;
  out.reserve(kPreambleSize + text.size() + builder.payload.bytes().size());
  out.insert(out.end(), kModelMagic.begin(), kModelMagic.end());
  const auto len = static_cast<std::uint32_t>(text.size());
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<std::uint8_t>(len >> (8 * k)));
  out.insert(out.end(), text.begin(), text.end());
  out.insert(out.end(), builder.payload.bytes().begin(), builder.payload.bytes().end());
  return out;
}

void save(const AnyModel& model, const std::filesystem::path& path) {
  io::atomic_write(path, encode_model(model));
}

AnyModel decode_model(std::span<const std::uint8_t> bytes) {
  ParsedFile file = parse_file(bytes);
  try {
    const TensorTable tensors(file.header.at("tensors"), file.payload);
    AnyModel model = model_from(file.header, tensors);
    if (tensors.size() != expected_tensor_count(model)) {
      throw FormatError("model file: unexpected tensors in manifest");
    }
    return model;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("model file: malformed header: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("model file: inconsistent model: ") + e.what());
  }
}

AnyModel load(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = io::read_file(path);
  try {
    return decode_model(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string read_header(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = io::read_file(path);
  return parse_file(bytes).header.dump(2);
}

}  // namespace ebm
