#include "mmfusion/classifier.hpp"

#include <fstream>
#include <iterator>

#include "byte_io.hpp"
#include "mmfusion/error.hpp"

namespace mmfusion {
namespace {

using detail::ByteReader;
using detail::ByteWriter;

constexpr char kMagic[4] = {'M', 'D', 'L', '1'};
constexpr std::uint8_t kVersion = 1;

template <typename Derived>
void write_floats(ByteWriter& out, const Eigen::DenseBase<Derived>& m) {
  // Row-major element order regardless of storage.
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.f32(m(r, c));
  }
}

template <typename Derived>
void read_floats(ByteReader& in, Eigen::DenseBase<Derived>& m, const char* what) {
  in.need(static_cast<std::size_t>(m.size()) * 4, what);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = in.f32(what);
  }
}

void check_classes(std::uint32_t classes) {
  if (classes != static_cast<std::uint32_t>(kNumClasses)) {
    throw Error(ErrorCode::kDimMismatch, "MDL1 model declares " + std::to_string(classes) + " classes, expected 4");
  }
}

void encode(ByteWriter& out, const SvmModel& m) {
  out.u32(static_cast<std::uint32_t>(m.dim()));
  out.u32(kNumClasses);
  for (int c = 0; c < kNumClasses; ++c) {
    write_floats(out, m.weights.row(c));
    out.f32(m.bias[c]);
  }
}

void encode(ByteWriter& out, const MlpModel& m) {
  out.u32(static_cast<std::uint32_t>(m.dim()));
  out.u32(static_cast<std::uint32_t>(m.hidden_width()));
  out.u32(kNumClasses);
  write_floats(out, m.w1);
  write_floats(out, m.b1);
  write_floats(out, m.w2);
  write_floats(out, m.b2);
}

void encode(ByteWriter& out, const GbtModel& m) {
  out.u32(static_cast<std::uint32_t>(m.dim));
  out.u32(static_cast<std::uint32_t>(m.rounds));
  out.u32(kNumClasses);
  out.f32(m.shrinkage);
  for (const auto& tree : m.trees) {
    out.u32(static_cast<std::uint32_t>(tree.nodes.size()));
    for (const auto& node : tree.nodes) {
      out.i32(node.feature);
      out.f32(node.threshold);
      out.u32(node.left);
      out.u32(node.right);
      out.f32(node.value);
    }
  }
}

SvmModel decode_svm(ByteReader& in) {
  const auto dim = in.u32("svm dim");
  check_classes(in.u32("svm classes"));
  SvmModel m;
  m.weights.resize(kNumClasses, dim);
  for (int c = 0; c < kNumClasses; ++c) {
    auto row = m.weights.row(c);
    read_floats(in, row, "svm weights");
    m.bias[c] = in.f32("svm bias");
  }
  return m;
}

MlpModel decode_mlp(ByteReader& in) {
  const auto dim = in.u32("mlp dim");
  const auto hidden = in.u32("mlp hidden");
  check_classes(in.u32("mlp classes"));
  MlpModel m{MlpModel::WeightMatrix(hidden, dim), Eigen::VectorXf(hidden),
             MlpModel::WeightMatrix(kNumClasses, hidden), Eigen::VectorXf(kNumClasses)};
  read_floats(in, m.w1, "mlp w1");
  read_floats(in, m.b1, "mlp b1");
  read_floats(in, m.w2, "mlp w2");
  read_floats(in, m.b2, "mlp b2");
  return m;
}

GbtModel decode_gbt(ByteReader& in) {
  GbtModel m;
  m.dim = in.u32("gbt dim");
  m.rounds = static_cast<int>(in.u32("gbt rounds"));
  check_classes(in.u32("gbt classes"));
  m.shrinkage = in.f32("gbt shrinkage");
  const auto tree_count = static_cast<std::size_t>(m.rounds) * kNumClasses;
  for (std::size_t t = 0; t < tree_count; ++t) {
    RegressionTree tree;
    const auto count = in.u32("tree node count");
    in.need(std::size_t{count} * 20, "tree nodes");
    tree.nodes.resize(count);
    for (auto& node : tree.nodes) {
      node.feature = in.i32("node feature");
      node.threshold = in.f32("node threshold");
      node.left = in.u32("node left");
      node.right = in.u32("node right");
      node.value = in.f32("node value");
    }
    for (std::size_t id = 0; id < tree.nodes.size(); ++id) {
      const auto& node = tree.nodes[id];
      if (node.is_leaf()) continue;
      if (static_cast<std::size_t>(node.feature) >= m.dim || node.left <= id || node.right <= id ||
          node.left >= count || node.right >= count) {
        throw Error(ErrorCode::kValidation, "MDL1 tree has an invalid node link");
      }
    }
    if (tree.nodes.empty()) throw Error(ErrorCode::kValidation, "MDL1 tree has no nodes");
    m.trees.push_back(std::move(tree));
  }
  return m;
}

}  // namespace

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::kSvm: return "svm";
    case ClassifierKind::kMlp: return "mlp";
    case ClassifierKind::kGbt: return "gbt";
  }
  return "?";
}

std::optional<ClassifierKind> parse_classifier(std::string_view text) {
  for (auto k : kAllClassifiers) {
    if (to_string(k) == text) return k;
  }
  // Aliases: nn for mlp, xgboost for gbt.
  if (text == "nn") return ClassifierKind::kMlp;
  if (text == "xgboost") return ClassifierKind::kGbt;
  return std::nullopt;
}

ClassifierKind kind_of(const ClassifierModel& model) {
  return static_cast<ClassifierKind>(model.index() + 1);
}

std::size_t input_dim(const ClassifierModel& model) {
  return std::visit(
      [](const auto& m) -> std::size_t {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GbtModel>) {
          return m.dim;
        } else {
          return m.dim();
        }
      },
      model);
}

ClassifierModel train(ClassifierKind kind, const Matrix& x, std::span<const EmotionClass> y,
                      const TrainConfig& cfg) {
  switch (kind) {
    case ClassifierKind::kSvm: return train_svm(x, y, cfg);
    case ClassifierKind::kMlp: return train_mlp(x, y, cfg);
    case ClassifierKind::kGbt: return train_gbt(x, y, cfg);
  }
  throw Error(ErrorCode::kValidation, "unknown classifier kind");
}

Matrix predict_proba(const ClassifierModel& model, const Matrix& x) {
  return std::visit([&x](const auto& m) { return m.predict_proba(x); }, model);
}

std::vector<EmotionClass> predict(const ClassifierModel& model, const Matrix& x) {
  return std::visit([&x](const auto& m) { return m.predict(x); }, model);
}

std::vector<std::uint8_t> encode_model(const ClassifierModel& model) {
  ByteWriter out;
  out.bytes(std::string_view(kMagic, sizeof(kMagic)));
  out.u8(kVersion);
  out.u8(static_cast<std::uint8_t>(kind_of(model)));
  std::visit([&out](const auto& m) { encode(out, m); }, model);
  return out.take();
}

ClassifierModel decode_model(std::span<const std::uint8_t> bytes) {
  detail::expect_magic(bytes, std::string_view(kMagic, sizeof(kMagic)), "MDL1");
  ByteReader in(bytes.subspan(sizeof(kMagic)), "MDL1");
  const auto version = in.u8("version");
  if (version != kVersion) {
    throw Error(ErrorCode::kUnsupportedVersion, "unsupported MDL1 version " + std::to_string(version));
  }
  const auto kind = in.u8("kind");
  ClassifierModel model;
  switch (kind) {
    case static_cast<std::uint8_t>(ClassifierKind::kSvm): model = decode_svm(in); break;
    case static_cast<std::uint8_t>(ClassifierKind::kMlp): model = decode_mlp(in); break;
    case static_cast<std::uint8_t>(ClassifierKind::kGbt): model = decode_gbt(in); break;
    default: throw Error(ErrorCode::kValidation, "unknown MDL1 model kind " + std::to_string(kind));
  }
  if (in.remaining() != 0) throw Error(ErrorCode::kValidation, "trailing bytes after MDL1 model");
  return model;
}

void save_model(const ClassifierModel& model, const std::filesystem::path& path) {
  const auto bytes = encode_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

ClassifierModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open model file: " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_model(bytes);
}

}  // namespace mmfusion
