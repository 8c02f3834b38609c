#include <socmap/brt/serialize.hpp>

#include <socmap/error.hpp>

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace socmap::brt {
namespace {

constexpr std::array<std::uint8_t, 8> magic = {'S', 'O', 'C', 'B', 'R', 'T', 0, 0};

class writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out_.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  void u64(std::uint64_t v) {
    for (int k = 0; k < 8; ++k) out_.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }
  void f64s(const std::vector<double>& v) {
    u32(static_cast<std::uint32_t>(v.size()));
    for (double d : v) f64(d);
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class reader {
 public:
  explicit reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(in_[pos_++]) << (8 * k);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(in_[pos_++]) << (8 * k);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const auto n = u32();
    need(n);
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  std::vector<double> f64s() {
    const auto n = u32();
    need(static_cast<std::size_t>(n) * 8);
    std::vector<double> v(n);
    for (auto& d : v) d = f64();
    return v;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  void need(std::size_t n) const {
    if (in_.size() - pos_ < n) throw data_error("model file is truncated");
  }
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize(const boosted_model& model) {
  writer w;
  for (auto b : magic) w.u8(b);
  w.u32(model_format_version);

  w.f64(model.initial_value);
  w.f64(model.learning_rate);

  const auto& info = model.info;
  const auto& p = info.params;
  w.u64(info.seed);
  w.i32(p.tree_size);
  w.f64(p.learning_rate);
  w.i32(p.min_obs_leaf);
  w.f64(p.bag_fraction);
  w.i32(p.max_trees);
  w.i32(p.internal_cv_folds);
  w.i32(p.patience);
  w.u32(info.n_learning);
  w.u32(info.best_iteration);
  w.u8(info.stopping_reached ? 1 : 0);
  w.f64s(info.train_deviance);
  w.f64s(info.cv_deviance);

  w.u32(static_cast<std::uint32_t>(model.predictors.size()));
  for (const auto& pr : model.predictors) {
    w.str(pr.name);
    w.u8(pr.kind == ingest::covariate_kind::categorical ? 1 : 0);
    w.u32(static_cast<std::uint32_t>(pr.levels.size()));
    for (const auto& l : pr.levels) w.str(l);
  }

  w.u32(static_cast<std::uint32_t>(model.trees.size()));
  for (const auto& tree : model.trees) {
    w.u32(static_cast<std::uint32_t>(tree.nodes().size()));
    for (const auto& n : tree.nodes()) {
      w.i32(n.feature);
      w.f64(n.threshold);
      w.i32(n.left);
      w.i32(n.right);
      w.i32(n.missing);
      w.f64(n.value);
      w.f64(n.improvement);
      w.u32(n.n_obs);
      w.u32(static_cast<std::uint32_t>(n.category_side.size()));
      for (auto b : n.category_side) w.u8(static_cast<std::uint8_t>(b));
    }
  }
  return w.take();
}

boosted_model deserialize(std::span<const std::uint8_t> bytes) {
  reader r(bytes);
  for (auto b : magic)
    if (r.u8() != b) throw data_error("not a boosted model file");
  const auto version = r.u32();
  if (version != model_format_version)
    throw data_error("unsupported model format version " + std::to_string(version));

  boosted_model m;
  m.initial_value = r.f64();
  m.learning_rate = r.f64();

  auto& info = m.info;
  auto& p = info.params;
  info.seed = r.u64();
  p.tree_size = r.i32();
  p.learning_rate = r.f64();
  p.min_obs_leaf = r.i32();
  p.bag_fraction = r.f64();
  p.max_trees = r.i32();
  p.internal_cv_folds = r.i32();
  p.patience = r.i32();
  info.n_learning = r.u32();
  info.best_iteration = r.u32();
  info.stopping_reached = r.u8() != 0;
  info.train_deviance = r.f64s();
  info.cv_deviance = r.f64s();

  const auto n_pred = r.u32();
  for (std::uint32_t j = 0; j < n_pred; ++j) {
    predictor_info pr;
    pr.name = r.str();
    pr.kind = r.u8() ? ingest::covariate_kind::categorical : ingest::covariate_kind::numeric;
    const auto nl = r.u32();
    for (std::uint32_t l = 0; l < nl; ++l) pr.levels.push_back(r.str());
    m.predictors.push_back(std::move(pr));
  }

  const auto n_trees = r.u32();
  m.trees.reserve(n_trees);
  for (std::uint32_t t = 0; t < n_trees; ++t) {
    const auto n_nodes = r.u32();
    std::vector<tree_node> nodes(n_nodes);
    for (auto& n : nodes) {
      n.feature = r.i32();
      n.threshold = r.f64();
      n.left = r.i32();
      n.right = r.i32();
      n.missing = r.i32();
      n.value = r.f64();
      n.improvement = r.f64();
      n.n_obs = r.u32();
      const auto sides = r.u32();
      for (std::uint32_t s = 0; s < sides; ++s) {
        const auto b = r.u8();
        if (b > 2) throw data_error("corrupt categorical split");
        n.category_side.push_back(static_cast<branch>(b));
      }
    }
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const auto& n = nodes[k];
      if (n.is_leaf()) continue;
      auto bad = [&](int c) { return c <= static_cast<int>(k) || c >= static_cast<int>(nodes.size()); };
      if (bad(n.left) || bad(n.right) || bad(n.missing) || n.feature >= static_cast<int>(n_pred))
        throw data_error("corrupt tree structure");
    }
    if (nodes.empty()) throw data_error("corrupt tree structure");
    m.trees.emplace_back(std::move(nodes));
  }
  if (!r.done()) throw data_error("trailing bytes after model");
  return m;
}

void save_model(const std::filesystem::path& path, const boosted_model& model) {
  const auto bytes = serialize(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot write model file " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

boosted_model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw data_error("cannot open model file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace socmap::brt
