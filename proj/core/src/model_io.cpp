#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "fundus/model.hpp"

namespace fundus {

namespace {

constexpr std::string_view kMagic = "fundusgrade-model";
constexpr std::string_view kVersion = "v1";

template <typename... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// ---- writing ----------------------------------------------------------------

void put_numbers(std::ostream& out, std::span<const double> values) {
  for (const double v : values) out << ' ' << format_double(v);
}

void put_linear(std::ostream& out, std::string_view name, const LinearModel& m) {
  out << name << ' ' << format_double(m.b);
  put_numbers(out, m.w);
  out << '\n';
}

void write_rf(std::ostream& out, const RandomForestModel& rf) {
  out << "rf.params " << rf.params.n_trees << ' ' << rf.params.max_depth << ' ' << rf.params.m_features << ' '
      << (rf.params.bootstrap ? 1 : 0) << ' ' << rf.params.seed << '\n';
  for (const auto& tree : rf.trees) {
    out << "tree " << tree.nodes.size() << '\n';
    for (const auto& node : tree.nodes) {
      if (node.is_leaf()) {
        out << "leaf";
        for (const auto c : node.counts) out << ' ' << c;
      } else {
        out << "split " << node.feature << ' ' << format_double(node.threshold) << ' ' << node.left << ' '
            << node.right;
      }
      out << '\n';
    }
  }
}

void write_svm(std::ostream& out, const SvmCascadeModel& svm) {
  out << "svm.params " << format_double(svm.params.lambda) << ' ' << svm.params.epochs << ' ' << svm.params.seed
      << '\n';
  put_linear(out, "svm.stage1", svm.healthy_vs_dr);
  put_linear(out, "svm.stage2", svm.npdr_vs_pdr);
  put_linear(out, "svm.stage3.mild", svm.npdr_grades[0]);
  put_linear(out, "svm.stage3.moderate", svm.npdr_grades[1]);
  put_linear(out, "svm.stage3.severe", svm.npdr_grades[2]);
}

void write_nb(std::ostream& out, const GaussianNBModel& nb) {
  out << "nb.classes " << nb.classes << '\n';
  out << "nb.var_floor " << format_double(nb.var_floor) << '\n';
  out << "nb.prior";
  put_numbers(out, nb.priors);
  out << '\n';
  const std::span<const double> means(nb.means);
  const std::span<const double> vars(nb.variances);
  for (std::size_t c = 0; c < nb.classes; ++c) {
    out << "nb.mean " << c;
    put_numbers(out, means.subspan(c * nb.dimension, nb.dimension));
    out << '\n';
  }
  for (std::size_t c = 0; c < nb.classes; ++c) {
    out << "nb.var " << c;
    put_numbers(out, vars.subspan(c * nb.dimension, nb.dimension));
    out << '\n';
  }
}

// ---- reading ----------------------------------------------------------------

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-empty line split on whitespace; the first token must be `keyword`.
  std::vector<std::string> expect(std::string_view keyword) {
    auto tokens = next();
    if (tokens.empty()) fail("unexpected end of file, expected '" + std::string(keyword) + "'");
    if (tokens.front() != keyword) fail("expected '" + std::string(keyword) + "', found '" + tokens.front() + "'");
    return tokens;
  }

  std::vector<std::string> next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      std::istringstream ss(line);
      std::vector<std::string> tokens;
      for (std::string t; ss >> t;) tokens.push_back(std::move(t));
      if (!tokens.empty()) return tokens;
    }
    return {};
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ModelFormatError("model line " + std::to_string(line_no_) + ": " + what);
  }

  double number(const std::string& token) const {
    const auto v = parse_double(token);
    if (!v) fail("invalid number '" + token + "'");
    return *v;
  }

  template <typename Int>
  Int integer(const std::string& token) const {
    Int v{};
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) fail("invalid integer '" + token + "'");
    return v;
  }

  void arity(const std::vector<std::string>& tokens, std::size_t n) const {
    if (tokens.size() != n) {
      fail("'" + tokens.front() + "' expects " + std::to_string(n - 1) + " values, found " +
           std::to_string(tokens.size() - 1));
    }
  }

  std::vector<double> numbers(const std::vector<std::string>& tokens, std::size_t first, std::size_t count) const {
    arity(tokens, first + count);
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t i = first; i < tokens.size(); ++i) out.push_back(number(tokens[i]));
    return out;
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

LinearModel read_linear(LineReader& r, std::string_view name, std::size_t d) {
  const auto t = r.expect(name);
  auto values = r.numbers(t, 1, d + 1);
  LinearModel m;
  m.b = values.front();
  m.w.assign(values.begin() + 1, values.end());
  return m;
}

RandomForestModel read_rf(LineReader& r, std::size_t d) {
  RandomForestModel rf;
  rf.dimension = d;
  const auto p = r.expect("rf.params");
  r.arity(p, 6);
  rf.params.n_trees = r.integer<std::size_t>(p[1]);
  rf.params.max_depth = r.integer<std::size_t>(p[2]);
  rf.params.m_features = r.integer<std::size_t>(p[3]);
  rf.params.bootstrap = r.integer<int>(p[4]) != 0;
  rf.params.seed = r.integer<std::uint64_t>(p[5]);
  if (rf.params.n_trees == 0) r.fail("forest has no trees");
  rf.trees.resize(rf.params.n_trees);
  for (auto& tree : rf.trees) {
    const auto h = r.expect("tree");
    r.arity(h, 2);
    const auto count = r.integer<std::size_t>(h[1]);
    if (count == 0) r.fail("tree has no nodes");
    tree.nodes.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      const auto t = r.next();
      if (t.empty()) r.fail("unexpected end of file inside tree");
      TreeNode& node = tree.nodes[i];
      if (t.front() == "leaf") {
        r.arity(t, 1 + kGradeCount);
        for (std::size_t c = 0; c < kGradeCount; ++c) node.counts[c] = r.integer<std::uint32_t>(t[1 + c]);
      } else if (t.front() == "split") {
        r.arity(t, 5);
        node.feature = r.integer<int>(t[1]);
        node.threshold = r.number(t[2]);
        node.left = r.integer<int>(t[3]);
        node.right = r.integer<int>(t[4]);
        const auto valid_child = [&](int c) { return c > static_cast<int>(i) && c < static_cast<int>(count); };
        if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= d || !valid_child(node.left) ||
            !valid_child(node.right)) {
          r.fail("split node references an invalid feature or child");
        }
      } else {
        r.fail("expected 'leaf' or 'split', found '" + t.front() + "'");
      }
    }
  }
  return rf;
}

SvmCascadeModel read_svm(LineReader& r, std::size_t d) {
  SvmCascadeModel svm;
  svm.dimension = d;
  const auto p = r.expect("svm.params");
  r.arity(p, 4);
  svm.params.lambda = r.number(p[1]);
  svm.params.epochs = r.integer<std::size_t>(p[2]);
  svm.params.seed = r.integer<std::uint64_t>(p[3]);
  svm.healthy_vs_dr = read_linear(r, "svm.stage1", d);
  svm.npdr_vs_pdr = read_linear(r, "svm.stage2", d);
  svm.npdr_grades[0] = read_linear(r, "svm.stage3.mild", d);
  svm.npdr_grades[1] = read_linear(r, "svm.stage3.moderate", d);
  svm.npdr_grades[2] = read_linear(r, "svm.stage3.severe", d);
  return svm;
}

GaussianNBModel read_nb(LineReader& r, std::size_t d) {
  GaussianNBModel nb;
  nb.dimension = d;
  const auto k = r.expect("nb.classes");
  r.arity(k, 2);
  nb.classes = r.integer<std::size_t>(k[1]);
  if (nb.classes < 2 || nb.classes > kGradeCount) r.fail("class count must be in 2..5");
  const auto f = r.expect("nb.var_floor");
  nb.var_floor = r.numbers(f, 1, 1).front();
  nb.priors = r.numbers(r.expect("nb.prior"), 1, nb.classes);
  for (const char* section : {"nb.mean", "nb.var"}) {
    auto& target = std::string_view(section) == "nb.mean" ? nb.means : nb.variances;
    for (std::size_t c = 0; c < nb.classes; ++c) {
      const auto t = r.expect(section);
      if (t.size() < 2 || r.integer<std::size_t>(t[1]) != c) r.fail(std::string(section) + " rows out of order");
      const auto values = r.numbers(t, 2, d);
      target.insert(target.end(), values.begin(), values.end());
    }
  }
  for (const double v : nb.variances) {
    if (!(v > 0.0)) r.fail("variances must be positive");
  }
  return nb;
}

}  // namespace

std::string_view to_string(ClassifierKind kind) noexcept {
  switch (kind) {
    case ClassifierKind::RandomForest:
      return "rf";
    case ClassifierKind::Svm:
      return "svm";
    case ClassifierKind::NaiveBayes:
      return "nb";
  }
  return "unknown";
}

std::optional<ClassifierKind> parse_classifier_kind(std::string_view name) noexcept {
  if (name == "rf") return ClassifierKind::RandomForest;
  if (name == "svm") return ClassifierKind::Svm;
  if (name == "nb") return ClassifierKind::NaiveBayes;
  return std::nullopt;
}

ClassifierKind TrainedModel::kind() const noexcept {
  return std::visit(Overloaded{[](const RandomForestModel&) { return ClassifierKind::RandomForest; },
                               [](const SvmCascadeModel&) { return ClassifierKind::Svm; },
                               [](const GaussianNBModel&) { return ClassifierKind::NaiveBayes; }},
                    classifier);
}

Grade predict(const TrainedModel& model, std::span<const double> raw_features) {
  const auto x = scaler_transform(model.scaler, raw_features);
  return std::visit(Overloaded{[&](const RandomForestModel& m) { return rf_predict(m, x); },
                               [&](const SvmCascadeModel& m) { return svm_cascade_predict(m, x); },
                               [&](const GaussianNBModel& m) { return nb_predict(m, x); }},
                    model.classifier);
}

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

std::optional<double> parse_double(std::string_view text) noexcept {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

void save_model(std::ostream& out, const TrainedModel& model) {
  out << kMagic << ' ' << kVersion << ' ' << to_string(model.kind()) << '\n';
  out << "dimension " << model.dimension() << '\n';
  out << "scaler.mean";
  put_numbers(out, model.scaler.mean);
  out << '\n';
  out << "scaler.std";
  put_numbers(out, model.scaler.stddev);
  out << '\n';
  std::visit(Overloaded{[&](const RandomForestModel& m) { write_rf(out, m); },
                        [&](const SvmCascadeModel& m) { write_svm(out, m); },
                        [&](const GaussianNBModel& m) { write_nb(out, m); }},
             model.classifier);
  out << "end\n";
}

TrainedModel load_model(std::istream& in) {
  LineReader r(in);
  const auto header = r.expect(kMagic);
  if (header.size() != 3) r.fail("malformed header");
  if (header[1] != kVersion) r.fail("unsupported model version '" + header[1] + "'");
  const auto kind = parse_classifier_kind(header[2]);
  if (!kind) r.fail("unknown classifier kind '" + header[2] + "'");

  const auto dim = r.expect("dimension");
  r.arity(dim, 2);
  const auto d = r.integer<std::size_t>(dim[1]);
  if (d == 0) r.fail("dimension must be positive");

  TrainedModel model;
  model.scaler.mean = r.numbers(r.expect("scaler.mean"), 1, d);
  model.scaler.stddev = r.numbers(r.expect("scaler.std"), 1, d);
  switch (*kind) {
    case ClassifierKind::RandomForest:
      model.classifier = read_rf(r, d);
      break;
    case ClassifierKind::Svm:
      model.classifier = read_svm(r, d);
      break;
    case ClassifierKind::NaiveBayes:
      model.classifier = read_nb(r, d);
      break;
  }
  r.expect("end");
  if (!r.next().empty()) r.fail("trailing content after 'end'");
  return model;
}

void save_model(const std::filesystem::path& path, const TrainedModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write model file " + path.string());
  save_model(out, model);
  if (!out) throw std::runtime_error("write failed for model file " + path.string());
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelFormatError("cannot open model file " + path.string());
  return load_model(in);
}

}  // namespace fundus
