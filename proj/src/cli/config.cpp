#include "wpca/cli/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace wpca::cli {

namespace {

std::string locate(std::string_view source, int line, int column) {
  if (line < 0) return source.empty() ? std::string() : std::string(source) + ": ";
  return std::string(source) + ":" + std::to_string(line) + ":" +
         std::to_string(column) + ": ";
}

// Field-aware view over a YAML mapping; every error names the field and,
// where yaml-cpp knows it, the 1-based line and column.
class Reader {
 public:
  Reader(YAML::Node node, std::string path, std::string_view source)
      : node_(std::move(node)), path_(std::move(path)), source_(source) {}

  [[noreturn]] void fail(const std::string& field, const std::string& msg,
                         const YAML::Node& at = YAML::Node()) const {
    YAML::Mark mark = at.IsDefined() ? at.Mark() : YAML::Mark::null_mark();
    if (mark.is_null() && node_.IsMap()) {
      const YAML::Node own = node_[field];
      if (own.IsDefined()) mark = own.Mark();
    }
    if (mark.is_null()) mark = node_.Mark();
    const bool known = !mark.is_null();
    throw ConfigError(qualify(field), msg, source_, known ? mark.line + 1 : -1,
                      known ? mark.column + 1 : -1);
  }

  std::string qualify(const std::string& field) const {
    return path_.empty() ? field : path_ + "." + field;
  }

  bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }

  YAML::Node get(const std::string& key) const {
    YAML::Node v = node_[key];
    if (!v) fail(key, "missing required field");
    return v;
  }

  template <typename T>
  T scalar(const std::string& key, const YAML::Node& v) const {
    if (!v.IsScalar()) fail(key, "expected a scalar value", v);
    try {
      return v.as<T>();
    } catch (const YAML::Exception&) {
      fail(key, "cannot parse '" + v.Scalar() + "'", v);
    }
  }

  double number(const std::string& key) const { return scalar<double>(key, get(key)); }

  double number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  double positive(const std::string& key) const {
    const double v = number(key);
    if (!(v > 0.0) || !std::isfinite(v)) fail(key, "must be positive", node_[key]);
    return v;
  }

  std::size_t count(const std::string& key) const {
    const YAML::Node v = get(key);
    const auto raw = scalar<long long>(key, v);
    if (raw < 0) fail(key, "must be nonnegative", v);
    return static_cast<std::size_t>(raw);
  }

  std::string text(const std::string& key) const { return scalar<std::string>(key, get(key)); }

  std::vector<double> numbers(const std::string& key) const {
    const YAML::Node v = get(key);
    if (!v.IsSequence()) fail(key, "expected a list", v);
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(scalar<double>(key + "[" + std::to_string(i) + "]", v[i]));
    }
    return out;
  }

  Reader child(const std::string& key, const YAML::Node& node) const {
    if (!node.IsMap()) fail(key, "expected a mapping", node);
    return Reader(node, qualify(key), source_);
  }

  void allow_only(std::initializer_list<std::string_view> keys) const {
    if (!node_.IsMap()) fail("", "expected a mapping");
    for (const auto& kv : node_) {
      const auto name = kv.first.as<std::string>();
      bool ok = false;
      for (auto k : keys) ok = ok || k == name;
      if (!ok) fail(name, "unknown field", kv.first);
    }
  }

  const YAML::Node& node() const { return node_; }
  std::string_view source() const { return source_; }

 private:
  YAML::Node node_;
  std::string path_;
  std::string_view source_;
};

YAML::Node load(std::string_view text, std::string_view source) {
  try {
    YAML::Node root = YAML::Load(std::string(text));
    if (!root.IsMap()) {
      throw ConfigError("", "top level must be a mapping", source);
    }
    return root;
  } catch (const YAML::ParserException& e) {
    throw ConfigError("", e.msg, source, e.mark.line + 1, e.mark.column + 1);
  }
}

// Runs a model constructor, turning its std::invalid_argument into a
// ConfigError on `field`.
template <typename F>
auto validated(const Reader& r, const std::string& field, F&& make) {
  try {
    return make();
  } catch (const std::invalid_argument& e) {
    const YAML::Node at = r.node()[field];
    r.fail(field, e.what(), at);
  }
}

NoiseProfile read_noise(const Reader& r) {
  const YAML::Node list = r.get("noise");
  if (!list.IsSequence() || list.size() == 0) {
    r.fail("noise", "expected a non-empty list of {p, sigma2} groups", list);
  }
  std::vector<NoiseGroup> groups;
  for (std::size_t l = 0; l < list.size(); ++l) {
    const std::string key = "noise[" + std::to_string(l) + "]";
    const Reader g = r.child(key, list[l]);
    g.allow_only({"p", "sigma2"});
    groups.push_back({g.number("p"), g.number("sigma2")});
  }
  return validated(r, "noise", [&] { return NoiseProfile(std::move(groups)); });
}

std::vector<double> read_amplitudes(const Reader& r) {
  const auto a = r.numbers("amplitudes");
  if (a.empty()) r.fail("amplitudes", "must be a non-empty list");
  for (double v : a) {
    if (!(v > 0.0)) r.fail("amplitudes", "entries must be positive");
  }
  return a;
}

Normalization read_normalization(const Reader& r) {
  if (!r.has("normalization")) return Normalization::none;
  const auto name = r.text("normalization");
  const auto n = parse_normalization(name);
  if (!n) r.fail("normalization", "expected none, unit_average or unit_max");
  return *n;
}

SchemeChoice read_scheme(const Reader& r, std::size_t idx, const YAML::Node& node,
                         const NoiseProfile& noise) {
  const std::string key = "schemes[" + std::to_string(idx) + "]";
  SchemeChoice s;
  if (node.IsScalar()) {
    const auto kind = parse_weight_kind(node.Scalar());
    if (!kind || *kind == WeightKind::binary || *kind == WeightKind::custom) {
      r.fail(key, "expected uniform, inverse_variance, square_inverse_variance, "
                  "optimal, or a mapping {kind: binary|custom, ...}", node);
    }
    s.kind = *kind;
    s.label = std::string(to_string(*kind));
    return s;
  }
  const Reader m = r.child(key, node);
  m.allow_only({"kind", "mask", "weights", "label"});
  const auto kind = parse_weight_kind(m.text("kind"));
  if (!kind) m.fail("kind", "unknown weight scheme");
  s.kind = *kind;
  if (s.kind == WeightKind::binary) {
    s.values = m.numbers("mask");
    for (double v : s.values) {
      if (v != 0.0 && v != 1.0) m.fail("mask", "entries must be 0 or 1");
    }
  } else if (s.kind == WeightKind::custom) {
    s.values = m.numbers("weights");
  }
  if (!s.values.empty() && s.values.size() != noise.size()) {
    m.fail(s.kind == WeightKind::binary ? "mask" : "weights",
           "needs one entry per noise group");
  }
  s.label = m.has("label") ? m.text("label") : std::string(to_string(s.kind));
  return s;
}

std::vector<Metric> read_metrics(const Reader& r) {
  if (!r.has("metrics")) {
    return {std::begin(kAllMetrics), std::end(kAllMetrics)};
  }
  const YAML::Node list = r.get("metrics");
  if (!list.IsSequence() || list.size() == 0) {
    r.fail("metrics", "expected a non-empty list", list);
  }
  std::vector<Metric> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const auto name = r.scalar<std::string>("metrics", list[i]);
    const auto m = parse_metric(name);
    if (!m) r.fail("metrics", "unknown metric '" + name + "'", list[i]);
    out.push_back(*m);
  }
  return out;
}

std::size_t default_threads() {
  if (const char* env = std::getenv(kThreadsEnv)) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) return static_cast<std::size_t>(v);
  }
  return 1;
}

// Shared by sweep and simulate: dimensions, trials, spike and noise.
SweepSpec read_trial_setup(const Reader& r, const Overrides& o,
                           std::vector<double> grid) {
  std::size_t d = r.count("d");
  std::size_t n = r.count("n");
  if (d == 0) r.fail("d", "must be positive");
  if (n == 0) r.fail("n", "must be positive");
  std::size_t trials = r.has("trials") ? r.count("trials") : 1;
  if (trials < 1) r.fail("trials", "must be at least 1", r.node()["trials"]);
  if (o.paper_scale) {
    const double ratio = static_cast<double>(n) / static_cast<double>(d);
    d = kPaperScaleDimension;
    n = static_cast<std::size_t>(std::llround(ratio * static_cast<double>(d)));
    trials = kPaperScaleTrials;
  }
  const auto amplitudes = read_amplitudes(r);
  const double c = static_cast<double>(n) / static_cast<double>(d);
  SpikeModel spike = validated(r, "amplitudes", [&] { return SpikeModel(c, amplitudes); });
  if (spike.k() > std::min(d, n)) r.fail("amplitudes", "more amplitudes than min(d, n)");

  std::uint64_t seed = 0;
  if (r.has("seed")) seed = r.scalar<std::uint64_t>("seed", r.get("seed"));
  if (o.seed) seed = *o.seed;

  ScoreDistribution dist = ScoreDistribution::gaussian;
  if (r.has("score_distribution")) {
    const auto name = r.text("score_distribution");
    if (name == "rademacher") {
      dist = ScoreDistribution::rademacher;
    } else if (name != "gaussian") {
      r.fail("score_distribution", "expected gaussian or rademacher");
    }
  }
  std::size_t threads = r.has("threads") ? r.count("threads") : default_threads();
  if (o.threads) threads = *o.threads;
  if (threads < 1) threads = 1;

  SweepSpec spec{std::move(spike), read_noise(r), d, n, trials, std::move(grid),
                 seed, read_metrics(r), dist, threads};
  if (spec.noise.size() != 2 && !r.has("weights")) {
    r.fail("noise", "lambda weighting needs exactly two noise groups");
  }
  return spec;
}

}  // namespace

ConfigError::ConfigError(std::string field, const std::string& message,
                         std::string_view source, int line, int column)
    : std::runtime_error(locate(source, line, column) +
                         (field.empty() ? "" : field + ": ") + message),
      field_(std::move(field)),
      line_(line) {}

PredictConfig parse_predict_config(std::string_view text, std::string_view source) {
  const Reader r(load(text, source), "", source);
  r.allow_only({"c", "amplitudes", "noise", "schemes", "normalization", "root_tol"});
  const double c = r.positive("c");
  auto amplitudes = read_amplitudes(r);
  NoiseProfile noise = read_noise(r);

  std::vector<SchemeChoice> schemes;
  if (r.has("schemes")) {
    const YAML::Node list = r.get("schemes");
    if (!list.IsSequence() || list.size() == 0) {
      r.fail("schemes", "expected a non-empty list", list);
    }
    for (std::size_t i = 0; i < list.size(); ++i) {
      schemes.push_back(read_scheme(r, i, list[i], noise));
    }
  } else {
    for (auto kind : {WeightKind::uniform, WeightKind::inverse_variance,
                      WeightKind::square_inverse_variance, WeightKind::optimal}) {
      schemes.push_back({kind, {}, std::string(to_string(kind))});
    }
  }
  const double root_tol = r.number_or("root_tol", kDefaultRootTol);
  if (!(root_tol > 0.0)) r.fail("root_tol", "must be positive");
  return PredictConfig{c, std::move(amplitudes), std::move(noise), std::move(schemes),
                       read_normalization(r), root_tol};
}

WeightsConfig parse_weights_config(std::string_view text, std::string_view source) {
  const Reader r(load(text, source), "", source);
  r.allow_only({"theta2", "noise", "normalization"});
  const double theta2 = r.positive("theta2");
  NoiseProfile noise = read_noise(r);
  for (std::size_t l = 0; l < noise.size(); ++l) {
    if (!(noise.variance(l) > 0.0)) {
      r.fail("noise[" + std::to_string(l) + "].sigma2",
             "must be positive for inverse-variance weights");
    }
  }
  return WeightsConfig{theta2, std::move(noise), read_normalization(r)};
}

SamplePlanConfig parse_sample_plan_config(std::string_view text,
                                          std::string_view source) {
  const Reader r(load(text, source), "", source);
  r.allow_only({"theta2", "budget", "sources"});
  const double theta2 = r.positive("theta2");
  const double budget = r.number("budget");
  const YAML::Node list = r.get("sources");
  if (!list.IsSequence() || list.size() == 0) {
    r.fail("sources", "expected a non-empty list", list);
  }
  std::vector<Source> sources;
  for (std::size_t l = 0; l < list.size(); ++l) {
    const std::string key = "sources[" + std::to_string(l) + "]";
    const Reader s = r.child(key, list[l]);
    s.allow_only({"sigma2", "cost", "availability"});
    Source src{s.number("sigma2"), s.number("cost"), std::nullopt};
    if (s.has("availability")) {
      const YAML::Node a = s.get("availability");
      if (!(a.IsScalar() && a.Scalar() == "unbounded")) {
        src.availability = s.scalar<double>("availability", a);
      }
    }
    sources.push_back(src);
  }
  return SamplePlanConfig{validated(r, "sources", [&] {
    return BudgetProblem(std::move(sources), budget, theta2);
  })};
}

SweepConfig parse_sweep_config(std::string_view text, std::string_view source,
                               const Overrides& overrides) {
  const Reader r(load(text, source), "", source);
  r.allow_only({"d", "n", "trials", "seed", "amplitudes", "noise", "lambda_grid",
                "lambda_steps", "metrics", "score_distribution", "threads"});
  std::vector<double> grid;
  if (r.has("lambda_grid")) {
    grid = r.numbers("lambda_grid");
  } else {
    const std::size_t steps = r.has("lambda_steps") ? r.count("lambda_steps") : 11;
    if (steps < 2) r.fail("lambda_steps", "must be at least 2");
    for (std::size_t i = 0; i < steps; ++i) {
      grid.push_back(static_cast<double>(i) / static_cast<double>(steps - 1));
    }
  }
  SweepSpec spec = read_trial_setup(r, overrides, std::move(grid));
  validated(r, "lambda_grid", [&] {
    spec.validate();
    return 0;
  });
  return SweepConfig{std::move(spec)};
}

SimulateConfig parse_simulate_config(std::string_view text, std::string_view source,
                                     const Overrides& overrides) {
  const Reader r(load(text, source), "", source);
  r.allow_only({"d", "n", "seed", "amplitudes", "noise", "lambda", "weights",
                "trial_index", "metrics", "score_distribution", "threads", "trials"});
  if (r.has("lambda") == r.has("weights")) {
    r.fail("lambda", "give exactly one of lambda or weights");
  }
  std::optional<double> lambda;
  if (r.has("lambda")) lambda = r.number("lambda");
  SweepSpec spec = read_trial_setup(r, overrides, {lambda.value_or(0.0)});

  std::vector<double> weights;
  if (lambda) {
    weights = validated(r, "lambda", [&] { return lambda_weights(spec.noise, *lambda); });
  } else {
    weights = r.numbers("weights");
    if (weights.size() != spec.noise.size()) {
      r.fail("weights", "needs one entry per noise group");
    }
    validated(r, "weights", [&] { return make_custom_scheme(weights, spec.noise); });
  }
  const std::size_t trial_index = r.has("trial_index") ? r.count("trial_index") : 0;
  return SimulateConfig{std::move(spec), std::move(weights), lambda, trial_index};
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file", path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace wpca::cli
