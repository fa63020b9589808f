#include "obl/regressor.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "obl/error.hpp"
#include "obl/random.hpp"

namespace obl {
namespace {

constexpr int kModelVersion = 1;

Layer make_layer(std::size_t inputs, std::size_t outputs) {
  return Layer{inputs, outputs, std::vector<double>(inputs * outputs, 0.0),
               std::vector<double>(outputs, 0.0)};
}

void glorot(Layer& layer, Rng& rng) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(layer.inputs + layer.outputs));
  for (double& w : layer.weights) w = rng.uniform(-limit, limit);
}

// Scratch buffers for one forward/backward pass.
struct Activations {
  std::vector<double> hidden;
  std::vector<double> out;
  std::vector<double> delta;

  explicit Activations(const Architecture& arch)
      : hidden(arch.hidden_units), out(arch.output_dim), delta(arch.hidden_units) {}
};

void forward(const RegressorModel& m, const double* u, Activations& act) {
  const Layer& h = m.hidden;
  for (std::size_t j = 0; j < h.outputs; ++j) {
    double z = h.bias[j];
    const double* row = &h.weights[j * h.inputs];
    for (std::size_t i = 0; i < h.inputs; ++i) z += row[i] * u[i];
    act.hidden[j] = std::tanh(z);
  }
  const Layer& o = m.output;
  for (std::size_t k = 0; k < o.outputs; ++k) {
    double z = o.bias[k];
    const double* row = &o.weights[k * o.inputs];
    for (std::size_t j = 0; j < o.inputs; ++j) z += row[j] * act.hidden[j];
    act.out[k] = z;
  }
}

void zero(Layer& layer) {
  std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
  std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
}

// Accumulates d/dtheta of 1/(2N) sum ||r||^2 over rows [begin, end) of the
// flattened normalized data. Returns the sum of squared residuals.
double accumulate_gradient(const RegressorModel& m, const std::vector<double>& u,
                           const std::vector<double>& v, std::span<const std::size_t> rows,
                           Gradient& g, Activations& act) {
  const std::size_t in = m.arch.input_dim;
  const std::size_t out = m.arch.output_dim;
  const std::size_t hid = m.arch.hidden_units;
  const double scale = 1.0 / static_cast<double>(rows.size());
  zero(g.hidden);
  zero(g.output);
  double sse = 0.0;
  for (const std::size_t n : rows) {
    const double* un = &u[n * in];
    const double* vn = &v[n * out];
    forward(m, un, act);
    std::fill(act.delta.begin(), act.delta.end(), 0.0);
    for (std::size_t k = 0; k < out; ++k) {
      const double r = act.out[k] - vn[k];
      sse += r * r;
      const double rs = r * scale;
      g.output.bias[k] += rs;
      double* grow = &g.output.weights[k * hid];
      const double* wrow = &m.output.weights[k * hid];
      for (std::size_t j = 0; j < hid; ++j) {
        grow[j] += rs * act.hidden[j];
        act.delta[j] += rs * wrow[j];
      }
    }
    for (std::size_t j = 0; j < hid; ++j) {
      const double d = act.delta[j] * (1.0 - act.hidden[j] * act.hidden[j]);
      g.hidden.bias[j] += d;
      double* grow = &g.hidden.weights[j * in];
      for (std::size_t i = 0; i < in; ++i) grow[i] += d * un[i];
    }
  }
  return sse;
}

double sum_squared_error(const RegressorModel& m, const std::vector<double>& u,
                         const std::vector<double>& v, std::span<const std::size_t> rows,
                         Activations& act) {
  const std::size_t in = m.arch.input_dim;
  const std::size_t out = m.arch.output_dim;
  double sse = 0.0;
  for (const std::size_t n : rows) {
    forward(m, &u[n * in], act);
    for (std::size_t k = 0; k < out; ++k) {
      const double r = act.out[k] - v[n * out + k];
      sse += r * r;
    }
  }
  return sse;
}

std::vector<double> flatten_normalized(std::span<const Point> rows,
                                       const std::vector<MinMax>& norm) {
  std::vector<double> flat;
  flat.reserve(rows.size() * norm.size());
  for (const Point& p : rows) {
    for (std::size_t d = 0; d < norm.size(); ++d) flat.push_back(norm[d].normalize(p[d]));
  }
  return flat;
}

void check_rows(std::span<const Point> rows, std::size_t dim, const char* what) {
  for (const Point& p : rows) {
    if (p.size() != dim) {
      throw UsageError(std::string(what) + " of dimension " + std::to_string(p.size()) +
                       ", model expects " + std::to_string(dim));
    }
  }
}

// Parameter visitor over (hidden.w, hidden.b, output.w, output.b).
template <typename ModelLike, typename Fn>
void for_each_parameter(ModelLike& layers_owner, Fn&& fn) {
  for (auto* layer : {&layers_owner.hidden, &layers_owner.output}) {
    for (auto& w : layer->weights) fn(w);
    for (auto& b : layer->bias) fn(b);
  }
}

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::size_t step = 0;
};

}  // namespace

void Architecture::validate() const {
  if (input_dim == 0 || output_dim == 0) throw UsageError("input/output dimension must be >= 1");
  if (hidden_units == 0) throw UsageError("hidden_units must be >= 1");
}

std::vector<MinMax> fit_min_max(std::span<const Point> rows, std::size_t dim) {
  if (rows.empty()) throw UsageError("cannot fit normalization on no data");
  std::vector<MinMax> norm(dim, MinMax{std::numeric_limits<double>::infinity(),
                                       -std::numeric_limits<double>::infinity()});
  for (const Point& p : rows) {
    for (std::size_t d = 0; d < dim; ++d) {
      norm[d].min = std::min(norm[d].min, p[d]);
      norm[d].max = std::max(norm[d].max, p[d]);
    }
  }
  for (MinMax& mm : norm) {
    if (!(mm.max > mm.min)) mm.max = mm.min + 1.0;
  }
  return norm;
}

RegressorModel init(const Architecture& arch, std::uint64_t seed) {
  arch.validate();
  RegressorModel m;
  m.arch = arch;
  m.hidden = make_layer(arch.input_dim, arch.hidden_units);
  m.output = make_layer(arch.hidden_units, arch.output_dim);
  m.norm_in.assign(arch.input_dim, MinMax{});
  m.norm_out.assign(arch.output_dim, MinMax{});
  m.seed = seed;
  Rng rng(seed);
  glorot(m.hidden, rng);
  glorot(m.output, rng);
  return m;
}

std::optional<Optimizer> parse_optimizer(std::string_view text) {
  if (text == "adam") return Optimizer::kAdam;
  if (text == "gd") return Optimizer::kGradientDescent;
  return std::nullopt;
}

std::string_view name(Optimizer opt) { return opt == Optimizer::kAdam ? "adam" : "gd"; }

void TrainConfig::validate() const {
  if (epochs == 0) throw UsageError("epochs must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw UsageError("learning rate must be positive");
  }
  if (!(validation_fraction > 0.0 && validation_fraction <= 0.5)) {
    throw UsageError("validation fraction must lie in (0, 0.5]");
  }
  if (patience == 0) throw UsageError("patience must be >= 1");
}

TrainResult train(RegressorModel model, const MinedSet& data, const TrainConfig& cfg) {
  cfg.validate();
  model.arch.validate();
  const std::size_t n = data.size();
  if (n < 2) throw UsageError("training needs at least 2 mined pairs");
  if (data.opposites.size() != n) throw UsageError("mined inputs and opposites differ in length");
  check_rows(data.inputs, model.arch.input_dim, "input");
  check_rows(data.opposites, model.arch.output_dim, "opposite");

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng.index(i + 1)]);
  const auto n_val = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(cfg.validation_fraction * static_cast<double>(n))),
      1, n - 1);
  std::vector<std::size_t> val_rows(order.begin(), order.begin() + static_cast<long>(n_val));
  std::vector<std::size_t> train_rows(order.begin() + static_cast<long>(n_val), order.end());
  std::sort(val_rows.begin(), val_rows.end());
  std::sort(train_rows.begin(), train_rows.end());

  std::vector<Point> train_in, train_out;
  for (const std::size_t r : train_rows) {
    train_in.push_back(data.inputs[r]);
    train_out.push_back(data.opposites[r]);
  }
  model.norm_in = fit_min_max(train_in, model.arch.input_dim);
  model.norm_out = fit_min_max(train_out, model.arch.output_dim);
  model.box = data.box;

  const std::vector<double> u = flatten_normalized(data.inputs, model.norm_in);
  const std::vector<double> v = flatten_normalized(data.opposites, model.norm_out);

  Gradient g{make_layer(model.arch.input_dim, model.arch.hidden_units),
             make_layer(model.arch.hidden_units, model.arch.output_dim)};
  Activations act(model.arch);
  AdamState adam;
  if (cfg.optimizer == Optimizer::kAdam) {
    std::size_t count = 0;
    for_each_parameter(model, [&](double&) { ++count; });
    adam.m.assign(count, 0.0);
    adam.v.assign(count, 0.0);
  }
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;

  auto step = [&](std::span<const std::size_t> rows) {
    const double sse = accumulate_gradient(model, u, v, rows, g, act);
    std::vector<double*> params;
    std::vector<const double*> grads;
    for_each_parameter(model, [&](double& p) { params.push_back(&p); });
    for_each_parameter(g, [&](double& q) { grads.push_back(&q); });
    if (cfg.optimizer == Optimizer::kGradientDescent) {
      for (std::size_t i = 0; i < params.size(); ++i) *params[i] -= cfg.learning_rate * *grads[i];
    } else {
      ++adam.step;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(adam.step));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(adam.step));
      for (std::size_t i = 0; i < params.size(); ++i) {
        const double gi = *grads[i];
        adam.m[i] = kBeta1 * adam.m[i] + (1.0 - kBeta1) * gi;
        adam.v[i] = kBeta2 * adam.v[i] + (1.0 - kBeta2) * gi * gi;
        *params[i] -= cfg.learning_rate * (adam.m[i] / c1) / (std::sqrt(adam.v[i] / c2) + kEps);
      }
    }
    return sse;
  };

  const double out_dim = static_cast<double>(model.arch.output_dim);
  TrainResult result{model, {}, 0, val_rows};
  double best = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;
  std::vector<std::size_t> batch_order = train_rows;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    // train_mse is accumulated during the epoch's updates, before each step
    double train_sse = 0.0;
    if (cfg.batch_size == 0 || cfg.batch_size >= train_rows.size()) {
      train_sse = step(train_rows);
    } else {
      for (std::size_t i = batch_order.size() - 1; i > 0; --i) {
        std::swap(batch_order[i], batch_order[rng.index(i + 1)]);
      }
      for (std::size_t start = 0; start < batch_order.size(); start += cfg.batch_size) {
        const std::size_t len = std::min(cfg.batch_size, batch_order.size() - start);
        train_sse += step(std::span(batch_order).subspan(start, len));
      }
    }
    const double train_mse = train_sse / (static_cast<double>(train_rows.size()) * out_dim);
    const double val_mse = sum_squared_error(model, u, v, val_rows, act) /
                           (static_cast<double>(val_rows.size()) * out_dim);
    if (!std::isfinite(train_mse) || !std::isfinite(val_mse)) {
      throw TrainingError("training diverged: non-finite loss at epoch " + std::to_string(epoch),
                          epoch);
    }
    if (val_mse < best) {
      best = val_mse;
      result.model = model;
      result.best_epoch = epoch;
      since_best = 0;
    } else {
      ++since_best;
    }
    result.history.push_back({epoch, train_mse, val_mse, best});
    if (since_best >= cfg.patience) break;
  }
  return result;
}

Point predict(const RegressorModel& model, std::span<const double> x) {
  if (x.size() != model.arch.input_dim) {
    throw UsageError("predict: input has dimension " + std::to_string(x.size()) +
                     ", model expects " + std::to_string(model.arch.input_dim));
  }
  std::vector<double> u(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) u[i] = model.norm_in[i].normalize(x[i]);
  Activations act(model.arch);
  forward(model, u.data(), act);
  Point y(model.arch.output_dim);
  for (std::size_t k = 0; k < y.size(); ++k) {
    y[k] = model.norm_out[k].denormalize(act.out[k]);
    if (model.box && k < model.box->arity()) {
      y[k] = std::clamp(y[k], model.box->lower()[k], model.box->upper()[k]);
    }
  }
  return y;
}

double loss(const RegressorModel& model, std::span<const Point> inputs,
            std::span<const Point> targets) {
  if (inputs.empty() || inputs.size() != targets.size()) {
    throw UsageError("loss needs matching, non-empty inputs and targets");
  }
  check_rows(inputs, model.arch.input_dim, "input");
  check_rows(targets, model.arch.output_dim, "target");
  Activations act(model.arch);
  double sse = 0.0;
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    forward(model, inputs[n].data(), act);
    for (std::size_t k = 0; k < act.out.size(); ++k) {
      const double r = act.out[k] - targets[n][k];
      sse += r * r;
    }
  }
  return 0.5 * sse / static_cast<double>(inputs.size());
}

Gradient loss_gradient(const RegressorModel& model, std::span<const Point> inputs,
                       std::span<const Point> targets) {
  if (inputs.empty() || inputs.size() != targets.size()) {
    throw UsageError("gradient needs matching, non-empty inputs and targets");
  }
  check_rows(inputs, model.arch.input_dim, "input");
  check_rows(targets, model.arch.output_dim, "target");
  std::vector<double> u, v;
  for (const Point& p : inputs) u.insert(u.end(), p.begin(), p.end());
  for (const Point& p : targets) v.insert(v.end(), p.begin(), p.end());
  std::vector<std::size_t> rows(inputs.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  Gradient g{make_layer(model.arch.input_dim, model.arch.hidden_units),
             make_layer(model.arch.hidden_units, model.arch.output_dim)};
  Activations act(model.arch);
  accumulate_gradient(model, u, v, rows, g, act);
  return g;
}

double grad_check(const RegressorModel& model, const MinedSet& data) {
  if (data.size() == 0) throw UsageError("gradient check needs data");
  std::vector<Point> inputs, targets;
  for (std::size_t n = 0; n < data.size(); ++n) {
    Point a(model.arch.input_dim), b(model.arch.output_dim);
    for (std::size_t d = 0; d < a.size(); ++d) a[d] = model.norm_in[d].normalize(data.inputs[n][d]);
    for (std::size_t d = 0; d < b.size(); ++d) {
      b[d] = model.norm_out[d].normalize(data.opposites[n][d]);
    }
    inputs.push_back(std::move(a));
    targets.push_back(std::move(b));
  }
  Gradient analytic = loss_gradient(model, inputs, targets);
  std::vector<double> grads;
  for_each_parameter(analytic, [&](double& q) { grads.push_back(q); });

  constexpr double kStep = 1e-6;
  // Below this magnitude gradients are compared absolutely; finite-difference
  // rounding noise is around 1e-11 there.
  constexpr double kFloor = 1e-6;
  RegressorModel probe = model;
  double worst = 0.0;
  std::size_t idx = 0;
  for_each_parameter(probe, [&](double& p) {
    const double saved = p;
    p = saved + kStep;
    const double up = loss(probe, inputs, targets);
    p = saved - kStep;
    const double down = loss(probe, inputs, targets);
    p = saved;
    const double numeric = (up - down) / (2.0 * kStep);
    const double a = grads[idx++];
    const double denom = std::max({std::abs(a), std::abs(numeric), kFloor});
    worst = std::max(worst, std::abs(a - numeric) / denom);
  });
  return worst;
}

// ---------------------------------------------------------------------------
// persistence

namespace {

using nlohmann::json;

json layer_json(const Layer& layer) {
  return {{"rows", layer.outputs}, {"cols", layer.inputs}, {"w", layer.weights}, {"b", layer.bias}};
}

json norm_json(const std::vector<MinMax>& norm) {
  json out = json::array();
  for (const MinMax& mm : norm) out.push_back({mm.min, mm.max});
  return out;
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw FormatError("model file: missing field '" + where + key + "'");
  }
  return obj.at(key);
}

template <typename T>
T as(const json& value, const std::string& where) {
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw FormatError("model file: field '" + where + "' has the wrong type");
  }
}

Layer parse_layer(const json& j, std::size_t inputs, std::size_t outputs, const std::string& where) {
  Layer layer;
  layer.outputs = as<std::size_t>(field(j, "rows", where), where + "rows");
  layer.inputs = as<std::size_t>(field(j, "cols", where), where + "cols");
  if (layer.outputs != outputs || layer.inputs != inputs) {
    throw FormatError("model file: field '" + where + "rows/cols' shape " +
                      std::to_string(layer.outputs) + "x" + std::to_string(layer.inputs) +
                      " disagrees with arch " + std::to_string(outputs) + "x" +
                      std::to_string(inputs));
  }
  layer.weights = as<std::vector<double>>(field(j, "w", where), where + "w");
  layer.bias = as<std::vector<double>>(field(j, "b", where), where + "b");
  if (layer.weights.size() != inputs * outputs) {
    throw FormatError("model file: field '" + where + "w' has " +
                      std::to_string(layer.weights.size()) + " entries, expected " +
                      std::to_string(inputs * outputs));
  }
  if (layer.bias.size() != outputs) {
    throw FormatError("model file: field '" + where + "b' has " + std::to_string(layer.bias.size()) +
                      " entries, expected " + std::to_string(outputs));
  }
  return layer;
}

std::vector<MinMax> parse_norm(const json& j, std::size_t dim, const std::string& where) {
  if (!j.is_array() || j.size() != dim) {
    throw FormatError("model file: field '" + where + "' must hold " + std::to_string(dim) +
                      " [min, max] pairs");
  }
  std::vector<MinMax> norm;
  for (const json& pair : j) {
    const auto mm = as<std::vector<double>>(pair, where);
    if (mm.size() != 2 || !(mm[1] > mm[0])) {
      throw FormatError("model file: field '" + where + "' needs [min, max] with max > min");
    }
    norm.push_back({mm[0], mm[1]});
  }
  return norm;
}

}  // namespace

std::string serialize(const RegressorModel& model) {
  json j;
  j["version"] = kModelVersion;
  j["arch"] = {{"input_dim", model.arch.input_dim},
               {"hidden_units", model.arch.hidden_units},
               {"output_dim", model.arch.output_dim},
               {"hidden_activation", "tanh"},
               {"output_activation", "identity"}};
  j["norm_in"] = norm_json(model.norm_in);
  j["norm_out"] = norm_json(model.norm_out);
  j["weights"] = json::array({layer_json(model.hidden), layer_json(model.output)});
  j["seed"] = model.seed;
  if (model.box) j["box"] = {{"lower", model.box->lower()}, {"upper", model.box->upper()}};
  return j.dump(2) + "\n";
}

RegressorModel deserialize(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("model file: not valid JSON (") + e.what() + ")");
  }
  const json& version = field(j, "version", "");
  if (!version.is_number_integer() || version.get<int>() != kModelVersion) {
    throw FormatError("model file: field 'version' is " + version.dump() +
                      ", supported version is " + std::to_string(kModelVersion));
  }
  RegressorModel m;
  const json& arch = field(j, "arch", "");
  m.arch.input_dim = as<std::size_t>(field(arch, "input_dim", "arch."), "arch.input_dim");
  m.arch.hidden_units = as<std::size_t>(field(arch, "hidden_units", "arch."), "arch.hidden_units");
  m.arch.output_dim = as<std::size_t>(field(arch, "output_dim", "arch."), "arch.output_dim");
  if (arch.contains("hidden_activation") && arch["hidden_activation"] != "tanh") {
    throw FormatError("model file: field 'arch.hidden_activation' must be \"tanh\"");
  }
  if (arch.contains("output_activation") && arch["output_activation"] != "identity") {
    throw FormatError("model file: field 'arch.output_activation' must be \"identity\"");
  }
  try {
    m.arch.validate();
  } catch (const UsageError& e) {
    throw FormatError(std::string("model file: field 'arch': ") + e.what());
  }
  m.norm_in = parse_norm(field(j, "norm_in", ""), m.arch.input_dim, "norm_in");
  m.norm_out = parse_norm(field(j, "norm_out", ""), m.arch.output_dim, "norm_out");
  const json& weights = field(j, "weights", "");
  if (!weights.is_array() || weights.size() != 2) {
    throw FormatError("model file: field 'weights' must hold exactly 2 layers");
  }
  m.hidden = parse_layer(weights[0], m.arch.input_dim, m.arch.hidden_units, "weights[0].");
  m.output = parse_layer(weights[1], m.arch.hidden_units, m.arch.output_dim, "weights[1].");
  m.seed = as<std::uint64_t>(field(j, "seed", ""), "seed");
  if (j.contains("box")) {
    const json& box = j["box"];
    auto lower = as<std::vector<double>>(field(box, "lower", "box."), "box.lower");
    auto upper = as<std::vector<double>>(field(box, "upper", "box."), "box.upper");
    try {
      m.box = DomainBox(std::move(lower), std::move(upper));
    } catch (const UsageError& e) {
      throw FormatError(std::string("model file: field 'box': ") + e.what());
    }
    if (m.box->arity() != m.arch.output_dim) {
      throw FormatError("model file: field 'box' arity disagrees with arch.output_dim");
    }
  }
  return m;
}

void save(const RegressorModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << serialize(model);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

RegressorModel load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize(buf.str());
}

}  // namespace obl
