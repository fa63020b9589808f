#include "obl/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "obl/benchfn.hpp"
#include "obl/csv.hpp"
#include "obl/error.hpp"
#include "obl/evaluation.hpp"
#include "obl/opposition.hpp"
#include "obl/optimizer.hpp"
#include "obl/random.hpp"
#include "obl/regressor.hpp"

namespace obl {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Effective settings of one invocation; every field has a default and the
// whole struct is echoed into reports.
struct RunConfig {
  std::string command;
  std::string fn;
  std::string scheme = "t1";
  std::size_t n = 1000;
  std::string mode = "grid";
  std::uint64_t seed = 0;
  std::vector<double> lower;
  std::vector<double> upper;
  std::string in;
  std::string out;
  std::string model;
  std::string history;
  std::string format = "json";
  std::size_t hidden = 16;
  std::size_t epochs = 6000;
  double lr = 0.1;
  std::size_t patience = 1000;
  double validation_fraction = 0.2;
  std::size_t batch = 0;
  std::string optimizer = "adam";
  std::size_t n_test = 200;
  std::size_t reference_n = 15;
  std::size_t runs = 5;
};

json echo(const RunConfig& c) {
  json j = {{"command", c.command}, {"seed", c.seed}};
  if (c.command == "sample") {
    j.update({{"fn", c.fn}, {"n", c.n}, {"mode", c.mode}, {"out", c.out}});
    if (!c.lower.empty()) j["lower"] = c.lower;
    if (!c.upper.empty()) j["upper"] = c.upper;
  } else if (c.command == "mine") {
    j.update({{"in", c.in}, {"scheme", c.scheme}, {"out", c.out}, {"fn", c.fn}});
  } else if (c.command == "train") {
    j.update({{"in", c.in},
              {"fn", c.fn},
              {"hidden", c.hidden},
              {"epochs", c.epochs},
              {"lr", c.lr},
              {"patience", c.patience},
              {"validation_fraction", c.validation_fraction},
              {"batch", c.batch},
              {"optimizer", c.optimizer},
              {"out", c.out},
              {"history", c.history}});
  } else if (c.command == "eval") {
    j.update({{"fn", c.fn},
              {"scheme", c.scheme},
              {"model", c.model},
              {"n", c.n},
              {"mode", c.mode},
              {"n_test", c.n_test},
              {"reference_n", c.reference_n},
              {"format", c.format}});
  } else if (c.command == "optimize") {
    j.update({{"fn", c.fn}, {"model", c.model}, {"n", c.n}, {"runs", c.runs}, {"format", c.format}});
  }
  return j;
}

FunctionId require_function(const std::string& text) {
  if (text.empty()) throw UsageError("--fn is required; registry ids: " + function_names());
  const auto fn = parse_function(text);
  if (!fn) throw UsageError("unknown function '" + text + "'; registry ids: " + function_names());
  return *fn;
}

std::optional<FunctionId> optional_function(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return require_function(text);
}

OppositionScheme require_scheme(const std::string& text) {
  const auto s = parse_scheme(text);
  if (!s) throw UsageError("unknown scheme '" + text + "'; expected t1, t2 or t3");
  return *s;
}

std::ifstream open_input(const std::string& path, const char* flag) {
  if (path.empty()) throw UsageError(std::string(flag) + " is required");
  if (!fs::exists(path)) throw UsageError(std::string("input file not found: ") + path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

void write_file(const std::string& path, const std::string& content) {
  if (path.empty()) throw UsageError("--out is required");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  out.flush();
  if (!out) throw std::runtime_error("failed writing " + path);
}

// Writes to --out when given, otherwise to stdout.
void emit(const RunConfig& c, const std::string& content, std::ostream& out) {
  if (c.out.empty()) {
    out << content;
  } else {
    write_file(c.out, content);
  }
}

std::string mean_pm_std(double mean, double sd) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.2f ± %.2f", mean, sd);
  return buf;
}

// A side left unset keeps the function's default bounds.
std::optional<DomainBox> box_override(const RunConfig& c, FunctionId fn) {
  if (c.lower.empty() && c.upper.empty()) return std::nullopt;
  const DomainBox def = default_box(fn);
  return DomainBox(c.lower.empty() ? def.lower() : c.lower,
                   c.upper.empty() ? def.upper() : c.upper);
}

void check_format(const RunConfig& c) {
  if (c.format != "json" && c.format != "csv") {
    throw UsageError("unknown format '" + c.format + "'; expected csv or json");
  }
}

// --------------------------------------------------------------------------

void cmd_sample(const RunConfig& c, std::ostream& out) {
  const FunctionId fn = require_function(c.fn);
  const auto mode = parse_sample_mode(c.mode);
  if (!mode) throw UsageError("unknown mode '" + c.mode + "'; expected grid or uniform");
  if (c.out.empty()) throw UsageError("--out is required");
  const auto box = box_override(c, fn);
  const Dataset d = box ? sample(fn, c.n, *mode, c.seed, *box) : sample(fn, c.n, *mode, c.seed);
  std::ostringstream csv;
  write_dataset_csv(csv, d);
  write_file(c.out, csv.str());
  out << "wrote " << d.size() << " rows to " << c.out << '\n';
}

void cmd_mine(const RunConfig& c, std::ostream& out) {
  const OppositionScheme scheme = require_scheme(c.scheme);
  std::ifstream in = open_input(c.in, "--in");
  std::optional<DomainBox> box;
  if (const auto fn = optional_function(c.fn)) box = default_box(*fn);
  const Dataset d = read_dataset_csv(in, box);
  if (c.out.empty()) throw UsageError("--out is required");
  const MinedSet m = mine(d, scheme);
  std::ostringstream csv;
  write_mined_csv(csv, m);
  write_file(c.out, csv.str());
  std::size_t fallbacks = 0;
  for (const bool f : m.fallback) fallbacks += f ? 1 : 0;
  out << "scheme " << name(scheme) << ": y_min=" << format_double(m.stats.y_min)
      << " y_max=" << format_double(m.stats.y_max) << " y_mean=" << format_double(m.stats.y_mean)
      << '\n'
      << "wrote " << m.size() << " mined pairs (" << fallbacks << " fallback) to " << c.out
      << '\n';
}

void cmd_train(const RunConfig& c, std::ostream& out) {
  std::ifstream in = open_input(c.in, "--in");
  const auto fn = optional_function(c.fn);
  std::optional<DomainBox> box;
  if (fn) box = default_box(*fn);
  const MinedSet data = read_mined_csv(in, box);
  if (c.out.empty()) throw UsageError("--out is required");

  TrainConfig cfg;
  cfg.epochs = c.epochs;
  cfg.learning_rate = c.lr;
  cfg.patience = c.patience;
  cfg.validation_fraction = c.validation_fraction;
  cfg.batch_size = c.batch;
  cfg.seed = derive_seed(c.seed, 1);
  const auto opt = parse_optimizer(c.optimizer);
  if (!opt) throw UsageError("unknown optimizer '" + c.optimizer + "'; expected adam or gd");
  cfg.optimizer = *opt;
  cfg.validate();

  const Architecture arch{data.arity(), c.hidden, data.arity()};
  arch.validate();
  const TrainResult result = train(init(arch, derive_seed(c.seed, 0)), data, cfg);

  json model = json::parse(serialize(result.model));
  model["config"] = echo(c);
  model["best_epoch"] = result.best_epoch;
  write_file(c.out, model.dump(2) + "\n");

  const std::string history_path =
      c.history.empty() ? (fs::path(c.out).replace_extension("").string() + ".history.csv")
                        : c.history;
  std::ostringstream hist;
  hist << "epoch,train_mse,validation_mse,best_validation_mse\n";
  for (const EpochLoss& e : result.history) {
    hist << e.epoch << ',' << format_double(e.train_mse) << ',' << format_double(e.validation_mse)
         << ',' << format_double(e.best_validation_mse) << '\n';
  }
  write_file(history_path, hist.str());
  const EpochLoss& best = result.history[result.best_epoch - 1];
  out << "trained " << result.history.size() << " epochs; best validation mse "
      << format_double(best.validation_mse) << " at epoch " << result.best_epoch << '\n'
      << "wrote " << c.out << " and " << history_path << '\n';
}

void cmd_eval(const RunConfig& c, std::ostream& out) {
  check_format(c);
  const FunctionId fn = require_function(c.fn);
  const OppositionScheme scheme = require_scheme(c.scheme);
  if (!is_monotone(fn)) {
    throw UnsupportedFunctionError(std::string(name(fn)) +
                                   " has no exact type-II oracle; eval supports the monotone "
                                   "1-D benchmarks");
  }
  if (c.model.empty()) throw UsageError("--model is required");
  if (!fs::exists(c.model)) throw UsageError("model file not found: " + c.model);
  const RegressorModel model = load(c.model);
  const auto mode = parse_sample_mode(c.mode);
  if (!mode) throw UsageError("unknown mode '" + c.mode + "'; expected grid or uniform");

  const DomainBox box = model.box ? *model.box : default_box(fn);
  // The evaluator knows f: reference output statistics come from sampling it.
  const OutputStats stats = output_stats(sample(fn, c.n, *mode, c.seed, box));
  EvaluationConfig ecfg;
  ecfg.n_test = c.n_test;
  ecfg.seed = derive_seed(c.seed, 2);
  ecfg.reference_n = c.reference_n;
  const EvaluationReport r = evaluate_model(model, fn, scheme, stats, box, ecfg);

  if (c.format == "json") {
    json j;
    j["config"] = echo(c);
    j["function"] = std::string(name(fn));
    j["scheme"] = std::string(name(scheme));
    j["n_test"] = r.n_test;
    j["output_stats"] = {{"y_min", stats.y_min}, {"y_max", stats.y_max}, {"y_mean", stats.y_mean}};
    j["ann"] = {{"mean", r.ann.mean}, {"std", r.ann.std}};
    j["reference_fuzzy"] = nullptr;
    j["reference_proposed"] = nullptr;
    j["welch"] = nullptr;
    if (r.reference) {
      j["reference_fuzzy"] = {{"mean", r.reference->fuzzy_mean}, {"std", r.reference->fuzzy_std}};
      j["reference_proposed"] = {{"mean", r.reference->proposed_mean},
                                 {"std", r.reference->proposed_std}};
    }
    if (r.welch) j["welch"] = {{"t", r.welch->t}, {"dof", r.welch->dof}, {"p", r.welch->p}};
    emit(c, j.dump(2) + "\n", out);
  } else {
    std::ostringstream csv;
    csv << "# config: " << echo(c).dump() << '\n'
        << "function,scheme,n_test,ann_mean,ann_std,fuzzy_mean,fuzzy_std,welch_t,welch_dof,"
           "welch_p\n"
        << name(fn) << ',' << name(scheme) << ',' << r.n_test << ','
        << format_double(r.ann.mean) << ',' << format_double(r.ann.std) << ',';
    if (r.reference) {
      csv << format_double(r.reference->fuzzy_mean) << ','
          << format_double(r.reference->fuzzy_std) << ',';
    } else {
      csv << ",,";
    }
    if (r.welch) {
      csv << format_double(r.welch->t) << ',' << format_double(r.welch->dof) << ','
          << format_double(r.welch->p);
    } else {
      csv << ",,";
    }
    csv << '\n';
    emit(c, csv.str(), out);
  }
}

void cmd_optimize(const RunConfig& c, std::ostream& out) {
  check_format(c);
  const FunctionId fn = require_function(c.fn);
  if (arity(fn) != 2) {
    throw UsageError(std::string(name(fn)) +
                     " is a 1-D benchmark; optimize takes ackley, bulkin or booth");
  }
  if (c.model.empty()) throw UsageError("--model is required for optimize");
  if (!fs::exists(c.model)) throw UsageError("model file not found: " + c.model);
  const RegressorModel model = load(c.model);
  const ComparisonReport rep = compare(fn, model, c.n, c.runs, c.seed);

  if (c.format == "json") {
    json j;
    j["config"] = echo(c);
    j["function"] = std::string(name(fn));
    j["n_samples"] = rep.n_samples;
    j["n_iters"] = rep.n_iters;
    j["columns"] = {"random", "type2_ann", "type1"};
    json rows = json::array();
    for (const ComparisonRow& row : rep.rows) {
      json stats = json::object();
      for (const auto& [key, rs] : {std::pair{"random", &row.random},
                                    std::pair{"type2_ann", &row.type2},
                                    std::pair{"type1", &row.type1}}) {
        stats[key] = {{"mean", rs->mean}, {"std", rs->std}};
      }
      rows.push_back({{"run", row.run_index + 1},
                      {"seed", row.seed},
                      {"random", mean_pm_std(row.random.mean, row.random.std)},
                      {"type2_ann", mean_pm_std(row.type2.mean, row.type2.std)},
                      {"type1", mean_pm_std(row.type1.mean, row.type1.std)},
                      {"stats", stats}});
    }
    j["runs"] = rows;
    json published = json::array();
    for (const PublishedRun& p : published_runs(fn)) {
      published.push_back({{"random", p.random},
                           {"type2_ann", p.type2_ann},
                           {"type2_fis", p.type2_fis},
                           {"type1", p.type1}});
    }
    j["published_reference"] = published;
    emit(c, j.dump(2) + "\n", out);
  } else {
    std::ostringstream csv;
    csv << "# config: " << echo(c).dump() << '\n' << "run,random,type2_ann,type1\n";
    for (const ComparisonRow& row : rep.rows) {
      csv << row.run_index + 1 << ',' << mean_pm_std(row.random.mean, row.random.std) << ','
          << mean_pm_std(row.type2.mean, row.type2.std) << ','
          << mean_pm_std(row.type1.mean, row.type1.std) << '\n';
    }
    emit(c, csv.str(), out);
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learn type-II opposites from sampled data", "obl"};
  app.require_subcommand(1);
  RunConfig c;

  auto add_fn = [&](CLI::App* sub) {
    sub->add_option("--fn", c.fn, "Function id: " + function_names());
  };
  auto add_seed = [&](CLI::App* sub) { sub->add_option("--seed", c.seed, "Master seed"); };

  CLI::App* s = app.add_subcommand("sample", "Sample a benchmark into a dataset CSV");
  add_fn(s);
  s->add_option("--n", c.n, "Sample count");
  s->add_option("--mode", c.mode, "grid | uniform");
  add_seed(s);
  s->add_option("--lower", c.lower, "Override lower bounds of the domain box");
  s->add_option("--upper", c.upper, "Override upper bounds of the domain box");
  s->add_option("--out", c.out, "Dataset CSV to write");

  CLI::App* m = app.add_subcommand("mine", "Mine (quasi-)opposite pairs from a dataset CSV");
  m->add_option("--in", c.in, "Dataset CSV");
  m->add_option("--scheme", c.scheme, "t1 | t2 | t3");
  add_fn(m);
  add_seed(m);
  m->add_option("--out", c.out, "Mined-set CSV to write");

  CLI::App* t = app.add_subcommand("train", "Train the opposite regressor on a mined set");
  t->add_option("--in", c.in, "Mined-set CSV");
  add_fn(t);
  t->add_option("--hidden", c.hidden, "Hidden tanh units");
  t->add_option("--epochs", c.epochs, "Maximum epochs");
  t->add_option("--lr", c.lr, "Learning rate");
  t->add_option("--patience", c.patience, "Early-stop patience in epochs");
  t->add_option("--val-fraction", c.validation_fraction, "Validation fraction in (0, 0.5]");
  t->add_option("--batch", c.batch, "Mini-batch size, 0 for full batch");
  t->add_option("--optimizer", c.optimizer, "adam | gd");
  add_seed(t);
  t->add_option("--out", c.out, "Model JSON to write");
  t->add_option("--history", c.history, "Loss history CSV (default <out>.history.csv)");

  CLI::App* e = app.add_subcommand("eval", "Evaluate a model against the exact oracle");
  add_fn(e);
  e->add_option("--scheme", c.scheme, "t1 | t2 | t3");
  e->add_option("--model", c.model, "Model JSON");
  e->add_option("--n", c.n, "Sample count for the reference output statistics");
  e->add_option("--mode", c.mode, "grid | uniform");
  e->add_option("--n-test", c.n_test, "Held-out test points");
  e->add_option("--reference-n", c.reference_n, "Assumed size of the published sample");
  add_seed(e);
  e->add_option("--format", c.format, "json | csv");
  e->add_option("--out", c.out, "Report path (stdout if omitted)");

  CLI::App* o = app.add_subcommand("optimize", "Opposition-guided random search comparison");
  add_fn(o);
  o->add_option("--model", c.model, "Model JSON trained on the same function");
  o->add_option("--n", c.n, "n_s; each run performs 0.1 * n_s iterations");
  o->add_option("--runs", c.runs, "Number of runs");
  add_seed(o);
  o->add_option("--format", c.format, "json | csv");
  o->add_option("--out", c.out, "Report path (stdout if omitted)");

  std::vector<const char*> argv{"obl"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex, out, err);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex, out, err);
    return kExitUsage;
  }

  try {
    if (s->parsed()) {
      c.command = "sample";
      cmd_sample(c, out);
    } else if (m->parsed()) {
      c.command = "mine";
      cmd_mine(c, out);
    } else if (t->parsed()) {
      c.command = "train";
      cmd_train(c, out);
    } else if (e->parsed()) {
      c.command = "eval";
      cmd_eval(c, out);
    } else if (o->parsed()) {
      c.command = "optimize";
      cmd_optimize(c, out);
    }
  } catch (const UsageError& ex) {
    err << "usage error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const FormatError& ex) {
    err << "format error: " << ex.what() << '\n';
    return kExitFormat;
  } catch (const DomainError& ex) {
    err << "domain error: " << ex.what() << '\n';
    return kExitDomain;
  } catch (const TrainingError& ex) {
    err << "training error at epoch " << ex.epoch() << ": " << ex.what() << '\n';
    return kExitTraining;
  } catch (const UnsupportedFunctionError& ex) {
    err << "unsupported function: " << ex.what() << '\n';
    return kExitUnsupported;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace obl
