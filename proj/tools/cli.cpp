#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <exception>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lemll/csv.hpp"
#include "lemll/dataset.hpp"
#include "lemll/error.hpp"
#include "lemll/lemll.hpp"
#include "lemll/model_io.hpp"
#include "lemll/report.hpp"

namespace lemll::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kMetricKeys[] = {"hamming_loss", "ranking_loss", "one_error", "coverage",
                                       "average_precision"};

struct Common {
  LemllConfig config;
  std::uint64_t seed = 0;
  int threads = 0;
  bool standardize = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("-K,--K", c.config.k, "nearest neighbors for the LLE graph")->capture_default_str();
  sub->add_option("--epsilon", c.config.epsilon, "tube width")->capture_default_str();
  sub->add_option("--alpha", c.config.alpha, "ridge weight on theta")->capture_default_str();
  sub->add_option("--beta", c.config.beta, "weight on ||U - Y||^2")->capture_default_str();
  sub->add_option("--gamma", c.config.gamma, "weight on tr(U'MU)")->capture_default_str();
  sub->add_option("--outer-max-iters", c.config.outer_max_iters)->capture_default_str();
  sub->add_option("--outer-tol", c.config.outer_rel_tol)->capture_default_str();
  sub->add_option("--msvr-max-iters", c.config.msvr_max_iters)->capture_default_str();
  sub->add_option("--msvr-tol", c.config.msvr_rel_tol)->capture_default_str();
  sub->add_option("--enhancer-max-iters", c.config.enhancer_max_iters)->capture_default_str();
  sub->add_option("--enhancer-tol", c.config.enhancer_rel_tol)->capture_default_str();
  sub->add_option("--lle-reg", c.config.lle_regularization)->capture_default_str();
  sub->add_option("--seed", c.seed, "seed for splits and folds")->capture_default_str();
  sub->add_option("--threads", c.threads, "OpenMP threads (0 = runtime default)");
  sub->add_flag("--standardize", c.standardize,
                "z-score features with statistics from the training rows only");
}

json echo(const Common& c) {
  return {{"config", to_json(c.config)}, {"seed", c.seed}, {"standardize", c.standardize}};
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw DataError("write failed for " + path.string());
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(std::string("cannot parse ") + what + " value '" + item + "'");
    }
  }
  if (values.empty()) throw ConfigError(std::string(what) + " list is empty");
  return values;
}

// Applies z-scoring fit on `train`'s own rows when requested.
Standardizer prepare(MultiLabelDataset& train, bool standardize) {
  if (!standardize) return {};
  auto s = Standardizer::fit(train.features);
  train.features = s.apply(train.features);
  return s;
}

LemllModel train_model(MultiLabelDataset data, const Common& c) {
  auto standardizer = prepare(data, c.standardize);
  auto model = lemll::fit(data, c.config);
  model.standardizer = std::move(standardizer);
  return model;
}

// ---- train ---------------------------------------------------------------

struct TrainArgs {
  std::string features, labels, model, report, trace_csv, dump_graph;
};

void cmd_train(const TrainArgs& a, const Common& c, std::ostream& out) {
  auto data = load_multilabel(a.features, a.labels);
  auto standardizer = prepare(data, c.standardize);
  c.config.validate();
  if (data.size() < c.config.k + 1) {
    throw ConfigError("training needs n >= K+1 instances");
  }
  const auto graph = build_graph(data.features, c.config.k, c.config.lle_regularization);
  auto model = lemll::fit(data, c.config, graph);
  model.standardizer = std::move(standardizer);
  save_model(a.model, model);

  if (!a.dump_graph.empty()) write_graph_csv(a.dump_graph, graph);
  if (!a.trace_csv.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t t = 0; t < model.report.enhancer_traces.size(); ++t) {
      const auto& trace = model.report.enhancer_traces[t];
      for (std::size_t s = 0; s < trace.size(); ++s) {
        rows.push_back({std::to_string(t + 1), std::to_string(s), csv::format_number(trace[s])});
      }
    }
    csv::write(a.trace_csv, {"outer", "step", "objective"}, rows);
  }

  json report = echo(c);
  report["command"] = "train";
  report["inputs"] = {{"features", a.features}, {"labels", a.labels}};
  report["model"] = a.model;
  report["shape"] = {{"n", data.size()}, {"d", data.num_features()}, {"l", data.num_labels()}};
  report["training"] = to_json(model.report);
  write_json(a.report.empty() ? a.model + ".json" : a.report, report);
  out << "trained on " << data.size() << " instances, " << model.report.iterations
      << " outer iterations, objective " << model.report.objective_trace.back() << '\n';
}

// ---- eval ----------------------------------------------------------------

struct EvalArgs {
  std::string features, labels, model, report, csv;
  std::size_t splits = 0;
  double train_fraction = 0.5;
};

std::optional<double> metric_of(const EvalReport& r, std::size_t k) {
  switch (k) {
    case 0: return r.hamming_loss;
    case 1: return r.ranking_loss;
    case 2: return r.one_error;
    case 3: return r.coverage;
    default: return r.average_precision;
  }
}

void cmd_eval(const EvalArgs& a, const Common& c, std::ostream& out) {
  const auto data = load_multilabel(a.features, a.labels);
  json rows = json::array();
  std::vector<EvalReport> reports;

  if (!a.model.empty()) {
    const auto model = load_model(a.model);
    reports.push_back(evaluate_model(model, data));
    rows.push_back({{"split", 0}, {"test_size", data.size()}, {"metrics", to_json(reports[0])}});
  } else {
    c.config.validate();
    const auto splits = make_splits(data.size(), {c.seed, a.splits, a.train_fraction});
    reports.resize(splits.size());
    std::vector<std::exception_ptr> failures(splits.size());
    const auto count = static_cast<std::ptrdiff_t>(splits.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t s = 0; s < count; ++s) {
      try {
        const auto model = train_model(data.subset(splits[s].train), c);
        reports[s] = evaluate_model(model, data.subset(splits[s].test));
      } catch (...) {
        failures[s] = std::current_exception();
      }
    }
    for (const auto& e : failures) {
      if (e) std::rethrow_exception(e);
    }
    for (std::size_t s = 0; s < splits.size(); ++s) {
      rows.push_back({{"split", s},
                      {"train_size", splits[s].train.size()},
                      {"test_size", splits[s].test.size()},
                      {"metrics", to_json(reports[s])}});
    }
  }

  // Sample standard deviation over the splits where a metric is defined;
  // a single value has deviation 0.
  json mean = json::object();
  json stdev = json::object();
  for (std::size_t k = 0; k < std::size(kMetricKeys); ++k) {
    std::vector<double> values;
    for (const auto& r : reports) {
      if (const auto v = metric_of(r, k)) values.push_back(*v);
    }
    if (values.empty()) {
      mean[kMetricKeys[k]] = nullptr;
      stdev[kMetricKeys[k]] = nullptr;
      continue;
    }
    double m = 0.0;
    for (const double v : values) m += v;
    m /= static_cast<double>(values.size());
    double ss = 0.0;
    for (const double v : values) ss += (v - m) * (v - m);
    mean[kMetricKeys[k]] = m;
    stdev[kMetricKeys[k]] =
        values.size() > 1 ? std::sqrt(ss / static_cast<double>(values.size() - 1)) : 0.0;
  }

  json report = echo(c);
  report["command"] = "eval";
  report["inputs"] = {{"features", a.features}, {"labels", a.labels}};
  if (!a.model.empty()) {
    report["model"] = a.model;
  } else {
    report["split_plan"] = {{"repetitions", a.splits}, {"train_fraction", a.train_fraction}};
  }
  report["splits"] = rows;
  report["mean"] = mean;
  report["std"] = stdev;
  write_json(a.report, report);

  if (!a.csv.empty()) {
    std::vector<std::string> header{"split"};
    for (const auto* key : kMetricKeys) header.emplace_back(key);
    std::vector<std::vector<std::string>> table;
    auto cell = [](const json& v) { return v.is_null() ? std::string("") : csv::format_number(v.get<double>()); };
    for (const auto& row : rows) {
      std::vector<std::string> line{std::to_string(row["split"].get<std::size_t>())};
      for (const auto* key : kMetricKeys) line.push_back(cell(row["metrics"][key]));
      table.push_back(std::move(line));
    }
    for (const auto& [label, obj] : {std::pair<const char*, const json*>{"mean", &mean}, {"std", &stdev}}) {
      std::vector<std::string> line{label};
      for (const auto* key : kMetricKeys) line.push_back(cell((*obj)[key]));
      table.push_back(std::move(line));
    }
    csv::write(a.csv, header, table);
  }
  out << "evaluated " << reports.size() << " run(s); mean average_precision "
      << mean["average_precision"].dump() << '\n';
}

// ---- tune ----------------------------------------------------------------

struct TuneArgs {
  std::string features, labels, output, alphas, betas, gammas, metric = "average_precision";
  int folds = 5;
};

void cmd_tune(const TuneArgs& a, const Common& c, std::ostream& out) {
  auto data = load_multilabel(a.features, a.labels);
  prepare(data, c.standardize);
  Grid grid = Grid::standard();
  if (!a.alphas.empty()) grid.alphas = parse_list(a.alphas, "alpha");
  if (!a.betas.empty()) grid.betas = parse_list(a.betas, "beta");
  if (!a.gammas.empty()) grid.gammas = parse_list(a.gammas, "gamma");
  const auto metric = parse_selection_metric(a.metric);

  const auto result = grid_search(data, c.config, grid, a.folds, c.seed, metric);

  json candidates = json::array();
  for (const auto& cand : result.candidates) {
    candidates.push_back({{"alpha", cand.alpha},
                          {"beta", cand.beta},
                          {"gamma", cand.gamma},
                          {"score", cand.score ? json(*cand.score) : json(nullptr)}});
  }
  json report = echo(c);
  report["command"] = "tune";
  report["inputs"] = {{"features", a.features}, {"labels", a.labels}};
  report["folds"] = a.folds;
  report["metric"] = to_string(metric);
  report["candidates_evaluated"] = result.candidates.size();
  report["candidates"] = candidates;
  report["best"] = to_json(result.best);
  report["best_score"] = result.best_score ? json(*result.best_score) : json(nullptr);
  write_json(a.output, report);
  out << "best alpha=" << result.best.alpha << " beta=" << result.best.beta
      << " gamma=" << result.best.gamma << " over " << result.candidates.size()
      << " candidates\n";
}

// ---- enhance -------------------------------------------------------------

struct EnhanceArgs {
  std::string features, labels, output, report;
};

void cmd_enhance(const EnhanceArgs& a, const Common& c, std::ostream& out) {
  const auto data = load_multilabel(a.features, a.labels);
  const auto model = train_model(data, c);

  std::vector<std::string> header{"y0"};
  header.insert(header.end(), data.label_names.begin(), data.label_names.end());
  std::vector<std::vector<std::string>> rows(static_cast<std::size_t>(model.u_final.rows()));
  for (Eigen::Index i = 0; i < model.u_final.rows(); ++i) {
    for (Eigen::Index j = 0; j < model.u_final.cols(); ++j) {
      rows[i].push_back(csv::format_number(model.u_final(i, j)));
    }
  }
  csv::write(a.output, header, rows);

  json report = echo(c);
  report["command"] = "enhance";
  report["inputs"] = {{"features", a.features}, {"labels", a.labels}};
  report["output"] = a.output;
  report["training"] = to_json(model.report);
  write_json(a.report.empty() ? a.output + ".json" : a.report, report);
  out << "wrote " << rows.size() << " x " << header.size() << " numerical labels\n";
}

// ---- reconstruct ---------------------------------------------------------

struct ReconstructArgs {
  std::string features, distributions, report, csv, rhos = "0.1,0.2,0.3,0.4,0.5";
};

void cmd_reconstruct(const ReconstructArgs& a, const Common& c, std::ostream& out) {
  const auto dist = load_distribution(a.features, a.distributions);
  const auto rhos = parse_list(a.rhos, "rho");
  for (const double rho : rhos) {
    if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("rho values must lie in (0,1)");
  }
  c.config.validate();

  MultiLabelDataset data;
  data.features = dist.features;
  data.feature_names = dist.feature_names;
  data.label_names = dist.label_names;
  prepare(data, c.standardize);
  if (data.size() < c.config.k + 1) throw ConfigError("reconstruction needs n >= K+1 instances");
  const auto graph = build_graph(data.features, c.config.k, c.config.lle_regularization);

  json rows = json::array();
  std::vector<std::vector<std::string>> table;
  for (const double rho : rhos) {
    data.labels = metrics::binarize_rows(dist.distributions, rho);
    const auto model = lemll::fit(data, c.config, graph);
    const Matrix recovered = metrics::normalize_rows(label_scores(model.u_final));
    const Matrix baseline = metrics::normalize_rows(data.labels.cast<double>());
    const auto lemll_report = metrics::compare(dist.distributions, recovered);
    const auto base_report = metrics::compare(dist.distributions, baseline);
    rows.push_back({{"rho", rho},
                    {"lemll", to_json(lemll_report)},
                    {"baseline", to_json(base_report)},
                    {"outer_iterations", model.report.iterations}});
    table.push_back({csv::format_number(rho), csv::format_number(lemll_report.chebyshev),
                     csv::format_number(lemll_report.kl), csv::format_number(lemll_report.cosine),
                     csv::format_number(base_report.chebyshev), csv::format_number(base_report.kl),
                     csv::format_number(base_report.cosine)});
  }

  json report = echo(c);
  report["command"] = "reconstruct";
  report["inputs"] = {{"features", a.features}, {"distributions", a.distributions}};
  report["results"] = rows;
  write_json(a.report, report);
  if (!a.csv.empty()) {
    csv::write(a.csv,
               {"rho", "chebyshev", "kl", "cosine", "baseline_chebyshev", "baseline_kl",
                "baseline_cosine"},
               table);
  }
  out << "reconstructed " << dist.size() << " distributions at " << rhos.size()
      << " threshold(s)\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"LEMLL: multi-label learning with label enhancement", "lemll"};
  app.require_subcommand(1);

  Common common;

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "fit a model and write it to disk");
  train_cmd->add_option("--features", train.features)->required();
  train_cmd->add_option("--labels", train.labels)->required();
  train_cmd->add_option("--model", train.model, "output model file")->required();
  train_cmd->add_option("--report", train.report, "JSON report (default <model>.json)");
  train_cmd->add_option("--trace-csv", train.trace_csv, "per-step enhancer objectives");
  train_cmd->add_option("--dump-graph", train.dump_graph, "directory for W.csv and M.csv");
  add_common(train_cmd, common);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a model or retrain over random splits");
  eval_cmd->add_option("--features", eval.features)->required();
  eval_cmd->add_option("--labels", eval.labels)->required();
  auto* model_opt = eval_cmd->add_option("--model", eval.model);
  auto* splits_opt = eval_cmd->add_option("--splits", eval.splits, "train/test repetitions");
  model_opt->excludes(splits_opt);
  eval_cmd->add_option("--train-fraction", eval.train_fraction)->capture_default_str();
  eval_cmd->add_option("--report", eval.report)->required();
  eval_cmd->add_option("--csv", eval.csv, "optional table of per-split metrics");
  add_common(eval_cmd, common);

  TuneArgs tune;
  auto* tune_cmd = app.add_subcommand("tune", "cross-validated grid search over alpha, beta, gamma");
  tune_cmd->add_option("--features", tune.features)->required();
  tune_cmd->add_option("--labels", tune.labels)->required();
  tune_cmd->add_option("--output", tune.output, "best-config JSON")->required();
  tune_cmd->add_option("--alphas", tune.alphas, "comma list (default 1/64..64)");
  tune_cmd->add_option("--betas", tune.betas, "comma list (default 1/64..64)");
  tune_cmd->add_option("--gammas", tune.gammas, "comma list (default 1/64..64)");
  tune_cmd->add_option("--folds", tune.folds)->capture_default_str();
  tune_cmd->add_option("--metric", tune.metric)->capture_default_str();
  add_common(tune_cmd, common);

  EnhanceArgs enhance;
  auto* enhance_cmd = app.add_subcommand("enhance", "write the numerical label matrix U");
  enhance_cmd->add_option("--features", enhance.features)->required();
  enhance_cmd->add_option("--labels", enhance.labels)->required();
  enhance_cmd->add_option("--output", enhance.output, "CSV with columns y0, labels...")->required();
  enhance_cmd->add_option("--report", enhance.report, "JSON echo (default <output>.json)");
  add_common(enhance_cmd, common);

  ReconstructArgs recon;
  auto* recon_cmd =
      app.add_subcommand("reconstruct", "recover label distributions from binarized labels");
  recon_cmd->add_option("--features", recon.features)->required();
  recon_cmd->add_option("--distributions", recon.distributions)->required();
  recon_cmd->add_option("--rho", recon.rhos, "comma list of thresholds")->capture_default_str();
  recon_cmd->add_option("--report", recon.report)->required();
  recon_cmd->add_option("--csv", recon.csv);
  add_common(recon_cmd, common);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

#ifdef _OPENMP
  if (common.threads > 0) omp_set_num_threads(common.threads);
#endif

  try {
    if (*train_cmd) cmd_train(train, common, out);
    else if (*eval_cmd) {
      if (eval.model.empty() && eval.splits == 0) {
        throw ConfigError("eval needs either --model or --splits");
      }
      cmd_eval(eval, common, out);
    } else if (*tune_cmd) cmd_tune(tune, common, out);
    else if (*enhance_cmd) cmd_enhance(enhance, common, out);
    else if (*recon_cmd) cmd_reconstruct(recon, common, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what() << '\n';
    return kSolverError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kOk;
}

}  // namespace lemll::cli
