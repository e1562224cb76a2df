#include <doctest.h>

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cli.hpp"
#include "lemll/csv.hpp"
#include "lemll/dataset.hpp"
#include "lemll/lemll.hpp"
#include "support.hpp"

using namespace lemll;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "lemll");
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

struct Files {
  fs::path features, labels;
};

Files write_dataset(const fs::path& dir, const MultiLabelDataset& ds) {
  Files f{dir / "X.csv", dir / "Y.csv"};
  write_features(f.features, ds.features, ds.feature_names);
  write_labels(f.labels, ds.labels, ds.label_names);
  return f;
}

// Labels from a noiseless linear map, keeping only points whose scores clear
// a margin of 0.5 on every label.
MultiLabelDataset separable(Eigen::Index n, Eigen::Index d, Eigen::Index l, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Matrix map = testing::gaussian(d, l, rng);
  MultiLabelDataset ds;
  ds.features.resize(n, d);
  ds.labels.resize(n, l);
  Eigen::Index filled = 0;
  while (filled < n) {
    const Vector x = testing::gaussian(d, 1, rng).col(0);
    const Vector s = map.transpose() * x;
    if (s.cwiseAbs().minCoeff() < 0.5) continue;
    ds.features.row(filled) = x.transpose();
    for (Eigen::Index j = 0; j < l; ++j) ds.labels(filled, j) = s(j) > 0 ? 1 : -1;
    ++filled;
  }
  ds.feature_names = testing::names("f", d);
  ds.label_names = testing::names("y", l);
  return ds;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("train writes a model and a report with a nonincreasing trace") {
    const auto dir = testing::scratch_dir("cli_train");
    const auto files = write_dataset(dir, testing::synthetic_multilabel(50, 10, 5, 1));
    const auto model = dir / "model.txt";
    const auto r = invoke({"train", "--features", files.features.string(), "--labels",
                           files.labels.string(), "--model", model.string(), "--trace-csv",
                           (dir / "trace.csv").string(), "--dump-graph", (dir / "graph").string()});
    REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
    CHECK(fs::exists(model));
    const auto report = read_json(model.string() + ".json");
    const auto trace = report["training"]["objective_trace"].get<std::vector<double>>();
    REQUIRE(trace.size() >= 2);
    for (std::size_t t = 1; t < trace.size(); ++t) CHECK(trace[t] <= trace[t - 1] + 1e-12);
    CHECK(report["config"]["k"] == 10);
    CHECK(report["config"]["epsilon"] == 0.1);
    CHECK(report["shape"]["l"] == 5);
    CHECK(fs::exists(dir / "graph" / "W.csv"));
    CHECK(fs::exists(dir / "graph" / "M.csv"));
    const auto table = csv::read(dir / "trace.csv");
    CHECK(table.header == std::vector<std::string>{"outer", "step", "objective"});
    CHECK(!table.rows.empty());
  }

  TEST_CASE("train twice gives byte-identical models") {
    const auto dir = testing::scratch_dir("cli_determinism");
    const auto files = write_dataset(dir, testing::synthetic_multilabel(50, 10, 5, 2));
    for (const char* name : {"a.txt", "b.txt"}) {
      const auto r = invoke({"train", "--features", files.features.string(), "--labels",
                             files.labels.string(), "--model", (dir / name).string(), "--seed", "7"});
      REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
    }
    CHECK(slurp(dir / "a.txt") == slurp(dir / "b.txt"));
  }

  TEST_CASE("missing labels file is a data error naming the path") {
    const auto dir = testing::scratch_dir("cli_missing");
    const auto files = write_dataset(dir, testing::synthetic_multilabel(20, 3, 2, 3));
    const auto ghost = (dir / "nowhere.csv").string();
    const auto r = invoke({"train", "--features", files.features.string(), "--labels", ghost,
                           "--model", (dir / "m.txt").string()});
    CHECK(r.code == cli::kDataError);
    CHECK(r.err.find(ghost) != std::string::npos);
  }

  TEST_CASE("usage errors exit with 1") {
    CHECK(invoke({}).code == cli::kUsageError);
    CHECK(invoke({"train"}).code == cli::kUsageError);
    CHECK(invoke({"frobnicate"}).code == cli::kUsageError);
    const auto dir = testing::scratch_dir("cli_usage");
    const auto files = write_dataset(dir, testing::synthetic_multilabel(20, 3, 2, 3));
    const auto r = invoke({"train", "--features", files.features.string(), "--labels",
                           files.labels.string(), "--model", (dir / "m.txt").string(), "--beta", "0"});
    CHECK(r.code == cli::kUsageError);
    CHECK(invoke({"train", "--help"}).code == cli::kOk);
  }

  TEST_CASE("eval: separable data, split rows, single-run deviation") {
    const auto dir = testing::scratch_dir("cli_eval");
    const auto files = write_dataset(dir, separable(200, 5, 4, 9));
    const auto r1 = invoke({"eval", "--features", files.features.string(), "--labels",
                            files.labels.string(), "--splits", "1", "--report",
                            (dir / "one.json").string()});
    REQUIRE_MESSAGE(r1.code == cli::kOk, r1.err);
    const auto one = read_json(dir / "one.json");
    CHECK(one["splits"].size() == 1);
    CHECK(one["mean"]["hamming_loss"].get<double>() <= 0.05);
    for (const auto& [key, value] : one["std"].items()) {
      if (!value.is_null()) CHECK(value.get<double>() == 0.0);
    }

    const auto r10 = invoke({"eval", "--features", files.features.string(), "--labels",
                             files.labels.string(), "--splits", "10", "--outer-max-iters", "5",
                             "--report", (dir / "ten.json").string(), "--csv",
                             (dir / "ten.csv").string()});
    REQUIRE_MESSAGE(r10.code == cli::kOk, r10.err);
    const auto ten = read_json(dir / "ten.json");
    CHECK(ten["splits"].size() == 10);
    CHECK(ten["mean"].contains("average_precision"));
    CHECK(ten["std"].contains("average_precision"));
    CHECK(csv::read(dir / "ten.csv").rows.size() == 12);

    const auto model = dir / "m.txt";
    REQUIRE(invoke({"train", "--features", files.features.string(), "--labels",
                    files.labels.string(), "--model", model.string()})
                .code == cli::kOk);
    const auto rm = invoke({"eval", "--features", files.features.string(), "--labels",
                            files.labels.string(), "--model", model.string(), "--report",
                            (dir / "model.json").string()});
    REQUIRE_MESSAGE(rm.code == cli::kOk, rm.err);
    const auto by_model = read_json(dir / "model.json");
    CHECK(by_model["splits"].size() == 1);
    CHECK(by_model["std"]["hamming_loss"] == 0.0);
    CHECK(by_model["mean"]["hamming_loss"].get<double>() <= 0.05);
  }

  TEST_CASE("reconstruct: five thresholds and a two-label set") {
    const auto dir = testing::scratch_dir("cli_reconstruct");
    const auto ds = testing::synthetic_distribution(120, 5, 4, 4);
    write_features(dir / "X.csv", ds.features, ds.feature_names);
    write_distributions(dir / "D.csv", ds.distributions, ds.label_names);
    const auto r = invoke({"reconstruct", "--features", (dir / "X.csv").string(), "--distributions",
                           (dir / "D.csv").string(), "--report", (dir / "r.json").string(), "--csv",
                           (dir / "r.csv").string()});
    REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
    const auto report = read_json(dir / "r.json");
    REQUIRE(report["results"].size() == 5);
    CHECK(report["results"][0]["rho"] == 0.1);
    CHECK(report["results"][4]["rho"] == 0.5);
    CHECK(csv::read(dir / "r.csv").rows.size() == 5);

    const auto two = testing::synthetic_distribution(60, 3, 2, 5);
    write_features(dir / "X2.csv", two.features, two.feature_names);
    write_distributions(dir / "D2.csv", two.distributions, two.label_names);
    const auto r2 = invoke({"reconstruct", "--features", (dir / "X2.csv").string(), "--distributions",
                            (dir / "D2.csv").string(), "--report", (dir / "r2.json").string()});
    CHECK_MESSAGE(r2.code == cli::kOk, r2.err);

    CHECK(invoke({"reconstruct", "--features", (dir / "X.csv").string(), "--distributions",
                  (dir / "D.csv").string(), "--rho", "1.5", "--report", (dir / "bad.json").string()})
              .code == cli::kUsageError);
  }

  TEST_CASE("reconstruct: near-binary truth at rho = 0.1 is no worse than the baseline in cosine") {
    const auto dir = testing::scratch_dir("cli_near_binary");
    // One dominant label per row: each distribution puts 0.97 on the arg max of a linear map.
    std::mt19937_64 rng(6);
    const Eigen::Index n = 150, d = 4, l = 4;
    const Matrix x = testing::gaussian(n, d, rng);
    const Matrix s = x * testing::gaussian(d, l, rng);
    Matrix dist = Matrix::Constant(n, l, 0.01);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index top;
      s.row(i).maxCoeff(&top);
      dist(i, top) = 0.97;
    }
    write_features(dir / "X3.csv", x, testing::names("f", d));
    write_distributions(dir / "D3.csv", dist, testing::names("y", l));
    const auto r3 = invoke({"reconstruct", "--features", (dir / "X3.csv").string(), "--distributions",
                            (dir / "D3.csv").string(), "--rho", "0.1", "--report",
                            (dir / "r3.json").string()});
    REQUIRE_MESSAGE(r3.code == cli::kOk, r3.err);
    const auto row = read_json(dir / "r3.json")["results"][0];
    CHECK(row["lemll"]["cosine"].get<double>() >= row["baseline"]["cosine"].get<double>());
  }

  TEST_CASE("tune with a single triple") {
    const auto dir = testing::scratch_dir("cli_tune");
    const auto files = write_dataset(dir, testing::synthetic_multilabel(40, 4, 3, 10));
    const auto r = invoke({"tune", "--features", files.features.string(), "--labels",
                           files.labels.string(), "--alphas", "0.25", "--betas", "4", "--gammas",
                           "16", "--folds", "3", "-K", "4", "--output", (dir / "best.json").string()});
    REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
    const auto best = read_json(dir / "best.json");
    CHECK(best["candidates_evaluated"] == 1);
    CHECK(best["best"]["alpha"] == 0.25);
    CHECK(best["best"]["beta"] == 4.0);
    CHECK(best["best"]["gamma"] == 16.0);
    CHECK(best["best_score"].is_number());
    CHECK(invoke({"tune", "--features", files.features.string(), "--labels", files.labels.string(),
                  "--alphas", "x", "--output", (dir / "bad.json").string()})
              .code == cli::kUsageError);
  }

  TEST_CASE("enhance: header, shape, limit case, determinism") {
    const auto dir = testing::scratch_dir("cli_enhance");
    const auto ds = testing::synthetic_multilabel(40, 5, 3, 11);
    const auto files = write_dataset(dir, ds);
    const auto r = invoke({"enhance", "--features", files.features.string(), "--labels",
                           files.labels.string(), "--output", (dir / "U.csv").string(), "--beta",
                           "1e6", "--gamma", "1e-12"});
    REQUIRE_MESSAGE(r.code == cli::kOk, r.err);
    const auto table = csv::read(dir / "U.csv");
    CHECK(table.header == std::vector<std::string>{"y0", "y1", "y2", "y3"});
    REQUIRE(table.rows.size() == 40);
    const Matrix y = extend_labels(ds.labels);
    double worst = 0.0;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      REQUIRE(table.rows[i].size() == 4);
      for (std::size_t j = 0; j < 4; ++j) {
        worst = std::max(worst, std::abs(std::stod(table.rows[i][j]) - y(i, j)));
      }
    }
    CHECK(worst < 1e-3);
    CHECK(fs::exists(dir / "U.csv.json"));

    for (const char* name : {"a.csv", "b.csv"}) {
      REQUIRE(invoke({"enhance", "--features", files.features.string(), "--labels",
                      files.labels.string(), "--output", (dir / name).string()})
                  .code == cli::kOk);
    }
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  }
}
