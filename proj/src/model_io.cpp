#include "lemll/model_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "lemll/csv.hpp"
#include "lemll/error.hpp"

namespace lemll {
namespace {

constexpr const char* kMagic = "lemll-model 1";

void write_vector(std::ostream& out, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out << ' ';
    out << csv::format_number(v(i));
  }
  out << '\n';
}

std::string next_line(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(std::string("model file truncated at ") + what);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

Vector read_vector(std::istream& in, Eigen::Index size) {
  std::istringstream row(next_line(in, "standardizer"));
  Vector v(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    std::string token;
    if (!(row >> token)) throw DataError("model file: short standardizer row");
    v(i) = csv::parse_number(token, "<model>", 0, static_cast<std::size_t>(i + 1));
  }
  return v;
}

}  // namespace

void save_model(std::ostream& out, const LemllModel& model) {
  const auto& c = model.config;
  out << kMagic << '\n';
  out << "config\n";
  out << "k " << c.k << '\n';
  out << "epsilon " << csv::format_number(c.epsilon) << '\n';
  out << "alpha " << csv::format_number(c.alpha) << '\n';
  out << "beta " << csv::format_number(c.beta) << '\n';
  out << "gamma " << csv::format_number(c.gamma) << '\n';
  out << "outer_max_iters " << c.outer_max_iters << '\n';
  out << "outer_rel_tol " << csv::format_number(c.outer_rel_tol) << '\n';
  out << "lle_regularization " << csv::format_number(c.lle_regularization) << '\n';
  out << "msvr_max_iters " << c.msvr_max_iters << '\n';
  out << "msvr_rel_tol " << csv::format_number(c.msvr_rel_tol) << '\n';
  out << "enhancer_max_iters " << c.enhancer_max_iters << '\n';
  out << "enhancer_rel_tol " << csv::format_number(c.enhancer_rel_tol) << '\n';
  out << "armijo_c " << csv::format_number(c.armijo_c) << '\n';
  out << "max_backtracks " << c.max_backtracks << '\n';
  out << "end\n";
  out << "labels " << model.label_names.size() << '\n';
  for (const auto& name : model.label_names) out << name << '\n';
  out << "standardizer " << model.standardizer.mean().size() << '\n';
  if (!model.standardizer.empty()) {
    write_vector(out, model.standardizer.mean());
    write_vector(out, model.standardizer.scale());
  }
  msvr::save(out, model.regression);
}

LemllModel load_model(std::istream& in) {
  if (next_line(in, "header") != kMagic) throw DataError("not a LEMLL model file");
  if (next_line(in, "config") != "config") throw DataError("model file: missing config block");

  LemllModel model;
  auto& c = model.config;
  for (std::string line = next_line(in, "config"); line != "end"; line = next_line(in, "config")) {
    std::istringstream kv(line);
    std::string key;
    std::string value;
    if (!(kv >> key >> value)) throw DataError("model file: bad config line '" + line + "'");
    const double v = csv::parse_number(value, "<model>", 0, 0);
    if (key == "k") c.k = static_cast<Eigen::Index>(v);
    else if (key == "epsilon") c.epsilon = v;
    else if (key == "alpha") c.alpha = v;
    else if (key == "beta") c.beta = v;
    else if (key == "gamma") c.gamma = v;
    else if (key == "outer_max_iters") c.outer_max_iters = static_cast<int>(v);
    else if (key == "outer_rel_tol") c.outer_rel_tol = v;
    else if (key == "lle_regularization") c.lle_regularization = v;
    else if (key == "msvr_max_iters") c.msvr_max_iters = static_cast<int>(v);
    else if (key == "msvr_rel_tol") c.msvr_rel_tol = v;
    else if (key == "enhancer_max_iters") c.enhancer_max_iters = static_cast<int>(v);
    else if (key == "enhancer_rel_tol") c.enhancer_rel_tol = v;
    else if (key == "armijo_c") c.armijo_c = v;
    else if (key == "max_backtracks") c.max_backtracks = static_cast<int>(v);
    else throw DataError("model file: unknown config key '" + key + "'");
  }

  std::istringstream labels_line(next_line(in, "labels"));
  std::string tag;
  std::size_t count = 0;
  if (!(labels_line >> tag >> count) || tag != "labels") throw DataError("model file: bad labels header");
  for (std::size_t j = 0; j < count; ++j) model.label_names.push_back(next_line(in, "labels"));

  std::istringstream std_line(next_line(in, "standardizer"));
  Eigen::Index width = 0;
  if (!(std_line >> tag >> width) || tag != "standardizer" || width < 0) {
    throw DataError("model file: bad standardizer header");
  }
  if (width > 0) {
    Vector mean = read_vector(in, width);
    Vector scale = read_vector(in, width);
    model.standardizer = Standardizer(std::move(mean), std::move(scale));
  }

  model.regression = msvr::load(in);
  if (model.regression.outputs() != static_cast<Eigen::Index>(count) + 1) {
    throw DataError("model file: regression outputs do not match label count + 1");
  }
  if (width > 0 && width != model.regression.inputs()) {
    throw DataError("model file: standardizer width does not match regression inputs");
  }
  return model;
}

void save_model(const std::filesystem::path& path, const LemllModel& model) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  save_model(out, model);
  if (!out) throw DataError("write failed for " + path.string());
}

LemllModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return load_model(in);
}

}  // namespace lemll
