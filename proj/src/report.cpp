#include "lemll/report.hpp"

namespace lemll {
namespace {

nlohmann::json maybe(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const EvalReport& report) {
  return {{"hamming_loss", maybe(report.hamming_loss)},
          {"ranking_loss", maybe(report.ranking_loss)},
          {"one_error", maybe(report.one_error)},
          {"coverage", maybe(report.coverage)},
          {"average_precision", maybe(report.average_precision)}};
}

nlohmann::json to_json(const ReconstructionReport& report) {
  return {{"chebyshev", report.chebyshev}, {"kl", report.kl}, {"cosine", report.cosine}};
}

nlohmann::json to_json(const LemllConfig& c) {
  return {{"k", c.k},
          {"epsilon", c.epsilon},
          {"alpha", c.alpha},
          {"beta", c.beta},
          {"gamma", c.gamma},
          {"outer_max_iters", c.outer_max_iters},
          {"outer_rel_tol", c.outer_rel_tol},
          {"lle_regularization", c.lle_regularization},
          {"msvr_max_iters", c.msvr_max_iters},
          {"msvr_rel_tol", c.msvr_rel_tol},
          {"enhancer_max_iters", c.enhancer_max_iters},
          {"enhancer_rel_tol", c.enhancer_rel_tol},
          {"armijo_c", c.armijo_c},
          {"max_backtracks", c.max_backtracks}};
}

nlohmann::json to_json(const TrainingReport& report) {
  return {{"iterations", report.iterations},
          {"converged", report.converged},
          {"objective_trace", report.objective_trace}};
}

LemllConfig config_from_json(const nlohmann::json& j) {
  LemllConfig c;
  c.k = j.value("k", c.k);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.alpha = j.value("alpha", c.alpha);
  c.beta = j.value("beta", c.beta);
  c.gamma = j.value("gamma", c.gamma);
  c.outer_max_iters = j.value("outer_max_iters", c.outer_max_iters);
  c.outer_rel_tol = j.value("outer_rel_tol", c.outer_rel_tol);
  c.lle_regularization = j.value("lle_regularization", c.lle_regularization);
  c.msvr_max_iters = j.value("msvr_max_iters", c.msvr_max_iters);
  c.msvr_rel_tol = j.value("msvr_rel_tol", c.msvr_rel_tol);
  c.enhancer_max_iters = j.value("enhancer_max_iters", c.enhancer_max_iters);
  c.enhancer_rel_tol = j.value("enhancer_rel_tol", c.enhancer_rel_tol);
  c.armijo_c = j.value("armijo_c", c.armijo_c);
  c.max_backtracks = j.value("max_backtracks", c.max_backtracks);
  return c;
}

}  // namespace lemll
