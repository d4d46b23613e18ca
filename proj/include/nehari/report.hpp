// Copyright 2026 The nehari-dp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

// JSON views of configs, constants, thresholds and solution reports.

#include <fstream>
#include <string>

#include "json.hpp"
#include "nehari/config.hpp"

namespace nehari {

using Json = nlohmann::ordered_json;

inline Json to_json(const EnergyBreakdown& e) {
  return {{"grad_p_term", e.grad_p_term}, {"grad_q_term", e.grad_q_term}, {"lambda_q_term", e.lambda_q_term},
          {"u_p_term", e.u_p_term},       {"F_term", e.F_term},           {"total", e.total}};
}

inline Json to_json(const ConstantsEstimate& c) {
  return {{"c_poincare", c.c_poincare}, {"D_embed", c.D_embed}, {"c1_embed", c.c1_embed},
          {"r_q", c.r_q},               {"seed", c.seed},       {"trials", c.trials},
          {"refinements", c.refinements}, {"method", c.method}};
}

inline Json to_json(const Thresholds& t) {
  return {{"lambda_star", t.lambda_star},
          {"lambda_star_raw", t.lambda_star_raw},
          {"lambda_star_clamped", t.lambda_star_clamped},
          {"lambda_star_star", t.lambda_star_star},
          {"lambda_star_star_degenerate", t.lambda_star_star_degenerate},
          {"lambda_bar", t.lambda_bar},
          {"mu0", t.mu0},
          {"p_minus", t.bounds.p_minus},
          {"p_plus", t.bounds.p_plus},
          {"q_minus", t.bounds.q_minus},
          {"q_plus", t.bounds.q_plus},
          {"constants", to_json(t.constants)}};
}

inline Json to_json(const SolverConfig& s) {
  return {{"max_outer_iters", s.max_outer_iters},
          {"initial_step", s.initial_step},
          {"shrink", s.shrink},
          {"sufficient_decrease", s.sufficient_decrease},
          {"max_backtracks", s.max_backtracks},
          {"projection_tol", s.projection_tol},
          {"residual_stop", s.residual_stop},
          {"multistart", s.multistart},
          {"seed", s.seed},
          {"target", to_string(s.target)},
          {"truncate", s.truncate},
          {"start_bias", s.start_bias},
          {"start_amplitude", s.start_amplitude},
          {"start_max_mode", s.start_max_mode},
          {"start_halvings", s.start_halvings},
          {"threads", s.threads}};
}

/// The configuration after defaults and command-line overrides.
inline Json to_json(const RunConfig& c) {
  Json j;
  j["source"] = c.source;
  j["seed"] = c.seed;
  j["chart"] = {{"dim", c.dim}, {"sizes", c.sizes}, {"lengths", c.lengths}, {"metric", c.metric}};
  j["exponents"] = {{"p", c.p.text}, {"q", c.q.text}};
  j["weight"] = {{"mu", c.mu.text}};
  Json prob = {{"beta", c.beta}, {"a", c.a.text}, {"A_threshold", c.A_threshold}};
  if (c.lambda) prob["lambda"] = {{"relative", c.lambda->relative}, {"value", c.lambda->value}};
  j["problem"] = prob;
  if (c.grid) j["sweep"] = {{"relative", c.grid->relative}, {"lambdas", c.grid->values}};
  j["constants"] = {{"trials", c.constant_trials}};
  j["solver"] = to_json(c.solver);
  j["verify"] = {{"trials", c.verify.trials}, {"derivative_trials", c.verify.derivative_trials}};
  j["output"] = {{"dir", c.out_dir}};
  return j;
}

inline Json to_json(const SolutionReport& r) {
  Json runs = Json::array();
  for (const auto& s : r.runs)
    runs.push_back({{"start_index", s.start_index},
                    {"status", to_string(s.status)},
                    {"J_value", s.J_value},
                    {"residual_norm", s.residual_norm},
                    {"iterations", s.iterations}});
  Json j = {{"status", to_string(r.status)},
            {"target", to_string(r.target)},
            {"class", to_string(r.klass)},
            {"J_value", r.J_value},
            {"psi_value", r.psi_value},
            {"psi_scale", r.psi_scale},
            {"residual_norm", r.residual_norm},
            {"min_u", r.min_u},
            {"theta_estimate", r.theta_estimate},
            {"iterations", r.iterations},
            {"start_index", r.start_index},
            {"truncate", r.truncate},
            {"monotone", r.monotone},
            {"max_constraint_violation", r.max_constraint_violation},
            {"energy", to_json(r.energy)},
            {"runs", runs},
            {"warnings", r.warnings}};
  j["constants"] = r.constants ? to_json(*r.constants) : Json(nullptr);
  return j;
}

inline void write_json(const std::string& path, const Json& j) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  os << j.dump(2) << "\n";
  if (!os) throw Error("failed writing '" + path + "'");
}

}  // namespace nehari
