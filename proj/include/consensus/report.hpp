#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <type_traits>
#include <variant>

#include "json.hpp"

#include "consensus/certify.hpp"
#include "consensus/io.hpp"
#include "consensus/products.hpp"
#include "consensus/seminorms.hpp"

// JSON and CSV renderings of results. Field names here are the documented report schema
// (see README); change them only together with the docs.

namespace consensus::report {

using nlohmann::json;

inline json to_json(const SeminormValue& v) {
  return {{"value", v.value},
          {"kind", std::string(to_string(v.kind))},
          {"p", std::string(to_string(v.p))},
          {"method", std::string(to_string(v.method))},
          {"tolerance", v.tolerance}};
}

inline json to_json(const MatrixClassReport& r) {
  return {{"stochastic", r.stochastic},           {"doubly_stochastic", r.doubly_stochastic},
          {"scrambling", r.scrambling},           {"positive_column", r.positive_column},
          {"positive_diagonal", r.positive_diagonal}, {"rooted", r.rooted}};
}

inline json witness_json(const Witness& w) {
  return std::visit(
      [](const auto& x) -> json {
        using W = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<W, FeasibleVectorWitness>) {
          return {{"type", "feasible_vector"}, {"y", x.y}, {"margin", x.margin}};
        } else if constexpr (std::is_same_v<W, FarkasWitness>) {
          return {{"type", "farkas"}, {"x", x.x}};
        } else if constexpr (std::is_same_v<W, SignVectorWitness>) {
          return {{"type", "sign_vector"}, {"row_u", x.row_u}, {"row_v", x.row_v}, {"z", x.z}};
        } else {
          return nullptr;
        }
      },
      w);
}

inline json to_json(const ContractionCertificate& c) {
  const bool lp_backed = c.seminorm == SeminormChoice::metric_inf;
  return {{"seminorm", std::string(to_string(c.seminorm))},
          {"value", c.value},
          {"contractive", c.contractive},
          {"tolerance", c.tolerance},
          {"method", lp_backed ? "lp" : "explicit_formula"}};
}

/// {"class": {...}, "certificates": [...], "witnesses": [...]}
inline json certification(const json& cls, const ContractionCertificate& c) {
  return {{"class", cls}, {"certificates", json::array({to_json(c)})}, {"witnesses", json::array({witness_json(c.witness)})}};
}

inline json to_json(const CounterexampleReport& r) {
  json steps = json::array();
  for (const auto& s : r.steps) {
    steps.push_back({{"index", s.index}, {"name", s.name}, {"passed", s.passed}, {"detail", s.detail}});
  }
  json out = {{"verdict", r.passed() ? "pass" : "fail"},
              {"failed_step", r.failed_step ? json(*r.failed_step) : json(nullptr)},
              {"steps", steps},
              {"matrix", io::to_json(r.matrix)["rows"]}};
  out["tau"] = r.tau ? json(*r.tau) : json(nullptr);
  out["metric_inf"] = r.metric_inf ? json(*r.metric_inf) : json(nullptr);
  out["strictly_feasible"] = r.strictly_feasible ? json(*r.strictly_feasible) : json(nullptr);
  if (!r.farkas_x.empty()) out["farkas_x"] = r.farkas_x;
  if (!r.witness_y.empty()) out["witness_y"] = r.witness_y;
  return out;
}

inline json to_json(const RateReport& r) {
  json out = {{"lambda", r.lambda},
              {"passed", r.passed},
              {"first_violation", r.first_violation ? json(*r.first_violation) : json(nullptr)},
              {"envelope_constant", r.envelope_constant},
              {"cauchy_constant", r.cauchy_constant},
              {"steps_checked", r.steps_checked}};
  out["cauchy_bound"] = r.cauchy_bound ? json(*r.cauchy_bound) : json(nullptr);
  return out;
}

inline json to_json(const EquivalenceEstimate& e) {
  return {{"c_m_hat", e.c_m_hat}, {"c_M_hat", e.c_M_hat}, {"accepted", e.accepted}, {"rejected", e.rejected}};
}

/// Columns: step, product_seminorm, residual, r_i, lambda_pow_i.
inline std::string trace_csv(const SimulationTrace& t, double lambda) {
  std::string out = "step,product_seminorm,residual,r_i,lambda_pow_i\n";
  double pow = 1.0;
  for (const auto& s : t.steps) {
    pow *= lambda;
    out += std::to_string(s.step) + ',' + io::format_number(s.product_seminorm) + ',' +
           io::format_number(s.residual) + ',' + io::format_number(s.shift) + ',' + io::format_number(pow) + '\n';
  }
  return out;
}

}  // namespace consensus::report
