// consensus: command-line front end for consensus seminorms, contraction certificates
// and matrix-product simulation.
//
// Exit codes: 0 success / contractive, 2 input error, 3 not contractive or refused,
// 4 solver failure, 5 counterexample check failed.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "consensus/consensus.hpp"
#include "consensus/io.hpp"
#include "consensus/report.hpp"

namespace fs = std::filesystem;
using namespace consensus;
using nlohmann::json;

namespace {

enum Exit : int { kOk = 0, kInput = 2, kNotContractive = 3, kSolver = 4, kCounterexample = 5 };

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

std::vector<fs::path> expand_ensemble(const std::vector<std::string>& items) {
  std::vector<fs::path> out;
  for (const auto& item : items) {
    const fs::path p(item);
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        const auto ext = e.path().extension();
        if (e.is_regular_file() && (ext == ".csv" || ext == ".json")) found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else {
      out.push_back(p);
    }
  }
  if (out.empty()) throw validation_error("ensemble is empty");
  return out;
}

Vector parse_vector(const std::string& text) {
  Vector v;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    v.push_back(io::parse_number(text.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return v;
}

json class_json_for(const Matrix& m, double tol) {
  try {
    const auto st = validate_stochastic(m, tol);
    if (m.square()) return report::to_json(classify(st));
    return {{"stochastic", true}, {"doubly_stochastic", false}};
  } catch (const validation_error&) {
    const auto sigma = equal_row_sum(m, tol);
    json j = {{"stochastic", false}, {"equal_row_sum", sigma.has_value()}};
    if (sigma) j["row_sum"] = *sigma;
    return j;
  }
}

struct SeminormArgs {
  std::string input;
  std::string kind;
  std::string p = "inf";
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double tol = kValidationTol;
};

int run_seminorm(const SeminormArgs& a) {
  const Matrix m = io::load_matrix(a.input);
  const auto p = parse_pnorm(a.p);
  if (!p) throw validation_error("--p must be 1, 2 or inf");
  json out;
  if (a.kind == "coe") {
    const auto r = ergodicity_detail(m);
    out = report::to_json(r.value);
    out["row_u"] = r.row_u;
    out["row_v"] = r.row_v;
  } else if (a.kind == "metric") {
    if (*p == PNorm::inf) {
      const auto fit = metric_pinf_fit(m);
      out = report::to_json(fit.value);
      out["shift"] = fit.shift;
    } else {
      out = report::to_json(metric_seminorm(m, *p));
    }
  } else if (a.kind == "induced") {
    const auto e = EqualRowSumMatrix::make(m, a.tol);
    std::optional<SeminormValue> sampled;
    if (a.trials > 0) sampled = induced_sampling_lower_bound(e, *p, a.trials, a.seed);
    if (*p == PNorm::inf) {
      const auto r = induced_pinf(e);
      out = report::to_json(r.value);
      out["witness"] = {{"row_u", r.row_u}, {"row_v", r.row_v}, {"z", r.sign_vector}};
    } else if (*p == PNorm::two) {
      out = report::to_json(induced_p2(e));
    } else if (sampled) {
      out = report::to_json(*sampled);
    } else {
      throw validation_error("induced 1-seminorm has no closed form here; pass --trials for a sampling lower bound");
    }
    if (sampled) out["sampling_lower_bound"] = sampled->value;
    out["row_sum"] = e.row_sum();
  } else {
    throw validation_error("--kind must be metric, induced or coe");
  }
  out["input"] = a.input;
  out["rows"] = m.rows();
  out["cols"] = m.cols();
  out["seed"] = a.trials > 0 ? json(a.seed) : json(nullptr);
  out["trials"] = a.trials;
  print(out);
  return kOk;
}

int run_certify(const std::string& input, const std::string& seminorm, double tol) {
  const Matrix m = io::load_matrix(input);
  ContractionCertificate cert;
  if (seminorm == "metric-inf") {
    cert = certify_metric_inf(validate_stochastic(m, tol));
  } else if (seminorm == "induced-inf") {
    cert = certify_induced_inf(EqualRowSumMatrix::make(m, tol));
  } else {
    throw validation_error("--seminorm must be metric-inf or induced-inf");
  }
  if (!verify(cert, m)) throw solver_error("certificate failed re-verification");
  json out = report::certification(class_json_for(m, tol), cert);
  out["input"] = input;
  print(out);
  return cert.contractive ? kOk : kNotContractive;
}

int run_classify(const std::string& input, double tol) {
  const Matrix m = io::load_matrix(input);
  const auto st = validate_stochastic(m, tol);
  json out = report::to_json(classify(st));
  out["input"] = input;
  print(out);
  return kOk;
}

struct SimulateArgs {
  std::vector<std::string> ensemble;
  std::string schedule = "cyclic";
  std::uint64_t seed = 0;
  std::size_t steps = 100;
  std::string seminorm = "induced-inf";
  std::string d;
  std::string out;
  std::string summary;
  bool force = false;
  double tol = kValidationTol;
};

int run_simulate(const SimulateArgs& a) {
  const auto choice = parse_choice(a.seminorm);
  if (!choice) throw validation_error("unknown --seminorm '" + a.seminorm + "'");
  std::vector<Matrix> members;
  std::vector<std::string> names;
  for (const auto& p : expand_ensemble(a.ensemble)) {
    members.push_back(io::load_matrix(p));
    names.push_back(p.string());
  }
  const auto ens = MatrixEnsemble::make(std::move(members), a.tol);
  Schedule schedule;
  if (a.schedule == "cyclic") {
    schedule = CyclicSchedule{};
  } else if (a.schedule == "random") {
    schedule = RandomSchedule{a.seed};
  } else {
    throw validation_error("--schedule must be cyclic or random");
  }
  Vector d;
  if (a.d.empty()) {
    d.assign(ens.dimension(), 0.0);
    d[0] = 1.0;
  } else {
    d = parse_vector(a.d);
  }

  const double lambda = ens.lambda(*choice);
  const bool contractive = lambda < 1.0 - kContractionTol;
  json summary = {{"ensemble", names},
                  {"seminorm", std::string(to_string(*choice))},
                  {"schedule", a.schedule},
                  {"seed", a.schedule == "random" ? json(a.seed) : json(nullptr)},
                  {"steps", a.steps},
                  {"d", d},
                  {"lambda", lambda},
                  {"contractive", contractive}};

  if (!contractive && !a.force) {
    summary["certified"] = false;
    summary["reason"] = "ensemble is not contractive (lambda >= 1); rerun with --force to write the trace";
    print(summary);
    return kNotContractive;
  }

  const auto trace = run_product(ens, schedule, a.steps, d, *choice);
  if (!a.out.empty()) io::write_text(a.out, report::trace_csv(trace, lambda));
  int code = kNotContractive;
  if (contractive) {
    const auto rate = certify_rate(trace, lambda);
    summary["rate"] = report::to_json(rate);
    summary["certified"] = rate.passed;
    code = rate.passed ? kOk : kNotContractive;
  } else {
    summary["certified"] = false;
    summary["reason"] = "ensemble is not contractive (lambda >= 1); trace written without certification";
  }
  summary["final_residual"] = trace.steps.back().residual;
  summary["final_shift"] = trace.steps.back().shift;
  if (!a.out.empty()) summary["trace"] = a.out;
  if (!a.summary.empty()) io::write_text(a.summary, summary.dump(2) + "\n");
  print(summary);
  return code;
}

int run_counterexample(double perturb, double tau_threshold, bool as_json) {
  const auto rep = verify_counterexample({perturb, tau_threshold});
  if (as_json) {
    print(report::to_json(rep));
  } else {
    for (const auto& s : rep.steps) {
      std::cout << "step " << s.index << " " << s.name << ": " << (s.passed ? "PASS" : "FAIL") << " (" << s.detail
                << ")\n";
    }
    std::cout << (rep.passed() ? "verdict: PASS" : "verdict: FAIL at step " + std::to_string(*rep.failed_step))
              << '\n';
  }
  return rep.passed() ? kOk : kCounterexample;
}

int run_equivalence(const std::string& a, const std::string& b, std::size_t n, std::size_t samples,
                    std::uint64_t seed, const std::vector<std::string>& inputs) {
  const auto ca = parse_choice(a);
  const auto cb = parse_choice(b);
  if (!ca || !cb) throw validation_error("--a and --b must name a seminorm (metric-1, metric-2, metric-inf, induced-2, induced-inf)");
  EquivalenceEstimate est;
  json out = {{"a", a}, {"b", b}};
  if (!inputs.empty()) {
    std::vector<Matrix> ms;
    for (const auto& p : inputs) ms.push_back(io::load_matrix(p));
    est = estimate_equivalence(*ca, *cb, ms);
    out["inputs"] = inputs;
  } else {
    est = estimate_equivalence(*ca, *cb, n, samples, seed);
    out["n"] = n;
    out["samples"] = samples;
    out["seed"] = seed;
  }
  out.update(report::to_json(est));
  print(out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consensus seminorms, contraction certificates and matrix-product simulation"};
  app.require_subcommand(1);

  SeminormArgs sem;
  auto* c_sem = app.add_subcommand("seminorm", "Evaluate a consensus seminorm of a matrix");
  c_sem->add_option("--input", sem.input, "Matrix file (.csv or .json)")->required()->check(CLI::ExistingFile);
  c_sem->add_option("--kind", sem.kind, "metric, induced or coe")->required()->check(CLI::IsMember({"metric", "induced", "coe"}));
  c_sem->add_option("--p", sem.p, "1, 2 or inf")->check(CLI::IsMember({"1", "2", "inf"}));
  c_sem->add_option("--trials", sem.trials, "Sampling trials for an induced lower bound");
  c_sem->add_option("--seed", sem.seed, "Sampling seed");
  c_sem->add_option("--tol", sem.tol, "Row-sum validation tolerance");

  std::string cert_input, cert_seminorm;
  double cert_tol = kValidationTol;
  auto* c_cert = app.add_subcommand("certify", "Certify contraction with a checkable witness");
  c_cert->add_option("--input", cert_input, "Matrix file")->required()->check(CLI::ExistingFile);
  c_cert->add_option("--seminorm", cert_seminorm, "metric-inf or induced-inf")
      ->required()
      ->check(CLI::IsMember({"metric-inf", "induced-inf"}));
  c_cert->add_option("--tol", cert_tol, "Validation tolerance");

  std::string cls_input;
  double cls_tol = kValidationTol;
  auto* c_cls = app.add_subcommand("classify", "Classify a stochastic matrix");
  c_cls->add_option("--input", cls_input, "Matrix file")->required()->check(CLI::ExistingFile);
  c_cls->add_option("--tol", cls_tol, "Validation tolerance");

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Simulate an infinite product and check the rate envelope");
  c_sim->add_option("--ensemble", sim.ensemble, "Matrix files or directories")->required();
  c_sim->add_option("--schedule", sim.schedule, "cyclic or random")->check(CLI::IsMember({"cyclic", "random"}));
  c_sim->add_option("--seed", sim.seed, "Seed for the random schedule");
  c_sim->add_option("--steps", sim.steps, "Number of steps")->check(CLI::PositiveNumber);
  c_sim->add_option("--seminorm", sim.seminorm, "metric-1, metric-2, metric-inf, induced-2 or induced-inf");
  c_sim->add_option("--d", sim.d, "Initial vector, comma separated (default e1)");
  c_sim->add_option("--out", sim.out, "Trace CSV path");
  c_sim->add_option("--summary", sim.summary, "Summary JSON path");
  c_sim->add_flag("--force", sim.force, "Write the trace even when the ensemble is not contractive");
  c_sim->add_option("--tol", sim.tol, "Validation tolerance");

  double perturb = 0.0;
  double tau_threshold = 1.0;
  bool ce_json = false;
  auto* c_ce = app.add_subcommand("counterexample", "Verify the built-in 6x6 counterexample");
  c_ce->add_option("--perturb", perturb, "Add this to zero entries and renormalize");
  c_ce->add_option("--tau-threshold", tau_threshold, "Threshold for the ergodicity-coefficient step");
  c_ce->add_flag("--json", ce_json, "Machine-readable verdict");

  std::string eq_a = "metric-1", eq_b = "metric-inf";
  std::size_t eq_n = 5, eq_samples = 10000;
  std::uint64_t eq_seed = 1;
  std::vector<std::string> eq_inputs;
  auto* c_eq = app.add_subcommand("equivalence", "Estimate seminorm equivalence constants by sampling");
  c_eq->add_option("--a", eq_a, "Reference seminorm");
  c_eq->add_option("--b", eq_b, "Compared seminorm");
  c_eq->add_option("--n", eq_n, "Matrix dimension")->check(CLI::PositiveNumber);
  c_eq->add_option("--samples", eq_samples, "Number of random matrices");
  c_eq->add_option("--seed", eq_seed, "Sampling seed");
  c_eq->add_option("--input", eq_inputs, "Use these matrices instead of random samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kInput;
  }

  try {
    if (*c_sem) return run_seminorm(sem);
    if (*c_cert) return run_certify(cert_input, cert_seminorm, cert_tol);
    if (*c_cls) return run_classify(cls_input, cls_tol);
    if (*c_sim) return run_simulate(sim);
    if (*c_ce) return run_counterexample(perturb, tau_threshold, ce_json);
    if (*c_eq) return run_equivalence(eq_a, eq_b, eq_n, eq_samples, eq_seed, eq_inputs);
  } catch (const parse_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const validation_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const solver_error& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kSolver;
  }
  return kInput;
}
