#include "qes/cli.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "qes/io.hpp"
#include "qes/landscape.hpp"
#include "qes/optimize.hpp"

namespace qes::cli {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput:
    case ErrorKind::InvalidWeights:
    case ErrorKind::InconsistentSpec:
    case ErrorKind::MuTooSmall:
    case ErrorKind::IndexError:
    case ErrorKind::TooLarge:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::NotNegativeDefinite:
      return kInputError;
    default:
      return kNumericalFailure;
  }
}

namespace {

std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

Method parse_method(const std::string& s) {
  if (s == "simplex") return Method::SIMPLEX;
  if (s == "trust") return Method::MODEL_TRUST_REGION;
  if (s == "gd") return Method::RIEMANNIAN_GD;
  throw Error(ErrorKind::InvalidInput, "unknown optimizer '" + s + "' (expected simplex, trust or gd)");
}

Json record_to_json(const IterationRecord& r) {
  return {{"iteration", r.iter},
          {"objective", number_or_null(r.objective)},
          {"objective_rel_err", number_or_null(r.relative_objective_error)},
          {"eig_rel_err", number_or_null(r.eigenvalue_rel_error)},
          {"ortho_err", number_or_null(r.orthogonality_error)},
          {"evaluations", r.evaluations}};
}

std::string csv_cell(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream ss;
  ss << std::setprecision(17) << v;
  return ss.str();
}

std::string trace_csv(const OptimizationTrace& trace) {
  std::ostringstream ss;
  ss << "iteration,objective_rel_err,eig_rel_err,ortho_err\n";
  for (const auto& r : trace.records)
    ss << r.iter << ',' << csv_cell(r.relative_objective_error) << ',' << csv_cell(r.eigenvalue_rel_error) << ','
       << csv_cell(r.orthogonality_error) << '\n';
  return ss.str();
}

std::string csv_path_for(const std::string& out_path) {
  std::filesystem::path p(out_path);
  p.replace_extension(".csv");
  return p.string();
}

int report_error(const Error& e, std::ostream& err) {
  err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
  return exit_code_for(e.kind());
}

}  // namespace

int cmd_solve(const SolveConfig& c, std::ostream& out, std::ostream& err) {
  try {
    SolveProblem prob;
    prob.cfg.model = parse_model(c.model);
    prob.cfg.mu = c.mu;
    prob.cfg.mu1 = c.mu1;
    prob.starts = c.starts;
    prob.jobs = c.jobs;
    prob.start_spread = c.start_spread;
    if (c.csv && c.out_path.empty()) throw Error(ErrorKind::InvalidInput, "--csv needs --out");

    if (c.backend == "matrix") {
      if (c.matrix_path.empty()) throw Error(ErrorKind::InvalidInput, "matrix backend needs --matrix");
      if (!c.hamiltonian_path.empty() || !c.ansatz_path.empty() || !c.init.empty())
        throw Error(ErrorKind::InvalidInput, "matrix backend takes --matrix only");
      prob.backend = Backend::MATRIX;
      prob.matrix = load_operator(c.matrix_path);
      prob.p = c.p.value_or(1);
    } else if (c.backend == "statevector") {
      if (!c.matrix_path.empty()) throw Error(ErrorKind::InvalidInput, "statevector backend does not take --matrix");
      if (c.hamiltonian_path.empty() || c.ansatz_path.empty() || c.init.empty())
        throw Error(ErrorKind::InvalidInput, "statevector backend needs --hamiltonian, --ansatz and --init");
      prob.backend = Backend::STATEVECTOR;
      prob.hamiltonian = load_hamiltonian(c.hamiltonian_path);
      prob.circuits = load_ansatz(c.ansatz_path);
      prob.initial_states = parse_initial_states(c.init);
      prob.p = static_cast<Eigen::Index>(prob.initial_states.size());
      if (c.p && *c.p != prob.p)
        throw Error(ErrorKind::InvalidInput, "--p disagrees with the number of initial states");
    } else {
      throw Error(ErrorKind::InvalidInput, "unknown backend '" + c.backend + "'");
    }
    if (prob.p < 1) throw Error(ErrorKind::InvalidInput, "--p must be at least 1");
    if (prob.cfg.model == Model::WEIGHTED_QL1M) {
      if (c.weights.empty()) {
        prob.cfg.weights.resize(prob.p);
        for (Eigen::Index j = 0; j < prob.p; ++j) prob.cfg.weights(j) = static_cast<double>(prob.p - j);
      } else {
        prob.cfg.weights = Eigen::Map<const RealVector>(c.weights.data(), static_cast<Eigen::Index>(c.weights.size()));
      }
    }
    prob.cfg.validate(prob.p);

    OptimizerOptions opts;
    opts.method = parse_method(c.optimizer);
    opts.rho_begin = c.rhobeg;
    opts.rho_end = c.rhoend;
    opts.max_iters = c.max_iters;
    opts.seed = c.seed;
    opts.grad_tol = c.grad_tol;

    SolveResult r;
    bool aborted = false;
    std::string abort_message;
    try {
      r = solve_eigenpairs(prob, opts);
    } catch (const OptimizationError& e) {
      aborted = true;
      abort_message = std::string(to_string(e.kind())) + ": " + e.what();
      r.trace = e.trace();
    }

    Json rows = Json::array();
    for (const auto& rec : r.trace.records) rows.push_back(record_to_json(rec));
    Json j;
    j["command"] = "solve";
    j["model"] = to_string(prob.cfg.model);
    j["backend"] = c.backend;
    j["optimizer"] = to_string(opts.method);
    j["p"] = prob.p;
    j["mu"] = prob.cfg.mu;
    j["mu1"] = prob.cfg.mu1;
    j["seed"] = c.seed;
    j["starts"] = c.starts;
    j["rhobeg"] = c.rhobeg;
    j["rhoend"] = c.rhoend;
    j["max_iters"] = c.max_iters;
    if (c.timestamp) j["timestamp"] = utc_timestamp();
    j["status"] = aborted ? "Aborted" : to_string(r.trace.status);
    if (aborted) j["error"] = abort_message;
    j["evaluations"] = r.trace.evaluations;
    j["accepted_moves"] = r.trace.accepted_moves;
    j["kept_start"] = r.kept_start;
    j["eigenvalues"] = vector_to_json(r.eigenvalues);
    j["reference_eigenvalues"] = vector_to_json(r.reference);
    j["eig_rel_err"] = number_or_null(aborted ? kNotRecorded : r.eig_rel_err);
    j["objective"] = number_or_null(aborted ? kNotRecorded : r.objective);
    j["reference_objective"] = number_or_null(aborted ? kNotRecorded : r.reference_objective);
    j["objective_rel_err"] = number_or_null(aborted ? kNotRecorded : r.objective_rel_err);
    j["ortho_err"] = number_or_null(aborted ? kNotRecorded : r.ortho_err);
    j["shift"] = r.shift;
    if (prob.cfg.model == Model::QTPM && r.reference.size() > 0)
      j["ortho_plateau"] = qtpm_orthogonality_plateau(r.reference, prob.cfg.mu);
    j["params"] = vector_to_json(r.params);
    j["trace"] = rows;

    const std::string text = j.dump(2) + "\n";
    if (c.out_path.empty()) {
      out << text;
    } else {
      write_text_file(c.out_path, text);
      if (c.csv) write_text_file(csv_path_for(c.out_path), trace_csv(r.trace));
    }
    if (aborted) {
      err << "error: " << abort_message << '\n';
      return kNumericalFailure;
    }
    if (!(r.eig_rel_err <= c.eig_tol)) {
      err << "eigenvalue relative error " << r.eig_rel_err << " exceeds " << c.eig_tol << '\n';
      return kNumericalFailure;
    }
    return kOk;
  } catch (const Error& e) {
    return report_error(e, err);
  }
}

namespace {

BasisColumn column_from_json(const Json& j) {
  if (j.contains("eig")) return BasisColumn::eigenvector(j.at("eig").get<int>());
  if (j.contains("mix")) {
    const auto idx = j.at("mix").get<std::vector<int>>();
    const auto w = j.at("weights").get<std::vector<double>>();
    if (idx.size() != 2 || w.size() != 2) throw Error(ErrorKind::InvalidInput, "mix needs two indices and two weights");
    return BasisColumn::mix(idx[0], idx[1], w[0], w[1]);
  }
  throw Error(ErrorKind::InvalidInput, "basis column needs 'eig' or 'mix'");
}

BlockSpec blockspec_from_json(Model model, const Json& j) {
  BlockSpec spec;
  spec.model = model;
  for (const auto& bj : j.at("blocks")) {
    Block b;
    b.p = bj.at("p").get<Eigen::Index>();
    for (const auto& cj : bj.at("columns")) b.columns.push_back(column_from_json(cj));
    spec.blocks.push_back(std::move(b));
  }
  return spec;
}

HermitianOperator scenario_operator(const Json& s, const std::filesystem::path& dir, std::uint64_t seed) {
  if (s.contains("matrix")) {
    std::filesystem::path m = s.at("matrix").get<std::string>();
    if (m.is_relative()) m = dir / m;
    return load_operator(m.string());
  }
  if (!s.contains("spectrum")) throw Error(ErrorKind::InvalidInput, "scenario needs 'matrix' or 'spectrum'");
  const auto lam = s.at("spectrum").get<std::vector<double>>();
  if (lam.empty()) throw Error(ErrorKind::InvalidInput, "'spectrum' is empty");
  const auto n = static_cast<Eigen::Index>(lam.size());
  Rng rng(seed);
  const ComplexMatrix q = random_unitary(n, rng);
  const RealVector l = Eigen::Map<const RealVector>(lam.data(), n);
  return HermitianOperator(q * l.cast<cplx>().asDiagonal() * q.adjoint());
}

PointClass parse_class(const std::string& s) {
  if (s == "Minimizer") return PointClass::Minimizer;
  if (s == "Saddle") return PointClass::Saddle;
  if (s == "NonStationary") return PointClass::NonStationary;
  throw Error(ErrorKind::InvalidInput, "unknown classification '" + s + "'");
}

Json run_case(Model model, const HermitianOperator& a, double mu, const Json& cj) {
  Json rep;
  rep["name"] = cj.value("name", std::string());
  rep["model"] = to_string(model);
  std::vector<std::string> failures;
  const BlockSpec spec = blockspec_from_json(model, cj);
  const double scale = a.frobenius_norm();
  const double tol = cj.value("residual_tol", 1e-10);
  StationaryCertificate cert = model == Model::QOMM ? build_qomm_stationary(a, spec) : build_qtpm_stationary(a, mu, spec);
  const ComplexMatrix& x = cert.x.matrix();
  const double residual = model == Model::QOMM ? verify_qomm_stationary(a, x, cert.d)
                                               : verify_qtpm_stationary(a, x, cert.d, mu);
  rep["residual"] = residual;
  rep["residual_bound"] = tol * scale;
  if (!(residual <= tol * scale)) failures.push_back("residual above bound");
  const double value = model == Model::QOMM ? qomm_value(a, x) : qtpm_value(a, x, mu);
  rep["value"] = value;
  rep["multipliers"] = vector_to_json(cert.d);

  const Json expect = cj.value("expect", Json::object());
  if (expect.contains("value")) {
    const double want = expect.at("value").get<double>();
    const double vtol = expect.value("value_tol", 1e-9);
    rep["expected_value"] = want;
    if (!(std::abs(value - want) <= vtol)) failures.push_back("value differs from expectation");
  }
  if (expect.contains("multipliers")) {
    const auto want = expect.at("multipliers").get<std::vector<double>>();
    const double mtol = expect.value("multiplier_tol", 1e-9);
    bool ok = want.size() == static_cast<std::size_t>(cert.d.size());
    for (std::size_t i = 0; ok && i < want.size(); ++i)
      ok = std::abs(cert.d(static_cast<Eigen::Index>(i)) - want[i]) <= mtol;
    if (!ok) failures.push_back("multipliers differ from expectation");
  }
  const Classification cls = classify_point(model, a, x, mu);
  rep["classification"] = to_string(cls.kind);
  rep["stationarity"] = cls.stationarity;
  if (expect.contains("classification") &&
      parse_class(expect.at("classification").get<std::string>()) != cls.kind)
    failures.push_back("classification differs from expectation");

  if (cj.value("escape", false)) {
    Json ej;
    try {
      const EscapeResult e = saddle_escape(model, a, cert, mu, cj.value("epsilon", 1e-3));
      ej = {{"kind", to_string(e.kind)},           {"epsilon_used", e.epsilon_used},
            {"value_before", e.value_before},      {"value_after", e.value_after},
            {"distance", e.distance},              {"decreased", e.value_after < e.value_before}};
      if (!(e.value_after < e.value_before)) failures.push_back("escape did not decrease the objective");
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::AlreadyMinimal) throw;
      ej = {{"kind", "AlreadyMinimal"}, {"decreased", false}};
      failures.push_back("escape requested at a minimizer");
    }
    rep["escape"] = ej;
  }
  rep["failures"] = failures;
  rep["pass"] = failures.empty();
  return rep;
}

// Minimizers built from random unitaries all attain the minimum value.
Json run_flatness(Model model, const HermitianOperator& a, double mu, const Json& fj, Rng& rng) {
  const auto p = fj.at("p").get<Eigen::Index>();
  const int count = fj.value("unitaries", 10);
  const double tol = fj.value("tol", 1e-10);
  if (p < 1 || p > a.dim() || count < 1) throw Error(ErrorKind::InvalidInput, "bad minimizer check");
  const RealVector lowest = eigh(a).values.head(p);
  ModelConfig cfg;
  cfg.model = model;
  cfg.mu = mu;
  double lo = INFINITY, hi = -INFINITY;
  for (int k = 0; k < count; ++k) {
    const ComplexMatrix v = random_unitary(p, rng);
    const ObliquePoint x = model == Model::QOMM ? build_qomm_minimizer(a, p, v) : build_qtpm_minimizer(a, mu, p, v);
    const double val = model == Model::QOMM ? qomm_value(a, x.matrix()) : qtpm_penalty_value(a, x.matrix(), mu);
    lo = std::min(lo, val);
    hi = std::max(hi, val);
  }
  const double ref = minimum_value(cfg, lowest);
  const double gap = std::max(std::abs(lo - ref), std::abs(hi - ref));
  const bool pass = hi - lo <= tol && gap <= tol;
  return {{"p", p}, {"unitaries", count}, {"spread", hi - lo}, {"reference", ref}, {"max_gap", gap}, {"pass", pass}};
}

}  // namespace

int cmd_verify_landscape(const std::string& scenario_path, const std::string& out_path, std::ostream& out,
                         std::ostream& err) {
  try {
    const Json s = load_json_file(scenario_path);
    const std::filesystem::path dir = std::filesystem::path(scenario_path).parent_path();
    Json report;
    bool all_pass = true;
    try {
      const Model default_model = parse_model(s.value("model", std::string("qomm")));
      const double mu = s.value("mu", 1.0);
      std::vector<std::uint64_t> seeds = s.value("seeds", std::vector<std::uint64_t>{0});
      if (seeds.empty()) throw Error(ErrorKind::InvalidInput, "'seeds' is empty");
      const Json cases = s.at("blockspecs");
      if (!cases.is_array()) throw Error(ErrorKind::InvalidInput, "'blockspecs' must be an array");
      report["command"] = "verify-landscape";
      report["scenario"] = s.value("name", std::filesystem::path(scenario_path).filename().string());
      Json runs = Json::array();
      for (const std::uint64_t seed : seeds) {
        const HermitianOperator a = scenario_operator(s, dir, seed);
        Json run = {{"seed", seed}, {"frobenius_norm", a.frobenius_norm()}};
        Json case_reports = Json::array();
        for (const auto& cj : cases) {
          const Model model = cj.contains("model") ? parse_model(cj.at("model").get<std::string>()) : default_model;
          if (model != Model::QOMM && model != Model::QTPM)
            throw Error(ErrorKind::InvalidInput, "landscape cases support qomm and qtpm");
          Json rep = run_case(model, a, cj.value("mu", mu), cj);
          all_pass = all_pass && rep.at("pass").get<bool>();
          case_reports.push_back(std::move(rep));
        }
        run["cases"] = case_reports;
        if (s.contains("minimizers")) {
          Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
          Json flat = Json::array();
          for (const auto& fj : s.at("minimizers")) {
            const Model model = parse_model(fj.value("model", to_string(default_model)));
            Json rep = run_flatness(model, a, fj.value("mu", mu), fj, rng);
            all_pass = all_pass && rep.at("pass").get<bool>();
            flat.push_back(std::move(rep));
          }
          run["minimizers"] = flat;
        }
        runs.push_back(std::move(run));
      }
      report["runs"] = runs;
      report["pass"] = all_pass;
    } catch (const Json::exception& e) {
      throw Error(ErrorKind::InvalidInput, "malformed scenario '" + scenario_path + "': " + e.what());
    }
    const std::string text = report.dump(2) + "\n";
    if (out_path.empty())
      out << text;
    else
      write_text_file(out_path, text);
    if (!all_pass) err << "one or more landscape certificates failed\n";
    return all_pass ? kOk : kNumericalFailure;
  } catch (const Error& e) {
    return report_error(e, err);
  }
}

int cmd_resource_count(const ResourceConfig& c, std::ostream& out, std::ostream& err) {
  try {
    const Model model = parse_model(c.model);
    if (c.p < 1) throw Error(ErrorKind::InvalidInput, "--p must be at least 1");
    std::uint64_t n_u = 0;
    if (!c.hamiltonian_path.empty()) {
      if (c.n_u) throw Error(ErrorKind::InvalidInput, "give either --nu or --hamiltonian");
      n_u = load_hamiltonian(c.hamiltonian_path).num_terms();
    } else if (c.n_u) {
      if (*c.n_u < 1) throw Error(ErrorKind::InvalidInput, "--nu must be at least 1");
      n_u = static_cast<std::uint64_t>(*c.n_u);
    } else {
      throw Error(ErrorKind::InvalidInput, "resource-count needs --nu or --hamiltonian");
    }
    const ResourceReport r = resource_count(model, static_cast<std::uint64_t>(c.p), n_u);
    const Json j = {{"model", to_string(model)},
                    {"p", c.p},
                    {"N_U", n_u},
                    {"hamiltonian_circuits", r.hamiltonian_circuits},
                    {"regularization_circuits", r.regularization_circuits}};
    out << j.dump(2) << '\n';
    return kOk;
  } catch (const Error& e) {
    return report_error(e, err);
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Excited-state eigensolver over the oblique manifold", "qes"};
  app.require_subcommand(1);

  SolveConfig sc;
  std::string weights;
  auto* solve = app.add_subcommand("solve", "Minimize a model objective and extract eigenpairs");
  solve->add_option("--model", sc.model, "qomm | qtpm | ql1m | wql1m");
  solve->add_option("--backend", sc.backend, "matrix | statevector");
  solve->add_option("--matrix", sc.matrix_path, "Dense Hermitian operator (JSON)");
  solve->add_option("--hamiltonian", sc.hamiltonian_path, "Pauli Hamiltonian (JSON)");
  solve->add_option("--ansatz", sc.ansatz_path, "Ansatz circuit(s) (JSON)");
  solve->add_option("--init", sc.init, "Initial bitstrings: JSON list file or comma list");
  solve->add_option("--p", sc.p, "Number of eigenpairs (matrix backend)");
  solve->add_option("--mu", sc.mu, "qTPM penalty");
  solve->add_option("--mu1", sc.mu1, "qL1M penalty");
  solve->add_option("--weights", weights, "wql1m weights, comma separated, strictly decreasing");
  solve->add_option("--optimizer", sc.optimizer, "simplex | trust | gd");
  solve->add_option("--rhobeg", sc.rhobeg);
  solve->add_option("--rhoend", sc.rhoend);
  solve->add_option("--max-iters", sc.max_iters);
  solve->add_option("--seed", sc.seed);
  solve->add_option("--grad-tol", sc.grad_tol, "gd stopping tolerance relative to ‖A‖_F");
  solve->add_option("--starts", sc.starts, "Independent multi-start runs");
  solve->add_option("--jobs", sc.jobs, "Concurrent runs");
  solve->add_option("--start-spread", sc.start_spread, "Std. deviation of random initial parameters");
  solve->add_option("--eig-tol", sc.eig_tol, "Exit 1 above this eigenvalue relative error");
  solve->add_option("--out", sc.out_path, "Trace JSON path (default stdout)");
  solve->add_flag("--csv", sc.csv, "Also write the trace as CSV next to --out, extension .csv");
  bool no_timestamp = false;
  solve->add_flag("--no-timestamp", no_timestamp);

  std::string scenario, landscape_out;
  auto* verify = app.add_subcommand("verify-landscape", "Build and check stationary-point certificates");
  verify->add_option("scenario", scenario, "Scenario JSON")->required();
  verify->add_option("--out", landscape_out, "Report path (default stdout)");

  ResourceConfig rc;
  auto* resources = app.add_subcommand("resource-count", "Count inner-product test circuits");
  resources->add_option("--model", rc.model);
  resources->add_option("--p", rc.p);
  resources->add_option("--nu", rc.n_u, "Number of Pauli terms N_U");
  resources->add_option("--hamiltonian", rc.hamiltonian_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code == 0 ? kOk : kInputError;
  }

  if (*solve) {
    sc.timestamp = !no_timestamp;
    if (!weights.empty()) {
      std::stringstream ss(weights);
      std::string item;
      try {
        while (std::getline(ss, item, ',')) sc.weights.push_back(std::stod(item));
      } catch (const std::exception&) {
        err << "error: bad --weights '" << weights << "'\n";
        return kInputError;
      }
    }
    return cmd_solve(sc, out, err);
  }
  if (*verify) return cmd_verify_landscape(scenario, landscape_out, out, err);
  return cmd_resource_count(rc, out, err);
}

}  // namespace qes::cli
