#include "cylcauchy/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <memory>
#include <numeric>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cylcauchy/cauchy_solver.hpp"
#include "cylcauchy/coefficient_io.hpp"
#include "cylcauchy/deviating_spectrum.hpp"
#include "cylcauchy/discrete_oracle.hpp"
#include "cylcauchy/error.hpp"
#include "cylcauchy/operator_model.hpp"
#include "cylcauchy/quadrature.hpp"

namespace cylcauchy::cli {

using nlohmann::ordered_json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr const char* kSubcommandNames[] = {"spectrum", "oracle", "asymptotics", "criterion", "solve", "hadamard"};

const char* name_of(Subcommand s) { return kSubcommandNames[static_cast<int>(s)]; }

ordered_json number(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json config_json(const RunConfig& c) {
  ordered_json j;
  j["subcommand"] = name_of(c.subcommand);
  j["mu"] = c.mu ? ordered_json(*c.mu) : ordered_json(nullptr);
  j["k_range"] = {c.k_range.first, c.k_range.second};
  j["count"] = c.count;
  j["grid_size"] = c.grid_size;
  j["lambda_max"] = c.lambda_max ? ordered_json(*c.lambda_max) : ordered_json(nullptr);
  j["K"] = c.K;
  j["M"] = c.M;
  j["input"] = c.input;
  j["output"] = c.output;
  j["spectrum"] = c.spectrum;
  j["format"] = c.format == Format::Json ? "json" : "csv";
  j["tol"] = c.tol;
  j["quadrature_panels"] = c.quadrature_panels;
  j["epsilon"] = c.epsilon;
  j["cutoff_p"] = c.cutoff_p ? ordered_json(*c.cutoff_p) : ordered_json(nullptr);
  j["allow_ill_posed"] = c.allow_ill_posed;
  j["seed"] = c.seed;
  return j;
}

/// Either a JSON document or a CSV table; both embed the config.
struct Artifact {
  ordered_json json;
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
  std::vector<std::string> csv_notes;  ///< extra `# key: value` lines

  std::string render(const RunConfig& cfg) const {
    if (cfg.format == Format::Json) {
      ordered_json doc;
      doc["config"] = config_json(cfg);
      for (auto it = json.begin(); it != json.end(); ++it) doc[it.key()] = it.value();
      return doc.dump(2) + "\n";
    }
    std::string s = "# config: " + config_json(cfg).dump() + "\n";
    for (const auto& n : csv_notes) s += "# " + n + "\n";
    for (std::size_t i = 0; i < csv_header.size(); ++i) s += (i ? "," : "") + csv_header[i];
    s += "\n";
    for (const auto& row : csv_rows) {
      for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + row[i];
      s += "\n";
    }
    return s;
  }
};

std::string cell(double v) { return std::isfinite(v) ? format_double(v) : std::string(""); }
std::string cell(std::size_t v) { return std::to_string(v); }

std::shared_ptr<const OperatorSpectrum> spectrum_for(const RunConfig& cfg, std::size_t k_needed) {
  if (!cfg.spectrum.empty()) {
    auto s = std::make_shared<const OperatorSpectrum>(load_spectrum(cfg.spectrum));
    if (s->size() < k_needed)
      throw Error(ErrorCode::InvalidArgument, "spectrum file has " + std::to_string(s->size()) +
                                                  " entries, need " + std::to_string(k_needed));
    return s;
  }
  return std::make_shared<const OperatorSpectrum>(dirichlet_spectrum_1d(std::max<std::size_t>(k_needed, 1)));
}

std::vector<std::size_t> k_list(const RunConfig& cfg) {
  const auto r = cfg.k_range;
  std::vector<std::size_t> ks(r.second - r.first + 1);
  std::iota(ks.begin(), ks.end(), r.first);
  return ks;
}

double require_mu(const RunConfig& cfg) {
  if (!cfg.mu) throw UsageError(std::string(name_of(cfg.subcommand)) + " requires --mu");
  return *cfg.mu;
}

Artifact cmd_spectrum(const RunConfig& cfg) {
  const double mu = require_mu(cfg);
  std::vector<DeviatingMode> modes;
  if (cfg.lambda_max) {
    ScanOptions opts;
    opts.tol = cfg.tol;
    modes = eigenvalues(mu, *cfg.lambda_max, cfg.count, opts);
  } else {
    modes = first_modes(mu, cfg.count, cfg.tol);
  }
  Artifact a;
  a.csv_header = {"m", "lambda", "residual"};
  a.json["mu"] = mu;
  ordered_json rows = ordered_json::array();
  for (const auto& md : modes) {
    const double res = char_fn_relative(mu, md.lambda);
    const double l2 = std::sqrt(
        simpson([&](double t) { const double v = eigenfunction(md, t); return v * v; }, 0.0, 1.0,
                cfg.quadrature_panels));
    rows.push_back({{"m", md.m}, {"lambda", md.lambda}, {"residual", number(res)}, {"l2_norm", number(l2)}});
    a.csv_rows.push_back({cell(md.m), cell(md.lambda), cell(res)});
  }
  a.json["modes"] = std::move(rows);
  return a;
}

Artifact cmd_oracle(const RunConfig& cfg) {
  const double mu = require_mu(cfg);
  const auto oracle = oracle_lambdas(mu, cfg.grid_size, cfg.count, false);
  const auto analytic = first_modes(mu, oracle.modes.size(), cfg.tol);
  Artifact a;
  a.csv_header = {"m", "lambda_oracle", "lambda_analytic", "rel_diff"};
  a.json["mu"] = mu;
  a.json["truncated"] = oracle.truncated;
  if (oracle.truncated) a.csv_notes.push_back("truncated: only " + std::to_string(oracle.modes.size()) + " trustworthy eigenvalues");
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < oracle.modes.size(); ++i) {
    const double lo = oracle.modes[i].lambda;
    const double la = analytic[i].lambda;
    const double rel = std::abs(lo - la) / std::abs(la);
    rows.push_back({{"m", i + 1}, {"lambda_oracle", lo}, {"lambda_analytic", la}, {"rel_diff", rel}});
    a.csv_rows.push_back({cell(i + 1), cell(lo), cell(la), cell(rel)});
  }
  a.json["modes"] = std::move(rows);
  return a;
}

Artifact cmd_asymptotics(const RunConfig& cfg) {
  const auto ks = k_list(cfg);
  const auto spec = spectrum_for(cfg, ks.back());
  struct Row {
    double mu, lambda, leading, refined;
  };
  std::vector<Row> rows(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double mu = spec->mu(ks[i]);
    const auto asym = asymptotic_lambda1(mu);
    rows[i] = {mu, smallest_eigenvalue(mu, cfg.tol).lambda, asym.leading, asym.refined};
  }
  Artifact a;
  a.csv_header = {"k", "mu", "lambda_k1", "leading", "refined", "ratio"};
  ordered_json out = ordered_json::array();
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const auto& r = rows[i];
    const double ratio = r.lambda / r.leading;
    out.push_back({{"k", ks[i]}, {"mu", r.mu}, {"lambda_k1", r.lambda}, {"leading", r.leading},
                   {"refined", r.refined}, {"ratio", ratio}});
    a.csv_rows.push_back({cell(ks[i]), cell(r.mu), cell(r.lambda), cell(r.leading), cell(r.refined), cell(ratio)});
  }
  a.json["rows"] = std::move(out);
  return a;
}

std::string require_input(const RunConfig& cfg) {
  if (cfg.input.empty()) throw UsageError(std::string(name_of(cfg.subcommand)) + " requires --input");
  return read_text_file(cfg.input);
}

Artifact cmd_criterion(RunConfig& cfg) {
  const std::string text = require_input(cfg);
  auto probe = parse_coefficients(text, nullptr, cfg.K, 1);
  const auto spec = spectrum_for(cfg, probe.K());
  const auto coeffs = parse_coefficients(text, spec, probe.K(), 1);
  cfg.K = coeffs.K();
  const auto modes = compute_modes(*spec, coeffs.K(), 1, cfg.tol);
  const auto report = criterion(coeffs, modes.lambda1());

  Artifact a;
  a.json["partial_sums"] = report.partial_sums;
  ordered_json amps = ordered_json::array();
  for (double v : report.amplifications) amps.push_back(number(v));
  a.json["amplifications"] = std::move(amps);
  a.json["verdict"] = std::string(to_string(report.verdict));
  a.json["tail_ratio"] = number(report.tail_ratio);
  a.json["decay_exponent"] = number(report.decay_exponent);
  a.json["window"] = report.window;
  a.csv_notes.push_back("verdict: " + std::string(to_string(report.verdict)));
  a.csv_notes.push_back("tail_ratio: " + cell(report.tail_ratio));
  a.csv_header = {"k", "partial_sum", "amplification"};
  for (std::size_t k = 0; k < report.partial_sums.size(); ++k)
    a.csv_rows.push_back({cell(k + 1), cell(report.partial_sums[k]), cell(report.amplifications[k])});
  return a;
}

Artifact cmd_solve(RunConfig& cfg) {
  const std::string text = require_input(cfg);
  const bool grid = looks_like_grid(text);
  std::size_t K = cfg.K;
  if (K == 0) K = grid ? 8 : parse_coefficients(text, nullptr, 0, cfg.M).K();
  cfg.K = K;
  const auto spec = spectrum_for(cfg, K);
  const auto modes = compute_modes(*spec, K, cfg.M, cfg.tol);
  const ModeCoefficients data =
      grid ? project_f(parse_grid(text), spec, modes) : parse_coefficients(text, spec, K, cfg.M);

  std::optional<SubspaceSplit> split;
  if (cfg.cutoff_p) split = split_subspace(data, *cfg.cutoff_p);
  const ModeCoefficients& rhs = split ? split->hat_part : data;

  SolveOptions opts;
  opts.allow_ill_posed = cfg.allow_ill_posed;
  const auto u = solve(rhs, modes, opts);
  const double res = residual(u, rhs);
  const auto report = criterion(rhs, modes.lambda1());

  Artifact a;
  a.json["verdict"] = std::string(to_string(report.verdict));
  a.json["norm_sq"] = u.norm_sq;
  a.json["norm_sq_m1"] = u.norm_sq_first;
  a.json["norm_sq_rest"] = u.norm_sq_rest;
  a.json["data_norm"] = rhs.norm();
  a.json["residual"] = res;
  if (split) a.json["discarded_norm"] = split->tilde_part.norm();
  ordered_json rows = ordered_json::array();
  a.csv_header = {"k", "m", "lambda", "f", "a"};
  for (std::size_t k = 1; k <= u.K; ++k) {
    for (std::size_t m = 1; m <= u.M; ++m) {
      const double lam = modes.lambda(k, m);
      rows.push_back({{"k", k}, {"m", m}, {"lambda", lam}, {"f", rhs(k, m)}, {"a", u.coefficient(k, m)}});
      a.csv_rows.push_back({cell(k), cell(m), cell(lam), cell(rhs(k, m)), cell(u.coefficient(k, m))});
    }
  }
  a.json["coefficients"] = std::move(rows);
  a.csv_notes.push_back("verdict: " + std::string(to_string(report.verdict)));
  a.csv_notes.push_back("norm_sq: " + cell(u.norm_sq));
  a.csv_notes.push_back("residual: " + cell(res));
  return a;
}

Artifact cmd_hadamard(const RunConfig& cfg) {
  const auto ks = k_list(cfg);
  const auto spec = spectrum_for(cfg, ks.back());
  const auto rows = hadamard_amplification(*spec, ks, cfg.epsilon, cfg.tol);
  Artifact a;
  a.csv_header = {"k", "mu", "lambda_k1", "amplification", "solution_norm"};
  ordered_json out = ordered_json::array();
  for (const auto& r : rows) {
    const double lam = r.lambda_k1.value_or(NAN);
    out.push_back({{"k", r.k}, {"mu", r.mu}, {"lambda_k1", number(lam)}, {"amplification", number(r.amplification)},
                   {"solution_norm", number(r.solution_norm)}, {"representable", r.lambda_k1.has_value()}});
    a.csv_rows.push_back({cell(r.k), cell(r.mu), cell(lam), cell(r.amplification), cell(r.solution_norm)});
  }
  a.json["epsilon"] = cfg.epsilon;
  a.json["rows"] = std::move(out);
  return a;
}

}  // namespace

std::pair<std::size_t, std::size_t> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) throw UsageError("range must look like a..b, got '" + text + "'");
  auto parse = [&](const std::string& s) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != s.size() || s.empty() || v == 0) throw UsageError("bad range bound '" + s + "'");
    return static_cast<std::size_t>(v);
  };
  const auto a = parse(text.substr(0, dots));
  const auto b = parse(text.substr(dots + 2));
  if (a > b) throw UsageError("range '" + text + "' is empty");
  return {a, b};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Spectral analysis of the elliptic Cauchy problem in a cylinder", "cylcauchy"};
  app.require_subcommand(1, 1);
  std::string k_range, format = "json";
  std::optional<std::size_t> cutoff;
  std::optional<double> mu, lambda_max;

  app.add_option("--mu", mu, "transverse eigenvalue mu");
  app.add_option("--k-range", k_range, "inclusive index range a..b");
  app.add_option("--count", cfg.count, "number of modes")->check(CLI::PositiveNumber);
  app.add_option("--grid-size", cfg.grid_size, "Nystrom grid size n");
  app.add_option("--lambda-max", lambda_max, "scan half-width for eigenvalues");
  app.add_option("--K", cfg.K, "transverse truncation (0 = from input)");
  app.add_option("--M", cfg.M, "modes per k")->check(CLI::PositiveNumber);
  app.add_option("--input", cfg.input, "coefficient or grid file");
  app.add_option("--output", cfg.output, "output path (default stdout)");
  app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--tol", cfg.tol, "relative root tolerance")->check(CLI::Range(1e-14, 1e-2));
  app.add_option("--epsilon", cfg.epsilon, "data norm for hadamard")->check(CLI::PositiveNumber);
  app.add_option("--cutoff-p", cutoff, "correctness-subspace cutoff p");
  app.add_flag("--allow-ill-posed", cfg.allow_ill_posed, "solve even if the criterion diverges");
  app.add_option("--spectrum", cfg.spectrum, "external spectrum file k,mu[,label]");
  app.add_option("--seed", cfg.seed, "seed for randomized runs");

  constexpr const char* kHelp[] = {
      "eigenvalues lambda_m of the reflected problem for one mu",
      "Nystrom/Jacobi cross-check of the smallest eigenvalues",
      "lambda_k1 against the asymptotic formulas over a k range",
      "solvability criterion for a coefficient file",
      "solve from a coefficient or grid file",
      "amplification 1/lambda_k1 over a k range",
  };
  for (int i = 0; i < 6; ++i) {
    auto* sub = app.add_subcommand(kSubcommandNames[i], kHelp[i]);
    sub->fallthrough();
    sub->callback([&cfg, i] { cfg.subcommand = static_cast<Subcommand>(i); });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    cfg.mu = mu;
    cfg.lambda_max = lambda_max;
    cfg.cutoff_p = cutoff;
    cfg.format = format == "csv" ? Format::Csv : Format::Json;
    if (!k_range.empty()) cfg.k_range = parse_range(k_range);
    else if (cfg.subcommand == Subcommand::Asymptotics) cfg.k_range = {5, 15};
    else if (cfg.subcommand == Subcommand::Hadamard) cfg.k_range = {2, 12};
    if (mu && !(*mu >= 1.0)) throw UsageError("--mu must be >= 1");

    Artifact artifact;
    switch (cfg.subcommand) {
      case Subcommand::Spectrum: artifact = cmd_spectrum(cfg); break;
      case Subcommand::Oracle: artifact = cmd_oracle(cfg); break;
      case Subcommand::Asymptotics: artifact = cmd_asymptotics(cfg); break;
      case Subcommand::Criterion: artifact = cmd_criterion(cfg); break;
      case Subcommand::Solve: artifact = cmd_solve(cfg); break;
      case Subcommand::Hadamard: artifact = cmd_hadamard(cfg); break;
    }
    const std::string text = artifact.render(cfg);
    if (cfg.output.empty()) {
      out << text;
    } else {
      write_text_file_atomic(cfg.output, text);
    }
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run(const std::vector<std::string>& args) { return run(args, std::cout, std::cerr); }

}  // namespace cylcauchy::cli
