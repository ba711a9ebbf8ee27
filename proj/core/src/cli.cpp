#include "smld/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include "smld/error.hpp"
#include "smld/format.hpp"
#include "smld/moments.hpp"
#include "smld/spectral.hpp"
#include "smld/verify.hpp"

namespace smld {

namespace {

double parse_real(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) fail(Errc::usage, "--f: cannot read " + what + " from '" + text + "'");
  return v;
}

struct CommandInfo {
  Command command;
  const char* name;
  const char* description;
};

constexpr CommandInfo kCommands[] = {
    {Command::moments, "moments", "raw moments by closed form, recurrence, explicit formula and quadrature"},
    {Command::central_moments, "central-moments", "central moments by explicit formula, binomial sum and quadrature"},
    {Command::asymptotics, "asymptotics", "exact central moments against their leading-order prediction over --n-grid"},
    {Command::apply, "apply", "apply the operator to --f on --x-grid"},
    {Command::converge, "converge", "error of the operator against --f in --norm over --n-grid"},
    {Command::eigen, "eigen", "check the constant and exponential eigenpairs and iterate decay"},
    {Command::schur, "schur", "Schur-test quantities on --t-grid and --x-grid"},
    {Command::verify_all, "verify-all", "run the full acceptance suite"},
};

NormSpec::Kind parse_norm_kind(const std::string& name) {
  if (name == "sup") return NormSpec::Kind::sup_compact;
  if (name == "phi") return NormSpec::Kind::weighted_phi;
  if (name == "lp") return NormSpec::Kind::lp;
  if (name == "wlp") return NormSpec::Kind::weighted_lp;
  fail(Errc::usage, "--norm: expected sup, phi, lp or wlp, got '" + name + "'");
}

void rethrow_as_usage(const std::string& flag, const Error& e) {
  std::string message = e.what();
  auto colon = message.find(": ");
  if (colon != std::string::npos) message = message.substr(colon + 2);
  fail(Errc::usage, flag + ": " + message);
}

void check_params(const OperatorParams& p, const std::string& n_flag) {
  if (auto code = validate(p)) {
    if (*code == Errc::alpha_not_above_minus_one) fail(Errc::usage, "--alpha: requires alpha > -1");
    fail(Errc::usage, n_flag + ": requires n > beta (and n > 0)");
  }
}

std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

Cell opt_cell(const std::optional<double>& v) {
  if (v) return *v;
  return std::monostate{};
}

Table moments_table(const RunConfig& c, double x) {
  Table t{"moments x=" + format_number(x), {"r", "closed", "recurrence", "explicit", "quadrature", "max_residual"}, {}};
  for (unsigned r = 0; r <= c.max_r; ++r) {
    MomentReport m = moment_report(r, x, c.params, c.policy);
    t.add_row({static_cast<long>(r), m.value_closed, m.value_recurrence, opt_cell(m.value_explicit), m.value_quadrature,
               m.max_cross_residual});
  }
  return t;
}

Table central_table(const RunConfig& c) {
  Table t{"central_moments", {"x", "r", "explicit", "binomial", "quadrature", "rel_error_estimate", "warning"}, {}};
  for (double x : c.x_grid)
    for (unsigned r = 0; r <= c.max_r; ++r) {
      CentralMoment b = central_moment_binomial(r, x, c.params);
      Cell e = std::monostate{};
      if (r >= 1 && r <= 4) e = central_moment_explicit(r, x, c.params);
      t.add_row({x, static_cast<long>(r), e, b.value, central_moment_quadrature(r, x, c.params, c.policy),
                 b.rel_error_estimate, b.warning});
    }
  return t;
}

Table asymptotics_table(const RunConfig& c) {
  Table t{"asymptotics", {"x", "n", "exact", "predicted", "ratio", "S0", "S1", "two_term"}, {}};
  for (double x : c.x_grid)
    for (const auto& row : asymptotic_ratio_table(c.r, x, c.params, c.n_grid))
      t.add_row({x, row.n, row.exact, row.predicted, opt_cell(row.ratio), row.S0, row.S1, row.two_term});
  return t;
}

Table apply_table(const RunConfig& c) {
  TestFunction f = parse_function(c.function_spec);
  require_valid(c.params, f);
  DurrmeyerOperator op(c.params, f, c.policy);
  Table t{"apply", {"x", "f", "operator", "error", "k_lo", "k_hi"}, {}};
  for (double x : c.x_grid) {
    double value = op(x);
    IndexRange range = op.truncation_range(x);
    t.add_row({x, f(x), value, std::fabs(value - f(x)), range.lo, range.hi});
  }
  return t;
}

Report converge_report(const RunConfig& c) {
  TestFunction f = parse_function(c.function_spec);
  ConvergenceReport rep = convergence_study(f, c.params, c.n_grid, c.norm, c.policy);
  Table rows{"convergence", {"n", "error", "reference", "ratio"}, {}};
  for (const auto& row : rep.rows) rows.add_row({row.n, row.error, opt_cell(row.reference), opt_cell(row.ratio)});
  Table summary{"summary", {"function", "norm", "fitted_slope", "bound_constant", "hypothesis_holds"}, {}};
  summary.add_row({rep.function, rep.norm.describe(), opt_cell(rep.fitted_slope), opt_cell(rep.bound_constant),
                   rep.hypothesis_holds});
  return {{rows, summary}};
}

Report eigen_report(const RunConfig& c) {
  std::vector<double> xs = c.x_grid;
  TruncatedP P = build_P_adaptive(c.params);
  Table pairs{"eigenpairs", {"which", "lambda", "vector_residual", "operator_residual", "tolerance", "K", "status"}, {}};
  for (Eigenpair which : {Eigenpair::constant, Eigenpair::exponential}) {
    EigenCheck op = eigen_operator_check(c.params, which, xs, c.policy);
    std::optional<double> vec;
    bool ok = op.passed;
    if (which == Eigenpair::constant || c.params.beta > 0.0) {
      EigenCheck v = eigen_vector_check(P, which);
      vec = v.vector_residual;
      ok = ok && v.passed;
    }
    pairs.add_row({std::string(which == Eigenpair::constant ? "constant" : "exponential"), op.lambda, opt_cell(vec),
                   opt_cell(op.operator_residual), op.tolerance, P.K, pass_fail(ok)});
  }
  Report out{{pairs}};
  if (c.params.beta > 0.0) {
    IterateReport it = iterate_decay(c.params, c.iterations, xs, c.policy);
    Table steps{"iterates", {"step", "max_deviation", "amplitude_ratio", "lambda", "truncation_dominated"}, {}};
    for (const auto& s : it.steps)
      steps.add_row({static_cast<long>(s.step), s.max_deviation, opt_cell(s.amplitude_ratio), it.lambda,
                     it.truncation_dominated});
    out.tables.push_back(steps);
  }
  return out;
}

Report schur_report(const RunConfig& c) {
  Table second{"schur_t", {"t", "E", "lemma_applies", "second_bound", "second_direct"}, {}};
  for (double t : c.t_grid) {
    SchurValue e = schur_E(c.params, t);
    Cell bound = std::monostate{};
    Cell direct = std::monostate{};
    if (t > 0.0) {
      SchurSecond s = schur_second_integral(c.params, c.norm.gamma, c.norm.p, t, c.policy);
      bound = s.bound;
      direct = s.direct;
    }
    second.add_row({t, e.value, e.lemma_applies, bound, direct});
  }
  Table first{"schur_x", {"x", "first_integral"}, {}};
  for (double x : c.x_grid) first.add_row({x, schur_first_integral(c.params, c.norm.gamma, c.norm.p, x)});
  return {{second, first}};
}

Report verify_report(bool& passed) {
  Table t{"verify_all", {"check", "name", "measured", "tolerance", "status", "detail"}, {}};
  passed = true;
  for (const CheckResult& r : run_acceptance_suite()) {
    passed = passed && r.passed;
    t.add_row({static_cast<long>(r.id), r.name, r.measured, r.tolerance, pass_fail(r.passed), r.detail});
  }
  return {{t}};
}

}  // namespace

TestFunction parse_function(const std::string& spec) {
  auto colon = spec.find(':');
  std::string head = spec.substr(0, colon);
  std::string arg = colon == std::string::npos ? std::string() : spec.substr(colon + 1);
  bool has_arg = colon != std::string::npos;
  auto need_arg = [&] {
    if (!has_arg || arg.empty()) fail(Errc::usage, "--f: '" + head + "' needs an argument, e.g. " + head + ":1");
  };
  if (head == "const1" && !has_arg) return TestFunction::constant(1.0);
  if (head == "const") {
    need_arg();
    return TestFunction::constant(parse_real(arg, "a constant"));
  }
  if (head == "monomial") {
    need_arg();
    double r = parse_real(arg, "a degree");
    if (r < 0 || r != std::floor(r) || r > 64) fail(Errc::usage, "--f: monomial degree must be an integer in [0, 64]");
    return TestFunction::monomial(static_cast<unsigned>(r));
  }
  if (head == "poly") {
    need_arg();
    std::vector<double> coeffs;
    std::size_t start = 0;
    while (start <= arg.size()) {
      auto comma = arg.find(',', start);
      if (comma == std::string::npos) comma = arg.size();
      coeffs.push_back(parse_real(arg.substr(start, comma - start), "a coefficient"));
      start = comma + 1;
    }
    return TestFunction::polynomial(coeffs);
  }
  if (head == "exp") {
    need_arg();
    return TestFunction::exp_scaled(parse_real(arg, "an exponent"));
  }
  if (head == "abs") {
    need_arg();
    return TestFunction::abs_shift(parse_real(arg, "a shift"));
  }
  if (head == "sqrt" && !has_arg) return TestFunction::square_root();
  if (head == "sin") {
    need_arg();
    return TestFunction::sin_scaled(parse_real(arg, "a frequency"));
  }
  if (head == "file") {
    need_arg();
    return TestFunction::load_sampled(arg);
  }
  fail(Errc::usage, "--f: unknown function '" + spec + "' (expected const1, const:c, monomial:r, poly:c0,c1,..., "
                    "exp:c, abs:c, sqrt, sin:c or file:path)");
}

RunConfig parse_config(const std::vector<std::string>& args) {
  RunConfig c;
  CLI::App app{"Szasz-Mirakyan-Laguerre-Durrmeyer operator toolkit", "smld"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "show help for every command");

  std::optional<double> x;
  std::string norm_name = "sup";
  std::string format_name = "csv";
  std::string grid_flag = "--n";
  std::vector<std::pair<CLI::App*, Command>> subs;

  for (const CommandInfo& info : kCommands) {
    CLI::App* sub = app.add_subcommand(info.name, info.description);
    subs.emplace_back(sub, info.command);
    sub->add_option("--n", c.params.n, "operator index n")->capture_default_str();
    sub->add_option("--alpha", c.params.alpha, "weight exponent alpha > -1")->capture_default_str();
    sub->add_option("--beta", c.params.beta, "exponential tilt beta < n")->capture_default_str();
    sub->add_option("--x", x, "single evaluation point (replaces --x-grid)");
    sub->add_option("--x-grid", c.x_grid, "comma-separated evaluation points")->delimiter(',')->capture_default_str();
    sub->add_option("--n-grid", c.n_grid, "comma-separated values of n")->delimiter(',')->capture_default_str();
    sub->add_option("--t-grid", c.t_grid, "comma-separated values of t")->delimiter(',')->capture_default_str();
    sub->add_option("--f", c.function_spec, "test function")->capture_default_str();
    sub->add_option("--max-r", c.max_r, "largest moment order")->capture_default_str()->check(CLI::Range(0u, 64u));
    sub->add_option("--r", c.r, "moment order for asymptotics")->capture_default_str()->check(CLI::Range(1u, 64u));
    sub->add_option("--norm", norm_name, "sup, phi, lp or wlp")->capture_default_str();
    sub->add_option("--a", c.norm.extent, "norm extent: a, X_max, R or R_max")->capture_default_str();
    sub->add_option("--p", c.norm.p, "L_p exponent")->capture_default_str();
    sub->add_option("--gamma", c.norm.gamma, "exponential weight gamma")->capture_default_str();
    sub->add_option("--grid-points", c.norm.grid_points, "grid points for sup norms")->capture_default_str();
    sub->add_option("--eps-tail", c.policy.eps_tail, "series tail tolerance")->capture_default_str();
    sub->add_option("--quad-nodes", c.policy.quad_nodes, "Gauss-Laguerre nodes")->capture_default_str();
    sub->add_option("--eps-quad", c.policy.eps_quad, "quadrature tolerance")->capture_default_str();
    sub->add_option("--k-max", c.policy.k_max, "largest series index")->capture_default_str();
    sub->add_option("--iterations", c.iterations, "iterate count for eigen")
        ->capture_default_str()
        ->check(CLI::Range(0, 64));
    sub->add_option("--format", format_name, "csv or json")->capture_default_str()->check(
        CLI::IsMember({"csv", "json"}));
    sub->add_option("--output", c.output, "output file (default: standard output)");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    c.help = true;
    c.help_text = app.help();
    for (auto& [sub, command] : subs)
      if (sub->parsed()) c.help_text = sub->help();
    return c;
  } catch (const CLI::CallForAllHelp&) {
    c.help = true;
    c.help_text = app.help("", CLI::AppFormatMode::All);
    return c;
  } catch (const CLI::ParseError& e) {
    fail(Errc::usage, e.what());
  }

  for (auto& [sub, command] : subs)
    if (sub->parsed()) c.command = command;
  if (x) c.x_grid = {*x};
  c.format = format_name == "json" ? Format::json : Format::csv;
  c.norm.kind = parse_norm_kind(norm_name);

  check_params(c.params, "--n/--beta");
  for (double n : c.n_grid) {
    OperatorParams p = c.params;
    p.n = n;
    check_params(p, "--n-grid");
  }
  auto nonneg_finite = [](const std::vector<double>& g, const std::string& flag) {
    if (g.empty()) fail(Errc::usage, flag + ": needs at least one value");
    for (double v : g)
      if (!std::isfinite(v) || v < 0.0) fail(Errc::usage, flag + ": values must be finite and >= 0");
  };
  nonneg_finite(c.x_grid, "--x-grid");
  nonneg_finite(c.t_grid, "--t-grid");
  try {
    c.policy.validate();
  } catch (const Error& e) {
    rethrow_as_usage("--eps-tail/--quad-nodes/--eps-quad/--k-max", e);
  }
  try {
    c.norm.validate();
  } catch (const Error& e) {
    rethrow_as_usage("--norm/--a/--p/--gamma/--grid-points", e);
  }
  if (c.command == Command::apply || c.command == Command::converge) {
    TestFunction f = parse_function(c.function_spec);
    if (validate(c.params, f) == Errc::n_not_above_beta_plus_growth)
      fail(Errc::usage, "--f: requires n > beta + growth exponent of the function");
  }
  return c;
}

Report build_report(const RunConfig& c, bool& verification_passed) {
  verification_passed = true;
  switch (c.command) {
    case Command::moments: {
      Report r;
      for (double x : c.x_grid) r.tables.push_back(moments_table(c, x));
      return r;
    }
    case Command::central_moments: return {{central_table(c)}};
    case Command::asymptotics: return {{asymptotics_table(c)}};
    case Command::apply: return {{apply_table(c)}};
    case Command::converge: return converge_report(c);
    case Command::eigen: return eigen_report(c);
    case Command::schur: return schur_report(c);
    case Command::verify_all: return verify_report(verification_passed);
  }
  return {};
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.help) {
    out << config.help_text;
    return exit_ok;
  }
  try {
    bool passed = true;
    Report report = build_report(config, passed);
    emit_to(report, config.format, config.output, out);
    return passed ? exit_ok : exit_verification;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == Errc::usage || e.code() == Errc::io ? exit_usage : exit_numerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_numerical;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  RunConfig config;
  try {
    config = parse_config(args);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    err << "run 'smld --help' for usage\n";
    return exit_usage;
  }
  return run(config, out, err);
}

}  // namespace smld
