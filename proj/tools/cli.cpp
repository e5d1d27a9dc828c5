#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "cli_io.hpp"
#include "expr.hpp"
#include "mlexist/error.hpp"
#include "mlexist/families.hpp"
#include "mlexist/mle.hpp"
#include "mlexist/montecarlo.hpp"
#include "mlexist/uniqueness.hpp"

namespace mlexist::cli {

namespace {

struct Settings {
  std::string space_path;
  std::string basis_path;
  std::string sample_path;
  std::string out_path;
  double lp_tol = 1e-7;
  unsigned threads = 1;
  bool verbose = false;

  // fit
  double tol = 1e-8;
  int max_iter = 500;

  // family
  int k = 0;
  int q = 0;
  int nodes = 0;
  int states = 0;
  std::string c_path;

  // simulate
  std::string family;
  std::string estimator = "existence";
  std::optional<long long> n;
  std::string n_rule;
  std::string t_rule;
  std::vector<double> multipliers;
  double b = 0.0;
  std::uint64_t replicates = 100000;
  std::uint64_t seed = 0;

  // formulas
  double c_value = 0.0;
};

class Trace {
 public:
  Trace(std::ostream& err, const bool& enabled) : err_(err), enabled_(enabled) {}
  void operator()(const std::string& line) const {
    if (enabled_) err_ << "[mlexist] " << line << '\n';
  }

 private:
  std::ostream& err_;
  const bool& enabled_;
};

struct Problem {
  StateSpace space;
  Eigen::MatrixXd generators;
  LinearSpan span;
  Sample sample;
};

Problem load_problem(const Settings& s, const Trace& trace) {
  const json space_doc = parse_json(read_text(s.space_path), "space file");
  StateSpace space = parse_space(space_doc);
  Eigen::MatrixXd generators;
  if (s.basis_path.empty()) {
    generators = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(space.size()),
                                           static_cast<Eigen::Index>(space.size()));
    trace("no --basis given; using the full span");
  } else {
    generators = parse_basis(parse_json(read_text(s.basis_path), "basis file"), space.size());
  }
  LinearSpan span(generators);
  Sample sample = parse_sample(read_text(s.sample_path), space);
  trace("K=" + std::to_string(space.size()) + " dim=" + std::to_string(span.dim()) +
        " n=" + std::to_string(sample.size()));
  return Problem{std::move(space), std::move(generators), std::move(span), std::move(sample)};
}

UniquenessOptions uniqueness_options(const Settings& s) {
  UniquenessOptions o;
  o.tolerance = s.lp_tol;
  o.threads = s.threads;
  return o;
}

json witness_json(const Problem& p, const std::optional<CoefVector>& delta) {
  if (!delta) return nullptr;
  return numbers(on_generators(p.span, *delta, p.generators.rows()));
}

json check_uniqueness_command(const Settings& s, const Trace& trace) {
  const Problem p = load_problem(s, trace);
  require_constants(p.span);
  const IndexSet support = sample_support(p.sample);
  const UniquenessReport r = closure(p.span, support, uniqueness_options(s));
  trace("closure has " + std::to_string(r.closure.size()) + " of " +
        std::to_string(p.space.size()) + " states");
  json out;
  out["is_uniqueness"] = r.is_uniqueness;
  out["support"] = labels_of(p.space, support);
  out["closure"] = labels_of(p.space, r.closure);
  out["witness_delta"] = witness_json(p, r.witness_delta);
  return out;
}

json closure_command(const Settings& s, const Trace& trace) {
  const Problem p = load_problem(s, trace);
  require_constants(p.span);
  const IndexSet support = sample_support(p.sample);
  const UniquenessReport r = closure(p.span, support, uniqueness_options(s));
  json out;
  out["is_uniqueness"] = r.is_uniqueness;
  out["closure"] = labels_of(p.space, r.closure);
  out["closure_indices"] = r.closure.items();
  out["witness_delta"] = witness_json(p, r.witness_delta);
  out["witness_values"] =
      r.witness_delta ? numbers(evaluate(p.span, *r.witness_delta)) : json(nullptr);
  json escapes = json::array();
  for (const auto& [x, a] : r.escape_witnesses) {
    escapes.push_back({{"state", p.space.label(x)},
                       {"coefficients", numbers(on_generators(p.span, a, p.generators.rows()))}});
  }
  out["escape_witnesses"] = escapes;
  return out;
}

json fit_command(const Settings& s, const Trace& trace) {
  const Problem p = load_problem(s, trace);
  MleOptions o;
  o.tolerance = s.tol;
  o.max_iterations = s.max_iter;
  o.uniqueness = uniqueness_options(s);
  const MleResult r = fit(p.space, p.span, p.sample, o);
  trace(std::string("MLE ") + (r.kind == MleKind::Exists ? "exists" : "does not exist") +
        "; " + std::to_string(r.iterations) + " Newton iterations, residual " +
        format_number(r.moment_residual));

  const StateVector full_density = r.extended_density(p.space.size());
  json log_density = json::array();
  {
    std::size_t i = 0;
    for (std::size_t x = 0; x < p.space.size(); ++x) {
      if (r.support.contains(x)) {
        log_density.push_back(number(r.density.log_values(static_cast<Eigen::Index>(i++))));
      } else {
        log_density.push_back(nullptr);
      }
    }
  }
  json out;
  out["kind"] = r.kind == MleKind::Exists ? "exists" : "reduced";
  out["n"] = p.sample.size();
  out["labels"] = p.space.labels();
  out["support"] = labels_of(p.space, r.support);
  out["density"] = numbers(full_density);
  out["log_density"] = log_density;
  out["coefficients"] = numbers(on_generators(p.span, r.full_coefficients, p.generators.rows()));
  out["log_likelihood"] = number(r.log_likelihood_sup);
  out["iterations"] = r.iterations;
  out["moment_residual"] = number(r.moment_residual);
  out["witness_delta"] = witness_json(p, r.witness_delta);
  return out;
}

json rows_json(const Eigen::MatrixXd& rows) {
  json out = json::array();
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    out.push_back(numbers(rows.row(r).transpose()));
  }
  return out;
}

json space_json(const StateSpace& space) {
  json out;
  out["labels"] = space.labels();
  json w = json::array();
  for (double v : space.weights()) w.push_back(number(v));
  out["weights"] = w;
  return out;
}

std::vector<double> edge_params(const Settings& s, std::size_t nodes) {
  if (s.c_path.empty()) return std::vector<double>(edge_count(nodes), 0.0);
  return parse_edge_params(parse_json(read_text(s.c_path), "edge parameter file"), nodes);
}

json family_command(const std::string& which, const Settings& s, const Trace& trace) {
  json out;
  out["family"] = which;
  if (which == "full") {
    if (s.states < 1) throw Error(ErrorCode::EmptySpace, "--K must be >= 1");
    std::vector<std::string> labels;
    for (int i = 0; i < s.states; ++i) labels.push_back(std::to_string(i));
    const StateSpace space(std::move(labels), std::vector<double>(s.states, 1.0));
    out["K"] = s.states;
    out.update(space_json(space));
    out["rows"] = rows_json(full_span(space).basis());
    return out;
  }
  if (which == "graph") {
    const auto nodes = static_cast<std::size_t>(std::max(s.nodes, 0));
    GraphParams params{edge_params(s, nodes)};
    const GraphFamily g = graph_family(nodes, params);
    trace("graph family on " + std::to_string(nodes) + " nodes, " +
          std::to_string(g.space.size()) + " states");
    out["N"] = nodes;
    json edges = json::array();
    for (std::size_t e = 0; e < edge_count(nodes); ++e) {
      const auto [r, t] = edge_pair(e, nodes);
      edges.push_back({r, t});
    }
    out["edges"] = edges;
    json c = json::array();
    for (double v : params.c) c.push_back(number(v));
    out["c"] = c;
    out.update(space_json(g.space));
    out["rows"] = rows_json(g.span.basis());
    out["density"] = numbers(g.density.values);
    return out;
  }
  CubeFamily f = which == "rademacher" ? rademacher_span(s.k)
                 : which == "parity"   ? parity_span(s.k)
                                       : walsh_span(s.k, s.q);
  out["k"] = s.k;
  if (which == "walsh") out["q"] = s.q;
  trace(which + " span of dimension " + std::to_string(f.span.dim()));
  out.update(space_json(f.space));
  out["rows"] = rows_json(f.span.basis());
  return out;
}

FamilySpec simulate_family(const Settings& s) {
  if (s.family == "full") return FamilySpec::full(static_cast<std::size_t>(std::max(s.states, 0)));
  if (s.family == "rademacher") return FamilySpec::rademacher(static_cast<std::size_t>(std::max(s.k, 0)));
  if (s.family == "walsh") return FamilySpec::walsh(static_cast<std::size_t>(std::max(s.k, 0)), s.q);
  const auto nodes = static_cast<std::size_t>(std::max(s.nodes, 0));
  if (nodes < 2) throw Error(ErrorCode::InvalidArgument, "graph family needs --N >= 2");
  return FamilySpec::graph(nodes, edge_params(s, nodes));
}

std::size_t sample_size_from(double v) {
  // Absorb rounding noise such as 13.000000000000002 before taking the ceiling.
  const double n = std::ceil(v - 1e-9);
  return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

std::string simulate_command(const Settings& s, const Trace& trace) {
  const FamilySpec family = simulate_family(s);
  Estimator estimator;
  if (s.estimator == "existence") estimator = Estimator::Existence;
  else if (s.estimator == "nu-mean") estimator = Estimator::NuMean;
  else estimator = Estimator::NuTail;

  std::map<std::string, double> vars{{"b", s.b}};
  const double size = static_cast<double>(family.size);
  if (family.kind == FamilyKind::Full) vars["K"] = size;
  if (family.kind == FamilyKind::Graph) vars["N"] = size;
  if (family.kind == FamilyKind::Rademacher || family.kind == FamilyKind::Walsh) {
    vars["k"] = size;
    vars["q"] = family.q;
    if (family.size < 64) vars["K"] = std::exp2(size);
  }

  if (estimator == Estimator::Existence && !s.n && s.n_rule.empty()) {
    throw Error(ErrorCode::InvalidArgument, "existence estimator needs --n or --n-rule");
  }
  if (s.n && !s.n_rule.empty()) {
    throw Error(ErrorCode::InvalidArgument, "give either --n or --n-rule, not both");
  }
  if (s.n && *s.n < 1) throw Error(ErrorCode::InvalidArgument, "--n must be >= 1");
  if (estimator == Estimator::NuTail && s.t_rule.empty()) {
    throw Error(ErrorCode::InvalidArgument, "nu-tail estimator needs --t");
  }

  std::vector<double> multipliers = s.multipliers;
  if (multipliers.empty()) multipliers.push_back(1.0);

  std::ostringstream csv;
  csv << "family,k_or_N,n,replicates,estimate,stderr,reference,z\n";
  for (double m : multipliers) {
    vars["m"] = m;
    ExperimentConfig cfg;
    cfg.family = family;
    cfg.replicates = s.replicates;
    cfg.seed = s.seed;
    cfg.estimator = estimator;
    cfg.threads = s.threads;
    cfg.lp.tolerance = s.lp_tol;
    std::string n_cell;
    if (estimator == Estimator::Existence) {
      cfg.n = s.n ? static_cast<std::size_t>(*s.n)
                  : sample_size_from(evaluate_expression(s.n_rule, vars));
      n_cell = std::to_string(cfg.n);
    }
    if (estimator == Estimator::NuTail) cfg.tail_t = evaluate_expression(s.t_rule, vars);
    trace("m=" + format_number(m) + " n=" + (n_cell.empty() ? "-" : n_cell) +
          " replicates=" + std::to_string(cfg.replicates));
    const ExperimentSummary r = run_experiment(cfg);
    csv << to_string(family.kind) << ',' << family.size << ',' << n_cell << ','
        << r.replicates << ',' << format_number(r.estimate) << ','
        << format_number(r.std_error) << ','
        << (r.reference ? format_number(*r.reference) : "") << ','
        << (r.z ? format_number(*r.z) : "") << '\n';
  }
  return csv.str();
}

json formulas_command(const std::string& which, const Settings& s) {
  json out;
  out["formula"] = which;
  if (which == "rademacher-prob") {
    const auto p = exists_probability_rademacher(s.k, static_cast<int>(s.n.value_or(0)));
    out["k"] = s.k;
    out["n"] = *s.n;
    out["probability"] = number(p.exact);
    out["lower_bound"] = number(p.bernoulli_lower);
  } else if (which == "graph-prob") {
    const auto nodes = static_cast<std::size_t>(std::max(s.nodes, 0));
    if (nodes < 2) throw Error(ErrorCode::InvalidArgument, "need --N >= 2");
    GraphParams params{edge_params(s, nodes)};
    out["N"] = nodes;
    out["n"] = *s.n;
    out["probability"] = number(exists_probability_graphs(static_cast<int>(*s.n), params));
  } else if (which == "eisenberg") {
    const auto [lo, hi] = eisenberg_bounds(s.k);
    out["k"] = s.k;
    out["harmonic"] = number(harmonic_number(s.k));
    out["lower"] = number(lo);
    out["upper"] = number(hi);
    if (const auto mean = exact_nu_mean(FamilySpec::rademacher(static_cast<std::size_t>(s.k)))) {
      out["exact_mean"] = number(*mean);
    }
  } else if (which == "walsh-dim") {
    if (s.k < 1 || s.q < 0 || s.q > s.k) {
      throw Error(ErrorCode::InvalidOrder, "need k >= 1 and 0 <= q <= k");
    }
    out["k"] = s.k;
    out["q"] = s.q;
    out["dimension"] = walsh_dimension(s.k, s.q);
    out["entropy_bound"] = number(entropy_bound(s.k, s.q));
  } else if (which == "coupon-limit") {
    out["c"] = number(s.c_value);
    out["probability"] = number(std::exp(-std::exp(-s.c_value)));
  } else {
    out["b"] = number(s.b);
    out["probability"] = number(std::exp(-std::exp2(1.0 - s.b)));
  }
  return out;
}

void emit(const std::string& text, const Settings& s, std::ostream& out) {
  if (s.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(s.out_path, std::ios::binary);
  if (!file) throw Error(ErrorCode::InvalidArgument, "cannot write " + s.out_path);
  file << text;
}

void add_problem_options(CLI::App* cmd, Settings& s) {
  cmd->add_option("--space", s.space_path, "State space JSON {labels, weights}")
      ->required()->check(CLI::ExistingFile);
  cmd->add_option("--basis", s.basis_path, "Basis JSON {rows}; default: full span")
      ->check(CLI::ExistingFile);
  cmd->add_option("--sample", s.sample_path,
                  "Sample: JSON index array, JSON label array, or one label per line")
      ->required()->check(CLI::ExistingFile);
  cmd->add_option("--lp-tol", s.lp_tol, "LP feasibility tolerance")->capture_default_str();
  cmd->add_option("--threads", s.threads, "Worker threads")->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings s;
  const Trace trace(err, s.verbose);

  CLI::App app{"Existence and computation of maximum likelihood estimators for discrete "
               "exponential families"};
  app.name("mlexist");
  app.require_subcommand(1);
  app.add_flag("--verbose,-v", s.verbose, "Trace progress on standard error");
  app.add_option("--out,-o", s.out_path, "Write the result to this file instead of stdout");
  app.fallthrough();

  auto* check = app.add_subcommand("check-uniqueness",
                                   "Is the sample support a set of uniqueness?");
  add_problem_options(check, s);

  auto* clos = app.add_subcommand("closure", "Closure of the sample support and its witnesses");
  add_problem_options(clos, s);

  auto* fitc = app.add_subcommand("fit", "Maximum likelihood estimate (or its extension)");
  add_problem_options(fitc, s);
  fitc->add_option("--tol", s.tol, "Moment residual tolerance")->capture_default_str();
  fitc->add_option("--max-iter", s.max_iter, "Newton iteration limit")->capture_default_str();

  auto* family = app.add_subcommand("family", "Emit a built-in family as space + basis JSON");
  family->require_subcommand(1);
  auto* fam_full = family->add_subcommand("full", "Full span on K states");
  fam_full->add_option("--K", s.states, "Number of states")->required();
  auto* fam_rad = family->add_subcommand("rademacher", "Lin{1, r_1..r_k} on Q_k");
  fam_rad->add_option("--k", s.k, "Cube dimension")->required();
  auto* fam_walsh = family->add_subcommand("walsh", "Walsh functions of order <= q on Q_k");
  fam_walsh->add_option("--k", s.k, "Cube dimension")->required();
  fam_walsh->add_option("--q", s.q, "Maximal order")->required();
  auto* fam_parity = family->add_subcommand("parity", "Walsh functions of order <= k-1");
  fam_parity->add_option("--k", s.k, "Cube dimension")->required();
  auto* fam_graph = family->add_subcommand("graph", "Random graphs on N nodes");
  fam_graph->add_option("--n,--N", s.nodes, "Number of nodes")->required();
  fam_graph->add_option("--c", s.c_path, "Edge parameters JSON (number or array)")
      ->check(CLI::ExistingFile);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo existence probabilities and nu_uniq");
  sim->add_option("--family", s.family, "full | rademacher | walsh | graph")
      ->required()->check(CLI::IsMember({"full", "rademacher", "walsh", "graph"}));
  sim->add_option("--K", s.states, "States (full)");
  sim->add_option("--k", s.k, "Cube dimension (rademacher, walsh)");
  sim->add_option("--q", s.q, "Walsh order")->capture_default_str();
  sim->add_option("--N", s.nodes, "Nodes (graph)");
  sim->add_option("--c", s.c_path, "Edge parameters JSON (graph)")->check(CLI::ExistingFile);
  sim->add_option("--estimator", s.estimator, "existence | nu-mean | nu-tail")
      ->capture_default_str()->check(CLI::IsMember({"existence", "nu-mean", "nu-tail"}));
  sim->add_option("--n", s.n, "Fixed sample size");
  sim->add_option("--n-rule", s.n_rule,
                  "Sample size expression in k, N, K, q, m, b; rounded up");
  sim->add_option("--t", s.t_rule, "Tail threshold expression for nu-tail: P(nu < t)");
  sim->add_option("--multipliers", s.multipliers, "Values of m, one CSV row each")
      ->delimiter(',');
  sim->add_option("--b", s.b, "Value of b in the rules")->capture_default_str();
  sim->add_option("--replicates", s.replicates, "Replicates R")->capture_default_str();
  sim->add_option("--seed", s.seed, "Master seed")->capture_default_str();
  sim->add_option("--threads", s.threads, "Worker threads")->capture_default_str();
  sim->add_option("--lp-tol", s.lp_tol, "LP tolerance (general Walsh orders)")
      ->capture_default_str();

  auto* formulas = app.add_subcommand("formulas", "Closed-form probabilities and bounds");
  formulas->require_subcommand(1);
  auto* f_rad = formulas->add_subcommand("rademacher-prob", "(1 - 2^{1-n})^k and 1 - k 2^{1-n}");
  f_rad->add_option("--k", s.k)->required();
  f_rad->add_option("--n", s.n)->required();
  auto* f_graph = formulas->add_subcommand("graph-prob", "prod_e (1 - p_e^n - (1-p_e)^n)");
  f_graph->add_option("--N", s.nodes)->required();
  f_graph->add_option("--n", s.n)->required();
  f_graph->add_option("--c", s.c_path, "Edge parameters JSON")->check(CLI::ExistingFile);
  auto* f_eis = formulas->add_subcommand("eisenberg", "Bounds H_k/log 2 + 1 and + 2 on E(nu)");
  f_eis->add_option("--k", s.k)->required();
  auto* f_walsh = formulas->add_subcommand("walsh-dim", "sum_{j<=q} C(k,j) and 2^{k H(q/k)}");
  f_walsh->add_option("--k", s.k)->required();
  f_walsh->add_option("--q", s.q)->required();
  auto* f_coupon = formulas->add_subcommand("coupon-limit", "exp(-exp(-c))");
  f_coupon->add_option("--c", s.c_value)->required();
  auto* f_rlim = formulas->add_subcommand("rademacher-limit", "exp(-2^{1-b})");
  f_rlim->add_option("--b", s.b)->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kValidationError;
  }

  try {
    std::string text;
    if (check->parsed()) {
      text = check_uniqueness_command(s, trace).dump(2) + "\n";
    } else if (clos->parsed()) {
      text = closure_command(s, trace).dump(2) + "\n";
    } else if (fitc->parsed()) {
      text = fit_command(s, trace).dump(2) + "\n";
    } else if (family->parsed()) {
      for (auto* sub : family->get_subcommands()) {
        text = family_command(sub->get_name(), s, trace).dump() + "\n";
      }
    } else if (sim->parsed()) {
      text = simulate_command(s, trace);
    } else if (formulas->parsed()) {
      for (auto* sub : formulas->get_subcommands()) {
        text = formulas_command(sub->get_name(), s).dump(2) + "\n";
      }
    }
    emit(text, s, out);
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_numerical(e.code()) ? kNumericalError : kValidationError;
  } catch (const json::exception& e) {
    err << "error: InvalidArgument: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::bad_alloc&) {
    err << "error: out of memory\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalError;
  }
}

}  // namespace mlexist::cli
