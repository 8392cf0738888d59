#include "quadcount/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "quadcount/archimedean.hpp"
#include "quadcount/counting.hpp"
#include "quadcount/decompose.hpp"
#include "quadcount/error.hpp"
#include "quadcount/expsums.hpp"
#include "quadcount/padic.hpp"

namespace quadcount {

namespace {

using nlohmann::json;

struct Config {
  std::string subcommand;
  std::string poly;
  std::vector<i64> Ps;
  i64 q = 0;
  std::vector<i64> c;
  std::string method = "auto";
  std::string lemma = "auto";
  i64 xmax = 200;
  std::string mode;
  double c_radius = 0.25;
  double theta_max = 4096.0;
  i64 pmax = 13;
  i64 prime_cutoff = 13;
  double budget = 0.0;  // 0 keeps the module default
  double eta = 0.1;
  int threads = 1;
  std::string out;
  int verbosity = 0;
};

// Rows of typed cells: the screen gets a padded table, --out gets CSV or JSON.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;
};

std::string cell_text(const json& v, bool exact) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
  if (v.is_array()) {
    std::string s;
    for (const auto& e : v) s += (s.empty() ? "" : " ") + cell_text(e, exact);
    return s;
  }
  if (v.is_number_float() && !exact) {
    std::ostringstream os;
    os << std::setprecision(10) << v.get<double>();
    return os.str();
  }
  return v.dump();
}

void print_table(const Table& t, std::ostream& out) {
  std::vector<size_t> width(t.columns.size());
  for (size_t j = 0; j < t.columns.size(); ++j) width[j] = t.columns[j].size();
  std::vector<std::vector<std::string>> text;
  for (const auto& row : t.rows) {
    auto& line = text.emplace_back();
    for (size_t j = 0; j < row.size(); ++j) {
      line.push_back(cell_text(row[j], false));
      width[j] = std::max(width[j], line.back().size());
    }
  }
  auto emit = [&](const std::vector<std::string>& cells) {
    for (size_t j = 0; j < cells.size(); ++j)
      out << std::left << std::setw(static_cast<int>(width[j]) + (j + 1 < cells.size() ? 2 : 0)) << cells[j];
    out << '\n';
  };
  emit(t.columns);
  for (const auto& line : text) emit(line);
}

std::string table_csv(const Table& t) {
  std::string s;
  for (size_t j = 0; j < t.columns.size(); ++j) s += (j ? "," : "") + t.columns[j];
  s += '\n';
  for (const auto& row : t.rows) {
    for (size_t j = 0; j < row.size(); ++j) s += (j ? "," : "") + cell_text(row[j], true);
    s += '\n';
  }
  return s;
}

std::string table_json(const Table& t) {
  json arr = json::array();
  for (const auto& row : t.rows) {
    json obj = json::object();
    for (size_t j = 0; j < row.size(); ++j) obj[t.columns[j]] = row[j];
    arr.push_back(obj);
  }
  return arr.dump(2);
}

bool wants_json(const std::string& path) { return path.size() >= 5 && path.substr(path.size() - 5) == ".json"; }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::usage_error, "cannot write '" + path + "'");
  f << text;
  if (text.empty() || text.back() != '\n') f << '\n';
}

void emit_table(const Table& t, const Config& cfg, std::ostream& out) {
  print_table(t, out);
  if (!cfg.out.empty()) write_file(cfg.out, wants_json(cfg.out) ? table_json(t) : table_csv(t));
}

json mpz_json(const mpz_class& v) {
  if (v.fits_slong_p()) return v.get_si();
  return v.get_str();
}

json mpz_array(const std::vector<mpz_class>& vs) {
  json a = json::array();
  for (const auto& v : vs) a.push_back(mpz_json(v));
  return a;
}

Theorem parse_theorem(const std::string& s) {
  if (s == "t1") return Theorem::t1;
  if (s == "t2") return Theorem::t2;
  throw Error(ErrorCode::usage_error, "mode must be t1 or t2, got '" + s + "'");
}

std::vector<double> P_values(const Config& cfg) {
  if (cfg.Ps.empty()) throw Error(ErrorCode::usage_error, "--P needs at least one value");
  std::vector<double> out;
  for (i64 P : cfg.Ps) {
    if (P < 1) throw Error(ErrorCode::usage_error, "P values must be positive");
    out.push_back(static_cast<double>(P));
  }
  return out;
}

PredictionOptions prediction_options(const Config& cfg) {
  PredictionOptions o;
  o.c_radius = cfg.c_radius;
  o.prime_cutoff = cfg.prime_cutoff;
  o.eta = cfg.eta;
  o.singular.c_radius = cfg.c_radius;
  o.singular.theta_max = cfg.theta_max;
  return o;
}

CountOptions count_options(const Config& cfg) {
  CountOptions o;
  if (cfg.budget > 0) o.budget = cfg.budget;
  o.threads = cfg.threads;
  return o;
}

void cmd_decompose(const Config& cfg, std::ostream& out) {
  const auto f = load_polynomial(cfg.poly);
  const auto inv = invariants(f);
  const auto smith = smith_form(f);
  const auto cd = congruent_diagonalize(f);
  json lambdas = json::array();
  for (double l : inv.lambdas) lambdas.push_back(l);
  Table t{{"field", "value"}, {}};
  t.rows = {{"n", inv.n},
            {"r", inv.r},
            {"lambda", lambdas},
            {"Delta", inv.delta},
            {"norm", inv.norm},
            {"kappa", inv.kappa},
            {"indefinite", inv.indefinite},
            {"beta", mpz_array(cd.betas)},
            {"alpha", mpz_array(smith.alphas)},
            {"D", mpz_json(cd.D)}};
  emit_table(t, cfg, out);
}

void cmd_expsum(const Config& cfg, std::ostream& out) {
  const auto f = load_polynomial(cfg.poly);
  ExpSumOptions o;
  if (cfg.budget > 0) o.budget = cfg.budget;
  o.threads = cfg.threads;
  const ExpSumEvaluator ev(f, o);
  std::vector<i64> c = cfg.c;
  if (c.empty()) c.assign(f.n(), 0);
  if (static_cast<int>(c.size()) != f.n())
    throw Error(ErrorCode::usage_error, "--c needs " + std::to_string(f.n()) + " entries");
  if (cfg.q < 1) throw Error(ErrorCode::usage_error, "--q must be positive");
  const auto v = ev.evaluate(cfg.q, c, parse_method(cfg.method));
  std::string cs;
  for (i64 x : c) cs += (cs.empty() ? "" : ",") + std::to_string(x);
  std::ostringstream line;
  line << std::setprecision(17) << v.q << ' ' << cs << ' ' << v.value.real() << ' ' << v.value.imag() << ' '
       << to_string(v.method);
  out << line.str() << '\n';
  if (!cfg.out.empty()) {
    json cj = json::array();
    for (i64 x : c) cj.push_back(x);
    Table t{{"q", "c", "re", "im", "method"}, {{v.q, cj, v.value.real(), v.value.imag(), std::string(to_string(v.method))}}};
    write_file(cfg.out, wants_json(cfg.out) ? table_json(t) : table_csv(t));
  }
}

void cmd_sums(const Config& cfg, std::ostream& out) {
  const auto f = load_polynomial(cfg.poly);
  ExpSumOptions o;
  if (cfg.budget > 0) o.budget = cfg.budget;
  o.threads = cfg.threads;
  const ExpSumEvaluator ev(f, o);
  std::vector<i64> c = cfg.c;
  if (c.empty()) c.assign(f.n(), 0);
  if (static_cast<int>(c.size()) != f.n())
    throw Error(ErrorCode::usage_error, "--c needs " + std::to_string(f.n()) + " entries");
  if (cfg.xmax < 1) throw Error(ErrorCode::usage_error, "--xmax must be positive");
  const auto rep = partial_sum_check(ev, c, cfg.xmax, parse_lemma_case(cfg.lemma));
  Table t{{"x", "partial_sum", "shape", "ratio"}, {}};
  for (size_t i = 0; i < rep.xs.size(); ++i) t.rows.push_back({rep.xs[i], rep.partial_sums[i], rep.shapes[i], rep.ratios[i]});
  emit_table(t, cfg, out);
  out << "case " << to_string(rep.lemma) << "  C " << rep.fitted_constant << "  worst " << rep.worst_ratio
      << (rep.pass ? "  finite" : "  not finite") << '\n';
}

void cmd_sigma(const Config& cfg, std::ostream& out) {
  const auto f = load_polynomial(cfg.poly);
  SingularOptions o;
  o.c_radius = cfg.c_radius;
  o.theta_max = cfg.theta_max;
  if (cfg.budget > 0) o.budget = cfg.budget;
  const auto mode = parse_singular_mode(cfg.mode.empty() ? "sgn" : cfg.mode);
  const auto start = std::chrono::steady_clock::now();
  const auto res = singular_integral(mode, f, o);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Table t{{"mode", "re", "im", "error", "refinement", "tail", "theta", "panels", "evaluations", "seconds"},
          {{std::string(to_string(mode)), res.value.real(), res.value.imag(), res.error, res.refinement_change,
            res.tail_bound, res.theta_cutoff, res.theta_panels, res.integrand_evaluations, secs}}};
  emit_table(t, cfg, out);
}

void cmd_local(const Config& cfg, std::ostream& out, std::ostream& err) {
  const auto f = load_polynomial(cfg.poly);
  if (cfg.pmax < 2) throw Error(ErrorCode::usage_error, "--pmax must be at least 2");
  PadicOptions o;
  if (cfg.budget > 0) o.budget = cfg.budget;
  Table t{{"p", "density", "exact", "t", "stabilized", "soluble"}, {}};
  for (i64 p : primes_up_to(cfg.pmax)) {
    const auto d = local_density(f, p, 0, o);
    std::string soluble;
    try {
      soluble = local_solubility(f, p, 0, o).soluble ? "yes" : "no";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::inconclusive) throw;
      soluble = "inconclusive";
    }
    t.rows.push_back({p, d.to_double(), d.value.get_str(), d.t_used, d.stabilized, soluble});
  }
  emit_table(t, cfg, out);
  if (exact_rank(f) >= 5) {
    const auto s = singular_series(f, cfg.pmax, o);
    out << "singular series " << s.value << " +- " << s.tail_bound << '\n';
  } else if (cfg.verbosity > 0) {
    err << "rank below 5: singular series not evaluated\n";
  }
}

void cmd_count(const Config& cfg, std::ostream& out) {
  const auto f = load_polynomial(cfg.poly);
  const auto mode = parse_theorem(cfg.mode.empty() ? "t1" : cfg.mode);
  const auto w = theorem_weight(f, mode, cfg.c_radius);
  const auto o = count_options(cfg);
  Table t{{"P", "count", "solutions", "visited", "plan", "seconds"}, {}};
  for (double P : P_values(cfg)) {
    const auto start = std::chrono::steady_clock::now();
    const auto res = brute_force_count(f, P, w, o);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    t.rows.push_back({P, res.weighted, res.solutions, res.visited, std::string(to_string(res.plan.kind)), secs});
  }
  emit_table(t, cfg, out);
}

void cmd_predict(const Config& cfg, std::ostream& out) {
  const auto f = load_polynomial(cfg.poly);
  const auto mode = parse_theorem(cfg.mode.empty() ? "t1" : cfg.mode);
  const auto in = prediction_inputs(f, mode, prediction_options(cfg));
  Table t{{"P", "main_term", "envelope", "sigma", "series", "hyp_ok"}, {}};
  for (double P : P_values(cfg))
    t.rows.push_back({P, main_term(in, P), error_envelope(in, P), in.sigma.value.real(), in.series.value,
                      validate_hypotheses(f, P, cfg.eta).ok(mode)});
  emit_table(t, cfg, out);
}

void cmd_compare(const Config& cfg, std::ostream& out, std::ostream& err) {
  const auto f = load_polynomial(cfg.poly);
  const auto mode = parse_theorem(cfg.mode.empty() ? "t1" : cfg.mode);
  const auto reps = compare(f, P_values(cfg), mode, prediction_options(cfg), count_options(cfg));
  Table t{{"P", "main_term", "envelope", "count", "ratio", "hyp_ok", "seconds"}, {}};
  for (const auto& r : reps)
    t.rows.push_back({r.P, r.main_term, r.error_envelope, r.brute_count, r.ratio, r.hyp_ok, r.seconds});
  print_table(t, out);
  if (cfg.verbosity > 0)
    for (const auto& r : reps)
      for (const auto& h : r.hypotheses.checks)
        if (h.theorem == mode) err << "P=" << r.P << "  " << h.name << "  " << h.lhs << " vs " << h.rhs << (h.pass ? "  ok\n" : "  FAILS\n");
  if (!cfg.out.empty()) write_file(cfg.out, wants_json(cfg.out) ? reports_json(reps) : reports_csv(reps));
}

int default_threads() {
  if (const char* env = std::getenv("QUADCOUNT_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t >= 1) return t;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

int dispatch(Config& cfg, const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Counting zeros of integer quadratic polynomials"};
  app.name("quadcount");
  app.require_subcommand(1, 1);
  app.set_help_all_flag("--help-all");
  cfg.threads = default_threads();
  app.add_option("--threads", cfg.threads, "worker partitions (default $QUADCOUNT_THREADS or 1)")
      ->check(CLI::Range(1, 256));
  app.add_flag("-v,--verbose", cfg.verbosity, "more detail on stderr");

  auto poly = [&](CLI::App* s) { s->add_option("--poly", cfg.poly, "polynomial file")->required(); };
  auto outopt = [&](CLI::App* s) { s->add_option("--out", cfg.out, "report path (.csv or .json)"); };
  auto budget = [&](CLI::App* s) { s->add_option("--budget", cfg.budget, "work budget")->check(CLI::PositiveNumber); };
  auto crad = [&](CLI::App* s) {
    s->add_option("--cradius", cfg.c_radius, "weight radius c")->check(CLI::Range(1e-6, 1e6));
  };

  auto* dec = app.add_subcommand("decompose", "invariants and diagonalizations");
  poly(dec);
  outopt(dec);

  auto* exps = app.add_subcommand("expsum", "one complete exponential sum");
  poly(exps);
  exps->add_option("--q", cfg.q, "modulus")->required();
  exps->add_option("--c", cfg.c, "dual vector, comma separated")->delimiter(',');
  exps->add_option("--method", cfg.method, "auto|naive|diagonal|direct|crt|goodprime");
  budget(exps);
  outopt(exps);

  auto* sums = app.add_subcommand("sums", "partial sums against the lemma shapes");
  poly(sums);
  sums->add_option("--c", cfg.c, "dual vector, comma separated")->delimiter(',');
  sums->add_option("--xmax", cfg.xmax, "largest q");
  sums->add_option("--case", cfg.lemma, "auto|avg1_part1|avg1_part2|avg2_part1|avg2_part2|avg3|avg4");
  budget(sums);
  outopt(sums);

  auto* sig = app.add_subcommand("sigma", "singular integral");
  poly(sig);
  sig->add_option("--mode", cfg.mode, "sgn|centered");
  crad(sig);
  sig->add_option("--theta-max", cfg.theta_max, "largest theta cutoff")->check(CLI::PositiveNumber);
  budget(sig);
  outopt(sig);

  auto* loc = app.add_subcommand("local", "p-adic densities and solubility");
  poly(loc);
  loc->add_option("--pmax", cfg.pmax, "largest prime");
  budget(loc);
  outopt(loc);

  for (const char* name : {"count", "predict", "compare"}) {
    auto* s = app.add_subcommand(name, std::string(name) == "count"     ? "weighted brute-force count"
                                       : std::string(name) == "predict" ? "main term and error envelope"
                                                                        : "count against prediction");
    poly(s);
    s->add_option("--P", cfg.Ps, "box scales, comma separated")->delimiter(',')->required();
    s->add_option("--mode", cfg.mode, "t1|t2");
    crad(s);
    budget(s);
    outopt(s);
    if (std::string(name) != "count") {
      s->add_option("--prime-cutoff", cfg.prime_cutoff, "Euler product cutoff")->check(CLI::Range(2, 100000));
      s->add_option("--theta-max", cfg.theta_max, "largest theta cutoff")->check(CLI::PositiveNumber);
      s->add_option("--eta", cfg.eta, "hypothesis exponent slack")->check(CLI::Range(1e-9, 0.5));
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  cfg.subcommand = app.get_subcommands().front()->get_name();
  if (cfg.verbosity > 0) err << "subcommand " << cfg.subcommand << ", threads " << cfg.threads << '\n';
  if (cfg.subcommand == "decompose") cmd_decompose(cfg, out);
  else if (cfg.subcommand == "expsum") cmd_expsum(cfg, out);
  else if (cfg.subcommand == "sums") cmd_sums(cfg, out);
  else if (cfg.subcommand == "sigma") cmd_sigma(cfg, out);
  else if (cfg.subcommand == "local") cmd_local(cfg, out, err);
  else if (cfg.subcommand == "count") cmd_count(cfg, out);
  else if (cfg.subcommand == "predict") cmd_predict(cfg, out);
  else cmd_compare(cfg, out, err);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config cfg;
  try {
    return dispatch(cfg, args, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_budget() ? 3 : 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace quadcount
