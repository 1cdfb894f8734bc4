#include "zetarule/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "parallel.hpp"

namespace zetarule::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

const char* const kScanColumns[] = {"a",        "x",          "lhs",        "rhs_const", "rhs_n_series", "rhs_k_series",
                                    "residual", "tail_bound", "zeros_used", "wall_time_ms", "status"};

std::string status_of(const EvaluationReport& r) { return r.passed ? "pass" : "fail"; }

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

ordered_json report_json(const EvaluationReport& r, int bits) {
  ordered_json j;
  j["kind"] = r.kind;
  j["a"] = format_real(r.a, bits);
  j["x"] = format_real(r.x, bits);
  j["lhs_zero_sum"] = format_real(r.lhs_zero_sum, bits);
  j["rhs_const"] = format_real(r.rhs_const, bits);
  j["rhs_n_series"] = format_real(r.rhs_n_series, bits);
  j["rhs_k_series"] = format_real(r.rhs_k_series, bits);
  j["residual"] = format_real(r.residual, bits);
  j["tail_bound"] = format_real(r.tail_bound, bits);
  j["zeros_used"] = r.zeros_used;
  j["wall_time_ms"] = r.wall_time_ms;
  j["passed"] = r.passed;
  j["criterion"] = r.criterion;
  j["normalization"] = r.normalization;
  j["notes"] = r.notes;
  ordered_json extras = ordered_json::object();
  for (const auto& [k, v] : r.extras) extras[k] = format_real(v, bits);
  j["extras"] = extras;
  return j;
}

std::vector<std::string> csv_fields(const EvaluationReport& r, const std::string& status, int bits, bool have_values) {
  if (!have_values) {
    return {format_real(r.a, bits), format_real(r.x, bits), "", "", "", "", "", "", std::to_string(r.zeros_used), "0",
            status};
  }
  return {format_real(r.a, bits),        format_real(r.x, bits),           format_real(r.lhs_zero_sum, bits),
          format_real(r.rhs_const, bits), format_real(r.rhs_n_series, bits), format_real(r.rhs_k_series, bits),
          format_real(r.residual, bits),  format_real(r.tail_bound, bits),  std::to_string(r.zeros_used),
          std::to_string(r.wall_time_ms), status};
}

void write_csv_row(std::ostream& o, const std::vector<std::string>& fields) {
  for (size_t i = 0; i < fields.size(); ++i) o << (i ? "," : "") << csv_escape(fields[i]);
  o << "\n";
}

void write_csv_header(std::ostream& o) {
  bool first = true;
  for (const char* c : kScanColumns) {
    o << (first ? "" : ",") << c;
    first = false;
  }
  o << "\n";
}

ZeroStore obtain_zeros(const RunConfig& cfg, long needed, const ZetaEngine& engine, std::ostream& err) {
  if (cfg.zeros_file) {
    ZeroStore st = import_zeros(*cfg.zeros_file, engine, true);
    if (static_cast<long>(st.size()) < needed) {
      throw ParameterError("zeros file holds " + std::to_string(st.size()) + " zeros, " + std::to_string(needed) +
                           " needed");
    }
    return st;
  }
  ZerosCache cache(cfg.cache_dir, [&err](const std::string& m) { err << "warning: " << m << "\n"; });
  LocateOptions opts;
  opts.jobs = cfg.jobs;
  return cache.get_or_locate(needed, engine, opts);
}

SumRuleParams params_from(const RunConfig& cfg, const std::string& a, const std::string& x, long n_zeros,
                          const NumericContext& ctx) {
  SumRuleParams p = SumRuleParams::make(a, x, ctx);
  p.n_zeros = n_zeros;
  p.n_trivial = cfg.n_trivial;
  p.n_halfint = cfg.n_halfint;
  p.validate();
  return p;
}

EvaluationReport residues_report(const SumRuleParams& p, const ZeroStore& store, const ZetaEngine& engine, int jobs) {
  const Precision wb = engine.context().working_bits();
  const auto start = std::chrono::steady_clock::now();
  const auto rows = arbitrate_residues(p, store, engine, 10, 4, std::min<long>(10, p.n_zeros), jobs);
  Real worst(wb);
  Real worst_printed(wb);
  for (const auto& row : rows) {
    worst = max(worst, row.rel_error);
    if (row.printed_rel_error) worst_printed = max(worst_printed, *row.printed_rel_error);
  }
  ClosureOptions opts;
  opts.jobs = jobs;
  const ClosureReport c = verify_residue_theorem(p, store, engine, opts);

  EvaluationReport r;
  r.kind = "residues";
  r.a = Real(p.a, wb);
  r.x = Real(p.x, wb);
  const long o = c.orientation;
  // Zero family on the left, integral and real-axis families on the right:
  // orientation * Z = I - orientation * (T + H).
  r.lhs_zero_sum = (c.families[0].sum * o).re();
  r.rhs_const = c.integral.re();
  r.rhs_n_series = -(c.families[1].sum * o).re();
  r.rhs_k_series = -(c.families[2].sum * o).re();
  r.residual = r.lhs_zero_sum - (r.rhs_const + r.rhs_n_series + r.rhs_k_series);
  r.tail_bound = c.combined_tail;
  r.zeros_used = p.n_zeros;
  r.passed = c.passed && worst <= 1e-12;
  r.criterion =
      "numeric residues match the derived residues to relative 1e-12 (n <= 10, k <= 4, zeros <= 10) and "
      "|integral - orientation * sum of residues| <= 10 * combined tails";
  r.normalization = "integral = orientation * sum of right half-plane residues";
  r.notes.push_back("orientation sign determined numerically: " + std::to_string(c.orientation));
  r.notes.push_back("lhs_zero_sum = orientation * critical-zero residues; rhs_const = integral; "
                    "rhs_n_series/rhs_k_series = -orientation * trivial-zero/half-integer residues");
  r.extras = {{"orientation", Real(static_cast<long>(c.orientation), wb)},
              {"closure_residual", c.residual},
              {"normalization_factor", c.normalization_factor},
              {"expected_normalization_factor", 2L * sqrt(r.a) / sqrt(sqrt(r.x))},
              {"max_residue_rel_error", worst},
              {"max_printed_vs_derived_rel_error", worst_printed},
              {"residues_checked", Real(static_cast<long>(rows.size()), wb)}};
  r.wall_time_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  return r;
}

int cmd_zeros(const RunConfig& cfg, long count, const std::string& export_path, const std::string& import_path,
              std::ostream& out, std::ostream& err) {
  const NumericContext ctx(cfg.precision_bits);
  const ZetaEngine engine(ctx);
  ZeroStore store;
  std::string origin;
  if (!import_path.empty()) {
    store = import_zeros(import_path, engine, true);
    origin = "imported from " + import_path;
  } else {
    ZerosCache cache(cfg.cache_dir, [&err](const std::string& m) { err << "warning: " << m << "\n"; });
    LocateOptions opts;
    opts.jobs = cfg.jobs;
    bool hit = false;
    store = cache.get_or_locate(count, engine, opts, &hit);
    origin = hit ? "cache hit (" + cache.entry_path(count, ctx.precision_bits()).string() + ")"
                 : "computed and cached (" + cache.entry_path(count, ctx.precision_bits()).string() + ")";
  }
  const CountCheck check = count_check(store, engine);
  out << "zeros: " << store.size() << " at " << ctx.precision_bits() << " bits, " << origin << "\n";
  out << "tau_1 = " << store.zero(1).tau.to_fixed(40) << "\n";
  out << "tau_" << store.size() << " = " << store.zero(static_cast<long>(store.size())).tau.to_fixed(40) << "\n";
  out << "count check: " << (check.ok ? "ok" : "FAILED") << " (max deviation " << check.max_deviation << ")\n";
  if (!export_path.empty()) {
    export_zeros(store, export_path);
    out << "exported to " << export_path << "\n";
  }
  return check.ok ? kPass : kCriterionFailed;
}

int cmd_verify(const RunConfig& cfg, const std::string& kind, std::ostream& out, std::ostream& err) {
  const NumericContext ctx(cfg.precision_bits);
  const ZetaEngine engine(ctx);
  EvaluationReport report;
  if (kind == "integral") {
    report = evaluate_integral(params_from(cfg, cfg.a, cfg.x, cfg.zeros_count, ctx), engine, cfg.jobs);
  } else if (kind == "sumrule") {
    const SumRuleParams p = params_from(cfg, cfg.a, cfg.x, cfg.zeros_count, ctx);
    report = evaluate_sumrule(p, obtain_zeros(cfg, cfg.zeros_count, engine, err), engine);
  } else if (kind == "residues") {
    const SumRuleParams p = params_from(cfg, cfg.a, cfg.x, cfg.zeros_count, ctx);
    report = residues_report(p, obtain_zeros(cfg, cfg.zeros_count, engine, err), engine, cfg.jobs);
  } else if (kind == "rh-form") {
    const SumRuleParams p = params_from(cfg, "0.5", cfg.x, cfg.zeros_count, ctx);
    report = evaluate_rh_form(p.x, obtain_zeros(cfg, cfg.zeros_count, engine, err), engine, cfg.zeros_count,
                              cfg.n_trivial, cfg.n_halfint);
  } else {
    const SumRuleParams p = params_from(cfg, "0.5", cfg.x, cfg.zeros_count, ctx);
    const MangoldtTable table = mangoldt_sieve(cfg.lambda_limit);
    report = evaluate_guillera(p.x, obtain_zeros(cfg, cfg.zeros_count, engine, err), table, engine, cfg.zeros_count);
  }
  if (!cfg.timing) report.wall_time_ms = 0;
  out << format_report(report, cfg.format, ctx.precision_bits());
  return report.passed ? kPass : kCriterionFailed;
}

int cmd_scan(RunConfig cfg, const std::string& out_path, const std::string& plot_path, std::ostream& out,
             std::ostream& err) {
  if (cfg.a_list.empty()) cfg.a_list = {cfg.a};
  if (cfg.x_list.empty()) cfg.x_list = {cfg.x};
  if (cfg.zeros_list.empty()) cfg.zeros_list = {cfg.zeros_count};
  const NumericContext ctx(cfg.precision_bits);
  // Every grid point must be a valid parameter pair before anything runs.
  for (const auto& a : cfg.a_list) {
    for (const auto& x : cfg.x_list) {
      for (long nz : cfg.zeros_list) params_from(cfg, a, x, nz, ctx);
    }
  }
  const ZetaEngine engine(ctx);
  const long needed = *std::max_element(cfg.zeros_list.begin(), cfg.zeros_list.end());
  const ZeroStore store = obtain_zeros(cfg, needed, engine, err);
  const auto rows = run_scan(cfg, store, engine);
  const std::string text = format_scan(rows, cfg.format, ctx.precision_bits());
  if (out_path.empty()) {
    out << text;
  } else {
    std::ofstream f(out_path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + out_path);
    f << text;
  }
  if (!plot_path.empty()) {
    std::ofstream f(plot_path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + plot_path);
    f << plot_script(out_path.empty() ? std::filesystem::path("scan.csv") : std::filesystem::path(out_path), rows);
  }
  for (const auto& r : rows) {
    if (r.status != "pass") return kCriterionFailed;
  }
  return kPass;
}

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  return Format::text;
}

}  // namespace

namespace {

// printf %g style: plain decimals for moderate exponents, trailing zeros dropped.
std::string general_form(const Real& r, int digits) {
  char* buf = nullptr;
  if (mpfr_asprintf(&buf, "%.*RNg", digits, r.raw()) < 0) return r.to_string(digits);
  std::string s(buf);
  mpfr_free_str(buf);
  return s;
}

}  // namespace

std::filesystem::path default_cache_dir() {
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg != nullptr && *xdg != '\0') {
    return std::filesystem::path(xdg) / "zetarule";
  }
  if (const char* home = std::getenv("HOME"); home != nullptr && *home != '\0') {
    return std::filesystem::path(home) / ".cache" / "zetarule";
  }
  return ".zetarule-cache";
}

std::string format_real(const Real& v, int precision_bits) {
  // Shortest decimal that reads back to the same precision_bits value.
  const Real r(v, precision_bits);
  if (r.is_zero() || !r.is_finite()) return r.to_string();
  const int max_digits = static_cast<int>(precision_bits * 0.30103) + 3;
  for (int d = 1; d < max_digits; ++d) {
    std::string s = general_form(r, d);
    if (Real(s, precision_bits) == r) return s;
  }
  return r.to_string();
}

std::string format_report(const EvaluationReport& r, Format f, int bits) {
  std::ostringstream o;
  switch (f) {
    case Format::json:
      o << report_json(r, bits).dump(2) << "\n";
      break;
    case Format::csv:
      write_csv_header(o);
      write_csv_row(o, csv_fields(r, status_of(r), bits, true));
      break;
    case Format::text: {
      auto line = [&o](const std::string& k, const std::string& v) {
        o << std::left << std::setw(16) << k << ' ' << v << "\n";
      };
      line("kind", r.kind);
      line("a", format_real(r.a, bits));
      line("x", format_real(r.x, bits));
      line("lhs_zero_sum", general_form(Real(r.lhs_zero_sum, bits), 30));
      line("rhs_const", general_form(Real(r.rhs_const, bits), 30));
      line("rhs_n_series", general_form(Real(r.rhs_n_series, bits), 30));
      line("rhs_k_series", general_form(Real(r.rhs_k_series, bits), 30));
      line("residual", general_form(Real(r.residual, bits), 10));
      line("tail_bound", general_form(Real(r.tail_bound, bits), 10));
      line("zeros_used", std::to_string(r.zeros_used));
      line("wall_time_ms", std::to_string(r.wall_time_ms));
      if (!r.normalization.empty()) line("normalization", r.normalization);
      for (const auto& n : r.notes) line("note", n);
      for (const auto& [k, v] : r.extras) line(k, general_form(Real(v, bits), 20));
      line("criterion", r.criterion);
      line("result", r.passed ? "PASS" : "FAIL");
      break;
    }
  }
  return o.str();
}

std::vector<ScanRow> run_scan(const RunConfig& cfg, const ZeroStore& store, const ZetaEngine& engine) {
  struct Point {
    std::string a, x;
    long n_zeros;
  };
  std::vector<Point> points;
  for (const auto& a : cfg.a_list) {
    for (const auto& x : cfg.x_list) {
      for (long nz : cfg.zeros_list) points.push_back({a, x, nz});
    }
  }
  const NumericContext& ctx = engine.context();
  std::vector<ScanRow> rows(points.size());
  detail::parallel_for(points.size(), cfg.jobs, [&](size_t i) {
    const Point& pt = points[i];
    const SumRuleParams p = params_from(cfg, pt.a, pt.x, pt.n_zeros, ctx);
    ScanRow row;
    try {
      row.report = evaluate_sumrule(p, store, engine);
      row.status = status_of(row.report);
    } catch (const std::exception& e) {
      row.report.kind = "sumrule";
      row.report.a = p.a;
      row.report.x = p.x;
      row.report.zeros_used = p.n_zeros;
      row.status = std::string("error: ") + e.what();
    }
    if (!cfg.timing) row.report.wall_time_ms = 0;
    rows[i] = std::move(row);
  });
  return rows;
}

std::string format_scan(const std::vector<ScanRow>& rows, Format f, int bits) {
  std::ostringstream o;
  switch (f) {
    case Format::json: {
      ordered_json arr = ordered_json::array();
      for (const auto& r : rows) {
        ordered_json j;
        if (r.status.rfind("error", 0) == 0) {
          j["kind"] = r.report.kind;
          j["a"] = format_real(r.report.a, bits);
          j["x"] = format_real(r.report.x, bits);
          j["zeros_used"] = r.report.zeros_used;
        } else {
          j = report_json(r.report, bits);
        }
        j["status"] = r.status;
        arr.push_back(std::move(j));
      }
      o << arr.dump(2) << "\n";
      break;
    }
    case Format::csv:
      write_csv_header(o);
      for (const auto& r : rows) {
        write_csv_row(o, csv_fields(r.report, r.status, bits, r.status.rfind("error", 0) != 0));
      }
      break;
    case Format::text:
      o << std::left << std::setw(8) << "a" << std::setw(8) << "x" << std::setw(8) << "zeros" << std::setw(16)
        << "residual" << std::setw(16) << "tail_bound"
        << "status\n";
      for (const auto& r : rows) {
        const bool err = r.status.rfind("error", 0) == 0;
        o << std::setw(8) << format_real(r.report.a, bits) << std::setw(8) << format_real(r.report.x, bits)
          << std::setw(8) << r.report.zeros_used << std::setw(16)
          << (err ? std::string("-") : general_form(Real(r.report.residual, bits), 6)) << std::setw(16)
          << (err ? std::string("-") : general_form(Real(r.report.tail_bound, bits), 6)) << r.status << "\n";
      }
      break;
  }
  return o.str();
}

std::string plot_script(const std::filesystem::path& csv_path, const std::vector<ScanRow>& rows) {
  std::set<std::pair<std::string, std::string>> series;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& r : rows) {
    auto key = std::make_pair(format_real(r.report.a, 53), format_real(r.report.x, 53));
    if (series.insert(key).second) order.push_back(key);
  }
  std::ostringstream o;
  o << "# gnuplot script: |residual| against the number of zeros summed\n";
  o << "set datafile separator ','\n";
  o << "set key autotitle columnhead\n";
  o << "set logscale y\n";
  o << "set format y '10^{%L}'\n";
  o << "set xlabel 'zeros used'\n";
  o << "set ylabel '|residual|'\n";
  o << "plot \\\n";
  for (size_t i = 0; i < order.size(); ++i) {
    const auto& [a, x] = order[i];
    o << "  '" << csv_path.string() << "' using (strcol(1) eq '" << a << "' && strcol(2) eq '" << x
      << "' ? column(9) : 1/0):(abs(column(7))) with linespoints title 'a=" << a << ", x=" << x << "'"
      << (i + 1 < order.size() ? ", \\\n" : "\n");
  }
  return o.str();
}

std::vector<CheckResult> run_selftest(const NumericContext& ctx, std::ostream& log, const SelftestHooks& hooks) {
  const ZetaEngine engine(ctx);
  const Precision wb = ctx.working_bits();
  const Real& tol = ctx.target_tol();
  std::vector<CheckResult> results;
  auto record = [&](std::string name, bool ok, std::string detail) {
    log << (ok ? "ok   " : "FAIL ") << name << "  " << detail << "\n";
    results.push_back({std::move(name), ok, std::move(detail)});
    return ok;
  };

  {
    const Real pi = ctx.pi();
    const Real e2 = abs(engine.zeta(Real(2L, wb)) - pi * pi / 6L);
    const Real e0 = abs(engine.zeta(Real(0L, wb)) + Real(0.5, wb));
    const Real e1 = abs(engine.zeta(Real(-1L, wb)) + Real(1L, wb) / 12L);
    const Real worst = max(e2, max(e0, e1));
    if (!record("zeta special values", worst <= tol * 10L, "max error " + worst.to_string(3))) return results;
  }
  {
    // Direct summation left of the line cancels large terms; run it at twice the precision.
    const ZetaEngine wide(ctx.doubled());
    Real worst(wb);
    const double pts[][2] = {{-2.5, 3.0}, {-0.7, 10.0}, {0.2, 0.1}, {-7.25, -4.5}, {-12.0, 1.0}};
    for (const auto& pt : pts) {
      const Complex s(pt[0], pt[1], wb);
      const Complex r = engine.zeta(s);
      const Complex d = wide.zeta_em(s, wide.plan_for(s, false));
      worst = max(worst, abs(r - d) / max(abs(d), Real(1L, wb)));
    }
    if (!record("functional equation", worst <= tol * 100L, "max relative gap " + worst.to_string(3))) return results;
  }
  {
    std::function<Real(const ZetaEngine&, int)> closed = hooks.zeta_deriv_neg_even;
    if (!closed) closed = [](const ZetaEngine& e, int n) { return e.zeta_deriv_neg_even(n); };
    Real worst(wb);
    for (int n = 1; n <= 5; ++n) {
      const Real c = closed(engine, n);
      const Real d = engine.zeta_deriv(Real(static_cast<long>(-2 * n), wb));
      worst = max(worst, abs(c - d) / abs(d));
    }
    const Real limit = max(Real(1e-25, wb), tol * 1000L);
    if (!record("zeta'(-2n) closed form", worst <= limit, "max relative gap " + worst.to_string(3))) return results;
  }
  std::optional<ZeroStore> store;
  {
    store = locate_zeros(10, engine);
    const CountCheck cc = count_check(*store, engine);
    const Real tau1(ctx.real("14.134725141734693790457251983562470270784257115699243175685567"));
    const Real d = abs(store->zero(1).tau - tau1);
    const bool ok = cc.ok && d <= max(Real(1e-50, wb), tol * 1000L);
    if (!record("zeros", ok, "count check " + std::string(cc.ok ? "ok" : "failed") + ", tau_1 gap " + d.to_string(3)))
      return results;
  }
  SumRuleParams p = SumRuleParams::make("0.5", "0.5", ctx);
  p.n_zeros = 10;
  {
    const EvaluationReport r = evaluate_integral(p, engine);
    if (!record("integral identity", r.passed, "relative error " + r.extra("relative_error")->to_string(3)))
      return results;
  }
  {
    const auto rows = arbitrate_residues(p, *store, engine, 3, 2, 3);
    Real worst(wb);
    for (const auto& row : rows) worst = max(worst, row.rel_error);
    if (!record("residue arbitration", worst <= 1e-12, "max relative error " + worst.to_string(3))) return results;
  }
  {
    const ClosureReport c = verify_residue_theorem(p, *store, engine);
    if (!record("contour closure", c.passed && c.orientation == -1,
                "residual " + c.residual.to_string(3) + ", tails " + c.combined_tail.to_string(3)))
      return results;
  }
  {
    const EvaluationReport r = evaluate_sumrule(p, *store, engine);
    record("sum rule", r.passed, "residual " + r.residual.to_string(3) + ", tail " + r.tail_bound.to_string(3));
  }
  return results;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"High-precision verification of a sum rule over the nontrivial zeta zeros", "zetarule"};
  app.set_config("--config", "", "Flat key=value configuration file");
  app.require_subcommand(1);

  RunConfig cfg;
  std::string format_name = "text";
  std::string cache_dir;
  std::string zeros_file;
  app.add_option("--precision", cfg.precision_bits, "Mantissa bits")->check(CLI::Range(64, 4096));
  app.add_option("--cache-dir", cache_dir, "Zeros cache directory")->envname("ZETARULE_CACHE_DIR");
  app.add_option("--zeros", cfg.zeros_count, "Zeros in the zero sum")->check(CLI::Range(1, 2000));
  app.add_option("--a", cfg.a, "Parameter a in (0, 40], a != 1");
  app.add_option("--x", cfg.x, "Parameter x in (0, 1)");
  app.add_option("--a-list", cfg.a_list, "Comma separated a values for scan")->delimiter(',');
  app.add_option("--x-list", cfg.x_list, "Comma separated x values for scan")->delimiter(',');
  app.add_option("--zeros-list", cfg.zeros_list, "Comma separated zero counts for scan")
      ->delimiter(',')
      ->check(CLI::Range(1, 2000));
  app.add_option("--n-trivial", cfg.n_trivial, "Trivial-zero series terms")->check(CLI::Range(1, 2000));
  app.add_option("--n-halfint", cfg.n_halfint, "Half-integer series terms")->check(CLI::Range(1, 200));
  app.add_option("--lambda-limit", cfg.lambda_limit, "Upper limit of the von Mangoldt sum")
      ->check(CLI::Range(2L, MangoldtTable::kMaxLimit));
  app.add_option("--format", format_name, "Output format")->check(CLI::IsMember({"text", "csv", "json"}));
  app.add_option("--zeros-file", zeros_file, "Use zeros from this table instead of the cache");
  app.add_option("--jobs", cfg.jobs, "Worker threads")->check(CLI::Range(1, 256));
  app.add_flag("--timing", cfg.timing, "Report wall-clock times (output is then not reproducible)");

  long count = 100;
  std::string export_path, import_path;
  auto* zeros = app.add_subcommand("zeros", "Locate, cache, import or export critical-line zeros");
  zeros->fallthrough();
  zeros->add_option("--count", count, "Number of zeros")->check(CLI::Range(1, 2000));
  zeros->add_option("--export", export_path, "Write the zeros table here");
  zeros->add_option("--import", import_path, "Read and check a zeros table");

  std::string kind;
  auto* verify = app.add_subcommand("verify", "Run one verification and print its report");
  verify->fallthrough();
  verify->add_option("kind", kind, "integral | residues | sumrule | rh-form | guillera")
      ->required()
      ->check(CLI::IsMember({"integral", "residues", "sumrule", "rh-form", "guillera"}));

  std::string out_path, plot_path;
  auto* scan = app.add_subcommand("scan", "Evaluate the sum rule over an a x x grid");
  scan->fallthrough();
  scan->add_option("--out", out_path, "Write the table here instead of stdout");
  scan->add_option("--plot-script", plot_path, "Also write a gnuplot script");

  auto* selftest = app.add_subcommand("selftest", "Reduced-scale invariant suite");
  selftest->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kError;
  }

  cfg.format = parse_format(format_name);
  cfg.cache_dir = cache_dir.empty() ? default_cache_dir() : std::filesystem::path(cache_dir);
  if (!zeros_file.empty()) cfg.zeros_file = zeros_file;

  try {
    if (zeros->parsed()) return cmd_zeros(cfg, count, export_path, import_path, out, err);
    if (verify->parsed()) return cmd_verify(cfg, kind, out, err);
    if (scan->parsed()) return cmd_scan(cfg, out_path, plot_path, out, err);
    if (selftest->parsed()) {
      const auto results = run_selftest(NumericContext(cfg.precision_bits), out);
      for (const auto& r : results) {
        if (!r.ok) return kCriterionFailed;
      }
      out << "selftest passed\n";
      return kPass;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}

}  // namespace zetarule::cli
