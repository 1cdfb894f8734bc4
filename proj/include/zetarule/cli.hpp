#pragma once

// Command-line front end. `run` is the whole program minus process setup so
// tests can drive it in-process.

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "zetarule/sumrule.hpp"

namespace zetarule::cli {

enum ExitCode : int { kPass = 0, kCriterionFailed = 1, kError = 2 };

enum class Format { text, csv, json };

struct RunConfig {
  int precision_bits = NumericContext::kDefaultBits;
  std::filesystem::path cache_dir;
  long zeros_count = 100;
  std::string a = "0.5";
  std::string x = "0.5";
  std::vector<std::string> a_list;
  std::vector<std::string> x_list;
  std::vector<long> zeros_list;
  long n_trivial = 80;
  long n_halfint = 12;
  long lambda_limit = 1'000'000;
  Format format = Format::text;
  std::optional<std::filesystem::path> zeros_file;
  int jobs = 1;
  bool timing = false;
};

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Cache directory when neither flag, environment nor config names one.
std::filesystem::path default_cache_dir();

std::string format_real(const Real& v, int precision_bits);
std::string format_report(const EvaluationReport& r, Format f, int precision_bits);

struct ScanRow {
  EvaluationReport report;
  std::string status;  ///< "pass", "fail" or "error: ..."
};

/// Rows in a-major, then x, then zero-count order.
std::vector<ScanRow> run_scan(const RunConfig& cfg, const ZeroStore& store, const ZetaEngine& engine);
std::string format_scan(const std::vector<ScanRow>& rows, Format f, int precision_bits);
/// gnuplot script plotting |residual| against zeros_used from a CSV scan.
std::string plot_script(const std::filesystem::path& csv_path, const std::vector<ScanRow>& rows);

struct SelftestHooks {
  /// Stand-in for the closed form of zeta'(-2n); lets tests inject a fault.
  std::function<Real(const ZetaEngine&, int)> zeta_deriv_neg_even;
};

struct CheckResult {
  std::string name;
  bool ok = false;
  std::string detail;
};

/// Reduced-scale invariant suite; stops at the first failing check.
std::vector<CheckResult> run_selftest(const NumericContext& ctx, std::ostream& log, const SelftestHooks& hooks = {});

}  // namespace zetarule::cli
