#pragma once

// Nontrivial zeros on the critical line: location by sign changes of Hardy's
// Z function, Riemann-von Mangoldt count checking, and a plain text table
// format shared by import/export and the on-disk cache.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "zetarule/errors.hpp"
#include "zetarule/numctx.hpp"
#include "zetarule/zeta.hpp"

namespace zetarule {

/// One zero rho = 1/2 + i tau.
struct ZeroRecord {
  long index = 0;  ///< 1-based, ascending in tau
  Real tau;
  Real err_bound;  ///< radius of the enclosure of tau
  Complex zeta_prime;
  int precision_bits = 0;

  Complex rho() const { return {Real(0.5, tau.precision()), tau}; }
};

enum class ZeroSource { computed, imported };

/// Thrown when the count check still fails after the fine rescan.
class MissedZeroError : public Error {
 public:
  MissedZeroError(const std::string& what, Real lo, Real hi)
      : Error(what), lo_(std::move(lo)), hi_(std::move(hi)) {}
  const Real& interval_lo() const { return lo_; }
  const Real& interval_hi() const { return hi_; }

 private:
  Real lo_, hi_;
};

/// |zeta'(rho)| below the simplicity threshold; the sum rule divides by it.
class SimplicityError : public Error {
 public:
  using Error::Error;
};

/// Malformed zeros table; `line()` is 1-based.
class ZeroFileError : public Error {
 public:
  ZeroFileError(const std::string& what, long line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

class ZeroStore {
 public:
  ZeroStore() = default;
  /// Validates contiguous indices from 1 and strictly increasing tau.
  ZeroStore(std::vector<ZeroRecord> records, ZeroSource source, int generated_with);

  const std::vector<ZeroRecord>& records() const { return records_; }
  size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  /// 1-based access.
  const ZeroRecord& zero(long index) const { return records_.at(static_cast<size_t>(index - 1)); }
  ZeroSource source() const { return source_; }
  int generated_with() const { return generated_with_; }

 private:
  std::vector<ZeroRecord> records_;
  ZeroSource source_ = ZeroSource::computed;
  int generated_with_ = 0;
};

/// Riemann-von Mangoldt consistency over every prefix: for each record k,
/// |k - round(theta(tau_k)/pi + 1)| <= 1.
struct CountCheck {
  bool ok = true;
  long first_bad_index = 0;  ///< 0 when ok
  long expected = 0;         ///< round(theta/pi + 1) at the first bad record
  long max_deviation = 0;
};

CountCheck count_check(const ZeroStore& store, const ZetaEngine& engine);

/// Smallest |zeta'(rho)| accepted before a zero is declared non-simple.
inline constexpr double kSimplicityThreshold = 1e-15;

/// Full record for a zero at `tau`: zeta'(rho), err_bound from one Newton
/// step of Z, simplicity check.
ZeroRecord make_zero_record(long index, const Real& tau, const ZetaEngine& engine);

struct LocateOptions {
  double scan_step = 0.25;
  double fine_step = 0.05;
  double scan_start = 10.0;
  int jobs = 1;
};

/// First `count` zeros (1 <= count <= 2000).
ZeroStore locate_zeros(long count, const ZetaEngine& engine, const LocateOptions& opts = {});

/// Text table: '#' comments, one decimal tau per line, ascending. When
/// `refine` is set each tau is polished by Newton iteration on Z first.
ZeroStore parse_zeros(const std::string& text, const ZetaEngine& engine, bool refine = false);
ZeroStore import_zeros(const std::filesystem::path& path, const ZetaEngine& engine, bool refine = false);

/// Header line "# precision_bits=<n> checksum=<hex>" followed by one tau per
/// line with precision_bits/3.32 + 2 significant digits.
std::string format_zeros(const ZeroStore& store);
void export_zeros(const ZeroStore& store, const std::filesystem::path& path);

/// FNV-1a 64 over the data lines (each terminated by '\n').
std::string zeros_checksum(const std::vector<std::string>& data_lines);

/// Stores keyed by (count, precision_bits) under a directory. Writes go to a
/// temporary file that is renamed into place.
class ZerosCache {
 public:
  using WarningSink = std::function<void(const std::string&)>;

  explicit ZerosCache(std::filesystem::path dir, WarningSink warn = {});

  std::filesystem::path entry_path(long count, int precision_bits) const;
  std::optional<ZeroStore> load(long count, const ZetaEngine& engine) const;
  void store(const ZeroStore& zeros) const;
  /// Cache hit or locate-and-store. `hit` reports which happened.
  ZeroStore get_or_locate(long count, const ZetaEngine& engine, const LocateOptions& opts = {},
                          bool* hit = nullptr) const;

 private:
  std::filesystem::path dir_;
  WarningSink warn_;
};

}  // namespace zetarule
