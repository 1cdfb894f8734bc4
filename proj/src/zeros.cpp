#include "zetarule/zeros.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "parallel.hpp"

namespace zetarule {

namespace {

struct ZPoint {
  Real z;
  Real dz;
  Complex zeta;
  Complex zeta_prime;
};

ZPoint evaluate_z(const Real& t, const ZetaEngine& engine) {
  const Precision wb = engine.context().working_bits();
  const Complex s(Real(0.5, wb), Real(t, wb));
  Complex zp;
  Complex zv = engine.zeta_em(s, engine.plan_for(s, true), &zp);
  const Complex rot = Complex::polar(Real(1L, wb), engine.riemann_siegel_theta(t));
  Real z = (rot * zv).re();
  Real dz = engine.hardy_z_deriv(t, zv, zp);
  return {std::move(z), std::move(dz), std::move(zv), std::move(zp)};
}

struct Bracket {
  Real lo, hi, z_lo, z_hi;
};

bool opposite(const Real& a, const Real& b) { return (a.sign() < 0) != (b.sign() < 0); }

// Illinois-modified regula falsi; the bracket always contains the sign change.
Real refine_bracket(Bracket b, const ZetaEngine& engine) {
  const NumericContext& ctx = engine.context();
  const Precision wb = ctx.working_bits();
  Real lo(b.lo, wb), hi(b.hi, wb), flo(b.z_lo, wb), fhi(b.z_hi, wb);
  const Real& tol = ctx.target_tol();
  int side = 0;
  int slow = 0;
  Real width = hi - lo;
  for (int iter = 0; iter < 400 && hi - lo > tol; ++iter) {
    Real c = (lo * fhi - hi * flo) / (fhi - flo);
    if (slow >= 2 || !(c > lo) || !(c < hi)) {
      c = ldexp(lo + hi, -1);
      slow = 0;
    }
    Real fc = engine.hardy_z(c);
    if (fc.is_zero()) return c;
    if (opposite(fc, flo)) {
      hi = c;
      fhi = fc;
      if (side == 1) flo = ldexp(flo, -1);
      side = 1;
    } else {
      lo = c;
      flo = fc;
      if (side == -1) fhi = ldexp(fhi, -1);
      side = -1;
    }
    const Real w = hi - lo;
    slow = (w > width * 0.5) ? slow + 1 : 0;
    width = w;
  }
  return abs(flo) < abs(fhi) ? lo : hi;
}

// Sign-change brackets of Z on t0, t0 + h, ... until `count` are found or
// t passes `t_limit` (when positive).
std::vector<Bracket> scan_brackets(long count, double start, double step, const ZetaEngine& engine,
                                   int jobs) {
  const Precision wb = engine.context().working_bits();
  const Real t0(start, wb);
  const Real h(step, wb);
  std::vector<Bracket> out;
  constexpr size_t kBlock = 64;
  Real t_prev = t0;
  Real z_prev = engine.hardy_z(t0);
  long grid_index = 1;
  while (static_cast<long>(out.size()) < count) {
    std::vector<Real> ts, zs(kBlock);
    for (size_t i = 0; i < kBlock; ++i) ts.push_back(t0 + h * Real(grid_index + static_cast<long>(i), wb));
    detail::parallel_for(kBlock, jobs, [&](size_t i) { zs[i] = engine.hardy_z(ts[i]); });
    grid_index += kBlock;
    for (size_t i = 0; i < kBlock && static_cast<long>(out.size()) < count; ++i) {
      if (zs[i].is_zero()) {
        // A grid point landed on the zero itself; widen by a hair.
        const Real eps = engine.context().target_tol();
        out.push_back({ts[i] - eps, ts[i] + eps, engine.hardy_z(ts[i] - eps), engine.hardy_z(ts[i] + eps)});
      } else if (!z_prev.is_zero() && opposite(z_prev, zs[i])) {
        out.push_back({t_prev, ts[i], z_prev, zs[i]});
      }
      t_prev = ts[i];
      z_prev = zs[i];
    }
  }
  return out;
}

ZeroStore refine_all(const std::vector<Bracket>& brackets, long count, const ZetaEngine& engine, int jobs) {
  std::vector<ZeroRecord> records(static_cast<size_t>(count));
  detail::parallel_for(static_cast<size_t>(count), jobs, [&](size_t i) {
    const Real tau = refine_bracket(brackets[i], engine);
    records[i] = make_zero_record(static_cast<long>(i) + 1, tau, engine);
  });
  return ZeroStore(std::move(records), ZeroSource::computed, engine.context().precision_bits());
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int digits_for(int precision_bits) { return static_cast<int>(precision_bits / 3.32) + 2; }

}  // namespace

ZeroStore::ZeroStore(std::vector<ZeroRecord> records, ZeroSource source, int generated_with)
    : records_(std::move(records)), source_(source), generated_with_(generated_with) {
  for (size_t i = 0; i < records_.size(); ++i) {
    if (records_[i].index != static_cast<long>(i) + 1) {
      throw ConsistencyError("zero indices must be contiguous from 1");
    }
    if (i > 0 && !(records_[i].tau > records_[i - 1].tau)) {
      throw ConsistencyError("zero ordinates must be strictly increasing (index " +
                             std::to_string(records_[i].index) + ")");
    }
  }
  if (!records_.empty() && !(records_.front().tau > 14.0)) {
    throw ConsistencyError("first zero must lie above t = 14");
  }
}

CountCheck count_check(const ZeroStore& store, const ZetaEngine& engine) {
  CountCheck result;
  const Real& pi = engine.context().pi();
  for (const ZeroRecord& r : store.records()) {
    const long expected = round_nearest(engine.riemann_siegel_theta(r.tau) / pi + 1L).to_long();
    const long dev = std::labs(r.index - expected);
    result.max_deviation = std::max(result.max_deviation, dev);
    if (dev > 1 && result.ok) {
      result.ok = false;
      result.first_bad_index = r.index;
      result.expected = expected;
    }
  }
  return result;
}

ZeroRecord make_zero_record(long index, const Real& tau, const ZetaEngine& engine) {
  const NumericContext& ctx = engine.context();
  const Real tau_p(tau, ctx.precision_bits());
  const ZPoint p = evaluate_z(tau_p, engine);
  if (abs(p.zeta_prime) < kSimplicityThreshold) {
    throw SimplicityError("zeta'(rho) vanishes to 1e-15 at tau = " + tau_p.to_string(30) +
                          "; the zero is not simple");
  }
  Real step = abs(p.z / p.dz);
  const Real floor = ldexp(Real(1L, ctx.working_bits()), -ctx.precision_bits());
  ZeroRecord r;
  r.index = index;
  r.tau = tau_p;
  r.err_bound = max(step, floor);
  r.zeta_prime = p.zeta_prime;
  r.precision_bits = ctx.precision_bits();
  return r;
}

ZeroStore locate_zeros(long count, const ZetaEngine& engine, const LocateOptions& opts) {
  if (count < 1 || count > 2000) throw ParameterError("zero count must be in [1, 2000]");
  auto brackets = scan_brackets(count, opts.scan_start, opts.scan_step, engine, opts.jobs);
  ZeroStore store = refine_all(brackets, count, engine, opts.jobs);
  CountCheck check = count_check(store, engine);
  if (check.ok) return store;

  brackets = scan_brackets(count, opts.scan_start, opts.fine_step, engine, opts.jobs);
  store = refine_all(brackets, count, engine, opts.jobs);
  check = count_check(store, engine);
  if (check.ok) return store;

  const long k = check.first_bad_index;
  const Real lo = k > 1 ? store.zero(k - 1).tau : Real(opts.scan_start, engine.context().working_bits());
  const Real& hi = store.zero(k).tau;
  throw MissedZeroError("zero count check failed at index " + std::to_string(k) + " (expected " +
                            std::to_string(check.expected) + "); suspect interval (" + lo.to_fixed(15) +
                            ", " + hi.to_fixed(15) + ")",
                        lo, hi);
}

std::string zeros_checksum(const std::vector<std::string>& data_lines) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const std::string& line : data_lines) {
    for (unsigned char c : line + "\n") {
      h ^= c;
      h *= 1099511628211ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_zeros(const ZeroStore& store) {
  const int bits = store.generated_with();
  std::vector<std::string> lines;
  lines.reserve(store.size());
  for (const ZeroRecord& r : store.records()) lines.push_back(r.tau.to_fixed(digits_for(bits)));
  std::ostringstream out;
  out << "# precision_bits=" << bits << " checksum=" << zeros_checksum(lines) << "\n";
  for (const std::string& l : lines) out << l << "\n";
  return out.str();
}

void export_zeros(const ZeroStore& store, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write zeros file " + path.string());
  f << format_zeros(store);
  if (!f) throw Error("write failed for zeros file " + path.string());
}

ZeroStore parse_zeros(const std::string& text, const ZetaEngine& engine, bool refine) {
  const NumericContext& ctx = engine.context();
  const Precision p = ctx.precision_bits();
  std::istringstream in(text);
  std::string raw;
  long line_no = 0;
  long header_line = 0;
  std::string header_checksum;
  std::vector<std::string> data;
  std::vector<std::pair<long, Real>> taus;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto pos = line.find("checksum=");
      if (pos != std::string::npos && header_line == 0) {
        header_line = line_no;
        header_checksum = trim(line.substr(pos + 9));
      }
      continue;
    }
    Real tau(p);
    try {
      tau = Real(line, p);
    } catch (const std::invalid_argument&) {
      throw ZeroFileError("not a decimal ordinate: '" + line + "'", line_no);
    }
    if (!taus.empty() && !(tau > taus.back().second)) {
      throw ZeroFileError("ordinates are not strictly increasing", line_no);
    }
    data.push_back(line);
    taus.emplace_back(line_no, std::move(tau));
  }
  if (header_line != 0 && zeros_checksum(data) != header_checksum) {
    throw ZeroFileError("checksum mismatch", header_line);
  }
  if (taus.empty()) throw ZeroFileError("no ordinates found", line_no);

  std::vector<ZeroRecord> records(taus.size());
  const Real reject(1e-6, ctx.working_bits());
  std::vector<std::string> failures(taus.size());
  detail::parallel_for(taus.size(), 1, [&](size_t i) {
    Real tau = taus[i].second;
    if (refine) {
      for (int it = 0; it < 30; ++it) {
        const ZPoint pt = evaluate_z(tau, engine);
        const Real step = pt.z / pt.dz;
        if (it == 0 && abs(step) > reject) break;
        tau = Real(tau - step, p);
        if (abs(step) < ctx.target_tol()) break;
      }
    }
    ZeroRecord r = make_zero_record(static_cast<long>(i) + 1, tau, engine);
    if (r.err_bound > reject) {
      throw ZeroFileError("ordinate " + taus[i].second.to_fixed(20) +
                              " is not a zero (|zeta(1/2+i tau)| too large)",
                          taus[i].first);
    }
    records[i] = std::move(r);
  });
  return ZeroStore(std::move(records), ZeroSource::imported, ctx.precision_bits());
}

ZeroStore import_zeros(const std::filesystem::path& path, const ZetaEngine& engine, bool refine) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error("cannot read zeros file " + path.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_zeros(buf.str(), engine, refine);
}

ZerosCache::ZerosCache(std::filesystem::path dir, WarningSink warn)
    : dir_(std::move(dir)), warn_(std::move(warn)) {
  if (!warn_) warn_ = [](const std::string& msg) { std::cerr << "warning: " << msg << "\n"; };
}

std::filesystem::path ZerosCache::entry_path(long count, int precision_bits) const {
  return dir_ / ("zeros_n" + std::to_string(count) + "_p" + std::to_string(precision_bits) + ".txt");
}

std::optional<ZeroStore> ZerosCache::load(long count, const ZetaEngine& engine) const {
  const auto path = entry_path(count, engine.context().precision_bits());
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  std::ifstream f(path, std::ios::binary);
  std::string first;
  std::getline(f, first);
  const std::string expected_prefix =
      "# precision_bits=" + std::to_string(engine.context().precision_bits()) + " checksum=";
  if (first.rfind(expected_prefix, 0) != 0) {
    warn_("cache entry " + path.string() + " has a bad header; recomputing");
    return std::nullopt;
  }
  try {
    ZeroStore store = import_zeros(path, engine, false);
    if (static_cast<long>(store.size()) != count) {
      warn_("cache entry " + path.string() + " has the wrong number of zeros; recomputing");
      return std::nullopt;
    }
    return ZeroStore(std::vector<ZeroRecord>(store.records()), ZeroSource::computed, store.generated_with());
  } catch (const Error& e) {
    warn_("cache entry " + path.string() + " ignored (" + e.what() + "); recomputing");
    return std::nullopt;
  }
}

void ZerosCache::store(const ZeroStore& zeros) const {
  std::filesystem::create_directories(dir_);
  const auto path = entry_path(static_cast<long>(zeros.size()), zeros.generated_with());
  std::random_device rd;
  const auto tmp = path.string() + ".tmp" + std::to_string(rd());
  export_zeros(zeros, tmp);
  std::filesystem::rename(tmp, path);
}

ZeroStore ZerosCache::get_or_locate(long count, const ZetaEngine& engine, const LocateOptions& opts,
                                    bool* hit) const {
  if (auto cached = load(count, engine)) {
    if (hit != nullptr) *hit = true;
    return std::move(*cached);
  }
  if (hit != nullptr) *hit = false;
  ZeroStore located = locate_zeros(count, engine, opts);
  store(located);
  return located;
}

}  // namespace zetarule
