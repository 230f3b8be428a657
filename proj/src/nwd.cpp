#include "compsim/nwd.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "compsim/errors.hpp"

namespace compsim {

namespace {

double require_positive_n(const CountSnapshot& s) {
  if (s.normalizer_n == 0) throw DataError("snapshot normalizer N must be > 0");
  return static_cast<double>(s.normalizer_n);
}

}  // namespace

double g_singleton(const CountSnapshot& s, const std::string& x) {
  double n = require_positive_n(s);
  return static_cast<double>(s.singleton_count(x)) / n;
}

double g_doubleton(const CountSnapshot& s, const std::string& x,
                   const std::string& y) {
  double n = require_positive_n(s);
  return static_cast<double>(s.pair_count(x, y)) / n;
}

double web_code_length(const CountSnapshot& s, const std::string& x) {
  double g = g_singleton(s, x);
  if (g == 0.0) return std::numeric_limits<double>::infinity();
  return std::log2(1.0 / g);
}

double web_code_length(const CountSnapshot& s, const std::string& x,
                       const std::string& y) {
  double g = g_doubleton(s, x, y);
  if (g == 0.0) return std::numeric_limits<double>::infinity();
  return std::log2(1.0 / g);
}

NormalizationReport check_normalization(const CountSnapshot& s) {
  NormalizationReport r;
  if (s.singletons.empty() && s.doubletons.empty()) {
    r.sum = 0.0;
    r.residual = 1.0;
    r.degenerate = true;
    r.flagged = true;
    return r;
  }
  double n = require_positive_n(s);
  double sum = 0.0;
  for (const auto& [_, count] : s.singletons)
    sum += static_cast<double>(count) / n;
  for (const auto& [_, count] : s.doubletons)
    sum += static_cast<double>(count) / n;
  r.sum = sum;
  r.residual = std::abs(sum - 1.0);
  r.flagged = r.residual > NormalizationReport::kTolerance;
  return r;
}

NwdValue nwd(const CountSnapshot& s, const std::string& x,
             const std::string& y, const NwdOptions& opt) {
  std::uint64_t fx = s.singleton_count(x);
  std::uint64_t fy = s.singleton_count(y);
  std::uint64_t fxy = s.pair_count(x, y);

  NwdValue out;
  if (fx == 0 && fy == 0) {
    out.kind = NwdValue::Kind::kUndefined;
    return out;
  }
  if (fxy == 0) {
    out.kind = NwdValue::Kind::kInfinite;
    return out;
  }
  // f(x,y) > 0 with a zero singleton cannot come from consistent counts
  // (the joint event is a subset of each singleton event).
  if (fx == 0 || fy == 0)
    throw DataError("inconsistent counts for ('" + x + "', '" + y +
                    "'): f(x,y) > 0 but a singleton count is 0");
  if (s.normalizer_n <= std::min(fx, fy))
    throw DataError("invalid normalizer for ('" + x + "', '" + y + "'): N (" +
                    std::to_string(s.normalizer_n) +
                    ") must exceed min(f(x), f(y)) (" +
                    std::to_string(std::min(fx, fy)) + ")");

  double lx = std::log2(static_cast<double>(fx));
  double ly = std::log2(static_cast<double>(fy));
  double lxy = std::log2(static_cast<double>(fxy));
  double ln = std::log2(static_cast<double>(s.normalizer_n));

  double v = (std::max(lx, ly) - lxy) / (ln - std::min(lx, ly));
  out.kind = NwdValue::Kind::kFinite;
  out.value = v;
  if (v < 0.0) {
    out.negative = true;
    if (opt.warn)
      opt.warn("NWD('" + x + "', '" + y + "') is negative (" +
               format_fixed(v, 6) + "); f(x,y) exceeds min(f(x), f(y))");
    if (opt.clamp_negative) {
      out.value = 0.0;
      out.clamped = true;
    }
  }
  return out;
}

DistanceMatrix nwd_matrix(const CountSnapshot& s,
                          const std::vector<std::string>& terms,
                          const NwdOptions& opt) {
  if (terms.size() < 2) throw DataError("nwd matrix needs at least 2 terms");
  std::set<std::string> seen;
  for (const auto& t : terms)
    if (!seen.insert(t).second) throw DataError("duplicate term: '" + t + "'");

  const std::size_t n = terms.size();
  DistanceMatrix m;
  m.labels = terms;
  m.values.assign(n * n, 0.0);
  m.measure = Measure::kNwd;
  m.provenance = s.source.empty() ? "snapshot" : s.source;

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      NwdValue v = nwd(s, terms[i], terms[j], opt);
      double entry;
      if (v.undefined())
        throw DataError("NWD undefined for ('" + terms[i] + "', '" + terms[j] +
                        "'): both counts are 0");
      entry = v.infinite() ? std::numeric_limits<double>::infinity() : v.value;
      m.at(i, j) = entry;
      m.at(j, i) = entry;
    }
  }
  m.validate(opt.warn);
  return m;
}

}  // namespace compsim
