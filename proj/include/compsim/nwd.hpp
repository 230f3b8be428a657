#pragma once

#include <string>
#include <vector>

#include "compsim/matrix.hpp"
#include "compsim/snapshot.hpp"
#include "compsim/util.hpp"

namespace compsim {

// Search-event probabilities g(x) = f(x)/N and g(x,y) = f(x,y)/N.
double g_singleton(const CountSnapshot& s, const std::string& x);
double g_doubleton(const CountSnapshot& s, const std::string& x,
                   const std::string& y);

// Web code length G = log2(1/g) in bits; +infinity when the event has
// zero mass (feeds the infinite NWD case).
double web_code_length(const CountSnapshot& s, const std::string& x);
double web_code_length(const CountSnapshot& s, const std::string& x,
                       const std::string& y);

struct NormalizationReport {
  double sum = 0;        // sum of all g values over the recorded entries
  double residual = 0;   // |sum - 1|
  bool flagged = false;  // residual above tolerance
  bool degenerate = false;  // empty snapshot
  static constexpr double kTolerance = 1e-9;
};

// Report-only: a snapshot that is complete over its term set must have
// its g values sum to 1. Real web snapshots never do.
NormalizationReport check_normalization(const CountSnapshot& s);

struct NwdValue {
  enum class Kind { kFinite, kInfinite, kUndefined };
  Kind kind = Kind::kUndefined;
  double value = 0;       // meaningful only when finite
  bool negative = false;  // raw value was negative (noisy counts)
  bool clamped = false;   // negative value clamped to 0 on request

  bool finite() const { return kind == Kind::kFinite; }
  bool infinite() const { return kind == Kind::kInfinite; }
  bool undefined() const { return kind == Kind::kUndefined; }
};

struct NwdOptions {
  // Noisy engines can return f(x,y) > min(f(x), f(y)); the raw negative
  // value is returned with a flag unless clamping is requested.
  bool clamp_negative = false;
  WarningSink warn;
};

// Frequency form of the web distance with the three degenerate cases:
// undefined for f(x)=f(y)=0, infinite for f(x,y)=0, otherwise
// (max{log f(x), log f(y)} - log f(x,y)) / (log N - min{log f(x), log f(y)}).
NwdValue nwd(const CountSnapshot& s, const std::string& x,
             const std::string& y, const NwdOptions& opt = {});

// Symmetric matrix over the term list; infinite entries become +inf
// (written as "inf" in CSV), undefined entries abort naming the pair.
DistanceMatrix nwd_matrix(const CountSnapshot& s,
                          const std::vector<std::string>& terms,
                          const NwdOptions& opt = {});

}  // namespace compsim
