#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace compsim {

// Unordered pair key, stored (lexicographically smaller, larger).
using TermPair = std::pair<std::string, std::string>;

TermPair make_pair_key(const std::string& a, const std::string& b);

// Frozen page counts at one instant: singleton counts f(term), doubleton
// counts f(x,y), and the normalizer N. Counts drift over time on the live
// web, so everything downstream runs from snapshots.
struct CountSnapshot {
  std::map<std::string, std::uint64_t> singletons;
  std::map<TermPair, std::uint64_t> doubletons;
  std::uint64_t normalizer_n = 0;
  std::string source;

  bool has_term(const std::string& t) const { return singletons.count(t) != 0; }
  bool has_pair(const std::string& a, const std::string& b) const;

  // Throws LookupError when absent. A recorded count of 0 is a value,
  // not a miss.
  std::uint64_t singleton_count(const std::string& t) const;
  // The pair of a term with itself is the term's own event: f(x,x) = f(x).
  std::uint64_t pair_count(const std::string& a, const std::string& b) const;

  // normalizer_n >= every singleton count, all keys canonical.
  void validate() const;
};

// Line-oriented text format, the single source of truth shared by the
// snapshot files and the provider cache:
//   #N <integer>              (required header)
//   #source <free text>       (optional)
//   <term>\t<count>           (singleton)
//   <termA>\t<termB>\t<count> (doubleton, termA < termB)
// Terms are UTF-8 and may not contain tabs. Canonical files list
// singletons sorted, then doubletons sorted.
CountSnapshot parse_snapshot(const std::string& text);
std::string format_snapshot(const CountSnapshot& s);

CountSnapshot read_snapshot_file(const std::string& path);
void write_snapshot_file(const CountSnapshot& s, const std::string& path);

// Entry-level helpers reused by the cache log (no #N header there).
struct SnapshotEntry {
  std::optional<TermPair> pair;  // unset -> singleton
  std::string term;              // singleton term when pair unset
  std::uint64_t count = 0;
};
SnapshotEntry parse_snapshot_line(const std::string& line, std::size_t lineno);
std::string format_snapshot_line(const SnapshotEntry& e);

}  // namespace compsim
