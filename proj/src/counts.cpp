#include "compsim/counts.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

#include "compsim/errors.hpp"
#include "compsim/util.hpp"

namespace compsim {

std::chrono::milliseconds SystemClock::now() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now().time_since_epoch());
}

void SystemClock::sleep_for(std::chrono::milliseconds d) {
  std::this_thread::sleep_for(d);
}

RateLimiter::RateLimiter(std::chrono::milliseconds min_gap, Clock& clock)
    : min_gap_(min_gap), clock_(clock) {}

void RateLimiter::await_slot() {
  std::lock_guard<std::mutex> lock(mutex_);
  auto now = clock_.now();
  if (last_ && now - *last_ < min_gap_) {
    clock_.sleep_for(min_gap_ - (now - *last_));
    now = clock_.now();
  }
  last_ = now;
}

// ---------------------------------------------------------------------------
// Fixture provider.

FixtureProvider::FixtureProvider(CountSnapshot snapshot)
    : snapshot_(std::move(snapshot)) {}

std::uint64_t FixtureProvider::fetch_count(
    const std::vector<std::string>& terms) {
  if (terms.size() == 1) return snapshot_.singleton_count(terms[0]);
  if (terms.size() == 2) return snapshot_.pair_count(terms[0], terms[1]);
  throw DataError("fetch_count takes one or two terms");
}

std::optional<std::uint64_t> FixtureProvider::reported_index_size() {
  return snapshot_.normalizer_n;
}

std::string FixtureProvider::describe() const {
  return snapshot_.source.empty() ? "fixture" : "fixture:" + snapshot_.source;
}

// ---------------------------------------------------------------------------
// Cached provider.

namespace {

std::string cache_key(const std::vector<std::string>& terms) {
  SnapshotEntry e;
  if (terms.size() == 1) {
    e.term = terms[0];
  } else if (terms.size() == 2) {
    if (terms[0] == terms[1]) {
      e.term = terms[0];  // f(x,x) = f(x), same key as the singleton
    } else {
      e.pair = make_pair_key(terms[0], terms[1]);
    }
  } else {
    throw DataError("fetch_count takes one or two terms");
  }
  e.count = 0;
  std::string line = format_snapshot_line(e);
  return line.substr(0, line.rfind('\t'));
}

}  // namespace

CachedProvider::CachedProvider(std::unique_ptr<CountProvider> upstream,
                               std::string cache_path)
    : upstream_(std::move(upstream)), cache_path_(std::move(cache_path)) {
  std::ifstream in(cache_path_);
  if (!in) return;  // cache starts empty
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    SnapshotEntry e = parse_snapshot_line(line, lineno);
    std::string key = format_snapshot_line(e);
    key = key.substr(0, key.rfind('\t'));
    entries_[key] = e.count;  // later lines win: append log
  }
}

std::uint64_t CachedProvider::fetch_count(
    const std::vector<std::string>& terms) {
  std::string key = cache_key(terms);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = entries_.find(key);
    if (it != entries_.end()) return it->second;
  }
  std::uint64_t count = upstream_->fetch_count(terms);
  std::lock_guard<std::mutex> lock(mutex_);
  auto [it, inserted] = entries_.emplace(key, count);
  if (inserted) {
    ++upstream_fetches_;
    std::ofstream out(cache_path_, std::ios::app);
    if (out) out << key << "\t" << count << "\n";
  }
  return it->second;
}

std::optional<std::uint64_t> CachedProvider::reported_index_size() {
  return upstream_->reported_index_size();
}

std::string CachedProvider::describe() const {
  return upstream_->describe() + "+cache";
}

void CachedProvider::compact() {
  std::lock_guard<std::mutex> lock(mutex_);
  std::string out;
  for (const auto& [key, count] : entries_)
    out += key + "\t" + std::to_string(count) + "\n";
  write_file(cache_path_, out);
}

// ---------------------------------------------------------------------------
// Snapshot assembly.

namespace {

std::uint64_t resolve_n(CountProvider& provider, const SnapshotSpec& spec,
                        std::uint64_t max_singleton) {
  std::uint64_t n = 0;
  if (spec.n_policy == NPolicy::kFixed) {
    if (spec.fixed_n == 0) throw DataError("fixed N must be positive");
    n = spec.fixed_n;
  } else {
    auto reported = provider.reported_index_size();
    if (!reported)
      throw ProviderError(provider.describe() +
                          " does not report an index size; use a fixed N");
    n = *reported;
  }
  if (n < max_singleton)
    throw DataError("normalizer N (" + std::to_string(n) +
                    ") is below the largest singleton count (" +
                    std::to_string(max_singleton) + "); raise N");
  return n;
}

std::vector<std::string> unique_terms(const std::vector<std::string>& terms) {
  if (terms.empty()) throw DataError("term list is empty");
  std::set<std::string> seen;
  for (const auto& t : terms) {
    if (t.empty()) throw DataError("empty term");
    if (!seen.insert(t).second) throw DataError("duplicate term: '" + t + "'");
  }
  return {seen.begin(), seen.end()};
}

}  // namespace

CountSnapshot build_snapshot(CountProvider& provider,
                             const std::vector<std::string>& terms,
                             const SnapshotSpec& spec) {
  auto sorted = unique_terms(terms);
  CountSnapshot s;
  std::uint64_t max_singleton = 0;
  for (const auto& t : sorted) {
    std::uint64_t c = provider.fetch_count({t});
    s.singletons[t] = c;
    max_singleton = std::max(max_singleton, c);
  }
  for (std::size_t i = 0; i < sorted.size(); ++i)
    for (std::size_t j = i + 1; j < sorted.size(); ++j)
      s.doubletons[make_pair_key(sorted[i], sorted[j])] =
          provider.fetch_count({sorted[i], sorted[j]});
  s.normalizer_n = resolve_n(provider, spec, max_singleton);
  s.source = spec.source_label.empty() ? provider.describe() : spec.source_label;
  s.validate();
  return s;
}

CountSnapshot build_anchor_snapshot(CountProvider& provider,
                                    const std::vector<std::string>& words,
                                    const std::vector<std::string>& anchors,
                                    const SnapshotSpec& spec) {
  auto sorted_words = unique_terms(words);
  auto sorted_anchors = unique_terms(anchors);
  // A word may legitimately equal an anchor; the union drops the overlap.
  std::set<std::string> all(sorted_words.begin(), sorted_words.end());
  all.insert(sorted_anchors.begin(), sorted_anchors.end());

  CountSnapshot s;
  std::uint64_t max_singleton = 0;
  for (const auto& t : all) {
    std::uint64_t c = provider.fetch_count({t});
    s.singletons[t] = c;
    max_singleton = std::max(max_singleton, c);
  }
  for (const auto& w : sorted_words)
    for (const auto& a : sorted_anchors) {
      if (w == a) continue;  // f(x,x) = f(x) needs no pair entry
      auto key = make_pair_key(w, a);
      if (!s.doubletons.count(key))
        s.doubletons[key] = provider.fetch_count({w, a});
    }
  s.normalizer_n = resolve_n(provider, spec, max_singleton);
  s.source = spec.source_label.empty() ? provider.describe() : spec.source_label;
  s.validate();
  return s;
}

}  // namespace compsim
