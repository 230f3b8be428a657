#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "compsim/snapshot.hpp"

namespace compsim {

// Injectable clock so the rate limiter is testable without sleeping.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::chrono::milliseconds now() = 0;
  virtual void sleep_for(std::chrono::milliseconds d) = 0;
};

class SystemClock : public Clock {
 public:
  std::chrono::milliseconds now() override;
  void sleep_for(std::chrono::milliseconds d) override;
};

// Enforces a minimum gap between upstream requests. Serializes callers.
class RateLimiter {
 public:
  RateLimiter(std::chrono::milliseconds min_gap, Clock& clock);
  void await_slot();

 private:
  std::chrono::milliseconds min_gap_;
  Clock& clock_;
  std::optional<std::chrono::milliseconds> last_;
  std::mutex mutex_;
};

// A source of page counts for one term or an unordered pair of terms.
class CountProvider {
 public:
  virtual ~CountProvider() = default;
  virtual std::uint64_t fetch_count(const std::vector<std::string>& terms) = 0;
  // Index size M when the provider reports one (used as default N).
  virtual std::optional<std::uint64_t> reported_index_size() { return {}; }
  virtual std::string describe() const = 0;
};

// Serves counts from a frozen snapshot; misses are lookup errors.
class FixtureProvider : public CountProvider {
 public:
  explicit FixtureProvider(CountSnapshot snapshot);
  std::uint64_t fetch_count(const std::vector<std::string>& terms) override;
  std::optional<std::uint64_t> reported_index_size() override;
  std::string describe() const override;

 private:
  CountSnapshot snapshot_;
};

struct LiveProviderConfig {
  // URL template; {terms} is replaced by the url-encoded query and
  // {key} by the credential from api_key_env.
  std::string endpoint;
  // Dot path to the count inside the JSON response, e.g. "info.total".
  std::string count_path = "count";
  // Separator between the two terms of a conjunctive pair query.
  std::string pair_join = " ";
  std::chrono::milliseconds delay{250};
  std::string api_key_env;
  // Endpoint+path reporting the index size M; empty if unavailable.
  std::string index_size_endpoint;
  std::string index_size_path;
};

// HTTP client for any engine that returns aggregate counts in JSON.
class LiveProvider : public CountProvider {
 public:
  LiveProvider(LiveProviderConfig cfg, Clock& clock);
  std::uint64_t fetch_count(const std::vector<std::string>& terms) override;
  std::optional<std::uint64_t> reported_index_size() override;
  std::string describe() const override;

 private:
  LiveProviderConfig cfg_;
  RateLimiter limiter_;
};

// Write-through persistent cache over any provider. The cache file is an
// append log in the snapshot line format; compact() rewrites it sorted
// and deduplicated. fetch(a,b) and fetch(b,a) share one cache key.
class CachedProvider : public CountProvider {
 public:
  CachedProvider(std::unique_ptr<CountProvider> upstream,
                 std::string cache_path);
  std::uint64_t fetch_count(const std::vector<std::string>& terms) override;
  std::optional<std::uint64_t> reported_index_size() override;
  std::string describe() const override;
  void compact();
  std::size_t upstream_fetches() const { return upstream_fetches_; }

 private:
  std::unique_ptr<CountProvider> upstream_;
  std::string cache_path_;
  std::map<std::string, std::uint64_t> entries_;  // formatted key -> count
  std::size_t upstream_fetches_ = 0;
  std::mutex mutex_;
};

enum class NPolicy { kReportedIndexSize, kFixed };

struct SnapshotSpec {
  NPolicy n_policy = NPolicy::kReportedIndexSize;
  std::uint64_t fixed_n = 0;
  std::string source_label;
};

// All singleton counts plus all unordered pair counts among the terms.
CountSnapshot build_snapshot(CountProvider& provider,
                             const std::vector<std::string>& terms,
                             const SnapshotSpec& spec);

// Classification shape: singletons for words and anchors, but only the
// word x anchor cross pairs (never word-word or anchor-anchor).
CountSnapshot build_anchor_snapshot(CountProvider& provider,
                                    const std::vector<std::string>& words,
                                    const std::vector<std::string>& anchors,
                                    const SnapshotSpec& spec);

}  // namespace compsim
