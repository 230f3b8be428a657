#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace compsim {

using ByteVec = std::vector<std::uint8_t>;

// Whole-file binary read/write. Throw DataError on I/O failure.
ByteVec read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// Fixed-point decimal formatting; all machine-readable numbers go
// through these so output stays parse-stable.
std::string format_fixed(double v, int decimals);

// Splits on a single character, keeping empty fields.
std::vector<std::string> split(const std::string& s, char sep);

// Runs fn(0..count-1) on up to `jobs` threads (jobs==0 means hardware
// concurrency). The first exception thrown by any task is rethrown on
// the calling thread after all workers stop picking up new work.
void parallel_for(std::size_t count, unsigned jobs,
                  const std::function<void(std::size_t)>& fn);

// Warnings are diagnostics, never payload; the sink decides where they
// go (the CLI sends them to stderr, tests collect them).
using WarningSink = std::function<void(const std::string&)>;

}  // namespace compsim
