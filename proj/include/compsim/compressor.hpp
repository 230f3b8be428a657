#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "compsim/util.hpp"

namespace compsim {

enum class CompressorFamily {
  kDictionaryWindow,
  kBlockSorting,
  kStatisticalContext,
  kBuiltinReference,
};

std::string family_name(CompressorFamily f);
CompressorFamily family_from_name(const std::string& name);

struct CompressorId {
  std::string name;
  CompressorFamily family = CompressorFamily::kBuiltinReference;
};

struct CompressedLength {
  std::uint64_t bytes_in = 0;
  std::uint64_t bytes_out = 0;
  CompressorId compressor;
  // Set when the input is longer than the backend's window; distances
  // computed from such lengths lose long-range structure.
  bool window_exceeded = false;
};

// A compressed-length oracle. Implementations must be deterministic for
// a fixed input and safe to call from multiple threads at once.
class Compressor {
 public:
  virtual ~Compressor() = default;
  virtual const CompressorId& id() const = 0;
  // 0 means unknown/unbounded.
  virtual std::size_t window_size() const = 0;
  virtual std::uint64_t compressed_size(std::span<const std::uint8_t> data) const = 0;
  virtual std::string settings() const = 0;
};

// Self-contained LZSS-style sliding-window compressor used as the
// hermetic reference backend. Greedy longest-match parse over hash
// chains, 32 KiB window, 3-byte match tokens, flag-byte framing.
// Stream layout (all golden tests depend on it, do not change):
//   byte 0: format version 0x01
//   groups of 8 items, preceded by one flag byte (LSB first);
//   flag bit 0 -> literal byte, 1 -> match of
//   u16le (offset-1), u8 (length-4); offset in [1,32768], length in [4,259].
class BuiltinCompressor : public Compressor {
 public:
  BuiltinCompressor();
  const CompressorId& id() const override { return id_; }
  std::size_t window_size() const override { return 32768; }
  std::uint64_t compressed_size(std::span<const std::uint8_t> data) const override;
  std::string settings() const override { return "lzss window=32768 minmatch=4"; }

  static ByteVec compress(std::span<const std::uint8_t> data);
  static ByteVec decompress(std::span<const std::uint8_t> stream);

 private:
  CompressorId id_;
};

// zlib deflate behind the spec contract; counts emitted stream bytes.
class ZlibCompressor : public Compressor {
 public:
  explicit ZlibCompressor(int level = 9);
  const CompressorId& id() const override { return id_; }
  std::size_t window_size() const override { return 32768; }
  std::uint64_t compressed_size(std::span<const std::uint8_t> data) const override;
  std::string settings() const override;

 private:
  CompressorId id_;
  int level_;
};

// Runs an external compressor command, feeding the input on stdin and
// counting stdout bytes. Each call spawns its own process, so calls are
// independent and may run concurrently.
class SubprocessCompressor : public Compressor {
 public:
  SubprocessCompressor(CompressorId id, std::vector<std::string> argv,
                       std::size_t window = 0);
  const CompressorId& id() const override { return id_; }
  std::size_t window_size() const override { return window_; }
  std::uint64_t compressed_size(std::span<const std::uint8_t> data) const override;
  std::string settings() const override;

 private:
  CompressorId id_;
  std::vector<std::string> argv_;
  std::size_t window_;
};

class CompressorRegistry {
 public:
  // Registers a backend; duplicate names are an error.
  void register_backend(std::shared_ptr<Compressor> backend);
  const Compressor& get(const std::string& name) const;
  bool has(const std::string& name) const;
  std::vector<std::string> names() const;

  // "builtin" (reference) and "zlib" (dictionary-window) preregistered.
  static CompressorRegistry with_defaults();

  // Loads extra subprocess backends from a JSON config file:
  //   {"backends":[{"name":..,"family":..,"command":[..],"window":N}, ...]}
  // An entry with "builtin": true registers the reference backend under
  // another name.
  void load_config(const std::string& path);

 private:
  std::map<std::string, std::shared_ptr<Compressor>> backends_;
};

// The spec-level operations over a registry.
CompressedLength compressed_length(const CompressorRegistry& reg,
                                   std::span<const std::uint8_t> x,
                                   const std::string& backend);
CompressedLength concat_length(const CompressorRegistry& reg,
                               std::span<const std::uint8_t> x,
                               std::span<const std::uint8_t> y,
                               const std::string& backend);

}  // namespace compsim
