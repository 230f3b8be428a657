#include "compsim/compressor.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>

#include "compsim/errors.hpp"
#include "json.hpp"

namespace compsim {

std::string family_name(CompressorFamily f) {
  switch (f) {
    case CompressorFamily::kDictionaryWindow: return "dictionary-window";
    case CompressorFamily::kBlockSorting: return "block-sorting";
    case CompressorFamily::kStatisticalContext: return "statistical-context";
    case CompressorFamily::kBuiltinReference: return "builtin-reference";
  }
  return "unknown";
}

CompressorFamily family_from_name(const std::string& name) {
  if (name == "dictionary-window") return CompressorFamily::kDictionaryWindow;
  if (name == "block-sorting") return CompressorFamily::kBlockSorting;
  if (name == "statistical-context") return CompressorFamily::kStatisticalContext;
  if (name == "builtin-reference") return CompressorFamily::kBuiltinReference;
  throw DataError("unknown compressor family: " + name);
}

// ---------------------------------------------------------------------------
// Builtin LZSS reference backend.

namespace {

constexpr std::size_t kWindow = 32768;
constexpr std::size_t kMinMatch = 4;
constexpr std::size_t kMaxMatch = 259;
constexpr int kMaxChain = 64;
constexpr std::uint8_t kFormatVersion = 0x01;

inline std::uint32_t hash4(const std::uint8_t* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return (v * 2654435761u) >> 17;  // 15-bit table index
}

struct TokenWriter {
  ByteVec out;
  std::uint8_t flags = 0;
  int nitems = 0;
  std::size_t flag_pos = 0;

  TokenWriter() { out.push_back(kFormatVersion); }

  void begin_item(bool is_match) {
    if (nitems == 0) {
      flag_pos = out.size();
      out.push_back(0);
      flags = 0;
    }
    if (is_match) flags |= static_cast<std::uint8_t>(1u << nitems);
    if (++nitems == 8) {
      out[flag_pos] = flags;
      nitems = 0;
    }
  }

  void literal(std::uint8_t b) {
    begin_item(false);
    out.push_back(b);
  }

  void match(std::size_t offset, std::size_t length) {
    begin_item(true);
    std::uint16_t off = static_cast<std::uint16_t>(offset - 1);
    out.push_back(static_cast<std::uint8_t>(off & 0xff));
    out.push_back(static_cast<std::uint8_t>(off >> 8));
    out.push_back(static_cast<std::uint8_t>(length - kMinMatch));
  }

  ByteVec finish() {
    if (nitems != 0) out[flag_pos] = flags;
    return std::move(out);
  }
};

}  // namespace

BuiltinCompressor::BuiltinCompressor()
    : id_{"builtin", CompressorFamily::kBuiltinReference} {}

ByteVec BuiltinCompressor::compress(std::span<const std::uint8_t> data) {
  TokenWriter w;
  const std::size_t n = data.size();
  if (n == 0) return w.finish();

  std::vector<std::int32_t> head(1u << 15, -1);
  std::vector<std::int32_t> prev(n, -1);

  auto insert = [&](std::size_t pos) {
    if (pos + kMinMatch > n) return;
    std::uint32_t h = hash4(data.data() + pos);
    prev[pos] = head[h];
    head[h] = static_cast<std::int32_t>(pos);
  };

  std::size_t pos = 0;
  while (pos < n) {
    std::size_t best_len = 0;
    std::size_t best_off = 0;
    if (pos + kMinMatch <= n) {
      std::uint32_t h = hash4(data.data() + pos);
      std::int32_t cand = head[h];
      int chain = 0;
      const std::size_t limit = std::min(kMaxMatch, n - pos);
      while (cand >= 0 && chain < kMaxChain) {
        std::size_t c = static_cast<std::size_t>(cand);
        if (pos - c > kWindow) break;  // chains are position-ordered
        std::size_t len = 0;
        while (len < limit && data[c + len] == data[pos + len]) ++len;
        if (len > best_len) {
          best_len = len;
          best_off = pos - c;
          if (len == limit) break;
        }
        cand = prev[c];
        ++chain;
      }
    }

    if (best_len >= kMinMatch) {
      w.match(best_off, best_len);
      for (std::size_t i = 0; i < best_len; ++i) insert(pos + i);
      pos += best_len;
    } else {
      w.literal(data[pos]);
      insert(pos);
      ++pos;
    }
  }
  return w.finish();
}

ByteVec BuiltinCompressor::decompress(std::span<const std::uint8_t> stream) {
  if (stream.empty() || stream[0] != kFormatVersion)
    throw DataError("builtin stream: bad header");
  ByteVec out;
  std::size_t p = 1;
  while (p < stream.size()) {
    std::uint8_t flags = stream[p++];
    for (int bit = 0; bit < 8 && p < stream.size(); ++bit) {
      if (flags & (1u << bit)) {
        if (p + 3 > stream.size()) throw DataError("builtin stream: truncated match");
        std::size_t off = static_cast<std::size_t>(stream[p]) |
                          (static_cast<std::size_t>(stream[p + 1]) << 8);
        off += 1;
        std::size_t len = static_cast<std::size_t>(stream[p + 2]) + kMinMatch;
        p += 3;
        if (off > out.size()) throw DataError("builtin stream: offset before start");
        std::size_t src = out.size() - off;
        for (std::size_t i = 0; i < len; ++i) out.push_back(out[src + i]);
      } else {
        out.push_back(stream[p++]);
      }
    }
  }
  return out;
}

std::uint64_t BuiltinCompressor::compressed_size(
    std::span<const std::uint8_t> data) const {
  return compress(data).size();
}

// ---------------------------------------------------------------------------
// zlib backend.

ZlibCompressor::ZlibCompressor(int level)
    : id_{"zlib", CompressorFamily::kDictionaryWindow}, level_(level) {
  if (level < 1 || level > 9) throw DataError("zlib level must be in 1..9");
}

std::string ZlibCompressor::settings() const {
  return "deflate level=" + std::to_string(level_) + " windowbits=15";
}

std::uint64_t ZlibCompressor::compressed_size(
    std::span<const std::uint8_t> data) const {
  z_stream zs{};
  if (deflateInit2(&zs, level_, Z_DEFLATED, 15, 8, Z_DEFAULT_STRATEGY) != Z_OK)
    throw BackendError(id_.name, "deflateInit2 failed");
  zs.next_in = const_cast<Bytef*>(data.data());
  zs.avail_in = static_cast<uInt>(data.size());
  std::uint64_t total = 0;
  std::vector<std::uint8_t> buf(1 << 16);
  int rc;
  do {
    zs.next_out = buf.data();
    zs.avail_out = static_cast<uInt>(buf.size());
    rc = deflate(&zs, Z_FINISH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      deflateEnd(&zs);
      throw BackendError(id_.name, "deflate failed: rc=" + std::to_string(rc));
    }
    total += buf.size() - zs.avail_out;
  } while (rc != Z_STREAM_END);
  deflateEnd(&zs);
  return total;
}

// ---------------------------------------------------------------------------
// Registry and operations.

void CompressorRegistry::register_backend(std::shared_ptr<Compressor> backend) {
  const std::string& name = backend->id().name;
  if (backends_.count(name))
    throw DataError("backend already registered: " + name);
  backends_.emplace(name, std::move(backend));
}

const Compressor& CompressorRegistry::get(const std::string& name) const {
  auto it = backends_.find(name);
  if (it == backends_.end())
    throw BackendError(name, "not registered");
  return *it->second;
}

bool CompressorRegistry::has(const std::string& name) const {
  return backends_.count(name) != 0;
}

std::vector<std::string> CompressorRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : backends_) out.push_back(name);
  return out;
}

CompressorRegistry CompressorRegistry::with_defaults() {
  CompressorRegistry reg;
  reg.register_backend(std::make_shared<BuiltinCompressor>());
  reg.register_backend(std::make_shared<ZlibCompressor>());
  return reg;
}

void CompressorRegistry::load_config(const std::string& path) {
  nlohmann::json doc;
  try {
    ByteVec raw = read_file(path);
    doc = nlohmann::json::parse(raw.begin(), raw.end());
  } catch (const nlohmann::json::exception& e) {
    throw DataError("backend config " + path + ": " + e.what());
  }
  if (!doc.contains("backends") || !doc["backends"].is_array())
    throw DataError("backend config " + path + ": missing \"backends\" array");
  for (const auto& entry : doc["backends"]) {
    CompressorId id;
    id.name = entry.at("name").get<std::string>();
    id.family = family_from_name(entry.value("family", "dictionary-window"));
    if (entry.value("builtin", false)) {
      auto b = std::make_shared<BuiltinCompressor>();
      // Reference backend under an alias keeps its own id name.
      if (id.name != "builtin")
        throw DataError("builtin backend entry must be named \"builtin\"");
      register_backend(std::move(b));
      continue;
    }
    if (!entry.contains("command"))
      throw DataError("backend config: entry '" + id.name + "' needs \"command\"");
    std::vector<std::string> argv = entry["command"].get<std::vector<std::string>>();
    std::size_t window = entry.value("window", std::size_t{0});
    register_backend(std::make_shared<SubprocessCompressor>(id, std::move(argv), window));
  }
}

CompressedLength compressed_length(const CompressorRegistry& reg,
                                   std::span<const std::uint8_t> x,
                                   const std::string& backend) {
  const Compressor& c = reg.get(backend);
  CompressedLength r;
  r.bytes_in = x.size();
  r.bytes_out = c.compressed_size(x);
  r.compressor = c.id();
  r.window_exceeded = c.window_size() != 0 && x.size() > c.window_size();
  return r;
}

CompressedLength concat_length(const CompressorRegistry& reg,
                               std::span<const std::uint8_t> x,
                               std::span<const std::uint8_t> y,
                               const std::string& backend) {
  ByteVec xy;
  xy.reserve(x.size() + y.size());
  xy.insert(xy.end(), x.begin(), x.end());
  xy.insert(xy.end(), y.begin(), y.end());
  return compressed_length(reg, xy, backend);
}

}  // namespace compsim
