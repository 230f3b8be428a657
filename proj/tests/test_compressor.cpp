#include <filesystem>

#include "compsim/compressor.hpp"
#include "compsim/errors.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace compsim;

namespace {

ByteVec bytes_of(const std::string& s) { return ByteVec(s.begin(), s.end()); }

}  // namespace

TEST_CASE("registry registers and resolves backends") {
  auto reg = CompressorRegistry::with_defaults();
  CHECK(reg.has("builtin"));
  CHECK(reg.has("zlib"));
  CHECK(reg.get("builtin").id().family == CompressorFamily::kBuiltinReference);
  CHECK(reg.get("zlib").id().family == CompressorFamily::kDictionaryWindow);
}

TEST_CASE("duplicate registration is rejected") {
  auto reg = CompressorRegistry::with_defaults();
  CHECK_THROWS_AS(reg.register_backend(std::make_shared<BuiltinCompressor>()),
                  DataError);
}

TEST_CASE("unknown backend raises a backend error") {
  auto reg = CompressorRegistry::with_defaults();
  CHECK_THROWS_AS(compressed_length(reg, {}, "nope"), BackendError);
}

TEST_CASE("builtin: empty input is header only") {
  auto reg = CompressorRegistry::with_defaults();
  auto len = compressed_length(reg, {}, "builtin");
  CHECK(len.bytes_in == 0);
  CHECK(len.bytes_out == 1);
}

TEST_CASE("builtin: repeated byte collapses far below input size") {
  ByteVec input(10000, 'a');
  auto out = BuiltinCompressor::compress(input);
  CHECK(out.size() < 500);
  // Golden for the frozen stream format: 1 literal + 39 match tokens
  // + 5 flag bytes + header.
  CHECK(out.size() == 124);
  CHECK(BuiltinCompressor::decompress(out) == input);
}

TEST_CASE("builtin: seeded random input is incompressible") {
  ByteVec input = testfix::random_bytes(10000, 42);
  auto reg = CompressorRegistry::with_defaults();
  auto len = compressed_length(reg, input, "builtin");
  CHECK(len.bytes_out >= 9500);
}

TEST_CASE("builtin: deterministic over repeated calls") {
  ByteVec input = testfix::random_bytes(4096, 7);
  auto reg = CompressorRegistry::with_defaults();
  auto a = compressed_length(reg, input, "builtin");
  auto b = compressed_length(reg, input, "builtin");
  CHECK(a.bytes_out == b.bytes_out);
}

TEST_CASE("builtin: round-trips arbitrary inputs") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    std::size_t size = 1 + static_cast<std::size_t>(seed) * 777;
    ByteVec input = testfix::random_bytes(size, seed);
    CHECK(BuiltinCompressor::decompress(BuiltinCompressor::compress(input)) ==
          input);
  }
  ByteVec text = bytes_of(testfix::english_text(0));
  CHECK(BuiltinCompressor::decompress(BuiltinCompressor::compress(text)) == text);
  ByteVec rep = bytes_of(testfix::repetitive_text(5000, 3));
  CHECK(BuiltinCompressor::decompress(BuiltinCompressor::compress(rep)) == rep);
}

TEST_CASE("builtin: overhead floor holds for all inputs") {
  auto reg = CompressorRegistry::with_defaults();
  std::uint64_t floor = compressed_length(reg, {}, "builtin").bytes_out;
  for (int i = 0; i < 4; ++i) {
    ByteVec input = testfix::random_bytes(100 + i * 997, i);
    CHECK(compressed_length(reg, input, "builtin").bytes_out >= floor);
  }
}

TEST_CASE("zlib: 1 KiB of zeros compresses below 100 bytes") {
  ByteVec zeros(1024, 0);
  auto reg = CompressorRegistry::with_defaults();
  auto len = compressed_length(reg, zeros, "zlib");
  CHECK(len.bytes_out < 100);
  CHECK(len.bytes_out >= 1);
}

TEST_CASE("zlib: empty input still emits a stream") {
  auto reg = CompressorRegistry::with_defaults();
  CHECK(compressed_length(reg, {}, "zlib").bytes_out >= 1);
}

TEST_CASE("concat_length equals compressed length of the concatenation") {
  auto reg = CompressorRegistry::with_defaults();
  ByteVec x = bytes_of(testfix::english_text(0));
  ByteVec y = bytes_of(testfix::english_text(1));
  ByteVec xy = x;
  xy.insert(xy.end(), y.begin(), y.end());
  CHECK(concat_length(reg, x, y, "builtin").bytes_out ==
        compressed_length(reg, xy, "builtin").bytes_out);

  SUBCASE("empty right side is the identity") {
    CHECK(concat_length(reg, x, {}, "builtin").bytes_out ==
          compressed_length(reg, x, "builtin").bytes_out);
  }
}

TEST_CASE("concat of a repetitive input with itself stays below twice the size") {
  auto reg = CompressorRegistry::with_defaults();
  ByteVec x(10000, 'a');
  auto single = compressed_length(reg, x, "builtin").bytes_out;
  auto doubled = concat_length(reg, x, x, "builtin").bytes_out;
  CHECK(doubled <= 2 * single);
}

TEST_CASE("concat of independent random blocks is near the sum of parts") {
  auto reg = CompressorRegistry::with_defaults();
  ByteVec x = testfix::random_bytes(10240, 1);
  ByteVec y = testfix::random_bytes(10240, 2);
  double sum = static_cast<double>(compressed_length(reg, x, "builtin").bytes_out +
                                   compressed_length(reg, y, "builtin").bytes_out);
  double joint = static_cast<double>(concat_length(reg, x, y, "builtin").bytes_out);
  CHECK(joint >= 0.95 * sum);
  CHECK(joint <= 1.05 * sum);
}

TEST_CASE("window-exceeded flag set for long inputs") {
  auto reg = CompressorRegistry::with_defaults();
  ByteVec big = testfix::random_bytes(40000, 3);
  CHECK(compressed_length(reg, big, "builtin").window_exceeded);
  ByteVec small = testfix::random_bytes(1000, 3);
  CHECK_FALSE(compressed_length(reg, small, "builtin").window_exceeded);
}

TEST_CASE("subprocess backend: /bin/cat is the identity compressor") {
  CompressorRegistry reg;
  reg.register_backend(std::make_shared<SubprocessCompressor>(
      CompressorId{"cat", CompressorFamily::kDictionaryWindow},
      std::vector<std::string>{"/bin/cat"}));
  ByteVec input = testfix::random_bytes(5000, 9);
  CHECK(compressed_length(reg, input, "cat").bytes_out == 5000);
  CHECK(concat_length(reg, input, input, "cat").bytes_out == 10000);
}

TEST_CASE("subprocess backend: missing command fails with a backend error") {
  CompressorRegistry reg;
  reg.register_backend(std::make_shared<SubprocessCompressor>(
      CompressorId{"ghost", CompressorFamily::kStatisticalContext},
      std::vector<std::string>{"/nonexistent/compressor"}));
  ByteVec input(10, 'x');
  CHECK_THROWS_AS(compressed_length(reg, input, "ghost"), BackendError);
}

TEST_CASE("backend config file loads subprocess entries") {
  namespace fs = std::filesystem;
  std::string dir = (fs::temp_directory_path() / "compsim_backend_cfg").string();
  fs::create_directories(dir);
  std::string path = dir + "/backends.json";
  write_file(path, R"({"backends":[
    {"name":"cat","family":"dictionary-window","command":["/bin/cat"],"window":0}
  ]})");
  auto reg = CompressorRegistry::with_defaults();
  reg.load_config(path);
  CHECK(reg.has("cat"));
  ByteVec input(100, 'q');
  CHECK(compressed_length(reg, input, "cat").bytes_out == 100);
}
