#include <algorithm>
#include <cmath>

#include "compsim/errors.hpp"
#include "compsim/ncd.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace compsim;

namespace {

CorpusObject obj(const std::string& id, const std::string& content) {
  return {id, ByteVec(content.begin(), content.end())};
}

CorpusObject obj(const std::string& id, ByteVec content) {
  return {id, std::move(content)};
}

// Two text excerpts and two seeded-random blocks: the miniature
// heterogeneous corpus used across the NCD tests.
std::vector<CorpusObject> mini_corpus() {
  return {obj("text1", testfix::english_text(0)),
          obj("text2", testfix::english_text(1)),
          obj("rand1", testfix::random_bytes(3000, 101)),
          obj("rand2", testfix::random_bytes(3000, 202))};
}

}  // namespace

TEST_CASE("ncd_from_lengths: synthetic length arithmetic") {
  // Z(x)=Z(y)=k, Zxy=2k -> 1
  CHECK(ncd_from_lengths(1000, 1000, 2000) == doctest::Approx(1.0));
  // Z(x)=100, Z(y)=80, Zxy=110 -> 0.30
  CHECK(ncd_from_lengths(100, 80, 110) == doctest::Approx(0.30));
  // identical: Zxy == Z -> 0
  CHECK(ncd_from_lengths(500, 500, 500) == doctest::Approx(0.0));
}

TEST_CASE("ncd_pair of an object with itself is small") {
  auto reg = CompressorRegistry::with_defaults();
  std::string big;
  for (int i = 0; i < 4; ++i) big += testfix::english_text(i);
  CorpusObject x = obj("x", big);  // ~10 KiB of text
  double v = ncd_pair(reg, x, x, "builtin");
  CHECK(v < 0.15);
  CHECK(v >= 0.0);
  // Frozen against the reference backend, +-0.01.
  CHECK(std::abs(v - 0.0124) <= 0.01);
}

TEST_CASE("ncd_pair is exactly symmetric") {
  auto reg = CompressorRegistry::with_defaults();
  auto corpus = mini_corpus();
  for (std::size_t i = 0; i < corpus.size(); ++i)
    for (std::size_t j = i + 1; j < corpus.size(); ++j) {
      double a = ncd_pair(reg, corpus[i], corpus[j], "builtin");
      double b = ncd_pair(reg, corpus[j], corpus[i], "builtin");
      CHECK(a == b);
    }
}

TEST_CASE("ncd_matrix: text pairs sit closer than text-random pairs") {
  auto reg = CompressorRegistry::with_defaults();
  auto m = ncd_matrix(reg, mini_corpus(), "builtin");
  double text_text = m.at(0, 1);
  for (std::size_t t = 0; t < 2; ++t)
    for (std::size_t r = 2; r < 4; ++r) CHECK(text_text < m.at(t, r));
}

TEST_CASE("ncd_matrix: diagonal mean stays low on the mini corpus") {
  auto reg = CompressorRegistry::with_defaults();
  auto m = ncd_matrix(reg, mini_corpus(), "builtin");
  auto d = matrix_diagnostics(m);
  CHECK(d.diag_mean < 0.2);
  CHECK(d.symmetry_residual == 0.0);
}

TEST_CASE("ncd_matrix: identical objects give off-diagonal equal to diagonal") {
  auto reg = CompressorRegistry::with_defaults();
  std::vector<CorpusObject> corpus = {obj("a", testfix::english_text(2)),
                                      obj("b", testfix::english_text(2))};
  auto m = ncd_matrix(reg, corpus, "builtin");
  CHECK(m.at(0, 1) == m.at(0, 0));
  CHECK(m.at(0, 1) == m.at(1, 1));
}

TEST_CASE("ncd_matrix: permutation equivariance, bit-identical entries") {
  auto reg = CompressorRegistry::with_defaults();
  auto corpus = mini_corpus();
  auto m = ncd_matrix(reg, corpus, "builtin");

  std::vector<std::size_t> perm = {2, 0, 3, 1};
  std::vector<CorpusObject> shuffled;
  for (std::size_t p : perm) shuffled.push_back(corpus[p]);
  auto mp = ncd_matrix(reg, shuffled, "builtin");

  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = 0; j < perm.size(); ++j)
      CHECK(mp.at(i, j) == m.at(perm[i], perm[j]));
}

TEST_CASE("ncd_matrix: deterministic and parallel-stable") {
  auto reg = CompressorRegistry::with_defaults();
  NcdOptions serial;
  serial.jobs = 1;
  NcdOptions parallel;
  parallel.jobs = 4;
  auto a = ncd_matrix(reg, mini_corpus(), "builtin", serial);
  auto b = ncd_matrix(reg, mini_corpus(), "builtin", parallel);
  CHECK(a.values == b.values);
}

TEST_CASE("ncd_matrix rejects duplicate ids and tiny corpora") {
  auto reg = CompressorRegistry::with_defaults();
  std::vector<CorpusObject> dup = {obj("same", "aaa"), obj("same", "bbb")};
  CHECK_THROWS_AS(ncd_matrix(reg, dup, "builtin"), DataError);
  std::vector<CorpusObject> one = {obj("only", "aaa")};
  CHECK_THROWS_AS(ncd_matrix(reg, one, "builtin"), DataError);
}

TEST_CASE("backend failure aborts the matrix naming the backend") {
  CompressorRegistry reg;
  reg.register_backend(std::make_shared<SubprocessCompressor>(
      CompressorId{"broken", CompressorFamily::kBlockSorting},
      std::vector<std::string>{"/nonexistent/tool"}));
  CHECK_THROWS_AS(ncd_matrix(reg, mini_corpus(), "broken"), BackendError);
}

TEST_CASE("calibration subtracts the header floor") {
  auto reg = CompressorRegistry::with_defaults();
  CorpusObject x = obj("x", testfix::english_text(3));
  NcdOptions raw;
  NcdOptions cal;
  cal.calibrate = true;
  // Identical empties are distance 0 under calibration.
  CorpusObject e1 = obj("e1", "");
  CorpusObject e2 = obj("e2", "");
  CHECK(ncd_pair(reg, e1, e2, "builtin", cal) == 0.0);
  // Calibration cannot exceed the raw self-distance here.
  CHECK(ncd_pair(reg, x, x, "builtin", cal) <=
        ncd_pair(reg, x, x, "builtin", raw));
}
