#include <filesystem>

#include "compsim/errors.hpp"
#include "compsim/snapshot.hpp"
#include "compsim/util.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace compsim;

TEST_CASE("pair keys are order-independent") {
  CHECK(make_pair_key("rider", "horse") == make_pair_key("horse", "rider"));
  auto s = testfix::horse_rider_snapshot();
  CHECK(s.pair_count("horse", "rider") == 2630000);
  CHECK(s.pair_count("rider", "horse") == 2630000);
}

TEST_CASE("self-pair count falls back to the singleton") {
  auto s = testfix::horse_rider_snapshot();
  CHECK(s.pair_count("horse", "horse") == s.singleton_count("horse"));
}

TEST_CASE("missing term and missing pair are lookup errors") {
  auto s = testfix::horse_rider_snapshot();
  CHECK_THROWS_AS(s.singleton_count("unicorn"), LookupError);
  CHECK_THROWS_AS(s.pair_count("horse", "unicorn"), LookupError);
}

TEST_CASE("format/parse round-trip is exact") {
  auto s = testfix::horse_rider_snapshot();
  std::string text = format_snapshot(s);
  auto back = parse_snapshot(text);
  CHECK(back.singletons == s.singletons);
  CHECK(back.doubletons == s.doubletons);
  CHECK(back.normalizer_n == s.normalizer_n);
  CHECK(back.source == s.source);
  // Canonical files are byte-stable through a round trip.
  CHECK(format_snapshot(back) == text);
}

TEST_CASE("parse errors carry line numbers") {
  CHECK_THROWS_WITH_AS(parse_snapshot("#N 10\nhorse\t5\nbad line here no tabs\n"),
                       doctest::Contains("line 3"), DataError);

  SUBCASE("unsorted doubleton key") {
    CHECK_THROWS_AS(parse_snapshot("#N 10\nzebra\tape\t3\n"), DataError);
  }
  SUBCASE("self pair is non-canonical") {
    CHECK_THROWS_AS(parse_snapshot("#N 10\nape\tape\t3\n"), DataError);
  }
  SUBCASE("negative count") {
    CHECK_THROWS_AS(parse_snapshot("#N 10\nape\t-3\n"), DataError);
  }
  SUBCASE("missing N header") {
    CHECK_THROWS_AS(parse_snapshot("ape\t3\n"), DataError);
  }
  SUBCASE("duplicate entries") {
    CHECK_THROWS_AS(parse_snapshot("#N 10\nape\t3\nape\t4\n"), DataError);
  }
}

TEST_CASE("validation enforces N at least the largest singleton") {
  CountSnapshot s;
  s.singletons["big"] = 100;
  s.normalizer_n = 50;
  CHECK_THROWS_AS(s.validate(), DataError);
}

TEST_CASE("snapshot file io") {
  namespace fs = std::filesystem;
  std::string dir = (fs::temp_directory_path() / "compsim_snap").string();
  fs::create_directories(dir);
  std::string path = dir + "/horse.tsv";
  auto s = testfix::horse_rider_snapshot();
  write_snapshot_file(s, path);
  auto back = read_snapshot_file(path);
  CHECK(back.singletons == s.singletons);
  CHECK(back.normalizer_n == s.normalizer_n);
}
