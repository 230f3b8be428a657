#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "compsim/classifier.hpp"
#include "compsim/matrix.hpp"
#include "compsim/quartet.hpp"
#include "compsim/snapshot.hpp"
#include "compsim/util.hpp"

// Deterministic inputs shared by the unit and acceptance suites.
namespace compsim::testfix {

// Four original English passages with overlapping vocabulary (~3 KiB each).
const std::string& english_text(int i);

ByteVec random_bytes(std::size_t n, std::uint64_t seed);
std::string printable_random(std::size_t n, std::uint64_t seed);
std::string repetitive_text(std::size_t n, int variant);

// 12-file corpus (4 text, 4 seeded-random, 4 repetitive) written into
// dir; returns the file names in sorted order.
std::vector<std::string> write_demo_corpus(const std::string& dir);

// Paper-style snapshot for the horse/rider worked example.
CountSnapshot horse_rider_snapshot();

// Complete synthetic snapshot whose counts sum to N exactly.
CountSnapshot complete_snapshot();

// Prime-numbers classification fixture. Counts are constructed so that
// NWD to the "prime"/"composite" anchors separates the classes. With
// paper_confusion set, 91 and 110 get prime-like counts so a correct
// model reproduces the historical 17/19 confusion.
CountSnapshot prime_snapshot(bool paper_confusion);
std::vector<LabeledWord> prime_train_words();
std::vector<LabeledWord> prime_test_words();
AnchorSet prime_anchors();

// Random symmetric matrix with zero diagonal, entries in [0,1].
DistanceMatrix random_matrix(int n, std::uint64_t seed);
// Same but entries are dyadic (k/1024) so sums are exact in double.
DistanceMatrix dyadic_matrix(int n, std::uint64_t seed);
// Additive tree metric from a random topology, scaled into [0,1);
// the generating tree is returned through out_tree.
DistanceMatrix additive_metric(int n, std::uint64_t seed, TernaryTree* out_tree);

}  // namespace compsim::testfix
