#pragma once

#include <span>
#include <string>
#include <vector>

#include "compsim/compressor.hpp"
#include "compsim/matrix.hpp"
#include "compsim/util.hpp"

namespace compsim {

struct CorpusObject {
  std::string id;
  ByteVec data;
};

struct NcdOptions {
  // Subtract the backend's empty-input length from every Z before the
  // ratio; raw lengths are the default.
  bool calibrate = false;
  unsigned jobs = 1;
  WarningSink warn;
};

// Eq. arithmetic on raw lengths, exposed so synthetic-length cases are
// directly testable: (zxy - min(zx,zy)) / max(zx,zy).
double ncd_from_lengths(std::uint64_t zx, std::uint64_t zy, std::uint64_t zxy);

// The pair is unordered but compressors are order-sensitive, so the
// concatenation length is the min over both orders; this makes the
// result exactly symmetric.
double ncd_pair(const CompressorRegistry& reg, const CorpusObject& x,
                const CorpusObject& y, const std::string& backend,
                const NcdOptions& opt = {});

// Full matrix over unordered pairs, mirrored. Diagonal entries are
// ncd_pair(x,x), kept as computed.
DistanceMatrix ncd_matrix(const CompressorRegistry& reg,
                          const std::vector<CorpusObject>& corpus,
                          const std::string& backend,
                          const NcdOptions& opt = {});

// Loads a corpus from a directory (every regular file, sorted by name)
// or a list file with one path per line. Labels are file basenames with
// whitespace replaced by '_'; duplicates are an error.
std::vector<CorpusObject> load_corpus(const std::string& dir_or_list);

}  // namespace compsim
