#include "compsim/ncd.hpp"

#include <algorithm>
#include <filesystem>
#include <set>

#include "compsim/errors.hpp"

namespace fs = std::filesystem;

namespace compsim {

namespace {

struct LengthOracle {
  const CompressorRegistry& reg;
  const std::string& backend;
  std::uint64_t header = 0;  // Z(empty), subtracted in calibrated mode
  bool calibrate = false;

  std::uint64_t single(std::span<const std::uint8_t> x) const {
    std::uint64_t z = compressed_length(reg, x, backend).bytes_out;
    return calibrate ? z - std::min(z, header) : z;
  }
  std::uint64_t concat(std::span<const std::uint8_t> x,
                       std::span<const std::uint8_t> y) const {
    std::uint64_t z = concat_length(reg, x, y, backend).bytes_out;
    return calibrate ? z - std::min(z, header) : z;
  }
};

LengthOracle make_oracle(const CompressorRegistry& reg,
                         const std::string& backend, const NcdOptions& opt) {
  LengthOracle oracle{reg, backend, 0, opt.calibrate};
  if (opt.calibrate)
    oracle.header = compressed_length(reg, {}, backend).bytes_out;
  return oracle;
}

double ncd_checked(std::uint64_t zx, std::uint64_t zy, std::uint64_t zxy,
                   const std::string& who, const WarningSink& warn) {
  double v = ncd_from_lengths(zx, zy, zxy);
  if (v < 0.0 && warn)
    warn("NCD(" + who + ") is negative (" + format_fixed(v, 6) +
         "); compressor found the concatenation shorter than one part");
  if (v < -0.1 || v > 1.1)
    throw DataError("NCD(" + who + ") = " + format_fixed(v, 6) +
                    " outside [-0.1, 1.1]; backend unsuitable for this input");
  return v;
}

void warn_window(const Compressor& c, std::size_t input_size,
                 const WarningSink& warn) {
  if (warn && c.window_size() != 0 && input_size > c.window_size())
    warn("input of " + std::to_string(input_size) + " bytes exceeds the " +
         c.id().name + " window; long-range matches are lost");
}

}  // namespace

double ncd_from_lengths(std::uint64_t zx, std::uint64_t zy, std::uint64_t zxy) {
  std::uint64_t lo = std::min(zx, zy);
  std::uint64_t hi = std::max(zx, zy);
  if (hi == 0) return 0.0;  // both empty under calibration
  // Signed numerator: real compressors can give zxy < min.
  return (static_cast<double>(zxy) - static_cast<double>(lo)) /
         static_cast<double>(hi);
}

double ncd_pair(const CompressorRegistry& reg, const CorpusObject& x,
                const CorpusObject& y, const std::string& backend,
                const NcdOptions& opt) {
  LengthOracle oracle = make_oracle(reg, backend, opt);
  warn_window(reg.get(backend), std::max(x.data.size(), y.data.size()), opt.warn);
  std::uint64_t zx = oracle.single(x.data);
  std::uint64_t zy = oracle.single(y.data);
  std::uint64_t zxy = std::min(oracle.concat(x.data, y.data),
                               oracle.concat(y.data, x.data));
  return ncd_checked(zx, zy, zxy, x.id + "," + y.id, opt.warn);
}

DistanceMatrix ncd_matrix(const CompressorRegistry& reg,
                          const std::vector<CorpusObject>& corpus,
                          const std::string& backend, const NcdOptions& opt) {
  const std::size_t n = corpus.size();
  if (n < 2) throw DataError("corpus needs at least 2 objects");
  std::set<std::string> ids;
  for (const auto& obj : corpus)
    if (!ids.insert(obj.id).second)
      throw DataError("duplicate corpus id: " + obj.id);

  LengthOracle oracle = make_oracle(reg, backend, opt);

  for (const auto& obj : corpus)
    warn_window(reg.get(backend), obj.data.size(), opt.warn);

  // Singles once, then one task per unordered pair (diagonal included);
  // assembly is by index so worker scheduling cannot change the result.
  std::vector<std::uint64_t> z(n);
  parallel_for(n, opt.jobs, [&](std::size_t i) {
    z[i] = oracle.single(corpus[i].data);
  });

  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) tasks.emplace_back(i, j);

  DistanceMatrix m;
  m.labels.reserve(n);
  for (const auto& obj : corpus) m.labels.push_back(obj.id);
  m.values.assign(n * n, 0.0);
  m.measure = Measure::kNcd;
  m.provenance = backend + " (" + reg.get(backend).settings() + ")";

  std::vector<double> pair_value(tasks.size());
  try {
    parallel_for(tasks.size(), opt.jobs, [&](std::size_t t) {
      auto [i, j] = tasks[t];
      std::uint64_t zxy =
          i == j ? oracle.concat(corpus[i].data, corpus[i].data)
                 : std::min(oracle.concat(corpus[i].data, corpus[j].data),
                            oracle.concat(corpus[j].data, corpus[i].data));
      pair_value[t] = ncd_checked(z[i], z[j], zxy,
                                  corpus[i].id + "," + corpus[j].id, opt.warn);
    });
  } catch (const BackendError& e) {
    throw BackendError(e.backend(), std::string("matrix aborted: ") + e.what());
  }

  for (std::size_t t = 0; t < tasks.size(); ++t) {
    auto [i, j] = tasks[t];
    m.at(i, j) = pair_value[t];
    m.at(j, i) = pair_value[t];
  }
  m.validate(opt.warn);
  return m;
}

std::vector<CorpusObject> load_corpus(const std::string& dir_or_list) {
  std::vector<std::string> paths;
  if (fs::is_directory(dir_or_list)) {
    for (const auto& entry : fs::directory_iterator(dir_or_list))
      if (entry.is_regular_file()) paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());
  } else {
    ByteVec raw = read_file(dir_or_list);
    std::string text(raw.begin(), raw.end());
    for (auto& line : split(text, '\n')) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) paths.push_back(line);
    }
  }
  if (paths.empty()) throw DataError("no corpus files in " + dir_or_list);

  std::vector<CorpusObject> corpus;
  std::set<std::string> ids;
  for (const auto& p : paths) {
    CorpusObject obj;
    obj.id = fs::path(p).filename().string();
    for (auto& c : obj.id)
      if (c == ' ' || c == '\t') c = '_';
    obj.data = read_file(p);
    if (!ids.insert(obj.id).second)
      throw DataError("duplicate corpus id (same basename): " + obj.id);
    corpus.push_back(std::move(obj));
  }
  return corpus;
}

}  // namespace compsim
