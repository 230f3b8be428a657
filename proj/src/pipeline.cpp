#include "compsim/pipeline.hpp"

#include <zlib.h>

#include <cstdio>
#include <filesystem>

#include "compsim/compressor.hpp"
#include "compsim/errors.hpp"
#include "compsim/matrix.hpp"
#include "compsim/ncd.hpp"
#include "compsim/nwd.hpp"
#include "compsim/quartet.hpp"
#include "compsim/snapshot.hpp"
#include "compsim/version.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace compsim {

namespace {

std::string crc32_hex(const std::string& content) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(content.data()),
              static_cast<uInt>(content.size()));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%08lx", static_cast<unsigned long>(crc));
  return buf;
}

std::string crc32_hex(const ByteVec& content) {
  return crc32_hex(std::string(content.begin(), content.end()));
}

// Stages outputs under temporary names; either every file is renamed
// into place or all partials are removed.
class OutputStage {
 public:
  ~OutputStage() {
    for (const auto& [tmp, _] : staged_) {
      std::error_code ec;
      fs::remove(tmp, ec);
    }
  }
  void stage(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    write_file(tmp, content);
    staged_.emplace_back(tmp, path);
  }
  void commit() {
    for (const auto& [tmp, path] : staged_) fs::rename(tmp, path);
    staged_.clear();
  }

 private:
  std::vector<std::pair<std::string, std::string>> staged_;
};

}  // namespace

PipelineResult pipeline_run(const std::string& config_path,
                            const WarningSink& warn) {
  nlohmann::json cfg;
  try {
    ByteVec raw = read_file(config_path);
    cfg = nlohmann::json::parse(raw.begin(), raw.end());
  } catch (const nlohmann::json::exception& e) {
    throw DataError("pipeline config " + config_path + ": " + e.what());
  }

  const bool ncd_mode = cfg.contains("corpus");
  const bool nwd_mode = cfg.contains("terms");
  if (ncd_mode == nwd_mode)
    throw DataError("pipeline config must name exactly one of \"corpus\" or \"terms\"");

  PipelineResult result;
  result.matrix_path = cfg.value("out_matrix", "matrix.phylip");
  result.tree_path = cfg.value("out_tree", "tree.newick");
  result.manifest_path = cfg.value("out_manifest", "manifest.json");
  std::uint64_t seed = cfg.value("seed", std::uint64_t{0});
  unsigned jobs = cfg.value("jobs", 0u);

  nlohmann::json manifest;
  manifest["version"] = kVersion;
  manifest["seed"] = seed;

  DistanceMatrix matrix;
  if (ncd_mode) {
    std::string corpus_path = cfg["corpus"].get<std::string>();
    std::string backend = cfg.value("backend", "builtin");
    CompressorRegistry reg = CompressorRegistry::with_defaults();
    if (cfg.contains("backends_config"))
      reg.load_config(cfg["backends_config"].get<std::string>());

    auto corpus = load_corpus(corpus_path);
    if (corpus.size() < 4)
      throw DataError("clustering needs at least 4 objects, corpus has " +
                      std::to_string(corpus.size()));

    nlohmann::json inputs = nlohmann::json::array();
    for (const auto& obj : corpus)
      inputs.push_back({{"id", obj.id},
                        {"bytes", obj.data.size()},
                        {"crc32", crc32_hex(obj.data)}});
    manifest["inputs"] = inputs;
    manifest["backend"] = {{"name", backend},
                           {"settings", reg.get(backend).settings()}};

    NcdOptions opt;
    opt.jobs = jobs;
    opt.warn = warn;
    matrix = ncd_matrix(reg, corpus, backend, opt);
  } else {
    std::string terms_path = cfg["terms"].get<std::string>();
    if (!cfg.contains("snapshot"))
      throw DataError("pipeline terms mode needs \"snapshot\"");
    std::string snapshot_path = cfg["snapshot"].get<std::string>();
    CountSnapshot snapshot = read_snapshot_file(snapshot_path);
    ByteVec terms_raw = read_file(terms_path);
    std::vector<std::string> terms;
    for (auto& line : split(std::string(terms_raw.begin(), terms_raw.end()), '\n')) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) terms.push_back(line);
    }
    if (terms.size() < 4)
      throw DataError("clustering needs at least 4 terms, got " +
                      std::to_string(terms.size()));

    manifest["inputs"] = {{{"id", terms_path}, {"crc32", crc32_hex(terms_raw)}},
                          {{"id", snapshot_path},
                           {"crc32", crc32_hex(format_snapshot(snapshot))}}};
    manifest["provider"] = snapshot.source;

    NwdOptions opt;
    opt.warn = warn;
    matrix = nwd_matrix(snapshot, terms, opt);
  }

  SearchConfig search;
  search.seed = seed;
  search.jobs = jobs;
  SearchResult tree = hill_climb(matrix, search);
  result.tree_score = tree.score.normalized;

  bool csv = result.matrix_path.size() >= 4 &&
             result.matrix_path.substr(result.matrix_path.size() - 4) == ".csv";
  std::string matrix_text = csv ? to_csv(matrix) : to_phylip(matrix);
  std::string tree_text = to_newick(tree.tree, matrix.labels) + "\n";

  manifest["outputs"] = {
      {"matrix", {{"path", result.matrix_path}, {"crc32", crc32_hex(matrix_text)}}},
      {"tree", {{"path", result.tree_path}, {"crc32", crc32_hex(tree_text)}}}};
  manifest["tree_score"] = format_fixed(tree.score.normalized, 6);
  std::string manifest_text = manifest.dump(2) + "\n";

  OutputStage stage;
  stage.stage(result.matrix_path, matrix_text);
  stage.stage(result.tree_path, tree_text);
  stage.stage(result.manifest_path, manifest_text);
  stage.commit();
  return result;
}

}  // namespace compsim
