#pragma once

#include <cstdint>
#include <string>

#include "compsim/util.hpp"

namespace compsim {

// End-to-end run: corpus -> NCD matrix -> tree, or terms + snapshot ->
// NWD matrix -> tree. Configured by a JSON file:
//   {
//     "corpus": "<dir-or-filelist>", "backend": "builtin",   // NCD mode
//     "terms": "<terms.txt>", "snapshot": "<snap.tsv>",      // NWD mode
//     "out_matrix": "matrix.phylip", "out_tree": "tree.newick",
//     "out_manifest": "manifest.json",
//     "seed": 42, "jobs": 0
//   }
// Outputs are written only when every stage succeeds; the manifest hashes
// all inputs and outputs so a rerun can be checked byte for byte.
struct PipelineResult {
  std::string matrix_path;
  std::string tree_path;
  std::string manifest_path;
  double tree_score = 0;
};

PipelineResult pipeline_run(const std::string& config_path,
                            const WarningSink& warn = nullptr);

}  // namespace compsim
