// compsim: compression- and web-count-based similarity toolkit.
// Subcommands: zlen, ncd, ncd-matrix, nwd, nwd-matrix, fetch-counts,
// cluster, classify, pipeline. Machine-readable payloads go to stdout,
// diagnostics to stderr. Exit codes: 0 ok, 1 usage, 2 data error,
// 3 backend/provider error.

#include <chrono>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "compsim/classifier.hpp"
#include "compsim/compressor.hpp"
#include "compsim/counts.hpp"
#include "compsim/errors.hpp"
#include "compsim/matrix.hpp"
#include "compsim/ncd.hpp"
#include "compsim/nwd.hpp"
#include "compsim/pipeline.hpp"
#include "compsim/quartet.hpp"
#include "compsim/snapshot.hpp"
#include "compsim/version.hpp"
#include "json.hpp"

namespace {

using namespace compsim;

void warn_to_stderr(const std::string& msg) {
  std::cerr << "warning: " << msg << "\n";
}

CompressorRegistry make_registry(const std::string& config_path) {
  CompressorRegistry reg = CompressorRegistry::with_defaults();
  if (!config_path.empty()) reg.load_config(config_path);
  return reg;
}

std::vector<std::string> read_terms(const std::string& path) {
  auto terms = read_words_file(path);
  return terms;
}

LiveProviderConfig provider_config_from_file(const std::string& path) {
  nlohmann::json doc;
  try {
    ByteVec raw = read_file(path);
    doc = nlohmann::json::parse(raw.begin(), raw.end());
  } catch (const nlohmann::json::exception& e) {
    throw DataError("provider config " + path + ": " + e.what());
  }
  LiveProviderConfig cfg;
  cfg.endpoint = doc.at("endpoint").get<std::string>();
  cfg.count_path = doc.value("count_path", "count");
  cfg.pair_join = doc.value("pair_join", " ");
  cfg.delay = std::chrono::milliseconds(doc.value("delay_ms", 250));
  cfg.api_key_env = doc.value("api_key_env", "");
  cfg.index_size_endpoint = doc.value("index_size_endpoint", "");
  cfg.index_size_path = doc.value("index_size_path", "");
  return cfg;
}

struct ProviderOptions {
  std::string kind = "fixture";  // fixture | live
  std::string snapshot_path;
  std::string provider_config;
  std::string cache_path;
  std::uint64_t fixed_n = 0;

  SnapshotSpec spec() const {
    SnapshotSpec s;
    if (fixed_n > 0) {
      s.n_policy = NPolicy::kFixed;
      s.fixed_n = fixed_n;
    }
    return s;
  }

  std::unique_ptr<CountProvider> make(Clock& clock) const {
    std::unique_ptr<CountProvider> p;
    if (kind == "fixture") {
      if (snapshot_path.empty())
        throw DataError("fixture provider needs --snapshot");
      p = std::make_unique<FixtureProvider>(read_snapshot_file(snapshot_path));
    } else if (kind == "live") {
      if (provider_config.empty())
        throw DataError("live provider needs --provider-config");
      p = std::make_unique<LiveProvider>(
          provider_config_from_file(provider_config), clock);
    } else {
      throw DataError("unknown provider kind: " + kind);
    }
    if (!cache_path.empty())
      p = std::make_unique<CachedProvider>(std::move(p), cache_path);
    return p;
  }
};

int dispatch(int argc, char** argv) {
  CLI::App app{"similarity by compression (NCD) and web counts (NWD)"};
  app.set_version_flag("--version", std::string("compsim ") + kVersion);
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  // --- zlen ------------------------------------------------------------
  auto* zlen = app.add_subcommand("zlen", "compressed length of a file");
  std::string zlen_backend = "builtin", zlen_file, zlen_backends_cfg;
  zlen->add_option("--backend", zlen_backend, "backend name");
  zlen->add_option("--backends-config", zlen_backends_cfg, "backend config JSON");
  zlen->add_option("file", zlen_file, "input file")->required();
  zlen->callback([&] {
    auto reg = make_registry(zlen_backends_cfg);
    ByteVec data = read_file(zlen_file);
    CompressedLength len = compressed_length(reg, data, zlen_backend);
    if (len.window_exceeded)
      warn_to_stderr("input exceeds the " + zlen_backend + " window");
    std::cout << len.bytes_out << "\n";
  });

  // --- ncd -------------------------------------------------------------
  auto* ncd_cmd = app.add_subcommand("ncd", "NCD between two files");
  std::string ncd_backend = "builtin", ncd_a, ncd_b, ncd_backends_cfg;
  bool ncd_calibrate = false;
  ncd_cmd->add_option("fileA", ncd_a)->required();
  ncd_cmd->add_option("fileB", ncd_b)->required();
  ncd_cmd->add_option("--backend", ncd_backend, "backend name");
  ncd_cmd->add_option("--backends-config", ncd_backends_cfg);
  ncd_cmd->add_flag("--calibrate", ncd_calibrate,
                    "subtract the empty-input length from every Z");
  ncd_cmd->callback([&] {
    auto reg = make_registry(ncd_backends_cfg);
    CorpusObject x{ncd_a, read_file(ncd_a)};
    CorpusObject y{ncd_b, read_file(ncd_b)};
    NcdOptions opt;
    opt.calibrate = ncd_calibrate;
    opt.warn = warn_to_stderr;
    std::cout << format_fixed(ncd_pair(reg, x, y, ncd_backend, opt), 4) << "\n";
  });

  // --- ncd-matrix --------------------------------------------------------
  auto* ncdm = app.add_subcommand("ncd-matrix", "NCD matrix over a corpus");
  std::string ncdm_input, ncdm_backend = "builtin", ncdm_out, ncdm_backends_cfg;
  bool ncdm_calibrate = false, ncdm_diagnostics = false;
  unsigned ncdm_jobs = 0;
  ncdm->add_option("corpus", ncdm_input, "directory or file-list")->required();
  ncdm->add_option("--backend", ncdm_backend);
  ncdm->add_option("--backends-config", ncdm_backends_cfg);
  ncdm->add_option("--out", ncdm_out, "output path (.phylip or .csv)");
  ncdm->add_option("--jobs", ncdm_jobs, "worker threads (0 = all cores)");
  ncdm->add_flag("--calibrate", ncdm_calibrate);
  ncdm->add_flag("--diagnostics", ncdm_diagnostics, "print diagnostics to stderr");
  ncdm->callback([&] {
    auto reg = make_registry(ncdm_backends_cfg);
    auto corpus = load_corpus(ncdm_input);
    NcdOptions opt;
    opt.calibrate = ncdm_calibrate;
    opt.jobs = ncdm_jobs;
    opt.warn = warn_to_stderr;
    DistanceMatrix m = ncd_matrix(reg, corpus, ncdm_backend, opt);
    if (ncdm_diagnostics) std::cerr << matrix_diagnostics(m).format();
    if (ncdm_out.empty())
      std::cout << to_phylip(m);
    else
      write_matrix_file(m, ncdm_out);
  });

  // --- nwd -------------------------------------------------------------
  auto* nwd_cmd = app.add_subcommand("nwd", "NWD between two terms");
  std::string nwd_a, nwd_b;
  ProviderOptions nwd_prov;
  bool nwd_clamp = false;
  nwd_cmd->add_option("termA", nwd_a)->required();
  nwd_cmd->add_option("termB", nwd_b)->required();
  nwd_cmd->add_option("--snapshot", nwd_prov.snapshot_path, "frozen counts file");
  nwd_cmd->add_option("--provider", nwd_prov.kind, "fixture | live");
  nwd_cmd->add_option("--provider-config", nwd_prov.provider_config);
  nwd_cmd->add_option("--cache", nwd_prov.cache_path);
  nwd_cmd->add_option("--n-fixed", nwd_prov.fixed_n, "fixed normalizer N");
  nwd_cmd->add_flag("--clamp-negative", nwd_clamp);
  nwd_cmd->callback([&] {
    NwdOptions opt;
    opt.clamp_negative = nwd_clamp;
    opt.warn = warn_to_stderr;
    CountSnapshot snapshot;
    if (nwd_prov.kind == "fixture" && !nwd_prov.snapshot_path.empty() &&
        nwd_prov.cache_path.empty()) {
      snapshot = read_snapshot_file(nwd_prov.snapshot_path);
    } else {
      SystemClock clock;
      auto provider = nwd_prov.make(clock);
      snapshot = build_snapshot(*provider, {nwd_a, nwd_b}, nwd_prov.spec());
    }
    NwdValue v = nwd(snapshot, nwd_a, nwd_b, opt);
    if (v.undefined())
      throw DataError("NWD(" + nwd_a + ", " + nwd_b +
                      ") is undefined: both counts are 0");
    if (v.infinite())
      std::cout << "inf\n";
    else
      std::cout << format_fixed(v.value, 4) << "\n";
  });

  // --- nwd-matrix --------------------------------------------------------
  auto* nwdm = app.add_subcommand("nwd-matrix", "NWD matrix over a term list");
  std::string nwdm_terms, nwdm_out;
  ProviderOptions nwdm_prov;
  bool nwdm_clamp = false, nwdm_diagnostics = false;
  nwdm->add_option("--terms", nwdm_terms, "file with one term per line")->required();
  nwdm->add_option("--snapshot", nwdm_prov.snapshot_path);
  nwdm->add_option("--provider", nwdm_prov.kind);
  nwdm->add_option("--provider-config", nwdm_prov.provider_config);
  nwdm->add_option("--cache", nwdm_prov.cache_path);
  nwdm->add_option("--n-fixed", nwdm_prov.fixed_n);
  nwdm->add_option("--out", nwdm_out, "output path (.phylip or .csv)");
  nwdm->add_flag("--clamp-negative", nwdm_clamp);
  nwdm->add_flag("--diagnostics", nwdm_diagnostics);
  nwdm->callback([&] {
    auto terms = read_terms(nwdm_terms);
    NwdOptions opt;
    opt.clamp_negative = nwdm_clamp;
    opt.warn = warn_to_stderr;
    CountSnapshot snapshot;
    if (nwdm_prov.kind == "fixture" && !nwdm_prov.snapshot_path.empty() &&
        nwdm_prov.cache_path.empty()) {
      snapshot = read_snapshot_file(nwdm_prov.snapshot_path);
    } else {
      SystemClock clock;
      auto provider = nwdm_prov.make(clock);
      snapshot = build_snapshot(*provider, terms, nwdm_prov.spec());
    }
    DistanceMatrix m = nwd_matrix(snapshot, terms, opt);
    if (nwdm_diagnostics) std::cerr << matrix_diagnostics(m).format();
    if (nwdm_out.empty())
      std::cout << to_csv(m);
    else
      write_matrix_file(m, nwdm_out);
  });

  // --- fetch-counts ------------------------------------------------------
  auto* fetch = app.add_subcommand("fetch-counts", "build a snapshot file");
  std::string fetch_terms, fetch_anchors, fetch_out;
  ProviderOptions fetch_prov;
  fetch->add_option("--terms", fetch_terms, "file with one term per line")->required();
  fetch->add_option("--anchors", fetch_anchors,
                    "anchors file; fetch only term x anchor pairs");
  fetch->add_option("--provider", fetch_prov.kind, "fixture | live");
  fetch->add_option("--snapshot", fetch_prov.snapshot_path, "fixture source");
  fetch->add_option("--provider-config", fetch_prov.provider_config);
  fetch->add_option("--cache", fetch_prov.cache_path);
  fetch->add_option("--n-fixed", fetch_prov.fixed_n);
  fetch->add_option("--out", fetch_out, "snapshot output path")->required();
  fetch->callback([&] {
    SystemClock clock;
    auto provider = fetch_prov.make(clock);
    auto terms = read_terms(fetch_terms);
    CountSnapshot snapshot;
    if (fetch_anchors.empty()) {
      snapshot = build_snapshot(*provider, terms, fetch_prov.spec());
    } else {
      auto anchors = read_anchors_file(fetch_anchors);
      snapshot = build_anchor_snapshot(*provider, terms, anchors.anchors,
                                       fetch_prov.spec());
    }
    if (auto* cached = dynamic_cast<CachedProvider*>(provider.get()))
      cached->compact();
    write_snapshot_file(snapshot, fetch_out);
    std::cerr << "wrote " << snapshot.singletons.size() << " singletons, "
              << snapshot.doubletons.size() << " doubletons to " << fetch_out
              << "\n";
  });

  // --- cluster -----------------------------------------------------------
  auto* cluster = app.add_subcommand("cluster", "quartet-method dendrogram");
  std::string cl_matrix, cl_out, cl_trace;
  SearchConfig cl_cfg;
  cluster->add_option("--matrix", cl_matrix, "phylip or csv matrix")->required();
  cluster->add_option("--seed", cl_cfg.seed, "RNG seed");
  cluster->add_option("--restarts", cl_cfg.restarts);
  cluster->add_option("--stop-after", cl_cfg.stop_after_nonimproving,
                      "non-improving steps before a restart ends");
  cluster->add_option("--jobs", cl_cfg.jobs, "parallel restarts");
  cluster->add_option("--out", cl_out, "newick output path");
  cluster->add_option("--trace", cl_trace, "accepted-step CSV path");
  cluster->callback([&] {
    DistanceMatrix m = read_matrix_file(cl_matrix);
    SearchResult r = hill_climb(m, cl_cfg);
    std::string newick = to_newick(r.tree, m.labels) + "\n";
    if (cl_out.empty())
      std::cout << newick;
    else
      write_file(cl_out, newick);
    if (!cl_trace.empty()) {
      std::string csv = "step,score\n";
      for (const auto& p : r.trace)
        csv += std::to_string(p.evaluation) + "," + format_fixed(p.score, 6) + "\n";
      write_file(cl_trace, csv);
    }
    std::cerr << "S(T) = " << format_fixed(r.score.normalized, 6) << " after "
              << r.score.evaluations << " evaluations\n";
  });

  // --- classify ------------------------------------------------------------
  auto* classify = app.add_subcommand("classify", "anchor-vector classification");
  classify->require_subcommand(1);

  auto* ctrain = classify->add_subcommand("train", "train a linear model");
  std::string ct_train, ct_anchors, ct_snapshot, ct_model;
  TrainConfig ct_cfg;
  ctrain->add_option("--train", ct_train, "labeled words tsv")->required();
  ctrain->add_option("--anchors", ct_anchors)->required();
  ctrain->add_option("--snapshot", ct_snapshot)->required();
  ctrain->add_option("--model", ct_model, "model output path")->required();
  ctrain->add_option("--seed", ct_cfg.seed);
  ctrain->add_option("--epochs", ct_cfg.epochs);
  ctrain->add_option("--regularization", ct_cfg.regularization);
  ctrain->add_flag("--standardize", ct_cfg.standardize);
  ctrain->callback([&] {
    auto labeled = read_labeled_words(ct_train);
    auto anchors = read_anchors_file(ct_anchors);
    auto snapshot = read_snapshot_file(ct_snapshot);
    std::vector<std::string> words;
    for (const auto& l : labeled) words.push_back(l.word);
    auto features = featurize(words, anchors, snapshot);
    TrainReport report = train(features, labeled, anchors, ct_cfg);
    write_model_file(report.model, ct_model);
    std::cout << "training accuracy = "
              << format_fixed(100.0 * report.training_accuracy, 2) << "%\n";
  });

  auto* cpredict = classify->add_subcommand("predict", "label a word list");
  std::string cp_model, cp_words, cp_snapshot;
  cpredict->add_option("--model", cp_model)->required();
  cpredict->add_option("--words", cp_words, "one word per line")->required();
  cpredict->add_option("--snapshot", cp_snapshot)->required();
  cpredict->callback([&] {
    TrainedModel model = read_model_file(cp_model);
    auto snapshot = read_snapshot_file(cp_snapshot);
    for (const auto& w : read_words_file(cp_words))
      std::cout << w << "\t" << (predict(model, w, snapshot) ? "+" : "-") << "\n";
  });

  auto* ceval = classify->add_subcommand("evaluate", "accuracy on a labeled set");
  std::string ce_model, ce_test, ce_snapshot;
  ceval->add_option("--model", ce_model)->required();
  ceval->add_option("--test", ce_test, "labeled words tsv")->required();
  ceval->add_option("--snapshot", ce_snapshot)->required();
  ceval->callback([&] {
    TrainedModel model = read_model_file(ce_model);
    auto test_set = read_labeled_words(ce_test);
    auto snapshot = read_snapshot_file(ce_snapshot);
    std::cout << evaluate(model, test_set, snapshot).format();
  });

  // --- pipeline -----------------------------------------------------------
  auto* pipe = app.add_subcommand("pipeline", "corpus/terms -> matrix -> tree");
  std::string pipe_config;
  pipe->add_option("config", pipe_config, "pipeline JSON config")->required();
  pipe->callback([&] {
    PipelineResult r = pipeline_run(pipe_config, warn_to_stderr);
    std::cout << r.matrix_path << "\n" << r.tree_path << "\n"
              << r.manifest_path << "\n";
    std::cerr << "S(T) = " << format_fixed(r.tree_score, 6) << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const compsim::BackendError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const compsim::ProviderError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const compsim::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
