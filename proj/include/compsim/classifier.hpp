#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "compsim/nwd.hpp"
#include "compsim/snapshot.hpp"

namespace compsim {

// Ordered anchor terms; feature index i is NWD(word, anchors[i]).
struct AnchorSet {
  std::vector<std::string> anchors;
  void validate() const;  // nonempty, distinct
};

struct LabeledWord {
  std::string word;
  bool positive = false;
};

// words x anchors matrix of finite NWD values.
struct FeatureMatrix {
  std::vector<std::string> words;
  std::size_t dim = 0;
  std::vector<double> values;  // row-major, words.size() x dim
  double at(std::size_t w, std::size_t f) const { return values[w * dim + f]; }
};

// Infinite or undefined NWD aborts naming the (word, anchor) pair.
FeatureMatrix featurize(const std::vector<std::string>& words,
                        const AnchorSet& anchors, const CountSnapshot& snapshot,
                        const NwdOptions& opt = {});

struct TrainConfig {
  double regularization = 0.01;  // lambda of the L2 term
  int epochs = 200;
  std::uint64_t seed = 0;
  bool standardize = false;  // features are already bounded; off by default
};

struct TrainedModel {
  std::vector<double> weights;
  double bias = 0;
  std::vector<std::string> anchors;
  TrainConfig config;
  // Standardization parameters (identity when standardize is off).
  std::vector<double> feature_mean;
  std::vector<double> feature_scale;

  double margin(const std::vector<double>& features) const;
  // Margin 0 classifies positive (deterministic tie rule).
  bool decide(const std::vector<double>& features) const;
};

struct TrainReport {
  TrainedModel model;
  double training_accuracy = 0;
};

// Soft-margin linear maximum-margin trainer: epoch-wise subgradient
// descent on the hinge loss with seeded shuffling, deterministic for a
// fixed config.
TrainReport train(const FeatureMatrix& features,
                  const std::vector<LabeledWord>& labels,
                  const AnchorSet& anchors, const TrainConfig& config = {});

bool predict(const TrainedModel& model, const std::string& word,
             const CountSnapshot& snapshot, const NwdOptions& opt = {});

struct EvaluationReport {
  std::size_t total = 0;
  std::size_t correct = 0;
  std::vector<std::string> false_positives;  // sorted by word
  std::vector<std::string> false_negatives;
  double accuracy() const {
    return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
  }
  // "accuracy = 17/19 = 89.47%" plus the confusion lists.
  std::string format() const;
};

EvaluationReport evaluate(const TrainedModel& model,
                          const std::vector<LabeledWord>& test_set,
                          const CountSnapshot& snapshot,
                          const NwdOptions& opt = {});

// Model file: self-describing JSON with weights, bias, anchors, config.
std::string model_to_json(const TrainedModel& model);
TrainedModel model_from_json(const std::string& text);
void write_model_file(const TrainedModel& model, const std::string& path);
TrainedModel read_model_file(const std::string& path);

// Training/test file: lines "<label:+|->\t<word>". Anchors file: one
// term per line, order significant.
std::vector<LabeledWord> read_labeled_words(const std::string& path);
AnchorSet read_anchors_file(const std::string& path);
std::vector<std::string> read_words_file(const std::string& path);

}  // namespace compsim
