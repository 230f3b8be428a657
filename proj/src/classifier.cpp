#include "compsim/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "compsim/errors.hpp"
#include "compsim/util.hpp"
#include "json.hpp"

namespace compsim {

void AnchorSet::validate() const {
  if (anchors.empty()) throw DataError("anchor set is empty");
  std::set<std::string> seen;
  for (const auto& a : anchors) {
    if (a.empty()) throw DataError("empty anchor term");
    if (!seen.insert(a).second) throw DataError("duplicate anchor: '" + a + "'");
  }
}

FeatureMatrix featurize(const std::vector<std::string>& words,
                        const AnchorSet& anchors, const CountSnapshot& snapshot,
                        const NwdOptions& opt) {
  anchors.validate();
  if (words.empty()) throw DataError("no words to featurize");
  FeatureMatrix fm;
  fm.words = words;
  fm.dim = anchors.anchors.size();
  fm.values.resize(words.size() * fm.dim);
  for (std::size_t w = 0; w < words.size(); ++w) {
    for (std::size_t a = 0; a < fm.dim; ++a) {
      NwdValue v = nwd(snapshot, words[w], anchors.anchors[a], opt);
      if (!v.finite())
        throw DataError("NWD(" + words[w] + ", " + anchors.anchors[a] +
                        ") is " + (v.infinite() ? "infinite" : "undefined") +
                        "; feature vectors need finite values");
      fm.values[w * fm.dim + a] = v.value;
    }
  }
  return fm;
}

namespace {

double dot(const std::vector<double>& w, const double* x, std::size_t k) {
  double s = 0;
  for (std::size_t i = 0; i < k; ++i) s += w[i] * x[i];
  return s;
}

// Engine-direct shuffle; std::shuffle's draw sequence is
// implementation-defined and would break the determinism contract.
void shuffle_indices(std::vector<std::size_t>& idx, std::mt19937_64& rng) {
  for (std::size_t i = idx.size(); i > 1; --i)
    std::swap(idx[i - 1], idx[rng() % i]);
}

}  // namespace

double TrainedModel::margin(const std::vector<double>& features) const {
  if (features.size() != weights.size())
    throw DataError("feature dimension does not match model");
  double s = bias;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double x = (features[i] - feature_mean[i]) / feature_scale[i];
    s += weights[i] * x;
  }
  return s;
}

bool TrainedModel::decide(const std::vector<double>& features) const {
  return margin(features) >= 0.0;
}

TrainReport train(const FeatureMatrix& features,
                  const std::vector<LabeledWord>& labels,
                  const AnchorSet& anchors, const TrainConfig& config) {
  anchors.validate();
  const std::size_t m = features.words.size();
  const std::size_t k = features.dim;
  if (labels.size() != m)
    throw DataError("label count does not match feature rows");
  if (k != anchors.anchors.size())
    throw DataError("feature dimension does not match anchors");
  std::size_t positives = 0;
  for (const auto& l : labels) positives += l.positive ? 1 : 0;
  if (positives == 0 || positives == m)
    throw DataError("training set must contain both classes");
  if (config.regularization <= 0) throw DataError("regularization must be > 0");
  if (config.epochs < 1) throw DataError("epochs must be >= 1");

  TrainedModel model;
  model.anchors = anchors.anchors;
  model.config = config;
  model.feature_mean.assign(k, 0.0);
  model.feature_scale.assign(k, 1.0);
  if (config.standardize) {
    for (std::size_t j = 0; j < k; ++j) {
      double mean = 0;
      for (std::size_t i = 0; i < m; ++i) mean += features.at(i, j);
      mean /= static_cast<double>(m);
      double var = 0;
      for (std::size_t i = 0; i < m; ++i) {
        double d = features.at(i, j) - mean;
        var += d * d;
      }
      var /= static_cast<double>(m);
      model.feature_mean[j] = mean;
      model.feature_scale[j] = var > 0 ? std::sqrt(var) : 1.0;
    }
  }

  std::vector<double> x(m * k);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < k; ++j)
      x[i * k + j] =
          (features.at(i, j) - model.feature_mean[j]) / model.feature_scale[j];

  // Pegasos-style subgradient descent on the primal hinge loss; the
  // bias stays unregularized.
  model.weights.assign(k, 0.0);
  model.bias = 0.0;
  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;

  const double lambda = config.regularization;
  std::uint64_t t = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_indices(order, rng);
    for (std::size_t i : order) {
      ++t;
      double eta = 1.0 / (lambda * static_cast<double>(t));
      double y = labels[i].positive ? 1.0 : -1.0;
      double score = dot(model.weights, &x[i * k], k) + model.bias;
      double decay = 1.0 - eta * lambda;
      for (auto& w : model.weights) w *= decay;
      if (y * score < 1.0) {
        for (std::size_t j = 0; j < k; ++j)
          model.weights[j] += eta * y * x[i * k + j];
        model.bias += eta * y;
      }
    }
  }

  TrainReport report;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < m; ++i) {
    double s = dot(model.weights, &x[i * k], k) + model.bias;
    bool decision = s >= 0.0;
    if (decision == labels[i].positive) ++correct;
  }
  report.training_accuracy =
      static_cast<double>(correct) / static_cast<double>(m);
  report.model = std::move(model);
  return report;
}

bool predict(const TrainedModel& model, const std::string& word,
             const CountSnapshot& snapshot, const NwdOptions& opt) {
  AnchorSet anchors{model.anchors};
  FeatureMatrix fm = featurize({word}, anchors, snapshot, opt);
  std::vector<double> row(fm.values.begin(), fm.values.begin() + fm.dim);
  return model.decide(row);
}

EvaluationReport evaluate(const TrainedModel& model,
                          const std::vector<LabeledWord>& test_set,
                          const CountSnapshot& snapshot,
                          const NwdOptions& opt) {
  if (test_set.empty()) throw DataError("test set is empty");
  EvaluationReport r;
  r.total = test_set.size();
  for (const auto& item : test_set) {
    bool decision = predict(model, item.word, snapshot, opt);
    if (decision == item.positive) {
      ++r.correct;
    } else if (decision) {
      r.false_positives.push_back(item.word);
    } else {
      r.false_negatives.push_back(item.word);
    }
  }
  std::sort(r.false_positives.begin(), r.false_positives.end());
  std::sort(r.false_negatives.begin(), r.false_negatives.end());
  return r;
}

std::string EvaluationReport::format() const {
  std::ostringstream o;
  o << "accuracy = " << correct << "/" << total << " = "
    << format_fixed(100.0 * accuracy(), 2) << "%\n";
  auto list = [&](const char* name, const std::vector<std::string>& words) {
    o << name << " (" << words.size() << "):";
    for (const auto& w : words) o << " " << w;
    o << "\n";
  };
  list("false positives", false_positives);
  list("false negatives", false_negatives);
  return o.str();
}

// ---------------------------------------------------------------------------
// Model and data files.

std::string model_to_json(const TrainedModel& model) {
  nlohmann::json doc;
  doc["format"] = "compsim-model";
  doc["version"] = 1;
  doc["anchors"] = model.anchors;
  doc["weights"] = model.weights;
  doc["bias"] = model.bias;
  doc["feature_mean"] = model.feature_mean;
  doc["feature_scale"] = model.feature_scale;
  doc["config"] = {{"regularization", model.config.regularization},
                   {"epochs", model.config.epochs},
                   {"seed", model.config.seed},
                   {"standardize", model.config.standardize}};
  return doc.dump(2) + "\n";
}

TrainedModel model_from_json(const std::string& text) {
  try {
    nlohmann::json doc = nlohmann::json::parse(text);
    if (doc.value("format", "") != "compsim-model")
      throw DataError("not a compsim model file");
    TrainedModel m;
    m.anchors = doc.at("anchors").get<std::vector<std::string>>();
    m.weights = doc.at("weights").get<std::vector<double>>();
    m.bias = doc.at("bias").get<double>();
    m.feature_mean = doc.at("feature_mean").get<std::vector<double>>();
    m.feature_scale = doc.at("feature_scale").get<std::vector<double>>();
    const auto& c = doc.at("config");
    m.config.regularization = c.at("regularization").get<double>();
    m.config.epochs = c.at("epochs").get<int>();
    m.config.seed = c.at("seed").get<std::uint64_t>();
    m.config.standardize = c.at("standardize").get<bool>();
    if (m.weights.size() != m.anchors.size() ||
        m.feature_mean.size() != m.anchors.size() ||
        m.feature_scale.size() != m.anchors.size())
      throw DataError("model file: inconsistent dimensions");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model file: ") + e.what());
  }
}

void write_model_file(const TrainedModel& model, const std::string& path) {
  write_file(path, model_to_json(model));
}

TrainedModel read_model_file(const std::string& path) {
  ByteVec raw = read_file(path);
  return model_from_json(std::string(raw.begin(), raw.end()));
}

std::vector<LabeledWord> read_labeled_words(const std::string& path) {
  ByteVec raw = read_file(path);
  std::string text(raw.begin(), raw.end());
  std::vector<LabeledWord> out;
  std::size_t lineno = 0;
  std::set<std::string> seen;
  for (auto& line : split(text, '\n')) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 2 || (fields[0] != "+" && fields[0] != "-") ||
        fields[1].empty())
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected '<+|->\\t<word>'");
    if (!seen.insert(fields[1]).second)
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": duplicate word '" + fields[1] + "'");
    out.push_back({fields[1], fields[0] == "+"});
  }
  if (out.empty()) throw DataError(path + ": no labeled words");
  return out;
}

AnchorSet read_anchors_file(const std::string& path) {
  AnchorSet a;
  a.anchors = read_words_file(path);
  a.validate();
  return a;
}

std::vector<std::string> read_words_file(const std::string& path) {
  ByteVec raw = read_file(path);
  std::string text(raw.begin(), raw.end());
  std::vector<std::string> out;
  for (auto& line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  if (out.empty()) throw DataError(path + ": no entries");
  return out;
}

}  // namespace compsim
