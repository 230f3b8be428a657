#include "compsim/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "compsim/errors.hpp"

namespace compsim {

namespace {

bool has_whitespace(const std::string& s) {
  return s.find_first_of(" \t\r\n") != std::string::npos;
}

double parse_value(const std::string& tok, const std::string& context) {
  if (tok == "inf") return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw DataError("bad matrix value '" + tok + "' in " + context);
  }
}

}  // namespace

void DistanceMatrix::validate(const WarningSink& warn) const {
  const std::size_t n = labels.size();
  if (n < 2) throw DataError("distance matrix needs at least 2 labels");
  if (values.size() != n * n)
    throw DataError("distance matrix has wrong value count");
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty() || has_whitespace(l))
      throw DataError("matrix label must be nonempty without whitespace: '" + l + "'");
    if (!seen.insert(l).second) throw DataError("duplicate matrix label: " + l);
  }
  std::size_t outside_unit = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double v = at(i, j);
      if (std::isnan(v)) throw DataError("matrix entry is NaN");
      if (v != at(j, i))
        throw DataError("matrix not exactly symmetric at (" + labels[i] + "," +
                        labels[j] + ")");
      if (std::isinf(v)) {
        if (measure != Measure::kNwd)
          throw DataError("infinite entry in non-NWD matrix");
        continue;
      }
      if (v < -0.1 || v > 1.1)
        throw DataError("matrix entry " + format_fixed(v, 6) + " at (" +
                        labels[i] + "," + labels[j] + ") outside [-0.1, 1.1]");
      if (v < 0.0 || v > 1.0) ++outside_unit;
    }
  }
  if (outside_unit > 0 && warn)
    warn(std::to_string(outside_unit) + " matrix entries outside [0,1]");
}

MatrixDiagnostics matrix_diagnostics(const DistanceMatrix& m,
                                     const WarningSink& warn) {
  MatrixDiagnostics d;
  const std::size_t n = m.size();
  d.diag_min = std::numeric_limits<double>::infinity();
  d.diag_max = -std::numeric_limits<double>::infinity();
  double diag_sum = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double v = m.at(i, i);
    d.diag_min = std::min(d.diag_min, v);
    d.diag_max = std::max(d.diag_max, v);
    diag_sum += v;
  }
  d.diag_mean = diag_sum / static_cast<double>(n);

  bool any_infinite = false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double v = m.at(i, j);
      d.symmetry_residual = std::max(d.symmetry_residual,
                                     std::abs(v - m.at(j, i)));
      if (std::isinf(v)) {
        ++d.infinite_entries;
        any_infinite = true;
        continue;
      }
      if (v < 0.0) ++d.negative_entries;
      if (v < 0.0 || v > 1.0) ++d.out_of_unit_range;
    }
  }

  if (!any_infinite) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          if (i != j && j != k && i != k &&
              m.at(i, k) > m.at(i, j) + m.at(j, k))
            ++d.triangle_violations;
  }

  if (warn) {
    if (d.out_of_unit_range > 0)
      warn(std::to_string(d.out_of_unit_range) + " entries outside [0,1]");
    if (d.negative_entries > 0)
      warn(std::to_string(d.negative_entries) + " negative entries");
  }
  return d;
}

std::string MatrixDiagnostics::format() const {
  std::ostringstream o;
  o << "diagonal: min=" << format_fixed(diag_min, 6)
    << " max=" << format_fixed(diag_max, 6)
    << " mean=" << format_fixed(diag_mean, 6) << "\n"
    << "entries outside [0,1]: " << out_of_unit_range << "\n"
    << "negative entries: " << negative_entries << "\n"
    << "infinite entries: " << infinite_entries << "\n"
    << "symmetry residual: " << format_fixed(symmetry_residual, 6) << "\n"
    << "triangle violations: " << triangle_violations << "\n";
  return o.str();
}

std::string to_phylip(const DistanceMatrix& m) {
  const std::size_t n = m.size();
  std::ostringstream o;
  o << n << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& label = m.labels[i];
    if (has_whitespace(label))
      throw DataError("phylip label may not contain whitespace: '" + label + "'");
    o << label;
    for (std::size_t pad = label.size(); pad < 10; ++pad) o << ' ';
    for (std::size_t j = 0; j < n; ++j) {
      double v = m.at(i, j);
      if (!std::isfinite(v))
        throw DataError("phylip format cannot encode non-finite entries; use CSV");
      o << ' ' << format_fixed(v, 6);
    }
    o << "\n";
  }
  return o.str();
}

DistanceMatrix from_phylip(const std::string& text) {
  std::istringstream in(text);
  std::size_t n = 0;
  if (!(in >> n) || n < 2) throw DataError("phylip: bad leading count");
  DistanceMatrix m;
  m.labels.resize(n);
  m.values.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(in >> m.labels[i]))
      throw DataError("phylip: missing label in row " + std::to_string(i + 1));
    for (std::size_t j = 0; j < n; ++j) {
      std::string tok;
      if (!(in >> tok))
        throw DataError("phylip: short row for label " + m.labels[i]);
      m.at(i, j) = parse_value(tok, "phylip row " + m.labels[i]);
    }
  }
  return m;
}

std::string to_csv(const DistanceMatrix& m) {
  const std::size_t n = m.size();
  std::ostringstream o;
  o << "label";
  for (const auto& l : m.labels) {
    if (l.find(',') != std::string::npos)
      throw DataError("csv label may not contain a comma: '" + l + "'");
    o << ',' << l;
  }
  o << "\n";
  for (std::size_t i = 0; i < n; ++i) {
    o << m.labels[i];
    for (std::size_t j = 0; j < n; ++j) {
      double v = m.at(i, j);
      o << ',' << (std::isinf(v) ? std::string("inf") : format_fixed(v, 6));
    }
    o << "\n";
  }
  return o.str();
}

DistanceMatrix from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split(line, ',');
  if (header.size() < 3 || header[0] != "label")
    throw DataError("csv: expected header starting with 'label'");
  DistanceMatrix m;
  m.labels.assign(header.begin() + 1, header.end());
  const std::size_t n = m.labels.size();
  m.values.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line))
      throw DataError("csv: expected " + std::to_string(n) + " data rows");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = split(line, ',');
    if (fields.size() != n + 1)
      throw DataError("csv row " + std::to_string(i + 2) + ": wrong field count");
    if (fields[0] != m.labels[i])
      throw DataError("csv row order does not match header at " + fields[0]);
    for (std::size_t j = 0; j < n; ++j)
      m.at(i, j) = parse_value(fields[j + 1], "csv row " + fields[0]);
  }
  return m;
}

void write_matrix_file(const DistanceMatrix& m, const std::string& path) {
  bool csv = path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
  write_file(path, csv ? to_csv(m) : to_phylip(m));
}

DistanceMatrix read_matrix_file(const std::string& path) {
  ByteVec raw = read_file(path);
  std::string text(raw.begin(), raw.end());
  bool csv = path.size() >= 4 && path.substr(path.size() - 4) == ".csv";
  return csv ? from_csv(text) : from_phylip(text);
}

}  // namespace compsim
