#include "compsim/snapshot.hpp"

#include <sstream>

#include "compsim/errors.hpp"
#include "compsim/util.hpp"

namespace compsim {

TermPair make_pair_key(const std::string& a, const std::string& b) {
  return a < b ? TermPair{a, b} : TermPair{b, a};
}

bool CountSnapshot::has_pair(const std::string& a, const std::string& b) const {
  if (a == b) return has_term(a);
  return doubletons.count(make_pair_key(a, b)) != 0;
}

std::uint64_t CountSnapshot::singleton_count(const std::string& t) const {
  auto it = singletons.find(t);
  if (it == singletons.end())
    throw LookupError("term not in snapshot: '" + t + "'");
  return it->second;
}

std::uint64_t CountSnapshot::pair_count(const std::string& a,
                                        const std::string& b) const {
  if (a == b) return singleton_count(a);
  auto it = doubletons.find(make_pair_key(a, b));
  if (it == doubletons.end())
    throw LookupError("pair not in snapshot: ('" + a + "', '" + b + "')");
  return it->second;
}

void CountSnapshot::validate() const {
  for (const auto& [term, count] : singletons) {
    if (term.empty()) throw DataError("snapshot: empty term");
    if (term.find('\t') != std::string::npos || term[0] == '#')
      throw DataError("snapshot: term may not contain tabs or start with '#': '" +
                      term + "'");
    if (count > normalizer_n)
      throw DataError("snapshot: count for '" + term + "' (" +
                      std::to_string(count) + ") exceeds N (" +
                      std::to_string(normalizer_n) + ")");
  }
  for (const auto& [key, _] : doubletons)
    if (!(key.first < key.second))
      throw DataError("snapshot: non-canonical pair ('" + key.first + "', '" +
                      key.second + "')");
}

namespace {

std::uint64_t parse_count(const std::string& tok, std::size_t lineno) {
  if (tok.empty() || tok[0] == '-')
    throw DataError("snapshot line " + std::to_string(lineno) +
                    ": count must be a nonnegative integer, got '" + tok + "'");
  try {
    std::size_t used = 0;
    std::uint64_t v = std::stoull(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw DataError("snapshot line " + std::to_string(lineno) +
                    ": bad count '" + tok + "'");
  }
}

}  // namespace

SnapshotEntry parse_snapshot_line(const std::string& line, std::size_t lineno) {
  auto fields = split(line, '\t');
  SnapshotEntry e;
  if (fields.size() == 2) {
    if (fields[0].empty())
      throw DataError("snapshot line " + std::to_string(lineno) + ": empty term");
    e.term = fields[0];
    e.count = parse_count(fields[1], lineno);
    return e;
  }
  if (fields.size() == 3) {
    if (fields[0].empty() || fields[1].empty())
      throw DataError("snapshot line " + std::to_string(lineno) + ": empty term");
    if (!(fields[0] < fields[1]))
      throw DataError("snapshot line " + std::to_string(lineno) +
                      ": doubleton terms must be strictly sorted ('" +
                      fields[0] + "' vs '" + fields[1] + "')");
    e.pair = TermPair{fields[0], fields[1]};
    e.count = parse_count(fields[2], lineno);
    return e;
  }
  throw DataError("snapshot line " + std::to_string(lineno) +
                  ": expected 2 or 3 tab-separated fields, got " +
                  std::to_string(fields.size()));
}

std::string format_snapshot_line(const SnapshotEntry& e) {
  if (e.pair)
    return e.pair->first + "\t" + e.pair->second + "\t" + std::to_string(e.count);
  return e.term + "\t" + std::to_string(e.count);
}

CountSnapshot parse_snapshot(const std::string& text) {
  CountSnapshot s;
  bool have_n = false;
  std::size_t lineno = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("#N ", 0) == 0) {
        s.normalizer_n = parse_count(line.substr(3), lineno);
        have_n = true;
      } else if (line.rfind("#source ", 0) == 0) {
        s.source = line.substr(8);
      } else {
        throw DataError("snapshot line " + std::to_string(lineno) +
                        ": unknown directive '" + line + "'");
      }
      continue;
    }
    SnapshotEntry e = parse_snapshot_line(line, lineno);
    if (e.pair) {
      if (!s.doubletons.emplace(*e.pair, e.count).second)
        throw DataError("snapshot line " + std::to_string(lineno) +
                        ": duplicate pair ('" + e.pair->first + "', '" +
                        e.pair->second + "')");
    } else {
      if (!s.singletons.emplace(e.term, e.count).second)
        throw DataError("snapshot line " + std::to_string(lineno) +
                        ": duplicate term '" + e.term + "'");
    }
  }
  if (!have_n) throw DataError("snapshot: missing '#N <integer>' header");
  s.validate();
  return s;
}

std::string format_snapshot(const CountSnapshot& s) {
  std::ostringstream o;
  o << "#N " << s.normalizer_n << "\n";
  if (!s.source.empty()) o << "#source " << s.source << "\n";
  for (const auto& [term, count] : s.singletons)
    o << term << "\t" << count << "\n";
  for (const auto& [key, count] : s.doubletons)
    o << key.first << "\t" << key.second << "\t" << count << "\n";
  return o.str();
}

CountSnapshot read_snapshot_file(const std::string& path) {
  ByteVec raw = read_file(path);
  try {
    return parse_snapshot(std::string(raw.begin(), raw.end()));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void write_snapshot_file(const CountSnapshot& s, const std::string& path) {
  write_file(path, format_snapshot(s));
}

}  // namespace compsim
