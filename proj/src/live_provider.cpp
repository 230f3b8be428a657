#include <cstdlib>

#include "compsim/counts.hpp"
#include "compsim/errors.hpp"
#include "httplib.h"
#include "json.hpp"

namespace compsim {

namespace {

std::string url_encode(const std::string& s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 0xf];
    }
  }
  return out;
}

std::string replace_all(std::string s, const std::string& from,
                        const std::string& to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
  return s;
}

// Splits "http://host:port/path?query" into (scheme://host:port, /path?query).
std::pair<std::string, std::string> split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw DataError("endpoint must start with http:// : " + url);
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

// Follows a dot path through a JSON document; array steps are numeric.
nlohmann::json follow_path(const nlohmann::json& doc, const std::string& path) {
  const nlohmann::json* cur = &doc;
  for (const auto& step : split(path, '.')) {
    if (cur->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(step);
      } catch (const std::exception&) {
        throw ProviderError("count path step '" + step + "' into an array");
      }
      if (idx >= cur->size())
        throw ProviderError("count path index " + step + " out of range");
      cur = &(*cur)[idx];
    } else if (cur->is_object()) {
      if (!cur->contains(step))
        throw ProviderError("count path step '" + step + "' not in response");
      cur = &(*cur)[step];
    } else {
      throw ProviderError("count path step '" + step + "' into a scalar");
    }
  }
  return *cur;
}

std::uint64_t count_from_json(const nlohmann::json& v) {
  // Engines report totals as numbers or as decimal strings.
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    auto n = v.get<std::int64_t>();
    if (n < 0) throw ProviderError("negative count in response");
    return static_cast<std::uint64_t>(n);
  }
  if (v.is_string()) {
    try {
      return std::stoull(v.get<std::string>());
    } catch (const std::exception&) {
      throw ProviderError("count string is not a number: " + v.dump());
    }
  }
  throw ProviderError("count field is neither number nor string: " + v.dump());
}

std::uint64_t http_json_count(const std::string& url,
                              const std::string& count_path) {
  auto [host, path] = split_url(url);
  httplib::Client client(host);
  client.set_connection_timeout(10);
  client.set_read_timeout(30);
  auto res = client.Get(path);
  if (!res)
    throw ProviderError("request to " + host +
                        " failed: " + httplib::to_string(res.error()) +
                        "; check connectivity and retry");
  if (res->status != 200)
    throw ProviderError("request to " + host + " returned HTTP " +
                        std::to_string(res->status) +
                        "; check endpoint/credentials and retry");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("response is not JSON: ") + e.what());
  }
  return count_from_json(follow_path(doc, count_path));
}

}  // namespace

LiveProvider::LiveProvider(LiveProviderConfig cfg, Clock& clock)
    : cfg_(std::move(cfg)), limiter_(cfg_.delay, clock) {
  if (cfg_.endpoint.find("{terms}") == std::string::npos)
    throw DataError("live endpoint template must contain {terms}");
}

std::uint64_t LiveProvider::fetch_count(const std::vector<std::string>& terms) {
  if (terms.empty() || terms.size() > 2)
    throw DataError("fetch_count takes one or two terms");
  std::string query = terms[0];
  if (terms.size() == 2) query += cfg_.pair_join + terms[1];

  std::string url = replace_all(cfg_.endpoint, "{terms}", url_encode(query));
  if (url.find("{key}") != std::string::npos) {
    const char* key =
        cfg_.api_key_env.empty() ? nullptr : std::getenv(cfg_.api_key_env.c_str());
    if (!key)
      throw ProviderError("endpoint needs {key} but $" + cfg_.api_key_env +
                          " is not set");
    url = replace_all(url, "{key}", url_encode(key));
  }

  limiter_.await_slot();
  return http_json_count(url, cfg_.count_path);
}

std::optional<std::uint64_t> LiveProvider::reported_index_size() {
  if (cfg_.index_size_endpoint.empty()) return {};
  limiter_.await_slot();
  return http_json_count(cfg_.index_size_endpoint, cfg_.index_size_path);
}

std::string LiveProvider::describe() const {
  // Strip the query part; credentials never leak into provenance.
  auto q = cfg_.endpoint.find('?');
  return "live:" + (q == std::string::npos ? cfg_.endpoint : cfg_.endpoint.substr(0, q));
}

}  // namespace compsim
