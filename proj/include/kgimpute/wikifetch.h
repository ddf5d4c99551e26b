// Copyright 2026 The kgimpute Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgimpute/common.h"

namespace kgimpute {

enum class FetchStatus { ok, not_found, error };

const char* to_string(FetchStatus s);

struct FetchCacheEntry {
  std::string word;
  std::int64_t fetched_at = 0;  // UTC seconds
  std::string summary;
  std::string definition;
  FetchStatus status = FetchStatus::error;
  std::string resolved_title;  // page title the summary came from, if any

  friend bool operator==(const FetchCacheEntry&, const FetchCacheEntry&) = default;
};

struct HttpResponse {
  int status = 0;  // 0 means the request never completed
  std::string body;
};

class HttpClient {
 public:
  virtual ~HttpClient() = default;
  virtual HttpResponse get(const std::string& url) = 0;
};

/// cpp-httplib backed client; HTTPS needs the library built with OpenSSL.
std::unique_ptr<HttpClient> make_http_client(std::string user_agent = "kgimpute/0.1");

class Clock {
 public:
  virtual ~Clock() = default;
  virtual double now() = 0;  // seconds since the Unix epoch
  virtual void sleep_for(double seconds) = 0;
};

class SystemClock : public Clock {
 public:
  double now() override;
  void sleep_for(double seconds) override;
};

/// Spaces requests at least 1 / max_rps seconds apart.
class RateLimiter {
 public:
  RateLimiter(Clock& clock, double max_rps);
  void acquire();

 private:
  Clock& clock_;
  double interval_;
  std::optional<double> last_;
};

/// On-disk cache: one JSON-lines file per initial letter of the normalized
/// word. The last line for a word wins.
class FetchCache {
 public:
  explicit FetchCache(std::filesystem::path dir);

  /// Spaces become underscores; case is preserved.
  static std::string normalize(const std::string& word);
  std::filesystem::path shard_path(const std::string& word) const;

  std::optional<FetchCacheEntry> find(const std::string& word);
  void store(const FetchCacheEntry& entry);

 private:
  void load_shard(const std::filesystem::path& shard);

  std::filesystem::path dir_;
  std::unordered_map<std::string, std::unordered_map<std::string, FetchCacheEntry>> shards_;
};

/// Base URLs; the URL-encoded title or query is appended.
struct FetchEndpoints {
  std::string summary = "https://en.wikipedia.org/api/rest_v1/page/summary/";
  std::string definition = "https://en.wiktionary.org/api/rest_v1/page/definition/";
  std::string search = "https://en.wikipedia.org/w/rest.php/v1/search/title?limit=1&q=";
};

struct FetchOptions {
  FetchEndpoints endpoints;
  double max_rps = 2.0;
  bool offline = false;
};

struct CorpusCounts {
  std::size_t ok = 0;
  std::size_t not_found = 0;
  std::size_t error = 0;

  friend bool operator==(const CorpusCounts&, const CorpusCounts&) = default;
};

std::string url_encode(const std::string& s);

/// Drops markup tags and decodes the common character entities.
std::string strip_html(const std::string& html);

/// Text of the English senses of a definition-endpoint response, joined by spaces.
std::string parse_definitions(const std::string& json_body);

class WikiFetcher {
 public:
  /// `http` may be null when `opts.offline` is set.
  WikiFetcher(FetchCache& cache, HttpClient* http, Clock& clock, FetchOptions opts = {});

  /// Cached entry if present. Otherwise queries the summary endpoint (exact
  /// title, then the top search hit) and the definition endpoint. Only ok and
  /// not_found results are cached, so errors are retried on the next run.
  FetchCacheEntry fetch_word(const std::string& word);

  /// Writes `word<TAB>summary<TAB>definition` for every ok word, in input order.
  CorpusCounts build_corpus(const std::vector<std::string>& words, const std::filesystem::path& out);

  std::size_t network_calls() const { return calls_; }

 private:
  HttpResponse request(const std::string& url);

  FetchCache& cache_;
  HttpClient* http_;
  Clock& clock_;
  FetchOptions opts_;
  RateLimiter limiter_;
  std::size_t calls_ = 0;
};

FetchCacheEntry fetch_word(const std::string& word, const std::filesystem::path& cache_dir, bool offline);

CorpusCounts build_corpus(const std::vector<std::string>& words, const std::filesystem::path& cache_dir,
                          const std::filesystem::path& out, const FetchOptions& opts = {});

}  // namespace kgimpute
