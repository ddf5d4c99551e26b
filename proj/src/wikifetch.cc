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

#include "kgimpute/wikifetch.h"

#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include "json.hpp"

namespace kgimpute {

namespace {

using nlohmann::json;

std::string flatten_whitespace(std::string s) {
  for (char& c : s)
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  const auto b = s.find_first_not_of(' ');
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(' ') - b + 1);
}

FetchStatus parse_status(const std::string& s) {
  if (s == "ok") return FetchStatus::ok;
  if (s == "not_found") return FetchStatus::not_found;
  if (s == "error") return FetchStatus::error;
  throw Error("unknown fetch status '" + s + "'");
}

json to_json(const FetchCacheEntry& e) {
  json j;
  j["word"] = e.word;
  j["fetched_at"] = e.fetched_at;
  j["status"] = to_string(e.status);
  j["resolved_title"] = e.resolved_title;
  j["summary"] = e.summary;
  j["definition"] = e.definition;
  return j;
}

FetchCacheEntry from_json(const json& j) {
  FetchCacheEntry e;
  e.word = j.at("word").get<std::string>();
  e.fetched_at = j.at("fetched_at").get<std::int64_t>();
  e.status = parse_status(j.at("status").get<std::string>());
  e.resolved_title = j.value("resolved_title", std::string());
  e.summary = j.at("summary").get<std::string>();
  e.definition = j.at("definition").get<std::string>();
  return e;
}

}  // namespace

const char* to_string(FetchStatus s) {
  switch (s) {
    case FetchStatus::ok: return "ok";
    case FetchStatus::not_found: return "not_found";
    case FetchStatus::error: return "error";
  }
  return "error";
}

double SystemClock::now() {
  using namespace std::chrono;
  return duration<double>(system_clock::now().time_since_epoch()).count();
}

void SystemClock::sleep_for(double seconds) {
  if (seconds > 0) std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

RateLimiter::RateLimiter(Clock& clock, double max_rps) : clock_(clock) {
  if (!(max_rps > 0)) throw Error("max_rps must be positive");
  interval_ = 1.0 / max_rps;
}

void RateLimiter::acquire() {
  double t = clock_.now();
  if (last_ && t < *last_ + interval_) {
    clock_.sleep_for(*last_ + interval_ - t);
    t = std::max(clock_.now(), *last_ + interval_);
  }
  last_ = t;
}

FetchCache::FetchCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::string FetchCache::normalize(const std::string& word) {
  std::string out = flatten_whitespace(word);
  for (char& c : out)
    if (c == ' ') c = '_';
  return out;
}

std::filesystem::path FetchCache::shard_path(const std::string& word) const {
  const std::string key = normalize(word);
  char c = key.empty() ? '_' : key.front();
  if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))) c = '_';
  return dir_ / (std::string(1, c) + ".jsonl");
}

void FetchCache::load_shard(const std::filesystem::path& shard) {
  auto& entries = shards_[shard.string()];
  std::ifstream in(shard);
  if (!in) return;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      auto e = from_json(json::parse(line));
      entries[normalize(e.word)] = std::move(e);
    } catch (const std::exception& ex) {
      throw ParseError(shard.string(), lineno, std::string("bad cache line: ") + ex.what());
    }
  }
}

std::optional<FetchCacheEntry> FetchCache::find(const std::string& word) {
  const auto shard = shard_path(word);
  if (!shards_.count(shard.string())) load_shard(shard);
  const auto& entries = shards_[shard.string()];
  auto it = entries.find(normalize(word));
  if (it == entries.end()) return std::nullopt;
  return it->second;
}

void FetchCache::store(const FetchCacheEntry& entry) {
  const auto shard = shard_path(entry.word);
  if (!shards_.count(shard.string())) load_shard(shard);
  std::filesystem::create_directories(dir_);
  std::ofstream out(shard, std::ios::app | std::ios::binary);
  if (!out) throw Error("cannot write cache file " + shard.string());
  out << to_json(entry).dump() << '\n';
  if (!out) throw Error("write failed for " + shard.string());
  shards_[shard.string()][normalize(entry.word)] = entry;
}

std::string url_encode(const std::string& s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
        c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

std::string strip_html(const std::string& html) {
  std::string text;
  bool in_tag = false;
  for (char c : html) {
    if (c == '<') {
      in_tag = true;
    } else if (c == '>' && in_tag) {
      in_tag = false;
    } else if (!in_tag) {
      text += c;
    }
  }
  static const std::pair<const char*, const char*> entities[] = {
      {"&amp;", "&"}, {"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""}, {"&#39;", "'"}, {"&nbsp;", " "}};
  for (const auto& [from, to] : entities) {
    const std::string f(from);
    for (auto pos = text.find(f); pos != std::string::npos; pos = text.find(f, pos + 1))
      text.replace(pos, f.size(), to);
  }
  return text;
}

std::string parse_definitions(const std::string& json_body) {
  const json j = json::parse(json_body);
  std::string out;
  if (!j.contains("en")) return out;
  for (const auto& usage : j.at("en")) {
    if (!usage.contains("definitions")) continue;
    for (const auto& d : usage.at("definitions")) {
      std::string text = flatten_whitespace(strip_html(d.value("definition", std::string())));
      if (text.empty()) continue;
      if (!out.empty()) out += ' ';
      out += text;
    }
  }
  return out;
}

WikiFetcher::WikiFetcher(FetchCache& cache, HttpClient* http, Clock& clock, FetchOptions opts)
    : cache_(cache), http_(http), clock_(clock), opts_(std::move(opts)), limiter_(clock, opts_.max_rps) {
  if (!http_ && !opts_.offline) throw Error("online fetching needs an HTTP client");
}

HttpResponse WikiFetcher::request(const std::string& url) {
  limiter_.acquire();
  ++calls_;
  return http_->get(url);
}

FetchCacheEntry WikiFetcher::fetch_word(const std::string& word) {
  if (auto hit = cache_.find(word)) return *hit;

  FetchCacheEntry entry;
  entry.word = FetchCache::normalize(word);
  entry.fetched_at = static_cast<std::int64_t>(std::floor(clock_.now()));
  if (opts_.offline) return entry;  // status error, nothing cached

  bool failed = false;
  const std::string title = url_encode(entry.word);
  try {
    auto read_summary = [&](const std::string& t) -> HttpResponse {
      auto r = request(opts_.endpoints.summary + url_encode(t));
      if (r.status == 200) {
        const json j = json::parse(r.body);
        entry.summary = flatten_whitespace(j.value("extract", std::string()));
        entry.resolved_title = j.value("title", t);
      }
      return r;
    };
    auto r = read_summary(entry.word);
    if (r.status == 404) {
      auto s = request(opts_.endpoints.search + title);
      if (s.status == 200) {
        const json j = json::parse(s.body);
        if (j.contains("pages") && !j["pages"].empty()) {
          const std::string key = j["pages"][0].value("key", std::string());
          if (!key.empty()) {
            r = read_summary(key);
            if (r.status != 200 && r.status != 404) failed = true;
          }
        }
      } else if (s.status != 404) {
        failed = true;
      }
    } else if (r.status != 200) {
      failed = true;
    }

    auto d = request(opts_.endpoints.definition + title);
    if (d.status == 200) {
      entry.definition = parse_definitions(d.body);
    } else if (d.status != 404) {
      failed = true;
    }
  } catch (const json::exception&) {
    failed = true;
  }

  if (failed) {
    entry.status = FetchStatus::error;
    return entry;
  }
  entry.status = entry.summary.empty() && entry.definition.empty() ? FetchStatus::not_found : FetchStatus::ok;
  cache_.store(entry);
  return entry;
}

CorpusCounts WikiFetcher::build_corpus(const std::vector<std::string>& words, const std::filesystem::path& out) {
  std::ofstream file(out, std::ios::binary | std::ios::trunc);
  if (!file) throw Error("cannot write corpus file " + out.string());
  CorpusCounts counts;
  for (const auto& w : words) {
    const auto e = fetch_word(w);
    switch (e.status) {
      case FetchStatus::ok:
        ++counts.ok;
        file << FetchCache::normalize(w) << '\t' << flatten_whitespace(e.summary) << '\t'
             << flatten_whitespace(e.definition) << '\n';
        break;
      case FetchStatus::not_found: ++counts.not_found; break;
      case FetchStatus::error: ++counts.error; break;
    }
  }
  if (!file) throw Error("write failed for " + out.string());
  return counts;
}

FetchCacheEntry fetch_word(const std::string& word, const std::filesystem::path& cache_dir, bool offline) {
  FetchCache cache(cache_dir);
  SystemClock clock;
  FetchOptions opts;
  opts.offline = offline;
  auto http = offline ? nullptr : make_http_client();
  WikiFetcher fetcher(cache, http.get(), clock, opts);
  return fetcher.fetch_word(word);
}

CorpusCounts build_corpus(const std::vector<std::string>& words, const std::filesystem::path& cache_dir,
                          const std::filesystem::path& out, const FetchOptions& opts) {
  FetchCache cache(cache_dir);
  SystemClock clock;
  auto http = opts.offline ? nullptr : make_http_client();
  WikiFetcher fetcher(cache, http.get(), clock, opts);
  return fetcher.build_corpus(words, out);
}

}  // namespace kgimpute
