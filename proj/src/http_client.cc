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

// Eigen must precede httplib.h: <resolv.h> defines a `_res` macro.
#include "kgimpute/wikifetch.h"

#include <map>
#include <memory>

#include "httplib.h"

namespace kgimpute {

namespace {

class HttplibClient : public HttpClient {
 public:
  explicit HttplibClient(std::string user_agent) : user_agent_(std::move(user_agent)) {}

  HttpResponse get(const std::string& url) override {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) return {};
    const auto path_start = url.find('/', scheme_end + 3);
    const std::string origin = url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

    auto& cli = clients_[origin];
    if (!cli) {
      cli = std::make_unique<httplib::Client>(origin);
      if (!cli->is_valid()) {
        clients_.erase(origin);
        return {};
      }
      cli->set_follow_location(true);
      cli->set_connection_timeout(10);
      cli->set_read_timeout(30);
    }
    auto res = cli->Get(path, httplib::Headers{{"User-Agent", user_agent_}});
    if (!res) return {};
    return {res->status, res->body};
  }

 private:
  std::string user_agent_;
  std::map<std::string, std::unique_ptr<httplib::Client>> clients_;
};

}  // namespace

std::unique_ptr<HttpClient> make_http_client(std::string user_agent) {
  return std::make_unique<HttplibClient>(std::move(user_agent));
}

}  // namespace kgimpute
