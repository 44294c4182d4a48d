// Copyright 2026 The groundrl Authors
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

#include <cstdlib>
#include <string>

#include "groundrl/curation.hpp"
#include "groundrl/errors.hpp"
#include "httplib.h"
#include "json.hpp"

namespace groundrl::curation {

struct HttpJudge::Impl {
  HttpJudgeConfig cfg;
  std::string origin;  // scheme://host[:port]
  std::string path;
  std::string token;
};

namespace {

void split_url(const std::string& url, std::string& origin, std::string& path) {
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("judge url needs a scheme: " + url);
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw ConfigError("judge url scheme must be http or https: " + url);
  }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") throw ConfigError("built without TLS support; use an http judge url");
#endif
  const std::size_t path_start = url.find('/', scheme_end + 3);
  origin = url.substr(0, path_start);
  path = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (origin.size() <= scheme_end + 3) throw ConfigError("judge url has no host: " + url);
}

}  // namespace

HttpJudge::HttpJudge(HttpJudgeConfig cfg) : impl_(std::make_unique<Impl>()) {
  if (cfg.model.empty()) throw ConfigError("judge model name is empty");
  if (cfg.timeout_seconds < 1) throw ConfigError("judge timeout must be >= 1 s");
  split_url(cfg.url, impl_->origin, impl_->path);
  if (const char* t = std::getenv(cfg.token_env.c_str())) impl_->token = t;
  impl_->cfg = std::move(cfg);
}

HttpJudge::~HttpJudge() = default;

std::string HttpJudge::complete(const JudgeRequest& request) {
  // One client per call keeps concurrent callers independent.
  httplib::Client client(impl_->origin);
  client.set_connection_timeout(impl_->cfg.timeout_seconds, 0);
  client.set_read_timeout(impl_->cfg.timeout_seconds, 0);
  client.set_write_timeout(impl_->cfg.timeout_seconds, 0);

  httplib::Headers headers;
  if (!impl_->token.empty()) headers.emplace("Authorization", "Bearer " + impl_->token);

  nlohmann::ordered_json body;
  body["model"] = impl_->cfg.model;
  body["messages"] = nlohmann::ordered_json::array(
      {nlohmann::ordered_json{{"role", "user"}, {"content", request.prompt}}});

  const auto res = client.Post(impl_->path, headers, body.dump(), "application/json");
  if (!res) {
    throw TransportError("judge request failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 429 || res->status >= 500) {
    throw TransportError("judge returned HTTP " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw DataError("judge returned HTTP " + std::to_string(res->status));
  }
  try {
    const auto doc = nlohmann::json::parse(res->body);
    return doc.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("judge response lacks choices[0].message.content: ") + e.what());
  }
}

}  // namespace groundrl::curation
