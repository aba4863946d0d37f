// Copyright 2026 The X-Claim Toolkit Authors
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

#define CPPHTTPLIB_OPENSSL_SUPPORT

#include <cstdlib>

#include "httplib.h"
#include "json.hpp"
#include "xclaim/error.h"
#include "xclaim/llm.h"

namespace xclaim {

HttpChatClient::HttpChatClient(std::string url, std::string api_key_env,
                               std::chrono::seconds timeout)
    : api_key_env_(std::move(api_key_env)), timeout_(timeout) {
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint URL '" + url + "' lacks a scheme");
  }
  const std::size_t path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
}

std::string HttpChatClient::Send(const std::string& prompt, const LlmConfig& cfg) const {
  const char* key = std::getenv(api_key_env_.c_str());
  if (key == nullptr || *key == '\0') {
    throw ConfigError("environment variable " + api_key_env_ + " is not set");
  }
  httplib::Client client(origin_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  const httplib::Headers headers = {{"Authorization", std::string("Bearer ") + key}};
  const nlohmann::json body = {
      {"model", cfg.model},
      {"temperature", cfg.temperature},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
  };
  const httplib::Result res = client.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    throw TransportError("request to " + origin_ + " failed: " + httplib::to_string(res.error()),
                         true);
  }
  const int status = res->status;
  const std::string where = origin_ + path_ + " returned HTTP " + std::to_string(status);
  if (status == 401 || status == 403) throw ConfigError("authentication rejected: " + where);
  if (status == 429 || status >= 500) throw TransportError(where, true);
  if (status != 200) throw TransportError(where, false);
  try {
    const nlohmann::json reply = nlohmann::json::parse(res->body);
    const nlohmann::json& content = reply.at("choices").at(0).at("message").at("content");
    return content.is_null() ? std::string() : content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw TransportError("malformed completion from " + origin_ + ": " + e.what(), false);
  }
}

}  // namespace xclaim
