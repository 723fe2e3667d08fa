#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <utility>

#include <httplib.h>

#include "emotutor/errors.hpp"

namespace emotutor::http {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;    // always starts with '/'
};

inline Url split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("URL lacks a scheme: " + url);
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw ConfigError("unsupported URL scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

struct Response {
  int status = 0;
  std::string body;
};

/// POSTs `body` and returns the response, or nullopt on any transport failure
/// (refused connection, timeout, TLS error).
inline std::optional<Response> post(const std::string& url, const std::string& body,
                                    const std::string& content_type, std::chrono::milliseconds timeout,
                                    const httplib::Headers& headers = {}) {
  const auto [origin, path] = split_url(url);
  httplib::Client client(origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  auto result = client.Post(path, headers, body, content_type);
  if (!result) return std::nullopt;
  return Response{result->status, result->body};
}

}  // namespace emotutor::http
