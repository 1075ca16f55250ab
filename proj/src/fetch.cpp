#include "localmine/fetch.hpp"

#include <httplib.h>

#include <thread>

#include "localmine/url.hpp"

namespace localmine {

namespace {

std::string canonical(const std::string& url) {
  const auto u = Url::parse(url);
  return u ? u->str() : url;
}

}  // namespace

FetchResponse HttpFetcher::fetch(const std::string& url, std::chrono::milliseconds timeout) {
  FetchResponse out;
  std::string current = url;
  for (int hop = 0; hop <= kMaxRedirects; ++hop) {
    const auto u = Url::parse(current);
    if (!u) {
      out.error = "malformed url";
      return out;
    }
    httplib::Client client(u->origin());
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_follow_location(false);
    auto res = client.Get(u->path_and_query(), httplib::Headers{{"User-Agent", user_agent_}});
    if (!res) {
      out.status = 0;
      out.error = httplib::to_string(res.error());
      return out;
    }
    if (res->status >= 300 && res->status < 400 && res->has_header("Location")) {
      const auto next = u->resolve(res->get_header_value("Location"));
      if (!next) {
        out.status = res->status;
        out.error = "bad redirect";
        return out;
      }
      current = next->str();
      continue;
    }
    out.status = res->status;
    out.content_type = res->get_header_value("Content-Type");
    out.body = std::move(res->body);
    out.final_url = current;
    return out;
  }
  out.status = 0;
  out.error = "too many redirects";
  return out;
}

void InMemoryFetcher::add(const std::string& url, std::string content_type, std::string body, int status) {
  FetchResponse r;
  r.status = status;
  r.content_type = std::move(content_type);
  r.body = std::move(body);
  r.final_url = canonical(url);
  std::lock_guard lock(mu_);
  pages_[r.final_url] = std::move(r);
}

FetchResponse InMemoryFetcher::fetch(const std::string& url, std::chrono::milliseconds) {
  std::lock_guard lock(mu_);
  const auto it = pages_.find(canonical(url));
  if (it == pages_.end()) {
    FetchResponse r;
    r.status = 404;
    r.final_url = url;
    return r;
  }
  return it->second;
}

std::int64_t SystemClock::now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

void SystemClock::sleep_ms(std::int64_t ms) {
  if (ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(ms));
}

}  // namespace localmine
