#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <string_view>

namespace localmine {

struct FetchResponse {
  int status = 0;  // HTTP status; 0 when the request failed in transport
  std::string content_type;
  std::string body;
  std::string final_url;
  std::string error;

  bool ok() const { return status >= 200 && status < 300; }
};

/// The single injection point for network I/O.
class Fetcher {
 public:
  virtual ~Fetcher() = default;
  virtual FetchResponse fetch(const std::string& url, std::chrono::milliseconds timeout) = 0;
};

/// Plain HTTP(S) GET following at most five redirects.
class HttpFetcher final : public Fetcher {
 public:
  explicit HttpFetcher(std::string user_agent = "localmine/1.0") : user_agent_(std::move(user_agent)) {}
  FetchResponse fetch(const std::string& url, std::chrono::milliseconds timeout) override;

  static constexpr int kMaxRedirects = 5;

 private:
  std::string user_agent_;
};

/// Serves a fixed URL → response table; unknown URLs answer 404.
class InMemoryFetcher : public Fetcher {
 public:
  void add(const std::string& url, std::string content_type, std::string body, int status = 200);
  FetchResponse fetch(const std::string& url, std::chrono::milliseconds timeout) override;
  std::size_t size() const { return pages_.size(); }

 private:
  std::map<std::string, FetchResponse> pages_;
  std::mutex mu_;
};

class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ms() = 0;
  virtual void sleep_ms(std::int64_t ms) = 0;
};

class SystemClock final : public Clock {
 public:
  std::int64_t now_ms() override;
  void sleep_ms(std::int64_t ms) override;
};

/// Virtual time that only advances when slept; makes crawls reproducible.
class ManualClock final : public Clock {
 public:
  std::int64_t now_ms() override { return now_; }
  void sleep_ms(std::int64_t ms) override {
    if (ms > 0) now_ += ms;
  }
  void advance(std::int64_t ms) { now_ += ms; }

 private:
  std::int64_t now_ = 0;
};

}  // namespace localmine
