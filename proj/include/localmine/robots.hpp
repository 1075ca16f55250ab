#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace localmine {

/// robots.txt rules for one user agent. Longest matching pattern wins,
/// Allow wins ties; '*' and a trailing '$' are supported.
class RobotsRules {
 public:
  static RobotsRules allow_all() { return {}; }
  static RobotsRules parse(std::string_view robots_txt, std::string_view user_agent);

  bool allowed(std::string_view path_and_query) const;
  std::int64_t crawl_delay_ms() const { return crawl_delay_ms_; }

 private:
  struct Rule {
    std::string pattern;
    bool allow = false;
  };
  std::vector<Rule> rules_;
  std::int64_t crawl_delay_ms_ = 0;
};

}  // namespace localmine
