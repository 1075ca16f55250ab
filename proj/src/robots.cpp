#include "localmine/robots.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace localmine {

namespace {

std::string trim_lower_key(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool matches(std::string_view pattern, std::string_view path) {
  bool anchored = !pattern.empty() && pattern.back() == '$';
  if (anchored) pattern.remove_suffix(1);
  // match[i][j]: pattern[0..i) matches a prefix path[0..j)
  std::vector<char> prev(path.size() + 1, 0), cur(path.size() + 1, 0);
  prev[0] = 1;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    std::fill(cur.begin(), cur.end(), 0);
    if (pattern[i] == '*') {
      char seen = 0;
      for (std::size_t j = 0; j <= path.size(); ++j) {
        seen = seen || prev[j];
        cur[j] = seen;
      }
    } else {
      for (std::size_t j = 1; j <= path.size(); ++j) cur[j] = prev[j - 1] && path[j - 1] == pattern[i];
    }
    std::swap(prev, cur);
  }
  if (anchored) return prev[path.size()];
  return std::any_of(prev.begin(), prev.end(), [](char c) { return c != 0; });
}

}  // namespace

RobotsRules RobotsRules::parse(std::string_view txt, std::string_view user_agent) {
  struct Group {
    std::vector<std::string> agents;
    std::vector<Rule> rules;
    std::int64_t delay_ms = 0;
  };
  std::vector<Group> groups;
  bool in_agents = false;
  std::istringstream in{std::string(txt)};
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    const std::string key = trim_lower_key(std::string_view(line).substr(0, colon));
    const std::string value(trim(std::string_view(line).substr(colon + 1)));
    if (key == "user-agent") {
      if (!in_agents) groups.emplace_back();
      in_agents = true;
      std::string agent;
      for (char c : value) agent.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
      groups.back().agents.push_back(agent);
      continue;
    }
    if (groups.empty()) continue;
    in_agents = false;
    if (key == "disallow") {
      if (!value.empty()) groups.back().rules.push_back({value, false});
    } else if (key == "allow") {
      if (!value.empty()) groups.back().rules.push_back({value, true});
    } else if (key == "crawl-delay") {
      try {
        groups.back().delay_ms = static_cast<std::int64_t>(std::stod(value) * 1000.0);
      } catch (const std::exception&) {
      }
    }
  }

  std::string ua;
  for (char c : user_agent) ua.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  const Group* best = nullptr;
  std::size_t best_len = 0;
  const Group* star = nullptr;
  for (const auto& g : groups) {
    for (const auto& a : g.agents) {
      if (a == "*") {
        if (!star) star = &g;
      } else if (!a.empty() && ua.find(a) != std::string::npos && a.size() > best_len) {
        best = &g;
        best_len = a.size();
      }
    }
  }
  if (!best) best = star;
  RobotsRules out;
  if (best) {
    out.rules_ = best->rules;
    out.crawl_delay_ms_ = best->delay_ms;
  }
  return out;
}

bool RobotsRules::allowed(std::string_view path) const {
  std::size_t best_len = 0;
  bool verdict = true;
  bool any = false;
  for (const auto& r : rules_) {
    if (!matches(r.pattern, path)) continue;
    const std::size_t len = r.pattern.size();
    if (!any || len > best_len || (len == best_len && r.allow)) {
      verdict = r.allow;
      best_len = len;
      any = true;
    }
  }
  return verdict;
}

}  // namespace localmine
