#include "localmine/url.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

#include "localmine/error.hpp"

namespace localmine {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

int default_port(std::string_view scheme) { return scheme == "https" ? 443 : 80; }

// Removes "." and ".." segments.
std::string remove_dot_segments(std::string_view path) {
  std::vector<std::string> segs;
  std::size_t i = 0;
  const bool absolute = !path.empty() && path[0] == '/';
  if (absolute) i = 1;
  bool trailing = false;
  while (i <= path.size()) {
    std::size_t j = path.find('/', i);
    if (j == std::string_view::npos) j = path.size();
    std::string_view seg = path.substr(i, j - i);
    trailing = false;
    if (seg == ".") {
      trailing = true;
    } else if (seg == "..") {
      if (!segs.empty()) segs.pop_back();
      trailing = true;
    } else {
      segs.emplace_back(seg);
    }
    i = j + 1;
  }
  std::string out = absolute ? "/" : "";
  for (std::size_t k = 0; k < segs.size(); ++k) {
    if (k) out += '/';
    out += segs[k];
  }
  if (trailing && (out.empty() || out.back() != '/')) out += '/';
  return out.empty() ? "/" : out;
}

}  // namespace

std::optional<Url> Url::parse(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  const auto colon = text.find("://");
  if (colon == std::string_view::npos) return std::nullopt;
  Url u;
  u.scheme = lower(text.substr(0, colon));
  if (u.scheme != "http" && u.scheme != "https") return std::nullopt;
  std::string_view rest = text.substr(colon + 3);
  if (const auto hash = rest.find('#'); hash != std::string_view::npos) rest = rest.substr(0, hash);
  const auto auth_end = rest.find_first_of("/?");
  std::string_view authority = rest.substr(0, auth_end);
  rest = auth_end == std::string_view::npos ? std::string_view{} : rest.substr(auth_end);
  if (const auto at = authority.rfind('@'); at != std::string_view::npos) authority = authority.substr(at + 1);
  if (authority.empty()) return std::nullopt;
  std::string_view host = authority;
  if (const auto pc = authority.rfind(':'); pc != std::string_view::npos && authority.find(']') == std::string_view::npos) {
    host = authority.substr(0, pc);
    const std::string_view port = authority.substr(pc + 1);
    if (!port.empty()) {
      if (!std::all_of(port.begin(), port.end(), [](unsigned char c) { return std::isdigit(c); }) ||
          port.size() > 5)
        return std::nullopt;
      u.port = std::stoi(std::string(port));
      if (u.port == default_port(u.scheme)) u.port = 0;
    }
  }
  if (host.empty()) return std::nullopt;
  for (char c : host) {
    const auto uc = static_cast<unsigned char>(c);
    if (!(std::isalnum(uc) || c == '-' || c == '.' || c == '_' || c == '[' || c == ']' || c == ':' || uc >= 0x80))
      return std::nullopt;
  }
  u.host = lower(host);
  while (!u.host.empty() && u.host.back() == '.') u.host.pop_back();
  if (u.host.empty()) return std::nullopt;
  const auto q = rest.find('?');
  const std::string_view path = rest.substr(0, q);
  u.path = path.empty() ? "/" : remove_dot_segments(path);
  if (q != std::string_view::npos) u.query = std::string(rest.substr(q + 1));
  return u;
}

std::optional<Url> Url::resolve(std::string_view ref) const {
  while (!ref.empty() && std::isspace(static_cast<unsigned char>(ref.front()))) ref.remove_prefix(1);
  while (!ref.empty() && std::isspace(static_cast<unsigned char>(ref.back()))) ref.remove_suffix(1);
  if (const auto hash = ref.find('#'); hash != std::string_view::npos) ref = ref.substr(0, hash);
  const auto scheme_end = ref.find(':');
  const auto first_delim = ref.find_first_of("/?");
  if (scheme_end != std::string_view::npos && (first_delim == std::string_view::npos || scheme_end < first_delim)) {
    return parse(ref);  // absolute (http/https only)
  }
  if (ref.substr(0, 2) == "//") return parse(scheme + ":" + std::string(ref));
  Url out = *this;
  if (ref.empty()) return out;
  const auto q = ref.find('?');
  const std::string_view rpath = ref.substr(0, q);
  out.query = q == std::string_view::npos ? std::string{} : std::string(ref.substr(q + 1));
  if (rpath.empty()) {
    if (q == std::string_view::npos) out.query = query;
    return out;
  }
  if (rpath[0] == '/') {
    out.path = remove_dot_segments(rpath);
  } else {
    const auto slash = path.rfind('/');
    const std::string dir = slash == std::string::npos ? "/" : path.substr(0, slash + 1);
    out.path = remove_dot_segments(dir + std::string(rpath));
  }
  return out;
}

std::string Url::origin() const {
  std::string out = scheme + "://" + host;
  if (port != 0) out += ":" + std::to_string(port);
  return out;
}

std::string Url::path_and_query() const { return query.empty() ? path : path + "?" + query; }

std::string Url::str() const { return origin() + path_and_query(); }

// Built-in suffix rules. A full publicsuffix.org list can be loaded
// instead through PublicSuffixList::from_file.
static constexpr std::string_view kBuiltinSuffixes = R"(
com
net
org
edu
gov
mil
int
info
biz
name
io
co
me
tv
cc
asia
xyz
top
site
online
jp
co.jp
ne.jp
or.jp
ac.jp
ad.jp
ed.jp
go.jp
gr.jp
lg.jp
cn
com.cn
net.cn
org.cn
gov.cn
edu.cn
ac.cn
tw
com.tw
net.tw
org.tw
edu.tw
gov.tw
idv.tw
hk
com.hk
net.hk
org.hk
edu.hk
gov.hk
idv.hk
mo
com.mo
sg
com.sg
kr
co.kr
or.kr
ne.kr
ac.kr
go.kr
uk
co.uk
org.uk
ac.uk
gov.uk
au
com.au
net.au
org.au
edu.au
de
fr
us
ca
eu
)";

PublicSuffixList PublicSuffixList::from_string(std::string_view text) {
  PublicSuffixList psl;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto end = line.find_first_of(" \t\r");
    if (end != std::string::npos) line.resize(end);
    if (line.empty() || line.rfind("//", 0) == 0) continue;
    line = lower(line);
    if (line.rfind("*.", 0) == 0) {
      psl.wildcards_.insert(line.substr(2));
    } else if (line[0] == '!') {
      psl.exceptions_.insert(line.substr(1));
    } else {
      psl.rules_.insert(line);
    }
  }
  return psl;
}

const PublicSuffixList& PublicSuffixList::builtin() {
  static const PublicSuffixList list = from_string(kBuiltinSuffixes);
  return list;
}

PublicSuffixList PublicSuffixList::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FatalError("cannot read public suffix list: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

std::string PublicSuffixList::registrable_domain(std::string_view host_in) const {
  std::string host = lower(host_in);
  while (!host.empty() && host.back() == '.') host.pop_back();
  if (host.empty() || host.front() == '[') return host;
  if (std::all_of(host.begin(), host.end(), [](unsigned char c) { return std::isdigit(c) || c == '.'; }))
    return host;

  std::vector<std::size_t> starts{0};
  for (std::size_t i = 0; i < host.size(); ++i) {
    if (host[i] == '.') starts.push_back(i + 1);
  }
  // Find the longest matching suffix; default rule "*" means the last label.
  std::size_t suffix_labels = 1;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    const std::string candidate = host.substr(starts[k]);
    const std::size_t labels = starts.size() - k;
    if (exceptions_.count(candidate)) {
      suffix_labels = labels - 1;
      break;
    }
    if (rules_.count(candidate)) {
      suffix_labels = std::max(suffix_labels, labels);
      break;
    }
    if (k + 1 < starts.size() && wildcards_.count(host.substr(starts[k + 1]))) {
      suffix_labels = std::max(suffix_labels, labels);
      break;
    }
  }
  if (suffix_labels >= starts.size()) return host;
  return host.substr(starts[starts.size() - suffix_labels - 1]);
}

std::string registrable_domain(std::string_view url_or_host) {
  if (url_or_host.find("://") != std::string_view::npos) {
    const auto u = Url::parse(url_or_host);
    if (!u) return {};
    return PublicSuffixList::builtin().registrable_domain(u->host);
  }
  return PublicSuffixList::builtin().registrable_domain(url_or_host);
}

}  // namespace localmine
