#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>

namespace localmine {

/// Absolute http(s) URL split into its components. Host is lowercased;
/// the default port and fragment are dropped.
struct Url {
  std::string scheme;
  std::string host;
  int port = 0;  // 0 = scheme default
  std::string path = "/";
  std::string query;  // without '?'

  static std::optional<Url> parse(std::string_view text);

  /// RFC 3986 reference resolution against this base. Returns nullopt for
  /// non-http(s) targets such as mailto: or javascript:.
  std::optional<Url> resolve(std::string_view reference) const;

  std::string origin() const;
  /// Path plus "?query" when present.
  std::string path_and_query() const;
  std::string str() const;

  bool operator==(const Url&) const = default;
};

/// Public-suffix rules in the publicsuffix.org file format (plain rules,
/// "*." wildcards and "!" exceptions).
class PublicSuffixList {
 public:
  /// Compact built-in list covering generic TLDs and the common
  /// second-level registries of jp/cn/tw/hk/kr/uk/au.
  static const PublicSuffixList& builtin();
  static PublicSuffixList from_file(const std::string& path);
  static PublicSuffixList from_string(std::string_view text);

  /// eTLD+1 of host. IP literals and hosts that are themselves a public
  /// suffix are returned unchanged.
  std::string registrable_domain(std::string_view host) const;

 private:
  std::unordered_set<std::string> rules_;
  std::unordered_set<std::string> wildcards_;
  std::unordered_set<std::string> exceptions_;
};

/// Registrable domain of an absolute URL or bare host under the built-in list.
std::string registrable_domain(std::string_view url_or_host);

}  // namespace localmine
