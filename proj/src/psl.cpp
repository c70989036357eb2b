#include "lexdom/psl.hpp"

#include <algorithm>
#include <cstdint>
#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

#include "lexdom/error.hpp"

namespace lexdom::psl {
namespace {

constexpr std::string_view kPrivateBegin = "===BEGIN PRIVATE DOMAINS===";
constexpr std::string_view kPrivateEnd = "===END PRIVATE DOMAINS===";

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string lowered(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), ascii_lower);
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

bool has_empty_label(std::string_view s) {
  if (s.empty() || s.front() == '.' || s.back() == '.') return true;
  return s.find("..") != std::string_view::npos;
}

// Offsets at which each label starts, leftmost first.
std::vector<std::size_t> label_starts(std::string_view host) {
  std::vector<std::size_t> starts{0};
  for (std::size_t i = 0; i < host.size(); ++i)
    if (host[i] == '.') starts.push_back(i + 1);
  return starts;
}

// RFC 3492 bootstring parameters.
constexpr std::uint32_t kBase = 36, kTMin = 1, kTMax = 26, kSkew = 38, kDamp = 700;
constexpr std::uint32_t kInitialBias = 72, kInitialN = 128;

std::uint32_t adapt(std::uint32_t delta, std::uint32_t points, bool first) {
  delta = first ? delta / kDamp : delta / 2;
  delta += delta / points;
  std::uint32_t k = 0;
  while (delta > ((kBase - kTMin) * kTMax) / 2) {
    delta /= kBase - kTMin;
    k += kBase;
  }
  return k + (kBase - kTMin + 1) * delta / (delta + kSkew);
}

char digit(std::uint32_t d) { return static_cast<char>(d < 26 ? 'a' + d : '0' + (d - 26)); }

std::vector<std::uint32_t> utf8_code_points(std::string_view s) {
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 6 ? 2 : (c >> 4) == 14 ? 3 : (c >> 3) == 30 ? 4 : 0;
    if (len == 0 || i + len > s.size()) throw DomainError("invalid UTF-8 in '" + std::string(s) + "'");
    std::uint32_t cp = len == 1 ? c : c & (0x7f >> len);
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc >> 6) != 2) throw DomainError("invalid UTF-8 in '" + std::string(s) + "'");
      cp = (cp << 6) | (cc & 0x3f);
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string punycode_label(std::string_view label) {
  const auto cps = utf8_code_points(label);
  std::string out;
  for (auto cp : cps)
    if (cp < 0x80) out.push_back(static_cast<char>(cp));
  const std::uint32_t basic = static_cast<std::uint32_t>(out.size());
  if (basic == cps.size()) return out;
  if (basic > 0) out.push_back('-');
  std::uint32_t n = kInitialN, delta = 0, bias = kInitialBias, handled = basic;
  while (handled < cps.size()) {
    std::uint32_t m = UINT32_MAX;
    for (auto cp : cps)
      if (cp >= n && cp < m) m = cp;
    delta += (m - n) * (handled + 1);
    n = m;
    for (auto cp : cps) {
      if (cp < n) ++delta;
      if (cp != n) continue;
      std::uint32_t q = delta;
      for (std::uint32_t k = kBase;; k += kBase) {
        const std::uint32_t t = k <= bias ? kTMin : k >= bias + kTMax ? kTMax : k - bias;
        if (q < t) break;
        out.push_back(digit(t + (q - t) % (kBase - t)));
        q = (q - t) / (kBase - t);
      }
      out.push_back(digit(q));
      bias = adapt(delta, handled + 1, handled == basic);
      delta = 0;
      ++handled;
    }
    ++delta;
    ++n;
  }
  return "xn--" + out;
}

}  // namespace

std::string to_ace(std::string_view name) {
  std::string out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t dot = std::min(name.find('.', pos), name.size());
    const std::string_view label = name.substr(pos, dot - pos);
    if (std::all_of(label.begin(), label.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; }))
      out.append(label);
    else
      out.append(punycode_label(label));
    if (dot == name.size()) break;
    out.push_back('.');
    pos = dot + 1;
  }
  return out;
}

SuffixRuleSet parse_psl(std::string_view text, const ParseOptions& options) {
  SuffixRuleSet out;
  bool in_private = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = std::min(text.find('\n', pos), text.size());
    const std::string_view line = trim(text.substr(pos, eol - pos));
    ++line_no;
    pos = eol + 1;

    if (line.empty()) continue;
    if (line.starts_with("//")) {
      const std::string_view body = trim(line.substr(2));
      if (body.starts_with(kPrivateBegin)) in_private = true;
      else if (body.starts_with(kPrivateEnd)) in_private = false;
      else if (body.starts_with("VERSION:") && out.source_version_.empty())
        out.source_version_ = std::string(trim(body.substr(8)));
      continue;
    }
    if (std::any_of(line.begin(), line.end(), is_space))
      throw ParseError(line_no, "rule contains whitespace: '" + std::string(line) + "'");

    std::string_view rule = line;
    const bool exception = rule.front() == '!';
    if (exception) rule.remove_prefix(1);
    if (has_empty_label(rule))
      throw ParseError(line_no, "rule has an empty label: '" + std::string(line) + "'");
    if (in_private && !options.include_private) continue;

    std::string key = lowered(rule);
    // Non-ASCII rules also match their punycoded form; hostnames are never decoded.
    std::string ace;
    try {
      ace = to_ace(key);
    } catch (const DomainError&) {
      throw ParseError(line_no, "rule is not valid UTF-8: '" + std::string(line) + "'");
    }
    if (ace != key) {
      if (exception) out.exception_.insert(ace);
      else if (ace.starts_with("*.")) out.wildcard_.insert(ace);
      else out.exact_.insert(ace);
    }
    if (exception) {
      if (key.find('*') != std::string::npos)
        throw ParseError(line_no, "exception rule contains a wildcard: '" + std::string(line) + "'");
      out.exception_.insert(std::move(key));
    } else if (key.starts_with("*.")) {
      out.wildcard_.insert(std::move(key));
    } else if (key == "*") {
      // The implicit default rule; matching already falls back to it.
    } else {
      out.exact_.insert(std::move(key));
    }
  }
  for (const auto& e : out.exception_)
    if (out.exact_.contains(e))
      throw Error("rule '" + e + "' is listed both as exact and as exception");
  return out;
}

SuffixRuleSet load_psl_file(const std::string& path, const ParseOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open public suffix list: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_psl(buf.str(), options);
}

std::optional<std::string_view> SuffixRuleSet::public_suffix(std::string_view host) const {
  if (has_empty_label(host)) return std::nullopt;
  const auto starts = label_starts(host);
  const std::size_t n = starts.size();

  std::optional<std::size_t> best;  // index of the leftmost label of the longest rule match
  std::string wildcard_key;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string_view suffix = host.substr(starts[i]);
    if (exception_.contains(suffix)) {
      // Exception rules prevail; the suffix is the rule minus its leftmost label.
      if (i + 1 == n) return std::nullopt;
      return host.substr(starts[i + 1]);
    }
    if (best) continue;
    if (exact_.contains(suffix)) {
      best = i;
      continue;
    }
    if (i + 1 < n) {
      wildcard_key.assign("*.");
      wildcard_key.append(host.substr(starts[i + 1]));
      if (wildcard_.contains(wildcard_key)) best = i;
    }
  }
  return host.substr(starts[best.value_or(n - 1)]);
}

std::optional<std::string> SuffixRuleSet::registrable_domain(std::string_view host) const {
  const std::string lower = lowered(host);
  const auto suffix = public_suffix(lower);
  if (!suffix || suffix->size() >= lower.size()) return std::nullopt;
  const std::size_t suffix_start = lower.size() - suffix->size();  // points past the '.'
  const std::size_t dot = suffix_start - 1;
  const std::size_t prev_dot = lower.rfind('.', dot - 1);
  const std::size_t core_start = prev_dot == std::string::npos ? 0 : prev_dot + 1;
  return lower.substr(core_start);
}

std::string extract_hostname(std::string_view input) {
  std::string_view s = trim(input);
  if (const auto scheme = s.find("://"); scheme != std::string_view::npos) {
    const std::string_view prefix = s.substr(0, scheme);
    const bool valid_scheme =
        !prefix.empty() && std::all_of(prefix.begin(), prefix.end(), [](char c) {
          return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
        });
    if (valid_scheme) s.remove_prefix(scheme + 3);
  } else if (s.starts_with("//")) {
    s.remove_prefix(2);
  }
  s = s.substr(0, s.find_first_of("/?#"));
  if (const auto at = s.rfind('@'); at != std::string_view::npos) s.remove_prefix(at + 1);
  if (s.starts_with('[')) {
    const auto close = s.find(']');
    s = close == std::string_view::npos ? std::string_view{} : s.substr(0, close + 1);
  } else if (const auto colon = s.find(':'); colon != std::string_view::npos) {
    s = s.substr(0, colon);
  }
  if (s.ends_with('.')) s.remove_suffix(1);
  if (s.empty()) throw DomainError("no host component in '" + std::string(input) + "'");
  return lowered(s);
}

DomainName effective_2ld(std::string_view hostname, const SuffixRuleSet& rules) {
  const auto e2ld = rules.registrable_domain(hostname);
  if (!e2ld) throw DomainError("no registrable domain in '" + std::string(hostname) + "'");
  const std::size_t dot = e2ld->find('.');
  DomainName out{e2ld->substr(0, dot), e2ld->substr(dot + 1)};
  if (out.core.empty()) throw DomainError("empty core in '" + std::string(hostname) + "'");
  const bool valid = std::all_of(out.core.begin(), out.core.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
  });
  if (!valid)
    throw DomainError("core '" + out.core + "' contains characters outside [a-z0-9-]");
  return out;
}

}  // namespace lexdom::psl
