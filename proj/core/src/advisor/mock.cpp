#include <algorithm>
#include <regex>
#include <set>

#include "pentestxx/advisor/advisor.hpp"
#include "pentestxx/common/strings.hpp"

namespace pentestxx::advisor {

namespace {

bool is_hex32(std::string_view s) {
  return s.size() == 32 && std::all_of(s.begin(), s.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); });
}

std::string normalized_key(std::string_view key) {
  std::string out;
  for (char c : key) {
    if (std::isalnum(static_cast<unsigned char>(c))) out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::optional<FindingKind> classify_key(std::string_view key) {
  const auto k = normalized_key(key);
  if (k.empty()) return std::nullopt;
  if (k.find("regno") != std::string::npos || k.find("pincode") != std::string::npos) return FindingKind::identifier;
  if (k.find("password") != std::string::npos || k.find("passwd") != std::string::npos || k == "pass" ||
      k == "pwd" || k.find("secret") != std::string::npos) {
    return FindingKind::credential;
  }
  if (k == "user" || k == "username" || k == "login" || k == "uname" || k.ends_with("user") || k.ends_with("username")) {
    return FindingKind::username;
  }
  return std::nullopt;
}

std::string strip_quotes(std::string_view v) {
  v = trim(v);
  while (!v.empty() && (v.back() == ',' || v.back() == ';')) v = rtrim(v.substr(0, v.size() - 1));
  if (v.size() >= 2 && (v.front() == '\'' || v.front() == '"' || v.front() == '`') && v.back() == v.front()) {
    v = v.substr(1, v.size() - 2);
  }
  return std::string(v);
}

std::string collapse_ws(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = true;
    } else {
      if (space && !out.empty()) out.push_back(' ');
      space = false;
      out.push_back(c);
    }
  }
  return out;
}

// Splits "a, 'b, c', d" on top-level commas.
std::vector<std::string> split_sql_list(std::string_view list) {
  std::vector<std::string> items;
  std::string cur;
  char quote = 0;
  for (char c : list) {
    if (quote) {
      cur.push_back(c);
      if (c == quote) quote = 0;
    } else if (c == '\'' || c == '"' || c == '`') {
      quote = c;
      cur.push_back(c);
    } else if (c == ',') {
      items.push_back(strip_quotes(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!trim(cur).empty()) items.push_back(strip_quotes(cur));
  return items;
}

struct KeyValue {
  std::string key;
  std::string value;
};

std::vector<KeyValue> key_values(std::string_view content, const std::vector<std::string>& statements) {
  static const std::regex kv_re(R"(^\s*-?\s*["']?([A-Za-z_][\w .-]{0,40}?)["']?\s*[:=]\s*(.+?)\s*$)");
  static const std::regex insert_re(R"(INSERT\s+INTO\s+\S+\s*\(([^)]*)\)\s*VALUES\s*\(([^)]*)\))", std::regex::icase);
  std::vector<KeyValue> pairs;
  for (auto line : split_lines(content)) {
    std::string l(line);
    if (icontains(l, "insert") && icontains(l, "into")) continue;
    std::smatch m;
    if (std::regex_match(l, m, kv_re)) pairs.push_back({m[1].str(), strip_quotes(m[2].str())});
  }
  for (const auto& stmt : statements) {
    std::smatch m;
    if (!std::regex_search(stmt, m, insert_re)) continue;
    auto cols = split_sql_list(m[1].str());
    auto vals = split_sql_list(m[2].str());
    for (std::size_t i = 0; i < cols.size() && i < vals.size(); ++i) pairs.push_back({cols[i], vals[i]});
  }
  return pairs;
}

}  // namespace

Advice mock_analyze(std::string_view artifact_name, std::string_view content) {
  static const std::regex hex_re(R"((?:^|[^0-9A-Fa-f])([0-9A-Fa-f]{32})(?=$|[^0-9A-Fa-f]))");
  static const std::regex sql_re(R"(INSERT\s+INTO\b[^;]*;?)", std::regex::icase);
  (void)artifact_name;

  Advice advice;
  std::set<std::pair<int, std::string>> seen;
  auto add = [&](FindingKind kind, std::string value, std::string note) {
    if (value.empty() || !seen.insert({static_cast<int>(kind), value}).second) return;
    advice.findings.push_back({kind, std::move(value), std::move(note)});
  };

  const std::string text(content);

  // (a) MD5-shaped tokens.
  std::set<std::string> hashes;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), hex_re); it != std::sregex_iterator(); ++it) {
    auto h = lower((*it)[1].str());
    hashes.insert(h);
    add(FindingKind::hash, h, "32 hex characters, likely MD5");
  }

  // (b) SQL INSERT statements; only lines where INSERT precedes INTO qualify.
  std::vector<std::string> statements;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), sql_re); it != std::sregex_iterator(); ++it) {
    auto stmt = collapse_ws((*it)[0].str());
    statements.push_back(stmt);
    add(FindingKind::sql_statement, stmt, "SQL INSERT statement; possible injection surface");
  }

  // (c) key/value pairs with identifier-like keys.
  for (const auto& kv : key_values(text, statements)) {
    auto kind = classify_key(kv.key);
    if (!kind || kv.value.empty()) continue;
    if (hashes.contains(lower(kv.value)) || is_hex32(kv.value)) continue;
    add(*kind, kv.value, kv.key);
  }

  // (d) recommendations follow the kinds found.
  std::set<FindingKind> kinds;
  for (const auto& f : advice.findings) kinds.insert(f.kind);
  if (kinds.contains(FindingKind::hash)) advice.recommended_actions.push_back("crack with dictionary attack");
  if (kinds.contains(FindingKind::credential)) advice.recommended_actions.push_back("try credential reuse against login services");
  if (kinds.contains(FindingKind::identifier)) advice.recommended_actions.push_back("use identifiers as login names");
  if (kinds.contains(FindingKind::username)) advice.recommended_actions.push_back("add usernames to authentication candidates");
  if (kinds.contains(FindingKind::sql_statement)) advice.recommended_actions.push_back("review SQL statement for injection (deferred)");

  advice.raw = serialize(advice);
  return advice;
}

const std::vector<std::string>& default_keywords() {
  static const std::vector<std::string> keywords{"password", "passwd", "secret", "key",
                                                 "token",    "credential", "login", "user"};
  return keywords;
}

std::vector<SensitiveHit> scan_for_keywords(std::string_view content, const std::vector<std::string>& keywords) {
  std::vector<SensitiveHit> hits;
  if (keywords.empty()) return hits;
  int number = 0;
  for (auto line : split_lines(content)) {
    ++number;
    const auto lowered = lower(line);
    for (const auto& kw : keywords) {
      if (!kw.empty() && lowered.find(lower(kw)) != std::string::npos) {
        hits.push_back({kw, number, std::string(line)});
        break;
      }
    }
  }
  return hits;
}

}  // namespace pentestxx::advisor
