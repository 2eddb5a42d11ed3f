#include "fpki/trustcalc/trustcalc.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <deque>
#include <sstream>

namespace fpki::trust {

std::optional<Interval> Interval::intersect(const Interval& o) const {
  Interval r{std::max(lo, o.lo), std::min(hi, o.hi)};
  if (r.empty()) return std::nullopt;
  return r;
}

void TrustFunction::add(NamePattern pattern, KeySet keys) {
  entries_[pattern].merge(keys);
}

KeySet TrustFunction::operator()(const DomainName& n) const {
  KeySet out;
  for (const auto& [p, keys] : entries_)
    if (p.covers(n)) out.insert(keys.begin(), keys.end());
  return out;
}

namespace {

// Statements grouped by the fields the rules join on.
class Closure {
 public:
  explicit Closure(const TrustFunction& f) : f_(f) {}

  void add(const Statement& s) {
    if (all_.insert(s).second) todo_.push_back(s);
  }

  std::set<Statement> run() {
    while (!todo_.empty()) {
      Statement s = std::move(todo_.front());
      todo_.pop_front();
      index(s);
      std::vector<Statement> out;
      std::visit([&](const auto& x) { fire(x, out); }, s);
      for (auto& c : out) add(c);
    }
    return std::move(all_);
  }

 private:
  void index(const Statement& s) {
    if (auto* a = std::get_if<Aut>(&s)) aut_.emplace(a->x, *a);
    else if (auto* c = std::get_if<Cert>(&s)) cert_.emplace(c->x1, *c);
    else if (auto* l = std::get_if<LogTrust>(&s)) log_.emplace(l->l, *l);
    else if (auto* p = std::get_if<Proof>(&s)) proof_.emplace(p->l, *p);
    else if (auto* c = std::get_if<Compliant>(&s)) comp_.emplace(c->n, *c);
  }

  static void rule1(const LogTrust& t, const Proof& p, std::vector<Statement>& out) {
    out.push_back(Compliant{p.x, p.n, t.s, p.i});
  }

  static void rule2(const Compliant& a, const Compliant& b, std::vector<Statement>& out) {
    if (b.x != a.x && b.x != kNullKey) return;
    auto i = a.i.intersect(b.i);
    if (!i) return;
    KeySet s = a.s;
    s.insert(b.s.begin(), b.s.end());
    out.push_back(Compliant{a.x, a.n, std::move(s), *i});
  }

  void rule3(const Aut& a, const Cert& c, const Compliant& k, std::vector<Statement>& out) const {
    if (a.x != c.x1 || c.x2 != k.x || c.n != k.n) return;
    if (!a.r.covers(c.n)) return;
    KeySet need = f_(c.n);
    if (!std::includes(k.s.begin(), k.s.end(), need.begin(), need.end())) return;
    auto i = a.i.intersect(c.i);
    if (i) i = i->intersect(k.i);
    if (!i) return;
    out.push_back(Aut{c.x2, c.n, a.r.intersect(c.r), *i});
  }

  // Each newly processed statement is joined with everything processed
  // before it, itself included.
  void fire(const LogTrust& t, std::vector<Statement>& out) {
    auto [b, e] = proof_.equal_range(t.l);
    for (auto it = b; it != e; ++it) rule1(t, it->second, out);
  }
  void fire(const Proof& p, std::vector<Statement>& out) {
    auto [b, e] = log_.equal_range(p.l);
    for (auto it = b; it != e; ++it) rule1(it->second, p, out);
  }
  void fire(const Compliant& k, std::vector<Statement>& out) {
    auto [b, e] = comp_.equal_range(k.n);
    for (auto it = b; it != e; ++it) {
      rule2(k, it->second, out);
      rule2(it->second, k, out);
    }
    for (const auto& [x1, c] : cert_) {
      if (c.x2 != k.x || c.n != k.n) continue;
      auto [ab, ae] = aut_.equal_range(x1);
      for (auto it = ab; it != ae; ++it) rule3(it->second, c, k, out);
    }
  }
  void fire(const Aut& a, std::vector<Statement>& out) {
    auto [b, e] = cert_.equal_range(a.x);
    for (auto it = b; it != e; ++it) {
      auto [kb, ke] = comp_.equal_range(it->second.n);
      for (auto k = kb; k != ke; ++k) rule3(a, it->second, k->second, out);
    }
  }
  void fire(const Cert& c, std::vector<Statement>& out) {
    auto [ab, ae] = aut_.equal_range(c.x1);
    auto [kb, ke] = comp_.equal_range(c.n);
    for (auto a = ab; a != ae; ++a)
      for (auto k = kb; k != ke; ++k) rule3(a->second, c, k->second, out);
  }

  const TrustFunction& f_;
  std::set<Statement> all_;
  std::deque<Statement> todo_;
  std::multimap<Key, Aut> aut_;
  std::multimap<Key, Cert> cert_;
  std::multimap<std::string, LogTrust> log_;
  std::multimap<std::string, Proof> proof_;
  std::multimap<DomainName, Compliant> comp_;
};

}  // namespace

std::set<Statement> derive_closure(const View& view) {
  Closure c(view.f);
  for (const auto& s : view.statements) c.add(s);
  return c.run();
}

std::set<Statement> derived_only(const View& view) {
  std::set<Statement> out;
  for (auto& s : derive_closure(view))
    if (!view.statements.count(s)) out.insert(s);
  return out;
}

bool is_authentic(const std::set<Statement>& closure, const Key& x, const DomainName& n,
                  int64_t at) {
  for (const auto& s : closure)
    if (auto* a = std::get_if<Aut>(&s); a && a->x == x && a->n == n && a->i.contains(at))
      return true;
  return false;
}

bool is_authentic(const View& view, const Key& x, const DomainName& n, int64_t at) {
  return is_authentic(derive_closure(view), x, n, at);
}

// ---- text form ----

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

struct Fail {
  std::string what;
};

// Splits at commas not nested in (), [] or {}.
std::vector<std::string_view> split_args(std::string_view s) {
  std::vector<std::string_view> out;
  int depth = 0;
  size_t start = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    char ch = s[i];
    if (ch == '(' || ch == '[' || ch == '{') ++depth;
    else if (ch == ')' || ch == ']' || ch == '}') --depth;
    else if (ch == ',' && depth == 0) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  out.push_back(trim(s.substr(start)));
  return out;
}

Key parse_key(std::string_view s) {
  if (s == kNullKey || s == "null") return kNullKey;
  if (s.empty()) throw Fail{"empty key"};
  for (char ch : s)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.'))
      throw Fail{"bad key '" + std::string(s) + "'"};
  return Key(s);
}

KeySet parse_keys(std::string_view s) {
  if (s.size() < 2 || s.front() != '{' || s.back() != '}')
    throw Fail{"key set must be braced: '" + std::string(s) + "'"};
  KeySet out;
  std::string_view body = trim(s.substr(1, s.size() - 2));
  if (body.empty()) return out;
  for (auto k : split_args(body)) {
    Key key = parse_key(k);
    if (key == kNullKey) throw Fail{"null key in a key set"};
    out.insert(key);
  }
  return out;
}

int64_t parse_bound(std::string_view s) {
  s = trim(s);
  if (s == "-inf") return Interval::kMin;
  if (s == "inf" || s == "+inf") return Interval::kMax;
  int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw Fail{"bad bound '" + std::string(s) + "'"};
  return v;
}

Interval parse_interval(std::string_view s) {
  if (s.size() < 2 || s.front() != '[' || s.back() != ')')
    throw Fail{"interval must be half-open [a,b): '" + std::string(s) + "'"};
  auto parts = split_args(s.substr(1, s.size() - 2));
  if (parts.size() != 2) throw Fail{"interval needs two bounds"};
  Interval i{parse_bound(parts[0]), parse_bound(parts[1])};
  if (i.empty()) throw Fail{"empty interval " + std::string(s)};
  return i;
}

DomainName parse_name(std::string_view s) {
  try {
    return DomainName::parse(s);
  } catch (const std::exception& e) {
    throw Fail{"bad name '" + std::string(s) + "': " + e.what()};
  }
}

NameRealm parse_realm(std::string_view s) {
  try {
    return NameRealm::parse(s);
  } catch (const std::exception& e) {
    throw Fail{"bad realm '" + std::string(s) + "': " + e.what()};
  }
}

std::string_view log_id(std::string_view s) {
  if (s.empty() || s == kNullKey || s == "null") throw Fail{"bad log id"};
  parse_key(s);
  return s;
}

// "Head(args)" -> head, args; the closing paren must end the text.
std::pair<std::string_view, std::vector<std::string_view>> call(std::string_view s) {
  size_t open = s.find('(');
  if (open == std::string_view::npos || s.back() != ')') throw Fail{"expected Name(...)"};
  return {trim(s.substr(0, open)), split_args(s.substr(open + 1, s.size() - open - 2))};
}

Statement statement(std::string_view s) {
  auto [head, a] = call(s);
  auto arity = [&](size_t n) {
    if (a.size() != n)
      throw Fail{std::string(head) + " takes " + std::to_string(n) + " arguments"};
  };
  if (head == "Aut") {
    arity(4);
    return Aut{parse_key(a[0]), parse_name(a[1]), parse_realm(a[2]), parse_interval(a[3])};
  }
  if (head == "Cert") {
    arity(5);
    return Cert{parse_key(a[0]), parse_key(a[1]), parse_name(a[2]), parse_realm(a[3]),
                parse_interval(a[4])};
  }
  if (head == "LogTrust") {
    arity(2);
    return LogTrust{std::string(log_id(a[0])), parse_keys(a[1])};
  }
  if (head == "Proof") {
    arity(4);
    return Proof{std::string(log_id(a[0])), parse_key(a[1]), parse_name(a[2]),
                 parse_interval(a[3])};
  }
  if (head == "Compliant") {
    arity(4);
    return Compliant{parse_key(a[0]), parse_name(a[1]), parse_keys(a[2]), parse_interval(a[3])};
  }
  throw Fail{"unknown statement '" + std::string(head) + "'"};
}

template <typename F>
void each_line(std::string_view text, F&& f) {
  size_t line = 0;
  while (!text.empty()) {
    ++line;
    size_t nl = text.find('\n');
    std::string_view raw = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view() : text.substr(nl + 1);
    if (size_t hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = trim(raw);
    if (raw.empty()) continue;
    try {
      f(raw);
    } catch (const Fail& e) {
      throw ParseError(line, e.what);
    }
  }
}

}  // namespace

Statement parse_statement(std::string_view text) {
  try {
    return statement(trim(text));
  } catch (const Fail& e) {
    throw ParseError(0, e.what);
  }
}

View parse_view(std::string_view text) {
  View v;
  each_line(text, [&](std::string_view s) {
    if (s.starts_with("f(")) {
      size_t close = s.find(')');
      size_t eq = s.find('=', close == std::string_view::npos ? 0 : close);
      if (close == std::string_view::npos || eq == std::string_view::npos)
        throw Fail{"expected f(pattern) = {keys}"};
      NamePattern p = [&] {
        try {
          return NamePattern::parse(trim(s.substr(2, close - 2)));
        } catch (const std::exception& e) {
          throw Fail{std::string("bad pattern: ") + e.what()};
        }
      }();
      v.f.add(std::move(p), parse_keys(trim(s.substr(eq + 1))));
      return;
    }
    v.statements.insert(statement(s));
  });
  return v;
}

std::set<Statement> parse_statements(std::string_view text) {
  std::set<Statement> out;
  each_line(text, [&](std::string_view s) { out.insert(statement(s)); });
  return out;
}

std::string to_string(const Interval& i) {
  auto bound = [](int64_t v) {
    if (v == Interval::kMin) return std::string("-inf");
    if (v == Interval::kMax) return std::string("inf");
    return std::to_string(v);
  };
  return "[" + bound(i.lo) + "," + bound(i.hi) + ")";
}

std::string to_string(const KeySet& s) {
  std::string out = "{";
  for (const auto& k : s) {
    if (out.size() > 1) out += ", ";
    out += k;
  }
  return out + "}";
}

std::string to_string(const Statement& s) {
  struct {
    std::string operator()(const Aut& a) const {
      return "Aut(" + a.x + ", " + a.n.str() + ", " + a.r.str() + ", " + to_string(a.i) + ")";
    }
    std::string operator()(const Cert& c) const {
      return "Cert(" + c.x1 + ", " + c.x2 + ", " + c.n.str() + ", " + c.r.str() + ", " +
             to_string(c.i) + ")";
    }
    std::string operator()(const LogTrust& t) const {
      return "LogTrust(" + t.l + ", " + to_string(t.s) + ")";
    }
    std::string operator()(const Proof& p) const {
      return "Proof(" + p.l + ", " + p.x + ", " + p.n.str() + ", " + to_string(p.i) + ")";
    }
    std::string operator()(const Compliant& c) const {
      return "Compliant(" + c.x + ", " + c.n.str() + ", " + to_string(c.s) + ", " +
             to_string(c.i) + ")";
    }
  } print;
  return std::visit(print, s);
}

std::string to_string(const View& v) {
  std::ostringstream out;
  for (const auto& [p, keys] : v.f.entries()) out << "f(" << p.str() << ") = " << to_string(keys) << "\n";
  for (const auto& s : v.statements) out << to_string(s) << "\n";
  return out.str();
}

}  // namespace fpki::trust
