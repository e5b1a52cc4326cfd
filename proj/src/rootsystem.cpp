#include "parahoric/rootsystem.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "parahoric/error.hpp"

namespace parahoric {

namespace {

std::int64_t ceil_div(const Rational& r) {
  std::int64_t n = r.numerator(), d = r.denominator();
  std::int64_t q = n / d;
  if (n % d != 0 && n > 0) ++q;
  return q;
}

std::vector<std::vector<int>> raw_roots(char type, int rank) {
  std::vector<std::vector<int>> out;
  if (type == 'A') {
    const int dim = rank + 1;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        if (i == j) continue;
        std::vector<int> v(static_cast<std::size_t>(dim), 0);
        v[static_cast<std::size_t>(i)] = 1;
        v[static_cast<std::size_t>(j)] = -1;
        out.push_back(v);
      }
  } else if (type == 'B') {
    // C2 coordinates: short roots +-e1 +- e2, long roots +-2e_i.
    for (int s1 : {1, -1})
      for (int s2 : {1, -1}) out.push_back({s1, s2});
    for (int s : {2, -2}) {
      out.push_back({s, 0});
      out.push_back({0, s});
    }
  } else if (type == 'G') {
    // Inside the sum-zero plane of Z^3.
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if (i == j) continue;
        std::vector<int> v(3, 0);
        v[static_cast<std::size_t>(i)] = 1;
        v[static_cast<std::size_t>(j)] = -1;
        out.push_back(v);
      }
    for (int i = 0; i < 3; ++i)
      for (int s : {1, -1}) {
        std::vector<int> v(3, -s);
        v[static_cast<std::size_t>(i)] = 2 * s;
        out.push_back(v);
      }
  }
  return out;
}

std::vector<std::vector<int>> raw_simple(char type, int rank) {
  std::vector<std::vector<int>> out;
  if (type == 'A') {
    for (int i = 0; i < rank; ++i) {
      std::vector<int> v(static_cast<std::size_t>(rank + 1), 0);
      v[static_cast<std::size_t>(i)] = 1;
      v[static_cast<std::size_t>(i + 1)] = -1;
      out.push_back(v);
    }
  } else if (type == 'B') {
    out = {{1, -1}, {0, 2}};
  } else if (type == 'G') {
    out = {{1, -1, 0}, {-2, 1, 1}};
  }
  return out;
}

int dot(const std::vector<int>& a, const std::vector<int>& b) {
  int s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Coefficients of v over the simple roots, via the Gram system.
std::vector<int> solve_coefficients(const std::vector<std::vector<int>>& simple, const std::vector<int>& v) {
  const std::size_t n = simple.size();
  std::vector<std::vector<Rational>> m(n, std::vector<Rational>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m[i][j] = dot(simple[i], simple[j]);
    m[i][n] = dot(simple[i], v);
  }
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (m[piv][col].numerator() == 0) ++piv;
    std::swap(m[piv], m[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || m[r][col].numerator() == 0) continue;
      Rational factor = m[r][col] / m[col][col];
      for (std::size_t c = col; c <= n; ++c) m[r][c] -= factor * m[col][c];
    }
  }
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rational x = m[i][n] / m[i][i];
    if (x.denominator() != 1) throw Error(ErrorKind::UnsupportedType, "root outside the root lattice");
    out[i] = static_cast<int>(x.numerator());
  }
  return out;
}

}  // namespace

RootSystem build_root_system(char type, int rank) {
  if (type == 'C') type = 'B';
  bool ok = (type == 'A' && rank >= 1 && rank <= 26) || (type == 'B' && rank == 2) || (type == 'G' && rank == 2);
  if (!ok) throw Error(ErrorKind::UnsupportedType, std::string("unsupported root system ") + type + std::to_string(rank));
  const auto simple = raw_simple(type, rank);
  struct Entry {
    std::vector<int> amb, coef;
  };
  std::vector<Entry> pos;
  for (const auto& v : raw_roots(type, rank)) {
    auto c = solve_coefficients(simple, v);
    if (std::all_of(c.begin(), c.end(), [](int x) { return x >= 0; })) pos.push_back({v, c});
  }
  auto height = [](const std::vector<int>& c) { int s = 0; for (int x : c) s += x; return s; };
  std::sort(pos.begin(), pos.end(), [&](const Entry& a, const Entry& b) {
    int ha = height(a.coef), hb = height(b.coef);
    if (ha != hb) return ha < hb;
    return a.coef > b.coef;
  });
  RootSystem sys;
  sys.type_ = type;
  sys.rank_ = rank;
  for (const auto& e : pos) {
    sys.ambient_.push_back(e.amb);
    sys.coeffs_.push_back(e.coef);
  }
  for (const auto& e : pos) {
    std::vector<int> a = e.amb, c = e.coef;
    for (int& x : a) x = -x;
    for (int& x : c) x = -x;
    sys.ambient_.push_back(a);
    sys.coeffs_.push_back(c);
  }
  return sys;
}

RootSystem parse_root_system(std::string_view text) {
  std::string t;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) t += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  if (t.size() < 2 || !std::isalpha(static_cast<unsigned char>(t[0])) ||
      !std::all_of(t.begin() + 1, t.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
    throw Error(ErrorKind::ParseError, "bad root system '" + std::string(text) + "'");
  return build_root_system(t[0], std::stoi(t.substr(1)));
}

std::string RootSystem::label() const { return std::string(1, type_) + std::to_string(rank_); }

std::vector<Root> RootSystem::simple_roots() const {
  std::vector<Root> out;
  for (Root a = 0; a < positive_count(); ++a)
    if (height(a) == 1) out.push_back(a);
  return out;
}

std::vector<Root> RootSystem::positive_roots() const {
  std::vector<Root> out(static_cast<std::size_t>(positive_count()));
  for (Root a = 0; a < positive_count(); ++a) out[static_cast<std::size_t>(a)] = a;
  return out;
}

int RootSystem::height(Root a) const {
  int s = 0;
  for (int x : coefficients(a)) s += x;
  return s;
}

std::optional<Root> RootSystem::find(const std::vector<int>& c) const {
  for (Root a = 0; a < size(); ++a)
    if (coeffs_[static_cast<std::size_t>(a)] == c) return a;
  return std::nullopt;
}

std::optional<Root> RootSystem::find_ambient(const std::vector<int>& v) const {
  for (Root a = 0; a < size(); ++a)
    if (ambient_[static_cast<std::size_t>(a)] == v) return a;
  return std::nullopt;
}

std::optional<Root> RootSystem::combination(int i, Root a, int j, Root b) const {
  std::vector<int> c(static_cast<std::size_t>(rank_));
  for (std::size_t k = 0; k < c.size(); ++k) c[k] = i * coefficients(a)[k] + j * coefficients(b)[k];
  return find(c);
}

std::optional<Root> RootSystem::sum(Root a, Root b) const { return combination(1, a, 1, b); }

int RootSystem::inner(Root a, Root b) const { return dot(ambient(a), ambient(b)); }

int RootSystem::pairing(Root a, Root b) const { return 2 * inner(a, b) / inner(b, b); }

std::vector<std::vector<int>> RootSystem::cartan_matrix() const {
  auto s = simple_roots();
  std::vector<std::vector<int>> m(s.size(), std::vector<int>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j) m[i][j] = pairing(s[i], s[j]);
  return m;
}

int RootSystem::p_int(Root a, Root b) const {
  if (!sum(a, b)) throw Error(ErrorKind::NotAdditivePair, name(a) + " + " + name(b) + " is not a root");
  int c = 1;
  while (combination(-c, a, 1, b)) ++c;
  return c;
}

Root RootSystem::reflect(Root a, Root b) const {
  auto r = combination(-pairing(b, a), a, 1, b);
  return *r;
}

Root RootSystem::highest_root() const { return positive_count() - 1; }

std::vector<Root> RootSystem::extended_simple_roots() const {
  auto out = simple_roots();
  out.push_back(negate(highest_root()));
  return out;
}

std::string RootSystem::name(Root a) const {
  const auto& c = coefficients(a);
  std::string out;
  for (std::size_t k = 0; k < c.size(); ++k) {
    int x = c[k];
    if (x == 0) continue;
    if (x < 0) out += "-";
    else if (!out.empty()) out += "+";
    if (std::abs(x) != 1) out += std::to_string(std::abs(x));
    out += static_cast<char>('a' + k);
  }
  return out;
}

Root RootSystem::parse_root(std::string_view text) const {
  std::vector<int> c(static_cast<std::size_t>(rank_), 0);
  std::size_t i = 0;
  bool any = false;
  auto fail = [&]() -> Root { throw Error(ErrorKind::ParseError, "bad root '" + std::string(text) + "'"); };
  while (i < text.size()) {
    int sign = 1;
    if (text[i] == '+' || text[i] == '-') {
      sign = text[i] == '-' ? -1 : 1;
      ++i;
    } else if (any) {
      return fail();
    }
    int mult = 0;
    bool digits = false;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      mult = mult * 10 + (text[i] - '0');
      digits = true;
      ++i;
    }
    if (!digits) mult = 1;
    if (i >= text.size() || text[i] < 'a' || text[i] >= 'a' + rank_) return fail();
    c[static_cast<std::size_t>(text[i] - 'a')] += sign * mult;
    ++i;
    any = true;
  }
  if (!any) return fail();
  auto r = find(c);
  if (!r) throw Error(ErrorKind::ParseError, "'" + std::string(text) + "' is not a root of " + label());
  return *r;
}

ConcaveFunction extend_concave(const RootSystem& sys, const std::vector<Rational>& point, std::int64_t bound) {
  if (static_cast<int>(point.size()) != sys.rank())
    throw Error(ErrorKind::InvalidConcave, "need one value per simple root");
  for (const auto& r : point)
    if (bound > 0 && bound % r.denominator() != 0)
      throw Error(ErrorKind::InvalidConcave, "denominator " + std::to_string(r.denominator()) + " does not divide " + std::to_string(bound));
  ConcaveFunction f;
  f.point = point;
  for (Root a = 0; a < sys.size(); ++a) {
    Rational s = 0;
    for (std::size_t k = 0; k < point.size(); ++k) s += Rational(sys.coefficients(a)[k]) * point[k];
    f.values.push_back(static_cast<int>(ceil_div(s)));
  }
  return f;
}

ConcaveFunction constant_concave(const RootSystem& sys, int value) {
  ConcaveFunction f;
  f.values.assign(static_cast<std::size_t>(sys.size()), value);
  return f;
}

ConcavityCheck check_concave(const RootSystem& sys, const std::vector<int>& v) {
  ConcavityCheck out;
  if (static_cast<int>(v.size()) != sys.size()) {
    out.ok = false;
    out.violations.push_back("expected one value per root");
    return out;
  }
  auto at = [&](Root a) { return v[static_cast<std::size_t>(a)]; };
  for (Root a = 0; a < sys.size(); ++a) {
    if (a < sys.negate(a) && at(a) + at(sys.negate(a)) < 0)
      out.violations.push_back("f(" + sys.name(a) + ")+f(" + sys.name(sys.negate(a)) + ") < 0");
    for (Root b = 0; b < sys.size(); ++b) {
      auto s = sys.sum(a, b);
      if (s && at(*s) > at(a) + at(b))
        out.violations.push_back("f(" + sys.name(*s) + ") > f(" + sys.name(a) + ")+f(" + sys.name(b) + ")");
    }
  }
  out.ok = out.violations.empty();
  return out;
}

std::vector<Root> psi_of(const RootSystem& sys, const ConcaveFunction& f) {
  auto check = check_concave(sys, f.values);
  if (!check.ok) throw Error(ErrorKind::InvalidConcave, check.violations.front());
  std::vector<Root> psi;
  for (Root a = 0; a < sys.size(); ++a)
    if (f(a) + f(sys.negate(a)) == 0) psi.push_back(a);
  std::set<Root> members(psi.begin(), psi.end());
  for (Root a : psi) {
    if (!members.count(sys.negate(a))) throw Error(ErrorKind::InvalidConcave, "psi not closed under negation");
    for (Root b : psi) {
      auto s = sys.sum(a, b);
      if (s && !members.count(*s)) throw Error(ErrorKind::InvalidConcave, "psi not closed under sums");
    }
  }
  return psi;
}

Rational parse_rational(std::string_view text) {
  std::string t(text);
  auto bad = [&]() { return Error(ErrorKind::ParseError, "bad rational '" + t + "'"); };
  auto slash = t.find('/');
  auto is_int = [](const std::string& s) {
    std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    return i < s.size() && std::all_of(s.begin() + static_cast<std::ptrdiff_t>(i), s.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); });
  };
  if (slash == std::string::npos) {
    if (!is_int(t)) throw bad();
    return Rational(std::stoll(t));
  }
  std::string n = t.substr(0, slash), d = t.substr(slash + 1);
  if (!is_int(n) || !is_int(d) || std::stoll(d) == 0) throw bad();
  return Rational(std::stoll(n), std::stoll(d));
}

std::string format_rational(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::vector<Rational> parse_point(std::string_view text) {
  std::string t;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
  if (t.rfind("f=", 0) == 0) t = t.substr(2);
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') throw Error(ErrorKind::ParseError, "expected [r1,r2,...]");
  std::vector<Rational> out;
  std::stringstream ss(t.substr(1, t.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_rational(item));
  return out;
}

}  // namespace parahoric
