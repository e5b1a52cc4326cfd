#include "parahoric/chevalley.hpp"

#include <algorithm>
#include <sstream>

#include "parahoric/error.hpp"

namespace parahoric {

namespace {

bool is_zero(const Rational& x) { return x.numerator() == 0; }

// Number of roots in the rank-2 subsystem spanned by a and b.
int span_size(const RootSystem& sys, Root a, Root b) {
  int n = 0;
  for (int i = -3; i <= 3; ++i)
    for (int j = -3; j <= 3; ++j)
      if ((i != 0 || j != 0) && sys.combination(i, a, j, b)) ++n;
  return n;
}

std::string pair_name(const RootSystem& sys, Root a, Root b) { return "(" + sys.name(a) + "," + sys.name(b) + ")"; }

}  // namespace

Rational ConstantFamily::get(Root a, Root b) const {
  auto it = c_.find({a, b});
  return it == c_.end() ? Rational(0) : it->second;
}

nlohmann::ordered_json ConstantFamily::to_json() const {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [k, v] : c_) j[pair_name(sys_, k.first, k.second)] = format_rational(v);
  return j;
}

std::vector<std::pair<Root, Root>> additive_pairs(const RootSystem& sys) {
  std::vector<std::pair<Root, Root>> out;
  for (Root a = 0; a < sys.size(); ++a)
    for (Root b = 0; b < sys.size(); ++b)
      if (sys.sum(a, b)) out.emplace_back(a, b);
  return out;
}

std::vector<std::pair<int, int>> commutator_terms(const RootSystem& sys, Root a, Root b) {
  std::vector<std::pair<int, int>> out;
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j)
      if (sys.combination(i, a, j, b)) out.emplace_back(i, j);
  std::sort(out.begin(), out.end(), [](auto x, auto y) {
    if (x.first + x.second != y.first + y.second) return x.first + x.second < y.first + y.second;
    return x.first < y.first;
  });
  return out;
}

// ---- generation ---------------------------------------------------------------

namespace {

class Generator {
 public:
  Generator(const RootSystem& sys, const std::map<Root, int>& signs) : sys_(sys) {
    for (Root xi = 0; xi < sys.positive_count(); ++xi) {
      if (sys.height(xi) < 2) continue;
      std::vector<std::pair<Root, Root>> special;
      for (Root a = 0; a < sys.positive_count(); ++a)
        for (Root b = a + 1; b < sys.positive_count(); ++b)
          if (sys.sum(a, b) == xi) special.emplace_back(a, b);
      auto [ea, eb] = special.front();  // smallest first member
      auto it = signs.find(xi);
      int sign = it == signs.end() ? 1 : it->second;
      special_[{ea, eb}] = Rational(sign * sys.p_int(ea, eb));
      for (std::size_t k = 1; k < special.size(); ++k) {
        auto [g, d] = special[k];
        Rational acc = 0;
        if (auto diff = sys.combination(1, eb, -1, g))
          acc += n(eb, sys.negate(g)) * n(ea, sys.negate(d)) / Rational(sys.squared_length(*diff));
        if (auto diff = sys.combination(1, ea, -1, g))
          acc += n(sys.negate(g), ea) * n(eb, sys.negate(d)) / Rational(sys.squared_length(*diff));
        special_[{g, d}] = Rational(sys.squared_length(xi)) / special_[{ea, eb}] * acc;
      }
    }
  }

  Rational n(Root g, Root d) const {
    auto s = sys_.sum(g, d);
    if (!s) return 0;
    const bool gp = sys_.is_positive(g), dp = sys_.is_positive(d);
    if (gp && dp) return g < d ? special_.at({g, d}) : -special_.at({d, g});
    if (!gp && !dp) return -n(sys_.negate(g), sys_.negate(d));
    if (!gp) return -n(d, g);
    // g > 0 > d
    if (!sys_.is_positive(*s)) return -n(sys_.negate(g), sys_.negate(d));
    return Rational(sys_.squared_length(*s), sys_.squared_length(g)) * n(*s, sys_.negate(d));
  }

 private:
  const RootSystem& sys_;
  std::map<std::pair<Root, Root>, Rational> special_;
};

}  // namespace

ConstantFamily generate_family(const RootSystem& sys, const std::map<Root, int>& signs) {
  Generator gen(sys, signs);
  ConstantFamily fam(sys);
  for (auto [a, b] : additive_pairs(sys)) fam.set(a, b, gen.n(a, b));
  return fam;
}

// ---- higher constants -----------------------------------------------------------

HigherConstants higher_constants(const ConstantFamily& fam) {
  const RootSystem& sys = fam.system();
  HigherConstants out;
  auto c = [&](Root a, Root b) { return fam.get(a, b); };
  auto root = [&](int i, Root a, int j, Root b) { return *sys.combination(i, a, j, b); };
  for (auto [g, d] : additive_pairs(sys)) {
    auto terms = commutator_terms(sys, g, d);
    std::vector<std::pair<int, int>> shape(terms.begin(), terms.end());
    using S = std::vector<std::pair<int, int>>;
    const Rational cgd = c(g, d);
    const Root gd = root(1, g, 1, d);
    if (shape == S{{1, 1}}) continue;
    if (shape == S{{1, 1}, {2, 1}}) {
      out[{g, d, 2, 1}] = Rational(1, 2) * cgd * c(g, gd);
    } else if (shape == S{{1, 1}, {1, 2}}) {
      out[{g, d, 1, 2}] = Rational(-1, 2) * c(d, g) * c(d, gd);
    } else if (shape == S{{1, 1}, {1, 2}, {2, 1}}) {
      out[{g, d, 2, 1}] = Rational(1, 2) * cgd * c(g, gd);
      out[{g, d, 1, 2}] = Rational(1, 2) * cgd * c(d, gd);
    } else if (shape == S{{1, 1}, {2, 1}, {3, 1}, {3, 2}}) {
      const Root g2d = root(2, g, 1, d);
      out[{g, d, 2, 1}] = Rational(1, 2) * cgd * c(g, gd);
      out[{g, d, 3, 1}] = Rational(1, 6) * cgd * c(g, gd) * c(g, g2d);
      out[{g, d, 3, 2}] = Rational(1, 3) * cgd * cgd * c(g, gd) * c(g2d, gd);
    } else if (shape == S{{1, 1}, {1, 2}, {1, 3}, {2, 3}}) {
      // Reverse of the previous shape: read the formulas for (d, g).
      const Rational cdg = c(d, g);
      const Root d2g = root(1, g, 2, d);
      Rational f21 = Rational(1, 2) * cdg * c(d, gd);
      Rational f31 = Rational(1, 6) * cdg * c(d, gd) * c(d, d2g);
      Rational f32 = Rational(1, 3) * cdg * cdg * c(d, gd) * c(d2g, gd);
      out[{g, d, 1, 2}] = -f21;
      out[{g, d, 1, 3}] = -f31;
      out[{g, d, 2, 3}] = -f32 - Rational(1, 2) * cdg * cdg * c(d, gd) * c(gd, d2g);
    } else {
      throw Error(ErrorKind::UnsupportedType, "unexpected commutator shape for " + pair_name(sys, g, d));
    }
  }
  return out;
}

// ---- rescaling ------------------------------------------------------------------

Rescaling rescaling_from_positive(const RootSystem& sys, const std::vector<Rational>& positive) {
  Rescaling r;
  r.n.resize(static_cast<std::size_t>(sys.size()));
  for (Root a = 0; a < sys.positive_count(); ++a) {
    r.n[static_cast<std::size_t>(a)] = positive.at(static_cast<std::size_t>(a));
    r.n[static_cast<std::size_t>(sys.negate(a))] = Rational(1) / positive.at(static_cast<std::size_t>(a));
  }
  return r;
}

ConstantFamily apply_rescaling(const ConstantFamily& c, const Rescaling& n) {
  const RootSystem& sys = c.system();
  ConstantFamily out(sys);
  auto N = [&](Root a) { return n.n.at(static_cast<std::size_t>(a)); };
  for (const auto& [k, v] : c.values()) {
    Root s = *sys.sum(k.first, k.second);
    out.set(k.first, k.second, N(k.first) * N(k.second) / N(s) * v);
  }
  return out;
}

std::optional<Rescaling> find_rescaling(const ConstantFamily& c, const ConstantFamily& c2) {
  if (!(c.system() == c2.system())) throw Error(ErrorKind::NotComparable, "families over different root systems");
  if (!verify_identities(c2).all_pass() || !verify_identities(c).all_pass()) return std::nullopt;
  const RootSystem& sys = c.system();
  std::vector<Rational> pos(static_cast<std::size_t>(sys.positive_count()), Rational(1));
  for (Root a = 0; a < sys.positive_count(); ++a) {
    if (sys.height(a) == 1) continue;
    for (Root s : sys.simple_roots()) {
      auto b = sys.combination(1, a, -1, s);
      if (!b || !sys.is_positive(*b)) continue;
      Rational denom = c2.get(*b, s);
      if (is_zero(denom)) return std::nullopt;
      pos[static_cast<std::size_t>(a)] =
          c.get(*b, s) * pos[static_cast<std::size_t>(*b)] * pos[static_cast<std::size_t>(s)] / denom;
      break;
    }
  }
  Rescaling r = rescaling_from_positive(sys, pos);
  if (!(apply_rescaling(c, r) == c2)) return std::nullopt;
  return r;
}

// ---- value views ------------------------------------------------------------------

FamilyView<Rational> rational_view(const ConstantFamily& fam, const HigherConstants* higher) {
  FamilyView<Rational> v;
  v.sys = &fam.system();
  v.c = [&fam](Root a, Root b) { return fam.get(a, b); };
  v.higher = [higher](Root a, Root b, int i, int j) -> std::optional<Rational> {
    if (!higher) return std::nullopt;
    auto it = higher->find({a, b, i, j});
    if (it == higher->end()) return std::nullopt;
    return it->second;
  };
  v.from_int = [](std::int64_t n) { return Rational(n); };
  v.mul = [](const Rational& x, const Rational& y) { return x * y; };
  v.add = [](const Rational& x, const Rational& y) { return x + y; };
  v.neg = [](const Rational& x) { return -x; };
  v.eq = [](const Rational& x, const Rational& y) { return x == y; };
  v.show = [](const Rational& x) { return format_rational(x); };
  return v;
}

FamilyView<TaggedValue> tagged_ops(const Ring& ring) {
  FamilyView<TaggedValue> v;
  const int h = ring.depth();
  auto reliable_val = [](const TaggedValue& x) { return std::min(x.value.valuation(), std::max(x.precision, 0)); };
  v.from_int = [ring, h](std::int64_t n) { return TaggedValue{ring.from_int(n), h}; };
  v.mul = [h, reliable_val](const TaggedValue& x, const TaggedValue& y) {
    int p = std::min(x.precision + reliable_val(y), y.precision + reliable_val(x));
    return TaggedValue{x.value * y.value, std::min(p, h)};
  };
  v.add = [](const TaggedValue& x, const TaggedValue& y) {
    return TaggedValue{x.value + y.value, std::min(x.precision, y.precision)};
  };
  v.neg = [](const TaggedValue& x) { return TaggedValue{-x.value, x.precision}; };
  v.eq = [](const TaggedValue& x, const TaggedValue& y) {
    return (x.value - y.value).valuation() >= std::min(x.precision, y.precision);
  };
  v.show = [](const TaggedValue& x) { return x.value.to_string() + "@" + std::to_string(x.precision); };
  return v;
}

// ---- identity checks ------------------------------------------------------------------

template <class V>
VerificationReport verify_view(const FamilyView<V>& v) {
  const RootSystem& sys = *v.sys;
  VerificationReport rep;
  rep.subject = sys.label();
  auto I = [&](std::int64_t n) { return v.from_int(n); };
  auto mul = [&](const V& x, const V& y) { return v.mul(x, y); };
  auto c = [&](Root a, Root b) { return v.c(a, b); };

  auto& antisym = rep.add("antisymmetry", "c(b,a) = -c(a,b)");
  auto& three_root = rep.add("three-root", "c(a,b) c(g,a+b) = c(g,a) c(a+g,b) when b+g is neither a root nor 0");
  auto& opp = rep.add("opposite-p", "c(a,b) c(-a,-b) = -p(a,b)^2");
  auto& cyc = rep.add("cyclic-p", "c(a,b)/p(a,b) = c(b,-a-b)/p(b,-a-b) = c(-a-b,a)/p(-a-b,a)");
  auto& a2inv = rep.add("A2.inverse", "c(a,b) c(a+b,-b) = 1");
  auto& a2cyc = rep.add("A2.cyclic", "c(a,b) = c(b,-a-b) = c(-a-b,a)");
  auto& a2opp = rep.add("A2.opposite", "c(a,b) c(-a,-b) = -1");
  auto& b2h1 = rep.add("B2.higher-antisymmetry", "c(b,a,1,2) = -c(a,b,2,1)");
  auto& b2h2 = rep.add("B2.higher", "c(a,b,2,1) = 1/2 c(a,b) c(a,a+b)");
  auto& b2inv = rep.add("B2.inverse-long", "c(a,b) c(a+b,-b) = 1");
  auto& b2inv2 = rep.add("B2.inverse-short", "c(b,a) c(a+b,-a) = 2");
  auto& b2cyc = rep.add("B2.cyclic", "c(a,b) = c(b,-a-b) = 1/2 c(-a-b,a)");
  auto& b2opp = rep.add("B2.opposite", "c(a,b) c(-a,-b) = -1, c(a,a+b) c(-a,-a-b) = -4");
  auto& g2h3 = rep.add("G2.higher-short-pair",
                       "c(a,a+b,2,1) = 1/2 c(a,a+b) c(a,2a+b), c(a,a+b,1,2) = 1/2 c(a,a+b) c(a+b,2a+b)");
  auto& g2h4 = rep.add("G2.higher",
                       "c(a,b,2,1) = 1/2 c(a,b) c(a,a+b), c(a,b,3,1) = 1/6 c(a,b) c(a,a+b) c(a,2a+b), "
                       "c(a,b,3,2) = 1/3 c(a,b)^2 c(a,a+b) c(2a+b,a+b)");
  auto& g2h5 = rep.add("G2.higher-reversed",
                       "c(b,a,1,2) = -c(a,b,2,1), c(b,a,1,3) = -c(a,b,3,1), "
                       "c(b,a,2,3) = -c(a,b,3,2) - 1/2 c(a,b)^2 c(a,a+b) c(a+b,2a+b)");
  auto& g2long = rep.add("G2.long-A2",
                         "c(b,3a+b) = c(3a+b,-3a-2b) = c(-3a-2b,b), c(b,3a+b) c(3a+2b,-3a-b) = 1, "
                         "c(b,3a+b) c(-b,-3a-b) = -1");
  auto& g2inv = rep.add("G2.inverse", "c(a,b) c(a+b,-b) = 1, c(b,a) c(a+b,-a) = 3, c(a+b,a) c(2a+b,-a) = 4");
  auto& g2cyc = rep.add("G2.cyclic", "c(a,b) = c(b,-a-b) = 1/3 c(-a-b,a), c(a,a+b) = c(a+b,-2a-b) = c(-2a-b,a)");
  auto& g2opp = rep.add("G2.opposite", "c(a,b) c(-a,-b) = -1, c(a,a+b) c(-a,-a-b) = -4, c(a,2a+b) c(-a,-2a-b) = -9");

  auto pn = [&](Root a, Root b) { return pair_name(sys, a, b); };
  auto show_eq = [&](const V& x, const V& y) { return v.show(x) + " vs " + v.show(y); };

  for (auto [a, b] : additive_pairs(sys)) {
    record(antisym, v.eq(c(b, a), v.neg(c(a, b))), pn(a, b) + ": " + show_eq(c(b, a), v.neg(c(a, b))));
    const int p = sys.p_int(a, b);
    V lhs = mul(c(a, b), c(sys.negate(a), sys.negate(b)));
    record(opp, v.eq(lhs, I(-p * p)), pn(a, b) + ": " + show_eq(lhs, I(-p * p)));
    const Root s = *sys.sum(a, b), ms = sys.negate(s);
    const int p2 = sys.p_int(b, ms), p3 = sys.p_int(ms, a);
    V x1 = mul(c(a, b), I(p2)), y1 = mul(c(b, ms), I(p));
    V x2 = mul(c(a, b), I(p3)), y2 = mul(c(ms, a), I(p));
    record(cyc, v.eq(x1, y1) && v.eq(x2, y2), pn(a, b) + ": " + show_eq(x1, y1) + "; " + show_eq(x2, y2));
  }

  for (Root a = 0; a < sys.size(); ++a)
    for (Root b = 0; b < sys.size(); ++b)
      for (Root g = 0; g < sys.size(); ++g) {
        auto ab = sys.sum(a, b), ag = sys.sum(a, g);
        if (!ab || !ag || !sys.sum(*ab, g)) continue;
        if (sys.sum(b, g) || b == sys.negate(g)) continue;
        V l = mul(c(a, b), c(g, *ab)), r = mul(c(g, a), c(*ag, b));
        record(three_root, v.eq(l, r), sys.name(a) + "," + sys.name(b) + "," + sys.name(g) + ": " + show_eq(l, r));
      }

  auto higher = [&](Root x, Root y, int i, int j) { return v.higher(x, y, i, j); };
  auto eq3 = [&](const V& x, const V& y, const V& z) { return v.eq(x, y) && v.eq(y, z); };

  for (auto [a, b] : additive_pairs(sys)) {
    if (sys.combination(1, a, -1, b)) continue;
    if (sys.squared_length(a) > sys.squared_length(b)) continue;
    const int span = span_size(sys, a, b);
    const std::string w = pn(a, b);
    auto rt = [&](int i, int j) { return *sys.combination(i, a, j, b); };
    auto neg = [&](Root x) { return sys.negate(x); };
    if (span == 6) {
      record(a2inv, v.eq(mul(c(a, b), c(rt(1, 1), neg(b))), I(1)), w);
      record(a2cyc, eq3(c(a, b), c(b, neg(rt(1, 1))), c(neg(rt(1, 1)), a)), w);
      record(a2opp, v.eq(mul(c(a, b), c(neg(a), neg(b))), I(-1)), w);
    } else if (span == 8) {
      auto h21 = higher(a, b, 2, 1), h12 = higher(b, a, 1, 2);
      if (h21 && h12) record(b2h1, v.eq(*h12, v.neg(*h21)), w + ": " + show_eq(*h12, v.neg(*h21)));
      if (h21) {
        V l = mul(I(2), *h21), r = mul(c(a, b), c(a, rt(1, 1)));
        record(b2h2, v.eq(l, r), w + ": " + show_eq(l, r));
      }
      record(b2inv, v.eq(mul(c(a, b), c(rt(1, 1), neg(b))), I(1)), w);
      record(b2inv2, v.eq(mul(c(b, a), c(rt(1, 1), neg(a))), I(2)), w);
      record(b2cyc, v.eq(c(a, b), c(b, neg(rt(1, 1)))) && v.eq(mul(I(2), c(a, b)), c(neg(rt(1, 1)), a)), w);
      record(b2opp,
             v.eq(mul(c(a, b), c(neg(a), neg(b))), I(-1)) &&
                 v.eq(mul(c(a, rt(1, 1)), c(neg(a), neg(rt(1, 1)))), I(-4)),
             w);
    } else if (span == 12) {
      const Root ab = rt(1, 1), a2b = rt(2, 1), a3b = rt(3, 1), a3b2 = rt(3, 2);
      {
        auto h21 = higher(a, ab, 2, 1), h12 = higher(a, ab, 1, 2);
        if (h21 && h12) {
          V l1 = mul(I(2), *h21), r1 = mul(c(a, ab), c(a, a2b));
          V l2 = mul(I(2), *h12), r2 = mul(c(a, ab), c(ab, a2b));
          record(g2h3, v.eq(l1, r1) && v.eq(l2, r2), w + ": " + show_eq(l1, r1) + "; " + show_eq(l2, r2));
        }
      }
      auto h21 = higher(a, b, 2, 1), h31 = higher(a, b, 3, 1), h32 = higher(a, b, 3, 2);
      if (h21 && h31 && h32) {
        V cab = c(a, b);
        V l1 = mul(I(2), *h21), r1 = mul(cab, c(a, ab));
        V l2 = mul(I(6), *h31), r2 = mul(mul(cab, c(a, ab)), c(a, a2b));
        V l3 = mul(I(3), *h32), r3 = mul(mul(mul(cab, cab), c(a, ab)), c(a2b, ab));
        record(g2h4, v.eq(l1, r1) && v.eq(l2, r2) && v.eq(l3, r3),
               w + ": " + show_eq(l1, r1) + "; " + show_eq(l2, r2) + "; " + show_eq(l3, r3));
        auto k12 = higher(b, a, 1, 2), k13 = higher(b, a, 1, 3), k23 = higher(b, a, 2, 3);
        if (k12 && k13 && k23) {
          V l4 = mul(I(2), *k23);
          V r4 = v.add(mul(I(-2), *h32), v.neg(mul(mul(mul(cab, cab), c(a, ab)), c(ab, a2b))));
          record(g2h5, v.eq(*k12, v.neg(*h21)) && v.eq(*k13, v.neg(*h31)) && v.eq(l4, r4),
                 w + ": " + show_eq(*k12, v.neg(*h21)) + "; " + show_eq(*k13, v.neg(*h31)) + "; " + show_eq(l4, r4));
        }
      }
      record(g2long,
             eq3(c(b, a3b), c(a3b, neg(a3b2)), c(neg(a3b2), b)) && v.eq(mul(c(b, a3b), c(a3b2, neg(a3b))), I(1)) &&
                 v.eq(mul(c(b, a3b), c(neg(b), neg(a3b))), I(-1)),
             w);
      record(g2inv,
             v.eq(mul(c(a, b), c(ab, neg(b))), I(1)) && v.eq(mul(c(b, a), c(ab, neg(a))), I(3)) &&
                 v.eq(mul(c(ab, a), c(a2b, neg(a))), I(4)),
             w);
      record(g2cyc,
             v.eq(c(a, b), c(b, neg(ab))) && v.eq(mul(I(3), c(a, b)), c(neg(ab), a)) &&
                 eq3(c(a, ab), c(ab, neg(a2b)), c(neg(a2b), a)),
             w);
      record(g2opp,
             v.eq(mul(c(a, b), c(neg(a), neg(b))), I(-1)) && v.eq(mul(c(a, ab), c(neg(a), neg(ab))), I(-4)) &&
                 v.eq(mul(c(a, a2b), c(neg(a), neg(a2b))), I(-9)),
             w);
    }
  }
  rep.entries.erase(std::remove_if(rep.entries.begin(), rep.entries.end(),
                                   [](const ReportEntry& e) { return e.checked == 0 && e.id != "antisymmetry"; }),
                    rep.entries.end());
  return rep;
}

template VerificationReport verify_view<Rational>(const FamilyView<Rational>&);
template VerificationReport verify_view<TaggedValue>(const FamilyView<TaggedValue>&);

VerificationReport verify_identities(const ConstantFamily& c) {
  HigherConstants h = higher_constants(c);
  return verify_view(rational_view(c, &h));
}

VerificationReport verify_identities(const ConstantFamily& c, const HigherConstants& higher) {
  return verify_view(rational_view(c, &higher));
}

Element reduce_rational(const Ring& ring, const Rational& x) {
  Element d = ring.from_int(x.denominator());
  if (!d.is_unit())
    throw Error(ErrorKind::InvalidSpec, "denominator " + std::to_string(x.denominator()) + " is not invertible in " +
                                            to_string(ring.spec()));
  return ring.from_int(x.numerator()) * d.inverse();
}

std::optional<std::vector<TaggedValue>> find_rescaling_tagged(const RootSystem& sys,
                                                              const std::function<TaggedValue(Root, Root)>& c1,
                                                              const std::function<TaggedValue(Root, Root)>& c2,
                                                              const Ring& ring) {
  auto ops = tagged_ops(ring);
  const int h = ring.depth();
  std::vector<TaggedValue> n(static_cast<std::size_t>(sys.size()), TaggedValue{ring.one(), h});
  auto inv = [](const TaggedValue& x) { return TaggedValue{x.value.inverse(), x.precision}; };
  // Roots ordered by height; n on a root is read off any relation
  // c2(x,y) = n_x n_y / n_{x+y} c1(x,y) in which it is the only unknown.
  std::vector<Root> order;
  for (Root a = 0; a < sys.positive_count(); ++a) order.push_back(a);
  std::stable_sort(order.begin(), order.end(), [&](Root x, Root y) { return sys.height(x) < sys.height(y); });
  std::vector<bool> known(static_cast<std::size_t>(sys.size()), false);
  for (Root s : sys.simple_roots()) known[static_cast<std::size_t>(s)] = known[static_cast<std::size_t>(sys.negate(s))] = true;
  auto value = [&](Root r) { return n[static_cast<std::size_t>(r)]; };
  for (Root a : order) {
    if (sys.height(a) == 1) continue;
    const Root na = sys.negate(a);
    std::optional<TaggedValue> best;
    for (auto [x, y] : additive_pairs(sys)) {
      const Root z = *sys.sum(x, y);
      int e = 0;
      bool others_known = true;
      for (auto [r, sign] : {std::pair{x, 1}, std::pair{y, 1}, std::pair{z, -1}}) {
        if (r == a) e += sign;
        else if (r == na) e -= sign;
        else if (!known[static_cast<std::size_t>(r)]) others_known = false;
      }
      if (!others_known || (e != 1 && e != -1)) continue;
      TaggedValue t1 = c1(x, y), t2 = c2(x, y);
      if (t2.precision <= 0) continue;
      // rest = product of the known factors n_x n_y / n_z, excluding a.
      TaggedValue rest{ring.one(), h};
      for (auto [r, sign] : {std::pair{x, 1}, std::pair{y, 1}, std::pair{z, -1}}) {
        if (r == a || r == na) continue;
        rest = ops.mul(rest, sign > 0 ? value(r) : inv(value(r)));
      }
      // n_a^e = c2 / (c1 * rest)
      TaggedValue denom = ops.mul(t1, rest);
      TaggedValue num = t2;
      if (e == -1) std::swap(denom, num);
      if (!denom.value.is_unit()) continue;
      TaggedValue cand = ops.mul(num, inv(denom));
      if (!best || cand.precision > best->precision) best = cand;
    }
    // Every relation involving a is unknown at this precision: n_a is free.
    TaggedValue chosen = best.value_or(TaggedValue{ring.one(), 0});
    if (!chosen.value.is_unit()) return std::nullopt;
    n[static_cast<std::size_t>(a)] = chosen;
    n[static_cast<std::size_t>(na)] = inv(chosen);
    known[static_cast<std::size_t>(a)] = known[static_cast<std::size_t>(na)] = true;
  }
  for (auto [a, b] : additive_pairs(sys)) {
    Root s = *sys.sum(a, b);
    TaggedValue lhs = ops.mul(ops.mul(ops.mul(n[static_cast<std::size_t>(a)], n[static_cast<std::size_t>(b)]),
                                      inv(n[static_cast<std::size_t>(s)])),
                              c1(a, b));
    if (!ops.eq(lhs, c2(a, b))) return std::nullopt;
  }
  return n;
}

}  // namespace parahoric
