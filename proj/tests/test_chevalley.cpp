#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "parahoric/chevalley.hpp"
#include "parahoric/error.hpp"
#include "parahoric/verify.hpp"

using namespace parahoric;

namespace {

// ---------------------------------------------------------------------------
// Independent oracle: the adjoint representation of the Lie algebra whose
// Chevalley basis has structure constants N.  Basis: e_r for every root r,
// then h_i for the simple coroots.  Group elements u_r(x) = exp(x ad e_r).

using Mat = std::vector<std::vector<Rational>>;
using Vec = std::vector<Rational>;

bool zero_q(const Rational& x) { return x.numerator() == 0; }

struct Adjoint {
  const RootSystem& sys;
  const ConstantFamily& fam;
  int dim;
  std::vector<Root> simple;

  Adjoint(const RootSystem& s, const ConstantFamily& f)
      : sys(s), fam(f), dim(s.size() + s.rank()), simple(s.simple_roots()) {}

  int e(Root r) const { return r; }
  int h(int i) const { return sys.size() + i; }

  // Coroot of r in the basis of simple coroots.
  Vec coroot(Root r) const {
    Vec v(static_cast<std::size_t>(dim), Rational(0));
    auto co = sys.coefficients(r);
    for (int i = 0; i < sys.rank(); ++i)
      v[static_cast<std::size_t>(h(i))] =
          Rational(co[static_cast<std::size_t>(i)] * sys.squared_length(simple[static_cast<std::size_t>(i)]),
                   sys.squared_length(r));
    return v;
  }

  // [x_a, x_b] on basis vectors.
  Vec bracket(int a, int b) const {
    Vec out(static_cast<std::size_t>(dim), Rational(0));
    const int n = sys.size();
    if (a < n && b < n) {
      if (b == sys.negate(a)) return coroot(a);
      if (auto s = sys.sum(a, b)) out[static_cast<std::size_t>(*s)] = fam.get(a, b);
      return out;
    }
    if (a >= n && b >= n) return out;
    if (a < n) {
      Vec v = bracket(b, a);
      for (auto& x : v) x = -x;
      return v;
    }
    // [h_i, e_b] = <b, a_i^vee> e_b
    out[static_cast<std::size_t>(b)] = Rational(sys.pairing(b, simple[static_cast<std::size_t>(a - n)]));
    return out;
  }

  Vec bracket(const Vec& x, const Vec& y) const {
    Vec out(static_cast<std::size_t>(dim), Rational(0));
    for (int a = 0; a < dim; ++a) {
      if (zero_q(x[static_cast<std::size_t>(a)])) continue;
      for (int b = 0; b < dim; ++b) {
        if (zero_q(y[static_cast<std::size_t>(b)])) continue;
        Vec z = bracket(a, b);
        Rational k = x[static_cast<std::size_t>(a)] * y[static_cast<std::size_t>(b)];
        for (int c = 0; c < dim; ++c) out[static_cast<std::size_t>(c)] += k * z[static_cast<std::size_t>(c)];
      }
    }
    return out;
  }

  Vec basis(int a) const {
    Vec v(static_cast<std::size_t>(dim), Rational(0));
    v[static_cast<std::size_t>(a)] = 1;
    return v;
  }

  Mat ad(Root r) const {
    Mat m(static_cast<std::size_t>(dim), Vec(static_cast<std::size_t>(dim), Rational(0)));
    for (int b = 0; b < dim; ++b) {
      Vec col = bracket(r, b);
      for (int a = 0; a < dim; ++a) m[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = col[static_cast<std::size_t>(a)];
    }
    return m;
  }

  Mat identity() const {
    Mat m(static_cast<std::size_t>(dim), Vec(static_cast<std::size_t>(dim), Rational(0)));
    for (int i = 0; i < dim; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] = 1;
    return m;
  }

  static Mat mul(const Mat& x, const Mat& y) {
    const std::size_t n = x.size();
    Mat out(n, Vec(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        if (zero_q(x[i][k])) continue;
        for (std::size_t j = 0; j < n; ++j)
          if (!zero_q(y[k][j])) out[i][j] += x[i][k] * y[k][j];
      }
    return out;
  }

  static bool is_zero(const Mat& m) {
    for (const auto& row : m)
      for (const auto& v : row)
        if (!zero_q(v)) return false;
    return true;
  }

  Mat u(Root r, const Rational& t) const {
    Mat A = ad(r), term = identity(), out = identity();
    for (int k = 1; k <= 6; ++k) {
      term = mul(term, A);
      if (is_zero(term)) break;
      Rational coef = 1;
      for (int j = 1; j <= k; ++j) coef *= t / Rational(j);
      for (std::size_t i = 0; i < out.size(); ++i)
        for (std::size_t j = 0; j < out.size(); ++j) out[i][j] += coef * term[i][j];
    }
    return out;
  }

  // Factor [u_a(x), u_b(y)] into the ordered product of u_{ia+jb}(t_ij).
  // Returns t_ij / (x^i y^j) per term.  Peels factors from the left, reading
  // each parameter off the e_g coordinate of the image of the coroot h_g.
  std::map<std::pair<int, int>, Rational> commutator(Root a, Root b, const Rational& x, const Rational& y) const {
    Mat M = mul(mul(u(a, x), u(b, y)), mul(u(a, -x), u(b, -y)));
    std::map<std::pair<int, int>, Rational> out;
    for (auto [i, j] : commutator_terms(sys, a, b)) {
      Root g = *sys.combination(i, a, j, b);
      Vec hg = coroot(g);
      Rational comp = 0;
      for (int k = 0; k < dim; ++k) comp += M[static_cast<std::size_t>(g)][static_cast<std::size_t>(k)] * hg[static_cast<std::size_t>(k)];
      // u_g(t) h_g = h_g - t [h_g, e_g] = h_g - 2t e_g
      Rational t = -comp / Rational(2);
      M = mul(u(g, -t), M);
      Rational mono = 1;
      for (int k = 0; k < i; ++k) mono *= x;
      for (int k = 0; k < j; ++k) mono *= y;
      out[{i, j}] = t / mono;
    }
    Mat I = identity();
    for (std::size_t r = 0; r < M.size(); ++r)
      for (std::size_t c = 0; c < M.size(); ++c)
        if (M[r][c] != I[r][c]) throw std::runtime_error("commutator did not factor");
    return out;
  }
};

bool jacobi_holds(const Adjoint& L) {
  for (int a = 0; a < L.dim; ++a)
    for (int b = 0; b < L.dim; ++b)
      for (int c = 0; c < L.dim; ++c) {
        Vec s1 = L.bracket(L.basis(a), L.bracket(b, c));
        Vec s2 = L.bracket(L.basis(b), L.bracket(c, a));
        Vec s3 = L.bracket(L.basis(c), L.bracket(a, b));
        for (int k = 0; k < L.dim; ++k)
          if (!zero_q(s1[static_cast<std::size_t>(k)] + s2[static_cast<std::size_t>(k)] + s3[static_cast<std::size_t>(k)]))
            return false;
      }
  return true;
}

const ReportEntry& entry(const VerificationReport& r, const std::string& id) {
  const ReportEntry* e = r.find(id);
  REQUIRE_MESSAGE(e != nullptr, id);
  return *e;
}

std::vector<RootSystem> systems() {
  return {build_root_system('A', 2), build_root_system('B', 2), build_root_system('G', 2), build_root_system('A', 3)};
}

}  // namespace

TEST_CASE("generated families are Chevalley normalized") {
  for (const auto& sys : systems()) {
    auto fam = generate_family(sys);
    CAPTURE(sys.label());
    CHECK(fam.values().size() == additive_pairs(sys).size());
    for (auto [a, b] : additive_pairs(sys)) {
      Rational v = fam.get(a, b);
      CHECK(v.denominator() == 1);
      CHECK(std::abs(v.numerator()) == sys.p_int(a, b));
    }
  }
  CHECK(generate_family(build_root_system('A', 1)).values().empty());
}

TEST_CASE("generated families come from a Lie algebra (Jacobi)") {
  for (const auto& sys : systems()) {
    auto fam = generate_family(sys);
    Adjoint L(sys, fam);
    CAPTURE(sys.label());
    CHECK(jacobi_holds(L));
  }
}

TEST_CASE("a sign-broken family violates Jacobi") {
  auto sys = build_root_system('A', 3);
  auto fam = generate_family(sys);
  Root a = sys.parse_root("a"), bc = sys.parse_root("b+c");
  fam.set(a, bc, -fam.get(a, bc));
  fam.set(bc, a, -fam.get(bc, a));
  CHECK_FALSE(jacobi_holds(Adjoint(sys, fam)));
  CHECK_FALSE(verify_identities(fam).all_pass());
}

TEST_CASE("higher constants agree with group commutators in the adjoint representation") {
  const std::vector<std::pair<Rational, Rational>> params = {{1, 1}, {Rational(2), Rational(-1)}, {Rational(1, 2), Rational(3)}};
  for (const auto& sys : systems()) {
    auto fam = generate_family(sys);
    auto higher = higher_constants(fam);
    Adjoint L(sys, fam);
    CAPTURE(sys.label());
    for (auto [a, b] : additive_pairs(sys)) {
      if (b == sys.negate(a)) continue;
      for (auto [x, y] : params) {
        auto t = L.commutator(a, b, x, y);
        for (auto [ij, val] : t) {
          CAPTURE(sys.name(a));
          CAPTURE(sys.name(b));
          CAPTURE(ij.first);
          CAPTURE(ij.second);
          if (ij == std::pair{1, 1}) {
            CHECK(val == fam.get(a, b));
          } else {
            auto it = higher.find({a, b, ij.first, ij.second});
            REQUIRE(it != higher.end());
            CHECK(val == it->second);
          }
        }
      }
    }
    // No derived constant is left unconfirmed by the oracle.
    for (const auto& [k, v] : higher) {
      auto [a, b, i, j] = k;
      auto terms = commutator_terms(sys, a, b);
      CHECK(std::find(terms.begin(), terms.end(), std::pair{i, j}) != terms.end());
    }
  }
}

TEST_CASE("documented examples") {
  auto a2 = build_root_system('A', 2);
  auto fa2 = generate_family(a2);
  Root a = a2.parse_root("a"), b = a2.parse_root("b"), ab = a2.parse_root("a+b");
  CHECK(fa2.get(a, b) == Rational(1));
  CHECK(fa2.get(a, b) == fa2.get(b, a2.negate(ab)));
  CHECK(fa2.get(b, a2.negate(ab)) == fa2.get(a2.negate(ab), a));

  auto b2 = build_root_system('B', 2);
  auto fb2 = generate_family(b2);
  Root ba = b2.parse_root("a"), bb = b2.parse_root("b"), bab = b2.parse_root("a+b");
  CHECK(fb2.get(bb, ba) * fb2.get(bab, b2.negate(ba)) == Rational(2));
  auto hb2 = higher_constants(fb2);
  CHECK(hb2.at({ba, bb, 2, 1}) == Rational(1, 2) * fb2.get(ba, bab));
  CHECK(hb2.at({bb, ba, 1, 2}) == -hb2.at({ba, bb, 2, 1}));

  auto g2 = build_root_system('G', 2);
  auto fg2 = generate_family(g2);
  auto hg2 = higher_constants(fg2);
  Root ga = g2.parse_root("a"), gb = g2.parse_root("b");
  Rational c31 = hg2.at({ga, gb, 3, 1});
  Rational unsimplified = fg2.get(ga, gb) * fg2.get(ga, g2.parse_root("a+b")) * fg2.get(ga, g2.parse_root("2a+b"));
  CHECK(c31 * Rational(6) == unsimplified);
  CHECK(abs(unsimplified) == Rational(6));  // 1 * 2 * 3
}

TEST_CASE("verification passes on generated families") {
  for (const auto& sys : systems()) {
    auto fam = generate_family(sys);
    auto rep = verify_identities(fam);
    CAPTURE(sys.label());
    for (const auto& e : rep.entries) {
      CAPTURE(e.id);
      CAPTURE(e.witness);
      CHECK(e.pass);
    }
    CHECK(entry(rep, "opposite-p").checked == static_cast<std::int64_t>(additive_pairs(sys).size()));
    CHECK(entry(rep, "cyclic-p").pass);
  }
  auto g2rep = verify_identities(generate_family(build_root_system('G', 2)));
  for (const char* id : {"G2.higher-short-pair", "G2.higher", "G2.higher-reversed", "G2.long-A2", "G2.inverse",
                         "G2.cyclic", "G2.opposite", "three-root"})
    CHECK(entry(g2rep, id).checked > 0);
  auto b2rep = verify_identities(generate_family(build_root_system('B', 2)));
  for (const char* id : {"B2.higher-antisymmetry", "B2.higher", "B2.inverse-long", "B2.inverse-short", "B2.cyclic",
                         "B2.opposite"})
    CHECK(entry(b2rep, id).checked > 0);
}

TEST_CASE("verification catches single mutations") {
  auto sys = build_root_system('A', 2);
  auto fam = generate_family(sys);
  Root a = sys.parse_root("a"), b = sys.parse_root("b");
  fam.set(a, b, -fam.get(a, b));
  auto rep = verify_identities(fam);
  CHECK_FALSE(entry(rep, "A2.cyclic").pass);
  CHECK_FALSE(entry(rep, "cyclic-p").pass);
  CHECK_FALSE(entry(rep, "antisymmetry").pass);

  // Each single-value sign flip in every system is detected.
  for (const auto& s : systems()) {
    auto base = generate_family(s);
    for (auto [x, y] : additive_pairs(s)) {
      auto m = base;
      m.set(x, y, -m.get(x, y));
      CAPTURE(s.label());
      CHECK_FALSE(verify_identities(m).all_pass());
    }
  }
}

TEST_CASE("mutated higher constants are rejected") {
  for (const char* label : {"B2", "G2"}) {
    auto sys = parse_root_system(label);
    auto fam = generate_family(sys);
    auto higher = higher_constants(fam);
    for (auto& [k, v] : higher) {
      auto m = higher;
      m[k] = v * Rational(-1);
      CAPTURE(label);
      CHECK_FALSE(verify_identities(fam, m).all_pass());
    }
  }
}

TEST_CASE("higher constant denominators") {
  for (const auto& sys : systems()) {
    auto higher = higher_constants(generate_family(sys));
    std::int64_t lcm = 1;
    for (const auto& [k, v] : higher) lcm = std::lcm(lcm, v.denominator());
    CAPTURE(sys.label());
    if (sys.label() == "B2") CHECK(2 % lcm == 0);
    else if (sys.label() == "G2") CHECK(6 % lcm == 0);
    else CHECK(higher.empty());
  }
}

TEST_CASE("sign choices give rescaling-equivalent families") {
  std::mt19937 rng(7);
  for (const auto& sys : systems()) {
    auto base = generate_family(sys);
    for (int trial = 0; trial < 5; ++trial) {
      std::map<Root, int> signs;
      for (Root r = 0; r < sys.positive_count(); ++r)
        if (sys.height(r) >= 2) signs[r] = (rng() & 1) ? 1 : -1;
      auto other = generate_family(sys, signs);
      CAPTURE(sys.label());
      CHECK(verify_identities(other).all_pass());
      CHECK(jacobi_holds(Adjoint(sys, other)));
      auto n = find_rescaling(base, other);
      REQUIRE(n.has_value());
      CHECK(apply_rescaling(base, *n) == other);
    }
  }
}

TEST_CASE("rescaling examples and group action") {
  auto sys = build_root_system('A', 2);
  auto fam = generate_family(sys);
  Root a = sys.parse_root("a"), b = sys.parse_root("b");
  CHECK(apply_rescaling(fam, rescaling_from_positive(sys, {1, 1, 1})) == fam);
  std::vector<Rational> pos(3, Rational(1));
  pos[static_cast<std::size_t>(a)] = 2;
  auto scaled = apply_rescaling(fam, rescaling_from_positive(sys, pos));
  CHECK(scaled.get(a, b) == Rational(2) * fam.get(a, b));
  CHECK(verify_identities(scaled).all_pass());

  auto same = find_rescaling(fam, fam);
  REQUIRE(same.has_value());
  for (const auto& v : same->n) CHECK(v == Rational(1));

  auto broken = fam;
  broken.set(a, b, Rational(2));
  CHECK_FALSE(find_rescaling(fam, broken).has_value());
  CHECK_THROWS_AS(find_rescaling(fam, generate_family(build_root_system('B', 2))), Error);
}

TEST_CASE("random rescalings preserve identities and round trip") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> num(1, 7), den(1, 7), sgn(0, 1);
  int runs = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto all = systems();
    const auto& sys = all[static_cast<std::size_t>(trial) % all.size()];
    auto fam = generate_family(sys);
    std::vector<Rational> pos;
    for (Root r = 0; r < sys.positive_count(); ++r) pos.emplace_back((sgn(rng) ? 1 : -1) * num(rng), den(rng));
    auto n = rescaling_from_positive(sys, pos);
    auto scaled = apply_rescaling(fam, n);
    CAPTURE(sys.label());
    CHECK(verify_identities(scaled).all_pass());
    Rescaling inv;
    for (const auto& v : n.n) inv.n.push_back(Rational(1) / v);
    CHECK(apply_rescaling(scaled, inv) == fam);
    auto found = find_rescaling(fam, scaled);
    REQUIRE(found.has_value());
    CHECK(apply_rescaling(fam, *found) == scaled);
    ++runs;
  }
  CHECK(runs == 50);
}

TEST_CASE("tagged verification over a ring") {
  auto ring = make_ring(RingSpec::unramified(5, 1, 3));
  for (const auto& sys : systems()) {
    auto fam = generate_family(sys);
    auto higher = higher_constants(fam);
    auto view = tagged_ops(ring);
    view.sys = &sys;
    view.c = [&](Root a, Root b) { return TaggedValue{reduce_rational(ring, fam.get(a, b)), ring.depth()}; };
    view.higher = [&](Root a, Root b, int i, int j) -> std::optional<TaggedValue> {
      auto it = higher.find({a, b, i, j});
      if (it == higher.end()) return std::nullopt;
      return TaggedValue{reduce_rational(ring, it->second), ring.depth()};
    };
    CAPTURE(sys.label());
    CHECK(verify_view(view).all_pass());

    // An error of valuation 2 is visible at precision 3 but not at precision 2.
    Root a = sys.simple_roots()[0], b = sys.simple_roots()[1];
    auto bumped = [&, a, b](int prec) {
      return [&, a, b, prec](Root x, Root y) {
        Element v = reduce_rational(ring, fam.get(x, y));
        if (x == a && y == b) v = v + ring.from_int(25);
        return TaggedValue{v, prec};
      };
    };
    view.c = bumped(3);
    CHECK_FALSE(verify_view(view).all_pass());
    view.c = bumped(2);
    view.higher = [](Root, Root, int, int) -> std::optional<TaggedValue> { return std::nullopt; };
    CHECK(verify_view(view).all_pass());
  }
}

TEST_CASE("tagged rescaling solver") {
  auto ring = make_ring(RingSpec::unramified(5, 1, 2));
  for (const auto& sys : systems()) {
    auto base = generate_family(sys);
    std::map<Root, int> signs;
    for (Root r = 0; r < sys.positive_count(); ++r)
      if (sys.height(r) >= 2) signs[r] = -1;
    auto other = generate_family(sys, signs);
    auto lift = [&](const ConstantFamily& f) {
      return [&f, ring](Root a, Root b) { return TaggedValue{reduce_rational(ring, f.get(a, b)), ring.depth()}; };
    };
    CAPTURE(sys.label());
    auto n = find_rescaling_tagged(sys, lift(base), lift(other), ring);
    CHECK(n.has_value());
    auto wrong = base;
    Root a = sys.simple_roots()[0], b = sys.simple_roots()[1];
    wrong.set(a, b, Rational(3) * wrong.get(a, b));
    CHECK_FALSE(find_rescaling_tagged(sys, lift(base), lift(wrong), ring).has_value());
  }
}

TEST_CASE("reduce_rational") {
  auto ring = make_ring(RingSpec::unramified(3, 1, 2));
  CHECK(reduce_rational(ring, Rational(1, 2)) * ring.from_int(2) == ring.one());
  CHECK_THROWS_AS(reduce_rational(ring, Rational(1, 6)), Error);
}

TEST_CASE("family JSON") {
  auto sys = build_root_system('A', 2);
  auto j = generate_family(sys).to_json();
  CHECK(j.size() == 12);
  CHECK(j["(a,b)"] == "1");
  CHECK(j["(a+b,-b)"] == "1");
  CHECK(j["(b,a)"] == "-1");
}

TEST_CASE("unicity report") {
  for (const char* name : {"A2", "B2", "G2", "A3"}) {
    auto rep = unicity_report(parse_root_system(name), 11, 20);
    CAPTURE(name);
    CHECK(rep.all_pass());
    CHECK(rep.find("unicity.random")->checked == 20);
    CHECK(rep.find("unicity.rejects-inconsistent")->checked > 0);
  }
  // Sign choices: one family per subset of non-simple positive roots.
  CHECK(unicity_report(parse_root_system("G2"), 1, 1).find("unicity.signs")->checked == 16);
}
