#include <random>
#include <set>

#include "doctest.h"
#include "parahoric/error.hpp"
#include "parahoric/rootsystem.hpp"

using namespace parahoric;

namespace {

const std::vector<std::string> kSystems = {"A1", "A2", "A3", "B2", "G2"};

// Weyl group orbit closure, as an independent check of the reflection table.
std::set<std::vector<int>> orbit_of_simple(const RootSystem& sys) {
  std::set<std::vector<int>> seen;
  std::vector<Root> stack = sys.simple_roots();
  while (!stack.empty()) {
    Root r = stack.back();
    stack.pop_back();
    if (!seen.insert(sys.coefficients(r)).second) continue;
    for (Root s : sys.simple_roots()) stack.push_back(sys.reflect(s, r));
  }
  return seen;
}

}  // namespace

TEST_CASE("root counts and labels") {
  CHECK(parse_root_system("A2").size() == 6);
  CHECK(parse_root_system("A3").size() == 12);
  CHECK(parse_root_system("B2").size() == 8);
  CHECK(parse_root_system("C2").size() == 8);
  CHECK(parse_root_system("G2").size() == 12);
  CHECK_THROWS_AS(parse_root_system("D4"), Error);
  CHECK_THROWS_AS(parse_root_system("B3"), Error);
  CHECK_THROWS_AS(parse_root_system("G"), Error);

  std::vector<std::string> g2;
  RootSystem g = parse_root_system("G2");
  for (Root a = 0; a < g.positive_count(); ++a) g2.push_back(g.name(a));
  CHECK(g2 == std::vector<std::string>{"a", "b", "a+b", "2a+b", "3a+b", "3a+2b"});
  RootSystem b = parse_root_system("B2");
  std::vector<std::string> b2;
  for (Root a = 0; a < b.size(); ++a) b2.push_back(b.name(a));
  CHECK(b2 == std::vector<std::string>{"a", "b", "a+b", "2a+b", "-a", "-b", "-a-b", "-2a-b"});
  CHECK(b.squared_length(0) < b.squared_length(1));
  CHECK(g.squared_length(0) < g.squared_length(1));
}

TEST_CASE("cartan matrices") {
  CHECK(parse_root_system("A2").cartan_matrix() == std::vector<std::vector<int>>{{2, -1}, {-1, 2}});
  CHECK(parse_root_system("B2").cartan_matrix() == std::vector<std::vector<int>>{{2, -1}, {-2, 2}});
  CHECK(parse_root_system("G2").cartan_matrix() == std::vector<std::vector<int>>{{2, -1}, {-3, 2}});
  CHECK(parse_root_system("A3").cartan_matrix() ==
        std::vector<std::vector<int>>{{2, -1, 0}, {-1, 2, -1}, {0, -1, 2}});
}

TEST_CASE("sums, strings and reflections") {
  RootSystem a2 = parse_root_system("A2"), b2 = parse_root_system("B2"), g2 = parse_root_system("G2");
  Root a = 0, b = 1;
  CHECK(a2.sum(a, b) == a2.parse_root("a+b"));
  CHECK(!a2.sum(a, a).has_value());
  CHECK(g2.sum(a, g2.parse_root("a+b")) == g2.parse_root("2a+b"));
  CHECK(a2.p_int(a, b) == 1);
  CHECK(b2.p_int(a, b2.parse_root("a+b")) == 2);
  CHECK(g2.p_int(a, g2.parse_root("2a+b")) == 3);
  CHECK_THROWS_AS(a2.p_int(a, a), Error);
  CHECK(a2.reflect(a, a) == a2.negate(a));
  CHECK(a2.reflect(a, b) == a2.parse_root("a+b"));
  CHECK(b2.reflect(a, b) == b2.parse_root("2a+b"));
  CHECK(g2.parse_root("-3a-2b") == g2.negate(g2.highest_root()));
  CHECK_THROWS_AS(g2.parse_root("2b"), Error);
  CHECK_THROWS_AS(g2.parse_root("c"), Error);
}

TEST_CASE("structural invariants on every supported system") {
  for (const auto& label : kSystems) {
    RootSystem sys = parse_root_system(label);
    CAPTURE(label);
    // Reduced and closed under negation.
    for (Root x = 0; x < sys.size(); ++x) {
      CHECK(!sys.combination(2, x, 0, x).has_value());
      auto neg = sys.coefficients(x);
      for (int& c : neg) c = -c;
      CHECK(sys.coefficients(sys.negate(x)) == neg);
    }
    // Weyl orbit of the simple roots is all of the roots.
    CHECK(orbit_of_simple(sys).size() == static_cast<std::size_t>(sys.size()));
    for (Root x = 0; x < sys.size(); ++x) {
      std::set<Root> image;
      for (Root y = 0; y < sys.size(); ++y) {
        CHECK(sys.reflect(x, sys.reflect(x, y)) == y);
        image.insert(sys.reflect(x, y));
      }
      CHECK(image.size() == static_cast<std::size_t>(sys.size()));
    }
    // p_int in {1,2,3} and Weyl invariant.
    for (Root x = 0; x < sys.size(); ++x)
      for (Root y = 0; y < sys.size(); ++y) {
        if (!sys.sum(x, y)) continue;
        int p = sys.p_int(x, y);
        CHECK(p >= 1);
        CHECK(p <= 3);
        for (Root w = 0; w < sys.size(); ++w) CHECK(sys.p_int(sys.reflect(w, x), sys.reflect(w, y)) == p);
      }
    // Every root differs from some extended simple root by a root.
    auto ext = sys.extended_simple_roots();
    if (sys.size() > 2)
      for (Root x = 0; x < sys.size(); ++x) {
        bool found = false;
        for (Root e : ext)
          if (e == x || sys.combination(1, x, -1, e)) found = true;
        CHECK(found);
      }
    // Names round-trip.
    for (Root x = 0; x < sys.size(); ++x) CHECK(sys.parse_root(sys.name(x)) == x);
  }
}

TEST_CASE("extended simple roots") {
  auto names = [](const RootSystem& s) {
    std::vector<std::string> out;
    for (Root r : s.extended_simple_roots()) out.push_back(s.name(r));
    return out;
  };
  CHECK(names(parse_root_system("A2")) == std::vector<std::string>{"a", "b", "-a-b"});
  CHECK(names(parse_root_system("B2")) == std::vector<std::string>{"a", "b", "-2a-b"});
  CHECK(names(parse_root_system("G2")) == std::vector<std::string>{"a", "b", "-3a-2b"});
}

TEST_CASE("concave functions from points") {
  RootSystem a1 = parse_root_system("A1");
  auto special = extend_concave(a1, {Rational(0)});
  CHECK(special(0) == 0);
  CHECK(special(1) == 0);
  CHECK(psi_of(a1, special).size() == 2);
  auto iwahori = extend_concave(a1, {Rational(1, 2)});
  CHECK(iwahori(0) == 1);
  CHECK(iwahori(1) == 0);
  CHECK(psi_of(a1, iwahori).empty());

  RootSystem a2 = parse_root_system("A2");
  auto f = extend_concave(a2, {Rational(1, 2), Rational(1, 2)});
  Root ab = a2.parse_root("a+b");
  CHECK(f(ab) == 1);
  CHECK(f(a2.negate(ab)) == -1);
  auto psi = psi_of(a2, f);
  CHECK(psi == std::vector<Root>{ab, a2.negate(ab)});
  CHECK(psi_of(a2, constant_concave(a2, 0)).size() == 6);

  CHECK(check_concave(a2, constant_concave(a2, 0).values).ok);
  auto bad = check_concave(a1, {-1, -1});
  CHECK(!bad.ok);
  CHECK(!bad.violations.empty());
  CHECK_THROWS_AS(psi_of(a1, ConcaveFunction{{-1, -1}, {}}), Error);
  CHECK_THROWS_AS(extend_concave(a1, {Rational(1, 7)}), Error);
}

TEST_CASE("every rational point gives a concave function with the 0/1 sum rule") {
  std::mt19937 rng(7);
  for (const auto& label : kSystems) {
    RootSystem sys = parse_root_system(label);
    for (int trial = 0; trial < 300; ++trial) {
      std::vector<Rational> point;
      for (int k = 0; k < sys.rank(); ++k) {
        int den = std::vector<int>{1, 2, 3, 6}[rng() % 4];
        int num = static_cast<int>(rng() % 25) - 12;
        point.emplace_back(num, den);
      }
      auto f = extend_concave(sys, point);
      REQUIRE(check_concave(sys, f.values).ok);
      for (Root x = 0; x < sys.size(); ++x) {
        int s = f(x) + f(sys.negate(x));
        REQUIRE((s == 0 || s == 1));
      }
      auto psi = psi_of(sys, f);
      std::set<Root> members(psi.begin(), psi.end());
      for (Root x : psi) {
        REQUIRE(members.count(sys.negate(x)));
        for (Root y : psi)
          if (auto s = sys.sum(x, y)) REQUIRE(members.count(*s));
      }
    }
  }
}

TEST_CASE("point parsing") {
  auto p = parse_point("f=[1/2, 0]");
  REQUIRE(p.size() == 2);
  CHECK(p[0] == Rational(1, 2));
  CHECK(p[1] == Rational(0));
  CHECK(parse_point("[-2/6]")[0] == Rational(-1, 3));
  CHECK_THROWS_AS(parse_point("1/2"), Error);
  CHECK_THROWS_AS(parse_point("[1/0]"), Error);
  CHECK(format_rational(Rational(-3, 6)) == "-1/2");
}
