#include <map>
#include <set>

#include "doctest.h"
#include "parahoric/error.hpp"
#include "parahoric/ring.hpp"
#include "parahoric/verify.hpp"

using namespace parahoric;

namespace {

Ring zmod(int p, int h) { return make_ring(RingSpec::unramified(p, 1, h)); }
Ring poly(int p, int h) { return make_ring(RingSpec::equichar(p, 1, h)); }

Element t_poly(const Ring& r, std::vector<std::int64_t> c) { return r.from_coefficients(c); }

std::vector<Ring> test_rings() {
  return {zmod(3, 2),
          zmod(3, 3),
          poly(3, 2),
          poly(3, 3),
          make_ring(RingSpec::unramified(3, 2, 2)),
          make_ring(RingSpec::ramified(3, 2, 1, 3)),
          make_ring(RingSpec::ramified(3, 2, 2, 3))};
}

}  // namespace

TEST_CASE("construction and sizes") {
  CHECK(poly(3, 3).order() == 27);
  Ring ram = make_ring(RingSpec::ramified(3, 2, 1, 3));
  CHECK(ram.order() == 27);
  CHECK(ram.slot_count() == 2);
  CHECK(ram.slot_modulus(0) == 9);
  CHECK(ram.slot_modulus(1) == 3);
  CHECK(make_ring(RingSpec::unramified(3, 2, 2)).order() == 81);
  CHECK(make_ring(RingSpec::ramified(5, 3, 2, 4)).order() == 625);

  auto kind_of = [](const RingSpec& s) {
    try {
      make_ring(s);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::NotAvailable;
  };
  CHECK(kind_of(RingSpec::equichar(2, 1, 2)) == ErrorKind::InvalidSpec);
  CHECK(kind_of(RingSpec::equichar(3, 1, 0)) == ErrorKind::InvalidSpec);
  CHECK(kind_of(RingSpec::ramified(3, 2, 3, 3)) == ErrorKind::InvalidSpec);
  CHECK(kind_of(RingSpec::ramified(3, 3, 1, 3)) == ErrorKind::InvalidSpec);
  CHECK(kind_of(RingSpec::ramified(3, 2, 1, 1)) == ErrorKind::InvalidSpec);
  CHECK(kind_of(RingSpec::unramified(9, 1, 2)) == ErrorKind::InvalidSpec);
}

TEST_CASE("interning gives identical handles") {
  CHECK(zmod(3, 2) == zmod(3, 2));
  CHECK(!(zmod(3, 2) == zmod(3, 3)));
}

TEST_CASE("spec text round trip") {
  for (const char* text : {"equichar(p=3,m=1,h=3)", "unram(p=3,m=2,h=2)", "ram(p=3,e=2,c=2,h=3)"})
    CHECK(to_string(parse_ring_spec(text)) == text);
  CHECK(parse_ring_spec(" ram( p=3, e=2, c=1, h=3 ) ") == RingSpec::ramified(3, 2, 1, 3));
  CHECK_THROWS_AS(parse_ring_spec("ring(p=3)"), Error);
  CHECK_THROWS_AS(parse_ring_spec("unram(p=3,m=1)"), Error);
  CHECK_THROWS_AS(parse_ring_spec("unram(p=3,m=1,h=x)"), Error);
  CHECK_THROWS_AS(parse_ring_spec("unram(p=3,m=1,h=2"), Error);
}

TEST_CASE("integer residues agree with machine arithmetic") {
  for (int h : {1, 2, 3, 4}) {
    Ring r = zmod(3, h);
    const std::int64_t n = static_cast<std::int64_t>(r.order());
    for (std::int64_t a = 0; a < n; ++a)
      for (std::int64_t b = 0; b < n; ++b) {
        REQUIRE((r.from_int(a) + r.from_int(b)) == r.from_int((a + b) % n));
        REQUIRE((r.from_int(a) * r.from_int(b)) == r.from_int((a * b) % n));
        REQUIRE((r.from_int(a) - r.from_int(b)) == r.from_int(((a - b) % n + n) % n));
      }
  }
}

TEST_CASE("truncated polynomials agree with schoolbook multiplication") {
  Ring r = poly(5, 3);
  for (auto x : r.elements())
    for (auto y : r.elements()) {
      auto a = x.coefficients(), b = y.coefficients();
      std::vector<std::int64_t> c(3, 0);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; i + j < 3; ++j) c[i + j] = (c[i + j] + a[i] * b[j]) % 5;
      REQUIRE((x * y) == r.from_coefficients(c));
    }
}

TEST_CASE("documented arithmetic examples") {
  Ring z9 = zmod(3, 2), z27 = zmod(3, 3);
  CHECK((z9.from_int(5) + z9.from_int(7)) == z9.from_int(3));
  Ring f2 = poly(3, 2);
  CHECK((f2.uniformizer() * f2.uniformizer()).is_zero());
  Ring ram = make_ring(RingSpec::ramified(3, 2, 1, 3));
  CHECK((ram.uniformizer() * ram.uniformizer()) == ram.from_int(3));
  Ring ram2 = make_ring(RingSpec::ramified(3, 2, 2, 3));
  CHECK((ram2.uniformizer() * ram2.uniformizer()) == ram2.from_int(6));
  CHECK(ram.uniformizer().pow(3).is_zero());

  CHECK(z27.zero().valuation() == 3);
  CHECK(z27.from_int(6).valuation() == 1);
  CHECK((z27.from_int(3) * z27.from_int(3)).valuation() == 2);
  CHECK(ram.uniformizer().valuation() == 1);
  CHECK(ram.from_int(3).valuation() == 2);

  CHECK(z9.from_int(2).inverse() == z9.from_int(5));
  CHECK_THROWS_AS(z9.from_int(3).inverse(), Error);
  Ring f3 = poly(3, 3);
  CHECK(invert(t_poly(f3, {1, 1, 0})) == t_poly(f3, {1, 2, 1}));

  CHECK(z9.uniformizer() == z9.from_int(3));
  CHECK(f3.uniformizer() == t_poly(f3, {0, 1, 0}));
  CHECK_THROWS_AS(poly(3, 1).uniformizer(), Error);
}

TEST_CASE("mixed rings are rejected") {
  Ring a = zmod(3, 2), b = zmod(3, 3);
  try {
    (void)(a.one() + b.one());
    FAIL("expected MixedRings");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MixedRings);
  }
}

TEST_CASE("square roots") {
  Ring z9 = zmod(3, 2);
  auto r7 = sqrt(z9.from_int(7));
  REQUIRE(r7.has_value());
  CHECK(r7->first == z9.from_int(4));
  CHECK(r7->second == z9.from_int(5));
  auto r1 = sqrt(z9.one());
  REQUIRE(r1.has_value());
  CHECK(r1->first == z9.one());
  CHECK(r1->second == -z9.one());
  CHECK(!sqrt(z9.from_int(2)).has_value());
  CHECK_THROWS_AS(sqrt(z9.from_int(3)), Error);
}

TEST_CASE("teichmuller representatives and decomposition") {
  Ring z9 = zmod(3, 2);
  auto reps = z9.teichmuller_reps();
  REQUIRE(reps.size() == 3);
  CHECK(reps[0] == z9.from_int(0));
  CHECK(reps[1] == z9.from_int(1));
  CHECK(reps[2] == z9.from_int(8));

  auto digits = z9.decompose(z9.from_int(5));
  REQUIRE(digits.size() == 2);
  CHECK(digits[0] == z9.from_int(8));
  CHECK(digits[1] == z9.from_int(8));

  Ring f3 = poly(3, 3);
  auto d = f3.decompose(t_poly(f3, {0, 1, 1}));
  CHECK(d[0].is_zero());
  CHECK(d[1] == f3.one());
  CHECK(d[2] == f3.one());
  for (auto s : poly(3, 2).teichmuller_reps()) CHECK(s.coefficients()[1] == 0);

  // Roots of x^9 = x in GR(9,2), found by brute force.
  Ring gr = make_ring(RingSpec::unramified(3, 2, 2));
  std::set<std::uint32_t> brute;
  for (auto x : gr.elements())
    if (x.pow(9) == x) brute.insert(x.index());
  std::set<std::uint32_t> got;
  for (auto s : gr.teichmuller_reps()) got.insert(s.index());
  CHECK(brute.size() == 9);
  CHECK(got == brute);
}

TEST_CASE("truncated valuation axioms and ideals hold exhaustively") {
  for (const Ring& r : test_rings()) {
    CAPTURE(to_string(r.spec()));
    const int h = r.depth();
    for (auto x : r.elements()) {
      REQUIRE((x.valuation() == h) == x.is_zero());
      for (auto y : r.elements()) {
        int sum = x.valuation() + y.valuation();
        REQUIRE((x * y).valuation() == std::min(sum, h));
        REQUIRE((x + y).valuation() >= std::min(x.valuation(), y.valuation()));
      }
    }
  }
}

TEST_CASE("decompose and recompose are inverse bijections") {
  for (const Ring& r : test_rings()) {
    std::set<std::vector<std::uint32_t>> seen;
    for (auto x : r.elements()) {
      auto d = r.decompose(x);
      REQUIRE(r.recompose(d) == x);
      std::vector<std::uint32_t> key;
      for (auto s : d) key.push_back(s.index());
      seen.insert(key);
    }
    CHECK(seen.size() == r.order());
  }
}

TEST_CASE("quotients") {
  auto [z9, proj] = quotient_ring(zmod(3, 3), 2);
  CHECK(z9 == zmod(3, 2));
  CHECK(proj(zmod(3, 3).from_int(26)) == z9.from_int(8));
  auto [rq, rproj] = quotient_ring(make_ring(RingSpec::ramified(3, 2, 1, 3)), 2);
  CHECK(rq.spec() == RingSpec::ramified(3, 2, 1, 2));
  CHECK(rq.slot_modulus(0) == 3);
  CHECK(rq.slot_modulus(1) == 3);
  auto [f3, fproj] = quotient_ring(zmod(3, 2), 1);
  CHECK(f3.order() == 3);
  CHECK_THROWS_AS(quotient_ring(zmod(3, 2), 3), Error);
  CHECK_THROWS_AS(quotient_ring(zmod(3, 2), 0), Error);

  for (const Ring& r : test_rings())
    for (int i = 1; i <= r.depth(); ++i) {
      auto [q, pr] = quotient_ring(r, i);
      std::set<std::uint32_t> image;
      for (auto x : r.elements()) {
        image.insert(pr(x).index());
        REQUIRE(pr.lift(pr(x)) == r.truncate(x, i));
        REQUIRE(pr(x).valuation() == std::min(x.valuation(), i));
        for (auto y : r.elements()) {
          REQUIRE(pr(x * y) == pr(x) * pr(y));
          REQUIRE(pr(x + y) == pr(x) + pr(y));
        }
      }
      REQUIRE(image.size() == q.order());
    }
}

TEST_CASE("division by the uniformizer") {
  for (const Ring& r : test_rings()) {
    if (r.depth() < 2) continue;
    const Element w = r.uniformizer();
    for (auto x : r.elements())
      for (int k = 0; k <= x.valuation() && k < r.depth(); ++k) {
        Element y = r.divide_by_uniformizer_power(x, k);
        REQUIRE((w.pow(static_cast<std::uint64_t>(k)) * y) == x);
      }
  }
}

TEST_CASE("isomorphism search") {
  Ring r1 = make_ring(RingSpec::ramified(3, 2, 1, 3));
  Ring r2 = make_ring(RingSpec::ramified(3, 2, 2, 3));
  CHECK(!iso_search(r1, r2).has_value());
  CHECK(!iso_search(r2, r1).has_value());
  Ring q1 = make_ring(RingSpec::ramified(3, 2, 1, 2));
  Ring q2 = make_ring(RingSpec::ramified(3, 2, 2, 2));
  auto iso = iso_search(q1, q2);
  REQUIRE(iso.has_value());
  CHECK(iso_search(q2, q1).has_value());
  for (auto a : q1.elements())
    for (auto b : q1.elements()) {
      REQUIRE(iso->image[(a * b).index()] == (q2.at(iso->image[a.index()]) * q2.at(iso->image[b.index()])).index());
      REQUIRE(iso->image[(a + b).index()] == (q2.at(iso->image[a.index()]) + q2.at(iso->image[b.index()])).index());
    }
  CHECK(!iso_search(poly(3, 2), zmod(3, 2)).has_value());
  CHECK(iso_search(zmod(3, 3), zmod(3, 3)).has_value());
  CHECK(iso_search(make_ring(RingSpec::unramified(3, 2, 2)), make_ring(RingSpec::unramified(3, 2, 2))).has_value());
  // At depth 2 with e = 2 the relation reads w^2 = 3c = 0.
  CHECK(iso_search(poly(3, 2), q1).has_value());
  CHECK_THROWS_AS(iso_search(zmod(3, 9), zmod(3, 9)), Error);
}

TEST_CASE("table rings detect broken axioms") {
  Ring z9 = zmod(3, 2);
  std::vector<std::uint32_t> add(81), mul(81);
  for (auto a : z9.elements())
    for (auto b : z9.elements()) {
      add[a.index() * 9 + b.index()] = (a + b).index();
      mul[a.index() * 9 + b.index()] = (a * b).index();
    }
  TableRing good(9, 0, z9.one().index(), add, mul);
  CHECK(!good.axiom_violation().has_value());
  CHECK(iso_search(z9, good).has_value());
  mul[2 * 9 + 3] = 0;
  TableRing bad(9, 0, z9.one().index(), add, mul);
  CHECK(bad.axiom_violation().has_value());
}

TEST_CASE("field descriptions") {
  CHECK(poly(3, 3).field_description().text == "F_3((X))");
  CHECK(zmod(3, 3).field_description().text == "Q_3");
  CHECK(make_ring(RingSpec::ramified(3, 2, 1, 3)).field_description().text == "Q_3 adjoined root of x^2-3");
}

TEST_CASE("ring report covers every element") {
  for (const Ring& r : test_rings()) {
    auto rep = ring_report(r);
    CAPTURE(rep.subject);
    CHECK(rep.all_pass());
    CHECK(rep.find("valuation.product")->checked == static_cast<std::int64_t>(r.order() * r.order()));
    CHECK(rep.find("ideals.order")->checked == r.depth() + 1);
    const std::int64_t units = static_cast<std::int64_t>(r.order() - r.order() / static_cast<std::uint64_t>(r.residue_size()));
    CHECK(rep.find("sqrt.squares")->checked == units);
  }
}
