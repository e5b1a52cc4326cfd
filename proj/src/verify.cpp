#include "parahoric/verify.hpp"

#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "parahoric/chevalley.hpp"

namespace parahoric {

VerificationReport ring_report(const Ring& r) {
  VerificationReport rep;
  rep.subject = to_string(r.spec());
  const int h = r.depth();
  const auto all = r.elements();

  auto& vzero = rep.add("valuation.zero", "v(x) = h iff x = 0");
  auto& vprod = rep.add("valuation.product", "v(xy) = min(v(x) + v(y), h)");
  auto& vsum = rep.add("valuation.sum", "v(x + y) >= min(v(x), v(y))");
  auto& units = rep.add("valuation.units", "x is invertible iff v(x) = 0");
  for (const auto& x : all) {
    record(vzero, (x.valuation() == h) == x.is_zero(), x.to_string());
    if (x.is_unit()) record(units, x * x.inverse() == r.one(), x.to_string());
    else {
      bool has_inverse = false;
      for (const auto& y : all) has_inverse = has_inverse || x * y == r.one();
      record(units, !has_inverse, x.to_string());
    }
    for (const auto& y : all) {
      record(vprod, (x * y).valuation() == std::min(x.valuation() + y.valuation(), h),
             x.to_string() + " * " + y.to_string());
      record(vsum, (x + y).valuation() >= std::min(x.valuation(), y.valuation()),
             x.to_string() + " + " + y.to_string());
    }
  }

  auto& iorder = rep.add("ideals.order", "|R_i| = q^(h-i)");
  auto& iprinc = rep.add("ideals.principal", "R_i = pi^i R, and every ideal is some R_i");
  const std::uint64_t q = static_cast<std::uint64_t>(r.residue_size());
  std::vector<std::set<Element>> levels(static_cast<std::size_t>(h + 1));
  for (const auto& x : all)
    for (int i = 0; i <= x.valuation(); ++i) levels[static_cast<std::size_t>(i)].insert(x);
  for (int i = 0; i <= h; ++i) {
    std::uint64_t want = 1;
    for (int k = i; k < h; ++k) want *= q;
    record(iorder, levels[static_cast<std::size_t>(i)].size() == want, "i=" + std::to_string(i));
    std::set<Element> multiples;
    Element pi_i = i == 0 ? r.one() : (i >= h ? r.zero() : r.uniformizer().pow(static_cast<std::uint64_t>(i)));
    for (const auto& x : all) multiples.insert(pi_i * x);
    record(iprinc, multiples == levels[static_cast<std::size_t>(i)], "i=" + std::to_string(i));
  }
  // The ideal generated by any element is the level of its valuation.
  for (const auto& x : all) {
    std::set<Element> generated;
    for (const auto& y : all) generated.insert(x * y);
    record(iprinc, generated == levels[static_cast<std::size_t>(x.valuation())], "(" + x.to_string() + ")");
  }

  auto& dround = rep.add("digits.round-trip", "x = sum s_i pi^i with s_i Teichmuller, recovered exactly");
  auto& dbij = rep.add("digits.bijection", "digit vectors are distinct and cover T^h");
  auto teich = r.teichmuller_reps();
  std::set<Element> teich_set(teich.begin(), teich.end());
  std::set<std::vector<std::uint32_t>> seen;
  for (const auto& x : all) {
    auto digits = r.decompose(x);
    bool in_t = digits.size() == static_cast<std::size_t>(h);
    std::vector<std::uint32_t> key;
    for (const auto& s : digits) {
      in_t = in_t && teich_set.count(s) > 0;
      key.push_back(s.index());
    }
    record(dround, in_t && r.recompose(digits) == x, x.to_string());
    seen.insert(key);
  }
  std::uint64_t tuples = 1;
  for (int i = 0; i < h; ++i) tuples *= teich_set.size();
  record(dbij, teich_set.size() == q && seen.size() == r.order() && tuples == r.order(),
         std::to_string(seen.size()) + " distinct of " + std::to_string(r.order()));

  auto& sq = rep.add("sqrt.squares", "sqrt(u^2) = {u, -u} for every unit u");
  auto& nsq = rep.add("sqrt.absent", "sqrt(x) is absent iff the residue of x is not a square");
  if (r.p() != 2) {
    auto [k, proj] = quotient_ring(r, 1);
    std::set<Element> residue_squares;
    for (const auto& y : k.elements()) residue_squares.insert(y * y);
    for (const auto& u : all) {
      if (!u.is_unit()) continue;
      auto roots = sqrt(u * u);
      bool ok = roots && roots->first != roots->second && roots->first == -roots->second &&
                (roots->first == u || roots->second == u);
      record(sq, ok, u.to_string());
      bool square_residue = residue_squares.count(proj(u)) > 0;
      record(nsq, sqrt(u).has_value() == square_residue, u.to_string());
    }
  }
  return rep;
}

VerificationReport unicity_report(const RootSystem& sys, std::uint64_t seed, int random_rescalings) {
  VerificationReport rep;
  rep.subject = sys.label();
  const ConstantFamily base = generate_family(sys);

  auto round_trip = [&](const ConstantFamily& target) {
    auto n = find_rescaling(base, target);
    return n && apply_rescaling(base, *n) == target;
  };

  auto& self = rep.add("unicity.self", "find_rescaling(c, c) maps c to c");
  record(self, round_trip(base), "");

  auto& signs = rep.add("unicity.signs", "families generated with any extraspecial signs differ by a rescaling");
  std::vector<Root> composite;
  for (Root a : sys.positive_roots())
    if (sys.height(a) >= 2) composite.push_back(a);
  for (std::uint32_t mask = 0; mask < (1u << composite.size()); ++mask) {
    std::map<Root, int> choice;
    for (std::size_t k = 0; k < composite.size(); ++k) choice[composite[k]] = (mask >> k) & 1u ? -1 : 1;
    ConstantFamily other = generate_family(sys, choice);
    record(signs, verify_identities(other).all_pass() && round_trip(other), "mask " + std::to_string(mask));
  }

  auto& random = rep.add("unicity.random", "c' = (N_a N_b / N_{a+b}) c is recovered for random N");
  auto& action = rep.add("unicity.action", "rescaling by N then by 1/N is the identity");
  auto& preserved = rep.add("unicity.identities-preserved", "rescaled families satisfy every identity");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> part(1, 7), sign(0, 1);
  const auto positives = sys.positive_roots();
  for (int k = 0; k < random_rescalings; ++k) {
    std::vector<Rational> pos, inv;
    for (std::size_t i = 0; i < positives.size(); ++i) {
      Rational v(part(rng) * (sign(rng) ? -1 : 1), part(rng));
      pos.push_back(v);
      inv.push_back(Rational(1) / v);
    }
    ConstantFamily scaled = apply_rescaling(base, rescaling_from_positive(sys, pos));
    const std::string tag = "draw " + std::to_string(k);
    record(random, round_trip(scaled), tag);
    record(action, apply_rescaling(scaled, rescaling_from_positive(sys, inv)) == base, tag);
    record(preserved, verify_identities(scaled).all_pass(), tag);
  }

  auto& corrupt = rep.add("unicity.rejects-inconsistent", "no rescaling reaches a family with one constant doubled");
  for (const auto& [pair, value] : base.values()) {
    if (!sys.is_positive(pair.first) || !sys.is_positive(pair.second)) continue;
    ConstantFamily bad = base;
    bad.set(pair.first, pair.second, value * 2);
    record(corrupt, !find_rescaling(base, bad).has_value(), sys.name(pair.first) + "," + sys.name(pair.second));
  }
  return rep;
}

}  // namespace parahoric
