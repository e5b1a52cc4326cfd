#pragma once

// Structure constants c(a,b,i,j) of the commutator expansion
//   [u_a(x), u_b(y)] = prod_{i,j} u_{ia+jb}(c(a,b,i,j) x^i y^j),
// factors ordered by (i+j, i).  c(a,b) means c(a,b,1,1).

#include <functional>
#include <map>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "json.hpp"
#include "parahoric/report.hpp"
#include "parahoric/ring.hpp"
#include "parahoric/rootsystem.hpp"

namespace parahoric {

class ConstantFamily {
 public:
  explicit ConstantFamily(RootSystem sys) : sys_(std::move(sys)) {}
  const RootSystem& system() const { return sys_; }
  // Zero when a + b is not a root.
  Rational get(Root a, Root b) const;
  void set(Root a, Root b, Rational v) { c_[{a, b}] = v; }
  const std::map<std::pair<Root, Root>, Rational>& values() const { return c_; }
  nlohmann::ordered_json to_json() const;
  friend bool operator==(const ConstantFamily& x, const ConstantFamily& y) { return x.sys_ == y.sys_ && x.c_ == y.c_; }

 private:
  RootSystem sys_;
  std::map<std::pair<Root, Root>, Rational> c_;
};

// Every additive ordered pair (a, b), in index order.
std::vector<std::pair<Root, Root>> additive_pairs(const RootSystem& sys);

// The pairs (i, j), i, j >= 1, with i*a + j*b a root, ordered by (i+j, i).
std::vector<std::pair<int, int>> commutator_terms(const RootSystem& sys, Root a, Root b);

// signs: optional sign per positive root of height >= 2, applied on its
// extraspecial pair; default +.
ConstantFamily generate_family(const RootSystem& sys, const std::map<Root, int>& signs = {});

using HigherKey = std::tuple<Root, Root, int, int>;
using HigherConstants = std::map<HigherKey, Rational>;
// All c(a,b,i,j) with i + j >= 3, derived from the (1,1) constants.
HigherConstants higher_constants(const ConstantFamily& c);

struct Rescaling {
  std::vector<Rational> n;  // indexed by root; n[-a] = 1/n[a]
};
Rescaling rescaling_from_positive(const RootSystem& sys, const std::vector<Rational>& positive);
ConstantFamily apply_rescaling(const ConstantFamily& c, const Rescaling& n);
// Absent when no rescaling maps c onto c2, or when c2 fails verification.
// Throws NotComparable for different systems.
std::optional<Rescaling> find_rescaling(const ConstantFamily& c, const ConstantFamily& c2);

// Value arithmetic used by the generic identity checker.  Rational values
// compare exactly; ring values carry the precision of their definition.
struct TaggedValue {
  Element value;
  int precision = 0;  // known modulo elements of valuation >= precision
};

template <class V>
struct FamilyView {
  const RootSystem* sys = nullptr;
  std::function<V(Root, Root)> c;
  // c(a,b,i,j) for i + j >= 3 or the (2,1)/(1,2) terms; absent when unknown.
  std::function<std::optional<V>(Root, Root, int, int)> higher;
  std::function<V(std::int64_t)> from_int;
  std::function<V(const V&, const V&)> mul;
  std::function<V(const V&, const V&)> add;
  std::function<V(const V&)> neg;
  std::function<bool(const V&, const V&)> eq;
  std::function<std::string(const V&)> show;
};

FamilyView<Rational> rational_view(const ConstantFamily& c, const HigherConstants* higher);
FamilyView<TaggedValue> tagged_ops(const Ring& ring);

template <class V>
VerificationReport verify_view(const FamilyView<V>& view);

// Checks the family and its derived higher constants.
VerificationReport verify_identities(const ConstantFamily& c);
// Same, checking the supplied higher constants instead of derived ones.
VerificationReport verify_identities(const ConstantFamily& c, const HigherConstants& higher);

// Reduction of rationals into a ring; throws InvalidSpec when a denominator
// is not invertible there.
Element reduce_rational(const Ring& ring, const Rational& x);

// Rescaling solver over a ring: finds n with
//   c2(a,b) = n_a n_b / n_{a+b} c1(a,b)
// under precision-tagged comparison.  Returns the values on all roots.
std::optional<std::vector<TaggedValue>> find_rescaling_tagged(const RootSystem& sys,
                                                              const std::function<TaggedValue(Root, Root)>& c1,
                                                              const std::function<TaggedValue(Root, Root)>& c2,
                                                              const Ring& ring);

}  // namespace parahoric
