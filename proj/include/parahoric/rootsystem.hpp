#pragma once

// Reduced root systems A_n, B2 (= C2) and G2 in fixed integer realizations,
// plus concave functions on them.
//
// Roots are referred to by index.  Indices 0..N-1 are the positive roots in
// increasing (height, coefficient) order, and index i + N is -root(i).

#include <boost/rational.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace parahoric {

using Rational = boost::rational<std::int64_t>;
using Root = int;

class RootSystem {
 public:
  char type() const { return type_; }
  int rank() const { return rank_; }
  std::string label() const;

  int size() const { return static_cast<int>(ambient_.size()); }
  int positive_count() const { return size() / 2; }
  bool is_positive(Root a) const { return a < positive_count(); }
  Root negate(Root a) const { return a < positive_count() ? a + positive_count() : a - positive_count(); }
  std::vector<Root> simple_roots() const;
  std::vector<Root> positive_roots() const;

  // Coordinates in the ambient lattice and coefficients over simple roots.
  const std::vector<int>& ambient(Root a) const { return ambient_[static_cast<std::size_t>(a)]; }
  const std::vector<int>& coefficients(Root a) const { return coeffs_[static_cast<std::size_t>(a)]; }
  int height(Root a) const;

  std::optional<Root> find(const std::vector<int>& coefficients) const;
  std::optional<Root> find_ambient(const std::vector<int>& coords) const;
  std::optional<Root> sum(Root a, Root b) const;
  // Root i*a + j*b if it is one.
  std::optional<Root> combination(int i, Root a, int j, Root b) const;

  int inner(Root a, Root b) const;
  int squared_length(Root a) const { return inner(a, a); }
  // <a, b^vee> = 2(a,b)/(b,b)
  int pairing(Root a, Root b) const;
  std::vector<std::vector<int>> cartan_matrix() const;

  // Smallest c >= 1 such that b - c*a is not a root.  Throws NotAdditivePair
  // unless a + b is a root.
  int p_int(Root a, Root b) const;
  // s_a(b)
  Root reflect(Root a, Root b) const;
  Root highest_root() const;
  std::vector<Root> extended_simple_roots() const;

  // Roots print as combinations of simple roots named a, b, c, ...: "2a+b".
  std::string name(Root a) const;
  Root parse_root(std::string_view text) const;

  friend bool operator==(const RootSystem& x, const RootSystem& y) { return x.type_ == y.type_ && x.rank_ == y.rank_; }

 private:
  friend RootSystem build_root_system(char type, int rank);
  char type_ = 'A';
  int rank_ = 0;
  std::vector<std::vector<int>> ambient_;
  std::vector<std::vector<int>> coeffs_;
};

// (A, n >= 1), (B, 2), (C, 2), (G, 2).  In B2 the first simple root is short.
RootSystem build_root_system(char type, int rank);
// "A2", "B2", "C2", "G2", "A3", ...
RootSystem parse_root_system(std::string_view text);

struct ConcaveFunction {
  std::vector<int> values;  // indexed by root
  std::vector<Rational> point;  // values on simple roots, when built from one
  int operator()(Root a) const { return values[static_cast<std::size_t>(a)]; }
};

inline constexpr std::int64_t kDefaultDenominatorBound = 6;

// f(a) = ceil(sum_i n_i r_i) for a = sum_i n_i a_i.
ConcaveFunction extend_concave(const RootSystem& sys, const std::vector<Rational>& point,
                               std::int64_t denominator_bound = kDefaultDenominatorBound);
// Constant function.
ConcaveFunction constant_concave(const RootSystem& sys, int value);

struct ConcavityCheck {
  bool ok = true;
  std::vector<std::string> violations;
};
ConcavityCheck check_concave(const RootSystem& sys, const std::vector<int>& values);

// {a : f(a) + f(-a) = 0}, in index order.  Throws InvalidConcave.
std::vector<Root> psi_of(const RootSystem& sys, const ConcaveFunction& f);

// "[1/2,0]" or "f=[1/2,0]".
std::vector<Rational> parse_point(std::string_view text);
std::string format_rational(const Rational& r);
Rational parse_rational(std::string_view text);

}  // namespace parahoric
