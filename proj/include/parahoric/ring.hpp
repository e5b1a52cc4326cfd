#pragma once

// Truncated valuation rings O/p^h with finite residue field.
//
// Three presentations are supported:
//   EquiChar    F_q[t]/(t^h)
//   Unramified  the Galois ring GR(p^h, m) = (Z/p^h)[z]/(f(z))
//   Ramified    Z_p[w]/(w^e - p*c) truncated at w^h (tame, binomial Eisenstein)
//
// Rings are interned: make_ring() returns a handle to an immutable, never
// freed description, so elements can carry a raw pointer to it.

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace parahoric {

enum class RingKind { EquiChar, Unramified, Ramified };

struct RingSpec {
  RingKind kind = RingKind::Unramified;
  int p = 3;
  int m = 1;  // residue degree; always 1 for Ramified
  int e = 1;  // ramification index; 1 unless Ramified
  int c = 0;  // Eisenstein constant, w^e = p*c; 0 unless Ramified
  int h = 1;

  static RingSpec equichar(int p, int m, int h);
  static RingSpec unramified(int p, int m, int h);
  static RingSpec ramified(int p, int e, int c, int h);

  friend bool operator==(const RingSpec&, const RingSpec&) = default;
  friend auto operator<=>(const RingSpec&, const RingSpec&) = default;
};

std::string to_string(const RingSpec& spec);
// Accepts `equichar(p=3,m=1,h=3)`, `unram(p=3,m=2,h=2)`, `ram(p=3,e=2,c=2,h=3)`.
RingSpec parse_ring_spec(std::string_view text);

namespace detail {
struct RingData;
}

class Element;

struct FieldDescription {
  std::string base;      // "Q_3", "F_9((X))", ...
  std::string equation;  // defining polynomial of the extension, empty if none
  std::string text;
};

class Ring {
 public:
  Ring() = default;
  explicit Ring(const detail::RingData* d) : d_(d) {}

  const RingSpec& spec() const;
  int p() const;
  int residue_degree() const;
  std::int64_t residue_size() const;  // q
  int depth() const;                  // h
  std::uint64_t order() const;
  std::int64_t characteristic() const;
  std::size_t slot_count() const;
  std::int64_t slot_modulus(std::size_t slot) const;

  Element zero() const;
  Element one() const;
  Element from_int(std::int64_t n) const;
  Element from_coefficients(std::span<const std::int64_t> coeffs) const;
  Element at(std::uint64_t index) const;
  // Canonical valuation-1 element: t, p or w.  Throws DepthOne when h = 1.
  Element uniformizer() const;
  // The q canonical lifts of residue classes (coefficients below p in the
  // lowest level), in index order.
  std::vector<Element> residue_lifts() const;
  std::vector<Element> elements() const;

  std::vector<Element> teichmuller_reps() const;
  std::vector<Element> decompose(const Element& x) const;
  Element recompose(std::span<const Element> digits) const;

  // Canonical representative of x modulo R_w inside this ring.
  Element truncate(const Element& x, int w) const;
  // Some y with w^k * y = x, reduced modulo R_{h-k}.  Requires v(x) >= k.
  Element divide_by_uniformizer_power(const Element& x, int k) const;

  FieldDescription field_description() const;

  const detail::RingData* data() const { return d_; }
  explicit operator bool() const { return d_ != nullptr; }
  friend bool operator==(const Ring& a, const Ring& b) { return a.d_ == b.d_; }

 private:
  const detail::RingData* d_ = nullptr;
};

Ring make_ring(const RingSpec& spec);

class Element {
 public:
  Element() = default;
  Element(const detail::RingData* r, std::uint32_t v) : r_(r), v_(v) {}

  Ring ring() const { return Ring(r_); }
  std::uint32_t index() const { return v_; }
  std::vector<std::int64_t> coefficients() const;

  // h for zero.
  int valuation() const;
  bool is_zero() const;
  bool is_unit() const { return valuation() == 0; }
  Element inverse() const;
  Element pow(std::uint64_t n) const;
  std::string to_string() const;

  friend Element operator+(const Element& a, const Element& b);
  friend Element operator-(const Element& a, const Element& b);
  friend Element operator*(const Element& a, const Element& b);
  friend Element operator-(const Element& a);
  Element& operator+=(const Element& b) { return *this = *this + b; }
  Element& operator-=(const Element& b) { return *this = *this - b; }
  Element& operator*=(const Element& b) { return *this = *this * b; }

  friend bool operator==(const Element& a, const Element& b) { return a.r_ == b.r_ && a.v_ == b.v_; }
  friend bool operator<(const Element& a, const Element& b) { return a.v_ < b.v_; }

 private:
  const detail::RingData* r_ = nullptr;
  std::uint32_t v_ = 0;
};

// Free-function forms of the ring operations.
inline int valuation(const Element& x) { return x.valuation(); }
Element invert(const Element& x);
// Two opposite square roots (ordered by index) of a unit, or nothing when the
// residue is not a square.  Throws NotAUnit.
std::optional<std::pair<Element, Element>> sqrt(const Element& x);

class Projection {
 public:
  Projection(Ring source, Ring target, int level) : source_(source), target_(target), level_(level) {}
  Element operator()(const Element& x) const;
  // Canonical lift back into the source ring.
  Element lift(const Element& y) const;
  Ring source() const { return source_; }
  Ring target() const { return target_; }
  int level() const { return level_; }

 private:
  Ring source_;
  Ring target_;
  int level_;
};

// R/R_i with its projection.  The residue field of a Ramified ring is
// returned as Unramified{p,1,1}.
std::pair<Ring, Projection> quotient_ring(const Ring& r, int i);

// Abstract finite commutative ring on indices 0..order-1, used to compare a
// presented ring against rings only known by their tables.
class FiniteRingView {
 public:
  virtual ~FiniteRingView() = default;
  virtual std::uint64_t order() const = 0;
  virtual std::uint32_t zero() const = 0;
  virtual std::uint32_t one() const = 0;
  virtual std::uint32_t add(std::uint32_t a, std::uint32_t b) const = 0;
  virtual std::uint32_t mul(std::uint32_t a, std::uint32_t b) const = 0;
  virtual std::uint32_t neg(std::uint32_t a) const = 0;
};

class RingView final : public FiniteRingView {
 public:
  explicit RingView(Ring r) : r_(r) {}
  std::uint64_t order() const override;
  std::uint32_t zero() const override;
  std::uint32_t one() const override;
  std::uint32_t add(std::uint32_t a, std::uint32_t b) const override;
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const override;
  std::uint32_t neg(std::uint32_t a) const override;

 private:
  Ring r_;
};

class TableRing final : public FiniteRingView {
 public:
  TableRing(std::uint32_t order, std::uint32_t zero, std::uint32_t one, std::vector<std::uint32_t> add,
            std::vector<std::uint32_t> mul);
  std::uint64_t order() const override { return n_; }
  std::uint32_t zero() const override { return zero_; }
  std::uint32_t one() const override { return one_; }
  std::uint32_t add(std::uint32_t a, std::uint32_t b) const override { return add_[a * n_ + b]; }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const override { return mul_[a * n_ + b]; }
  std::uint32_t neg(std::uint32_t a) const override { return neg_[a]; }

  // Checks commutativity, associativity, distributivity and the identities;
  // returns a description of the first violation.
  std::optional<std::string> axiom_violation() const;

 private:
  std::uint32_t n_;
  std::uint32_t zero_;
  std::uint32_t one_;
  std::vector<std::uint32_t> add_;
  std::vector<std::uint32_t> mul_;
  std::vector<std::uint32_t> neg_;
};

struct RingIsomorphism {
  // image[i] = index in the target of the source element with index i.
  std::vector<std::uint32_t> image;
  std::vector<std::uint32_t> generator_images;
};

inline constexpr std::uint64_t kDefaultIsoBound = 6561;  // 3^8

// Searches for a unital isomorphism from the presented ring `source` onto
// `target` by enumerating images of the presentation generators.  Complete:
// absence means no isomorphism exists.  Throws TooLarge above `bound`.
std::optional<RingIsomorphism> iso_search(const Ring& source, const FiniteRingView& target,
                                          std::uint64_t bound = kDefaultIsoBound);
std::optional<RingIsomorphism> iso_search(const Ring& a, const Ring& b, std::uint64_t bound = kDefaultIsoBound);

}  // namespace parahoric
