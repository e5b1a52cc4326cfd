#pragma once

// Depth-h parahoric-type quotient groups realized as windowed matrix groups.
//
// Entry (i,j) of an element is defined modulo its window: values x with
// f_ij <= v(x) < h - f_ji, where f_ij = f(w_i - w_j) for the weights w_i of
// the standard representation and f_ii = 0.  Entries are stored in scaled
// coordinates: x = pi^{f_ij} * y with y canonical of width h - f_ij - f_ji.
// This lets f take negative values without leaving the ring.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "parahoric/chevalley.hpp"
#include "parahoric/report.hpp"
#include "parahoric/ring.hpp"
#include "parahoric/rootsystem.hpp"

namespace parahoric {

enum class Family { GL, SL, Sp4, HeteroBlock };

std::string family_name(Family f);

struct GroupSpec {
  Family family = Family::GL;
  int n = 2;  // matrix size; block size for HeteroBlock; ignored for Sp4
  RingSpec ring;
  std::optional<RingSpec> ring2;  // HeteroBlock only
  std::vector<Rational> point;    // concave function on simple roots; empty = 0
};

// {"family":"SL","n":2,"ring":"unram(p=3,m=1,h=2)","f":[1/2]}; "ring2" for
// HeteroBlock.  Bare rationals such as 1/2 are accepted inside "f".
GroupSpec parse_group_spec(std::string_view json_text);
nlohmann::ordered_json to_json(const GroupSpec& spec);

inline constexpr std::uint64_t kDefaultCap = 10'000'000;

namespace detail {
struct GroupData;
}

struct GroupElement {
  const detail::GroupData* owner = nullptr;
  std::vector<Element> entries;  // row-major, scaled coordinates

  friend bool operator==(const GroupElement& a, const GroupElement& b) {
    return a.owner == b.owner && a.entries == b.entries;
  }
  friend bool operator<(const GroupElement& a, const GroupElement& b);
};

class Group {
 public:
  // Throws IllFormedWindows, UnsupportedFamily, IncompatibleRings.
  explicit Group(const GroupSpec& spec);

  const GroupSpec& spec() const;
  const RootSystem& roots() const;
  const ConcaveFunction& concave() const;
  int size() const;  // matrix dimension
  int depth() const;
  Ring ring() const;  // R, or R_1 for HeteroBlock
  Ring ring_at(int i, int j) const;
  int offset(int i, int j) const;
  int width(int i, int j) const;
  std::optional<Root> root_at(int i, int j) const;
  std::string describe() const;
  // Moves a ring element between R_1 and R_2 (HeteroBlock); identity otherwise.
  Element convert(const Element& x, const Ring& target) const;

  GroupElement identity() const;
  // Canonicalizes scaled entries (any representatives of their classes).
  GroupElement make(std::vector<Element> scaled) const;
  GroupElement mul(const GroupElement& a, const GroupElement& b) const;
  GroupElement inverse(const GroupElement& a) const;
  // a b a^-1 b^-1
  GroupElement commutator(const GroupElement& a, const GroupElement& b) const;
  bool contains(const GroupElement& g) const;
  nlohmann::ordered_json to_json(const GroupElement& g) const;

  // Root subgroups.  u(a, y) has entry pi^{f(a)} y at the position of a;
  // u_value takes the entry itself.
  GroupElement u(Root a, const Element& y) const;
  GroupElement u_value(Root a, const Element& x) const;
  Element root_param(Root a, const GroupElement& g) const;
  Ring param_ring(Root a) const;
  int param_width(Root a) const;  // h - f(a) - f(-a)
  // Canonical parameters of U_a, i.e. all of its elements.
  std::vector<Element> params(Root a) const;
  // Valuation of the entry pi^{f(a)} y; h - f(-a) for the identity.
  int param_valuation(Root a, const Element& y) const;
  // 1, the valuation-0 parameter when f(a) = 0; otherwise pi^{-f(a)} reduced.
  Element unit_param(Root a) const;

  // Diagonal subgroup.
  bool is_diagonal(const GroupElement& g) const;
  // Cocharacter lattice element v applied to a unit.
  GroupElement cocharacter(const std::vector<int>& v, const Element& lambda) const;
  // h_{a^vee, lambda}.  Throws NotAUnit.
  GroupElement h_cochar(Root a, const Element& lambda) const;
  int torus_rank() const;
  std::vector<GroupElement> torus_elements(std::uint64_t cap = kDefaultCap) const;
  // Some torus element t with Ad(t) u_a(y) = u_a(ratio * y), if one exists.
  std::optional<GroupElement> torus_for_ratio(Root a, const Element& ratio) const;

  // Number of entry tuples over all windows (saturating), and the elements
  // themselves.  Throws TooLarge above cap.
  std::uint64_t tuple_count() const;
  std::vector<GroupElement> elements(std::uint64_t cap = kDefaultCap) const;

  const detail::GroupData* data() const { return d_.get(); }

 private:
  std::shared_ptr<const detail::GroupData> d_;
};

// ---- factorization ---------------------------------------------------------

struct RootParam {
  Root root;
  Element param;  // scaled
};

// Sequential elimination over root subgroups in the given order.  Throws
// NotInProduct.
std::vector<RootParam> decompose_unipotent(const Group& g, const GroupElement& x, const std::vector<Root>& order);
GroupElement recompose(const Group& g, const std::vector<RootParam>& factors);

// ---- rank one --------------------------------------------------------------

struct WeylRep {
  GroupElement n;
  bool both_factorizations = false;  // u u' u = u' u u'
  bool conjugates_back = false;      // u' = n u n^-1
  bool normalizes_torus = false;
};
// Throws NotAvailable when a or -a has no valuation-0 elements.
WeylRep weyl_rep(const Group& g, Root a);

// u_{-a,l} u_{a,1} = u_{a,1/(1+l)} h_{a,1/(1+l)} u_{-a,l/(1+l)} for the first
// simple root.  Throws SingularLambda when 1 + l is not a unit.
bool rank1_check(const Group& g, const Element& lambda);
// Sweeps every lambda with 1 + lambda a unit.
VerificationReport rank1_report(const Group& g);

struct IwahoriFactors {
  Element a, b, c;
  bool closed_forms = false;  // a = b = 1/(1+pi l), c = l/(1+pi l)
  bool recomposes = false;
};
// u_{-a,l} u_{a,1} = u_{a,a} h_{a,b} u_{-a,c} in an Iwahori-window rank-1
// group.  Throws NoFactorization.
IwahoriFactors iwahori_abc(const Group& g, const Element& lambda);
VerificationReport iwahori_report(const Group& g);

// ---- structure constants ---------------------------------------------------

struct ExtractedConstants {
  std::map<std::pair<Root, Root>, TaggedValue> c;
  std::map<HigherKey, TaggedValue> higher;
};
// Factors [u_a(1), u_b(1)] (scaled parameters) over the terms ordered by
// (i+j, i) and tags each constant with its precision.
ExtractedConstants extract_constants(const Group& g);
FamilyView<TaggedValue> extracted_view(const Group& g, const ExtractedConstants& e);
// Identities on the extracted constants plus the rescaling round trip
// against the generated family.
VerificationReport constants_report(const Group& g);

// ---- nested commutators ----------------------------------------------------

// [a_1,[a_2,...,[a_n,b]...]] against the ordered subset product.  Throws
// NonCommutingInputs.
bool nested_commutator_check(const Group& g, const std::vector<GroupElement>& a, const GroupElement& b);
// Subsets of {1..n} ordered so that I precedes J when the smallest element of
// their symmetric difference lies in I.
std::vector<std::vector<int>> subset_order(int n);
VerificationReport nested_commutator_report(const Group& g, int draws, std::uint64_t seed);

// ---- induced rings ---------------------------------------------------------

struct InducedRing {
  Root root = 0;
  Element unit;                  // parameter of u1
  std::vector<Element> params;   // table index -> parameter
  std::shared_ptr<TableRing> table;
  Ring expected;                 // the truncated ring it should be
  std::optional<std::string> axiom_violation;
  std::optional<RingIsomorphism> iso;  // expected -> table
};
// Throws NotTransitive when the torus does not reach every valuation-0
// parameter, NoSuchH when u1 has positive valuation.
InducedRing induced_ring(const Group& g, Root a, const Element& u1);
// Checks every valuation-0 choice of u1 and the map Ad(h_{u1'}) between
// the resulting rings.
VerificationReport induced_ring_report(const Group& g, Root a);
// Conjugation by the Weyl representative as a ring map R_a -> R_{-a}.
bool weyl_transports_ring(const Group& g, Root a);

struct OrbitReport {
  Root root = 0;
  int level = 0;
  std::vector<std::vector<Element>> orbits;
};
OrbitReport orbit_report(const Group& g, Root a, int level);

// ---- axioms ----------------------------------------------------------------

VerificationReport axiom_report(const Group& g, std::uint64_t cap = kDefaultCap);

struct ClosureResult {
  bool closed = true;
  bool well_defined = true;  // product independent of window representatives
  bool associative = true;
  bool exhaustive = false;
  std::uint64_t products = 0;
  std::string witness;
};
ClosureResult closure_check(const Group& g, std::uint64_t samples, std::uint64_t seed, std::uint64_t cap = kDefaultCap);

// ---- the two-ring block counterexample ----------------------------------------

struct CounterexampleResult {
  GroupSpec spec;
  bool quotients_isomorphic = false;
  bool rings_isomorphic = false;
  ClosureResult closure;
  VerificationReport axioms;
  std::optional<bool> induced_rings_isomorphic;  // absent for n = 1
  nlohmann::ordered_json to_json() const;
};
// Throws IncompatibleRings, TooLarge (block sizes above 2).
CounterexampleResult counterexample_group(int n, const RingSpec& r1, const RingSpec& r2, std::uint64_t seed,
                                          std::uint64_t cap = kDefaultCap);

}  // namespace parahoric
