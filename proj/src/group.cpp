#include "parahoric/group.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "parahoric/error.hpp"

namespace parahoric {

std::string family_name(Family f) {
  switch (f) {
    case Family::GL: return "GL";
    case Family::SL: return "SL";
    case Family::Sp4: return "Sp4";
    case Family::HeteroBlock: return "HeteroBlock";
  }
  return "?";
}

namespace {

Family parse_family(const std::string& s) {
  if (s == "GL") return Family::GL;
  if (s == "SL") return Family::SL;
  if (s == "Sp4" || s == "Sp" || s == "SP4") return Family::Sp4;
  if (s == "HeteroBlock" || s == "Hetero") return Family::HeteroBlock;
  throw Error(ErrorKind::UnsupportedFamily, "unknown family '" + s + "'");
}

// Quotes bare rationals such as 1/2 so the text parses as JSON.
std::string quote_bare_rationals(std::string_view text) {
  std::string out;
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char ch = text[i];
    if (ch == '"' && (i == 0 || text[i - 1] != '\\')) in_string = !in_string;
    if (!in_string && (std::isdigit(static_cast<unsigned char>(ch)) || ch == '-')) {
      std::size_t j = i;
      if (text[j] == '-') ++j;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && text[j] == '/') {
        ++j;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        out += '"';
        out += text.substr(i, j - i);
        out += '"';
        i = j - 1;
        continue;
      }
    }
    out += ch;
  }
  return out;
}

}  // namespace

GroupSpec parse_group_spec(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(quote_bare_rationals(json_text));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("group spec is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::ParseError, "group spec must be a JSON object");
  for (const auto& [key, value] : j.items())
    if (key != "family" && key != "n" && key != "ring" && key != "ring2" && key != "f")
      throw Error(ErrorKind::ParseError, "group spec: unknown key '" + key + "'");
  GroupSpec s;
  try {
    s.family = parse_family(j.at("family").get<std::string>());
    if (j.contains("n")) s.n = j.at("n").get<int>();
    if (s.family == Family::Sp4) s.n = 4;
    s.ring = parse_ring_spec(j.at("ring").get<std::string>());
    if (j.contains("ring2")) s.ring2 = parse_ring_spec(j.at("ring2").get<std::string>());
    if (j.contains("f")) {
      for (const auto& v : j.at("f")) {
        if (v.is_string()) s.point.push_back(parse_rational(v.get<std::string>()));
        else if (v.is_number_integer()) s.point.emplace_back(v.get<std::int64_t>());
        else throw Error(ErrorKind::ParseError, "f entries must be integers or rationals");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("group spec: ") + e.what());
  }
  if (s.family == Family::HeteroBlock && !s.ring2) throw Error(ErrorKind::ParseError, "HeteroBlock needs ring2");
  return s;
}

nlohmann::ordered_json to_json(const GroupSpec& s) {
  nlohmann::ordered_json j;
  j["family"] = family_name(s.family);
  j["n"] = s.n;
  j["ring"] = to_string(s.ring);
  if (s.ring2) j["ring2"] = to_string(*s.ring2);
  nlohmann::ordered_json f = nlohmann::ordered_json::array();
  for (const auto& r : s.point) f.push_back(format_rational(r));
  j["f"] = f;
  return j;
}

bool operator<(const GroupElement& a, const GroupElement& b) {
  return std::lexicographical_compare(a.entries.begin(), a.entries.end(), b.entries.begin(), b.entries.end(),
                                      [](const Element& x, const Element& y) { return x.index() < y.index(); });
}

// ---- group data ---------------------------------------------------------------

namespace detail {

struct Position {
  int i, j, sign;
};

struct GroupData {
  GroupSpec spec;
  RootSystem sys;
  ConcaveFunction f;
  int N = 0;
  int h = 0;
  Ring r1, r2;
  std::vector<int> off, wid, root_at, block;
  std::vector<Ring> home;
  std::vector<std::vector<Position>> positions;  // by root, leading position first
  std::vector<std::vector<int>> weights;         // per basis vector, for cocharacters
  std::vector<Element> to1, to2;                  // R2 -> R1 and R1 -> R2 through the quotient isomorphism
  std::vector<int> expo;                          // off_ij + off_jk - off_ik
  std::vector<std::vector<int>> form;             // Sp4 symplectic form

  std::size_t at(int i, int j) const { return static_cast<std::size_t>(i * N + j); }

  Element convert(const Element& x, const Ring& target) const {
    if (x.ring() == target) return x;
    if (target == r1 && x.ring() == r2) return to1[x.index()];
    if (target == r2 && x.ring() == r1) return to2[x.index()];
    throw Error(ErrorKind::MixedRings, "element of a ring foreign to this group");
  }

  Element pi_pow(const Ring& r, int e) const {
    if (e <= 0) return r.one();
    if (e >= r.depth()) return r.zero();
    return r.uniformizer().pow(static_cast<std::uint64_t>(e));
  }
};

}  // namespace detail

using detail::GroupData;
using detail::Position;

namespace {

std::vector<std::vector<int>> standard_weights(Family fam, int N) {
  std::vector<std::vector<int>> w;
  if (fam == Family::Sp4) return {{1, 0}, {0, 1}, {0, -1}, {-1, 0}};
  for (int k = 0; k < N; ++k) {
    std::vector<int> v(static_cast<std::size_t>(N), 0);
    v[static_cast<std::size_t>(k)] = 1;
    w.push_back(v);
  }
  return w;
}

std::vector<int> diff(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
  return out;
}

int dot(const std::vector<int>& a, const std::vector<int>& b) {
  int s = 0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

// Sign s making E_ij + s E_kl lie in sp(J), i.e. E^T J + J E = 0.
int symplectic_sign(const std::vector<std::vector<int>>& J, Position a, Position b) {
  for (int s : {1, -1}) {
    int n = static_cast<int>(J.size());
    std::vector<std::vector<int>> E(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 0));
    E[static_cast<std::size_t>(a.i)][static_cast<std::size_t>(a.j)] = 1;
    E[static_cast<std::size_t>(b.i)][static_cast<std::size_t>(b.j)] = s;
    bool ok = true;
    for (int r = 0; r < n && ok; ++r)
      for (int c = 0; c < n && ok; ++c) {
        int v = 0;
        for (int k = 0; k < n; ++k) {
          v += E[static_cast<std::size_t>(k)][static_cast<std::size_t>(r)] * J[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)];
          v += J[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] * E[static_cast<std::size_t>(k)][static_cast<std::size_t>(c)];
        }
        if (v != 0) ok = false;
      }
    if (ok) return s;
  }
  throw Error(ErrorKind::UnsupportedFamily, "no symplectic root element for this position pair");
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
  return a * b;
}

std::uint64_t ipow(std::uint64_t b, int e) {
  std::uint64_t r = 1;
  for (int k = 0; k < e; ++k) r = sat_mul(r, b);
  return r;
}

}  // namespace

Group::Group(const GroupSpec& spec_in) {
  auto d = std::make_shared<GroupData>();
  d->spec = spec_in;
  GroupSpec& spec = d->spec;
  d->r1 = make_ring(spec.ring);
  d->h = d->r1.depth();
  switch (spec.family) {
    case Family::GL:
    case Family::SL:
      if (spec.n < 2 || spec.n > 4) throw Error(ErrorKind::UnsupportedFamily, "GL/SL need 2 <= n <= 4");
      d->N = spec.n;
      d->sys = build_root_system('A', spec.n - 1);
      break;
    case Family::Sp4:
      spec.n = 4;
      d->N = 4;
      d->sys = build_root_system('B', 2);
      break;
    case Family::HeteroBlock:
      if (spec.n < 1 || spec.n > 2) throw Error(ErrorKind::UnsupportedFamily, "HeteroBlock needs block size 1 or 2");
      if (!spec.ring2) throw Error(ErrorKind::IncompatibleRings, "HeteroBlock needs a second ring");
      d->N = 2 * spec.n;
      d->sys = build_root_system('A', 2 * spec.n - 1);
      break;
  }
  const int N = d->N;
  d->r2 = d->r1;
  d->block.assign(static_cast<std::size_t>(N), 0);

  if (spec.family == Family::HeteroBlock) {
    d->r2 = make_ring(*spec.ring2);
    if (d->r2.depth() != d->h || d->r2.p() != d->r1.p() || d->r2.residue_size() != d->r1.residue_size() || d->h < 2)
      throw Error(ErrorKind::IncompatibleRings, "rings must share p, residue field and depth >= 2");
    auto [q1, proj1] = quotient_ring(d->r1, d->h - 1);
    auto [q2, proj2] = quotient_ring(d->r2, d->h - 1);
    auto iso = iso_search(q1, q2);
    if (!iso) throw Error(ErrorKind::IncompatibleRings, "depth-(h-1) quotients are not isomorphic");
    std::vector<std::uint32_t> back(iso->image.size());
    for (std::uint32_t k = 0; k < iso->image.size(); ++k) back[iso->image[k]] = k;
    for (const auto& x : d->r1.elements()) d->to2.push_back(proj2.lift(q2.at(iso->image[proj1(x).index()])));
    for (const auto& y : d->r2.elements()) d->to1.push_back(proj1.lift(q1.at(back[proj2(y).index()])));
    spec.point.assign(static_cast<std::size_t>(d->sys.rank()), Rational(0));
    spec.point[static_cast<std::size_t>(spec.n - 1)] = Rational(-1, 2);
    for (int k = spec.n; k < N; ++k) d->block[static_cast<std::size_t>(k)] = 1;
  }

  if (spec.point.empty()) spec.point.assign(static_cast<std::size_t>(d->sys.rank()), Rational(0));
  if (static_cast<int>(spec.point.size()) != d->sys.rank())
    throw Error(ErrorKind::InvalidSpec, "f needs one value per simple root (" + std::to_string(d->sys.rank()) + ")");
  d->f = extend_concave(d->sys, spec.point);
  if (spec.family == Family::Sp4)
    for (Root a = 0; a < d->sys.size(); ++a)
      if (d->f(a) + d->f(d->sys.negate(a)) != 0)
        throw Error(ErrorKind::UnsupportedFamily, "Sp4 is realized only for windows with f(a) + f(-a) = 0");

  d->weights = standard_weights(spec.family, N);
  if (spec.family == Family::Sp4) d->form = {{0, 0, 0, 1}, {0, 0, 1, 0}, {0, -1, 0, 0}, {-1, 0, 0, 0}};

  const std::size_t NN = static_cast<std::size_t>(N * N);
  d->off.assign(NN, 0);
  d->wid.assign(NN, d->h);
  d->root_at.assign(NN, -1);
  d->home.assign(NN, d->r1);
  d->positions.assign(static_cast<std::size_t>(d->sys.size()), {});
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      const std::size_t ij = d->at(i, j);
      int bi = d->block[static_cast<std::size_t>(i)], bj = d->block[static_cast<std::size_t>(j)];
      d->home[ij] = (bi == 1 && bj == 1) ? d->r2 : d->r1;
      if (i == j) continue;
      auto r = d->sys.find_ambient(diff(d->weights[static_cast<std::size_t>(i)], d->weights[static_cast<std::size_t>(j)]));
      if (!r) throw Error(ErrorKind::UnsupportedFamily, "weight difference is not a root");
      d->root_at[ij] = *r;
      d->off[ij] = d->f(*r);
      d->positions[static_cast<std::size_t>(*r)].push_back({i, j, 1});
    }
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) d->wid[d->at(i, j)] = d->h - d->off[d->at(i, j)] - d->off[d->at(j, i)];
  if (spec.family == Family::Sp4)
    for (auto& ps : d->positions)
      if (ps.size() == 2) ps[1].sign = symplectic_sign(d->form, ps[0], ps[1]);

  d->expo.assign(static_cast<std::size_t>(N * N * N), 0);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        int e = d->off[d->at(i, j)] + d->off[d->at(j, k)] - d->off[d->at(i, k)];
        if (e < 0)
          throw Error(ErrorKind::IllFormedWindows, "windows violate f_ij + f_jk >= f_ik at (" + std::to_string(i) + "," +
                                                       std::to_string(j) + "," + std::to_string(k) + ")");
        d->expo[static_cast<std::size_t>((i * N + j) * N + k)] = e;
      }
  d_ = d;
}

const GroupSpec& Group::spec() const { return d_->spec; }
const RootSystem& Group::roots() const { return d_->sys; }
const ConcaveFunction& Group::concave() const { return d_->f; }
int Group::size() const { return d_->N; }
int Group::depth() const { return d_->h; }
Ring Group::ring() const { return d_->r1; }
Ring Group::ring_at(int i, int j) const { return d_->home[d_->at(i, j)]; }
int Group::offset(int i, int j) const { return d_->off[d_->at(i, j)]; }
int Group::width(int i, int j) const { return d_->wid[d_->at(i, j)]; }
std::optional<Root> Group::root_at(int i, int j) const {
  int r = d_->root_at[d_->at(i, j)];
  if (r < 0) return std::nullopt;
  return r;
}

Element Group::convert(const Element& x, const Ring& target) const { return d_->convert(x, target); }

std::string Group::describe() const {
  const auto& s = d_->spec;
  std::ostringstream os;
  os << family_name(s.family);
  if (s.family != Family::Sp4) os << "_" << s.n;
  os << " over " << to_string(s.ring);
  if (s.ring2) os << " / " << to_string(*s.ring2);
  os << ", f=[";
  for (std::size_t k = 0; k < s.point.size(); ++k) os << (k ? "," : "") << format_rational(s.point[k]);
  os << "]";
  return os.str();
}

// ---- arithmetic -------------------------------------------------------------------

namespace {

using Mat = std::vector<Element>;

Mat algebra_mul(const GroupData& d, const Mat& x, const Mat& y) {
  const int N = d.N;
  Mat z(static_cast<std::size_t>(N * N));
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k) {
      const std::size_t ik = d.at(i, k);
      const Ring& r = d.home[ik];
      const int w = d.wid[ik];
      Element acc = r.zero();
      for (int j = 0; j < N; ++j) {
        const Element& a = x[d.at(i, j)];
        const Element& b = y[d.at(j, k)];
        if (a.is_zero() || b.is_zero()) continue;
        int e = d.expo[static_cast<std::size_t>((i * N + j) * N + k)];
        if (e >= w) continue;
        Element t = d.convert(a, r) * d.convert(b, r);
        if (e > 0) t = t * d.pi_pow(r, e);
        acc = acc + t;
      }
      z[ik] = r.truncate(acc, w);
    }
  return z;
}

Mat algebra_identity(const GroupData& d) {
  Mat m(static_cast<std::size_t>(d.N * d.N));
  for (int i = 0; i < d.N; ++i)
    for (int j = 0; j < d.N; ++j) m[d.at(i, j)] = i == j ? d.home[d.at(i, j)].one() : d.home[d.at(i, j)].zero();
  return m;
}

Mat canonical(const GroupData& d, Mat m) {
  for (int i = 0; i < d.N; ++i)
    for (int j = 0; j < d.N; ++j) {
      const std::size_t ij = d.at(i, j);
      m[ij] = d.home[ij].truncate(d.convert(m[ij], d.home[ij]), d.wid[ij]);
    }
  return m;
}

int parity(const std::vector<int>& perm) {
  int inv = 0;
  for (std::size_t a = 0; a < perm.size(); ++a)
    for (std::size_t b = a + 1; b < perm.size(); ++b)
      if (perm[a] > perm[b]) ++inv;
  return inv % 2;
}

// Determinant of the principal submatrix on `idx` (all entries in one ring).
Element scaled_det(const GroupData& d, const Mat& x, const std::vector<int>& idx) {
  const Ring& r = d.home[d.at(idx[0], idx[0])];
  std::vector<int> perm(idx.size());
  std::iota(perm.begin(), perm.end(), 0);
  Element acc = r.zero();
  do {
    int e = 0;
    Element t = r.one();
    for (std::size_t k = 0; k < idx.size() && !t.is_zero(); ++k) {
      int i = idx[k], j = idx[static_cast<std::size_t>(perm[k])];
      e += d.off[d.at(i, j)];
      t = t * d.convert(x[d.at(i, j)], r);
    }
    if (t.is_zero() || e >= r.depth()) continue;
    t = t * d.pi_pow(r, e);
    acc = parity(perm) ? acc - t : acc + t;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return acc;
}

// Inverse of the principal block on `idx` by the adjugate, written into out.
void scaled_block_inverse(const GroupData& d, const Mat& x, const std::vector<int>& idx, Mat& out) {
  const Ring& r = d.home[d.at(idx[0], idx[0])];
  Element det = scaled_det(d, x, idx);
  if (!det.is_unit()) throw Error(ErrorKind::NotAUnit, "matrix is not invertible");
  Element dinv = det.inverse();
  const std::size_t m = idx.size();
  std::vector<int> perm(m);
  std::vector<Element> adj(m * m, r.zero());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    const int sgn = parity(perm);
    // Each permutation contributes to adj(i,j) for the row j it skips, with i = perm(j).
    for (std::size_t skip = 0; skip < m; ++skip) {
      int j = idx[skip], i = idx[static_cast<std::size_t>(perm[skip])];
      int e = 0;
      Element t = r.one();
      for (std::size_t k = 0; k < m && !t.is_zero(); ++k) {
        if (k == skip) continue;
        int a = idx[k], b = idx[static_cast<std::size_t>(perm[k])];
        e += d.off[d.at(a, b)];
        t = t * d.convert(x[d.at(a, b)], r);
      }
      e -= d.off[d.at(i, j)];
      if (t.is_zero() || e >= r.depth()) continue;
      t = t * d.pi_pow(r, e);
      std::size_t slot = static_cast<std::size_t>(perm[skip]) * m + skip;
      adj[slot] = sgn ? adj[slot] - t : adj[slot] + t;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) {
      const std::size_t ij = d.at(idx[a], idx[b]);
      out[ij] = d.home[ij].truncate(d.convert(adj[a * m + b] * dinv, d.home[ij]), d.wid[ij]);
    }
}

std::vector<int> range_indices(int from, int to) {
  std::vector<int> v;
  for (int k = from; k < to; ++k) v.push_back(k);
  return v;
}

}  // namespace

GroupElement Group::identity() const { return GroupElement{d_.get(), algebra_identity(*d_)}; }

GroupElement Group::make(std::vector<Element> scaled) const {
  if (scaled.size() != static_cast<std::size_t>(d_->N * d_->N))
    throw Error(ErrorKind::InvalidSpec, "wrong number of entries");
  return GroupElement{d_.get(), canonical(*d_, std::move(scaled))};
}

GroupElement Group::mul(const GroupElement& a, const GroupElement& b) const {
  if (a.owner != d_.get() || b.owner != d_.get()) throw Error(ErrorKind::MixedGroups, "elements of different groups");
  return GroupElement{d_.get(), algebra_mul(*d_, a.entries, b.entries)};
}

GroupElement Group::inverse(const GroupElement& a) const {
  if (a.owner != d_.get()) throw Error(ErrorKind::MixedGroups, "element of a different group");
  const GroupData& d = *d_;
  Mat out(a.entries.size());
  if (d.spec.family != Family::HeteroBlock) {
    scaled_block_inverse(d, a.entries, range_indices(0, d.N), out);
    return GroupElement{d_.get(), out};
  }
  // Block-diagonal approximate inverse, then the geometric series in the
  // nilpotent remainder.
  Mat x0 = algebra_identity(d);
  for (auto& e : x0) e = e.ring().zero();
  scaled_block_inverse(d, a.entries, range_indices(0, d.spec.n), x0);
  scaled_block_inverse(d, a.entries, range_indices(d.spec.n, d.N), x0);
  Mat gx = algebra_mul(d, a.entries, x0);
  Mat e = algebra_identity(d);
  for (std::size_t k = 0; k < e.size(); ++k) e[k] = e[k] - gx[k];
  Mat sum = algebra_identity(d), power = algebra_identity(d);
  for (int it = 0; it < 4 * d.h + 4; ++it) {
    power = algebra_mul(d, power, e);
    if (std::all_of(power.begin(), power.end(), [](const Element& x) { return x.is_zero(); })) break;
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = sum[k] + power[k];
  }
  return GroupElement{d_.get(), canonical(d, algebra_mul(d, x0, sum))};
}

GroupElement Group::commutator(const GroupElement& a, const GroupElement& b) const {
  return mul(mul(a, b), mul(inverse(a), inverse(b)));
}

bool Group::contains(const GroupElement& g) const {
  const GroupData& d = *d_;
  if (g.owner != d_.get() || g.entries.size() != static_cast<std::size_t>(d.N * d.N)) return false;
  for (int i = 0; i < d.N; ++i)
    for (int j = 0; j < d.N; ++j) {
      const std::size_t ij = d.at(i, j);
      const Element& x = g.entries[ij];
      if (!(x.ring() == d.home[ij]) || !(d.home[ij].truncate(x, d.wid[ij]) == x)) return false;
    }
  switch (d.spec.family) {
    case Family::GL: return scaled_det(d, g.entries, range_indices(0, d.N)).is_unit();
    case Family::SL: return scaled_det(d, g.entries, range_indices(0, d.N)) == d.r1.one();
    case Family::HeteroBlock:
      return scaled_det(d, g.entries, range_indices(0, d.spec.n)).is_unit() &&
             scaled_det(d, g.entries, range_indices(d.spec.n, d.N)).is_unit();
    case Family::Sp4: {
      // Integral point: the scaled matrix itself is symplectic.
      const Ring& r = d.r1;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          Element acc = r.zero();
          for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l) {
              int jv = d.form[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)];
              if (jv == 0) continue;
              acc = acc + r.from_int(jv) * g.entries[d.at(k, a)] * g.entries[d.at(l, b)];
            }
          if (!(acc == r.from_int(d.form[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]))) return false;
        }
      return true;
    }
  }
  return false;
}

nlohmann::ordered_json Group::to_json(const GroupElement& g) const {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int i = 0; i < d_->N; ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int j = 0; j < d_->N; ++j) {
      int o = d_->off[d_->at(i, j)];
      std::string s = g.entries[d_->at(i, j)].to_string();
      if (o != 0 && !g.entries[d_->at(i, j)].is_zero()) s = "pi^" + std::to_string(o) + "*(" + s + ")";
      row.push_back(s);
    }
    rows.push_back(row);
  }
  return rows;
}

// ---- root subgroups ---------------------------------------------------------------

GroupElement Group::u(Root a, const Element& y) const {
  const GroupData& d = *d_;
  Mat m = algebra_identity(d);
  for (const auto& p : d.positions.at(static_cast<std::size_t>(a))) {
    const std::size_t ij = d.at(p.i, p.j);
    Element v = d.convert(y, d.home[ij]);
    m[ij] = d.home[ij].truncate(p.sign > 0 ? v : -v, d.wid[ij]);
  }
  return GroupElement{d_.get(), m};
}

GroupElement Group::u_value(Root a, const Element& x) const {
  const int f = d_->f(a);
  Ring r = param_ring(a);
  Element v = d_->convert(x, r);
  if (f >= 0) {
    if (v.valuation() < f) throw Error(ErrorKind::OutOfWindow, "entry valuation below f(a)");
    return u(a, r.divide_by_uniformizer_power(v, f));
  }
  return u(a, v * d_->pi_pow(r, -f));
}

Element Group::root_param(Root a, const GroupElement& g) const {
  const auto& p = d_->positions.at(static_cast<std::size_t>(a)).front();
  return g.entries[d_->at(p.i, p.j)];
}

Ring Group::param_ring(Root a) const {
  const auto& p = d_->positions.at(static_cast<std::size_t>(a)).front();
  return d_->home[d_->at(p.i, p.j)];
}

int Group::param_width(Root a) const { return d_->h - d_->f(a) - d_->f(d_->sys.negate(a)); }

std::vector<Element> Group::params(Root a) const {
  Ring r = param_ring(a);
  const int w = param_width(a);
  std::set<std::uint32_t> seen;
  std::vector<Element> out;
  for (const auto& x : r.elements()) {
    Element t = r.truncate(x, w);
    if (seen.insert(t.index()).second) out.push_back(t);
  }
  std::sort(out.begin(), out.end(), [](const Element& x, const Element& y) { return x.index() < y.index(); });
  return out;
}

int Group::param_valuation(Root a, const Element& y) const {
  if (y.is_zero()) return d_->h - d_->f(d_->sys.negate(a));
  return d_->f(a) + y.valuation();
}

Element Group::unit_param(Root a) const {
  const int f = d_->f(a);
  if (f > 0) throw Error(ErrorKind::NotAvailable, "U_a has no valuation-0 elements");
  Ring r = param_ring(a);
  return r.truncate(d_->pi_pow(r, -f), param_width(a));
}

// ---- torus ---------------------------------------------------------------------------

bool Group::is_diagonal(const GroupElement& g) const {
  for (int i = 0; i < d_->N; ++i)
    for (int j = 0; j < d_->N; ++j)
      if (i != j && !g.entries[d_->at(i, j)].is_zero()) return false;
  return true;
}

GroupElement Group::cocharacter(const std::vector<int>& v, const Element& lambda) const {
  const GroupData& d = *d_;
  if (!lambda.is_unit()) throw Error(ErrorKind::NotAUnit, "torus parameter must be a unit");
  Mat m = algebra_identity(d);
  for (int k = 0; k < d.N; ++k) {
    int e = dot(d.weights[static_cast<std::size_t>(k)], v);
    const std::size_t kk = d.at(k, k);
    Element l = d.convert(lambda, d.home[kk]);
    if (!l.is_unit()) throw Error(ErrorKind::NotAUnit, "torus parameter must be a unit");
    m[kk] = e >= 0 ? l.pow(static_cast<std::uint64_t>(e)) : l.inverse().pow(static_cast<std::uint64_t>(-e));
  }
  return GroupElement{d_.get(), m};
}

GroupElement Group::h_cochar(Root a, const Element& lambda) const {
  const auto& amb = d_->sys.ambient(a);
  const int len = d_->sys.squared_length(a);
  std::vector<int> co(amb.size());
  for (std::size_t k = 0; k < amb.size(); ++k) co[k] = 2 * amb[k] / len;
  return cocharacter(co, lambda);
}

int Group::torus_rank() const {
  switch (d_->spec.family) {
    case Family::GL:
    case Family::HeteroBlock: return d_->N;
    case Family::SL: return d_->N - 1;
    case Family::Sp4: return 2;
  }
  return 0;
}

namespace {

std::vector<Element> units_of(const Ring& r) {
  std::vector<Element> out;
  for (const auto& x : r.elements())
    if (x.is_unit()) out.push_back(x);
  return out;
}

}  // namespace

std::vector<GroupElement> Group::torus_elements(std::uint64_t cap) const {
  const GroupData& d = *d_;
  const int free = d.spec.family == Family::Sp4 ? 2 : torus_rank();
  std::vector<std::vector<Element>> choices;
  std::uint64_t total = 1;
  for (int k = 0; k < free; ++k) {
    choices.push_back(units_of(d.home[d.at(k, k)]));
    total = sat_mul(total, choices.back().size());
  }
  if (total > cap) throw Error(ErrorKind::TooLarge, "torus has " + std::to_string(total) + " elements");
  std::vector<GroupElement> out;
  std::vector<std::size_t> idx(static_cast<std::size_t>(free), 0);
  while (true) {
    Mat m = algebra_identity(d);
    for (int k = 0; k < free; ++k) m[d.at(k, k)] = choices[static_cast<std::size_t>(k)][idx[static_cast<std::size_t>(k)]];
    if (d.spec.family == Family::SL) {
      Element prod = d.r1.one();
      for (int k = 0; k < free; ++k) prod = prod * m[d.at(k, k)];
      m[d.at(d.N - 1, d.N - 1)] = prod.inverse();
    } else if (d.spec.family == Family::Sp4) {
      m[d.at(2, 2)] = m[d.at(1, 1)].inverse();
      m[d.at(3, 3)] = m[d.at(0, 0)].inverse();
    }
    out.push_back(GroupElement{d_.get(), m});
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == choices[k].size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return out;
}

std::optional<GroupElement> Group::torus_for_ratio(Root a, const Element& ratio) const {
  const GroupData& d = *d_;
  if (!ratio.is_unit()) return std::nullopt;
  const std::size_t dim = d.weights.front().size();
  std::vector<std::vector<int>> candidates;
  auto unit = [&](std::size_t k, int s) {
    std::vector<int> v(dim, 0);
    v[k] = s;
    return v;
  };
  switch (d.spec.family) {
    case Family::GL:
    case Family::HeteroBlock:
    case Family::Sp4:
      for (std::size_t k = 0; k < dim; ++k)
        for (int s : {1, -1}) candidates.push_back(unit(k, s));
      if (d.spec.family == Family::Sp4)
        for (int s : {1, -1})
          for (int t : {1, -1}) candidates.push_back({s, t});
      break;
    case Family::SL:
      for (std::size_t k = 0; k < dim; ++k)
        for (std::size_t l = 0; l < dim; ++l)
          if (k != l) {
            auto v = unit(k, 1);
            v[l] = -1;
            candidates.push_back(v);
          }
      break;
  }
  const Ring r = ratio.ring();
  auto usable = [&](const std::vector<int>& v) {
    for (int k = 0; k < d.N; ++k)
      if (dot(d.weights[static_cast<std::size_t>(k)], v) != 0 && !(d.home[d.at(k, k)] == r)) return false;
    return true;
  };
  const auto& amb = d.sys.ambient(a);
  for (int want : {1, -1}) {
    for (const auto& v : candidates)
      if (dot(amb, v) == want && usable(v)) return cocharacter(v, want == 1 ? ratio : ratio.inverse());
  }
  for (const auto& v : candidates) {
    if (dot(amb, v) != 2 || !usable(v)) continue;
    auto s = sqrt(ratio);
    if (!s) return std::nullopt;
    return cocharacter(v, s->first);
  }
  return std::nullopt;
}

std::uint64_t Group::tuple_count() const {
  std::uint64_t total = 1;
  const auto q = static_cast<std::uint64_t>(d_->r1.residue_size());
  for (int i = 0; i < d_->N; ++i)
    for (int j = 0; j < d_->N; ++j) total = sat_mul(total, ipow(q, d_->wid[d_->at(i, j)]));
  return total;
}

std::vector<GroupElement> Group::elements(std::uint64_t cap) const {
  const GroupData& d = *d_;
  const std::uint64_t total = tuple_count();
  if (total > cap) throw Error(ErrorKind::TooLarge, "enumeration needs " + std::to_string(total) + " tuples (cap " +
                                                        std::to_string(cap) + ")");
  std::vector<std::vector<Element>> choices;
  for (int i = 0; i < d.N; ++i)
    for (int j = 0; j < d.N; ++j) {
      const std::size_t ij = d.at(i, j);
      std::set<std::uint32_t> seen;
      std::vector<Element> c;
      for (const auto& x : d.home[ij].elements()) {
        Element t = d.home[ij].truncate(x, d.wid[ij]);
        if (seen.insert(t.index()).second) c.push_back(t);
      }
      choices.push_back(c);
    }
  std::vector<GroupElement> out;
  std::vector<std::size_t> idx(choices.size(), 0);
  Mat m(choices.size());
  while (true) {
    for (std::size_t k = 0; k < m.size(); ++k) m[k] = choices[k][idx[k]];
    GroupElement g{d_.get(), m};
    if (contains(g)) out.push_back(g);
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == choices[k].size()) idx[k++] = 0;
    if (k == idx.size()) break;
  }
  return out;
}

// ---- factorization ---------------------------------------------------------------

std::vector<RootParam> decompose_unipotent(const Group& g, const GroupElement& x, const std::vector<Root>& order) {
  std::vector<RootParam> out;
  GroupElement rest = x;
  for (Root a : order) {
    Element t = g.root_param(a, rest);
    out.push_back({a, t});
    rest = g.mul(g.u(a, -t), rest);
  }
  if (!(rest == g.identity())) throw Error(ErrorKind::NotInProduct, "element is not in the product of the listed root subgroups");
  return out;
}

GroupElement recompose(const Group& g, const std::vector<RootParam>& factors) {
  GroupElement x = g.identity();
  for (const auto& f : factors) x = g.mul(x, g.u(f.root, f.param));
  return x;
}

}  // namespace parahoric
