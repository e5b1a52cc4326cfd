#include "parahoric/ring.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>

#include "parahoric/error.hpp"

namespace parahoric {

namespace {

constexpr std::size_t kMaxSlots = 32;
constexpr std::uint64_t kMaxOrder = std::uint64_t{1} << 31;
constexpr std::uint64_t kTableOrder = 1024;
constexpr std::uint64_t kUnaryTableOrder = 1 << 16;

using Coeffs = std::array<std::int64_t, kMaxSlots>;

std::int64_t ipow(std::int64_t b, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

std::int64_t mod(std::int64_t a, std::int64_t m) {
  a %= m;
  return a < 0 ? a + m : a;
}

bool is_prime(int p) {
  if (p < 2) return false;
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

int vp(std::int64_t a, int p) {
  int v = 0;
  while (a % p == 0) {
    a /= p;
    ++v;
  }
  return v;
}

std::int64_t inverse_mod(std::int64_t a, std::int64_t m) {
  std::int64_t g = m, x = 0, x1 = 1, a1 = mod(a, m);
  while (a1 != 0) {
    std::int64_t q = g / a1;
    std::tie(g, a1) = std::make_pair(a1, g - q * a1);
    std::tie(x, x1) = std::make_pair(x1, x - q * x1);
  }
  return mod(x, m);
}

// Remainder of a by monic b over F_p; both low-to-high.
std::vector<std::int64_t> poly_rem(std::vector<std::int64_t> a, const std::vector<std::int64_t>& b, int p) {
  const std::size_t db = b.size() - 1;
  while (a.size() > db) {
    std::int64_t lead = a.back();
    if (lead != 0) {
      std::size_t shift = a.size() - 1 - db;
      for (std::size_t i = 0; i <= db; ++i) a[shift + i] = mod(a[shift + i] - lead * b[i], p);
    }
    a.pop_back();
  }
  return a;
}

bool divides(const std::vector<std::int64_t>& g, const std::vector<std::int64_t>& f, int p) {
  auto r = poly_rem(f, g, p);
  return std::all_of(r.begin(), r.end(), [](std::int64_t x) { return x == 0; });
}

// First monic irreducible polynomial of degree m over F_p, ordering candidates
// by their low coefficients read as a base-p integer.  Returns the m low
// coefficients.
std::vector<std::int64_t> first_irreducible(int p, int m) {
  const std::int64_t count = ipow(p, m);
  for (std::int64_t code = 0; code < count; ++code) {
    std::vector<std::int64_t> f(m + 1);
    std::int64_t c = code;
    for (int i = 0; i < m; ++i, c /= p) f[i] = c % p;
    f[m] = 1;
    if (f[0] == 0) continue;
    bool irreducible = true;
    for (int d = 1; d <= m / 2 && irreducible; ++d) {
      const std::int64_t gcount = ipow(p, d);
      for (std::int64_t gcode = 0; gcode < gcount; ++gcode) {
        std::vector<std::int64_t> g(d + 1);
        std::int64_t gc = gcode;
        for (int i = 0; i < d; ++i, gc /= p) g[i] = gc % p;
        g[d] = 1;
        if (divides(g, f, p)) {
          irreducible = false;
          break;
        }
      }
    }
    if (irreducible) return {f.begin(), f.begin() + m};
  }
  throw Error(ErrorKind::InvalidSpec, "no irreducible polynomial found");
}

}  // namespace

namespace detail {

struct RingData {
  RingSpec spec;
  std::size_t slots = 0;
  std::vector<std::int64_t> moduli;
  std::vector<std::uint64_t> radix;
  std::uint64_t order = 1;
  std::int64_t q = 1;
  std::int64_t work = 1;     // common modulus for intermediate arithmetic
  std::vector<std::int64_t> f;  // low coefficients of the residue polynomial (m > 1)
  std::int64_t c_inv = 1;    // inverse of c modulo `work` (Ramified)
  std::uint32_t one = 0;
  std::uint32_t unif = 0;
  std::uint64_t unit_count = 0;

  std::vector<std::uint32_t> add_t, mul_t, neg_t, inv_t;
  std::vector<std::int8_t> val_t;
  std::vector<std::uint32_t> teich;  // sorted indices

  void decode(std::uint32_t v, std::int64_t* out) const {
    for (std::size_t k = 0; k < slots; ++k) {
      out[k] = static_cast<std::int64_t>(v % static_cast<std::uint64_t>(moduli[k]));
      v = static_cast<std::uint32_t>(v / static_cast<std::uint64_t>(moduli[k]));
    }
  }

  std::uint32_t encode(const std::int64_t* c) const {
    std::uint64_t v = 0;
    for (std::size_t k = 0; k < slots; ++k) v += radix[k] * static_cast<std::uint64_t>(mod(c[k], moduli[k]));
    return static_cast<std::uint32_t>(v);
  }

  // a*b of residue polynomials of degree < m, reduced by f, modulo md.
  void poly_mulmod(const std::int64_t* a, const std::int64_t* b, std::int64_t md, std::int64_t* out) const {
    const int m = spec.m;
    std::array<std::int64_t, 2 * kMaxSlots> t{};
    for (int i = 0; i < m; ++i) {
      if (a[i] == 0) continue;
      for (int j = 0; j < m; ++j) t[i + j] = mod(t[i + j] + a[i] * b[j], md);
    }
    for (int k = 2 * m - 2; k >= m; --k) {
      std::int64_t lead = t[k];
      if (lead == 0) continue;
      for (int j = 0; j < m; ++j) t[k - m + j] = mod(t[k - m + j] - lead * f[j], md);
      t[k] = 0;
    }
    for (int i = 0; i < m; ++i) out[i] = t[i];
  }

  std::uint32_t add_raw(std::uint32_t a, std::uint32_t b) const {
    Coeffs x{}, y{};
    decode(a, x.data());
    decode(b, y.data());
    for (std::size_t k = 0; k < slots; ++k) x[k] = x[k] + y[k];
    return encode(x.data());
  }

  std::uint32_t neg_raw(std::uint32_t a) const {
    Coeffs x{};
    decode(a, x.data());
    for (std::size_t k = 0; k < slots; ++k) x[k] = -x[k];
    return encode(x.data());
  }

  std::uint32_t mul_raw(std::uint32_t a, std::uint32_t b) const {
    Coeffs x{}, y{}, z{};
    decode(a, x.data());
    decode(b, y.data());
    const int h = spec.h, m = spec.m, e = spec.e;
    switch (spec.kind) {
      case RingKind::EquiChar: {
        std::array<std::int64_t, kMaxSlots> tmp{};
        for (int i = 0; i < h; ++i) {
          bool zero_i = std::all_of(&x[i * m], &x[i * m] + m, [](std::int64_t v) { return v == 0; });
          if (zero_i) continue;
          for (int j = 0; i + j < h; ++j) {
            poly_mulmod(&x[i * m], &y[j * m], spec.p, tmp.data());
            for (int k = 0; k < m; ++k) z[(i + j) * m + k] = mod(z[(i + j) * m + k] + tmp[k], spec.p);
          }
        }
        break;
      }
      case RingKind::Unramified:
        poly_mulmod(x.data(), y.data(), work, z.data());
        break;
      case RingKind::Ramified: {
        const std::int64_t pc = mod(static_cast<std::int64_t>(spec.p) * spec.c, work);
        for (int i = 0; i < e; ++i) {
          if (x[i] == 0) continue;
          for (int j = 0; j < e; ++j) {
            std::int64_t t = mod(x[i] * y[j], work);
            int k = i + j;
            if (k >= e) {
              t = mod(t * pc, work);
              k -= e;
            }
            z[k] = mod(z[k] + t, work);
          }
        }
        break;
      }
    }
    return encode(z.data());
  }

  int val_raw(std::uint32_t a) const {
    if (a == 0) return spec.h;
    Coeffs x{};
    decode(a, x.data());
    const int h = spec.h, m = spec.m;
    switch (spec.kind) {
      case RingKind::EquiChar:
        for (int i = 0; i < h; ++i)
          for (int k = 0; k < m; ++k)
            if (x[i * m + k] != 0) return i;
        return h;
      case RingKind::Unramified: {
        int best = h;
        for (int k = 0; k < m; ++k)
          if (x[k] != 0) best = std::min(best, vp(x[k], spec.p));
        return best;
      }
      case RingKind::Ramified: {
        int best = h;
        for (int i = 0; i < spec.e; ++i)
          if (x[i] != 0) best = std::min(best, spec.e * vp(x[i], spec.p) + i);
        return best;
      }
    }
    return h;
  }

  std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
    return add_t.empty() ? add_raw(a, b) : add_t[a * order + b];
  }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
    return mul_t.empty() ? mul_raw(a, b) : mul_t[a * order + b];
  }
  std::uint32_t neg(std::uint32_t a) const { return neg_t.empty() ? neg_raw(a) : neg_t[a]; }
  int val(std::uint32_t a) const { return val_t.empty() ? val_raw(a) : val_t[a]; }

  std::uint32_t pow_raw(std::uint32_t a, std::uint64_t n) const {
    std::uint32_t r = one, b = a;
    while (n) {
      if (n & 1) r = mul(r, b);
      b = mul(b, b);
      n >>= 1;
    }
    return r;
  }
};

}  // namespace detail

namespace {

using detail::RingData;

void validate(RingSpec& s) {
  if (s.p == 2) throw Error(ErrorKind::InvalidSpec, "residue characteristic 2 is not supported");
  if (!is_prime(s.p)) throw Error(ErrorKind::InvalidSpec, "p must be an odd prime");
  if (s.h < 1) throw Error(ErrorKind::InvalidSpec, "depth must be at least 1");
  if (s.m < 1) throw Error(ErrorKind::InvalidSpec, "residue degree must be at least 1");
  if (s.kind == RingKind::Ramified) {
    if (s.m != 1) throw Error(ErrorKind::InvalidSpec, "ramified rings have residue field F_p");
    if (s.e < 2) throw Error(ErrorKind::InvalidSpec, "ramification index must be at least 2");
    if (std::gcd(s.e, s.p) != 1) throw Error(ErrorKind::InvalidSpec, "wild ramification is not supported");
    if (mod(s.c, s.p) == 0) throw Error(ErrorKind::InvalidSpec, "Eisenstein constant must be a unit mod p");
    if (s.h < 2) throw Error(ErrorKind::InvalidSpec, "ramified rings need depth at least 2");
    s.c = static_cast<int>(mod(s.c, s.p));
  } else {
    s.e = 1;
    s.c = 0;
  }
  long double size = 1;
  for (int i = 0; i < s.m * s.h; ++i) size *= s.p;
  if (size > static_cast<long double>(kMaxOrder)) throw Error(ErrorKind::InvalidSpec, "ring too large to index");
}

std::unique_ptr<RingData> build(const RingSpec& s) {
  auto d = std::make_unique<RingData>();
  d->spec = s;
  d->q = ipow(s.p, s.m);
  switch (s.kind) {
    case RingKind::EquiChar:
      d->moduli.assign(static_cast<std::size_t>(s.h * s.m), s.p);
      d->work = s.p;
      break;
    case RingKind::Unramified:
      d->moduli.assign(static_cast<std::size_t>(s.m), ipow(s.p, s.h));
      d->work = ipow(s.p, s.h);
      break;
    case RingKind::Ramified:
      for (int i = 0; i < s.e; ++i) d->moduli.push_back(ipow(s.p, std::max(0, (s.h - i + s.e - 1) / s.e)));
      d->work = d->moduli[0];
      d->c_inv = inverse_mod(s.c, d->work);
      break;
  }
  d->slots = d->moduli.size();
  if (d->slots > kMaxSlots) throw Error(ErrorKind::InvalidSpec, "too many coefficient slots");
  std::uint64_t r = 1;
  for (auto md : d->moduli) {
    d->radix.push_back(r);
    r *= static_cast<std::uint64_t>(md);
  }
  d->order = r;
  if (s.m > 1) d->f = first_irreducible(s.p, s.m);
  d->unit_count = static_cast<std::uint64_t>(d->q - 1) * static_cast<std::uint64_t>(ipow(d->q, s.h - 1));

  Coeffs c{};
  c[0] = 1;
  d->one = d->encode(c.data());
  c[0] = 0;
  if (s.h >= 2) {
    switch (s.kind) {
      case RingKind::EquiChar: c[static_cast<std::size_t>(s.m)] = 1; break;
      case RingKind::Unramified: c[0] = s.p; break;
      case RingKind::Ramified: c[1] = 1; break;
    }
    d->unif = d->encode(c.data());
  }

  const std::uint64_t n = d->order;
  if (n <= kUnaryTableOrder) {
    d->neg_t.resize(n);
    d->val_t.resize(n);
    for (std::uint32_t a = 0; a < n; ++a) {
      d->neg_t[a] = d->neg_raw(a);
      d->val_t[a] = static_cast<std::int8_t>(d->val_raw(a));
    }
  }
  if (n <= kTableOrder) {
    d->add_t.resize(n * n);
    d->mul_t.resize(n * n);
    for (std::uint32_t a = 0; a < n; ++a)
      for (std::uint32_t b = 0; b < n; ++b) {
        d->add_t[a * n + b] = d->add_raw(a, b);
        d->mul_t[a * n + b] = d->mul_raw(a, b);
      }
  }
  if (n <= kUnaryTableOrder) {
    d->inv_t.assign(n, 0);
    for (std::uint32_t a = 0; a < n; ++a)
      if (d->val(a) == 0) d->inv_t[a] = d->pow_raw(a, d->unit_count - 1);
  }
  return d;
}

RingData* intern(const RingSpec& s) {
  static std::mutex mu;
  static std::map<RingSpec, std::unique_ptr<RingData>> registry;
  std::lock_guard<std::mutex> lock(mu);
  auto it = registry.find(s);
  if (it != registry.end()) return it->second.get();
  auto d = build(s);
  RingData* raw = d.get();
  registry.emplace(s, std::move(d));
  return raw;
}

void require_same(const Element& a, const Element& b) {
  if (a.ring().data() != b.ring().data() || a.ring().data() == nullptr)
    throw Error(ErrorKind::MixedRings, "operands belong to different rings");
}

std::string poly_text(const std::vector<std::string>& coeffs, const std::string& var) {
  std::string out;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const std::string& c = coeffs[i];
    if (c == "0") continue;
    if (!out.empty()) out += "+";
    bool compound = c.find('+') != std::string::npos;
    if (i == 0) {
      out += c;
      continue;
    }
    if (c != "1") out += compound ? "(" + c + ")" : c;
    out += var;
    if (i > 1) out += "^" + std::to_string(i);
  }
  return out.empty() ? "0" : out;
}

}  // namespace

// ---- RingSpec ---------------------------------------------------------------

RingSpec RingSpec::equichar(int p, int m, int h) { return RingSpec{RingKind::EquiChar, p, m, 1, 0, h}; }
RingSpec RingSpec::unramified(int p, int m, int h) { return RingSpec{RingKind::Unramified, p, m, 1, 0, h}; }
RingSpec RingSpec::ramified(int p, int e, int c, int h) { return RingSpec{RingKind::Ramified, p, 1, e, c, h}; }

std::string to_string(const RingSpec& s) {
  std::ostringstream os;
  switch (s.kind) {
    case RingKind::EquiChar: os << "equichar(p=" << s.p << ",m=" << s.m << ",h=" << s.h << ")"; break;
    case RingKind::Unramified: os << "unram(p=" << s.p << ",m=" << s.m << ",h=" << s.h << ")"; break;
    case RingKind::Ramified: os << "ram(p=" << s.p << ",e=" << s.e << ",c=" << s.c << ",h=" << s.h << ")"; break;
  }
  return os.str();
}

RingSpec parse_ring_spec(std::string_view text) {
  std::string t;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
  auto open = t.find('(');
  if (open == std::string::npos || t.empty() || t.back() != ')')
    throw Error(ErrorKind::ParseError, "expected name(key=value,...): " + std::string(text));
  std::string name = t.substr(0, open);
  std::map<std::string, int> kv;
  std::string body = t.substr(open + 1, t.size() - open - 2);
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorKind::ParseError, "bad ring parameter '" + item + "'");
    std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    if (val.empty() || !std::all_of(val.begin(), val.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)) || ch == '-'; }))
      throw Error(ErrorKind::ParseError, "bad integer '" + val + "'");
    if (kv.count(key)) throw Error(ErrorKind::ParseError, "duplicate key '" + key + "'");
    kv[key] = std::stoi(val);
  }
  auto need = [&](const std::vector<std::string>& keys) {
    if (kv.size() != keys.size()) throw Error(ErrorKind::ParseError, "wrong parameter set for " + name);
    for (const auto& k : keys)
      if (!kv.count(k)) throw Error(ErrorKind::ParseError, "missing '" + k + "' for " + name);
  };
  if (name == "equichar") {
    need({"p", "m", "h"});
    return RingSpec::equichar(kv["p"], kv["m"], kv["h"]);
  }
  if (name == "unram") {
    need({"p", "m", "h"});
    return RingSpec::unramified(kv["p"], kv["m"], kv["h"]);
  }
  if (name == "ram") {
    need({"p", "e", "c", "h"});
    return RingSpec::ramified(kv["p"], kv["e"], kv["c"], kv["h"]);
  }
  throw Error(ErrorKind::ParseError, "unknown ring kind '" + name + "'");
}

const char* error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::MixedRings: return "MixedRings";
    case ErrorKind::NotAUnit: return "NotAUnit";
    case ErrorKind::DepthOne: return "DepthOne";
    case ErrorKind::BadDepth: return "BadDepth";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::UnsupportedType: return "UnsupportedType";
    case ErrorKind::NotAdditivePair: return "NotAdditivePair";
    case ErrorKind::Reducible: return "Reducible";
    case ErrorKind::InvalidConcave: return "InvalidConcave";
    case ErrorKind::NotComparable: return "NotComparable";
    case ErrorKind::IllFormedWindows: return "IllFormedWindows";
    case ErrorKind::UnsupportedFamily: return "UnsupportedFamily";
    case ErrorKind::MixedGroups: return "MixedGroups";
    case ErrorKind::OutOfWindow: return "OutOfWindow";
    case ErrorKind::NotAvailable: return "NotAvailable";
    case ErrorKind::SingularLambda: return "SingularLambda";
    case ErrorKind::NoFactorization: return "NoFactorization";
    case ErrorKind::FactorizationFailed: return "FactorizationFailed";
    case ErrorKind::NotInProduct: return "NotInProduct";
    case ErrorKind::NonCommutingInputs: return "NonCommutingInputs";
    case ErrorKind::NotTransitive: return "NotTransitive";
    case ErrorKind::NoSuchH: return "NoSuchH";
    case ErrorKind::IncompatibleRings: return "IncompatibleRings";
  }
  return "Error";
}

// ---- Ring -------------------------------------------------------------------

Ring make_ring(const RingSpec& spec) {
  RingSpec s = spec;
  validate(s);
  return Ring(intern(s));
}

const RingSpec& Ring::spec() const { return d_->spec; }
int Ring::p() const { return d_->spec.p; }
int Ring::residue_degree() const { return d_->spec.m; }
std::int64_t Ring::residue_size() const { return d_->q; }
int Ring::depth() const { return d_->spec.h; }
std::uint64_t Ring::order() const { return d_->order; }
std::size_t Ring::slot_count() const { return d_->slots; }
std::int64_t Ring::slot_modulus(std::size_t slot) const { return d_->moduli.at(slot); }

std::int64_t Ring::characteristic() const {
  switch (d_->spec.kind) {
    case RingKind::EquiChar: return d_->spec.p;
    case RingKind::Unramified: return d_->work;
    case RingKind::Ramified: return d_->moduli[0];
  }
  return 0;
}

Element Ring::zero() const { return Element(d_, 0); }
Element Ring::one() const { return Element(d_, d_->one); }

Element Ring::from_int(std::int64_t n) const {
  Coeffs c{};
  c[0] = d_->spec.kind == RingKind::EquiChar ? mod(n, d_->spec.p) : mod(n, d_->moduli[0]);
  return Element(d_, d_->encode(c.data()));
}

Element Ring::from_coefficients(std::span<const std::int64_t> coeffs) const {
  if (coeffs.size() > d_->slots) throw Error(ErrorKind::InvalidSpec, "too many coefficients");
  Coeffs c{};
  std::copy(coeffs.begin(), coeffs.end(), c.begin());
  return Element(d_, d_->encode(c.data()));
}

Element Ring::at(std::uint64_t index) const {
  if (index >= d_->order) throw Error(ErrorKind::InvalidSpec, "element index out of range");
  return Element(d_, static_cast<std::uint32_t>(index));
}

Element Ring::uniformizer() const {
  if (d_->spec.h < 2) throw Error(ErrorKind::DepthOne, "depth-one ring has no uniformizer");
  return Element(d_, d_->unif);
}

std::vector<Element> Ring::residue_lifts() const {
  const auto& s = d_->spec;
  std::vector<Element> out;
  const std::int64_t q = d_->q;
  for (std::int64_t code = 0; code < q; ++code) {
    Coeffs c{};
    std::int64_t x = code;
    for (int k = 0; k < s.m; ++k, x /= s.p) c[static_cast<std::size_t>(k)] = x % s.p;
    out.emplace_back(d_, d_->encode(c.data()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Element> Ring::elements() const {
  std::vector<Element> out;
  out.reserve(d_->order);
  for (std::uint64_t i = 0; i < d_->order; ++i) out.emplace_back(d_, static_cast<std::uint32_t>(i));
  return out;
}

std::vector<Element> Ring::teichmuller_reps() const {
  std::vector<Element> out;
  for (const auto& s : residue_lifts()) {
    if (d_->spec.kind == RingKind::EquiChar) {
      out.push_back(s);
      continue;
    }
    // s^(q^k) stabilizes at the Teichmuller lift after h steps.
    Element t = s;
    for (int k = 0; k < d_->spec.h; ++k) t = t.pow(static_cast<std::uint64_t>(d_->q));
    out.push_back(t);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Element> Ring::decompose(const Element& x) const {
  if (x.ring() != *this) throw Error(ErrorKind::MixedRings, "element of another ring");
  const int h = d_->spec.h;
  const auto reps = teichmuller_reps();
  std::vector<Element> digits;
  Element rest = x;
  Element power = one();
  for (int i = 0; i < h; ++i) {
    bool found = false;
    for (const auto& s : reps) {
      Element cand = rest - s * power;
      if (cand.valuation() >= i + 1) {
        digits.push_back(s);
        rest = cand;
        found = true;
        break;
      }
    }
    if (!found) throw Error(ErrorKind::InvalidSpec, "decomposition failed");
    if (i + 1 < h) power = power * uniformizer();
  }
  return digits;
}

Element Ring::recompose(std::span<const Element> digits) const {
  Element acc = zero();
  Element power = one();
  for (std::size_t i = 0; i < digits.size(); ++i) {
    acc += digits[i] * power;
    if (i + 1 < digits.size()) power = power * uniformizer();
  }
  return acc;
}

Element Ring::truncate(const Element& x, int w) const {
  const auto& s = d_->spec;
  if (w >= s.h) return x;
  if (w <= 0) return zero();
  Coeffs c{};
  d_->decode(x.index(), c.data());
  switch (s.kind) {
    case RingKind::EquiChar:
      for (std::size_t k = static_cast<std::size_t>(w * s.m); k < d_->slots; ++k) c[k] = 0;
      break;
    case RingKind::Unramified:
      for (std::size_t k = 0; k < d_->slots; ++k) c[k] = mod(c[k], ipow(s.p, w));
      break;
    case RingKind::Ramified:
      for (int i = 0; i < s.e; ++i) c[static_cast<std::size_t>(i)] = mod(c[static_cast<std::size_t>(i)], ipow(s.p, std::max(0, (w - i + s.e - 1) / s.e)));
      break;
  }
  return Element(d_, d_->encode(c.data()));
}

Element Ring::divide_by_uniformizer_power(const Element& x, int k) const {
  const auto& s = d_->spec;
  if (k <= 0) return x;
  if (x.valuation() < k) throw Error(ErrorKind::OutOfWindow, "element not divisible by the uniformizer power");
  if (k >= s.h) return zero();
  Coeffs c{};
  d_->decode(x.index(), c.data());
  Coeffs out{};
  switch (s.kind) {
    case RingKind::EquiChar:
      for (std::size_t i = static_cast<std::size_t>(k * s.m); i < d_->slots; ++i) out[i - static_cast<std::size_t>(k * s.m)] = c[i];
      break;
    case RingKind::Unramified: {
      const std::int64_t pk = ipow(s.p, k);
      for (std::size_t i = 0; i < d_->slots; ++i) out[i] = c[i] / pk;
      break;
    }
    case RingKind::Ramified: {
      out = c;
      for (int step = 0; step < k; ++step) {
        Coeffs next{};
        for (int i = 0; i + 1 < s.e; ++i) next[static_cast<std::size_t>(i)] = out[static_cast<std::size_t>(i + 1)];
        // w^{-1} * a0 = (a0/p) * c^{-1} * w^{e-1}
        next[static_cast<std::size_t>(s.e - 1)] = mod((out[0] / s.p) * d_->c_inv, d_->work);
        out = next;
      }
      break;
    }
  }
  return truncate(Element(d_, d_->encode(out.data())), s.h - k);
}

FieldDescription Ring::field_description() const {
  const auto& s = d_->spec;
  FieldDescription fd;
  const std::string qp = "Q_" + std::to_string(s.p);
  switch (s.kind) {
    case RingKind::EquiChar:
      fd.base = "F_" + std::to_string(d_->q) + "((X))";
      fd.text = fd.base;
      break;
    case RingKind::Unramified:
      fd.base = qp;
      if (s.m == 1) {
        fd.text = qp;
      } else {
        std::vector<std::string> cs;
        for (auto v : d_->f) cs.push_back(std::to_string(v));
        cs.push_back("1");
        std::string poly;
        for (int i = s.m; i >= 0; --i) {
          const std::string& cf = cs[static_cast<std::size_t>(i)];
          if (cf == "0") continue;
          if (!poly.empty()) poly += "+";
          if (i == 0) poly += cf;
          else poly += (cf == "1" ? "" : cf) + "z" + (i > 1 ? "^" + std::to_string(i) : "");
        }
        fd.equation = poly;
        fd.text = "unramified extension of " + qp + " of degree " + std::to_string(s.m) + " defined by " + poly;
      }
      break;
    case RingKind::Ramified:
      fd.base = qp;
      fd.equation = "x^" + std::to_string(s.e) + "-" + std::to_string(s.p * s.c);
      fd.text = qp + " adjoined root of " + fd.equation;
      break;
  }
  return fd;
}

// ---- Element ----------------------------------------------------------------

std::vector<std::int64_t> Element::coefficients() const {
  Coeffs c{};
  r_->decode(v_, c.data());
  return {c.begin(), c.begin() + static_cast<std::ptrdiff_t>(r_->slots)};
}

int Element::valuation() const { return r_->val(v_); }
bool Element::is_zero() const { return v_ == 0; }

Element Element::inverse() const {
  if (valuation() != 0) throw Error(ErrorKind::NotAUnit, to_string() + " is not a unit");
  if (!r_->inv_t.empty()) return Element(r_, r_->inv_t[v_]);
  return Element(r_, r_->pow_raw(v_, r_->unit_count - 1));
}

Element Element::pow(std::uint64_t n) const { return Element(r_, r_->pow_raw(v_, n)); }

std::string Element::to_string() const {
  const auto& s = r_->spec;
  auto c = coefficients();
  auto num = [](std::int64_t v) { return std::to_string(v); };
  switch (s.kind) {
    case RingKind::EquiChar: {
      std::vector<std::string> blocks;
      for (int i = 0; i < s.h; ++i) {
        std::vector<std::string> inner;
        for (int k = 0; k < s.m; ++k) inner.push_back(num(c[static_cast<std::size_t>(i * s.m + k)]));
        blocks.push_back(poly_text(inner, "z"));
      }
      return poly_text(blocks, "t");
    }
    case RingKind::Unramified: {
      std::vector<std::string> inner;
      for (auto v : c) inner.push_back(num(v));
      return poly_text(inner, "z");
    }
    case RingKind::Ramified: {
      std::vector<std::string> inner;
      for (auto v : c) inner.push_back(num(v));
      return poly_text(inner, "w");
    }
  }
  return "?";
}

Element operator+(const Element& a, const Element& b) {
  require_same(a, b);
  return Element(a.r_, a.r_->add(a.v_, b.v_));
}

Element operator-(const Element& a, const Element& b) {
  require_same(a, b);
  return Element(a.r_, a.r_->add(a.v_, a.r_->neg(b.v_)));
}

Element operator*(const Element& a, const Element& b) {
  require_same(a, b);
  return Element(a.r_, a.r_->mul(a.v_, b.v_));
}

Element operator-(const Element& a) { return Element(a.r_, a.r_->neg(a.v_)); }

Element invert(const Element& x) { return x.inverse(); }

std::optional<std::pair<Element, Element>> sqrt(const Element& x) {
  if (!x.is_unit()) throw Error(ErrorKind::NotAUnit, "square root of a non-unit");
  Ring r = x.ring();
  std::optional<Element> root;
  for (const auto& s : r.residue_lifts()) {
    if ((s * s - x).valuation() >= 1) {
      root = s;
      break;
    }
  }
  if (!root) return std::nullopt;
  const Element half = r.from_int(2).inverse();
  // Newton step r <- (r + x/r)/2 doubles the precision each time.
  for (int it = 0; it < 2 * r.depth() + 2 && (*root) * (*root) != x; ++it)
    root = half * (*root + x * root->inverse());
  if ((*root) * (*root) != x) throw Error(ErrorKind::InvalidSpec, "Hensel lifting did not converge");
  Element a = *root, b = -*root;
  if (b < a) std::swap(a, b);
  return std::make_pair(a, b);
}

// ---- quotients ----------------------------------------------------------------

Element Projection::operator()(const Element& x) const {
  if (x.ring() != source_) throw Error(ErrorKind::MixedRings, "projection applied to a foreign element");
  auto c = source_.truncate(x, level_).coefficients();
  if (target_.spec().kind != source_.spec().kind) c.resize(1);  // ramified residue field
  else c.resize(target_.slot_count());
  std::vector<std::int64_t> reduced(target_.slot_count());
  for (std::size_t k = 0; k < reduced.size(); ++k) reduced[k] = k < c.size() ? c[k] : 0;
  return target_.from_coefficients(reduced);
}

Element Projection::lift(const Element& y) const {
  if (y.ring() != target_) throw Error(ErrorKind::MixedRings, "lift applied to a foreign element");
  auto c = y.coefficients();
  c.resize(source_.slot_count(), 0);
  return source_.from_coefficients(c);
}

std::pair<Ring, Projection> quotient_ring(const Ring& r, int i) {
  const auto& s = r.spec();
  if (i < 1 || i > s.h) throw Error(ErrorKind::BadDepth, "quotient level out of range");
  RingSpec t = s;
  t.h = i;
  if (s.kind == RingKind::Ramified && i == 1) t = RingSpec::unramified(s.p, 1, 1);
  Ring target = make_ring(t);
  return {target, Projection(r, target, i)};
}

// ---- finite ring views ----------------------------------------------------------

std::uint64_t RingView::order() const { return r_.order(); }
std::uint32_t RingView::zero() const { return 0; }
std::uint32_t RingView::one() const { return r_.one().index(); }
std::uint32_t RingView::add(std::uint32_t a, std::uint32_t b) const { return r_.data()->add(a, b); }
std::uint32_t RingView::mul(std::uint32_t a, std::uint32_t b) const { return r_.data()->mul(a, b); }
std::uint32_t RingView::neg(std::uint32_t a) const { return r_.data()->neg(a); }

TableRing::TableRing(std::uint32_t order, std::uint32_t zero, std::uint32_t one, std::vector<std::uint32_t> add,
                     std::vector<std::uint32_t> mul)
    : n_(order), zero_(zero), one_(one), add_(std::move(add)), mul_(std::move(mul)), neg_(order, 0) {
  if (add_.size() != std::size_t{n_} * n_ || mul_.size() != std::size_t{n_} * n_)
    throw Error(ErrorKind::InvalidSpec, "table size mismatch");
  for (std::uint32_t a = 0; a < n_; ++a)
    for (std::uint32_t b = 0; b < n_; ++b)
      if (add_[a * n_ + b] == zero_) {
        neg_[a] = b;
        break;
      }
}

std::optional<std::string> TableRing::axiom_violation() const {
  for (std::uint32_t a = 0; a < n_; ++a) {
    if (add(a, zero_) != a) return "zero is not additive identity";
    if (mul(a, one_) != a) return "one is not multiplicative identity";
    if (add(a, neg_[a]) != zero_) return "missing additive inverse";
    for (std::uint32_t b = 0; b < n_; ++b) {
      if (add(a, b) != add(b, a)) return "addition not commutative";
      if (mul(a, b) != mul(b, a)) return "multiplication not commutative";
      for (std::uint32_t c = 0; c < n_; ++c) {
        if (add(add(a, b), c) != add(a, add(b, c))) return "addition not associative";
        if (mul(mul(a, b), c) != mul(a, mul(b, c))) return "multiplication not associative";
        if (mul(a, add(b, c)) != add(mul(a, b), mul(a, c))) return "not distributive";
      }
    }
  }
  return std::nullopt;
}

// ---- isomorphism search -------------------------------------------------------

namespace {

std::uint32_t view_pow(const FiniteRingView& t, std::uint32_t a, std::uint64_t n) {
  std::uint32_t r = t.one(), b = a;
  while (n) {
    if (n & 1) r = t.mul(r, b);
    b = t.mul(b, b);
    n >>= 1;
  }
  return r;
}

std::uint32_t view_scale(const FiniteRingView& t, std::int64_t k, std::uint32_t a) {
  std::uint32_t r = t.zero(), b = a;
  std::uint64_t n = static_cast<std::uint64_t>(k);
  while (n) {
    if (n & 1) r = t.add(r, b);
    b = t.add(b, b);
    n >>= 1;
  }
  return r;
}

std::uint32_t view_int(const FiniteRingView& t, std::int64_t k) { return view_scale(t, k, t.one()); }

// Evaluates the monic residue polynomial (low coefficients f) at z.
std::uint32_t eval_monic(const FiniteRingView& t, const std::vector<std::int64_t>& f, std::uint32_t z) {
  std::uint32_t acc = t.one();
  for (std::size_t i = f.size(); i-- > 0;) acc = t.add(t.mul(acc, z), view_int(t, f[i]));
  return acc;
}

struct Presentation {
  bool has_x = false, has_y = false;
  // For each slot: powers (x exponent, y exponent).
  std::vector<std::pair<int, int>> monomial;
};

Presentation presentation_of(const RingSpec& s) {
  Presentation pr;
  switch (s.kind) {
    case RingKind::EquiChar:
      pr.has_x = s.m > 1;
      pr.has_y = s.h > 1;
      for (int i = 0; i < s.h; ++i)
        for (int j = 0; j < s.m; ++j) pr.monomial.emplace_back(j, i);
      break;
    case RingKind::Unramified:
      pr.has_x = s.m > 1;
      for (int j = 0; j < s.m; ++j) pr.monomial.emplace_back(j, 0);
      break;
    case RingKind::Ramified:
      pr.has_y = true;
      for (int i = 0; i < s.e; ++i) pr.monomial.emplace_back(0, i);
      break;
  }
  return pr;
}

}  // namespace

std::optional<RingIsomorphism> iso_search(const Ring& source, const FiniteRingView& target, std::uint64_t bound) {
  const std::uint64_t n = source.order();
  if (n > bound || target.order() > bound) throw Error(ErrorKind::TooLarge, "ring exceeds isomorphism search bound");
  if (target.order() != n) return std::nullopt;
  const RingSpec& s = source.spec();
  const RingData& d = *source.data();
  const std::int64_t chr = source.characteristic();
  // Additive order of one must agree.
  if (view_int(target, chr) != target.zero()) return std::nullopt;
  if (chr / s.p > 0 && view_int(target, chr / s.p) == target.zero()) return std::nullopt;

  const Presentation pr = presentation_of(s);
  std::vector<std::uint32_t> xs, ys;
  if (pr.has_x) {
    for (std::uint32_t z = 0; z < n; ++z)
      if (eval_monic(target, d.f, z) == target.zero()) xs.push_back(z);
  } else {
    xs.push_back(target.one());
  }
  if (pr.has_y) {
    for (std::uint32_t z = 0; z < n; ++z) {
      if (view_pow(target, z, static_cast<std::uint64_t>(s.h)) != target.zero()) continue;
      if (s.kind == RingKind::Ramified &&
          view_pow(target, z, static_cast<std::uint64_t>(s.e)) != view_int(target, static_cast<std::int64_t>(s.p) * s.c))
        continue;
      ys.push_back(z);
    }
  } else {
    ys.push_back(target.zero());
  }

  std::vector<std::uint32_t> image(n);
  std::vector<char> seen(n);
  for (auto x : xs) {
    for (auto y : ys) {
      // Multiples of each monomial image, then the image table by mixed radix.
      std::vector<std::vector<std::uint32_t>> mult(d.slots);
      for (std::size_t k = 0; k < d.slots; ++k) {
        auto [ex, ey] = pr.monomial[k];
        std::uint32_t mono = target.mul(view_pow(target, x, static_cast<std::uint64_t>(ex)), view_pow(target, y, static_cast<std::uint64_t>(ey)));
        mult[k].resize(static_cast<std::size_t>(d.moduli[k]));
        mult[k][0] = target.zero();
        for (std::int64_t a = 1; a < d.moduli[k]; ++a)
          mult[k][static_cast<std::size_t>(a)] = target.add(mult[k][static_cast<std::size_t>(a - 1)], mono);
      }
      std::fill(seen.begin(), seen.end(), 0);
      bool injective = true;
      for (std::uint32_t i = 0; i < n && injective; ++i) {
        std::uint32_t v = i;
        std::uint32_t acc = target.zero();
        for (std::size_t k = 0; k < d.slots; ++k) {
          auto md = static_cast<std::uint32_t>(d.moduli[k]);
          acc = target.add(acc, mult[k][v % md]);
          v /= md;
        }
        image[i] = acc;
        if (seen[acc]) injective = false;
        seen[acc] = 1;
      }
      if (!injective) continue;
      bool hom = image[source.one().index()] == target.one();
      for (std::uint32_t a = 0; a < n && hom; ++a)
        for (std::uint32_t b = 0; b < n; ++b) {
          if (image[d.add(a, b)] != target.add(image[a], image[b]) ||
              image[d.mul(a, b)] != target.mul(image[a], image[b])) {
            hom = false;
            break;
          }
        }
      if (!hom) continue;
      RingIsomorphism iso;
      iso.image = image;
      if (pr.has_x) iso.generator_images.push_back(x);
      if (pr.has_y) iso.generator_images.push_back(y);
      return iso;
    }
  }
  return std::nullopt;
}

std::optional<RingIsomorphism> iso_search(const Ring& a, const Ring& b, std::uint64_t bound) {
  RingView view(b);
  return iso_search(a, view, bound);
}

}  // namespace parahoric
