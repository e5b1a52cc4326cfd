// Command-line driver: every subcommand prints one JSON document on stdout.
// Exit codes: 0 pass, 1 verification failure, 2 input error, 3 resource cap.

#include <CLI11.hpp>

#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "parahoric/chevalley.hpp"
#include "parahoric/error.hpp"
#include "parahoric/group.hpp"
#include "parahoric/ring.hpp"
#include "parahoric/rootsystem.hpp"
#include "parahoric/verify.hpp"

using namespace parahoric;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kPass = 0, kFail = 1, kInputError = 2, kCapExceeded = 3;

struct Options {
  bool pretty = false;
  std::uint64_t seed = 1;
  std::uint64_t cap = kDefaultCap;
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::TooLarge:
      return kCapExceeded;
    case ErrorKind::InvalidSpec:
    case ErrorKind::ParseError:
    case ErrorKind::UnsupportedType:
    case ErrorKind::InvalidConcave:
    case ErrorKind::IllFormedWindows:
    case ErrorKind::UnsupportedFamily:
    case ErrorKind::IncompatibleRings:
    case ErrorKind::BadDepth:
    case ErrorKind::DepthOne:
    case ErrorKind::NotAdditivePair:
      return kInputError;
    default:
      return kFail;
  }
}

Json ring_info(const Ring& r) {
  Json j;
  j["spec"] = to_string(r.spec());
  j["order"] = r.order();
  j["characteristic"] = r.characteristic();
  j["residue_field_size"] = r.residue_size();
  j["depth"] = r.depth();
  j["uniformizer"] = r.depth() > 1 ? Json(r.uniformizer().to_string()) : Json(nullptr);
  Json reps = Json::array();
  for (const auto& t : r.teichmuller_reps()) reps.push_back(t.to_string());
  j["teichmuller"] = reps;
  auto field = r.field_description();
  j["field"] = {{"base", field.base}, {"equation", field.equation}, {"text", field.text}};
  return j;
}

Json ring_table(const Ring& r, std::uint64_t cap) {
  if (r.order() * r.order() > cap) throw Error(ErrorKind::TooLarge, "table has more than cap entries");
  auto all = r.elements();
  Json names = Json::array(), add = Json::array(), mul = Json::array();
  for (const auto& x : all) {
    names.push_back(x.to_string());
    Json add_row = Json::array(), mul_row = Json::array();
    for (const auto& y : all) {
      add_row.push_back((x + y).index());
      mul_row.push_back((x * y).index());
    }
    add.push_back(std::move(add_row));
    mul.push_back(std::move(mul_row));
  }
  return Json{{"spec", to_string(r.spec())}, {"elements", names}, {"add", add}, {"mul", mul}};
}

Json ring_iso(const Ring& a, const Ring& b) {
  Json j;
  j["source"] = to_string(a.spec());
  j["target"] = to_string(b.spec());
  auto iso = iso_search(a, b);
  j["isomorphic"] = iso.has_value();
  if (iso) {
    Json map = Json::object();
    for (const auto& x : a.elements()) map[x.to_string()] = b.at(iso->image[x.index()]).to_string();
    j["map"] = map;
  }
  return j;
}

Json roots_json(const RootSystem& sys, const std::optional<std::string>& point_text) {
  Json j;
  j["system"] = sys.label();
  j["cartan"] = sys.cartan_matrix();
  std::optional<ConcaveFunction> f;
  if (point_text) f = extend_concave(sys, parse_point(*point_text));
  Json list = Json::array();
  for (Root a = 0; a < sys.size(); ++a) {
    Json r{{"name", sys.name(a)}, {"height", sys.height(a)}, {"ambient", sys.ambient(a)}};
    if (f) r["f"] = (*f)(a);
    list.push_back(std::move(r));
  }
  j["roots"] = list;
  auto names = [&](const std::vector<Root>& rs) {
    Json out = Json::array();
    for (Root a : rs) out.push_back(sys.name(a));
    return out;
  };
  j["simple"] = names(sys.simple_roots());
  j["highest"] = sys.name(sys.highest_root());
  j["extended_simple"] = names(sys.extended_simple_roots());
  if (f) j["psi"] = names(psi_of(sys, *f));
  return j;
}

Json constants_json(const RootSystem& sys) {
  ConstantFamily c = generate_family(sys);
  Json j;
  j["system"] = sys.label();
  j["c"] = c.to_json();
  Json higher = Json::object();
  for (const auto& [key, value] : higher_constants(c)) {
    const auto& [a, b, i, k] = key;
    higher["(" + sys.name(a) + "," + sys.name(b) + "," + std::to_string(i) + "," + std::to_string(k) + ")"] =
        format_rational(value);
  }
  j["higher"] = higher;
  return j;
}

Json group_json(const Group& g, std::uint64_t cap) {
  Json j;
  j["spec"] = to_json(g.spec());
  j["description"] = g.describe();
  Json windows = Json::array();
  for (int i = 0; i < g.size(); ++i) {
    Json row = Json::array();
    for (int k = 0; k < g.size(); ++k) row.push_back({{"offset", g.offset(i, k)}, {"width", g.width(i, k)}});
    windows.push_back(std::move(row));
  }
  j["windows"] = windows;
  const auto& sys = g.roots();
  Json roots = Json::array();
  for (Root a = 0; a < sys.size(); ++a)
    roots.push_back({{"name", sys.name(a)}, {"f", g.concave()(a)}, {"subgroup_order", g.params(a).size()}});
  j["roots"] = roots;
  Json psi = Json::array();
  for (Root a : psi_of(sys, g.concave())) psi.push_back(sys.name(a));
  j["psi"] = psi;
  j["tuple_count"] = g.tuple_count();
  j["order"] = g.tuple_count() <= cap ? Json(g.elements(cap).size()) : Json(nullptr);
  return j;
}

Json report_json(const VerificationReport& rep) {
  return Json{{"subject", rep.subject}, {"status", rep.all_pass() ? "pass" : "fail"}, {"entries", rep.to_json()}};
}

void emit(const Json& j, const Options& opt) { std::cout << (opt.pretty ? j.dump(2) : j.dump()) << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Truncated valuation rings, constant families and parahoric quotient groups"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_flag("--pretty", opt.pretty, "Indent the JSON output");
  app.add_option("--seed", opt.seed, "Seed for sampled checks");
  app.add_option("--cap", opt.cap, "Enumeration cap");

  // Each subcommand stores its action here; it runs after parsing.
  std::function<int()> action;

  std::string ring_spec, ring_action, ring_other;
  auto* ring = app.add_subcommand("ring", "Inspect a ring: info, table, or iso <spec2>");
  ring->add_option("spec", ring_spec, "e.g. ram(p=3,e=2,c=1,h=3)")->required();
  ring->add_option("action", ring_action)->required()->check(CLI::IsMember({"info", "table", "iso"}));
  ring->add_option("other", ring_other, "Second ring for iso");
  ring->callback([&] {
    action = [&] {
      Ring r = make_ring(parse_ring_spec(ring_spec));
      if (ring_action == "info") emit(ring_info(r), opt);
      else if (ring_action == "table") emit(ring_table(r, opt.cap), opt);
      else {
        if (ring_other.empty()) throw Error(ErrorKind::ParseError, "iso needs a second ring spec");
        emit(ring_iso(r, make_ring(parse_ring_spec(ring_other))), opt);
      }
      return kPass;
    };
  });

  std::string system_text;
  std::optional<std::string> point_text;
  auto* roots = app.add_subcommand("roots", "Root system data, optionally with a concave function");
  roots->add_option("system", system_text, "A2, B2, G2, A3, ...")->required();
  roots->add_option("--f", point_text, "Point on the simple roots, e.g. [1/2,0]");
  roots->callback([&] {
    action = [&] {
      emit(roots_json(parse_root_system(system_text), point_text), opt);
      return kPass;
    };
  });

  auto* constants = app.add_subcommand("constants", "Generated structure-constant family");
  constants->add_option("system", system_text)->required();
  constants->callback([&] {
    action = [&] {
      emit(constants_json(parse_root_system(system_text)), opt);
      return kPass;
    };
  });

  std::string group_text;
  auto* group = app.add_subcommand("group", "Windows, root subgroups and order of a group spec");
  group->add_option("spec", group_text, R"j({"family":"GL","n":2,"ring":"equichar(p=3,m=1,h=2)","f":[1/2]})j")
      ->required();
  group->callback([&] {
    action = [&] {
      emit(group_json(Group(parse_group_spec(group_text)), opt.cap), opt);
      return kPass;
    };
  });

  std::string verify_target, verify_arg;
  int draws = 1000;
  std::uint64_t samples = 10000;
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify
      ->add_option("target", verify_target,
                   "identities|unicity <system>; ring <spec>; axioms|rank1|iwahori|extract|nested|induced|closure <group>")
      ->required()
      ->check(CLI::IsMember(
          {"identities", "unicity", "ring", "axioms", "rank1", "iwahori", "extract", "nested", "induced", "closure"}));
  verify->add_option("arg", verify_arg)->required();
  verify->add_option("--draws", draws, "Random tuples for nested commutators");
  verify->add_option("--samples", samples, "Sampled products for closure");
  verify->callback([&] {
    action = [&] {
      VerificationReport rep;
      if (verify_target == "identities") {
        rep = verify_identities(generate_family(parse_root_system(verify_arg)));
      } else if (verify_target == "unicity") {
        rep = unicity_report(parse_root_system(verify_arg), opt.seed);
      } else if (verify_target == "ring") {
        rep = ring_report(make_ring(parse_ring_spec(verify_arg)));
      } else {
        Group g(parse_group_spec(verify_arg));
        if (verify_target == "axioms") rep = axiom_report(g, opt.cap);
        else if (verify_target == "rank1") rep = rank1_report(g);
        else if (verify_target == "iwahori") rep = iwahori_report(g);
        else if (verify_target == "extract") rep = constants_report(g);
        else if (verify_target == "nested") rep = nested_commutator_report(g, draws, opt.seed);
        else if (verify_target == "induced") {
          rep.subject = g.describe();
          for (Root a = 0; a < g.roots().size(); ++a)
            if (g.concave()(a) == 0) rep.merge(induced_ring_report(g, a), g.roots().name(a) + ":");
        } else {
          auto c = closure_check(g, samples, opt.seed, opt.cap);
          rep.subject = g.describe();
          record(rep.add("closure.closed", "products of elements stay in the group"), c.closed, c.witness);
          record(rep.add("closure.well-defined", "products do not depend on window representatives"),
                 c.well_defined, c.witness);
          record(rep.add("closure.associative", "(xy)z = x(yz)"), c.associative, c.witness);
        }
      }
      emit(report_json(rep), opt);
      return rep.all_pass() ? kPass : kFail;
    };
  });

  int block = 1;
  auto* counter = app.add_subcommand("counterexample", "Two-ring block group over ram(c=1) and ram(c=2)");
  counter->add_option("n", block, "Block size (1 or 2)")->required();
  counter->callback([&] {
    action = [&] {
      auto res = counterexample_group(block, RingSpec::ramified(3, 2, 1, 3), RingSpec::ramified(3, 2, 2, 3), opt.seed,
                                      opt.cap);
      emit(res.to_json(), opt);
      bool expected = res.closure.closed && res.closure.well_defined && res.closure.associative &&
                      !res.rings_isomorphic && res.quotients_isomorphic && res.axioms.all_pass() &&
                      !res.induced_rings_isomorphic.value_or(false);
      return expected ? kPass : kFail;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kPass : kInputError;
  }

  try {
    return action();
  } catch (const Error& e) {
    emit(Json{{"error", error_kind_name(e.kind())}, {"message", e.what()}}, opt);
    return exit_code_for(e.kind());
  } catch (const nlohmann::json::exception& e) {
    emit(Json{{"error", "ParseError"}, {"message", e.what()}}, opt);
    return kInputError;
  }
}
