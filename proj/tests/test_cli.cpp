// Runs the command-line tool on the documented examples and checks JSON and
// exit codes.

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <memory>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(PARAHORIC_CLI) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

nlohmann::json parse(const Run& r) { return nlohmann::json::parse(r.out); }

}  // namespace

TEST_CASE("ring subcommand") {
  auto iso = run("ring 'ram(p=3,e=2,c=1,h=3)' iso 'ram(p=3,e=2,c=2,h=3)'");
  CHECK(iso.code == 0);
  CHECK(parse(iso)["isomorphic"] == false);

  auto quotients = run("ring 'ram(p=3,e=2,c=1,h=2)' iso 'ram(p=3,e=2,c=2,h=2)'");
  CHECK(parse(quotients)["isomorphic"] == true);
  CHECK(parse(quotients)["map"].size() == 9);

  auto info = run("ring 'equichar(p=3,m=1,h=2)' info");
  CHECK(info.code == 0);
  CHECK(parse(info)["order"] == 9);
  CHECK(parse(info)["teichmuller"].size() == 3);

  CHECK(run("ring 'equichar(p=2,m=1,h=2)' info").code == 2);
  CHECK(run("ring 'nonsense' info").code == 2);

  auto table = run("ring 'unram(p=3,m=1,h=1)' table");
  CHECK(parse(table)["mul"][2][2] == 1);
}

TEST_CASE("verify subcommand") {
  auto ids = run("verify identities G2");
  CHECK(ids.code == 0);
  CHECK(parse(ids)["status"] == "pass");

  CHECK(run(R"j(verify axioms '{"family":"GL","n":2,"ring":"equichar(p=3,m=1,h=2)","f":[1/2]}')j").code == 0);
  CHECK(run(R"j(verify rank1 '{"family":"SL","n":2,"ring":"unram(p=3,m=1,h=2)"}')j").code == 0);
  CHECK(run("verify unicity A2").code == 0);
  CHECK(run("verify ring 'unram(p=3,m=2,h=2)'").code == 0);
  CHECK(run(R"j(verify axioms '{"family":"GL","n":4,"ring":"unram(p=3,m=1,h=3)"}' --cap 1000)j").code == 3);
  CHECK(run(R"j(verify axioms '{"family":"XX","n":2,"ring":"unram(p=3,m=1,h=2)"}')j").code == 2);
  CHECK(run("verify identities Q7").code == 2);
}

TEST_CASE("identical inputs give identical output") {
  const std::string args = R"j(verify nested '{"family":"SL","n":3,"ring":"unram(p=3,m=1,h=2)"}' --draws 50 --seed 9)j";
  auto a = run(args), b = run(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("counterexample subcommand") {
  auto one = run("counterexample 1");
  CHECK(one.code == 0);
  auto j = parse(one);
  CHECK(j["closed"] == true);
  CHECK(j["closure"]["exhaustive"] == true);
  CHECK(j["rings_isomorphic"] == false);
  CHECK(j["quotients_isomorphic"] == true);

  auto two = parse(run("counterexample 2"));
  CHECK(two["closed"] == true);
  CHECK(two["induced_ring_iso"] == false);
  CHECK(two["closure"]["products"].get<int>() >= 10000);

  CHECK(run("counterexample 3").code == 3);
}

TEST_CASE("roots, constants and group subcommands") {
  auto roots = parse(run("roots A2 --f '[1/2,1/2]'"));
  CHECK(roots["psi"].size() == 2);
  auto consts = parse(run("constants B2"));
  CHECK(consts["c"].size() > 0);
  auto group = parse(run(R"j(group '{"family":"SL","n":2,"ring":"unram(p=3,m=1,h=2)"}')j"));
  CHECK(group["order"] == 648);
  CHECK(run("").code == 2);
}
