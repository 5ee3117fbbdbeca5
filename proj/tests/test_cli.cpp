#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "pptfe/keystore.hpp"
#include "pptfe/toy_group.hpp"

using namespace pptfe;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = PPTFE_CLI_PATH;

struct Run {
  int exit = -1;
  std::string out, err;
  json last() const {
    std::istringstream in(out);
    std::string line, prev;
    while (std::getline(in, line))
      if (!line.empty()) prev = line;
    return json::parse(prev);
  }
};

struct Workdir {
  fs::path path;
  Workdir() {
    static int n = 0;
    path = fs::temp_directory_path() / ("pptfe_cli_" + std::to_string(::getpid()) + "_" + std::to_string(n++));
    fs::create_directories(path);
  }
  ~Workdir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const Workdir& wd, const std::string& args) {
  const auto out = wd / "stdout.txt", err = wd / "stderr.txt";
  const std::string cmd = kCli + " " + args + " >" + out + " 2>" + err;
  const int status = std::system(cmd.c_str());
  Run r;
  r.exit = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

// Toy system of dimension 3 with deterministic seeds.
void toy_setup(const Workdir& wd, std::size_t dim = 3) {
  const auto r = run(wd, "setup --backend toy --dim " + std::to_string(dim) + " --params " + (wd / "pp") + " --msk " +
                             (wd / "msk") + " --tsk " + (wd / "tsk") + " --seed 7");
  REQUIRE_MESSAGE(r.exit == 0, r.err);
}

}  // namespace

TEST_CASE("setup is deterministic under a seed and writes typed artifacts") {
  Workdir a, b;
  toy_setup(a);
  toy_setup(b);
  for (const char* f : {"pp", "msk", "tsk"}) CHECK(read_file(a / f) == read_file(b / f));
  CHECK(peek_artifact(a / "pp").type == static_cast<std::uint8_t>(ArtifactType::kParams));
  CHECK(peek_artifact(a / "msk").type == static_cast<std::uint8_t>(ArtifactType::kMasterSecret));
  CHECK(peek_artifact(a / "tsk").type == static_cast<std::uint8_t>(ArtifactType::kTracerSecret));
  CHECK(peek_artifact(a / "pp").dim == 3);
}

TEST_CASE("encrypt, keygen, verify, decrypt and trace end to end") {
  Workdir wd;
  toy_setup(wd);
  const std::string pp = " --params " + (wd / "pp");

  auto r = run(wd, "encrypt" + pp + " --x 3,-1,4 --ct " + (wd / "ct") + " --seed 1");
  REQUIRE_MESSAGE(r.exit == 0, r.err);
  CHECK(r.last()["elements"] == 3 + 3);

  r = run(wd, "keygen" + pp + " --msk " + (wd / "msk") + " --y 2,5,-3 --theta 99 --key " + (wd / "key") + " --seed 2");
  REQUIRE_MESSAGE(r.exit == 0, r.err);

  r = run(wd, "verify-key" + pp + " --key " + (wd / "key") + " --y 2,5,-3 --theta 99");
  CHECK(r.exit == 0);
  CHECK(r.last()["valid"] == true);
  r = run(wd, "verify-key" + pp + " --key " + (wd / "key") + " --y 2,5,-3 --theta 98");
  CHECK(r.exit == 3);

  r = run(wd, "decrypt" + pp + " --key " + (wd / "key") + " --ct " + (wd / "ct") + " --y 2,5,-3 --theta 99");
  REQUIRE_MESSAGE(r.exit == 0, r.err);
  CHECK(r.last()["value"] == 3 * 2 - 5 - 12);
  r = run(wd, "decrypt" + pp + " --key " + (wd / "key") + " --ct " + (wd / "ct") + " --y 2,5,-3 --theta 99 --bound 10");
  CHECK(r.exit == 5);

  r = run(wd, "register-id" + pp + " --registry " + (wd / "reg") + " --label alice --theta 99");
  REQUIRE_MESSAGE(r.exit == 0, r.err);
  r = run(wd, "register-id" + pp + " --registry " + (wd / "reg") + " --label bob --theta 100");
  CHECK(r.last()["entries"] == 2);
  r = run(wd, "register-id" + pp + " --registry " + (wd / "reg") + " --label carol --theta 99");
  CHECK(r.exit == 1);

  r = run(wd, "trace" + pp + " --tsk " + (wd / "tsk") + " --key " + (wd / "key") + " --registry " + (wd / "reg"));
  REQUIRE_MESSAGE(r.exit == 0, r.err);
  CHECK(r.last()["theta"] == 99);
  CHECK(r.last()["label"] == "alice");

  r = run(wd, "trace" + pp + " --tsk " + (wd / "tsk") + " --key " + (wd / "key") + " --candidates 5,6,7");
  CHECK(r.exit == 5);
}

TEST_CASE("trace against an empty registry reports a miss") {
  Workdir wd;
  toy_setup(wd);
  save_artifact<Toy>(wd / "reg", IdentityRegistry<Toy>{}, 3);
  auto r = run(wd, "keygen --params " + (wd / "pp") + " --msk " + (wd / "msk") + " --y 1,1,1 --theta 5 --key " +
                       (wd / "key"));
  REQUIRE(r.exit == 0);
  r = run(wd, "trace --params " + (wd / "pp") + " --tsk " + (wd / "tsk") + " --key " + (wd / "key") + " --registry " +
                  (wd / "reg"));
  CHECK(r.exit == 5);
  const auto err = json::parse(r.err);
  CHECK(err["exit"] == 5);
}

TEST_CASE("input validation and exit codes") {
  Workdir wd;
  toy_setup(wd);
  const std::string pp = " --params " + (wd / "pp");

  CHECK(run(wd, "").exit == 1);
  CHECK(run(wd, "no-such-command").exit == 1);
  CHECK(run(wd, "setup --backend toy --dim 0 --params a --msk b --tsk c").exit == 1);
  CHECK(run(wd, "setup --backend nope --dim 2 --params a --msk b --tsk c").exit == 1);
  CHECK(run(wd, "setup --backend curve --dim 2 --params a --msk b --tsk c --seed 1").exit == 1);
  CHECK(run(wd, "encrypt" + pp + " --x 1,2 --ct " + (wd / "ct")).exit == 1);
  CHECK(run(wd, "encrypt" + pp + " --x 1,a,2 --ct " + (wd / "ct")).exit == 1);
  CHECK(run(wd, "keygen" + pp + " --msk " + (wd / "msk") + " --y 1,2,3 --theta 0 --key " + (wd / "k")).exit == 1);
  // p and above are outside the identity domain; they are not reduced.
  CHECK(run(wd, "keygen" + pp + " --msk " + (wd / "msk") + " --y 1,2,3 --theta " + std::to_string(kToyModulus) +
                    " --key " + (wd / "k"))
            .exit == 1);

  // Wrong artifact type and corruption are format errors.
  auto r = run(wd, "encrypt --params " + (wd / "msk") + " --x 1,2,3 --ct " + (wd / "ct"));
  CHECK(r.exit == 2);
  CHECK(json::parse(r.err).contains("error"));
  auto bytes = read_file(wd / "pp");
  bytes[bytes.size() / 2] ^= 1;
  write_file(wd / "pp_bad", bytes);
  CHECK(run(wd, "encrypt --params " + (wd / "pp_bad") + " --x 1,2,3 --ct " + (wd / "ct")).exit == 2);
  CHECK(run(wd, "encrypt --params " + (wd / "missing") + " --x 1,2,3 --ct " + (wd / "ct")).exit == 2);

  // Artifacts from a different setup of another dimension.
  Workdir other;
  toy_setup(other, 2);
  r = run(wd, "keygen" + pp + " --msk " + (other / "msk") + " --y 1,2,3 --theta 4 --key " + (wd / "k"));
  CHECK(r.exit == 2);
}

TEST_CASE("kgc-serve and request-key over loopback") {
  Workdir wd;
  toy_setup(wd);
  const std::string cmd = kCli + " kgc-serve --params " + (wd / "pp") + " --msk " + (wd / "msk") +
                          " --listen 127.0.0.1:0 --sessions 2 2>" + (wd / "serve_err.txt");
  FILE* server = ::popen(cmd.c_str(), "r");
  REQUIRE(server);
  char buf[4096];
  REQUIRE(std::fgets(buf, sizeof buf, server));
  const auto listening = json::parse(buf);
  REQUIRE(listening["event"] == "listening");
  const std::string ep = "127.0.0.1:" + std::to_string(listening["port"].get<int>());

  auto r = run(wd, "request-key --params " + (wd / "pp") + " --connect " + ep + " --y 1,2,3 --theta 321 --key " +
                       (wd / "key"));
  REQUIRE_MESSAGE(r.exit == 0, r.err);
  r = run(wd, "verify-key --params " + (wd / "pp") + " --key " + (wd / "key") + " --y 1,2,3 --theta 321");
  CHECK(r.exit == 0);
  r = run(wd, "trace --params " + (wd / "pp") + " --tsk " + (wd / "tsk") + " --key " + (wd / "key") +
                  " --candidates 5,321");
  CHECK(r.last()["theta"] == 321);

  // A request with the wrong dimension is refused by the KGC (protocol family).
  Workdir other;
  toy_setup(other, 2);
  r = run(wd, "request-key --params " + (other / "pp") + " --connect " + ep + " --y 1,2 --theta 5 --key " +
                  (wd / "k2"));
  CHECK(r.exit == 4);

  std::vector<json> events;
  while (std::fgets(buf, sizeof buf, server)) events.push_back(json::parse(buf));
  const int status = ::pclose(server);
  CHECK(WIFEXITED(status));
  CHECK(WEXITSTATUS(status) == 0);
  REQUIRE(events.size() == 3);
  CHECK(events[0]["outcome"] == "issued");
  CHECK(events[1]["outcome"] == "aborted(malformed)");
  CHECK(events[2]["event"] == "stopped");
  // Server output never names the identity.
  for (const auto& e : events) CHECK(e.dump().find("321") == std::string::npos);

  r = run(wd, "request-key --params " + (wd / "pp") + " --connect " + ep + " --y 1,2,3 --theta 9 --key " + (wd / "k3"));
  CHECK(r.exit == 4);
}

TEST_CASE("bench on the toy backend writes CSV and JSON") {
  Workdir wd;
  auto r = run(wd, "bench --backend toy --grid 1,2 --reps 10 --seed 3 --csv " + (wd / "b.csv") + " --out " +
                       (wd / "b.json"));
  REQUIRE_MESSAGE(r.exit == 0, r.err);
  CHECK(slurp(wd / "b.csv").rfind("algorithm,l,reps,mean_seconds,pairings,exponentiations,hashes\n", 0) == 0);
  const auto report = json::parse(slurp(wd / "b.json"));
  CHECK(report["rows"].size() == 10);
  CHECK(run(wd, "bench --backend toy --grid 1,2 --reps 9").exit == 1);
}
