// Command-line front end. Results go to stdout as JSON lines; failures go to
// stderr as one JSON line and the process exits with the error family code.

#include <atomic>
#include <charconv>
#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pptfe/bench.hpp"
#include "pptfe/curve_group.hpp"
#include "pptfe/keystore.hpp"
#include "pptfe/net/client.hpp"
#include "pptfe/net/kgc_service.hpp"
#include "pptfe/toy_group.hpp"

namespace {

using namespace pptfe;
using nlohmann::json;

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorFamily::kUsage, what) {}
};

class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what) : Error(ErrorFamily::kRange, what) {}
};

class VerificationFailure : public Error {
 public:
  explicit VerificationFailure(const std::string& what) : Error(ErrorFamily::kVerification, what) {}
};

struct Options {
  std::string backend = "toy";
  std::size_t dim = 0;
  std::optional<std::uint64_t> seed;
  std::string params, msk, tsk, key, ct, out, registry, csv;
  std::string x, y, theta, candidates, label;
  std::string listen, connect;
  std::uint64_t bound = kDefaultDlogBound;
  std::size_t sessions = 0;
  std::size_t max_sessions = 0;
  std::size_t reps = kMinBenchReps;
  std::string grid = "10,20,30,40,50";
};

void emit(const json& j) { std::cout << j.dump() << std::endl; }

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string("missing required flag ") + flag);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw UsageError("empty entry in list '" + text + "'");
    out.push_back(item.substr(b, e - b + 1));
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

std::int64_t parse_i64(const std::string& s) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw UsageError("not an integer: '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw UsageError("not a non-negative integer: '" + s + "'");
  return v;
}

template <PairingGroup G>
std::vector<typename G::Scalar> parse_vector(const std::string& text, const char* flag) {
  require(text, flag);
  std::vector<typename G::Scalar> out;
  for (const auto& item : split_list(text)) out.push_back(G::Scalar::from_i64(parse_i64(item)));
  return out;
}

// Identities are taken as given, never reduced: values >= p or 0 are rejected.
template <PairingGroup G>
typename G::Scalar parse_identity(const std::string& text) {
  const std::uint64_t v = parse_u64(text);
  if constexpr (requires { G::Scalar::kModulus; }) {
    if (v >= G::Scalar::kModulus) throw IdentityDomainError("identity must be below the group order");
  }
  if (v == 0) throw IdentityDomainError("identity must be nonzero");
  return G::Scalar::from_u64(v);
}

template <PairingGroup G>
json scalar_json(const typename G::Scalar& s) {
  if constexpr (requires { s.value(); }) {
    return s.value();
  } else {
    if (auto v = s.to_u64()) return *v;
    return to_hex(s.to_bytes());
  }
}

BackendId parse_backend(const std::string& name) {
  if (name == "toy") return BackendId::kToy;
  if (name == "curve") return BackendId::kCurve;
  throw UsageError("unknown backend '" + name + "' (toy or curve)");
}

// Seeds are a test convenience; the curve backend always draws from the OS.
std::unique_ptr<Rng> make_rng(const Options& o, BackendId backend) {
  if (o.seed) {
    if (backend != BackendId::kToy) throw UsageError("--seed is only accepted with the toy backend");
    return std::make_unique<SeededRng>(*o.seed);
  }
  return std::make_unique<SystemRng>();
}

template <class Fn>
int with_backend(BackendId id, Fn&& fn) {
  switch (id) {
    case BackendId::kToy: return fn.template operator()<Toy>();
    case BackendId::kCurve: return fn.template operator()<Curve>();
  }
  throw UsageError("unknown backend");
}

BackendId params_backend(const Options& o) {
  require(o.params, "--params");
  const auto header = peek_artifact(o.params);
  if (header.type != static_cast<std::uint8_t>(ArtifactType::kParams))
    throw ArtifactTypeError(ArtifactType::kParams, header.type);
  return header.backend;
}

template <PairingGroup G>
PublicParams<G> load_params(const Options& o) {
  return load_artifact<G, PublicParams<G>>(o.params);
}

template <PairingGroup G>
KeyContext<G> key_context(const Options& o, const PublicParams<G>& pp) {
  KeyContext<G> ctx{parse_vector<G>(o.y, "--y"), {}};
  require(o.theta, "--theta");
  ctx.theta = parse_identity<G>(o.theta);
  require_dim(pp, ctx.y.size(), "--y");
  return ctx;
}

// ---- subcommands ------------------------------------------------------------------

int cmd_setup(const Options& o) {
  const BackendId backend = parse_backend(o.backend);
  if (o.dim == 0) throw DimensionError("--dim must be at least 1");
  require(o.params, "--params");
  require(o.msk, "--msk");
  require(o.tsk, "--tsk");
  return with_backend(backend, [&]<PairingGroup G>() {
    auto rng = make_rng(o, backend);
    const auto sys = setup<G>(o.dim, *rng);
    const auto dim = static_cast<std::uint32_t>(o.dim);
    save_artifact<G>(o.params, sys.pp, dim);
    save_artifact<G>(o.msk, sys.msk, dim);
    save_artifact<G>(o.tsk, sys.tsk, dim);
    emit({{"op", "setup"}, {"backend", to_string(G::kId)}, {"dim", o.dim}, {"params", o.params}});
    return 0;
  });
}

int cmd_encrypt(const Options& o) {
  const BackendId backend = params_backend(o);
  require(o.ct, "--ct");
  return with_backend(backend, [&]<PairingGroup G>() {
    const auto pp = load_params<G>(o);
    const auto x = parse_vector<G>(o.x, "--x");
    require_dim(pp, x.size(), "--x");
    auto rng = make_rng(o, backend);
    const auto ct = encrypt(pp, x, *rng);
    save_artifact<G>(o.ct, ct, static_cast<std::uint32_t>(pp.dim()));
    emit({{"op", "encrypt"}, {"ct", o.ct}, {"elements", ct.element_count()}});
    return 0;
  });
}

int cmd_keygen(const Options& o) {
  const BackendId backend = params_backend(o);
  require(o.msk, "--msk");
  require(o.key, "--key");
  return with_backend(backend, [&]<PairingGroup G>() {
    const auto pp = load_params<G>(o);
    const auto dim = static_cast<std::uint32_t>(pp.dim());
    const auto msk = load_artifact<G, MasterSecretKey<G>>(o.msk, dim);
    const auto ctx = key_context<G>(o, pp);
    auto rng = make_rng(o, backend);
    const auto key = keygen(pp, msk, ctx, *rng);
    save_artifact<G>(o.key, key, dim);
    emit({{"op", "keygen"}, {"key", o.key}});
    return 0;
  });
}

int cmd_verify_key(const Options& o) {
  const BackendId backend = params_backend(o);
  require(o.key, "--key");
  return with_backend(backend, [&]<PairingGroup G>() {
    const auto pp = load_params<G>(o);
    const auto key = load_artifact<G, FunctionalKey<G>>(o.key, static_cast<std::uint32_t>(pp.dim()));
    const auto ctx = key_context<G>(o, pp);
    const bool ok = verify_key(pp, key, ctx);
    emit({{"op", "verify-key"}, {"valid", ok}});
    if (!ok) throw VerificationFailure("key does not verify against the given vector and identity");
    return 0;
  });
}

int cmd_decrypt(const Options& o) {
  const BackendId backend = params_backend(o);
  require(o.key, "--key");
  require(o.ct, "--ct");
  return with_backend(backend, [&]<PairingGroup G>() {
    const auto pp = load_params<G>(o);
    const auto dim = static_cast<std::uint32_t>(pp.dim());
    const auto key = load_artifact<G, FunctionalKey<G>>(o.key, dim);
    const auto ct = load_artifact<G, Ciphertext<G>>(o.ct, dim);
    const auto ctx = key_context<G>(o, pp);
    const auto value = decrypt(pp, key, ctx, ct, o.bound);
    if (!value) throw RangeError("inner product outside the search bound");
    emit({{"op", "decrypt"}, {"value", *value}});
    return 0;
  });
}

template <PairingGroup G>
std::optional<IdentityRegistry<G>> maybe_registry(const Options& o, std::uint32_t dim) {
  if (o.registry.empty()) return std::nullopt;
  return load_artifact<G, IdentityRegistry<G>>(o.registry, dim);
}

int cmd_trace(const Options& o) {
  const BackendId backend = params_backend(o);
  require(o.tsk, "--tsk");
  require(o.key, "--key");
  if (o.registry.empty() && o.candidates.empty()) throw UsageError("trace needs --registry or --candidates");
  return with_backend(backend, [&]<PairingGroup G>() {
    const auto pp = load_params<G>(o);
    const auto dim = static_cast<std::uint32_t>(pp.dim());
    const auto tsk = load_artifact<G, TracerSecret<G>>(o.tsk, dim);
    const auto key = load_artifact<G, FunctionalKey<G>>(o.key, dim);
    const auto registry = maybe_registry<G>(o, dim);
    std::vector<typename G::Scalar> candidates;
    if (registry) candidates = registry->candidates();
    if (!o.candidates.empty())
      for (const auto& c : split_list(o.candidates)) candidates.push_back(parse_identity<G>(c));
    const auto theta = trace(pp, tsk, key, std::span<const typename G::Scalar>(candidates));
    if (!theta) throw RangeError("no candidate identity matches the key");
    json out{{"op", "trace"}, {"theta", scalar_json<G>(*theta)}};
    if (registry)
      if (auto label = registry->resolve(*theta)) out["label"] = *label;
    emit(out);
    return 0;
  });
}

std::atomic<bool> g_stop{false};
extern "C" void on_signal(int) { g_stop.store(true); }

int cmd_kgc_serve(const Options& o) {
  const BackendId backend = params_backend(o);
  require(o.msk, "--msk");
  net::ServiceOptions base;
  base = net::options_from_env(base);
  if (!o.listen.empty()) base.listen = net::parse_endpoint(o.listen);
  if (o.max_sessions) base.max_sessions = o.max_sessions;
  return with_backend(backend, [&]<PairingGroup G>() {
    auto pp = load_params<G>(o);
    const auto dim = static_cast<std::uint32_t>(pp.dim());
    auto msk = load_artifact<G, MasterSecretKey<G>>(o.msk, dim);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    net::KgcService<G> service(std::move(pp), std::move(msk), base);
    emit({{"event", "listening"}, {"host", base.listen.host}, {"port", service.port()}});
    std::size_t reported = 0;
    auto report_new = [&] {
      const auto records = service.log().snapshot();
      for (; reported < records.size(); ++reported)
        emit({{"event", "session"}, {"id", records[reported].id}, {"outcome", net::to_string(records[reported].outcome)}});
    };
    while (!g_stop.load() && (o.sessions == 0 || reported < o.sessions)) {
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
      report_new();
    }
    service.stop();
    report_new();
    emit({{"event", "stopped"}, {"sessions", reported}});
    return 0;
  });
}

int cmd_request_key(const Options& o) {
  const BackendId backend = params_backend(o);
  require(o.connect, "--connect");
  require(o.key, "--key");
  return with_backend(backend, [&]<PairingGroup G>() {
    const auto pp = load_params<G>(o);
    const auto ctx = key_context<G>(o, pp);
    auto rng = make_rng(o, backend);
    const auto key = net::request_key(pp, ctx.theta, ctx.y, net::parse_endpoint(o.connect), *rng);
    save_artifact<G>(o.key, key, static_cast<std::uint32_t>(pp.dim()));
    emit({{"op", "request-key"}, {"key", o.key}});
    return 0;
  });
}

int cmd_register_id(const Options& o) {
  const BackendId backend = params_backend(o);
  require(o.registry, "--registry");
  require(o.label, "--label");
  require(o.theta, "--theta");
  return with_backend(backend, [&]<PairingGroup G>() {
    const auto pp = load_params<G>(o);
    const auto dim = static_cast<std::uint32_t>(pp.dim());
    IdentityRegistry<G> reg;
    if (std::filesystem::exists(o.registry)) reg = load_artifact<G, IdentityRegistry<G>>(o.registry, dim);
    reg.register_identity(o.label, parse_identity<G>(o.theta));
    save_artifact<G>(o.registry, reg, dim);
    emit({{"op", "register-id"}, {"label", o.label}, {"entries", reg.size()}});
    return 0;
  });
}

int cmd_bench(const Options& o) {
  const BackendId backend = parse_backend(o.backend);
  std::vector<std::size_t> grid;
  for (const auto& item : split_list(o.grid)) grid.push_back(parse_u64(item));
  return with_backend(backend, [&]<PairingGroup G>() {
    auto rng = make_rng(o, backend);
    const auto report = run_bench<G>(grid, o.reps, *rng);
    if (!o.csv.empty()) {
      std::ofstream f(o.csv);
      if (!f) throw IoError("cannot write " + o.csv);
      f << report.to_csv();
    }
    for (const auto& r : report.rows)
      emit({{"op", "bench"},
            {"algorithm", r.algorithm},
            {"l", r.dim},
            {"reps", r.reps},
            {"mean_seconds", r.mean_seconds},
            {"pairings", r.counts.pairings},
            {"exponentiations", r.exponentiations()},
            {"hashes", r.counts.hashes}});
    for (const auto& c : check_shape(report))
      emit({{"op", "bench-shape"}, {"check", c.name}, {"ok", c.ok}, {"detail", c.detail}});
    if (!o.out.empty()) {
      std::ofstream f(o.out);
      if (!f) throw IoError("cannot write " + o.out);
      f << report.to_json() << '\n';
    }
    return 0;
  });
}

void fail(ErrorFamily family, const std::string& what) {
  std::cerr << json{{"error", what}, {"exit", static_cast<int>(family)}}.dump() << std::endl;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traceable inner-product functional encryption with blind key issuance"};
  app.require_subcommand(1);
  Options o;

  auto flag_params = [&](CLI::App* c) { c->add_option("--params", o.params, "Public parameters file"); };
  auto flag_seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "Deterministic seed (toy backend only)"); };
  auto flag_ctx = [&](CLI::App* c) {
    c->add_option("--y", o.y, "Key vector, comma separated");
    c->add_option("--theta", o.theta, "Identity, decimal");
  };

  auto* setup_cmd = app.add_subcommand("setup", "Generate public parameters and secrets");
  setup_cmd->add_option("--backend", o.backend, "toy or curve")->capture_default_str();
  setup_cmd->add_option("--dim", o.dim, "Vector dimension");
  flag_params(setup_cmd);
  setup_cmd->add_option("--msk", o.msk, "Master secret output");
  setup_cmd->add_option("--tsk", o.tsk, "Tracer secret output");
  flag_seed(setup_cmd);

  auto* enc_cmd = app.add_subcommand("encrypt", "Encrypt a vector");
  flag_params(enc_cmd);
  enc_cmd->add_option("--x", o.x, "Plaintext vector, comma separated");
  enc_cmd->add_option("--ct,--out", o.ct, "Ciphertext output");
  flag_seed(enc_cmd);

  auto* kg_cmd = app.add_subcommand("keygen", "Issue a key directly from the master secret");
  flag_params(kg_cmd);
  kg_cmd->add_option("--msk", o.msk, "Master secret");
  kg_cmd->add_option("--key,--out", o.key, "Key output");
  flag_ctx(kg_cmd);
  flag_seed(kg_cmd);

  auto* vk_cmd = app.add_subcommand("verify-key", "Check a key's pairing equations");
  flag_params(vk_cmd);
  vk_cmd->add_option("--key", o.key, "Key file");
  flag_ctx(vk_cmd);

  auto* dec_cmd = app.add_subcommand("decrypt", "Recover the inner product");
  flag_params(dec_cmd);
  dec_cmd->add_option("--key", o.key, "Key file");
  dec_cmd->add_option("--ct", o.ct, "Ciphertext file");
  dec_cmd->add_option("--bound", o.bound, "Largest |<x,y>| searched")->capture_default_str();
  flag_ctx(dec_cmd);

  auto* tr_cmd = app.add_subcommand("trace", "Recover the identity embedded in a key");
  flag_params(tr_cmd);
  tr_cmd->add_option("--tsk", o.tsk, "Tracer secret");
  tr_cmd->add_option("--key", o.key, "Key file");
  tr_cmd->add_option("--registry", o.registry, "Identity registry");
  tr_cmd->add_option("--candidates", o.candidates, "Extra candidate identities, comma separated");

  auto* srv_cmd = app.add_subcommand("kgc-serve", "Run the blind issuance service");
  flag_params(srv_cmd);
  srv_cmd->add_option("--msk", o.msk, "Master secret");
  srv_cmd->add_option("--listen", o.listen, "host:port (default PPTFE_LISTEN or 127.0.0.1:0)");
  srv_cmd->add_option("--max-sessions", o.max_sessions, "Concurrent session limit (default PPTFE_MAX_SESSIONS or 16)");
  srv_cmd->add_option("--sessions", o.sessions, "Exit after this many sessions (0 = run until signalled)");

  auto* rq_cmd = app.add_subcommand("request-key", "Obtain a key from a KGC without revealing the identity");
  flag_params(rq_cmd);
  rq_cmd->add_option("--connect", o.connect, "KGC host:port");
  rq_cmd->add_option("--key,--out", o.key, "Key output");
  flag_ctx(rq_cmd);
  flag_seed(rq_cmd);

  auto* reg_cmd = app.add_subcommand("register-id", "Add a label and identity to the tracer's registry");
  flag_params(reg_cmd);
  reg_cmd->add_option("--registry", o.registry, "Registry file (created if absent)");
  reg_cmd->add_option("--label", o.label, "Human-readable label");
  reg_cmd->add_option("--theta", o.theta, "Identity, decimal");

  auto* bench_cmd = app.add_subcommand("bench", "Time every algorithm over a dimension grid");
  bench_cmd->add_option("--backend", o.backend, "toy or curve")->capture_default_str();
  bench_cmd->add_option("--grid", o.grid, "Dimensions, comma separated")->capture_default_str();
  bench_cmd->add_option("--reps", o.reps, "Repetitions per point (>= 10)")->capture_default_str();
  bench_cmd->add_option("--csv", o.csv, "CSV output");
  bench_cmd->add_option("--out", o.out, "JSON report output");
  flag_seed(bench_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return static_cast<int>(ErrorFamily::kUsage);
  }

  try {
    if (setup_cmd->parsed()) return cmd_setup(o);
    if (enc_cmd->parsed()) return cmd_encrypt(o);
    if (kg_cmd->parsed()) return cmd_keygen(o);
    if (vk_cmd->parsed()) return cmd_verify_key(o);
    if (dec_cmd->parsed()) return cmd_decrypt(o);
    if (tr_cmd->parsed()) return cmd_trace(o);
    if (srv_cmd->parsed()) return cmd_kgc_serve(o);
    if (rq_cmd->parsed()) return cmd_request_key(o);
    if (reg_cmd->parsed()) return cmd_register_id(o);
    if (bench_cmd->parsed()) return cmd_bench(o);
  } catch (const Error& e) {
    fail(e.family(), e.what());
    return static_cast<int>(e.family());
  } catch (const std::invalid_argument& e) {
    fail(ErrorFamily::kUsage, e.what());
    return static_cast<int>(ErrorFamily::kUsage);
  } catch (const std::exception& e) {
    fail(ErrorFamily::kFormat, e.what());
    return static_cast<int>(ErrorFamily::kFormat);
  }
  return static_cast<int>(ErrorFamily::kUsage);
}
