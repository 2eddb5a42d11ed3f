// Map server with its state in a directory:
//   server.key      hex Ed25519 seed
//   config.json     id, mmd, supported root key ids
//   trust-store     concatenated TLV certificates
//   snapshot        latest snapshot (items, head history, pending items)
//
// Item files hold concatenated TLV elements: chained certificates (0x15),
// plain certificates (0x10, taken as chains of length zero) and
// revocations (0x12).
#include <csignal>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <thread>

#include "CLI11.hpp"
#include "fpki/certmodel/test_ca.h"
#include "fpki/mapserver/map_server.h"
#include "fpki/transport/net.h"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace fpki;

namespace {

Bytes read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

void write_file(const fs::path& p, ByteView data) {
  fs::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(data.data()), std::streamsize(data.size()));
    if (!out) throw std::runtime_error("cannot write " + p.string());
  }
  fs::rename(tmp, p);
}

void write_text(const fs::path& p, const std::string& s) { write_file(p, as_bytes(s)); }

std::vector<cert::Certificate> read_certificates(const fs::path& p) {
  Bytes data = read_file(p);
  tlv::Reader r(data);
  std::vector<cert::Certificate> out;
  while (!r.at_end()) out.push_back(cert::read_certificate(r));
  return out;
}

struct Daemon {
  fs::path dir;
  KeyPair key;
  map::MapServerConfig config;
  std::unique_ptr<map::MapServer> server;

  static Daemon open(const fs::path& dir) {
    std::string seed_hex;
    std::ifstream(dir / "server.key") >> seed_hex;
    Seed seed{};
    Bytes raw = from_hex(seed_hex);
    if (raw.size() != seed.size()) throw std::runtime_error("bad server.key");
    std::copy(raw.begin(), raw.end(), seed.begin());
    Daemon d{dir, KeyPair(seed), {}, nullptr};
    auto j = nlohmann::json::parse(std::ifstream(dir / "config.json"));
    d.config.id = j.at("id").get<std::string>();
    d.config.mmd = j.at("mmd").get<int64_t>();
    for (const auto& s : j.at("supported")) d.config.supported.insert(hash_from_hex(s.get<std::string>()));
    d.config.trust_store = read_certificates(dir / "trust-store");
    d.server = map::MapServer::restore(read_file(dir / "snapshot"), d.config, d.key);
    return d;
  }

  void save() { write_file(dir / "snapshot", server->snapshot()); }
};

std::string head_line(const map::SignedMapHead& h) {
  return "revision " + std::to_string(h.revision) + " at " + std::to_string(h.timestamp) +
         " root " + to_hex(h.root);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"F-PKI map server"};
  app.require_subcommand(1);
  std::string state = "mapd-state";
  app.add_option("--state", state, "state directory");

  auto* init = app.add_subcommand("init", "create a new server state");
  std::string id = "mapserver", trust_path;
  uint64_t seed = 0;
  int64_t mmd = 3600;
  std::vector<std::string> supported;
  init->add_option("--id", id);
  init->add_option("--trust-store", trust_path, "file of TLV root certificates")
      ->required()
      ->check(CLI::ExistingFile);
  init->add_option("--seed", seed, "derive the server key from a number (random if omitted)");
  init->add_option("--mmd", mmd, "maximum merge delay, seconds");
  init->add_option("--supported", supported, "hex root key ids (default: all)")->delimiter(',');

  auto* ingest = app.add_subcommand("ingest", "stage certificates and revocations");
  std::string items_path;
  ingest->add_option("file", items_path)->required()->check(CLI::ExistingFile);

  int64_t now = int64_t(std::time(nullptr));
  auto* commit = app.add_subcommand("commit", "publish a new revision");
  commit->add_option("--now", now);

  auto* prune = app.add_subcommand("prune", "schedule removal of expired certificates");
  prune->add_option("--now", now)->required();

  auto* lookup = app.add_subcommand("lookup", "proof bundle for a name");
  std::string name, out_path;
  lookup->add_option("name", name)->required();
  lookup->add_option("--out", out_path, "write the TLV bundle here");

  auto* head = app.add_subcommand("head", "latest signed map head");

  auto* export_delta = app.add_subcommand("export-delta", "items introduced by a revision");
  uint64_t revision = 0;
  export_delta->add_option("revision", revision)->required();
  export_delta->add_option("file", out_path)->required();

  auto* audit = app.add_subcommand("audit", "replay a delta between two consecutive revisions");
  uint64_t old_rev = 0, new_rev = 0;
  std::string delta_path;
  audit->add_option("old", old_rev)->required();
  audit->add_option("new", new_rev)->required();
  audit->add_option("delta", delta_path)->required()->check(CLI::ExistingFile);

  auto* serve = app.add_subcommand("serve", "answer proof requests over UDP and TCP");
  std::string host = "127.0.0.1";
  uint16_t port = 5300;
  serve->add_option("--host", host);
  serve->add_option("--port", port);

  auto* gen = app.add_subcommand("gen", "test certificates from a deterministic CA");
  size_t count = 10;
  std::string gen_trust;
  gen->add_option("--count", count);
  gen->add_option("--seed", seed);
  gen->add_option("--items", items_path)->required();
  gen->add_option("--trust-store", gen_trust)->required();

  CLI11_PARSE(app, argc, argv);
  fs::path dir(state);

  try {
    if (*gen) {
      auto ca = cert::CertificateAuthority::root(seed);
      std::mt19937_64 rng(seed);
      tlv::Writer items;
      for (size_t i = 0; i < count; ++i) {
        cert::IssueOptions o;
        std::string label = "site" + std::to_string(rng() % 1000000);
        o.names = {label + ".com", "www." + label + ".com"};
        o.validity = {now - 86400, now + 90 * 86400};
        cert::encode_to(items, ca.issue_chained(o));
      }
      write_file(items_path, items.data());
      write_file(gen_trust, cert::encode(ca.certificate()));
      std::cout << count << " certificates, root " << to_hex(ca.key_id()) << "\n";
      return 0;
    }
    if (*init) {
      if (fs::exists(dir / "snapshot")) throw std::runtime_error(state + " already holds a server");
      fs::create_directories(dir);
      Seed s{};
      if (seed) {
        s = KeyPair::from_u64(seed).seed();
      } else {
        std::random_device rd;
        for (auto& b : s) b = uint8_t(rd());
      }
      write_text(dir / "server.key", to_hex(ByteView(s)) + "\n");
      fs::copy_file(trust_path, dir / "trust-store", fs::copy_options::overwrite_existing);
      nlohmann::json j{{"id", id}, {"mmd", mmd}, {"supported", supported}};
      write_text(dir / "config.json", j.dump(2) + "\n");
      map::MapServerConfig config;
      config.id = id;
      config.mmd = mmd;
      config.trust_store = read_certificates(dir / "trust-store");
      for (const auto& k : supported) config.supported.insert(hash_from_hex(k));
      KeyPair key(s);
      map::MapServer server(config, key);
      write_file(dir / "snapshot", server.snapshot());
      std::cout << "server " << id << " key " << to_hex(ByteView(key.public_key())) << "\n";
      return 0;
    }

    Daemon d = Daemon::open(dir);
    if (*ingest) {
      Bytes data = read_file(items_path);
      tlv::Reader r(data);
      size_t staged = 0, rejected = 0;
      while (!r.at_end()) {
        map::SubmitResult res;
        switch (r.peek_tag()) {
          case tlv::Tag::kChainedCertificate:
            res = d.server->ingest(cert::read_chained(r));
            break;
          case tlv::Tag::kCertificate:
            res = d.server->ingest(cert::ChainedCertificate{cert::read_certificate(r), {}});
            break;
          case tlv::Tag::kRevocation:
            res = d.server->add_revocation(cert::read_revocation(r));
            break;
          default:
            throw tlv::DecodeError("unexpected element in item file");
        }
        if (res.staged) {
          ++staged;
        } else {
          ++rejected;
          std::cerr << "rejected: " << res.reason << "\n";
        }
      }
      d.save();
      std::cout << staged << " staged, " << rejected << " rejected, " << d.server->pending_count()
                << " pending\n";
    } else if (*commit) {
      auto h = d.server->commit(now);
      d.save();
      std::cout << head_line(h) << "\n";
    } else if (*prune) {
      size_t n = d.server->prune_expired(now);
      d.save();
      std::cout << n << " certificates scheduled for removal\n";
    } else if (*lookup) {
      auto b = d.server->lookup(name);
      std::cout << head_line(b.smh) << "\n";
      for (size_t i = 0; i < b.levels.size(); ++i) {
        const auto& l = b.levels[i];
        std::cout << "level " << i << ": ";
        if (!l.entry) {
          std::cout << "absent";
        } else {
          std::cout << l.entry->certs_exact.size() << " certificates, "
                    << l.entry->certs_wildcard.size() << " wildcard";
        }
        std::cout << ", " << l.proof.siblings.size() << " siblings\n";
      }
      if (!out_path.empty()) write_file(out_path, map::encode(b));
    } else if (*head) {
      if (!d.server->has_revision()) throw std::runtime_error("no revision committed yet");
      std::cout << head_line(d.server->latest()) << "\n";
    } else if (*export_delta) {
      if (revision >= d.server->history().size()) throw std::runtime_error("no such revision");
      write_file(out_path, map::encode(d.server->delta_at(revision)));
    } else if (*audit) {
      if (new_rev != old_rev + 1) throw std::runtime_error("audit takes consecutive revisions");
      auto hist = d.server->history();
      if (new_rev >= hist.size()) throw std::runtime_error("no such revision");
      map::RevisionDelta delta = map::decode_delta(read_file(delta_path));
      bool ok = map::audit_revision(d.server->state_at(old_rev), d.server->public_key(),
                                    hist[old_rev], hist[new_rev], delta,
                                    d.server->audit_evidence(new_rev), d.config.trust_store);
      std::cout << (ok ? "ok" : "FAILED") << "\n";
      return ok ? 0 : 2;
    } else if (*serve) {
      static std::atomic<bool> stop{false};
      std::signal(SIGINT, [](int) { stop = true; });
      std::signal(SIGTERM, [](int) { stop = true; });
      transport::ProofServer ps(*d.server, transport::server_suffix(d.config.id), host, port);
      std::cout << "serving " << d.config.id << " on " << ps.endpoint().str() << std::endl;
      while (!stop) std::this_thread::sleep_for(std::chrono::milliseconds(200));
      ps.stop();
      std::cout << ps.requests() << " requests answered\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "mapd: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
