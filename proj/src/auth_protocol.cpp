#include "authsim/auth_protocol.hpp"

#include <algorithm>
#include <memory>

#include <fmt/format.h>

#include "authsim/errors.hpp"

namespace authsim::protocol {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a(std::uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

Token random_token(std::mt19937_64& rng) { return fmt::format("{:016x}{:016x}", rng(), rng()); }

const std::string kUser = "U_A";
const std::string kSac = "SAC";
const std::string kSacDb = "SAC-DB-SH";

}  // namespace

std::string to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::access_request: return "access_request";
    case MessageKind::identity_request: return "identity_request";
    case MessageKind::certificate: return "certificate";
    case MessageKind::session_request: return "session_request";
    case MessageKind::verify_identity: return "verify_identity";
    case MessageKind::session_grant: return "session_grant";
    case MessageKind::registry_reply: return "registry_reply";
    case MessageKind::session_approval: return "session_approval";
    case MessageKind::session_granted: return "session_granted";
  }
  return "unknown";
}

std::string to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::granted: return "granted";
    case Outcome::denied: return "denied";
    case Outcome::parameter_error: return "parameter_error";
  }
  return "unknown";
}

Realm::Realm(std::string name, std::uint64_t issuer_secret) : name_(std::move(name)), secret_(issuer_secret) {}

Token Realm::seal(const Credential& c) const {
  // Each field is prefixed with its length so that shifting bytes between
  // adjacent fields changes the tag.
  std::uint64_t h = fnv1a(kFnvOffset, fmt::format("{:016x}", secret_));
  for (std::string_view field : {std::string_view(c.user_id), std::string_view(c.realm),
                                 std::string_view(c.root_key), std::string_view(c.subdomain_key)}) {
    h = fnv1a(h, fmt::format("{}:", field.size()));
    h = fnv1a(h, field);
  }
  const std::uint64_t h2 = fnv1a(h ^ secret_, "cert");
  return fmt::format("cert-{:016x}{:016x}", h, h2);
}

Credential Realm::enroll(const std::string& user_id, std::mt19937_64& rng) const {
  Credential c;
  c.user_id = user_id;
  c.realm = name_;
  c.root_key = random_token(rng);
  c.subdomain_key = random_token(rng);
  c.certificate = seal(c);
  return c;
}

void ProtocolTranscript::add(int step, std::string sender, std::string receiver, MessageKind kind, bool ok) {
  steps.push_back(TranscriptStep{step, std::move(sender), std::move(receiver), kind, ok});
}

bool ProtocolTranscript::complete() const {
  int expected = 1;
  int prev = 0;
  for (const auto& s : steps) {
    if (s.step < prev || !s.ok) return false;
    if (s.step == expected) ++expected;
    prev = s.step;
  }
  return expected == 10;
}

CloudCa::CloudCa(std::string name, bool acknowledges) : name_(std::move(name)), acknowledges_(acknowledges) {}

bool CloudCa::store(const std::string& session_id, const std::string& user_id, const Token& key) {
  if (!acknowledges_) return false;
  std::lock_guard lock(mutex_);
  registry_[session_id] = {user_id, key};
  return true;
}

void CloudCa::erase(const std::string& session_id) {
  std::lock_guard lock(mutex_);
  registry_.erase(session_id);
}

bool CloudCa::contains(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  return registry_.contains(session_id);
}

std::optional<Token> CloudCa::key_for(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  auto it = registry_.find(session_id);
  if (it == registry_.end()) return std::nullopt;
  return it->second.second;
}

std::size_t CloudCa::registry_size() const {
  std::lock_guard lock(mutex_);
  return registry_.size();
}

void TrustStore::register_realm(const Realm& realm, bool trusted) {
  realm_material[realm.name()] = realm.issuer_secret();
  if (trusted) trusted_realms.insert(realm.name());
}

void TrustStore::register_user(const Credential& c) {
  identity_db[c.user_id] = IdentityEntry{c.realm, c.root_key, c.subdomain_key};
}

SessionAuthority::SessionAuthority(TrustStore trust, std::uint64_t key_seed)
    : trust_(std::move(trust)), key_rng_(key_seed) {}

bool SessionAuthority::verify_identity(const Credential& c) const {
  if (c.certificate.empty()) return false;
  auto entry = trust_.identity_db.find(c.user_id);
  if (entry == trust_.identity_db.end()) return false;
  const IdentityEntry& known = entry->second;
  if (known.realm != c.realm || known.root_key != c.root_key || known.subdomain_key != c.subdomain_key) {
    return false;
  }
  if (!trust_.trusted_realms.contains(c.realm)) return false;
  auto material = trust_.realm_material.find(c.realm);
  if (material == trust_.realm_material.end()) return false;
  return Realm(c.realm, material->second).seal(c) == c.certificate;
}

Token SessionAuthority::fresh_session_key() {
  Token key;
  do {
    key = "sess-key-" + random_token(key_rng_);
  } while (!issued_keys_.insert(key).second);
  return key;
}

void SessionAuthority::deny(const std::string& session_id, const std::string& sender, const std::string& reason) {
  std::lock_guard lock(mutex_);
  denials_.push_back(Denial{session_id, sender, reason});
}

SessionRecord SessionAuthority::grant_session(const std::string& session_id, const std::string& user_id,
                                              std::span<CloudCa* const> targets, ProtocolTranscript* transcript) {
  if (targets.empty()) throw ParameterError("grant_session: empty target cloud set");
  if (std::any_of(targets.begin(), targets.end(), [](const CloudCa* c) { return c == nullptr; })) {
    throw ParameterError("grant_session: null target cloud");
  }

  SessionRecord record;
  record.session_id = session_id;
  record.user_id = user_id;
  for (const CloudCa* cloud : targets) record.target_clouds.insert(cloud->name());

  std::unique_lock lock(mutex_);
  if (registry_.contains(session_id)) throw ParameterError(fmt::format("session id {} already registered", session_id));
  record.session_key = fresh_session_key();
  registry_[session_id] = record;

  if (transcript) {
    for (const CloudCa* cloud : targets) transcript->add(6, kSac, cloud->name(), MessageKind::session_grant);
  }
  std::vector<CloudCa*> stored;
  for (CloudCa* cloud : targets) {
    const bool ack = cloud->store(session_id, user_id, record.session_key);
    if (transcript) transcript->add(7, cloud->name(), kSac, MessageKind::registry_reply, ack);
    if (!ack) {
      for (CloudCa* done : stored) done->erase(session_id);
      registry_.erase(session_id);
      lock.unlock();
      record.status = SessionStatus::denied;
      record.session_key.clear();
      deny(session_id, kSac, fmt::format("cloud {} refused the session", cloud->name()));
      return record;
    }
    stored.push_back(cloud);
  }
  record.status = SessionStatus::granted;
  registry_[session_id] = record;
  return record;
}

SessionRecord SessionAuthority::handle_session_request(const SessionRequest& request, const std::string& sender,
                                                       ProtocolTranscript& transcript) {
  SessionRecord denied;
  denied.session_id = request.session_id;
  denied.user_id = request.credential.user_id;
  denied.status = SessionStatus::denied;

  if (!trust_.trusted_principals.contains(sender)) {
    transcript.reason = fmt::format("request not forwarded by a trusted principal (sender {})", sender);
    deny(request.session_id, sender, transcript.reason);
    return denied;
  }
  if (request.targets.empty()) throw ParameterError("session request names no target clouds");

  const bool verified = verify_identity(request.credential);
  transcript.add(5, kSac, kSacDb, MessageKind::verify_identity, verified);
  if (!verified) {
    transcript.reason = fmt::format("identity of {} not verified", request.credential.user_id);
    deny(request.session_id, sender, transcript.reason);
    return denied;
  }

  SessionRecord record = grant_session(request.session_id, request.credential.user_id, request.targets, &transcript);
  if (record.status != SessionStatus::granted) {
    transcript.reason = "a target cloud refused the session";
    return record;
  }
  transcript.add(8, kSac, sender, MessageKind::session_approval);
  return record;
}

bool SessionAuthority::registry_contains(const std::string& session_id) const {
  std::lock_guard lock(mutex_);
  return registry_.contains(session_id);
}

std::size_t SessionAuthority::registry_size() const {
  std::lock_guard lock(mutex_);
  return registry_.size();
}

std::vector<Denial> SessionAuthority::denials() const {
  std::lock_guard lock(mutex_);
  return denials_;
}

SessionHandler::SessionHandler(std::string principal_id, SessionAuthority& sac)
    : id_(std::move(principal_id)), sac_(sac) {}

std::string SessionHandler::next_session_id() {
  std::lock_guard lock(mutex_);
  return fmt::format("{}/session-{}", id_, ++counter_);
}

std::optional<Credential> SessionHandler::request_access(const Credential& user, bool presents_certificate,
                                                         ProtocolTranscript& transcript) {
  transcript.add(1, kUser, id_, MessageKind::access_request);
  transcript.add(2, id_, kUser, MessageKind::identity_request);
  if (!presents_certificate) {
    transcript.flag = 0;
    transcript.outcome = Outcome::denied;
    transcript.reason = "user did not present a certificate";
    return std::nullopt;
  }
  // Only structural checks happen here; verification belongs to the SAC.
  const bool well_formed = !user.user_id.empty() && !user.realm.empty() && !user.certificate.empty();
  transcript.add(3, kUser, id_, MessageKind::certificate, well_formed);
  if (!well_formed) {
    transcript.flag = 0;
    transcript.outcome = Outcome::denied;
    transcript.reason = "certificate missing or malformed";
    return std::nullopt;
  }
  transcript.session_id = next_session_id();
  return user;
}

SessionRecord SessionHandler::forward_session_request(const Credential& cert, std::span<CloudCa* const> targets,
                                                      ProtocolTranscript& transcript) {
  if (transcript.session_id.empty()) transcript.session_id = next_session_id();
  transcript.add(4, id_, kSac, MessageKind::session_request);
  SessionRequest request{transcript.session_id, cert, {targets.begin(), targets.end()}};
  return sac_.handle_session_request(request, id_, transcript);
}

ProtocolTranscript run_protocol(const Credential& user, std::span<CloudCa* const> targets, SessionHandler& handler,
                                bool presents_certificate) {
  ProtocolTranscript transcript;
  if (targets.empty()) {
    transcript.outcome = Outcome::parameter_error;
    transcript.reason = "no target clouds requested";
    return transcript;
  }
  std::optional<Credential> cert = handler.request_access(user, presents_certificate, transcript);
  if (!cert) return transcript;

  SessionRecord record = handler.forward_session_request(*cert, targets, transcript);
  if (record.status != SessionStatus::granted) {
    transcript.flag = 0;
    transcript.outcome = Outcome::denied;
    return transcript;
  }
  transcript.add(9, handler.principal_id(), kUser, MessageKind::session_granted);
  transcript.flag = 1;
  transcript.outcome = Outcome::granted;
  transcript.session_key = record.session_key;
  return transcript;
}

std::vector<CaseResult> run_exhaustive_check(const ProtocolFixture& fixture) {
  std::mt19937_64 rng(fixture.seed);
  std::vector<Realm> realms;
  TrustStore trust;
  for (const auto& r : fixture.realms) {
    realms.emplace_back(r.name, rng());
    trust.register_realm(realms.back(), r.trusted);
  }
  for (const auto& p : fixture.principals) {
    if (p.trusted) trust.trusted_principals.insert(p.name);
  }
  // One enrolled user per realm, all registered with the SAC.
  std::vector<Credential> users;
  for (const Realm& realm : realms) {
    users.push_back(realm.enroll("user@" + realm.name(), rng));
    trust.register_user(users.back());
  }

  SessionAuthority sac(trust, rng());
  std::vector<std::unique_ptr<SessionHandler>> handlers;
  for (const auto& p : fixture.principals) handlers.push_back(std::make_unique<SessionHandler>(p.name, sac));
  std::vector<std::unique_ptr<CloudCa>> clouds;
  std::vector<CloudCa*> targets;
  for (const auto& name : fixture.target_clouds) {
    clouds.push_back(std::make_unique<CloudCa>(name));
    targets.push_back(clouds.back().get());
  }

  auto leaked = [&](const std::string& session_id) {
    if (session_id.empty()) return false;
    return std::any_of(clouds.begin(), clouds.end(), [&](const auto& c) { return c->contains(session_id); });
  };

  std::vector<CaseResult> results;
  for (std::size_t ri = 0; ri < fixture.realms.size(); ++ri) {
    for (std::size_t pi = 0; pi < fixture.principals.size(); ++pi) {
      for (bool intact : {true, false}) {
        for (bool ack : {true, false}) {
          CaseResult cr;
          cr.realm = fixture.realms[ri].name;
          cr.principal = fixture.principals[pi].name;
          cr.realm_trusted = fixture.realms[ri].trusted;
          cr.principal_trusted = fixture.principals[pi].trusted;
          cr.certificate_intact = intact;
          cr.clouds_ack = ack;
          cr.expected = (cr.realm_trusted && cr.principal_trusted && intact && ack) ? Outcome::granted
                                                                                    : Outcome::denied;

          Credential cred = users[ri];
          if (!intact) cred.subdomain_key.back() = cred.subdomain_key.back() == '0' ? '1' : '0';
          for (auto& c : clouds) c->set_acknowledges(ack);

          ProtocolTranscript t = run_protocol(cred, targets, *handlers[pi]);
          cr.observed = t.outcome;
          cr.flag = t.flag;
          cr.registry_leak = t.flag == 0 && leaked(t.session_id);
          cr.transcript_ok = t.flag == 1 ? t.complete() : t.last_step() < 9;
          results.push_back(cr);
        }
      }
    }
  }

  if (fixture.include_empty_target_case && !fixture.realms.empty() && !fixture.principals.empty()) {
    for (auto& c : clouds) c->set_acknowledges(true);
    CaseResult cr;
    cr.realm = fixture.realms.front().name;
    cr.principal = fixture.principals.front().name;
    cr.realm_trusted = fixture.realms.front().trusted;
    cr.principal_trusted = fixture.principals.front().trusted;
    cr.empty_targets = true;
    cr.expected = Outcome::parameter_error;
    ProtocolTranscript t = run_protocol(users.front(), {}, *handlers.front());
    cr.observed = t.outcome;
    cr.flag = t.flag;
    cr.registry_leak = leaked(t.session_id);
    cr.transcript_ok = t.steps.empty();
    results.push_back(cr);
  }
  return results;
}

}  // namespace authsim::protocol
