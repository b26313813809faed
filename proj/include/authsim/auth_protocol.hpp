#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace authsim::protocol {

// Opaque token. No cryptography is modeled: a certificate is a tag computed
// over its bound fields with the issuing realm's secret, and verification is
// recomputation plus comparison.
using Token = std::string;

struct Credential {
  std::string user_id;
  std::string realm;
  Token root_key;       // ID_r, cloud membership key
  Token subdomain_key;  // ID_s, sub-domain membership
  Token certificate;    // empty when the user has none to present
};

// A security realm able to enroll users and issue certificates for them.
class Realm {
 public:
  Realm(std::string name, std::uint64_t issuer_secret);

  const std::string& name() const noexcept { return name_; }

  // Fresh root/sub-domain keys and a certificate bound to them.
  Credential enroll(const std::string& user_id, std::mt19937_64& rng) const;

  // Recomputes the certificate tag for the credential's current fields.
  Token seal(const Credential& c) const;

  std::uint64_t issuer_secret() const noexcept { return secret_; }

 private:
  std::string name_;
  std::uint64_t secret_;
};

enum class MessageKind {
  access_request,      // 1  U -> F
  identity_request,    // 2  F -> U
  certificate,         // 3  U -> F
  session_request,     // 4  F -> SAC
  verify_identity,     // 5  SAC -> SAC-DB
  session_grant,       // 6  SAC -> cloud CA
  registry_reply,      // 7  cloud CA -> SAC
  session_approval,    // 8  SAC -> F
  session_granted,     // 9  F -> U
};

std::string to_string(MessageKind kind);

struct TranscriptStep {
  int step = 0;  // 1..9
  std::string sender;
  std::string receiver;
  MessageKind kind{};
  bool ok = true;  // false for the message that carried a denial
};

enum class Outcome { granted, denied, parameter_error };

std::string to_string(Outcome outcome);

struct ProtocolTranscript {
  std::vector<TranscriptStep> steps;
  int flag = 0;
  Outcome outcome = Outcome::denied;
  std::string session_id;   // empty if none was generated
  Token session_key;        // ID_sess, empty unless granted
  std::string reason;       // why the run was denied

  void add(int step, std::string sender, std::string receiver, MessageKind kind, bool ok = true);
  int last_step() const noexcept { return steps.empty() ? 0 : steps.back().step; }
  // Every step 1..9 present, in non-decreasing order.
  bool complete() const;
};

enum class SessionStatus { pending, granted, denied };

struct SessionRecord {
  std::string session_id;
  Token session_key;
  std::string user_id;
  std::set<std::string> target_clouds;
  SessionStatus status = SessionStatus::pending;
};

// Certificate authority of one IoT cloud, holding its session registry.
// Registry mutation is serialized.
class CloudCa {
 public:
  explicit CloudCa(std::string name, bool acknowledges = true);

  const std::string& name() const noexcept { return name_; }
  void set_acknowledges(bool ack) noexcept { acknowledges_ = ack; }

  // Stores (session_id, key) and returns true, or refuses and stores nothing.
  bool store(const std::string& session_id, const std::string& user_id, const Token& key);
  void erase(const std::string& session_id);

  bool contains(const std::string& session_id) const;
  std::optional<Token> key_for(const std::string& session_id) const;
  std::size_t registry_size() const;

 private:
  std::string name_;
  std::atomic<bool> acknowledges_;
  mutable std::mutex mutex_;
  std::map<std::string, std::pair<std::string, Token>> registry_;
};

struct IdentityEntry {
  std::string realm;
  Token root_key;
  Token subdomain_key;
};

// SAC-side trust configuration and identity database.
struct TrustStore {
  std::set<std::string> trusted_principals;
  std::set<std::string> trusted_realms;
  std::map<std::string, IdentityEntry> identity_db;
  // Verification material per realm (issuer secret).
  std::map<std::string, std::uint64_t> realm_material;

  void register_realm(const Realm& realm, bool trusted);
  void register_user(const Credential& c);
};

// What the handler forwards in step 4.
struct SessionRequest {
  std::string session_id;
  Credential credential;
  std::vector<CloudCa*> targets;
};

struct Denial {
  std::string session_id;
  std::string sender;
  std::string reason;
};

// Session Authority Cloud.
class SessionAuthority {
 public:
  explicit SessionAuthority(TrustStore trust, std::uint64_t key_seed = 0x5ac);

  const TrustStore& trust() const noexcept { return trust_; }

  // Step 4 entry point: anything not sent by a trusted principal is rejected
  // before verification. Appends steps 5..8 (as far as they get) to the
  // transcript and returns the resulting record.
  SessionRecord handle_session_request(const SessionRequest& request, const std::string& sender,
                                       ProtocolTranscript& transcript);

  // Step 5. True iff the user is in the identity DB with matching keys, the
  // realm is trusted, and the certificate tag matches. No state change.
  bool verify_identity(const Credential& c) const;

  // Steps 6-7. Issues ID_sess, registers it locally and at every target.
  // All-or-nothing: one refusal rolls back every registry and yields a
  // denied record. Throws ParameterError for an empty target set.
  SessionRecord grant_session(const std::string& session_id, const std::string& user_id,
                              std::span<CloudCa* const> targets, ProtocolTranscript* transcript = nullptr);

  bool registry_contains(const std::string& session_id) const;
  std::size_t registry_size() const;
  std::vector<Denial> denials() const;

 private:
  void deny(const std::string& session_id, const std::string& sender, const std::string& reason);
  Token fresh_session_key();

  TrustStore trust_;
  mutable std::mutex mutex_;
  std::mt19937_64 key_rng_;
  std::set<Token> issued_keys_;
  std::map<std::string, SessionRecord> registry_;
  std::vector<Denial> denials_;
};

// Multiparty session handler F: the trusted principal in front of the SAC.
class SessionHandler {
 public:
  SessionHandler(std::string principal_id, SessionAuthority& sac);

  const std::string& principal_id() const noexcept { return id_; }

  // Steps 1-3. Returns the presented credential once it passes structural
  // checks and a fresh session id has been allocated; std::nullopt on denial
  // (flag 0 recorded in the transcript).
  std::optional<Credential> request_access(const Credential& user, bool presents_certificate,
                                           ProtocolTranscript& transcript);

  // Step 4.
  SessionRecord forward_session_request(const Credential& cert, std::span<CloudCa* const> targets,
                                        ProtocolTranscript& transcript);

 private:
  std::string next_session_id();

  std::string id_;
  SessionAuthority& sac_;
  std::mutex mutex_;
  std::uint64_t counter_ = 0;
};

// Full nine-step run. flag = 1 only on a granted session.
ProtocolTranscript run_protocol(const Credential& user, std::span<CloudCa* const> targets, SessionHandler& handler,
                                bool presents_certificate = true);

// Exhaustive small-model check over realms x principals x certificate state
// x cloud behavior (plus one empty-target case).
struct FixtureRealm {
  std::string name;
  bool trusted = false;
};

struct FixturePrincipal {
  std::string name;
  bool trusted = false;
};

struct ProtocolFixture {
  std::vector<FixtureRealm> realms{{"Cloud_C", true}, {"Cloud_X", false}};
  std::vector<FixturePrincipal> principals{{"F", true}, {"F_rogue", false}};
  std::vector<std::string> target_clouds{"Cloud_A", "Cloud_B"};
  bool include_empty_target_case = true;
  std::uint64_t seed = 7;
};

struct CaseResult {
  std::string realm;
  std::string principal;
  bool realm_trusted = false;
  bool principal_trusted = false;
  bool certificate_intact = true;
  bool clouds_ack = true;
  bool empty_targets = false;
  Outcome expected = Outcome::denied;
  Outcome observed = Outcome::denied;
  int flag = 0;
  bool registry_leak = false;  // a cloud registry holds the session after a denial
  bool transcript_ok = true;

  bool passed() const noexcept {
    return expected == observed && !registry_leak && transcript_ok;
  }
};

std::vector<CaseResult> run_exhaustive_check(const ProtocolFixture& fixture = {});

}  // namespace authsim::protocol
