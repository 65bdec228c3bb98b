// Copyright 2026 The tlsmbt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Symbolic TLS 1.3 handshake messages. Cryptographic material is replaced by
// small tokens so that the handshake state space stays finite.

#ifndef TLSMBT_MESSAGES_H_
#define TLSMBT_MESSAGES_H_

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tlsmbt::messages {

enum class ProtocolVersion : std::uint8_t { TLS12, TLS13 };

enum class AlertLevel : std::uint8_t { warning, fatal };

// `undefined` is only an initializer; it never appears in an emitted alert.
enum class AlertType : std::uint8_t {
  missing_extension,
  unexpected_message,
  unsupported_certificate,
  illegal_parameter,
  handshake_failure,
  decode_error,
  undefined,
};

enum class ExtensionType : std::uint8_t {
  server_name,
  max_fragment_length,
  status_request,
  supported_groups,
  signature_algorithms,
  use_srtp,
  heartbeat,
  application_layer_protocol_negotiation,
  signed_certificate_timestamp,
  certificate_type,
  padding,
  pre_shared_key,
  early_data,
  supported_versions,
  cookie,
  psk_key_exchange_modes,
  certificate_authorities,
  oid_filters,
  post_handshake_auth,
  signature_algorithms_cert,
  key_share,
};
inline constexpr std::size_t kExtensionTypeCount = 21;

enum class KeyShareToken : std::uint8_t {
  valid_share,
  invalid_share,
  corrected_share,
};

enum class CipherSuite : std::uint8_t {
  TLS_AES_128_GCM_SHA256,
  TLS_AES_256_GCM_SHA384,
  TLS_CHACHA20_POLY1305_SHA256,
};

// Extension data. Only 9 of the 21 extension types carry data; the last
// four constructors hold an opaque payload id.
struct SupportedVersions {
  std::vector<ProtocolVersion> versions;
  auto operator<=>(const SupportedVersions&) const = default;
};
struct Cookie {
  std::uint32_t token = 0;
  auto operator<=>(const Cookie&) const = default;
};
struct KeyShare {
  KeyShareToken share = KeyShareToken::valid_share;
  auto operator<=>(const KeyShare&) const = default;
};
struct SignatureAlgorithms {
  std::vector<std::uint16_t> algorithms;
  auto operator<=>(const SignatureAlgorithms&) const = default;
};
struct CertificateType {
  std::uint32_t type_id = 0;
  auto operator<=>(const CertificateType&) const = default;
};
template <ExtensionType kType>
struct OpaqueExtension {
  std::uint32_t payload = 0;
  auto operator<=>(const OpaqueExtension&) const = default;
};
using SupportedGroups = OpaqueExtension<ExtensionType::supported_groups>;
using ServerName = OpaqueExtension<ExtensionType::server_name>;
using MaxFragmentLength = OpaqueExtension<ExtensionType::max_fragment_length>;
using PreSharedKey = OpaqueExtension<ExtensionType::pre_shared_key>;

using ExtensionData =
    std::variant<SupportedVersions, Cookie, KeyShare, SignatureAlgorithms,
                 CertificateType, SupportedGroups, ServerName,
                 MaxFragmentLength, PreSharedKey>;
inline constexpr std::size_t kExtensionDataConstructorCount =
    std::variant_size_v<ExtensionData>;

// The extension type each data constructor belongs to.
ExtensionType extension_type_of(const ExtensionData& data);

struct Extension {
  ExtensionType extension_type = ExtensionType::supported_versions;
  ExtensionData extension_data;
  auto operator<=>(const Extension&) const = default;
};

Extension make_extension(ExtensionData data);

struct CryptoInfo {
  ProtocolVersion version = ProtocolVersion::TLS13;
  CipherSuite cipher_suite = CipherSuite::TLS_AES_128_GCM_SHA256;
  KeyShareToken key_share = KeyShareToken::valid_share;
  std::vector<Extension> extensions;
  auto operator<=>(const CryptoInfo&) const = default;

  bool has_extension(ExtensionType type) const;
};

struct ClientHello {
  CryptoInfo crypto;
  auto operator<=>(const ClientHello&) const = default;
};
struct ServerHello {
  CryptoInfo crypto;
  auto operator<=>(const ServerHello&) const = default;
};
// Same field shape as ServerHello.
struct HelloRetryRequest {
  CryptoInfo crypto;
  auto operator<=>(const HelloRetryRequest&) const = default;
};
struct EncryptedExtensions {
  std::vector<Extension> extensions;
  auto operator<=>(const EncryptedExtensions&) const = default;
};
struct CertificateRequest {
  std::uint32_t request_id = 0;
  std::vector<Extension> extensions;
  auto operator<=>(const CertificateRequest&) const = default;
};
struct CertificateServer {
  std::uint32_t cert_id = 0;
  auto operator<=>(const CertificateServer&) const = default;
};
// An empty client certificate (no cert_id) is legal.
struct CertificateClient {
  std::optional<std::uint32_t> cert_id;
  auto operator<=>(const CertificateClient&) const = default;
};
struct CertificateVerifyServer {
  std::uint32_t signature_id = 0;
  auto operator<=>(const CertificateVerifyServer&) const = default;
};
struct CertificateVerifyClient {
  std::uint32_t signature_id = 0;
  auto operator<=>(const CertificateVerifyClient&) const = default;
};
struct FinishedServer {
  std::uint32_t mac_id = 0;
  auto operator<=>(const FinishedServer&) const = default;
};
struct FinishedClient {
  std::uint32_t mac_id = 0;
  auto operator<=>(const FinishedClient&) const = default;
};
struct Alert {
  AlertLevel level = AlertLevel::fatal;
  AlertType description = AlertType::undefined;
  auto operator<=>(const Alert&) const = default;
};

// Alternative order defines the Gate numbering below.
using HandshakeMessage =
    std::variant<ClientHello, ServerHello, HelloRetryRequest,
                 EncryptedExtensions, CertificateRequest, CertificateServer,
                 CertificateClient, CertificateVerifyServer,
                 CertificateVerifyClient, FinishedServer, FinishedClient,
                 Alert>;

enum class Gate : std::uint8_t {
  CLIENTHELLO,
  SERVERHELLO,
  HELLORETRYREQUEST,
  ENCRYPTEDEXTENSIONS,
  CERTIFICATEREQUEST,
  CERTIFICATE_S,
  CERTIFICATE_C,
  CERTIFICATEVERIFY_S,
  CERTIFICATEVERIFY_C,
  FINISHED_S,
  FINISHED_C,
  ALERT,
};
inline constexpr std::size_t kGateCount = 12;
static_assert(std::variant_size_v<HandshakeMessage> == kGateCount);

Gate gate_of(const HandshakeMessage& m);
std::string_view gate_name(Gate gate);
std::optional<Gate> gate_from_name(std::string_view name);
std::array<Gate, kGateCount> all_gates();
// Gates whose messages only the server sends.
bool is_server_only(Gate gate);
bool is_client_only(Gate gate);

enum class Sender : std::uint8_t { client, server };

// The tester plays the client: everything the client sends is a stimulus.
enum class Direction : std::uint8_t { stimulus, observation, internal };

// A transition label. For labels read from foreign tooling the payload is
// absent and `gate` holds the raw token.
struct ActionLabel {
  std::string gate;
  Direction direction = Direction::observation;
  std::optional<HandshakeMessage> payload;

  auto operator<=>(const ActionLabel&) const = default;

  // `GATE`, or `ALERT(description)` for alerts.
  std::string text() const;
  bool is_handshake() const { return payload.has_value(); }
};

enum class ValidationErrorCode : std::uint8_t {
  alert_undefined,
  duplicate_extension,
  extension_mismatch,
  missing_supported_versions,
};

struct ValidationError {
  ValidationErrorCode code;
  std::string detail;
};

class InvalidMessage : public std::invalid_argument {
 public:
  explicit InvalidMessage(ValidationError error);
  const ValidationError& error() const { return error_; }

 private:
  ValidationError error_;
};

bool crypto_info_equal(const CryptoInfo& a, const CryptoInfo& b);

// Returns the first violated invariant, or nullopt if `m` is well formed.
std::optional<ValidationError> validate_message(const HandshakeMessage& m);

// Throws InvalidMessage if `m` does not validate.
ActionLabel label_of(const HandshakeMessage& m, Sender sender);

std::string_view to_string(ProtocolVersion v);
std::string_view to_string(AlertLevel v);
std::string_view to_string(AlertType v);
std::string_view to_string(ExtensionType v);
std::string_view to_string(KeyShareToken v);
std::string_view to_string(CipherSuite v);
std::string_view to_string(ValidationErrorCode v);
std::string_view to_string(Direction v);

std::optional<ProtocolVersion> protocol_version_from_string(std::string_view s);
std::optional<AlertLevel> alert_level_from_string(std::string_view s);
std::optional<AlertType> alert_type_from_string(std::string_view s);
std::optional<ExtensionType> extension_type_from_string(std::string_view s);
std::optional<KeyShareToken> key_share_from_string(std::string_view s);
std::optional<CipherSuite> cipher_suite_from_string(std::string_view s);

}  // namespace tlsmbt::messages

#endif  // TLSMBT_MESSAGES_H_
