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

#include "tlsmbt/messages.h"

#include <algorithm>
#include <set>
#include <type_traits>
#include <utility>

namespace tlsmbt::messages {
namespace {

constexpr std::array<std::string_view, 2> kVersionNames = {"TLS12", "TLS13"};
constexpr std::array<std::string_view, 2> kLevelNames = {"warning", "fatal"};
constexpr std::array<std::string_view, 7> kAlertNames = {
    "missing_extension", "unexpected_message", "unsupported_certificate",
    "illegal_parameter", "handshake_failure",  "decode_error",
    "undefined"};
constexpr std::array<std::string_view, kExtensionTypeCount> kExtensionNames = {
    "server_name",
    "max_fragment_length",
    "status_request",
    "supported_groups",
    "signature_algorithms",
    "use_srtp",
    "heartbeat",
    "application_layer_protocol_negotiation",
    "signed_certificate_timestamp",
    "certificate_type",
    "padding",
    "pre_shared_key",
    "early_data",
    "supported_versions",
    "cookie",
    "psk_key_exchange_modes",
    "certificate_authorities",
    "oid_filters",
    "post_handshake_auth",
    "signature_algorithms_cert",
    "key_share"};
constexpr std::array<std::string_view, 3> kShareNames = {
    "valid_share", "invalid_share", "corrected_share"};
constexpr std::array<std::string_view, 3> kSuiteNames = {
    "TLS_AES_128_GCM_SHA256", "TLS_AES_256_GCM_SHA384",
    "TLS_CHACHA20_POLY1305_SHA256"};
constexpr std::array<std::string_view, kGateCount> kGateNames = {
    "CLIENTHELLO",         "SERVERHELLO",         "HELLORETRYREQUEST",
    "ENCRYPTEDEXTENSIONS", "CERTIFICATEREQUEST",  "CERTIFICATE_S",
    "CERTIFICATE_C",       "CERTIFICATEVERIFY_S", "CERTIFICATEVERIFY_C",
    "FINISHED_S",          "FINISHED_C",          "ALERT"};

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names,
                           std::string_view s) {
  auto it = std::find(names.begin(), names.end(), s);
  if (it == names.end()) return std::nullopt;
  return static_cast<Enum>(it - names.begin());
}

template <typename Enum, std::size_t N>
std::string_view name_of(const std::array<std::string_view, N>& names,
                         Enum e) {
  return names.at(static_cast<std::size_t>(e));
}

template <typename T>
struct ExtensionTypeFor;
template <>
struct ExtensionTypeFor<SupportedVersions> {
  static constexpr ExtensionType value = ExtensionType::supported_versions;
};
template <>
struct ExtensionTypeFor<Cookie> {
  static constexpr ExtensionType value = ExtensionType::cookie;
};
template <>
struct ExtensionTypeFor<KeyShare> {
  static constexpr ExtensionType value = ExtensionType::key_share;
};
template <>
struct ExtensionTypeFor<SignatureAlgorithms> {
  static constexpr ExtensionType value = ExtensionType::signature_algorithms;
};
template <>
struct ExtensionTypeFor<CertificateType> {
  static constexpr ExtensionType value = ExtensionType::certificate_type;
};
template <ExtensionType kType>
struct ExtensionTypeFor<OpaqueExtension<kType>> {
  static constexpr ExtensionType value = kType;
};

std::optional<ValidationError> validate_extensions(
    const std::vector<Extension>& extensions) {
  std::set<ExtensionType> seen;
  for (const Extension& e : extensions) {
    if (extension_type_of(e.extension_data) != e.extension_type) {
      return ValidationError{ValidationErrorCode::extension_mismatch,
                             std::string(to_string(e.extension_type))};
    }
    if (!seen.insert(e.extension_type).second) {
      return ValidationError{ValidationErrorCode::duplicate_extension,
                             std::string(to_string(e.extension_type))};
    }
  }
  return std::nullopt;
}

std::vector<Extension> sorted(std::vector<Extension> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

ExtensionType extension_type_of(const ExtensionData& data) {
  return std::visit(
      [](const auto& d) {
        return ExtensionTypeFor<std::decay_t<decltype(d)>>::value;
      },
      data);
}

Extension make_extension(ExtensionData data) {
  ExtensionType type = extension_type_of(data);
  return Extension{type, std::move(data)};
}

bool CryptoInfo::has_extension(ExtensionType type) const {
  return std::any_of(extensions.begin(), extensions.end(),
                     [type](const Extension& e) {
                       return e.extension_type == type;
                     });
}

InvalidMessage::InvalidMessage(ValidationError error)
    : std::invalid_argument("invalid message: " +
                            std::string(to_string(error.code)) +
                            (error.detail.empty() ? "" : " (" + error.detail +
                                                             ")")),
      error_(std::move(error)) {}

bool crypto_info_equal(const CryptoInfo& a, const CryptoInfo& b) {
  return a.version == b.version && a.cipher_suite == b.cipher_suite &&
         a.key_share == b.key_share &&
         sorted(a.extensions) == sorted(b.extensions);
}

std::optional<ValidationError> validate_message(const HandshakeMessage& m) {
  return std::visit(
      [](const auto& msg) -> std::optional<ValidationError> {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, Alert>) {
          if (msg.description == AlertType::undefined) {
            return ValidationError{ValidationErrorCode::alert_undefined, ""};
          }
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, ClientHello>) {
          if (auto err = validate_extensions(msg.crypto.extensions)) return err;
          if (!msg.crypto.has_extension(ExtensionType::supported_versions)) {
            return ValidationError{
                ValidationErrorCode::missing_supported_versions, ""};
          }
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, ServerHello> ||
                             std::is_same_v<T, HelloRetryRequest>) {
          return validate_extensions(msg.crypto.extensions);
        } else if constexpr (std::is_same_v<T, EncryptedExtensions> ||
                             std::is_same_v<T, CertificateRequest>) {
          return validate_extensions(msg.extensions);
        } else {
          return std::nullopt;
        }
      },
      m);
}

Gate gate_of(const HandshakeMessage& m) { return static_cast<Gate>(m.index()); }

std::string_view gate_name(Gate gate) { return name_of(kGateNames, gate); }

std::optional<Gate> gate_from_name(std::string_view name) {
  return lookup<Gate>(kGateNames, name);
}

std::array<Gate, kGateCount> all_gates() {
  std::array<Gate, kGateCount> gates{};
  for (std::size_t i = 0; i < kGateCount; ++i) gates[i] = static_cast<Gate>(i);
  return gates;
}

bool is_server_only(Gate gate) {
  switch (gate) {
    case Gate::SERVERHELLO:
    case Gate::HELLORETRYREQUEST:
    case Gate::ENCRYPTEDEXTENSIONS:
    case Gate::CERTIFICATEREQUEST:
    case Gate::CERTIFICATE_S:
    case Gate::CERTIFICATEVERIFY_S:
    case Gate::FINISHED_S:
      return true;
    default:
      return false;
  }
}

bool is_client_only(Gate gate) {
  switch (gate) {
    case Gate::CLIENTHELLO:
    case Gate::CERTIFICATE_C:
    case Gate::CERTIFICATEVERIFY_C:
    case Gate::FINISHED_C:
      return true;
    default:
      return false;
  }
}

std::string ActionLabel::text() const {
  if (payload) {
    if (const auto* alert = std::get_if<Alert>(&*payload)) {
      return gate + "(" + std::string(to_string(alert->description)) + ")";
    }
  }
  return gate;
}

ActionLabel label_of(const HandshakeMessage& m, Sender sender) {
  if (auto err = validate_message(m)) throw InvalidMessage(std::move(*err));
  Gate gate = gate_of(m);
  Direction direction = sender == Sender::client && !is_server_only(gate)
                            ? Direction::stimulus
                            : Direction::observation;
  return ActionLabel{std::string(gate_name(gate)), direction, m};
}

std::string_view to_string(ProtocolVersion v) { return name_of(kVersionNames, v); }
std::string_view to_string(AlertLevel v) { return name_of(kLevelNames, v); }
std::string_view to_string(AlertType v) { return name_of(kAlertNames, v); }
std::string_view to_string(ExtensionType v) {
  return name_of(kExtensionNames, v);
}
std::string_view to_string(KeyShareToken v) { return name_of(kShareNames, v); }
std::string_view to_string(CipherSuite v) { return name_of(kSuiteNames, v); }

std::string_view to_string(ValidationErrorCode v) {
  switch (v) {
    case ValidationErrorCode::alert_undefined:
      return "alert-undefined";
    case ValidationErrorCode::duplicate_extension:
      return "duplicate-extension";
    case ValidationErrorCode::extension_mismatch:
      return "extension-mismatch";
    case ValidationErrorCode::missing_supported_versions:
      return "missing-supported-versions";
  }
  return "unknown";
}

std::string_view to_string(Direction v) {
  switch (v) {
    case Direction::stimulus:
      return "stimulus";
    case Direction::observation:
      return "observation";
    case Direction::internal:
      return "internal";
  }
  return "unknown";
}

std::optional<ProtocolVersion> protocol_version_from_string(std::string_view s) {
  return lookup<ProtocolVersion>(kVersionNames, s);
}
std::optional<AlertLevel> alert_level_from_string(std::string_view s) {
  return lookup<AlertLevel>(kLevelNames, s);
}
std::optional<AlertType> alert_type_from_string(std::string_view s) {
  return lookup<AlertType>(kAlertNames, s);
}
std::optional<ExtensionType> extension_type_from_string(std::string_view s) {
  return lookup<ExtensionType>(kExtensionNames, s);
}
std::optional<KeyShareToken> key_share_from_string(std::string_view s) {
  return lookup<KeyShareToken>(kShareNames, s);
}
std::optional<CipherSuite> cipher_suite_from_string(std::string_view s) {
  return lookup<CipherSuite>(kSuiteNames, s);
}

}  // namespace tlsmbt::messages
