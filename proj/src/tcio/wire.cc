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

// Body grammar:
//   body      = GATE " {" [field *("," field)] "}"
//   field     = name "=" value
//   value     = atom | "[" [value *("," value)] "]"
//   extension = type ":" Constructor "(" value ")"

#include <cctype>
#include <charconv>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include "tlsmbt/tcio.h"

namespace tlsmbt::tcio {
namespace {

using namespace messages;

template <typename T>
constexpr std::string_view kConstructorName = "";
template <>
constexpr std::string_view kConstructorName<SupportedVersions> =
    "SupportedVersions";
template <>
constexpr std::string_view kConstructorName<Cookie> = "Cookie";
template <>
constexpr std::string_view kConstructorName<KeyShare> = "KeyShare";
template <>
constexpr std::string_view kConstructorName<SignatureAlgorithms> =
    "SignatureAlgorithms";
template <>
constexpr std::string_view kConstructorName<CertificateType> =
    "CertificateType";
template <>
constexpr std::string_view kConstructorName<SupportedGroups> =
    "SupportedGroups";
template <>
constexpr std::string_view kConstructorName<ServerName> = "ServerName";
template <>
constexpr std::string_view kConstructorName<MaxFragmentLength> =
    "MaxFragmentLength";
template <>
constexpr std::string_view kConstructorName<PreSharedKey> = "PreSharedKey";

// ---- encoding -------------------------------------------------------------

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& render) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ",";
    out += render(items[i]);
  }
  return out + "]";
}

std::string encode_data(const ExtensionData& data) {
  return std::visit(
      [](const auto& d) -> std::string {
        using T = std::decay_t<decltype(d)>;
        std::string arg;
        if constexpr (std::is_same_v<T, SupportedVersions>) {
          arg = join(d.versions,
                     [](ProtocolVersion v) { return std::string(to_string(v)); });
        } else if constexpr (std::is_same_v<T, Cookie>) {
          arg = std::to_string(d.token);
        } else if constexpr (std::is_same_v<T, KeyShare>) {
          arg = std::string(to_string(d.share));
        } else if constexpr (std::is_same_v<T, SignatureAlgorithms>) {
          arg = join(d.algorithms,
                     [](std::uint16_t a) { return std::to_string(a); });
        } else if constexpr (std::is_same_v<T, CertificateType>) {
          arg = std::to_string(d.type_id);
        } else {
          arg = std::to_string(d.payload);
        }
        return std::string(kConstructorName<T>) + "(" + arg + ")";
      },
      data);
}

std::string encode_extensions(const std::vector<Extension>& extensions) {
  return join(extensions, [](const Extension& e) {
    return std::string(to_string(e.extension_type)) + ":" +
           encode_data(e.extension_data);
  });
}

std::string encode_crypto(const CryptoInfo& c) {
  return "version=" + std::string(to_string(c.version)) +
         ",cipher_suite=" + std::string(to_string(c.cipher_suite)) +
         ",key_share=" + std::string(to_string(c.key_share)) +
         ",extensions=" + encode_extensions(c.extensions);
}

std::string encode_fields(const HandshakeMessage& m) {
  return std::visit(
      [](const auto& msg) -> std::string {
        using T = std::decay_t<decltype(msg)>;
        if constexpr (std::is_same_v<T, ClientHello> ||
                      std::is_same_v<T, ServerHello> ||
                      std::is_same_v<T, HelloRetryRequest>) {
          return encode_crypto(msg.crypto);
        } else if constexpr (std::is_same_v<T, EncryptedExtensions>) {
          return "extensions=" + encode_extensions(msg.extensions);
        } else if constexpr (std::is_same_v<T, CertificateRequest>) {
          return "request_id=" + std::to_string(msg.request_id) +
                 ",extensions=" + encode_extensions(msg.extensions);
        } else if constexpr (std::is_same_v<T, CertificateServer>) {
          return "cert_id=" + std::to_string(msg.cert_id);
        } else if constexpr (std::is_same_v<T, CertificateClient>) {
          return "cert_id=" +
                 (msg.cert_id ? std::to_string(*msg.cert_id) : "none");
        } else if constexpr (std::is_same_v<T, CertificateVerifyServer> ||
                             std::is_same_v<T, CertificateVerifyClient>) {
          return "signature_id=" + std::to_string(msg.signature_id);
        } else if constexpr (std::is_same_v<T, FinishedServer> ||
                             std::is_same_v<T, FinishedClient>) {
          return "mac_id=" + std::to_string(msg.mac_id);
        } else {
          return "level=" + std::string(to_string(msg.level)) +
                 ",description=" + std::string(to_string(msg.description));
        }
      },
      m);
}

// ---- decoding -------------------------------------------------------------

class Reader {
 public:
  explicit Reader(std::string_view s) : s_(s) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw WireFormatError("wire body: " + what + " at offset " +
                          std::to_string(pos_));
  }

  bool at_end() const { return pos_ == s_.size(); }
  bool peek(char c) const { return pos_ < s_.size() && s_[pos_] == c; }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  bool consume(char c) {
    if (!peek(c)) return false;
    ++pos_;
    return true;
  }

  std::string_view word() {
    std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
            s_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) fail("expected a name");
    return s_.substr(start, pos_ - start);
  }

  template <typename Int>
  Int number() {
    std::string_view w = word();
    Int value{};
    auto [ptr, ec] = std::from_chars(w.data(), w.data() + w.size(), value);
    if (ec != std::errc{} || ptr != w.data() + w.size()) {
      fail("bad number '" + std::string(w) + "'");
    }
    return value;
  }

  template <typename Enum>
  Enum enumerator(std::optional<Enum> (*parse)(std::string_view)) {
    std::string_view w = word();
    auto value = parse(w);
    if (!value) fail("unknown value '" + std::string(w) + "'");
    return *value;
  }

  void field(std::string_view name) {
    std::string_view w = word();
    if (w != name) {
      fail("expected field '" + std::string(name) + "', got '" +
           std::string(w) + "'");
    }
    expect('=');
  }

  template <typename F>
  void list(F&& item) {
    expect('[');
    if (consume(']')) return;
    do {
      item();
    } while (consume(','));
    expect(']');
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

template <typename T>
bool try_constructor(std::string_view name, Reader& r,
                     std::optional<ExtensionData>& out) {
  if (name != kConstructorName<T>) return false;
  T d;
  if constexpr (std::is_same_v<T, SupportedVersions>) {
    r.list([&] {
      d.versions.push_back(r.enumerator(protocol_version_from_string));
    });
  } else if constexpr (std::is_same_v<T, Cookie>) {
    d.token = r.number<std::uint32_t>();
  } else if constexpr (std::is_same_v<T, KeyShare>) {
    d.share = r.enumerator(key_share_from_string);
  } else if constexpr (std::is_same_v<T, SignatureAlgorithms>) {
    r.list([&] { d.algorithms.push_back(r.number<std::uint16_t>()); });
  } else if constexpr (std::is_same_v<T, CertificateType>) {
    d.type_id = r.number<std::uint32_t>();
  } else {
    d.payload = r.number<std::uint32_t>();
  }
  out = d;
  return true;
}

template <std::size_t... I>
ExtensionData decode_data(std::string_view name, Reader& r,
                          std::index_sequence<I...>) {
  std::optional<ExtensionData> out;
  (try_constructor<std::variant_alternative_t<I, ExtensionData>>(name, r,
                                                                 out) ||
   ...);
  if (!out) r.fail("unknown extension constructor '" + std::string(name) + "'");
  return *out;
}

std::vector<Extension> decode_extensions(Reader& r) {
  std::vector<Extension> out;
  r.list([&] {
    Extension e;
    e.extension_type = r.enumerator(extension_type_from_string);
    r.expect(':');
    std::string_view ctor = r.word();
    r.expect('(');
    e.extension_data = decode_data(
        ctor, r, std::make_index_sequence<std::variant_size_v<ExtensionData>>{});
    r.expect(')');
    out.push_back(std::move(e));
  });
  return out;
}

CryptoInfo decode_crypto(Reader& r) {
  CryptoInfo c;
  r.field("version");
  c.version = r.enumerator(protocol_version_from_string);
  r.expect(',');
  r.field("cipher_suite");
  c.cipher_suite = r.enumerator(cipher_suite_from_string);
  r.expect(',');
  r.field("key_share");
  c.key_share = r.enumerator(key_share_from_string);
  r.expect(',');
  r.field("extensions");
  c.extensions = decode_extensions(r);
  return c;
}

HandshakeMessage decode_fields(Gate gate, Reader& r) {
  switch (gate) {
    case Gate::CLIENTHELLO:
      return ClientHello{decode_crypto(r)};
    case Gate::SERVERHELLO:
      return ServerHello{decode_crypto(r)};
    case Gate::HELLORETRYREQUEST:
      return HelloRetryRequest{decode_crypto(r)};
    case Gate::ENCRYPTEDEXTENSIONS: {
      r.field("extensions");
      return EncryptedExtensions{decode_extensions(r)};
    }
    case Gate::CERTIFICATEREQUEST: {
      CertificateRequest m;
      r.field("request_id");
      m.request_id = r.number<std::uint32_t>();
      r.expect(',');
      r.field("extensions");
      m.extensions = decode_extensions(r);
      return m;
    }
    case Gate::CERTIFICATE_S:
      r.field("cert_id");
      return CertificateServer{r.number<std::uint32_t>()};
    case Gate::CERTIFICATE_C: {
      r.field("cert_id");
      if (r.peek('n')) {
        if (r.word() != "none") r.fail("expected cert id or none");
        return CertificateClient{std::nullopt};
      }
      return CertificateClient{r.number<std::uint32_t>()};
    }
    case Gate::CERTIFICATEVERIFY_S:
      r.field("signature_id");
      return CertificateVerifyServer{r.number<std::uint32_t>()};
    case Gate::CERTIFICATEVERIFY_C:
      r.field("signature_id");
      return CertificateVerifyClient{r.number<std::uint32_t>()};
    case Gate::FINISHED_S:
      r.field("mac_id");
      return FinishedServer{r.number<std::uint32_t>()};
    case Gate::FINISHED_C:
      r.field("mac_id");
      return FinishedClient{r.number<std::uint32_t>()};
    case Gate::ALERT: {
      Alert a;
      r.field("level");
      a.level = r.enumerator(alert_level_from_string);
      r.expect(',');
      r.field("description");
      a.description = r.enumerator(alert_type_from_string);
      return a;
    }
  }
  r.fail("unknown gate");
}

}  // namespace

std::string encode_message(const HandshakeMessage& m) {
  return std::string(gate_name(gate_of(m))) + " {" + encode_fields(m) + "}";
}

HandshakeMessage decode_message(std::string_view body) {
  Reader r(body);
  std::string_view name = r.word();
  auto gate = gate_from_name(name);
  if (!gate) r.fail("unknown gate '" + std::string(name) + "'");
  r.expect(' ');
  r.expect('{');
  HandshakeMessage m = decode_fields(*gate, r);
  r.expect('}');
  if (!r.at_end()) r.fail("trailing characters");
  return m;
}

}  // namespace tlsmbt::tcio
