// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "dcwc/common.hpp"

#include <sodium.h>

#include <stdexcept>

namespace dcwc {

namespace {
constexpr char kHexDigits[] = "0123456789abcdef";

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}
}  // namespace

std::string to_hex(const Bytes& data) {
    std::string out;
    out.reserve(data.size() * 2);
    for (uint8_t b : data) {
        out.push_back(kHexDigits[b >> 4]);
        out.push_back(kHexDigits[b & 0x0f]);
    }
    return out;
}

std::optional<Bytes> from_hex(const std::string& hex) {
    if (hex.size() % 2 != 0) return std::nullopt;
    Bytes out;
    out.reserve(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_nibble(hex[i]);
        int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        out.push_back(static_cast<uint8_t>((hi << 4) | lo));
    }
    return out;
}

Bytes sha256(const Bytes& data) {
    Bytes out(crypto_hash_sha256_BYTES);
    crypto_hash_sha256(out.data(), data.data(), data.size());
    return out;
}

std::string short_digest(const Bytes& data) {
    Bytes d = sha256(data);
    d.resize(8);
    return to_hex(d);
}

Bytes be32(uint32_t v) {
    return Bytes{static_cast<uint8_t>(v >> 24), static_cast<uint8_t>(v >> 16),
                 static_cast<uint8_t>(v >> 8), static_cast<uint8_t>(v)};
}

Bytes be64(uint64_t v) {
    Bytes out(8);
    for (int i = 7; i >= 0; --i) {
        out[static_cast<size_t>(i)] = static_cast<uint8_t>(v & 0xff);
        v >>= 8;
    }
    return out;
}

uint32_t read_be32(const uint8_t* p) {
    return (static_cast<uint32_t>(p[0]) << 24) |
           (static_cast<uint32_t>(p[1]) << 16) |
           (static_cast<uint32_t>(p[2]) << 8) | static_cast<uint32_t>(p[3]);
}

Encoder& Encoder::field(const Bytes& data) {
    if (data.size() > 0xffffffffu) throw std::length_error("field too long");
    Bytes len = be32(static_cast<uint32_t>(data.size()));
    out_.insert(out_.end(), len.begin(), len.end());
    out_.insert(out_.end(), data.begin(), data.end());
    return *this;
}

Encoder& Encoder::field(const std::string& data) {
    return field(Bytes(data.begin(), data.end()));
}

Encoder& Encoder::field_u32(uint32_t v) { return field(be32(v)); }

Encoder& Encoder::field_u64(uint64_t v) { return field(be64(v)); }

const char* err_name(Err e) {
    switch (e) {
        case Err::None: return "None";
        case Err::InvalidParams: return "InvalidParams";
        case Err::InsufficientFunds: return "InsufficientFunds";
        case Err::DegenerateTopology: return "DegenerateTopology";
        case Err::EmptyMessage: return "EmptyMessage";
        case Err::BadPayload: return "BadPayload";
        case Err::IdOutOfRange: return "IdOutOfRange";
        case Err::InnermostNotParty: return "InnermostNotParty";
        case Err::ChainLinkBroken: return "ChainLinkBroken";
        case Err::BadLayerSignature: return "BadLayerSignature";
        case Err::PlaintextMismatch: return "PlaintextMismatch";
        case Err::PriorProof: return "PriorProof";
        case Err::BadUpdate: return "BadUpdate";
        case Err::NotNewer: return "NotNewer";
        case Err::DuplicateId: return "DuplicateId";
        case Err::RoundMismatch: return "RoundMismatch";
        case Err::FeeExceedsPool: return "FeeExceedsPool";
        case Err::RemainderTooSmall: return "RemainderTooSmall";
        case Err::InvalidTimelock: return "InvalidTimelock";
        case Err::InvalidGraph: return "InvalidGraph";
        case Err::SetupIncomplete: return "SetupIncomplete";
        case Err::DecreasingCommitment: return "DecreasingCommitment";
        case Err::InsolventPayment: return "InsolventPayment";
        case Err::Unprovable: return "Unprovable";
        case Err::MixedChannelStates: return "MixedChannelStates";
        case Err::MissingSignature: return "MissingSignature";
        case Err::ScenarioInvalid: return "ScenarioInvalid";
    }
    return "Unknown";
}

}  // namespace dcwc
