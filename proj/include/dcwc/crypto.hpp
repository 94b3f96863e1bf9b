// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <compare>
#include <cstdint>

#include "dcwc/common.hpp"

namespace dcwc {

// Two signature backends behind one interface:
//
//  - HmacSim: HMAC-SHA256 where the verification key equals the MAC key.
//    Insecure against anyone who holds the public key, which no simulated
//    actor exploits; it exists for speed in exhaustive experiments and for
//    deterministic traces.
//  - Ed25519: real asymmetric signatures (libsodium), also deterministic.
//
// Tests run against both.
enum class Scheme : uint8_t {
    HmacSim = 1,
    Ed25519 = 2,
};

struct PublicKey {
    Scheme scheme = Scheme::HmacSim;
    Bytes bytes;

    // Scheme tag + key bytes; used inside signed material so keys from
    // different schemes can never alias.
    Bytes encode() const;

    auto operator<=>(const PublicKey&) const = default;
    bool operator==(const PublicKey&) const = default;
};

struct Signature {
    Bytes bytes;
    bool operator==(const Signature&) const = default;
};

struct KeyPair {
    Scheme scheme = Scheme::HmacSim;
    Bytes secret;
    PublicKey public_key;
};

// Deterministic: the same seed always produces the same pair.
KeyPair keygen(Scheme scheme, uint64_t seed);

Signature sign(const KeyPair& key, const Bytes& message);
bool verify(const PublicKey& key, const Bytes& message, const Signature& sig);

size_t public_key_size(Scheme scheme);
size_t signature_size(Scheme scheme);

}  // namespace dcwc
