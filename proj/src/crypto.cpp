// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include "dcwc/crypto.hpp"

#include <sodium.h>

#include <stdexcept>

namespace dcwc {

namespace {

constexpr size_t kHmacKeyBytes = 32;

void ensure_sodium() {
    static const int rc = sodium_init();
    if (rc < 0) throw std::runtime_error("sodium_init failed");
}

Bytes expand_seed(uint64_t seed, size_t n) {
    // SHA-256 counter expansion of the 64-bit seed.
    Bytes out;
    uint32_t counter = 0;
    while (out.size() < n) {
        Bytes block = sha256(Encoder()
                                 .field("dcwc.keygen")
                                 .field_u64(seed)
                                 .field_u32(counter++)
                                 .take());
        out.insert(out.end(), block.begin(), block.end());
    }
    out.resize(n);
    return out;
}

Signature hmac_sign(const Bytes& key, const Bytes& message) {
    Bytes mac(crypto_auth_hmacsha256_BYTES);
    crypto_auth_hmacsha256_state st;
    crypto_auth_hmacsha256_init(&st, key.data(), key.size());
    crypto_auth_hmacsha256_update(&st, message.data(), message.size());
    crypto_auth_hmacsha256_final(&st, mac.data());
    return Signature{std::move(mac)};
}

}  // namespace

Bytes PublicKey::encode() const {
    Bytes out;
    out.reserve(bytes.size() + 1);
    out.push_back(static_cast<uint8_t>(scheme));
    out.insert(out.end(), bytes.begin(), bytes.end());
    return out;
}

KeyPair keygen(Scheme scheme, uint64_t seed) {
    ensure_sodium();
    KeyPair kp;
    kp.scheme = scheme;
    kp.public_key.scheme = scheme;
    switch (scheme) {
        case Scheme::HmacSim: {
            // Verification key == MAC key.
            kp.secret = expand_seed(seed, kHmacKeyBytes);
            kp.public_key.bytes = kp.secret;
            break;
        }
        case Scheme::Ed25519: {
            Bytes sk(crypto_sign_SECRETKEYBYTES);
            Bytes pk(crypto_sign_PUBLICKEYBYTES);
            Bytes seed_bytes = expand_seed(seed, crypto_sign_SEEDBYTES);
            crypto_sign_seed_keypair(pk.data(), sk.data(), seed_bytes.data());
            kp.secret = std::move(sk);
            kp.public_key.bytes = std::move(pk);
            break;
        }
    }
    return kp;
}

Signature sign(const KeyPair& key, const Bytes& message) {
    ensure_sodium();
    switch (key.scheme) {
        case Scheme::HmacSim:
            return hmac_sign(key.secret, message);
        case Scheme::Ed25519: {
            Bytes sig(crypto_sign_BYTES);
            unsigned long long len = 0;
            crypto_sign_detached(sig.data(), &len, message.data(),
                                 message.size(), key.secret.data());
            sig.resize(len);
            return Signature{std::move(sig)};
        }
    }
    throw std::logic_error("unknown scheme");
}

bool verify(const PublicKey& key, const Bytes& message, const Signature& sig) {
    ensure_sodium();
    switch (key.scheme) {
        case Scheme::HmacSim: {
            if (key.bytes.size() != kHmacKeyBytes) return false;
            if (sig.bytes.size() != crypto_auth_hmacsha256_BYTES) return false;
            Signature expected = hmac_sign(key.bytes, message);
            return sodium_memcmp(expected.bytes.data(), sig.bytes.data(),
                                 sig.bytes.size()) == 0;
        }
        case Scheme::Ed25519: {
            if (key.bytes.size() != crypto_sign_PUBLICKEYBYTES) return false;
            if (sig.bytes.size() != crypto_sign_BYTES) return false;
            return crypto_sign_verify_detached(sig.bytes.data(), message.data(),
                                               message.size(),
                                               key.bytes.data()) == 0;
        }
    }
    return false;
}

size_t public_key_size(Scheme scheme) {
    return scheme == Scheme::HmacSim ? kHmacKeyBytes
                                     : crypto_sign_PUBLICKEYBYTES;
}

size_t signature_size(Scheme scheme) {
    return scheme == Scheme::HmacSim ? crypto_auth_hmacsha256_BYTES
                                     : crypto_sign_BYTES;
}

}  // namespace dcwc
