// Copyright (c) 2026 The dcwclab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dcwc {

using Bytes = std::vector<uint8_t>;

std::string to_hex(const Bytes& data);
std::optional<Bytes> from_hex(const std::string& hex);

// SHA-256 of arbitrary bytes; 32-byte output.
Bytes sha256(const Bytes& data);

// Short hex handle of a digest, for traces and logs.
std::string short_digest(const Bytes& data);

Bytes be32(uint32_t v);
Bytes be64(uint64_t v);
uint32_t read_be32(const uint8_t* p);

// ---------------------------------------------------------------------------
// Canonical field encoding
//
// Every signed or hashed structure in this project serializes as a flat
// sequence of fields, each prefixed with a 4-byte big-endian length. The
// byte layout is a test contract (golden vectors pin it), so it must not
// change.
// ---------------------------------------------------------------------------
class Encoder {
public:
    Encoder& field(const Bytes& data);
    Encoder& field(const std::string& data);
    Encoder& field_u32(uint32_t v);
    Encoder& field_u64(uint64_t v);

    const Bytes& bytes() const { return out_; }
    Bytes take() { return std::move(out_); }

private:
    Bytes out_;
};

// ---------------------------------------------------------------------------
// Error reporting
// ---------------------------------------------------------------------------
enum class Err {
    None = 0,
    // channel lifecycle
    InvalidParams,
    InsufficientFunds,
    // disclose / cascade
    DegenerateTopology,
    // envelope verification
    EmptyMessage,
    BadPayload,
    IdOutOfRange,
    InnermostNotParty,
    ChainLinkBroken,
    BadLayerSignature,
    // proof-of-fraud validation (miner-side)
    PlaintextMismatch,
    PriorProof,
    BadUpdate,
    NotNewer,
    DuplicateId,
    RoundMismatch,
    // payoffs
    FeeExceedsPool,
    // star transactions
    RemainderTooSmall,
    InvalidTimelock,
    // xd channels
    InvalidGraph,
    SetupIncomplete,
    DecreasingCommitment,
    InsolventPayment,
    Unprovable,
    MixedChannelStates,
    MissingSignature,
    // scenario files
    ScenarioInvalid,
};

const char* err_name(Err e);

struct Error {
    Err code = Err::None;
    std::string message;
};

// Minimal value-or-error carrier. The protocol layers report failures as
// values so the validator can surface the first violated check by name.
template <typename T>
class Result {
public:
    Result(T value) : value_(std::move(value)) {}
    Result(Err code, std::string message = {})
        : error_{code, std::move(message)} {}
    Result(Error err) : error_(std::move(err)) {}

    bool ok() const { return value_.has_value(); }
    explicit operator bool() const { return ok(); }

    const T& value() const { return *value_; }
    T& value() { return *value_; }
    const Error& error() const { return error_; }
    Err code() const { return error_.code; }

private:
    std::optional<T> value_;
    Error error_;
};

struct Unit {};
using Status = Result<Unit>;

inline Status ok_status() { return Status(Unit{}); }

}  // namespace dcwc
