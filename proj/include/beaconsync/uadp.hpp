#pragma once

// Reduced OPC UA PubSub UADP NetworkMessage carrying one DataSetMessage with
// the fields (t_bf, t_TSN[t_bf]). The octet layout is fixed and documented in
// docs/uadp-layout.md; all numerics are little-endian.
//
//   off  size  field
//   0    1     version
//   1    2     publisher_id
//   3    4     sequence_number
//   7    1     dataset_message_count        (always 1)
//   8    2     dataset_writer_id
//   10   2     field_count                  (always 2)
//   12   2+8   field 0: field_id, t_bf (u64 microseconds, TSF)
//   22   2+8   field 1: field_id, t_TSN (i64 nanoseconds)
//   32   4     CRC-32 of octets [0, 32)

#include "beaconsync/frames.hpp"
#include "beaconsync/time.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace beaconsync {

/// Message violates the fixed one-DataSetMessage, two-field structure.
class StructuralError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Checksum mismatch on decode.
class IntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

constexpr std::uint8_t kUadpVersion = 1;
constexpr std::uint16_t kFieldTbf = 1;
constexpr std::uint16_t kFieldTtsn = 2;
constexpr std::size_t kTupleMessageLen = 36;

struct DataSetField {
    std::uint16_t field_id = 0;
    std::array<std::uint8_t, 8> value{};

    friend bool operator==(const DataSetField&, const DataSetField&) = default;
};

struct DataSetMessage {
    std::uint16_t dataset_writer_id = 0;
    std::vector<DataSetField> fields;

    friend bool operator==(const DataSetMessage&, const DataSetMessage&) = default;
};

struct NetworkMessageHeader {
    std::uint8_t version = kUadpVersion;
    std::uint16_t publisher_id = 0;
    std::uint32_t sequence_number = 0;

    friend bool operator==(const NetworkMessageHeader&, const NetworkMessageHeader&) = default;
};

struct NetworkMessage {
    NetworkMessageHeader header;
    std::vector<DataSetMessage> dataset_messages;

    friend bool operator==(const NetworkMessage&, const NetworkMessage&) = default;
};

/// The pair published by the reference station for one beacon.
struct TimestampTuple {
    std::uint64_t t_bf = 0;
    SimTime t_tsn_at_bf;
    MacAddress bssid;

    friend bool operator==(const TimestampTuple&, const TimestampTuple&) = default;
};

/// Throws StructuralError unless there is exactly one DataSetMessage with two fields.
Octets encode_network_message(const NetworkMessage& msg);

/// Throws DecodeError on truncation, IntegrityError on checksum mismatch and
/// StructuralError on a well-formed but non-conforming message.
NetworkMessage decode_network_message(std::span<const std::uint8_t> bytes);

std::uint32_t uadp_checksum(std::span<const std::uint8_t> bytes);

NetworkMessage make_tuple_message(std::uint16_t publisher_id, std::uint32_t sequence_number,
                                  std::uint16_t dataset_writer_id, std::uint64_t t_bf, SimTime t_tsn_at_bf);

/// Field view of a decoded message; the BSSID is not on the wire and comes
/// from the writer directory.
struct TupleFields {
    std::uint16_t dataset_writer_id = 0;
    std::uint64_t t_bf = 0;
    SimTime t_tsn_at_bf;
};

TupleFields tuple_fields(const NetworkMessage& msg);

/// Binding of DataSetWriter ids to the BSSIDs they carry tuples for. The
/// reference station assigns ids on first use; subscribers resolve them with
/// the same directory (the equivalent of DataSetMetaData).
class WriterDirectory {
public:
    std::uint16_t writer_for(const MacAddress& bssid);
    std::optional<MacAddress> bssid_for(std::uint16_t writer_id) const;

private:
    std::map<MacAddress, std::uint16_t> by_bssid_;
    std::map<std::uint16_t, MacAddress> by_writer_;
};

/// Subscriber-side sequence tracking per (publisher, writer). Messages whose
/// sequence number does not exceed the last one accepted from the same writer
/// are rejected and counted, so one writer's traffic never affects another's.
class SequenceTracker {
public:
    bool accept(const NetworkMessage& msg);
    std::uint64_t reordered_or_duplicate() const { return rejected_; }

private:
    std::map<std::pair<std::uint16_t, std::uint16_t>, std::uint32_t> last_;
    std::uint64_t rejected_ = 0;
};

/// Record/replay stream: each message as a u32 little-endian length followed
/// by the encoded NetworkMessage octets.
void append_record(Octets& stream, std::span<const std::uint8_t> message);
std::vector<Octets> split_records(std::span<const std::uint8_t> stream);

} // namespace beaconsync
