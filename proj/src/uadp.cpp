#include "beaconsync/uadp.hpp"

#include "byte_io.hpp"

#include <boost/crc.hpp>

#include <cstring>

namespace beaconsync {

namespace {

void check_structure(const NetworkMessage& msg)
{
    if (msg.dataset_messages.size() != 1) throw StructuralError("exactly one DataSetMessage required");
    if (msg.dataset_messages.front().fields.size() != 2) throw StructuralError("field_count must be 2");
}

std::array<std::uint8_t, 8> le_bytes(std::uint64_t v)
{
    std::array<std::uint8_t, 8> out{};
    for (int i = 0; i < 8; ++i) out[i] = static_cast<std::uint8_t>(v >> (8 * i));
    return out;
}

std::uint64_t from_le(const std::array<std::uint8_t, 8>& b)
{
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

} // namespace

std::uint32_t uadp_checksum(std::span<const std::uint8_t> bytes)
{
    boost::crc_32_type crc;
    crc.process_bytes(bytes.data(), bytes.size());
    return crc.checksum();
}

Octets encode_network_message(const NetworkMessage& msg)
{
    check_structure(msg);
    Octets out;
    out.reserve(kTupleMessageLen);
    ByteWriter w(out);
    w.u8(msg.header.version);
    w.u16(msg.header.publisher_id);
    w.u32(msg.header.sequence_number);
    w.u8(static_cast<std::uint8_t>(msg.dataset_messages.size()));
    const auto& ds = msg.dataset_messages.front();
    w.u16(ds.dataset_writer_id);
    w.u16(static_cast<std::uint16_t>(ds.fields.size()));
    for (const auto& f : ds.fields) {
        w.u16(f.field_id);
        w.bytes(f.value);
    }
    w.u32(uadp_checksum(out));
    return out;
}

NetworkMessage decode_network_message(std::span<const std::uint8_t> bytes)
{
    // The footer is always the final four octets. Inputs at least as long as a
    // tuple message are integrity-checked before their counts are trusted, so
    // a corrupted count octet is reported as corruption rather than truncation.
    auto verify = [&] {
        const auto body = bytes.first(bytes.size() - 4);
        ByteReader footer(bytes.last(4));
        if (uadp_checksum(body) != footer.u32("footer")) throw IntegrityError("checksum mismatch");
    };
    if (bytes.size() >= kTupleMessageLen) verify();

    ByteReader r(bytes);
    NetworkMessage msg;
    if (bytes.size() < 7) throw DecodeError("truncated: header");
    msg.header.version = r.u8("header");
    msg.header.publisher_id = r.u16("header");
    msg.header.sequence_number = r.u32("header");
    const auto count = r.u8("dataset_message_count");

    for (unsigned i = 0; i < count; ++i) {
        DataSetMessage ds;
        ds.dataset_writer_id = r.u16("dataset_header");
        const auto field_count = r.u16("dataset_header");
        for (unsigned k = 0; k < field_count; ++k) {
            DataSetField f;
            f.field_id = r.u16("dataset_field");
            r.bytes_into(f.value, "dataset_field");
            ds.fields.push_back(f);
        }
        msg.dataset_messages.push_back(std::move(ds));
    }
    r.u32("footer");
    if (r.remaining() != 0) throw DecodeError("trailing octets after footer");
    if (bytes.size() < kTupleMessageLen) verify();

    check_structure(msg);
    return msg;
}

NetworkMessage make_tuple_message(std::uint16_t publisher_id, std::uint32_t sequence_number,
                                  std::uint16_t dataset_writer_id, std::uint64_t t_bf, SimTime t_tsn_at_bf)
{
    NetworkMessage msg;
    msg.header.publisher_id = publisher_id;
    msg.header.sequence_number = sequence_number;
    DataSetMessage ds;
    ds.dataset_writer_id = dataset_writer_id;
    ds.fields.push_back({kFieldTbf, le_bytes(t_bf)});
    ds.fields.push_back({kFieldTtsn, le_bytes(static_cast<std::uint64_t>(t_tsn_at_bf.nanos()))});
    msg.dataset_messages.push_back(std::move(ds));
    return msg;
}

TupleFields tuple_fields(const NetworkMessage& msg)
{
    check_structure(msg);
    const auto& ds = msg.dataset_messages.front();
    if (ds.fields[0].field_id != kFieldTbf || ds.fields[1].field_id != kFieldTtsn)
        throw StructuralError("fields must be t_bf then t_tsn");
    return TupleFields{ds.dataset_writer_id, from_le(ds.fields[0].value),
                       SimTime(static_cast<std::int64_t>(from_le(ds.fields[1].value)))};
}

std::uint16_t WriterDirectory::writer_for(const MacAddress& bssid)
{
    auto it = by_bssid_.find(bssid);
    if (it != by_bssid_.end()) return it->second;
    const auto id = static_cast<std::uint16_t>(by_bssid_.size() + 1);
    by_bssid_.emplace(bssid, id);
    by_writer_.emplace(id, bssid);
    return id;
}

std::optional<MacAddress> WriterDirectory::bssid_for(std::uint16_t writer_id) const
{
    auto it = by_writer_.find(writer_id);
    if (it == by_writer_.end()) return std::nullopt;
    return it->second;
}

bool SequenceTracker::accept(const NetworkMessage& msg)
{
    const auto& header = msg.header;
    const std::uint16_t writer = msg.dataset_messages.empty() ? 0 : msg.dataset_messages.front().dataset_writer_id;
    const auto key = std::make_pair(header.publisher_id, writer);
    auto it = last_.find(key);
    if (it != last_.end() && header.sequence_number <= it->second) {
        ++rejected_;
        return false;
    }
    last_[key] = header.sequence_number;
    return true;
}

void append_record(Octets& stream, std::span<const std::uint8_t> message)
{
    ByteWriter w(stream);
    w.u32(static_cast<std::uint32_t>(message.size()));
    w.bytes(message);
}

std::vector<Octets> split_records(std::span<const std::uint8_t> stream)
{
    std::vector<Octets> out;
    ByteReader r(stream);
    while (r.remaining() > 0) {
        const auto len = r.u32("record_length");
        auto body = r.take(len, "record_body");
        out.emplace_back(body.begin(), body.end());
    }
    return out;
}

} // namespace beaconsync
