#include "uerc/descriptor_io.hpp"

#include <fstream>

#include "uerc/binary.hpp"

namespace uerc {

namespace {

constexpr char kMagic[] = "UERCDSC1";

std::uint32_t kind_code(DescriptorKind k) { return static_cast<std::uint32_t>(k); }

DescriptorKind kind_from_code(std::uint32_t c) {
    if (c > static_cast<std::uint32_t>(DescriptorKind::external)) {
        throw FormatError("unknown descriptor kind code " + std::to_string(c));
    }
    return static_cast<DescriptorKind>(c);
}

std::string read_bytes(std::istream& in, std::uint64_t n, const char* what) {
    if (n > (1u << 20)) throw FormatError(std::string("implausible length for ") + what);
    std::string s(n, '\0');
    if (!in.read(s.data(), static_cast<std::streamsize>(n))) {
        throw FormatError(std::string("truncated input while reading ") + what);
    }
    return s;
}

}  // namespace

const DescriptorRecord& DescriptorSet::find(const std::string& image_id, bool flipped) const {
    auto it = index_.find({image_id, flipped});
    if (it == index_.end()) {
        throw Error("no " + std::string(flipped ? "flipped " : "") + "descriptor for image '" +
                    image_id + "'");
    }
    return records[it->second];
}

bool DescriptorSet::contains(const std::string& image_id, bool flipped) const {
    return index_.contains({image_id, flipped});
}

void DescriptorSet::add(DescriptorRecord record) {
    if (record.values.size() != length) {
        throw Error("descriptor for '" + record.image_id + "' has length " +
                    std::to_string(record.values.size()) + ", container expects " +
                    std::to_string(length));
    }
    auto key = std::make_pair(record.image_id, record.flipped);
    if (index_.contains(key)) throw Error("duplicate descriptor record for '" + record.image_id + "'");
    index_.emplace(std::move(key), records.size());
    records.push_back(std::move(record));
}

void write_descriptors(std::ostream& out, const DescriptorSet& set) {
    out.write(kMagic, 8);
    binary::put_uint<std::uint32_t>(out, kind_code(set.kind));
    binary::put_uint<std::uint32_t>(out, static_cast<std::uint32_t>(set.fingerprint.size()));
    out.write(set.fingerprint.data(), static_cast<std::streamsize>(set.fingerprint.size()));
    binary::put_uint<std::uint64_t>(out, set.length);
    binary::put_uint<std::uint64_t>(out, set.records.size());
    for (const auto& r : set.records) {
        binary::put_uint<std::uint32_t>(out, static_cast<std::uint32_t>(r.image_id.size()));
        out.write(r.image_id.data(), static_cast<std::streamsize>(r.image_id.size()));
        binary::put_uint<std::uint8_t>(out, r.flipped ? 1 : 0);
        for (float v : r.values) binary::put_float(out, v);
    }
    if (!out) throw Error("failed to write descriptor container");
}

DescriptorSet read_descriptors(std::istream& in) {
    binary::expect_magic(in, kMagic);
    DescriptorSet set;
    set.kind = kind_from_code(binary::get_uint<std::uint32_t>(in, "kind"));
    set.fingerprint = read_bytes(in, binary::get_uint<std::uint32_t>(in, "fingerprint length"), "fingerprint");
    set.length = binary::get_uint<std::uint64_t>(in, "vector length");
    const auto count = binary::get_uint<std::uint64_t>(in, "record count");
    for (std::uint64_t i = 0; i < count; ++i) {
        DescriptorRecord r;
        r.image_id = read_bytes(in, binary::get_uint<std::uint32_t>(in, "id length"), "image id");
        const auto orient = binary::get_uint<std::uint8_t>(in, "orientation");
        if (orient > 1) throw FormatError("bad orientation flag for '" + r.image_id + "'");
        r.flipped = orient == 1;
        r.values.resize(set.length);
        for (auto& v : r.values) v = binary::get_float(in, "descriptor values");
        set.add(std::move(r));
    }
    return set;
}

void write_descriptors(const std::filesystem::path& path, const DescriptorSet& set) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write_descriptors(out, set);
}

DescriptorSet read_descriptors(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return read_descriptors(in);
}

}  // namespace uerc
