#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "uerc/descriptors.hpp"

namespace uerc {

// Binary descriptor container:
//   "UERCDSC1"
//   u32 kind (0 lbp, 1 hog, 2 chainlets, 3 external)
//   u32 fingerprint byte length, fingerprint (UTF-8)
//   u64 vector length, u64 record count
//   per record: u32 id byte length, id, u8 orientation (0 original,
//               1 horizontally flipped), vector length float32 values
// All integers and floats little-endian.
struct DescriptorRecord {
    std::string image_id;
    bool flipped = false;
    std::vector<float> values;
};

struct DescriptorSet {
    DescriptorKind kind = DescriptorKind::external;
    std::string fingerprint;
    std::uint64_t length = 0;
    std::vector<DescriptorRecord> records;

    // Throws when the record is missing.
    const DescriptorRecord& find(const std::string& image_id, bool flipped = false) const;
    bool contains(const std::string& image_id, bool flipped = false) const;

    void add(DescriptorRecord record);

private:
    std::map<std::pair<std::string, bool>, std::size_t> index_;
};

void write_descriptors(std::ostream& out, const DescriptorSet& set);
DescriptorSet read_descriptors(std::istream& in);

void write_descriptors(const std::filesystem::path& path, const DescriptorSet& set);
DescriptorSet read_descriptors(const std::filesystem::path& path);

}  // namespace uerc
