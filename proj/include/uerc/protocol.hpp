#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "uerc/side.hpp"

namespace uerc {

enum class Origin { awe, awe_aux, uerc_new };
enum class PartitionLabel { train, test };
enum class Rotation { none, moderate, severe, unlabeled };
enum class Occlusion { minor, moderate, severe, unlabeled };
enum class Gender { male, female, unlabeled };

std::string_view to_string(Origin v);
std::string_view to_string(PartitionLabel v);
std::string_view to_string(Rotation v);
std::string_view to_string(Occlusion v);
std::string_view to_string(Gender v);

struct ManifestEntry {
    std::string image_id;
    std::string subject_id;
    Side side = Side::unknown;
    Origin origin = Origin::uerc_new;
    PartitionLabel partition = PartitionLabel::test;
    Rotation pitch = Rotation::unlabeled;
    Rotation roll = Rotation::unlabeled;
    Rotation yaw = Rotation::unlabeled;
    Occlusion occlusion = Occlusion::unlabeled;
    Gender gender = Gender::unlabeled;
    std::uint64_t pixel_count = 1;
    std::string path;
};

using Manifest = std::vector<ManifestEntry>;

inline constexpr std::string_view kManifestHeader =
    "image_id,subject_id,side,origin,partition,pitch,roll,yaw,occlusion,gender,pixel_count,path";

// UTF-8 CSV with the header above. An empty file is an empty manifest.
Manifest load_manifest(std::istream& in);
Manifest load_manifest(const std::filesystem::path& path);

void write_manifest(std::ostream& out, const Manifest& entries);
void write_manifest(const std::filesystem::path& path, const Manifest& entries);

struct Split {
    Manifest train;
    Manifest test;
};

// Splits by partition label; throws if a subject appears in both parts.
Split partition(const Manifest& entries);

struct PartCounts {
    std::size_t images = 0;
    std::size_t subjects = 0;
    bool operator==(const PartCounts&) const = default;
};

PartCounts count_part(const Manifest& part);

// Throws when the split does not match the declared totals.
void verify_counts(const Split& split, PartCounts train, PartCounts test);

// Every test image, sorted by image_id.
std::vector<std::string> build_gallery(const Manifest& test);

// Test images whose subject has at least two test images, sorted by image_id.
std::vector<std::string> build_probes(const Manifest& test);

// ---------------------------------------------------------------------------
// Similarity matrices

struct SimilarityMatrix {
    std::vector<std::string> probe_ids;
    std::vector<std::string> gallery_ids;
    std::vector<float> scores;  // row-major, probes x galleries; higher = more similar

    std::size_t rows() const { return probe_ids.size(); }
    std::size_t cols() const { return gallery_ids.size(); }
    float at(std::size_t r, std::size_t c) const { return scores[r * gallery_ids.size() + c]; }

    // Checks grid size, finite scores, unique non-empty ids without newlines,
    // and that every probe id is also a gallery id.
    void validate() const;

    bool operator==(const SimilarityMatrix&) const = default;
};

using PairScorer = std::function<double(const std::string& probe_id, const std::string& gallery_id)>;
// Returns one similarity per gallery id, in gallery order.
using RowScorer = std::function<std::vector<double>(const std::string& probe_id)>;

SimilarityMatrix compute_matrix(const std::vector<std::string>& probes,
                                const std::vector<std::string>& gallery, const PairScorer& scorer,
                                int threads = 1);

SimilarityMatrix compute_matrix_rows(const std::vector<std::string>& probes,
                                     const std::vector<std::string>& gallery,
                                     const RowScorer& scorer, int threads = 1);

// Binary layout: "UERCSIM1", u64 rows, u64 cols (little-endian), one
// newline-terminated id per probe then per gallery, then rows*cols float32
// little-endian scores in row-major order.
void write_matrix(std::ostream& out, const SimilarityMatrix& m);
SimilarityMatrix read_matrix(std::istream& in);
void write_matrix(const std::filesystem::path& path, const SimilarityMatrix& m);
SimilarityMatrix read_matrix(const std::filesystem::path& path);

std::uint64_t matrix_header_size(const SimilarityMatrix& m);
std::uint64_t matrix_file_size(const SimilarityMatrix& m);

// CSV export: first row is an empty cell followed by gallery ids; each further
// row is a probe id followed by its scores.
void write_matrix_csv(std::ostream& out, const SimilarityMatrix& m);

}  // namespace uerc
