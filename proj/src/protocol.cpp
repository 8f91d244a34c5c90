#include "uerc/protocol.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "uerc/binary.hpp"
#include "uerc/csv.hpp"
#include "uerc/error.hpp"
#include "uerc/parallel.hpp"

namespace uerc {

namespace {

constexpr char kMatrixMagic[] = "UERCSIM1";

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view text, const std::array<std::pair<std::string_view, Enum>, N>& table,
                const char* field, std::size_t line) {
    for (const auto& [name, value] : table) {
        if (name == text) return value;
    }
    throw FormatError("manifest line " + std::to_string(line) + ": invalid " + field + " '" +
                      std::string(text) + "'");
}

constexpr std::array<std::pair<std::string_view, Side>, 3> kSides{
    {{"left", Side::left}, {"right", Side::right}, {"unknown", Side::unknown}}};
constexpr std::array<std::pair<std::string_view, Origin>, 3> kOrigins{
    {{"awe", Origin::awe}, {"awe_aux", Origin::awe_aux}, {"uerc_new", Origin::uerc_new}}};
constexpr std::array<std::pair<std::string_view, PartitionLabel>, 2> kPartitions{
    {{"train", PartitionLabel::train}, {"test", PartitionLabel::test}}};
constexpr std::array<std::pair<std::string_view, Rotation>, 4> kRotations{
    {{"none", Rotation::none}, {"moderate", Rotation::moderate}, {"severe", Rotation::severe},
     {"unlabeled", Rotation::unlabeled}}};
constexpr std::array<std::pair<std::string_view, Occlusion>, 4> kOcclusions{
    {{"minor", Occlusion::minor}, {"moderate", Occlusion::moderate}, {"severe", Occlusion::severe},
     {"unlabeled", Occlusion::unlabeled}}};
constexpr std::array<std::pair<std::string_view, Gender>, 3> kGenders{
    {{"male", Gender::male}, {"female", Gender::female}, {"unlabeled", Gender::unlabeled}}};

template <typename Enum, std::size_t N>
std::string_view enum_name(Enum v, const std::array<std::pair<std::string_view, Enum>, N>& table) {
    for (const auto& [name, value] : table) {
        if (value == v) return name;
    }
    return "unknown";
}

bool has_annotations(const ManifestEntry& e) {
    return e.pitch != Rotation::unlabeled || e.roll != Rotation::unlabeled ||
           e.yaw != Rotation::unlabeled || e.occlusion != Occlusion::unlabeled ||
           e.gender != Gender::unlabeled;
}

void check_id(const std::string& id, const char* what) {
    if (id.empty()) throw Error(std::string("empty ") + what + " id in similarity matrix");
    if (id.find('\n') != std::string::npos || id.find('\r') != std::string::npos) {
        throw Error(std::string(what) + " id '" + id + "' contains a line break");
    }
}

}  // namespace

std::string_view to_string(Origin v) { return enum_name(v, kOrigins); }
std::string_view to_string(PartitionLabel v) { return enum_name(v, kPartitions); }
std::string_view to_string(Rotation v) { return enum_name(v, kRotations); }
std::string_view to_string(Occlusion v) { return enum_name(v, kOcclusions); }
std::string_view to_string(Gender v) { return enum_name(v, kGenders); }

Manifest load_manifest(std::istream& in) {
    Manifest entries;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != kManifestHeader) {
                throw FormatError("manifest header must be '" + std::string(kManifestHeader) + "'");
            }
            header_seen = true;
            continue;
        }
        const auto cells = csv::split_line(line);
        if (cells.size() != 12) {
            throw FormatError("manifest line " + std::to_string(line_no) + ": expected 12 fields, got " +
                              std::to_string(cells.size()));
        }
        for (int required : {0, 1, 11}) {
            if (cells[required].empty()) {
                throw FormatError("manifest line " + std::to_string(line_no) +
                                  ": missing required field " + std::to_string(required + 1));
            }
        }
        ManifestEntry e;
        e.image_id = cells[0];
        e.subject_id = cells[1];
        e.side = parse_enum(cells[2], kSides, "side", line_no);
        e.origin = parse_enum(cells[3], kOrigins, "origin", line_no);
        e.partition = parse_enum(cells[4], kPartitions, "partition", line_no);
        e.pitch = parse_enum(cells[5], kRotations, "pitch", line_no);
        e.roll = parse_enum(cells[6], kRotations, "roll", line_no);
        e.yaw = parse_enum(cells[7], kRotations, "yaw", line_no);
        e.occlusion = parse_enum(cells[8], kOcclusions, "occlusion", line_no);
        e.gender = parse_enum(cells[9], kGenders, "gender", line_no);
        const std::string& pc = cells[10];
        auto [ptr, ec] = std::from_chars(pc.data(), pc.data() + pc.size(), e.pixel_count);
        if (ec != std::errc{} || ptr != pc.data() + pc.size() || e.pixel_count < 1) {
            throw FormatError("manifest line " + std::to_string(line_no) + ": invalid pixel_count '" +
                              pc + "'");
        }
        e.path = cells[11];
        if (e.origin != Origin::awe && has_annotations(e)) {
            throw FormatError("manifest line " + std::to_string(line_no) +
                              ": annotations are only allowed for origin awe");
        }
        if (!seen.insert(e.image_id).second) {
            throw FormatError("duplicate image_id '" + e.image_id + "' on manifest line " +
                              std::to_string(line_no));
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open manifest " + path.string());
    return load_manifest(in);
}

void write_manifest(std::ostream& out, const Manifest& entries) {
    out << kManifestHeader << '\n';
    for (const auto& e : entries) {
        csv::write_row(out, {e.image_id, e.subject_id, std::string(to_string(e.side)),
                             std::string(to_string(e.origin)), std::string(to_string(e.partition)),
                             std::string(to_string(e.pitch)), std::string(to_string(e.roll)),
                             std::string(to_string(e.yaw)), std::string(to_string(e.occlusion)),
                             std::string(to_string(e.gender)), std::to_string(e.pixel_count), e.path});
    }
}

void write_manifest(const std::filesystem::path& path, const Manifest& entries) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write manifest " + path.string());
    write_manifest(out, entries);
}

Split partition(const Manifest& entries) {
    Split split;
    std::unordered_map<std::string, PartitionLabel> subject_part;
    for (const auto& e : entries) {
        auto [it, inserted] = subject_part.emplace(e.subject_id, e.partition);
        if (!inserted && it->second != e.partition) {
            throw Error("subject '" + e.subject_id + "' appears in both train and test partitions");
        }
        (e.partition == PartitionLabel::train ? split.train : split.test).push_back(e);
    }
    return split;
}

PartCounts count_part(const Manifest& part) {
    std::unordered_set<std::string> subjects;
    for (const auto& e : part) subjects.insert(e.subject_id);
    return {part.size(), subjects.size()};
}

void verify_counts(const Split& split, PartCounts train, PartCounts test) {
    auto check = [](const char* name, PartCounts got, PartCounts want) {
        if (got != want) {
            throw Error(std::string(name) + " partition has " + std::to_string(got.images) +
                        " images of " + std::to_string(got.subjects) + " subjects, expected " +
                        std::to_string(want.images) + " of " + std::to_string(want.subjects));
        }
    };
    check("train", count_part(split.train), train);
    check("test", count_part(split.test), test);
}

std::vector<std::string> build_gallery(const Manifest& test) {
    if (test.empty()) throw Error("test set is empty");
    std::vector<std::string> ids;
    ids.reserve(test.size());
    for (const auto& e : test) ids.push_back(e.image_id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<std::string> build_probes(const Manifest& test) {
    if (test.empty()) throw Error("test set is empty");
    std::unordered_map<std::string, std::size_t> per_subject;
    for (const auto& e : test) ++per_subject[e.subject_id];
    std::vector<std::string> ids;
    for (const auto& e : test) {
        if (per_subject[e.subject_id] >= 2) ids.push_back(e.image_id);
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

// ---------------------------------------------------------------------------

void SimilarityMatrix::validate() const {
    if (scores.size() != probe_ids.size() * gallery_ids.size()) {
        throw Error("similarity matrix holds " + std::to_string(scores.size()) + " scores for a " +
                    std::to_string(probe_ids.size()) + "x" + std::to_string(gallery_ids.size()) + " grid");
    }
    std::unordered_set<std::string> gallery;
    for (const auto& g : gallery_ids) {
        check_id(g, "gallery");
        if (!gallery.insert(g).second) throw Error("duplicate gallery id '" + g + "'");
    }
    std::unordered_set<std::string> probes;
    for (const auto& p : probe_ids) {
        check_id(p, "probe");
        if (!probes.insert(p).second) throw Error("duplicate probe id '" + p + "'");
        if (!gallery.contains(p)) throw Error("probe '" + p + "' is not a gallery image");
    }
    for (float s : scores) {
        if (!std::isfinite(s)) throw Error("similarity matrix contains a non-finite score");
    }
}

SimilarityMatrix compute_matrix_rows(const std::vector<std::string>& probes,
                                     const std::vector<std::string>& gallery,
                                     const RowScorer& scorer, int threads) {
    SimilarityMatrix m;
    m.probe_ids = probes;
    m.gallery_ids = gallery;
    m.scores.assign(probes.size() * gallery.size(), 0.0f);
    const std::size_t cols = gallery.size();
    parallel_for(probes.size(), threads, [&](std::size_t r) {
        std::vector<double> row;
        try {
            row = scorer(probes[r]);
        } catch (const std::exception& e) {
            throw Error("scoring probe '" + probes[r] + "' failed: " + e.what());
        }
        if (row.size() != cols) {
            throw Error("scorer returned " + std::to_string(row.size()) + " scores for probe '" +
                        probes[r] + "', expected " + std::to_string(cols));
        }
        for (std::size_t c = 0; c < cols; ++c) {
            const float s = static_cast<float>(row[c]);
            if (!std::isfinite(s)) {
                throw Error("non-finite score for probe '" + probes[r] + "' vs gallery '" + gallery[c] + "'");
            }
            m.scores[r * cols + c] = s;
        }
    });
    m.validate();
    return m;
}

SimilarityMatrix compute_matrix(const std::vector<std::string>& probes,
                                const std::vector<std::string>& gallery, const PairScorer& scorer,
                                int threads) {
    return compute_matrix_rows(
        probes, gallery,
        [&](const std::string& probe) {
            std::vector<double> row(gallery.size());
            for (std::size_t c = 0; c < gallery.size(); ++c) {
                try {
                    row[c] = scorer(probe, gallery[c]);
                } catch (const std::exception& e) {
                    throw Error("vs gallery '" + gallery[c] + "': " + e.what());
                }
            }
            return row;
        },
        threads);
}

std::uint64_t matrix_header_size(const SimilarityMatrix& m) {
    std::uint64_t n = 8 + 8 + 8;
    for (const auto& id : m.probe_ids) n += id.size() + 1;
    for (const auto& id : m.gallery_ids) n += id.size() + 1;
    return n;
}

std::uint64_t matrix_file_size(const SimilarityMatrix& m) {
    return matrix_header_size(m) + static_cast<std::uint64_t>(m.rows()) * m.cols() * 4;
}

void write_matrix(std::ostream& out, const SimilarityMatrix& m) {
    m.validate();
    out.write(kMatrixMagic, 8);
    binary::put_uint<std::uint64_t>(out, m.rows());
    binary::put_uint<std::uint64_t>(out, m.cols());
    for (const auto& id : m.probe_ids) out << id << '\n';
    for (const auto& id : m.gallery_ids) out << id << '\n';
    for (float s : m.scores) binary::put_float(out, s);
    if (!out) throw Error("failed to write similarity matrix");
}

SimilarityMatrix read_matrix(std::istream& in) {
    binary::expect_magic(in, kMatrixMagic);
    const auto rows = binary::get_uint<std::uint64_t>(in, "row count");
    const auto cols = binary::get_uint<std::uint64_t>(in, "column count");
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    if (cols != 0 && rows > kMax / cols / 4) throw FormatError("matrix dimensions overflow");
    if (rows * cols > std::numeric_limits<std::size_t>::max() / 4) {
        throw FormatError("matrix dimensions overflow");
    }
    SimilarityMatrix m;
    auto read_ids = [&](std::uint64_t n, std::vector<std::string>& ids, const char* what) {
        for (std::uint64_t i = 0; i < n; ++i) {
            std::string id;
            if (!std::getline(in, id) || in.eof()) {
                throw FormatError(std::string("truncated matrix while reading ") + what + " ids");
            }
            ids.push_back(std::move(id));
        }
    };
    read_ids(rows, m.probe_ids, "probe");
    read_ids(cols, m.gallery_ids, "gallery");
    const std::uint64_t n = rows * cols;
    m.scores.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(n, 1u << 24)));
    for (std::uint64_t i = 0; i < n; ++i) {
        const float s = binary::get_float(in, "matrix scores");
        if (std::isnan(s)) throw FormatError("NaN score in matrix payload");
        m.scores.push_back(s);
    }
    m.validate();
    return m;
}

void write_matrix(const std::filesystem::path& path, const SimilarityMatrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write_matrix(out, m);
}

SimilarityMatrix read_matrix(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open matrix " + path.string());
    return read_matrix(in);
}

void write_matrix_csv(std::ostream& out, const SimilarityMatrix& m) {
    std::vector<std::string> header{""};
    header.insert(header.end(), m.gallery_ids.begin(), m.gallery_ids.end());
    csv::write_row(out, header);
    char buf[32];
    for (std::size_t r = 0; r < m.rows(); ++r) {
        std::vector<std::string> row{m.probe_ids[r]};
        for (std::size_t c = 0; c < m.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(m.at(r, c)));
            row.emplace_back(buf);
        }
        csv::write_row(out, row);
    }
}

}  // namespace uerc
