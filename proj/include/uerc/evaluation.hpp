#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "uerc/protocol.hpp"

namespace uerc {

// image_id -> subject_id
using SubjectLabels = std::unordered_map<std::string, std::string>;

SubjectLabels subject_labels(const Manifest& entries);

// values[r - 1] is the identification rate at rank r.
struct CmcCurve {
    std::vector<double> values;

    std::size_t max_rank() const { return values.size(); }
};

// What to do with a probe whose identity has no gallery image left after
// self-exclusion.
enum class Unenrolled { error, skip };

struct CmcOptions {
    bool exclude_self = true;
    Unenrolled unenrolled = Unenrolled::error;
};

struct CmcResult {
    CmcCurve curve;
    std::vector<std::size_t> probe_rows;  // matrix rows that were ranked
    std::vector<std::size_t> ranks;       // 1-based identity rank per ranked probe
    std::size_t gallery_identities = 0;
};

// Ranks gallery identities per probe: gallery scores collapse to the maximum
// per subject, subjects sort by score descending then subject id ascending.
// Only the given rows and columns of the matrix take part.
CmcResult cmc_subset(const SimilarityMatrix& m, std::span<const std::size_t> rows,
                     std::span<const std::size_t> cols, const SubjectLabels& labels,
                     const CmcOptions& options = {});

CmcResult cmc_detailed(const SimilarityMatrix& m, const SubjectLabels& labels,
                       const CmcOptions& options = {});

CmcCurve cmc(const SimilarityMatrix& m, const SubjectLabels& labels, bool exclude_self = true);

// 100 * curve[k]; k in [1, max_rank].
double rank_k(const CmcCurve& curve, std::size_t k);

// Mean of the curve values: rectangle rule on the rank axis normalised so the
// number of gallery identities maps to one.
double auc(const CmcCurve& curve);

struct EvalReport {
    double rank1 = 0.0;  // percent
    double rank5 = 0.0;  // percent; rank min(5, max_rank)
    double auc = 0.0;
    CmcCurve curve;
    std::size_t n_probes = 0;
    std::size_t n_gallery_identities = 0;
    std::optional<std::string> stratum;
};

EvalReport make_report(const CmcResult& result, std::optional<std::string> stratum = std::nullopt);

EvalReport evaluate(const SimilarityMatrix& m, const SubjectLabels& labels, bool exclude_self = true);

// ---------------------------------------------------------------------------

enum class StratifyField { pitch, roll, yaw, occlusion, gender, size_bin };

StratifyField parse_stratify_field(std::string_view text);
std::string_view to_string(StratifyField field);

// "<=1000", "1000-5000", "5000-10000", ">10000" (upper bounds inclusive).
std::string size_bin(std::uint64_t pixel_count);

// Label of one manifest entry for a field; "unlabeled" when absent.
std::string stratum_label(const ManifestEntry& entry, StratifyField field);

// One report per label present among the probes; the gallery is untouched.
// Unlabeled probes are left out and empty strata are absent from the map.
std::map<std::string, EvalReport> stratified_eval(const SimilarityMatrix& m, const Manifest& manifest,
                                                  StratifyField field);

struct FiveNumberSummary {
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};

// Quartiles by linear interpolation between order statistics.
FiveNumberSummary five_number_summary(std::vector<double> values);

struct SingleGalleryResult {
    std::vector<double> rank1;          // percent, one per run
    std::vector<std::size_t> n_probes;  // probes ranked in each run
    FiveNumberSummary summary;
};

// Run k keeps only the k-th gallery image (by sorted image_id) of every
// subject. All matrix probes take part; a probe whose own image is the kept
// gallery image has nothing to match in that run and is skipped.
SingleGalleryResult single_gallery_experiment(const SimilarityMatrix& m, const SubjectLabels& labels,
                                              int runs = 10);

struct SideCondition {
    Side probe_side;
    Side gallery_side;
    EvalReport report;
};

// left->left, right->right, left->right, right->left. Probes whose subject has
// no gallery image of the requested side are skipped.
std::vector<SideCondition> side_experiment(const SimilarityMatrix& m, const Manifest& manifest);

struct QualitativeRow {
    std::string probe_id;
    std::string subject_id;
    std::vector<std::string> top_gallery_ids;  // best image of each top-k identity
    std::vector<std::string> top_subjects;
    std::size_t correct_rank = 0;
};

std::vector<QualitativeRow> qualitative_report(const SimilarityMatrix& m, const SubjectLabels& labels,
                                               std::size_t k = 2, bool exclude_self = true);

// ---------------------------------------------------------------------------
// CSV emitters

void write_report_csv(std::ostream& out, std::span<const EvalReport> reports);
void write_cmc_points(std::ostream& out, const CmcCurve& curve);
void write_single_gallery_csv(std::ostream& out, const SingleGalleryResult& result);
void write_side_csv(std::ostream& out, std::span<const SideCondition> conditions);
void write_qualitative_csv(std::ostream& out, std::span<const QualitativeRow> rows);

}  // namespace uerc
