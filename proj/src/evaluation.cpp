#include "uerc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

#include "uerc/csv.hpp"
#include "uerc/error.hpp"

namespace uerc {

namespace {

const std::string& label_of(const SubjectLabels& labels, const std::string& id) {
    auto it = labels.find(id);
    if (it == labels.end()) throw Error("no subject label for image '" + id + "'");
    return it->second;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// Identity-level view of a set of gallery columns.
struct GalleryIdentities {
    std::vector<std::string> subjects;      // sorted ascending
    std::vector<std::size_t> col_subject;   // parallel to the column subset
    std::unordered_map<std::string, std::size_t> index;

    GalleryIdentities(const SimilarityMatrix& m, std::span<const std::size_t> cols,
                      const SubjectLabels& labels) {
        for (std::size_t c : cols) subjects.push_back(label_of(labels, m.gallery_ids[c]));
        std::vector<std::string> per_col = subjects;
        std::sort(subjects.begin(), subjects.end());
        subjects.erase(std::unique(subjects.begin(), subjects.end()), subjects.end());
        for (std::size_t i = 0; i < subjects.size(); ++i) index.emplace(subjects[i], i);
        col_subject.reserve(cols.size());
        for (const auto& s : per_col) col_subject.push_back(index.at(s));
    }
};

struct Collapsed {
    std::vector<float> best;
    std::vector<std::size_t> best_col;  // column (matrix index) achieving best
    std::vector<char> present;
};

Collapsed collapse_row(const SimilarityMatrix& m, std::size_t row, std::span<const std::size_t> cols,
                       const GalleryIdentities& ids, std::size_t self_col) {
    Collapsed out;
    out.best.assign(ids.subjects.size(), -std::numeric_limits<float>::infinity());
    out.best_col.assign(ids.subjects.size(), 0);
    out.present.assign(ids.subjects.size(), 0);
    for (std::size_t i = 0; i < cols.size(); ++i) {
        const std::size_t c = cols[i];
        if (c == self_col) continue;
        const std::size_t s = ids.col_subject[i];
        const float v = m.at(row, c);
        if (!out.present[s] || v > out.best[s] ||
            (v == out.best[s] && m.gallery_ids[c] < m.gallery_ids[out.best_col[s]])) {
            out.best[s] = v;
            out.best_col[s] = c;
            out.present[s] = 1;
        }
    }
    return out;
}

// True when identity a ranks ahead of identity b.
bool ahead(const Collapsed& r, std::size_t a, std::size_t b) {
    return r.best[a] > r.best[b] || (r.best[a] == r.best[b] && a < b);
}

std::vector<std::size_t> all_indices(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

std::size_t self_column(const SimilarityMatrix& m, std::size_t row,
                        const std::unordered_map<std::string, std::size_t>& gallery_index, bool exclude_self) {
    if (!exclude_self) return std::numeric_limits<std::size_t>::max();
    auto it = gallery_index.find(m.probe_ids[row]);
    return it == gallery_index.end() ? std::numeric_limits<std::size_t>::max() : it->second;
}

std::unordered_map<std::string, std::size_t> index_gallery(const SimilarityMatrix& m) {
    std::unordered_map<std::string, std::size_t> idx;
    for (std::size_t c = 0; c < m.cols(); ++c) idx.emplace(m.gallery_ids[c], c);
    return idx;
}

std::unordered_map<std::string, const ManifestEntry*> index_manifest(const Manifest& manifest) {
    std::unordered_map<std::string, const ManifestEntry*> idx;
    for (const auto& e : manifest) idx.emplace(e.image_id, &e);
    return idx;
}

const ManifestEntry& entry_of(const std::unordered_map<std::string, const ManifestEntry*>& idx,
                              const std::string& id) {
    auto it = idx.find(id);
    if (it == idx.end()) throw Error("matrix id '" + id + "' is not in the manifest");
    return *it->second;
}

}  // namespace

SubjectLabels subject_labels(const Manifest& entries) {
    SubjectLabels labels;
    for (const auto& e : entries) labels.emplace(e.image_id, e.subject_id);
    return labels;
}

CmcResult cmc_subset(const SimilarityMatrix& m, std::span<const std::size_t> rows,
                     std::span<const std::size_t> cols, const SubjectLabels& labels,
                     const CmcOptions& options) {
    if (m.scores.size() != m.rows() * m.cols()) throw Error("similarity matrix grid size mismatch");
    const GalleryIdentities ids(m, cols, labels);
    const auto gallery_index = index_gallery(m);

    CmcResult result;
    result.gallery_identities = ids.subjects.size();
    for (std::size_t row : rows) {
        const std::string& probe = m.probe_ids[row];
        const std::string& subject = label_of(labels, probe);
        const Collapsed collapsed =
            collapse_row(m, row, cols, ids, self_column(m, row, gallery_index, options.exclude_self));
        auto it = ids.index.find(subject);
        if (it == ids.index.end() || !collapsed.present[it->second]) {
            if (options.unenrolled == Unenrolled::skip) continue;
            throw Error("subject '" + subject + "' of probe '" + probe +
                        "' has no gallery image to match");
        }
        const std::size_t target = it->second;
        std::size_t rank = 1;
        for (std::size_t s = 0; s < ids.subjects.size(); ++s) {
            if (s != target && collapsed.present[s] && ahead(collapsed, s, target)) ++rank;
        }
        result.probe_rows.push_back(row);
        result.ranks.push_back(rank);
    }
    if (result.ranks.empty()) throw Error("no probes to evaluate");

    const std::size_t max_rank = ids.subjects.size();
    std::vector<std::size_t> hits(max_rank + 1, 0);
    for (std::size_t r : result.ranks) ++hits[r];
    result.curve.values.resize(max_rank);
    std::size_t cumulative = 0;
    for (std::size_t r = 1; r <= max_rank; ++r) {
        cumulative += hits[r];
        result.curve.values[r - 1] =
            static_cast<double>(cumulative) / static_cast<double>(result.ranks.size());
    }
    return result;
}

CmcResult cmc_detailed(const SimilarityMatrix& m, const SubjectLabels& labels, const CmcOptions& options) {
    const auto rows = all_indices(m.rows());
    const auto cols = all_indices(m.cols());
    return cmc_subset(m, rows, cols, labels, options);
}

CmcCurve cmc(const SimilarityMatrix& m, const SubjectLabels& labels, bool exclude_self) {
    return cmc_detailed(m, labels, {exclude_self, Unenrolled::error}).curve;
}

double rank_k(const CmcCurve& curve, std::size_t k) {
    if (k < 1 || k > curve.max_rank()) {
        throw Error("rank " + std::to_string(k) + " outside [1, " + std::to_string(curve.max_rank()) + "]");
    }
    return 100.0 * curve.values[k - 1];
}

double auc(const CmcCurve& curve) {
    if (curve.values.empty()) throw Error("empty CMC curve");
    double s = 0.0;
    for (double v : curve.values) s += v;
    return s / static_cast<double>(curve.values.size());
}

EvalReport make_report(const CmcResult& result, std::optional<std::string> stratum) {
    EvalReport r;
    r.curve = result.curve;
    r.rank1 = rank_k(r.curve, 1);
    r.rank5 = rank_k(r.curve, std::min<std::size_t>(5, r.curve.max_rank()));
    r.auc = auc(r.curve);
    r.n_probes = result.ranks.size();
    r.n_gallery_identities = result.gallery_identities;
    r.stratum = std::move(stratum);
    return r;
}

EvalReport evaluate(const SimilarityMatrix& m, const SubjectLabels& labels, bool exclude_self) {
    return make_report(cmc_detailed(m, labels, {exclude_self, Unenrolled::error}));
}

// ---------------------------------------------------------------------------

StratifyField parse_stratify_field(std::string_view text) {
    if (text == "pitch") return StratifyField::pitch;
    if (text == "roll") return StratifyField::roll;
    if (text == "yaw") return StratifyField::yaw;
    if (text == "occlusion") return StratifyField::occlusion;
    if (text == "gender") return StratifyField::gender;
    if (text == "size_bin") return StratifyField::size_bin;
    throw Error("unknown stratification field '" + std::string(text) + "'");
}

std::string_view to_string(StratifyField field) {
    switch (field) {
        case StratifyField::pitch: return "pitch";
        case StratifyField::roll: return "roll";
        case StratifyField::yaw: return "yaw";
        case StratifyField::occlusion: return "occlusion";
        case StratifyField::gender: return "gender";
        case StratifyField::size_bin: return "size_bin";
    }
    return "unknown";
}

std::string size_bin(std::uint64_t pixel_count) {
    if (pixel_count <= 1000) return "<=1000";
    if (pixel_count <= 5000) return "1000-5000";
    if (pixel_count <= 10000) return "5000-10000";
    return ">10000";
}

std::string stratum_label(const ManifestEntry& e, StratifyField field) {
    switch (field) {
        case StratifyField::pitch: return std::string(to_string(e.pitch));
        case StratifyField::roll: return std::string(to_string(e.roll));
        case StratifyField::yaw: return std::string(to_string(e.yaw));
        case StratifyField::occlusion: return std::string(to_string(e.occlusion));
        case StratifyField::gender: return std::string(to_string(e.gender));
        case StratifyField::size_bin: return size_bin(e.pixel_count);
    }
    return "unlabeled";
}

std::map<std::string, EvalReport> stratified_eval(const SimilarityMatrix& m, const Manifest& manifest,
                                                  StratifyField field) {
    const auto idx = index_manifest(manifest);
    const auto labels = subject_labels(manifest);
    std::map<std::string, std::vector<std::size_t>> strata;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const std::string label = stratum_label(entry_of(idx, m.probe_ids[r]), field);
        if (label != "unlabeled") strata[label].push_back(r);
    }
    for (const auto& g : m.gallery_ids) entry_of(idx, g);
    const auto cols = all_indices(m.cols());
    std::map<std::string, EvalReport> out;
    for (const auto& [label, rows] : strata) {
        out.emplace(label, make_report(cmc_subset(m, rows, cols, labels), label));
    }
    return out;
}

FiveNumberSummary five_number_summary(std::vector<double> values) {
    if (values.empty()) throw Error("five-number summary of an empty sample");
    std::sort(values.begin(), values.end());
    auto quantile = [&](double q) {
        const double h = (static_cast<double>(values.size()) - 1.0) * q;
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
    };
    return {values.front(), quantile(0.25), quantile(0.5), quantile(0.75), values.back()};
}

SingleGalleryResult single_gallery_experiment(const SimilarityMatrix& m, const SubjectLabels& labels,
                                              int runs) {
    if (runs < 1) throw Error("single-gallery experiment needs at least one run");
    std::map<std::string, std::vector<std::size_t>> by_subject;
    for (std::size_t c = 0; c < m.cols(); ++c) by_subject[label_of(labels, m.gallery_ids[c])].push_back(c);
    for (auto& [subject, cols] : by_subject) {
        if (cols.size() < static_cast<std::size_t>(runs)) {
            throw Error("subject '" + subject + "' has " + std::to_string(cols.size()) +
                        " gallery images, fewer than " + std::to_string(runs) + " runs");
        }
        std::sort(cols.begin(), cols.end(),
                  [&](std::size_t a, std::size_t b) { return m.gallery_ids[a] < m.gallery_ids[b]; });
    }
    const auto rows = all_indices(m.rows());
    SingleGalleryResult result;
    for (int k = 0; k < runs; ++k) {
        std::vector<std::size_t> cols;
        for (const auto& [subject, subject_cols] : by_subject) cols.push_back(subject_cols[k]);
        std::sort(cols.begin(), cols.end());
        const CmcResult r = cmc_subset(m, rows, cols, labels, {true, Unenrolled::skip});
        result.rank1.push_back(rank_k(r.curve, 1));
        result.n_probes.push_back(r.ranks.size());
    }
    result.summary = five_number_summary(result.rank1);
    return result;
}

std::vector<SideCondition> side_experiment(const SimilarityMatrix& m, const Manifest& manifest) {
    const auto idx = index_manifest(manifest);
    const auto labels = subject_labels(manifest);
    std::vector<Side> row_side(m.rows()), col_side(m.cols());
    bool any = false;
    for (std::size_t r = 0; r < m.rows(); ++r) {
        row_side[r] = entry_of(idx, m.probe_ids[r]).side;
        any = any || row_side[r] != Side::unknown;
    }
    for (std::size_t c = 0; c < m.cols(); ++c) col_side[c] = entry_of(idx, m.gallery_ids[c]).side;
    if (!any) throw Error("no probe carries a left/right side label");

    const std::pair<Side, Side> conditions[] = {
        {Side::left, Side::left}, {Side::right, Side::right},
        {Side::left, Side::right}, {Side::right, Side::left}};
    std::vector<SideCondition> out;
    for (auto [ps, gs] : conditions) {
        const std::string name = std::string(to_string(ps)) + "->" + std::string(to_string(gs));
        std::vector<std::size_t> rows, cols;
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (row_side[r] == ps) rows.push_back(r);
        }
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (col_side[c] == gs) cols.push_back(c);
        }
        if (rows.empty() || cols.empty()) throw Error("side condition " + name + " is empty");
        CmcResult r;
        try {
            r = cmc_subset(m, rows, cols, labels, {true, Unenrolled::skip});
        } catch (const Error& e) {
            throw Error("side condition " + name + ": " + e.what());
        }
        out.push_back({ps, gs, make_report(r, name)});
    }
    return out;
}

std::vector<QualitativeRow> qualitative_report(const SimilarityMatrix& m, const SubjectLabels& labels,
                                               std::size_t k, bool exclude_self) {
    const auto cols = all_indices(m.cols());
    const GalleryIdentities ids(m, cols, labels);
    if (k < 1 || k > ids.subjects.size()) {
        throw Error("top-k of " + std::to_string(k) + " exceeds the " +
                    std::to_string(ids.subjects.size()) + " gallery identities");
    }
    const CmcResult ranked = cmc_detailed(m, labels, {exclude_self, Unenrolled::error});
    const auto gallery_index = index_gallery(m);
    std::vector<QualitativeRow> out;
    for (std::size_t i = 0; i < ranked.probe_rows.size(); ++i) {
        const std::size_t row = ranked.probe_rows[i];
        const Collapsed c = collapse_row(m, row, cols, ids, self_column(m, row, gallery_index, exclude_self));
        std::vector<std::size_t> order;
        for (std::size_t s = 0; s < ids.subjects.size(); ++s) {
            if (c.present[s]) order.push_back(s);
        }
        const std::size_t take = std::min(k, order.size());
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                          [&](std::size_t a, std::size_t b) { return ahead(c, a, b); });
        QualitativeRow q;
        q.probe_id = m.probe_ids[row];
        q.subject_id = label_of(labels, q.probe_id);
        q.correct_rank = ranked.ranks[i];
        for (std::size_t j = 0; j < take; ++j) {
            q.top_gallery_ids.push_back(m.gallery_ids[c.best_col[order[j]]]);
            q.top_subjects.push_back(ids.subjects[order[j]]);
        }
        out.push_back(std::move(q));
    }
    return out;
}

// ---------------------------------------------------------------------------

void write_report_csv(std::ostream& out, std::span<const EvalReport> reports) {
    csv::write_row(out, {"stratum", "n_probes", "n_gallery_identities", "rank1", "rank5", "auc"});
    for (const auto& r : reports) {
        csv::write_row(out, {r.stratum.value_or("all"), std::to_string(r.n_probes),
                             std::to_string(r.n_gallery_identities), fmt(r.rank1), fmt(r.rank5), fmt(r.auc)});
    }
}

void write_cmc_points(std::ostream& out, const CmcCurve& curve) {
    out << "rank,value\n";
    for (std::size_t r = 0; r < curve.values.size(); ++r) out << r + 1 << ',' << fmt(curve.values[r]) << '\n';
}

void write_single_gallery_csv(std::ostream& out, const SingleGalleryResult& result) {
    csv::write_row(out, {"run", "n_probes", "rank1", "min", "q1", "median", "q3", "max"});
    for (std::size_t i = 0; i < result.rank1.size(); ++i) {
        csv::write_row(out, {std::to_string(i + 1), std::to_string(result.n_probes[i]), fmt(result.rank1[i]),
                             "", "", "", "", ""});
    }
    const auto& s = result.summary;
    csv::write_row(out, {"summary", "", "", fmt(s.min), fmt(s.q1), fmt(s.median), fmt(s.q3), fmt(s.max)});
}

void write_side_csv(std::ostream& out, std::span<const SideCondition> conditions) {
    csv::write_row(out, {"probe_side", "gallery_side", "n_probes", "n_gallery_identities", "rank1", "rank5", "auc"});
    for (const auto& c : conditions) {
        csv::write_row(out, {std::string(to_string(c.probe_side)), std::string(to_string(c.gallery_side)),
                             std::to_string(c.report.n_probes), std::to_string(c.report.n_gallery_identities),
                             fmt(c.report.rank1), fmt(c.report.rank5), fmt(c.report.auc)});
    }
}

void write_qualitative_csv(std::ostream& out, std::span<const QualitativeRow> rows) {
    std::size_t k = 0;
    for (const auto& r : rows) k = std::max(k, r.top_gallery_ids.size());
    std::vector<std::string> header{"probe_id", "subject_id", "correct_rank"};
    for (std::size_t j = 1; j <= k; ++j) {
        header.push_back("match" + std::to_string(j) + "_id");
        header.push_back("match" + std::to_string(j) + "_subject");
    }
    csv::write_row(out, header);
    for (const auto& r : rows) {
        std::vector<std::string> cells{r.probe_id, r.subject_id, std::to_string(r.correct_rank)};
        for (std::size_t j = 0; j < k; ++j) {
            cells.push_back(j < r.top_gallery_ids.size() ? r.top_gallery_ids[j] : "");
            cells.push_back(j < r.top_subjects.size() ? r.top_subjects[j] : "");
        }
        csv::write_row(out, cells);
    }
}

}  // namespace uerc
