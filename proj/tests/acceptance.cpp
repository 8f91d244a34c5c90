// Acceptance suite: one PASS/FAIL (or SKIP) line per criterion, exit status 1
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cmc_oracle.hpp"
#include "fixtures.hpp"
#include "uerc/cli.hpp"
#include "uerc/descriptors.hpp"
#include "uerc/evaluation.hpp"
#include "uerc/image_io.hpp"
#include "uerc/matching.hpp"
#include "uerc/protocol.hpp"

using namespace uerc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [x]");
    }
};

int failures = 0;

void criterion(int id, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out.pass = false;
        out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (limit_s > 0) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f s (limit %.0f s)", secs, limit_s);
        out.require(secs < limit_s, buf);
    }
    if (!out.pass) ++failures;
    std::printf("%s %2d %s: %s\n", out.pass ? "PASS" : "FAIL", id, name.c_str(), out.detail.c_str());
    std::fflush(stdout);
}

void skip(int id, const std::string& name, const std::string& why) {
    std::printf("SKIP %2d %s: %s\n", id, name.c_str(), why.c_str());
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// Closed forms written out independently of the library's window counting.
std::size_t lbp_length(int w, int h) {
    if (w < 16 || h < 16) return 0;
    return static_cast<std::size_t>((w - 16) / 4 + 1) * static_cast<std::size_t>((h - 16) / 4 + 1) * 59;
}

std::size_t chainlets_length(int w, int h) {
    const int bx = w / 8 - 1, by = h / 8 - 1;
    if (bx < 1 || by < 1) return 0;
    return static_cast<std::size_t>(bx) * static_cast<std::size_t>(by) * 32;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Outcome descriptor_lengths() {
    Outcome o;
    std::mt19937_64 rng(42);
    const auto square = fixtures::random_gray(100, 100, rng);
    const auto lbp = lbp_descriptor(square).values.size();
    const auto ch = chainlets_descriptor(square).values.size();
    o.require(lbp == 28556, "lbp 100x100 = " + std::to_string(lbp) + " (want 28556)");
    o.require(ch == 4608, "chainlets 100x100 = " + std::to_string(ch) + " (want 4608)");
    o.require(ch == chainlets_length(100, 100), "chainlets 100x100 matches closed form " +
                                                     std::to_string(chainlets_length(100, 100)));
    std::uniform_int_distribution<int> size(16, 160);
    int agree = 0;
    for (int i = 0; i < 50; ++i) {
        const int w = size(rng), h = size(rng);
        const auto img = fixtures::random_gray(w, h, rng);
        agree += lbp_descriptor(img).values.size() == lbp_length(w, h) &&
                 chainlets_descriptor(img).values.size() == chainlets_length(w, h);
    }
    o.require(agree == 50, "closed form holds for " + std::to_string(agree) + "/50 random sizes");
    return o;
}

Outcome uniform_bins() {
    Outcome o;
    int uniform = 0;
    std::set<int> bins;
    for (int code = 0; code < 256; ++code) {
        int transitions = 0;
        for (int i = 0; i < 8; ++i) transitions += ((code >> i) & 1) != ((code >> ((i + 1) % 8)) & 1);
        uniform += transitions <= 2;
        bins.insert(uniform_bin(code));
    }
    o.require(uniform == 58, std::to_string(uniform) + " uniform patterns");
    o.require(bins.size() == 59 && *bins.begin() == 0 && *bins.rbegin() == 58,
              std::to_string(bins.size()) + " distinct bins");
    return o;
}

Outcome chain_rotation() {
    Outcome o;
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> len(2, 60), dir(0, 7);
    int same = 0, total = 0;
    for (int i = 0; i < 1000; ++i) {
        ChainCode chain;
        chain.start = {0, 0};
        chain.moves.resize(static_cast<std::size_t>(len(rng)));
        for (auto& m : chain.moves) m = dir(rng);
        const auto base = relative_chain_code(chain);
        for (int k = 0; k < 8; ++k) {
            ChainCode shifted = chain;
            for (auto& m : shifted.moves) m = (m + k) % 8;
            same += relative_chain_code(shifted) == base;
            ++total;
        }
    }
    o.require(same == total, std::to_string(same) + "/" + std::to_string(total) + " shifted chains identical");
    return o;
}

// Random matrix whose probes are gallery images of identities with at least
// two gallery images. Half the fixtures use coarse scores to force ties.
struct Fixture {
    SimilarityMatrix m;
    SubjectLabels labels;
};

Fixture random_fixture(std::mt19937_64& rng) {
    Fixture f;
    std::uniform_int_distribution<int> n_id(1, 5), n_gal(2, 12);
    const int ids = n_id(rng);
    const int gal = std::max(n_gal(rng), 2);
    std::uniform_int_distribution<int> pick(0, ids - 1);
    std::vector<int> subject(static_cast<std::size_t>(gal));
    for (auto& s : subject) s = pick(rng);
    subject[1] = subject[0];  // at least one identity with two images
    for (int g = 0; g < gal; ++g) {
        const std::string id = "g" + std::to_string(10 + g);
        f.m.gallery_ids.push_back(id);
        f.labels[id] = "S" + std::to_string(subject[static_cast<std::size_t>(g)]);
    }
    std::vector<std::size_t> eligible;
    for (int g = 0; g < gal; ++g)
        if (std::count(subject.begin(), subject.end(), subject[static_cast<std::size_t>(g)]) >= 2)
            eligible.push_back(static_cast<std::size_t>(g));
    std::shuffle(eligible.begin(), eligible.end(), rng);
    const std::size_t probes = std::min<std::size_t>(eligible.size(), std::uniform_int_distribution<std::size_t>(1, 8)(rng));
    eligible.resize(probes);
    std::sort(eligible.begin(), eligible.end());
    for (auto g : eligible) f.m.probe_ids.push_back(f.m.gallery_ids[g]);
    const bool coarse = std::bernoulli_distribution(0.5)(rng);
    std::uniform_real_distribution<float> real(-1.0f, 1.0f);
    std::uniform_int_distribution<int> level(0, 3);
    for (std::size_t i = 0; i < probes * static_cast<std::size_t>(gal); ++i)
        f.m.scores.push_back(coarse ? static_cast<float>(level(rng)) : real(rng));
    return f;
}

Outcome cmc_equivalence() {
    Outcome o;
    std::mt19937_64 rng(42);
    int rank_match = 0, curve_match = 0, derived_match = 0;
    for (int i = 0; i < 500; ++i) {
        const auto f = random_fixture(rng);
        const auto ref = oracle::cmc(f.m, f.labels, true);
        const auto got = cmc_detailed(f.m, f.labels);
        rank_match += got.ranks == ref.ranks;
        bool curve_ok = got.curve.values.size() == ref.curve.size();
        bool derived_ok = curve_ok;
        for (std::size_t k = 0; curve_ok && k < ref.curve.size(); ++k) {
            curve_ok = std::abs(got.curve.values[k] - ref.curve[k]) <= 1e-12;
            derived_ok = derived_ok && std::abs(rank_k(got.curve, k + 1) - 100.0 * ref.curve[k]) <= 1e-12 * 100.0;
        }
        derived_ok = derived_ok && std::abs(auc(got.curve) - oracle::auc(ref.curve)) <= 1e-12;
        curve_match += curve_ok;
        derived_match += derived_ok;
    }
    o.require(rank_match == 500, "ranks bitwise equal on " + std::to_string(rank_match) + "/500");
    o.require(curve_match == 500, "CMC within 1e-12 on " + std::to_string(curve_match) + "/500");
    o.require(derived_match == 500, "rank-k and AUC within 1e-12 on " + std::to_string(derived_match) + "/500");
    return o;
}

// Identities S0..S{r-1}, each with `per` gallery images; every image is a probe.
Fixture balanced(int identities, int per) {
    Fixture f;
    for (int s = 0; s < identities; ++s) {
        for (int i = 0; i < per; ++i) {
            char id[32];
            std::snprintf(id, sizeof id, "s%03d_%02d", s, i);
            f.m.gallery_ids.push_back(id);
            f.labels[id] = "S" + std::to_string(s);
        }
    }
    return f;
}

Outcome metric_sanity() {
    Outcome o;
    {
        auto f = balanced(20, 3);
        f.m.probe_ids = f.m.gallery_ids;
        for (const auto& p : f.m.probe_ids)
            for (const auto& g : f.m.gallery_ids) f.m.scores.push_back(f.labels[p] == f.labels[g] ? 1.0f : 0.0f);
        const auto r = evaluate(f.m, f.labels);
        o.require(r.rank1 == 100.0 && r.auc == 1.0, "perfect scorer rank-1 " + num(r.rank1) + ", AUC " + num(r.auc));
    }
    for (int identities : {2, 7, 50}) {
        auto f = balanced(identities, 2);
        f.m.probe_ids = f.m.gallery_ids;
        std::mt19937_64 rng(static_cast<std::uint64_t>(identities));
        std::uniform_real_distribution<float> u(0.0f, 1.0f);
        for (const auto& p : f.m.probe_ids)
            for (const auto& g : f.m.gallery_ids) f.m.scores.push_back(f.labels[p] == f.labels[g] ? -1.0f : u(rng));
        const auto a = evaluate(f.m, f.labels).auc;
        o.require(std::abs(a - 1.0 / identities) <= 1e-12,
                  "always-last AUC " + num(a) + " vs 1/" + std::to_string(identities));
    }
    return o;
}

Outcome random_auc() {
    Outcome o;
    // Self-exclusion leaves a probe's identity one image short of the others,
    // so each identity gets enough gallery images to keep that bias small.
    auto f = balanced(50, 20);
    for (std::size_t g = 0; g < f.m.gallery_ids.size(); g += 5) f.m.probe_ids.push_back(f.m.gallery_ids[g]);
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    f.m.scores.resize(f.m.rows() * f.m.cols());
    for (auto& s : f.m.scores) s = u(rng);
    const auto r = evaluate(f.m, f.labels);
    o.require(r.n_probes == 200 && r.n_gallery_identities == 50,
              std::to_string(r.n_probes) + " probes x " + std::to_string(r.n_gallery_identities) + " identities");
    o.require(r.auc >= 0.45 && r.auc <= 0.55, "AUC " + num(r.auc) + " in [0.45, 0.55]");
    return o;
}

Outcome zscore_fusion() {
    Outcome o;
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-50.0, 50.0), scale(0.01, 100.0);
    std::uniform_int_distribution<int> len(2, 200);
    double worst_moment = 0.0, worst_affine = 0.0;
    int argmax_same = 0;
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> x(static_cast<std::size_t>(len(rng)));
        for (auto& v : x) v = u(rng);
        const auto z = zscore_normalize(x);
        const double n = static_cast<double>(z.size());
        const double mean = std::accumulate(z.begin(), z.end(), 0.0) / n;
        double var = 0.0;
        for (double v : z) var += (v - mean) * (v - mean);
        worst_moment = std::max({worst_moment, std::abs(mean), std::abs(std::sqrt(var / n) - 1.0)});

        const double a = scale(rng), b = u(rng);
        std::vector<double> y(x.size());
        std::transform(x.begin(), x.end(), y.begin(), [&](double v) { return a * v + b; });
        const auto zy = zscore_normalize(y);
        for (std::size_t k = 0; k < z.size(); ++k) worst_affine = std::max(worst_affine, std::abs(z[k] - zy[k]));

        std::vector<std::vector<double>> rows(3, std::vector<double>(x.size()));
        for (auto& row : rows)
            for (auto& v : row) v = u(rng);
        const double c = scale(rng);
        auto scaled = rows;
        for (auto& row : scaled)
            for (auto& v : row) v *= c;
        const auto f1 = fuse_rows(rows), f2 = fuse_rows(scaled);
        argmax_same += std::max_element(f1.begin(), f1.end()) - f1.begin() ==
                       std::max_element(f2.begin(), f2.end()) - f2.begin();
    }
    o.require(worst_moment <= 1e-9, "mean/sigma error " + num(worst_moment));
    o.require(worst_affine <= 1e-9, "affine error " + num(worst_affine));
    o.require(argmax_same == 1000, "fused argmax kept on " + std::to_string(argmax_same) + "/1000");
    return o;
}

// Id-only replica of the published data partition table.
Manifest table_replica() {
    Manifest m;
    int serial = 0;
    auto add = [&](const std::string& subject, int images, Origin origin, PartitionLabel part) {
        for (int i = 0; i < images; ++i) {
            auto e = fixtures::entry("img" + std::to_string(100000 + serial++), subject, part);
            e.origin = origin;
            m.push_back(e);
        }
    };
    // Auxiliary set: 804 images of 16 subjects, variable counts.
    for (int s = 0; s < 16; ++s) add("aux" + std::to_string(s), s < 15 ? 30 + 3 * s : 39, Origin::awe_aux, PartitionLabel::train);
    for (int s = 0; s < 150; ++s) add("awe" + std::to_string(s), 10, Origin::awe, PartitionLabel::train);
    for (int s = 150; s < 330; ++s) add("awe" + std::to_string(s), 10, Origin::awe, PartitionLabel::test);
    // New set: 7,700 images of 3,360 subjects. 2,058 singletons; the other
    // 1,302 subjects hold 5,642 images (434 with five, 868 with four).
    for (int s = 0; s < 3360; ++s) add("new" + std::to_string(s), s < 2058 ? 1 : s < 2058 + 434 ? 5 : 4, Origin::uerc_new, PartitionLabel::test);
    return m;
}

Outcome protocol_counts() {
    Outcome o;
    const auto manifest = table_replica();
    const auto split = partition(manifest);
    const auto train = count_part(split.train), test = count_part(split.test);
    o.require(train == PartCounts{2304, 166},
              "train " + std::to_string(train.images) + " (" + std::to_string(train.subjects) + ")");
    o.require(test == PartCounts{9500, 3540},
              "test " + std::to_string(test.images) + " (" + std::to_string(test.subjects) + ")");
    verify_counts(split, {2304, 166}, {9500, 3540});
    const auto gallery = build_gallery(split.test);
    const auto probes = build_probes(split.test);
    o.require(gallery.size() == 9500, "gallery " + std::to_string(gallery.size()));

    std::map<std::string, int> per_subject;
    for (const auto& e : split.test) ++per_subject[e.subject_id];
    std::vector<std::string> expected;
    for (const auto& e : split.test)
        if (per_subject[e.subject_id] >= 2) expected.push_back(e.image_id);
    std::sort(expected.begin(), expected.end());
    const auto labels = subject_labels(manifest);
    std::set<std::string> probe_subjects;
    for (const auto& p : probes) probe_subjects.insert(labels.at(p));
    o.require(probes == expected, "probes " + std::to_string(probes.size()) + " of " +
                                      std::to_string(probe_subjects.size()) + " subjects, all images of multi-image subjects");
    return o;
}

Outcome matrix_round_trip() {
    Outcome o;
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<float> u(-1e6f, 1e6f);
    std::uniform_int_distribution<int> id_len(1, 24);
    SimilarityMatrix m;
    std::set<std::string> used;
    while (m.gallery_ids.size() < 150) {
        std::string id = "id" + std::to_string(m.gallery_ids.size()) + "_";
        id.append(static_cast<std::size_t>(id_len(rng)), 'x');
        if (used.insert(id).second) m.gallery_ids.push_back(id);
    }
    m.probe_ids.assign(m.gallery_ids.begin(), m.gallery_ids.begin() + 100);
    m.scores.resize(100 * 150);
    for (auto& s : m.scores) s = u(rng);

    std::ostringstream first;
    write_matrix(first, m);
    std::istringstream in(first.str());
    const auto back = read_matrix(in);
    const bool ids_same = back.probe_ids == m.probe_ids && back.gallery_ids == m.gallery_ids;
    const bool bits_same = back.scores.size() == m.scores.size() &&
                           std::memcmp(back.scores.data(), m.scores.data(), m.scores.size() * sizeof(float)) == 0;
    std::ostringstream second;
    write_matrix(second, back);
    o.require(ids_same && bits_same && second.str() == first.str(), "read back bit-identical");

    std::uint64_t header = 24;
    for (const auto& id : m.probe_ids) header += id.size() + 1;
    for (const auto& id : m.gallery_ids) header += id.size() + 1;
    o.require(matrix_header_size(m) == header && first.str().size() == header + 100 * 150 * 4 &&
                  matrix_file_size(m) == first.str().size(),
              "header " + std::to_string(header) + " + payload 60000 = " + std::to_string(first.str().size()) + " bytes");
    return o;
}

Outcome thread_determinism() {
    Outcome o;
    const auto dir = fixtures::scratch_dir("acceptance_threads");
    std::mt19937_64 rng(42);
    Manifest manifest;
    for (int s = 0; s < 10; ++s) {
        for (int i = 0; i < 5; ++i) {
            auto e = fixtures::entry("s" + std::to_string(s) + "_" + std::to_string(i), "S" + std::to_string(s));
            save_image(dir / e.path, fixtures::random_color(60, 90, rng));
            manifest.push_back(e);
        }
    }
    write_manifest(dir / "manifest.csv", manifest);

    std::ostringstream log;
    cli::RunConfig cfg;
    cfg.manifest = dir / "manifest.csv";
    cfg.images_root = dir;
    cfg.command = "extract";
    cfg.descriptor = "lbp";
    cfg.out = dir / "lbp.bin";
    cfg.threads = 4;
    o.require(cli::cmd_extract(cfg, log) == 0, "extracted 50 images");

    cfg = {};
    cfg.manifest = dir / "manifest.csv";
    cfg.command = "score";
    cfg.descriptor_files = {dir / "lbp.bin"};
    std::string bytes[2];
    const int threads[2] = {1, 8};
    for (int i = 0; i < 2; ++i) {
        cfg.threads = threads[i];
        cfg.matrix = dir / ("m" + std::to_string(threads[i]) + ".bin");
        o.require(cli::cmd_score(cfg, log) == 0, "scored with " + std::to_string(threads[i]) + " thread(s)");
        bytes[i] = slurp(cfg.matrix);
    }
    o.require(!bytes[0].empty() && bytes[0] == bytes[1],
              "matrix files byte-identical (" + std::to_string(bytes[0].size()) + " bytes)");
    return o;
}

Outcome awe_lbp(const char* manifest, const char* root) {
    Outcome o;
    const auto dir = fixtures::scratch_dir("acceptance_awe");
    std::ostringstream log;
    cli::RunConfig cfg;
    cfg.manifest = manifest;
    if (root != nullptr) cfg.images_root = root;
    cfg.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    cfg.command = "extract";
    cfg.descriptor = "lbp";
    cfg.out = dir / "lbp.bin";
    o.require(cli::cmd_extract(cfg, log) == 0, "extracted");
    cfg.command = "score";
    cfg.descriptor.reset();
    cfg.descriptor_files = {dir / "lbp.bin"};
    cfg.origin = "awe";
    cfg.matrix = dir / "m.bin";
    o.require(cli::cmd_score(cfg, log) == 0, "scored");
    const auto m = read_matrix(cfg.matrix);
    const auto r = evaluate(m, subject_labels(load_manifest(cfg.manifest)));
    o.require(m.rows() == 1800 && m.cols() == 1800, std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    o.require(std::abs(r.rank1 - 14.3) <= 3.0, "rank-1 " + num(r.rank1) + " vs 14.3 +-3");
    o.require(std::abs(r.rank5 - 28.6) <= 3.0, "rank-5 " + num(r.rank5) + " vs 28.6 +-3");
    o.require(std::abs(r.auc - 0.759) <= 0.03, "AUC " + num(r.auc) + " vs 0.759 +-0.03");
    return o;
}

}  // namespace

int main() {
    criterion(1, "descriptor-length laws", 5, descriptor_lengths);
    criterion(2, "uniform LBP bin count", 0, uniform_bins);
    criterion(3, "relative chain code rotation invariance", 0, chain_rotation);
    criterion(4, "CMC oracle equivalence", 10, cmc_equivalence);
    criterion(5, "metric sanity", 0, metric_sanity);
    criterion(6, "random-score AUC", 5, random_auc);
    criterion(7, "z-score and fusion contracts", 0, zscore_fusion);
    criterion(8, "protocol counts on partition replica", 0, protocol_counts);
    criterion(9, "matrix round trip", 0, matrix_round_trip);
    criterion(10, "score determinism across threads", 30, thread_determinism);
    const char* awe = std::getenv("UERC_AWE_MANIFEST");
    if (awe == nullptr) {
        skip(11, "AWE LBP reproduction", "set UERC_AWE_MANIFEST (and UERC_AWE_ROOT) to run");
    } else {
        criterion(11, "AWE LBP reproduction", 600, [&] { return awe_lbp(awe, std::getenv("UERC_AWE_ROOT")); });
    }
    std::printf("%d criterion(s) failed\n", failures);
    return failures == 0 ? 0 : 1;
}
