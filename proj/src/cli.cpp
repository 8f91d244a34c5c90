#include "uerc/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <thread>
#include <unordered_set>

#include <CLI11.hpp>

#include "uerc/csv.hpp"
#include "uerc/descriptor_io.hpp"
#include "uerc/evaluation.hpp"
#include "uerc/image_io.hpp"
#include "uerc/imaging.hpp"
#include "uerc/matching.hpp"
#include "uerc/parallel.hpp"
#include "uerc/pipeline.hpp"
#include "uerc/protocol.hpp"
#include "uerc/side_classifier.hpp"

namespace uerc::cli {

namespace {

const std::vector<std::string> kCommands = {"extract", "score", "eval", "stratify", "resample", "sides", "report"};

std::filesystem::path image_path(const RunConfig& config, const ManifestEntry& e) {
    const std::filesystem::path p(e.path);
    return p.is_absolute() || config.images_root.empty() ? p : config.images_root / p;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

Origin parse_origin(const std::string& text) {
    for (Origin o : {Origin::awe, Origin::awe_aux, Origin::uerc_new}) {
        if (to_string(o) == text) return o;
    }
    throw Error("unknown origin '" + text + "'");
}

// Every matrix id must resolve to a manifest entry.
void check_matrix_ids(const SimilarityMatrix& m, const Manifest& manifest) {
    std::unordered_set<std::string> ids;
    for (const auto& e : manifest) ids.insert(e.image_id);
    for (const auto& id : m.probe_ids) {
        if (!ids.contains(id)) throw Error("matrix probe id '" + id + "' is not in the manifest");
    }
    for (const auto& id : m.gallery_ids) {
        if (!ids.contains(id)) throw Error("matrix gallery id '" + id + "' is not in the manifest");
    }
}

std::string file_tag(const std::string& label) {
    std::string out;
    for (char c : label) {
        if (c == '<') out += "lt";
        else if (c == '>') out += "gt";
        else if (c == '=') out += "e";
        else if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') out += c;
        else out += '_';
    }
    return out;
}

Metric default_metric(DescriptorKind kind) {
    return kind == DescriptorKind::chainlets ? Metric::chi_square : Metric::cosine;
}

SideModel train_side_model(const RunConfig& config, const Manifest& manifest, std::ostream& log) {
    std::vector<const ManifestEntry*> train;
    for (const auto& e : manifest) {
        if (e.partition == PartitionLabel::train && e.side != Side::unknown) train.push_back(&e);
    }
    std::vector<std::vector<float>> features(train.size());
    std::vector<Side> labels(train.size());
    parallel_for(train.size(), config.threads, [&](std::size_t i) {
        features[i] = side_features(to_grayscale(load_image(image_path(config, *train[i]))));
        labels[i] = train[i]->side;
    });
    SideTrainingParams params;
    params.seed = config.seed;
    SideModel model = train_side_classifier_on_features(features, labels, params);
    log << "side classifier trained on " << train.size() << " images, hinge loss "
        << side_hinge_loss(model, features, labels) << '\n';
    return model;
}

}  // namespace

std::filesystem::path sibling_path(const std::filesystem::path& out, const std::string& tag) {
    std::filesystem::path p = out;
    const std::string ext = out.has_extension() ? out.extension().string() : std::string(".csv");
    p.replace_filename(out.stem().string() + "_" + tag + ext);
    return p;
}

void RunConfig::validate() const {
    if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end()) {
        throw Error("unknown command '" + command + "'");
    }
    if (threads < 1) throw Error("--threads must be >= 1");
    parse_flip_mode(flip);
    for (const auto& d : distances) parse_metric(d);
    if (descriptor) parse_descriptor_kind(*descriptor);
    if (manifest.empty()) throw Error("--manifest is required");
    if (command == "extract") {
        if (!descriptor) throw Error("extract needs --descriptor");
        if (parse_descriptor_kind(*descriptor) == DescriptorKind::external) {
            throw Error("external descriptors are produced outside the toolkit; write them in the descriptor container");
        }
        if (out.empty()) throw Error("extract needs --out");
    } else if (command == "score") {
        if (descriptor_files.empty()) throw Error("score needs at least one --descriptors file");
        if (matrix.empty()) throw Error("score needs --matrix");
        if (distances.size() > 1 && distances.size() != descriptor_files.size()) {
            throw Error("give one --distance, or one per --descriptors file");
        }
    } else {
        if (matrix.empty()) throw Error(command + " needs --matrix");
        if (out.empty()) throw Error(command + " needs --out");
        if (command == "stratify") parse_stratify_field(stratify_field);
        if (command == "resample" && runs < 1) throw Error("--runs must be >= 1");
        if (command == "report" && top_k < 1) throw Error("--top-k must be >= 1");
    }
}

int cmd_extract(const RunConfig& config, std::ostream& log) {
    config.validate();
    const Manifest manifest = load_manifest(config.manifest);
    const DescriptorPipeline pipeline = default_pipeline(parse_descriptor_kind(*config.descriptor));
    const FlipMode flip = parse_flip_mode(config.flip);

    std::optional<SideModel> side_model;
    if (flip == FlipMode::classifier) side_model = train_side_model(config, manifest, log);

    const std::size_t n = manifest.size();
    std::vector<std::vector<float>> original(n), mirrored(n);
    std::vector<std::string> failures(n);
    parallel_for(n, config.threads, [&](std::size_t i) {
        try {
            ColorImage img = load_image(image_path(config, manifest[i]));
            if (side_model && predict_side(*side_model, to_grayscale(img)) == Side::left) {
                img = flip_horizontal(img);
            }
            original[i] = pipeline.extract(img).values;
            if (flip == FlipMode::sum) mirrored[i] = pipeline.extract(flip_horizontal(img)).values;
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    });

    DescriptorSet set;
    set.kind = pipeline.kind;
    set.fingerprint = pipeline.fingerprint();
    set.length = pipeline.length();
    std::vector<std::pair<std::string, std::string>> failed;
    for (std::size_t i = 0; i < n; ++i) {
        if (!failures[i].empty()) {
            failed.emplace_back(manifest[i].image_id, failures[i]);
            continue;
        }
        set.add({manifest[i].image_id, false, std::move(original[i])});
        if (flip == FlipMode::sum) set.add({manifest[i].image_id, true, std::move(mirrored[i])});
    }
    write_descriptors(config.out, set);
    log << "wrote " << (n - failed.size()) << " descriptors (" << set.length << " dims) to "
        << config.out.string() << '\n';
    if (!failed.empty()) {
        const auto path = sibling_path(config.out, "failures");
        auto out = open_out(path);
        csv::write_row(out, {"image_id", "error"});
        for (const auto& [id, msg] : failed) {
            csv::write_row(out, {id, msg});
            log << "failed: " << id << ": " << msg << '\n';
        }
        log << failed.size() << " images failed; see " << path.string() << '\n';
        return 1;
    }
    return 0;
}

int cmd_score(const RunConfig& config, std::ostream& log) {
    config.validate();
    const FlipMode flip = parse_flip_mode(config.flip);
    const Manifest manifest = load_manifest(config.manifest);
    Manifest test = partition(manifest).test;
    if (config.origin) {
        const Origin origin = parse_origin(*config.origin);
        std::erase_if(test, [&](const ManifestEntry& e) { return e.origin != origin; });
    }
    const auto gallery = build_gallery(test);
    const auto probes = build_probes(test);

    struct Source {
        Metric metric;
        std::vector<DescriptorVector> gallery;
        std::map<std::string, std::pair<DescriptorVector, DescriptorVector>> probes;
    };
    std::vector<Source> sources;
    for (std::size_t f = 0; f < config.descriptor_files.size(); ++f) {
        const DescriptorSet set = read_descriptors(config.descriptor_files[f]);
        const std::string name = config.descriptor_files[f].string();
        if (config.descriptor && parse_descriptor_kind(*config.descriptor) != set.kind) {
            throw Error(name + " holds " + std::string(to_string(set.kind)) + " descriptors, not " +
                        *config.descriptor);
        }
        if (set.kind != DescriptorKind::external) {
            const std::string expected = default_pipeline(set.kind).fingerprint();
            if (set.fingerprint != expected) {
                throw Error(name + " parameter fingerprint '" + set.fingerprint + "' does not match '" +
                            expected + "'");
            }
        }
        Source s;
        s.metric = config.distances.empty()      ? default_metric(set.kind)
                   : config.distances.size() == 1 ? parse_metric(config.distances[0])
                                                  : parse_metric(config.distances[f]);
        for (const auto& id : gallery) s.gallery.push_back({set.find(id).values, set.kind, id});
        for (const auto& id : probes) {
            DescriptorVector orig{set.find(id).values, set.kind, id};
            DescriptorVector mirror;
            if (flip == FlipMode::sum) mirror = {set.find(id, true).values, set.kind, id};
            s.probes.emplace(id, std::make_pair(std::move(orig), std::move(mirror)));
        }
        sources.push_back(std::move(s));
    }

    const SimilarityMatrix m = compute_matrix_rows(
        probes, gallery,
        [&](const std::string& probe) {
            std::vector<std::vector<double>> rows;
            for (const auto& s : sources) {
                const auto& [orig, mirror] = s.probes.at(probe);
                rows.push_back(similarity_row(orig, s.gallery, s.metric));
                if (flip == FlipMode::sum) rows.push_back(similarity_row(mirror, s.gallery, s.metric));
            }
            return fuse_rows(rows);
        },
        config.threads);
    write_matrix(config.matrix, m);
    if (config.matrix_csv) {
        auto out = open_out(*config.matrix_csv);
        write_matrix_csv(out, m);
    }
    log << "wrote " << m.rows() << "x" << m.cols() << " similarity matrix to " << config.matrix.string() << '\n';
    return 0;
}

int cmd_eval(const RunConfig& config, std::ostream& log) {
    config.validate();
    const Manifest manifest = load_manifest(config.manifest);
    const SimilarityMatrix m = read_matrix(config.matrix);
    check_matrix_ids(m, manifest);
    const EvalReport report = evaluate(m, subject_labels(manifest), config.exclude_self);
    {
        auto out = open_out(config.out);
        write_report_csv(out, std::span(&report, 1));
    }
    auto points = open_out(sibling_path(config.out, "cmc"));
    write_cmc_points(points, report.curve);
    log << "rank-1 " << report.rank1 << "%, rank-5 " << report.rank5 << "%, AUC " << report.auc << " over "
        << report.n_probes << " probes\n";
    return 0;
}

int cmd_stratify(const RunConfig& config, std::ostream& log) {
    config.validate();
    const Manifest manifest = load_manifest(config.manifest);
    const SimilarityMatrix m = read_matrix(config.matrix);
    check_matrix_ids(m, manifest);
    const auto strata = stratified_eval(m, manifest, parse_stratify_field(config.stratify_field));
    std::vector<EvalReport> reports;
    for (const auto& [label, report] : strata) {
        reports.push_back(report);
        auto points = open_out(sibling_path(config.out, "cmc_" + file_tag(label)));
        write_cmc_points(points, report.curve);
        log << config.stratify_field << "=" << label << ": rank-1 " << report.rank1 << "%, AUC " << report.auc
            << " (" << report.n_probes << " probes)\n";
    }
    auto out = open_out(config.out);
    write_report_csv(out, reports);
    return 0;
}

int cmd_resample(const RunConfig& config, std::ostream& log) {
    config.validate();
    const Manifest manifest = load_manifest(config.manifest);
    const SimilarityMatrix m = read_matrix(config.matrix);
    check_matrix_ids(m, manifest);
    const auto result = single_gallery_experiment(m, subject_labels(manifest), config.runs);
    auto out = open_out(config.out);
    write_single_gallery_csv(out, result);
    log << "single-gallery rank-1 median " << result.summary.median << "% over " << config.runs << " runs\n";
    return 0;
}

int cmd_sides(const RunConfig& config, std::ostream& log) {
    config.validate();
    const Manifest manifest = load_manifest(config.manifest);
    const SimilarityMatrix m = read_matrix(config.matrix);
    check_matrix_ids(m, manifest);
    const auto conditions = side_experiment(m, manifest);
    auto out = open_out(config.out);
    write_side_csv(out, conditions);
    for (const auto& c : conditions) log << *c.report.stratum << ": rank-1 " << c.report.rank1 << "%\n";
    return 0;
}

int cmd_report(const RunConfig& config, std::ostream& log) {
    config.validate();
    const Manifest manifest = load_manifest(config.manifest);
    const SimilarityMatrix m = read_matrix(config.matrix);
    check_matrix_ids(m, manifest);
    const auto rows = qualitative_report(m, subject_labels(manifest), static_cast<std::size_t>(config.top_k),
                                         config.exclude_self);
    auto out = open_out(config.out);
    write_qualitative_csv(out, rows);
    log << "wrote " << rows.size() << " retrieval rows to " << config.out.string() << '\n';
    return 0;
}

int dispatch(const RunConfig& config, std::ostream& log) {
    if (config.command == "extract") return cmd_extract(config, log);
    if (config.command == "score") return cmd_score(config, log);
    if (config.command == "eval") return cmd_eval(config, log);
    if (config.command == "stratify") return cmd_stratify(config, log);
    if (config.command == "resample") return cmd_resample(config, log);
    if (config.command == "sides") return cmd_sides(config, log);
    if (config.command == "report") return cmd_report(config, log);
    throw Error("unknown command '" + config.command + "'");
}

int run(int argc, const char* const* argv) {
    CLI::App app{"Ear recognition benchmarking toolkit: descriptor extraction, similarity matrices and "
                 "identification analytics"};
    app.set_config("--config", "", "TOML/INI file with default flag values; command-line flags win");

    RunConfig config;
    config.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::string manifest, images_root, matrix, out;
    std::vector<std::string> descriptor_files;
    std::string descriptor, origin, matrix_csv;

    app.add_option("command", config.command, "extract | score | eval | stratify | resample | sides | report")
        ->required()
        ->check(CLI::IsMember(kCommands));
    app.add_option("--manifest", manifest, "Manifest CSV");
    app.add_option("--images-root", images_root, "Directory that relative manifest paths resolve against");
    app.add_option("--descriptor", descriptor, "Descriptor kind")
        ->check(CLI::IsMember({"lbp", "hog", "chainlets", "external"}));
    app.add_option("--descriptors", descriptor_files, "Descriptor container file(s) to score");
    app.add_option("--distance", config.distances, "cosine | chisq | l2 (one, or one per descriptor file)");
    app.add_option("--flip", config.flip, "off | sum | classifier")
        ->check(CLI::IsMember({"off", "sum", "classifier"}));
    app.add_option("--matrix", matrix, "Similarity matrix file");
    app.add_option("--matrix-csv", matrix_csv, "Also export the matrix as CSV");
    app.add_option("--out", out, "Output file");
    app.add_option("--origin", origin, "Score only test images of this origin (awe, awe_aux, uerc_new)");
    app.add_option("--seed", config.seed, "Seed for all randomness")->capture_default_str();
    app.add_option("--threads", config.threads, "Worker threads")->envname("UERC_THREADS")->check(CLI::PositiveNumber);
    app.add_option("--stratify-field", config.stratify_field, "pitch | roll | yaw | occlusion | gender | size_bin")
        ->capture_default_str();
    app.add_option("--runs", config.runs, "Single-gallery runs")->capture_default_str();
    app.add_option("--top-k", config.top_k, "Matches listed per probe in the report")->capture_default_str();
    bool keep_self = false;
    app.add_flag("--keep-self", keep_self, "Do not exclude a probe's own image from its gallery");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    config.manifest = manifest;
    config.images_root = images_root;
    config.matrix = matrix;
    config.out = out;
    for (const auto& f : descriptor_files) config.descriptor_files.emplace_back(f);
    if (!descriptor.empty()) config.descriptor = descriptor;
    if (!origin.empty()) config.origin = origin;
    if (!matrix_csv.empty()) config.matrix_csv = matrix_csv;
    config.exclude_self = !keep_self;

    try {
        return dispatch(config, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace uerc::cli
