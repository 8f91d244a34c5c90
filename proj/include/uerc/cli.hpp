#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace uerc::cli {

struct RunConfig {
    std::string command;  // extract, score, eval, stratify, resample, sides, report
    std::filesystem::path manifest;
    std::filesystem::path images_root;
    std::optional<std::string> descriptor;  // lbp, hog, chainlets, external
    std::vector<std::filesystem::path> descriptor_files;
    std::vector<std::string> distances;     // cosine, chisq, l2; one per descriptor file
    std::string flip = "off";               // off, sum, classifier
    std::filesystem::path matrix;
    std::filesystem::path out;
    std::optional<std::filesystem::path> matrix_csv;
    std::optional<std::string> origin;      // restrict scoring to one image origin
    std::uint64_t seed = 42;
    int threads = 1;
    std::string stratify_field = "size_bin";
    int runs = 10;
    int top_k = 2;
    bool exclude_self = true;

    // Throws on inconsistent combinations for the selected command.
    void validate() const;
};

int cmd_extract(const RunConfig& config, std::ostream& log);
int cmd_score(const RunConfig& config, std::ostream& log);
int cmd_eval(const RunConfig& config, std::ostream& log);
int cmd_stratify(const RunConfig& config, std::ostream& log);
int cmd_resample(const RunConfig& config, std::ostream& log);
int cmd_sides(const RunConfig& config, std::ostream& log);
int cmd_report(const RunConfig& config, std::ostream& log);

int dispatch(const RunConfig& config, std::ostream& log);

// Parses flags (and an optional --config file; flags win) and runs the
// command. Returns the process exit status.
int run(int argc, const char* const* argv);

// Path next to `out` with `tag` appended to the stem: report.csv + "cmc" ->
// report_cmc.csv.
std::filesystem::path sibling_path(const std::filesystem::path& out, const std::string& tag);

}  // namespace uerc::cli
