#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fieldnorm/corpus.hpp"

namespace fieldnorm::cli {

enum ExitCode : int { kOk = 0, kInternalError = 1, kInputError = 2 };

struct RunConfig {
    std::filesystem::path papers;
    std::filesystem::path citations;
    std::filesystem::path fields;
    std::optional<std::filesystem::path> metrics;  // defaults to <out>/metrics.tsv
    WindowConfig window;
    Grouping grouping{"cwts", "micro"};
    std::vector<Grouping> eval_groupings;  // defaults to {grouping}
    std::vector<double> z_list{1.0, 5.0, 10.0};
    std::int64_t null_samples = 10000;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::filesystem::path out;
    bool skip_bad_rows = false;

    // Synthetic generation.
    std::filesystem::path synth_config;
    std::optional<std::uint64_t> synth_seed;

    // Flags that shape the outputs. Thread count is left out: it never
    // changes a byte of output.
    nlohmann::json effective() const;
    std::vector<Grouping> evaluation_groupings() const;
    std::filesystem::path metrics_path() const;
};

struct Ingested {
    Corpus corpus;
    nlohmann::json report;
};

Ingested ingest(const RunConfig& config);

void cmd_ingest(const RunConfig& config);
void cmd_metrics(const RunConfig& config);
void cmd_bias(const RunConfig& config);
void cmd_diag(const RunConfig& config);
void cmd_synth(const RunConfig& config);
void cmd_report(const RunConfig& config);

// File-name-safe rendering of a grouping, e.g. "cwts_meso".
std::string grouping_slug(const Grouping& grouping);

// Parses argv and runs a subcommand. Returns an ExitCode; on failure a JSON
// error document goes to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fieldnorm::cli
