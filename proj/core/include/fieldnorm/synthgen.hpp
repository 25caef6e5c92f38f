#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fieldnorm/corpus.hpp"

namespace fieldnorm {

enum class CountDistribution { constant, poisson };

struct FieldSpec {
    std::string field_id;
    std::map<int, std::int64_t> papers_per_year;  // M_y^f
    std::int64_t journals = 1;
    double mean_active_refs = 10.0;
    CountDistribution active_refs_dist = CountDistribution::poisson;
    std::int64_t min_active_refs = 1;  // Poisson draws below this are redrawn
    double total_refs_multiplier = 1.0;  // r = ceil(multiplier * a)
    double attractiveness_sigma = 1.0;   // lognormal scale of within-field weights
};

struct SuperFieldSpec {
    std::string level = "super";
    std::size_t group_size = 2;  // consecutive fields per super-field
};

struct SynthConfig {
    std::uint64_t seed = 0;
    WindowConfig window;
    double epsilon = 0.0;  // probability a reference targets another field
    std::string scheme = "synth";
    std::string level = "field";
    std::optional<SuperFieldSpec> super_fields;
    std::vector<FieldSpec> fields;

    // Throws InputError on an invalid configuration.
    void validate();
};

// JSON configuration; see tests/fixtures/*.json for the layout.
SynthConfig parse_synth_config(std::istream& in, std::string_view source);
SynthConfig load_synth_config(const std::filesystem::path& path);

struct SynthFieldReport {
    std::string field_id;
    std::int64_t citing_papers = 0;
    std::int64_t requested_refs = 0;
    std::int64_t realized_refs = 0;
    std::int64_t cross_field_refs = 0;
};

struct SynthReport {
    std::vector<SynthFieldReport> fields;
    std::int64_t requested_refs = 0;
    std::int64_t realized_refs = 0;
    std::int64_t collision_losses = 0;
    std::vector<std::string> warnings;
};

struct SyntheticCorpus {
    std::vector<PaperRecord> papers;
    std::vector<CitationEdge> edges;
    std::vector<FieldAssignment> assignments;
    SynthReport report;
};

SyntheticCorpus generate(SynthConfig config);

// Writes papers.tsv, citations.tsv and fields.tsv into `dir`.
void write_synthetic_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir);

struct AssumptionReport {
    // (1) equal annual counts
    bool equal_counts = false;
    double max_count_deviation = 0.0;
    std::map<std::string, double> count_deviation;  // per field
    // (2) no cross-field citation
    bool no_cross_field = false;
    std::size_t cross_field_edges = 0;
    std::size_t classified_edges = 0;
    double cross_field_fraction = 0.0;
    // (3) every journal has a citing-year paper with an active reference
    bool journals_active = false;
    std::size_t journals = 0;
    std::size_t inactive_journals = 0;
};

// Count deviation of a field is max over window years of |M_y - M| / M, with
// M the mean core-year count.
AssumptionReport verify_assumptions(const Corpus& corpus, const Grouping& grouping);

}  // namespace fieldnorm
