#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fieldnorm {

using PaperIndex = std::uint32_t;

// A (classification scheme, level) pair such as cwts:micro.
struct Grouping {
    std::string scheme;
    std::string level;

    // Parses "SCHEME:LEVEL"; throws InputError on anything else.
    static Grouping parse(std::string_view text);
    std::string str() const { return scheme + ":" + level; }

    auto operator<=>(const Grouping&) const = default;
};

struct PaperRecord {
    std::string paper_id;
    int pub_year = 0;
    std::string journal_id;
    // Full reference-list length, including works outside the corpus.
    std::optional<std::int64_t> total_ref_count;
};

struct CitationEdge {
    std::string citing_id;
    std::string cited_id;

    auto operator<=>(const CitationEdge&) const = default;
};

struct FieldAssignment {
    std::string paper_id;
    std::string scheme_id;
    std::string level;
    std::string field_id;
};

struct WindowConfig {
    std::vector<int> core_years{2020, 2021};
    int citing_year = 2022;

    // Sorts/uniques core_years and checks the invariants.
    void validate();
};

struct LoadOptions {
    bool skip_bad_rows = false;
    int min_year = 1900;
    int max_year = 2100;
};

struct LoadDiagnostics {
    std::size_t rows_read = 0;
    std::size_t rows_skipped = 0;
    std::size_t duplicates = 0;
    std::vector<std::string> warnings;
};

template <class Record>
struct Loaded {
    std::vector<Record> records;
    LoadDiagnostics diagnostics;
};

enum class PaperFormat { tsv, jsonl };

// Picks jsonl for *.jsonl / *.ndjson, tsv otherwise.
PaperFormat paper_format_for(const std::filesystem::path& path);

Loaded<PaperRecord> load_papers(const std::filesystem::path& path, PaperFormat format,
                                const LoadOptions& options = {});
Loaded<CitationEdge> load_citations(const std::filesystem::path& path,
                                    const LoadOptions& options = {});
Loaded<FieldAssignment> load_field_assignments(const std::filesystem::path& path,
                                               const LoadOptions& options = {});

// Stream variants; `source` names the input in error messages.
Loaded<PaperRecord> parse_papers(std::istream& in, std::string_view source, PaperFormat format,
                                 const LoadOptions& options = {});
Loaded<CitationEdge> parse_citations(std::istream& in, std::string_view source,
                                     const LoadOptions& options = {});
Loaded<FieldAssignment> parse_field_assignments(std::istream& in, std::string_view source,
                                                const LoadOptions& options = {});

void write_papers(std::ostream& out, std::span<const PaperRecord> papers);
void write_citations(std::ostream& out, std::span<const CitationEdge> edges);
void write_field_assignments(std::ostream& out, std::span<const FieldAssignment> assignments);

// Field labels for every paper of the corpus at one grouping.
struct FieldIndex {
    Grouping grouping;
    std::vector<std::string> field_ids;  // sorted
    std::vector<std::int32_t> label;     // per paper; -1 when unassigned

    std::optional<std::uint32_t> field_of(PaperIndex paper) const {
        const auto l = label[paper];
        if (l < 0) return std::nullopt;
        return static_cast<std::uint32_t>(l);
    }
};

struct Coverage {
    std::size_t assigned_papers = 0;
    std::size_t assigned_core = 0;
    std::size_t assigned_citing = 0;
    double fraction_papers = 0.0;
    double fraction_core = 0.0;
    double fraction_citing = 0.0;
};

struct BuildReport {
    std::size_t papers_total = 0;
    std::size_t core_papers = 0;
    std::size_t citing_papers = 0;
    std::size_t edges_input = 0;
    std::size_t edges_duplicate = 0;
    std::size_t edges_retained = 0;
    std::size_t edges_dropped_citing_not_in_window = 0;
    std::size_t edges_dropped_unknown_endpoint = 0;
    std::size_t assignments_unknown_paper = 0;
    std::size_t papers_missing_ref_count = 0;
    std::map<Grouping, Coverage> coverage;
};

// Immutable, id-sorted view of papers, retained citation edges and field
// assignments. Safe to share across threads once built.
class Corpus {
public:
    static Corpus build(std::vector<PaperRecord> papers, std::vector<CitationEdge> edges,
                        std::span<const FieldAssignment> assignments, WindowConfig window);

    const WindowConfig& window() const noexcept { return window_; }
    const BuildReport& report() const noexcept { return report_; }

    std::size_t paper_count() const noexcept { return papers_.size(); }
    const PaperRecord& paper(PaperIndex index) const { return papers_[index]; }
    std::optional<PaperIndex> find(std::string_view paper_id) const;

    // Core and citing papers in ascending id order.
    std::span<const PaperIndex> core_papers() const noexcept { return core_; }
    std::span<const PaperIndex> citing_papers() const noexcept { return citing_; }
    std::vector<std::string> core_ids() const;

    bool is_core(PaperIndex index) const { return core_ordinal_[index] >= 0; }
    bool is_citing(PaperIndex index) const { return citing_ordinal_[index] >= 0; }
    // Position within core_papers() / citing_papers(), or -1.
    std::int32_t core_ordinal(PaperIndex index) const { return core_ordinal_[index]; }
    std::int32_t citing_ordinal(PaperIndex index) const { return citing_ordinal_[index]; }

    std::size_t edge_count() const noexcept { return out_targets_.size(); }
    // Cited papers of `index`, ascending.
    std::span<const PaperIndex> out_edges(PaperIndex index) const;
    // Citing papers of `index`, ascending.
    std::span<const PaperIndex> in_edges(PaperIndex index) const;

    bool has_grouping(const Grouping& grouping) const;
    // Throws InputError for a grouping absent from the fields input.
    const FieldIndex& fields(const Grouping& grouping) const;
    std::vector<Grouping> groupings() const;

private:
    Corpus() = default;

    WindowConfig window_;
    BuildReport report_;
    std::vector<PaperRecord> papers_;
    std::vector<PaperIndex> core_;
    std::vector<PaperIndex> citing_;
    std::vector<std::int32_t> core_ordinal_;
    std::vector<std::int32_t> citing_ordinal_;
    std::vector<std::size_t> out_offsets_;
    std::vector<PaperIndex> out_targets_;
    std::vector<std::size_t> in_offsets_;
    std::vector<PaperIndex> in_sources_;
    std::map<Grouping, FieldIndex> fields_;
};

}  // namespace fieldnorm
