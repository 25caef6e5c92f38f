#include "fieldnorm/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "fieldnorm/error.hpp"
#include "text_table.hpp"

namespace fieldnorm {

namespace {

using detail::is_blank;
using detail::read_line;
using detail::split_tabs;

constexpr std::string_view kPaperColumns[] = {"paper_id", "pub_year", "journal_id",
                                              "total_ref_count"};
constexpr std::string_view kCitationColumns[] = {"citing_id", "cited_id"};
constexpr std::string_view kFieldColumns[] = {"paper_id", "scheme_id", "level", "field_id"};

// Collects row failures, either throwing or recording them.
class RowSink {
public:
    RowSink(std::string_view source, const LoadOptions& options, LoadDiagnostics& diag)
        : source_(source), options_(options), diag_(diag) {}

    void reject(std::size_t line, const std::string& what) {
        if (!options_.skip_bad_rows) throw RowError(source_, line, what);
        ++diag_.rows_skipped;
        diag_.warnings.push_back(source_ + ":" + std::to_string(line) + ": skipped: " + what);
    }

private:
    std::string source_;
    const LoadOptions& options_;
    LoadDiagnostics& diag_;
};

template <std::size_t N>
void expect_header(std::string_view header, const std::string_view (&columns)[N],
                   std::string_view source) {
    const auto cells = split_tabs(header);
    bool ok = cells.size() == N;
    for (std::size_t i = 0; ok && i < N; ++i) ok = cells[i] == columns[i];
    if (!ok) {
        std::string expected;
        for (std::size_t i = 0; i < N; ++i) {
            if (i) expected += "\\t";
            expected += columns[i];
        }
        throw RowError(std::string(source), 1, "bad header, expected '" + expected + "'");
    }
}

// Reads the header line; returns false (with a warning) for an empty input.
template <std::size_t N>
bool read_header(std::istream& in, const std::string_view (&columns)[N], std::string_view source,
                 LoadDiagnostics& diag) {
    std::string line;
    if (!read_line(in, line)) {
        diag.warnings.push_back(std::string(source) + ": empty file");
        return false;
    }
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    expect_header(line, columns, source);
    return true;
}

std::optional<std::string> check_year(int year, const LoadOptions& options) {
    if (year < options.min_year || year > options.max_year) {
        return "pub_year " + std::to_string(year) + " outside [" +
               std::to_string(options.min_year) + ", " + std::to_string(options.max_year) + "]";
    }
    return std::nullopt;
}

// Either a parsed record or the reason the row is malformed.
struct PaperRow {
    std::optional<PaperRecord> record;
    std::string error;
};

PaperRow paper_from_cells(const std::vector<std::string_view>& cells, const LoadOptions& options) {
    PaperRow row;
    if (cells.size() != 4) {
        row.error = "expected 4 columns, got " + std::to_string(cells.size());
        return row;
    }
    if (cells[0].empty()) {
        row.error = "missing paper_id";
        return row;
    }
    const auto year = detail::parse_int<int>(cells[1]);
    if (!year) {
        row.error = "missing or non-integer pub_year";
        return row;
    }
    if (auto bad = check_year(*year, options)) {
        row.error = *bad;
        return row;
    }
    PaperRecord rec{std::string(cells[0]), *year, std::string(cells[2]), std::nullopt};
    if (!cells[3].empty()) {
        const auto refs = detail::parse_int<std::int64_t>(cells[3]);
        if (!refs || *refs < 0) {
            row.error = "total_ref_count must be a nonnegative integer";
            return row;
        }
        rec.total_ref_count = *refs;
    }
    row.record = std::move(rec);
    return row;
}

PaperRow paper_from_json(std::string_view line, const LoadOptions& options) {
    PaperRow row;
    const auto doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        row.error = "not a JSON object";
        return row;
    }
    auto text_of = [&](const char* key) -> std::optional<std::string> {
        auto it = doc.find(key);
        if (it == doc.end() || it->is_null()) return std::nullopt;
        if (it->is_string()) return it->get<std::string>();
        if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
        return std::nullopt;
    };
    const auto id = text_of("paper_id");
    if (!id || id->empty()) {
        row.error = "missing paper_id";
        return row;
    }
    const auto year_text = text_of("pub_year");
    const auto year = year_text ? detail::parse_int<int>(*year_text) : std::nullopt;
    if (!year) {
        row.error = "missing or non-integer pub_year";
        return row;
    }
    if (auto bad = check_year(*year, options)) {
        row.error = *bad;
        return row;
    }
    PaperRecord rec{*id, *year, text_of("journal_id").value_or(""), std::nullopt};
    if (auto refs_text = text_of("total_ref_count"); refs_text && !refs_text->empty()) {
        const auto refs = detail::parse_int<std::int64_t>(*refs_text);
        if (!refs || *refs < 0) {
            row.error = "total_ref_count must be a nonnegative integer";
            return row;
        }
        rec.total_ref_count = *refs;
    }
    row.record = std::move(rec);
    return row;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path.string());
    return in;
}

}  // namespace

Grouping Grouping::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 == text.size() ||
        text.find(':', colon + 1) != std::string_view::npos) {
        throw InputError("grouping must look like SCHEME:LEVEL, got '" + std::string(text) + "'");
    }
    return {std::string(text.substr(0, colon)), std::string(text.substr(colon + 1))};
}

void WindowConfig::validate() {
    std::sort(core_years.begin(), core_years.end());
    core_years.erase(std::unique(core_years.begin(), core_years.end()), core_years.end());
    if (core_years.empty()) throw InputError("core_years must be nonempty");
    if (std::binary_search(core_years.begin(), core_years.end(), citing_year)) {
        throw InputError("citing_year " + std::to_string(citing_year) + " is also a core year");
    }
}

PaperFormat paper_format_for(const std::filesystem::path& path) {
    const auto ext = path.extension().string();
    return (ext == ".jsonl" || ext == ".ndjson") ? PaperFormat::jsonl : PaperFormat::tsv;
}

Loaded<PaperRecord> parse_papers(std::istream& in, std::string_view source, PaperFormat format,
                                 const LoadOptions& options) {
    Loaded<PaperRecord> out;
    RowSink sink(source, options, out.diagnostics);
    std::size_t line_no = 0;
    if (format == PaperFormat::tsv) {
        if (!read_header(in, kPaperColumns, source, out.diagnostics)) return out;
        line_no = 1;
    }
    std::unordered_map<std::string, std::size_t> first_line;
    std::string line;
    while (read_line(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        ++out.diagnostics.rows_read;
        auto row = format == PaperFormat::tsv ? paper_from_cells(split_tabs(line), options)
                                              : paper_from_json(line, options);
        if (!row.record) {
            sink.reject(line_no, row.error);
            continue;
        }
        auto [it, inserted] = first_line.emplace(row.record->paper_id, line_no);
        if (!inserted) {
            sink.reject(line_no, "duplicate paper_id '" + row.record->paper_id +
                                     "' (first seen on line " + std::to_string(it->second) + ")");
            continue;
        }
        out.records.push_back(std::move(*row.record));
    }
    if (format == PaperFormat::jsonl && line_no == 0) {
        out.diagnostics.warnings.push_back(std::string(source) + ": empty file");
    }
    return out;
}

Loaded<CitationEdge> parse_citations(std::istream& in, std::string_view source,
                                     const LoadOptions& options) {
    Loaded<CitationEdge> out;
    RowSink sink(source, options, out.diagnostics);
    if (!read_header(in, kCitationColumns, source, out.diagnostics)) return out;
    std::set<std::pair<std::string, std::string>> seen;
    std::size_t line_no = 1;
    std::string line;
    while (read_line(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        ++out.diagnostics.rows_read;
        const auto cells = split_tabs(line);
        if (cells.size() != 2) {
            sink.reject(line_no, "expected 2 columns, got " + std::to_string(cells.size()));
            continue;
        }
        if (cells[0].empty() || cells[1].empty()) {
            sink.reject(line_no, "empty identifier");
            continue;
        }
        if (cells[0] == cells[1]) {
            sink.reject(line_no, "self-loop on '" + std::string(cells[0]) + "'");
            continue;
        }
        if (!seen.emplace(std::string(cells[0]), std::string(cells[1])).second) {
            ++out.diagnostics.duplicates;
            continue;
        }
        out.records.push_back({std::string(cells[0]), std::string(cells[1])});
    }
    return out;
}

Loaded<FieldAssignment> parse_field_assignments(std::istream& in, std::string_view source,
                                                const LoadOptions& options) {
    Loaded<FieldAssignment> out;
    RowSink sink(source, options, out.diagnostics);
    if (!read_header(in, kFieldColumns, source, out.diagnostics)) return out;
    // (paper, scheme, level) -> field
    std::map<std::tuple<std::string, std::string, std::string>, std::string> seen;
    std::size_t line_no = 1;
    std::string line;
    while (read_line(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        ++out.diagnostics.rows_read;
        const auto cells = split_tabs(line);
        if (cells.size() != 4) {
            sink.reject(line_no, "expected 4 columns, got " + std::to_string(cells.size()));
            continue;
        }
        if (std::any_of(cells.begin(), cells.end(), [](auto c) { return c.empty(); })) {
            sink.reject(line_no, "empty cell");
            continue;
        }
        FieldAssignment a{std::string(cells[0]), std::string(cells[1]), std::string(cells[2]),
                          std::string(cells[3])};
        auto key = std::make_tuple(a.paper_id, a.scheme_id, a.level);
        auto [it, inserted] = seen.emplace(std::move(key), a.field_id);
        if (!inserted) {
            if (it->second == a.field_id) {
                ++out.diagnostics.duplicates;
            } else {
                sink.reject(line_no, "conflicting field assignment for paper_id '" + a.paper_id +
                                         "' at " + a.scheme_id + ":" + a.level + " ('" +
                                         it->second + "' vs '" + a.field_id + "')");
            }
            continue;
        }
        out.records.push_back(std::move(a));
    }
    return out;
}

Loaded<PaperRecord> load_papers(const std::filesystem::path& path, PaperFormat format,
                                const LoadOptions& options) {
    auto in = open_input(path);
    return parse_papers(in, path.string(), format, options);
}

Loaded<CitationEdge> load_citations(const std::filesystem::path& path,
                                    const LoadOptions& options) {
    auto in = open_input(path);
    return parse_citations(in, path.string(), options);
}

Loaded<FieldAssignment> load_field_assignments(const std::filesystem::path& path,
                                               const LoadOptions& options) {
    auto in = open_input(path);
    return parse_field_assignments(in, path.string(), options);
}

void write_papers(std::ostream& out, std::span<const PaperRecord> papers) {
    out << "paper_id\tpub_year\tjournal_id\ttotal_ref_count\n";
    for (const auto& p : papers) {
        out << p.paper_id << '\t' << p.pub_year << '\t' << p.journal_id << '\t';
        if (p.total_ref_count) out << *p.total_ref_count;
        out << '\n';
    }
}

void write_citations(std::ostream& out, std::span<const CitationEdge> edges) {
    out << "citing_id\tcited_id\n";
    for (const auto& e : edges) out << e.citing_id << '\t' << e.cited_id << '\n';
}

void write_field_assignments(std::ostream& out, std::span<const FieldAssignment> assignments) {
    out << "paper_id\tscheme_id\tlevel\tfield_id\n";
    for (const auto& a : assignments) {
        out << a.paper_id << '\t' << a.scheme_id << '\t' << a.level << '\t' << a.field_id << '\n';
    }
}

Corpus Corpus::build(std::vector<PaperRecord> papers, std::vector<CitationEdge> edges,
                     std::span<const FieldAssignment> assignments, WindowConfig window) {
    window.validate();
    Corpus c;
    c.window_ = window;
    auto& rep = c.report_;

    std::sort(papers.begin(), papers.end(),
              [](const auto& a, const auto& b) { return a.paper_id < b.paper_id; });
    for (std::size_t i = 1; i < papers.size(); ++i) {
        if (papers[i].paper_id == papers[i - 1].paper_id) {
            throw InputError("duplicate paper_id '" + papers[i].paper_id + "'");
        }
    }
    c.papers_ = std::move(papers);
    const auto n = c.papers_.size();
    rep.papers_total = n;

    c.core_ordinal_.assign(n, -1);
    c.citing_ordinal_.assign(n, -1);
    const auto& core_years = c.window_.core_years;
    for (PaperIndex i = 0; i < n; ++i) {
        const int year = c.papers_[i].pub_year;
        if (std::binary_search(core_years.begin(), core_years.end(), year)) {
            c.core_ordinal_[i] = static_cast<std::int32_t>(c.core_.size());
            c.core_.push_back(i);
        } else if (year == c.window_.citing_year) {
            c.citing_ordinal_[i] = static_cast<std::int32_t>(c.citing_.size());
            c.citing_.push_back(i);
            if (!c.papers_[i].total_ref_count) ++rep.papers_missing_ref_count;
        }
    }
    rep.core_papers = c.core_.size();
    rep.citing_papers = c.citing_.size();
    if (c.core_.empty()) throw InputError("corpus has no core papers in the configured core years");
    if (c.citing_.empty()) throw InputError("corpus has no papers in the citing year");

    rep.edges_input = edges.size();
    std::sort(edges.begin(), edges.end());
    const auto last = std::unique(edges.begin(), edges.end());
    rep.edges_duplicate = static_cast<std::size_t>(std::distance(last, edges.end()));
    edges.erase(last, edges.end());

    // Ids are sorted, so index order matches id order and the retained list
    // stays sorted by (citing, cited).
    std::vector<std::pair<PaperIndex, PaperIndex>> kept;
    kept.reserve(edges.size());
    for (const auto& e : edges) {
        if (e.citing_id == e.cited_id) {
            throw InputError("self-citation edge on '" + e.citing_id + "'");
        }
        const auto from = c.find(e.citing_id);
        const auto to = c.find(e.cited_id);
        if (!from || !to) {
            ++rep.edges_dropped_unknown_endpoint;
            continue;
        }
        if (!c.is_citing(*from)) {
            ++rep.edges_dropped_citing_not_in_window;
            continue;
        }
        kept.emplace_back(*from, *to);
    }
    rep.edges_retained = kept.size();

    c.out_offsets_.assign(n + 1, 0);
    c.in_offsets_.assign(n + 1, 0);
    for (auto [from, to] : kept) {
        ++c.out_offsets_[from + 1];
        ++c.in_offsets_[to + 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
        c.out_offsets_[i + 1] += c.out_offsets_[i];
        c.in_offsets_[i + 1] += c.in_offsets_[i];
    }
    c.out_targets_.resize(kept.size());
    c.in_sources_.resize(kept.size());
    {
        auto out_fill = c.out_offsets_;
        auto in_fill = c.in_offsets_;
        for (auto [from, to] : kept) {
            c.out_targets_[out_fill[from]++] = to;
            c.in_sources_[in_fill[to]++] = from;
        }
    }

    // Group assignments by (scheme, level).
    std::map<Grouping, std::vector<std::pair<PaperIndex, const std::string*>>> grouped;
    for (const auto& a : assignments) {
        const auto idx = c.find(a.paper_id);
        if (!idx) {
            ++rep.assignments_unknown_paper;
            continue;
        }
        grouped[Grouping{a.scheme_id, a.level}].emplace_back(*idx, &a.field_id);
    }
    for (auto& [grouping, rows] : grouped) {
        FieldIndex fi;
        fi.grouping = grouping;
        std::set<std::string> ids;
        for (const auto& [idx, field] : rows) ids.insert(*field);
        fi.field_ids.assign(ids.begin(), ids.end());
        fi.label.assign(n, -1);
        for (const auto& [idx, field] : rows) {
            const auto pos = std::lower_bound(fi.field_ids.begin(), fi.field_ids.end(), *field) -
                             fi.field_ids.begin();
            const auto l = static_cast<std::int32_t>(pos);
            if (fi.label[idx] >= 0 && fi.label[idx] != l) {
                throw InputError("conflicting field assignment for paper_id '" +
                                 c.papers_[idx].paper_id + "' at " + grouping.str());
            }
            fi.label[idx] = l;
        }
        Coverage cov;
        for (PaperIndex i = 0; i < n; ++i) {
            if (fi.label[i] < 0) continue;
            ++cov.assigned_papers;
            if (c.is_core(i)) ++cov.assigned_core;
            if (c.is_citing(i)) ++cov.assigned_citing;
        }
        cov.fraction_papers = static_cast<double>(cov.assigned_papers) / static_cast<double>(n);
        cov.fraction_core =
            static_cast<double>(cov.assigned_core) / static_cast<double>(c.core_.size());
        cov.fraction_citing =
            static_cast<double>(cov.assigned_citing) / static_cast<double>(c.citing_.size());
        rep.coverage[grouping] = cov;
        c.fields_.emplace(grouping, std::move(fi));
    }
    return c;
}

std::optional<PaperIndex> Corpus::find(std::string_view paper_id) const {
    const auto it = std::lower_bound(
        papers_.begin(), papers_.end(), paper_id,
        [](const PaperRecord& p, std::string_view id) { return p.paper_id < id; });
    if (it == papers_.end() || it->paper_id != paper_id) return std::nullopt;
    return static_cast<PaperIndex>(it - papers_.begin());
}

std::vector<std::string> Corpus::core_ids() const {
    std::vector<std::string> ids;
    ids.reserve(core_.size());
    for (auto i : core_) ids.push_back(papers_[i].paper_id);
    return ids;
}

std::span<const PaperIndex> Corpus::out_edges(PaperIndex index) const {
    return std::span<const PaperIndex>(out_targets_)
        .subspan(out_offsets_[index], out_offsets_[index + 1] - out_offsets_[index]);
}

std::span<const PaperIndex> Corpus::in_edges(PaperIndex index) const {
    return std::span<const PaperIndex>(in_sources_)
        .subspan(in_offsets_[index], in_offsets_[index + 1] - in_offsets_[index]);
}

bool Corpus::has_grouping(const Grouping& grouping) const { return fields_.contains(grouping); }

const FieldIndex& Corpus::fields(const Grouping& grouping) const {
    const auto it = fields_.find(grouping);
    if (it == fields_.end()) {
        throw InputError("grouping " + grouping.str() + " has no field assignments");
    }
    return it->second;
}

std::vector<Grouping> Corpus::groupings() const {
    std::vector<Grouping> out;
    for (const auto& [g, _] : fields_) out.push_back(g);
    return out;
}

}  // namespace fieldnorm
