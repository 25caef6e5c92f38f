#include <gtest/gtest.h>

#include <sstream>

#include "fieldnorm/corpus.hpp"
#include "fieldnorm/error.hpp"
#include "unit/helpers.hpp"

namespace fieldnorm {
namespace {

using testing::assign;
using testing::kSL;
using testing::make_corpus;
using testing::paper;

Loaded<PaperRecord> papers_from(const std::string& text, const LoadOptions& o = {}) {
    std::istringstream in(text);
    return parse_papers(in, "papers.tsv", PaperFormat::tsv, o);
}

Loaded<CitationEdge> citations_from(const std::string& text, const LoadOptions& o = {}) {
    std::istringstream in(text);
    return parse_citations(in, "citations.tsv", o);
}

Loaded<FieldAssignment> fields_from(const std::string& text, const LoadOptions& o = {}) {
    std::istringstream in(text);
    return parse_field_assignments(in, "fields.tsv", o);
}

const std::string kPaperHeader = "paper_id\tpub_year\tjournal_id\ttotal_ref_count\n";
const std::string kFieldHeader = "paper_id\tscheme_id\tlevel\tfield_id\n";

TEST(Grouping, ParsesSchemeAndLevel) {
    const auto g = Grouping::parse("cwts:micro");
    EXPECT_EQ(g.scheme, "cwts");
    EXPECT_EQ(g.level, "micro");
    EXPECT_EQ(g.str(), "cwts:micro");
    EXPECT_THROW(Grouping::parse("cwts"), InputError);
    EXPECT_THROW(Grouping::parse(":micro"), InputError);
    EXPECT_THROW(Grouping::parse("a:b:c"), InputError);
}

TEST(WindowConfig, RejectsOverlapAndEmpty) {
    WindowConfig w;
    w.validate();
    w.core_years = {2021, 2020, 2021};
    w.validate();
    EXPECT_EQ(w.core_years, (std::vector<int>{2020, 2021}));
    w.citing_year = 2021;
    EXPECT_THROW(w.validate(), InputError);
    w.core_years.clear();
    w.citing_year = 2022;
    EXPECT_THROW(w.validate(), InputError);
}

TEST(LoadPapers, ThreeRows) {
    const auto got = papers_from(kPaperHeader + "A\t2020\tJ1\t10\nB\t2021\tJ1\t\nC\t2022\tJ2\t3\n");
    ASSERT_EQ(got.records.size(), 3u);
    EXPECT_EQ(got.records[0].paper_id, "A");
    EXPECT_EQ(got.records[0].total_ref_count, 10);
    EXPECT_FALSE(got.records[1].total_ref_count.has_value());
    EXPECT_EQ(got.records[2].journal_id, "J2");
}

TEST(LoadPapers, EmptyFileWarns) {
    const auto got = papers_from("");
    EXPECT_TRUE(got.records.empty());
    ASSERT_EQ(got.diagnostics.warnings.size(), 1u);
}

TEST(LoadPapers, DuplicateIdNamed) {
    try {
        papers_from(kPaperHeader + "P7\t2020\tJ\t\nP7\t2021\tJ\t\n");
        FAIL() << "duplicate accepted";
    } catch (const RowError& e) {
        EXPECT_NE(std::string(e.what()).find("P7"), std::string::npos);
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(LoadPapers, BadRowsRejectedOrSkipped) {
    const std::string text = kPaperHeader + "A\t2020\tJ\t\nB\tnope\tJ\t\nC\t1800\tJ\t\nD\t2020\tJ\t-1\n";
    EXPECT_THROW(papers_from(text), RowError);
    LoadOptions skip;
    skip.skip_bad_rows = true;
    const auto got = papers_from(text, skip);
    EXPECT_EQ(got.records.size(), 1u);
    EXPECT_EQ(got.diagnostics.rows_skipped, 3u);
}

TEST(LoadPapers, HeaderMismatchRejected) {
    EXPECT_THROW(papers_from("id\tyear\n"), InputError);
}

TEST(LoadPapers, CrlfAndBom) {
    const auto got =
        papers_from("\xEF\xBB\xBFpaper_id\tpub_year\tjournal_id\ttotal_ref_count\r\nA\t2020\tJ\t4\r\n");
    ASSERT_EQ(got.records.size(), 1u);
    EXPECT_EQ(got.records[0].total_ref_count, 4);
}

TEST(LoadPapers, Jsonl) {
    std::istringstream in(
        "{\"paper_id\":\"A\",\"pub_year\":2020,\"journal_id\":\"J\",\"total_ref_count\":5}\n"
        "{\"paper_id\":\"B\",\"pub_year\":\"2022\",\"journal_id\":\"J\"}\n");
    const auto got = parse_papers(in, "p.jsonl", PaperFormat::jsonl);
    ASSERT_EQ(got.records.size(), 2u);
    EXPECT_EQ(got.records[0].total_ref_count, 5);
    EXPECT_EQ(got.records[1].pub_year, 2022);
    EXPECT_EQ(paper_format_for("x/p.jsonl"), PaperFormat::jsonl);
    EXPECT_EQ(paper_format_for("x/p.tsv"), PaperFormat::tsv);
}

TEST(LoadCitations, Dedup) {
    const auto got = citations_from("citing_id\tcited_id\nA\tB\nA\tB\nA\tC\n");
    ASSERT_EQ(got.records.size(), 2u);
    EXPECT_EQ(got.records[0], (CitationEdge{"A", "B"}));
    EXPECT_EQ(got.records[1], (CitationEdge{"A", "C"}));
    EXPECT_EQ(got.diagnostics.duplicates, 1u);
}

TEST(LoadCitations, SelfLoopRejected) {
    EXPECT_THROW(citations_from("citing_id\tcited_id\nA\tA\n"), RowError);
}

TEST(LoadCitations, NoEdges) {
    EXPECT_TRUE(citations_from("citing_id\tcited_id\n").records.empty());
}

TEST(LoadFields, StoredAndLookedUp) {
    const auto got = fields_from(kFieldHeader + "P1\tcwts\tmicro\tF7\n");
    ASSERT_EQ(got.records.size(), 1u);
    const auto c = make_corpus({paper("P1", 2020), paper("Q", 2022)}, {{"Q", "P1"}}, got.records);
    const auto& idx = c.fields({"cwts", "micro"});
    EXPECT_EQ(idx.field_ids[*idx.field_of(*c.find("P1"))], "F7");
}

TEST(LoadFields, ConflictNamesPaper) {
    try {
        fields_from(kFieldHeader + "P1\tcwts\tmicro\tF7\nP1\tcwts\tmicro\tF9\n");
        FAIL() << "conflict accepted";
    } catch (const RowError& e) {
        EXPECT_NE(std::string(e.what()).find("P1"), std::string::npos);
    }
}

TEST(LoadFields, IdenticalRepeatCounted) {
    const auto got = fields_from(kFieldHeader + "P1\tcwts\tmicro\tF7\nP1\tcwts\tmicro\tF7\n");
    EXPECT_EQ(got.records.size(), 1u);
    EXPECT_EQ(got.diagnostics.duplicates, 1u);
}

TEST(LoadFields, SeveralGroupingsCoexist) {
    const auto got = fields_from(kFieldHeader +
                                 "P1\tcwts\tmicro\tF7\nP1\tcwts\tmeso\tM2\nP1\tsciscinet\tsubfield\tS3\n");
    EXPECT_EQ(got.records.size(), 3u);
    const auto c = make_corpus({paper("P1", 2020), paper("Q", 2022)}, {{"Q", "P1"}}, got.records);
    EXPECT_EQ(c.groupings().size(), 3u);
    EXPECT_TRUE(c.has_grouping({"sciscinet", "subfield"}));
    EXPECT_THROW(c.fields({"cwts", "macro"}), InputError);
}

TEST(LoadFiles, MissingFileIsInputError) {
    EXPECT_THROW(load_papers("/nonexistent/papers.tsv", PaperFormat::tsv), InputError);
}

TEST(WriteRoundTrip, PapersCitationsFields) {
    const std::vector<PaperRecord> ps{paper("A", 2020, "J", 3), paper("B", 2022, "K")};
    const std::vector<CitationEdge> es{{"B", "A"}};
    const std::vector<FieldAssignment> fs{assign("A", "f"), assign("B", "g")};
    std::ostringstream po, eo, fo;
    write_papers(po, ps);
    write_citations(eo, es);
    write_field_assignments(fo, fs);
    const auto p = papers_from(po.str());
    ASSERT_EQ(p.records.size(), 2u);
    EXPECT_EQ(p.records[0].total_ref_count, 3);
    EXPECT_FALSE(p.records[1].total_ref_count);
    EXPECT_EQ(citations_from(eo.str()).records, es);
    EXPECT_EQ(fields_from(fo.str()).records.size(), 2u);
}

TEST(BuildCorpus, CoreCitingAndEdges) {
    const auto c = make_corpus({paper("A", 2020), paper("B", 2021), paper("C", 2022)}, {{"C", "A"}});
    ASSERT_EQ(c.core_papers().size(), 2u);
    EXPECT_EQ(c.core_ids(), (std::vector<std::string>{"A", "B"}));
    ASSERT_EQ(c.citing_papers().size(), 1u);
    EXPECT_EQ(c.paper(c.citing_papers()[0]).paper_id, "C");
    EXPECT_EQ(c.edge_count(), 1u);
    EXPECT_EQ(c.report().edges_retained, 1u);
    const auto a = *c.find("A");
    ASSERT_EQ(c.in_edges(a).size(), 1u);
    EXPECT_EQ(c.paper(c.in_edges(a)[0]).paper_id, "C");
}

TEST(BuildCorpus, DropsEdgeFromNonCitingYear) {
    const auto c = make_corpus({paper("A", 2020), paper("B", 2021), paper("C", 2022)},
                               {{"C", "A"}, {"A", "B"}});
    EXPECT_EQ(c.edge_count(), 1u);
    EXPECT_EQ(c.report().edges_dropped_citing_not_in_window, 1u);
}

TEST(BuildCorpus, OutOfWindowPaperKept) {
    const auto c = make_corpus({paper("A", 2020), paper("C", 2022), paper("O", 2019)}, {{"C", "A"}});
    const auto o = *c.find("O");
    EXPECT_EQ(c.paper_count(), 3u);
    EXPECT_FALSE(c.is_core(o));
    EXPECT_FALSE(c.is_citing(o));
}

TEST(BuildCorpus, UnknownEndpointDropped) {
    const auto c = make_corpus({paper("A", 2020), paper("C", 2022)}, {{"C", "A"}, {"C", "Z"}});
    EXPECT_EQ(c.report().edges_dropped_unknown_endpoint, 1u);
    EXPECT_EQ(c.edge_count(), 1u);
}

TEST(BuildCorpus, EmptyCoreOrCitingIsError) {
    EXPECT_THROW(make_corpus({paper("C", 2022)}, {}), InputError);
    EXPECT_THROW(make_corpus({paper("A", 2020)}, {}), InputError);
}

TEST(BuildCorpus, DuplicatePaperRejected) {
    EXPECT_THROW(make_corpus({paper("A", 2020), paper("A", 2021), paper("C", 2022)}, {}), InputError);
}

TEST(BuildCorpus, CoverageReported) {
    const auto c = make_corpus({paper("A", 2020), paper("B", 2020), paper("C", 2022)}, {{"C", "A"}},
                               {assign("A", "f"), assign("C", "f"), assign("X", "f")});
    const auto& cov = c.report().coverage.at(kSL);
    EXPECT_EQ(cov.assigned_core, 1u);
    EXPECT_EQ(cov.assigned_citing, 1u);
    EXPECT_DOUBLE_EQ(cov.fraction_core, 0.5);
    EXPECT_EQ(c.report().assignments_unknown_paper, 1u);
    EXPECT_EQ(c.fields(kSL).label[*c.find("B")], -1);
}

TEST(BuildCorpus, AdjacencySortedAndDisjoint) {
    const auto c = make_corpus({paper("B", 2020), paper("A", 2020), paper("Y", 2022), paper("X", 2022)},
                               {{"Y", "B"}, {"X", "B"}, {"Y", "A"}});
    const auto b = *c.find("B");
    ASSERT_EQ(c.in_edges(b).size(), 2u);
    EXPECT_LT(c.in_edges(b)[0], c.in_edges(b)[1]);
    const auto y = *c.find("Y");
    ASSERT_EQ(c.out_edges(y).size(), 2u);
    EXPECT_LT(c.out_edges(y)[0], c.out_edges(y)[1]);
    for (PaperIndex p = 0; p < c.paper_count(); ++p) EXPECT_FALSE(c.is_core(p) && c.is_citing(p));
}

}  // namespace
}  // namespace fieldnorm
