#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <sstream>

#include "fieldnorm/diagnostics.hpp"
#include "fieldnorm/error.hpp"
#include "fieldnorm/synthgen.hpp"
#include "unit/helpers.hpp"

namespace fieldnorm {
namespace {

using testing::assign;
using testing::kFixtures;
using testing::kSL;
using testing::make_corpus;
using testing::paper;

// Field f has counts (m20, m21, m22); citing papers all cite f's first core paper.
void add_field(std::vector<PaperRecord>& ps, std::vector<CitationEdge>& es,
               std::vector<FieldAssignment>& fs, const std::string& f, std::array<int, 3> m) {
    for (int y = 0; y < 3; ++y) {
        for (int i = 0; i < m[static_cast<std::size_t>(y)]; ++i) {
            const auto id = f + "-" + std::to_string(2020 + y) + "-" + std::to_string(i);
            ps.push_back(paper(id, 2020 + y, f + "J"));
            fs.push_back(assign(id, f));
            if (y == 2) es.push_back({id, f + "-2020-0"});
        }
    }
}

TEST(GrowthRates, DirectRatio) {
    std::vector<PaperRecord> ps;
    std::vector<CitationEdge> es;
    std::vector<FieldAssignment> fs;
    add_field(ps, es, fs, "a", {100, 100, 100});
    add_field(ps, es, fs, "b", {50, 50, 200});
    add_field(ps, es, fs, "c", {10, 10, 0});
    const auto c = make_corpus(ps, es, fs);
    const auto g = growth_rates(c, kSL);
    EXPECT_DOUBLE_EQ(*g.at("a").growth_rate, 2.0);
    EXPECT_DOUBLE_EQ(*g.at("b").growth_rate, 0.5);
    EXPECT_FALSE(g.at("c").growth_rate.has_value());
    EXPECT_EQ(g.at("b").papers_by_year.at(2022), 200);
    EXPECT_EQ(g.at("c").papers_by_year.at(2022), 0);
}

TEST(FieldDensities, SumOfActiveReferences) {
    const auto c = make_corpus(
        {paper("A", 2020), paper("B", 2020), paper("C", 2021), paper("Q", 2022), paper("R", 2022),
         paper("H", 2020)},
        {{"Q", "A"}, {"Q", "B"}, {"R", "A"}, {"R", "B"}, {"R", "C"}},
        {assign("A", "f"), assign("B", "f"), assign("C", "f"), assign("Q", "f"), assign("R", "f"),
         assign("H", "h")});
    const auto d = field_densities(c, kSL, compute_citing_stats(c));
    EXPECT_EQ(d.at("f"), 5.0);
    EXPECT_EQ(d.at("h"), 0.0);
}

TEST(FieldDensities, ConservedUnderFullCoverage) {
    auto cfg = load_synth_config(kFixtures / "scenario_toy.json");
    const auto w = cfg.window;
    auto syn = generate(std::move(cfg));
    const auto c = Corpus::build(std::move(syn.papers), std::move(syn.edges), syn.assignments, w);
    const Grouping g{"synth", "field"};
    const auto stats = compute_citing_stats(c);
    double total = 0.0, a = 0.0;
    for (const auto& [_, d] : field_densities(c, g, stats)) total += d;
    for (const auto& s : stats.papers) a += static_cast<double>(s.a);
    EXPECT_EQ(total, a);
}

// Core paper X in field f cited three times from g and once from f.
Corpus density_corpus() {
    std::vector<PaperRecord> ps{paper("X", 2020), paper("Y", 2020), paper("Z", 2021)};
    std::vector<CitationEdge> es;
    std::vector<FieldAssignment> fs{assign("X", "f"), assign("Y", "g"), assign("Z", "f")};
    for (int i = 0; i < 3; ++i) {
        const auto id = "G" + std::to_string(i);
        ps.push_back(paper(id, 2022));
        es.push_back({id, "X"});
        fs.push_back(assign(id, "g"));
    }
    ps.push_back(paper("F0", 2022));
    fs.push_back(assign("F0", "f"));
    es.push_back({"F0", "X"});
    es.push_back({"F0", "Z"});
    return make_corpus(ps, es, fs);
}

TEST(DensityRatios, WeightedAverage) {
    const auto c = density_corpus();
    const std::map<std::string, double> d{{"f", 100.0}, {"g", 200.0}};
    const auto r = density_ratios(c, kSL, d);
    const auto x = static_cast<std::size_t>(c.core_ordinal(*c.find("X")));
    EXPECT_DOUBLE_EQ(*r[x].actual_density, 175.0);
    EXPECT_DOUBLE_EQ(*r[x].density_ratio, 1.75);
    const auto z = static_cast<std::size_t>(c.core_ordinal(*c.find("Z")));
    EXPECT_DOUBLE_EQ(*r[z].density_ratio, 1.0);
}

TEST(DensityRatios, UndefinedCasesFlagged) {
    const auto c = density_corpus();
    const auto r = density_ratios(c, kSL, {{"f", 0.0}, {"g", 200.0}});
    const auto x = static_cast<std::size_t>(c.core_ordinal(*c.find("X")));
    EXPECT_FALSE(r[x].density_ratio.has_value());
    EXPECT_FALSE(r[x].flag.empty());
    const auto y = static_cast<std::size_t>(c.core_ordinal(*c.find("Y")));
    EXPECT_EQ(r[y].flag, "uncited");
}

TEST(FieldMeanMetric, MeansAndConsistencyWithFieldStats) {
    const auto c = make_corpus({paper("A", 2020), paper("B", 2020), paper("C", 2021),
                                paper("Q", 2022), paper("R", 2022), paper("S", 2022)},
                               {{"Q", "A"}, {"R", "B"}, {"S", "B"}, {"Q", "C"}, {"R", "C"}, {"S", "C"}},
                               {assign("A", "f"), assign("B", "f"), assign("C", "g")});
    const auto m = build_metric_matrix(c, kSL).matrix;
    const auto means = field_mean_metric(m, kSL, "c", c);
    EXPECT_DOUBLE_EQ(means.at("f"), 1.5);
    EXPECT_DOUBLE_EQ(means.at("g"), 3.0);
    for (auto id : kBaseMetrics) {
        const auto fm = field_mean_metric(m, kSL, id, c);
        for (const auto& s : field_stats(m.column(id), kSL, c).fields) {
            EXPECT_NEAR(fm.at(s.field_id), s.mean, 1e-12) << id;
        }
    }
}

TEST(Ols, ExactLine) {
    const std::vector<double> x{1, 2, 3, 4}, y{2, 4, 6, 8};
    const auto f = ols_r2(x, y);
    EXPECT_NEAR(f.slope, 2.0, 1e-12);
    EXPECT_NEAR(f.intercept, 0.0, 1e-12);
    EXPECT_NEAR(f.r2, 1.0, 1e-12);
}

TEST(Ols, ConstantY) {
    const std::vector<double> x{1, 2, 3}, y{4, 4, 4};
    const auto f = ols_r2(x, y);
    EXPECT_EQ(f.r2, 0.0);
    EXPECT_EQ(f.slope, 0.0);
    EXPECT_EQ(f.intercept, 4.0);
}

TEST(Ols, MatchesNormalEquations) {
    const std::vector<double> x{0.5, 1.7, 2.2, 3.9, 5.1}, y{1.1, 2.9, 2.7, 5.2, 5.8};
    // Solve [n sx; sx sxx] [b0 b1]' = [sy sxy]' by Cramer's rule.
    long double n = 5, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < 5; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += static_cast<long double>(x[i]) * x[i];
        sxy += static_cast<long double>(x[i]) * y[i];
    }
    const long double det = n * sxx - sx * sx;
    const long double b0 = (sy * sxx - sx * sxy) / det;
    const long double b1 = (n * sxy - sx * sy) / det;
    long double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < 5; ++i) {
        const long double e = y[i] - (b0 + b1 * x[i]);
        ss_res += e * e;
        ss_tot += (y[i] - sy / n) * (y[i] - sy / n);
    }
    const auto f = ols_r2(x, y);
    EXPECT_NEAR(f.slope, static_cast<double>(b1), 1e-9);
    EXPECT_NEAR(f.intercept, static_cast<double>(b0), 1e-9);
    EXPECT_NEAR(f.r2, static_cast<double>(1 - ss_res / ss_tot), 1e-9);
}

TEST(Ols, RejectsDegenerateInput) {
    EXPECT_THROW(ols_r2(std::vector<double>{1, 2}, std::vector<double>{1, 2}), DomainError);
    EXPECT_THROW(ols_r2(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}), DomainError);
}

TEST(Pearson, BasicCases) {
    const std::vector<double> x{1, 2, 3, 4};
    EXPECT_NEAR(*pearson(x, std::vector<double>{2, 4, 6, 8}), 1.0, 1e-12);
    EXPECT_NEAR(*pearson(x, std::vector<double>{8, 6, 4, 2}), -1.0, 1e-12);
    EXPECT_FALSE(pearson(x, std::vector<double>{1, 1, 1, 1}).has_value());
}

Rq1Report rq1_for(const std::string& scenario) {
    auto cfg = load_synth_config(kFixtures / ("scenario_" + scenario + ".json"));
    const auto w = cfg.window;
    auto syn = generate(std::move(cfg));
    const auto c = Corpus::build(std::move(syn.papers), std::move(syn.edges), syn.assignments, w);
    const Grouping g{"synth", "field"};
    return rq1_analysis(c, g, build_metric_matrix(c, g).matrix);
}

TEST(Rq1, GrowthSpreadExplainsMostVariance) {
    const auto r = rq1_for("growth");
    EXPECT_EQ(r.valid_fields, 10u);
    EXPECT_FALSE(r.intercept_only);
    EXPECT_GT(r.regression.r2, 0.8);
    // With no cross-field citation and p = 1, field mean sc3 equals the
    // citing-to-core count ratio, the reciprocal of the growth rate.
    for (const auto& row : r.fields) EXPECT_NEAR(*row.mean_sc3 * *row.growth_rate, 1.0, 1e-9);
}

TEST(Rq1, UniformGrowthWithDensityMixing) {
    const auto r = rq1_for("density");
    EXPECT_TRUE(r.intercept_only);
    EXPECT_EQ(r.regression.r2, 0.0);
    ASSERT_TRUE(r.residual_density_correlation.has_value());
    EXPECT_LT(*r.residual_density_correlation, 0.0);
}

TEST(Rq1, TooFewFieldsRejected) {
    const auto c = make_corpus({paper("A", 2020), paper("Q", 2022)}, {{"Q", "A"}},
                               {assign("A", "f"), assign("Q", "f")});
    EXPECT_THROW(rq1_analysis(c, kSL, build_metric_matrix(c, kSL).matrix), DomainError);
}

TEST(Rq1, TableHeader) {
    const auto r = rq1_for("toy");
    std::ostringstream out;
    write_diagnostics_table(out, r);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header,
              "field_id\tm_2020\tm_2021\tm_2022\tgrowth_rate\tdensity_total\tdensity_per_paper\t"
              "mean_sc3\tmean_density_ratio");
}

}  // namespace
}  // namespace fieldnorm
