#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fieldnorm/error.hpp"
#include "fieldnorm/source_norm.hpp"
#include "fieldnorm/target_norm.hpp"
#include "unit/helpers.hpp"

namespace fieldnorm {
namespace {

using testing::assign;
using testing::kSL;
using testing::make_corpus;
using testing::paper;

FieldLabels one_field(std::size_t n) { return {{"f"}, std::vector<std::int32_t>(n, 0)}; }

TEST(FieldStats, PopulationStd) {
    const auto r = field_stats(std::vector<double>{1, 3}, one_field(2));
    ASSERT_EQ(r.fields.size(), 1u);
    EXPECT_EQ(r.fields[0].n, 2u);
    EXPECT_DOUBLE_EQ(r.fields[0].mean, 2.0);
    EXPECT_DOUBLE_EQ(r.fields[0].std, 1.0);
}

TEST(FieldStats, SingletonAndZeros) {
    const auto single = field_stats(std::vector<double>{5}, one_field(1));
    EXPECT_EQ(single.fields[0].mean, 5.0);
    EXPECT_EQ(single.fields[0].std, 0.0);
    const auto zeros = field_stats(std::vector<double>{0, 0, 0}, one_field(3));
    EXPECT_EQ(zeros.fields[0].mean, 0.0);
    EXPECT_EQ(zeros.fields[0].std, 0.0);
}

TEST(FieldStats, ConstantFieldHasExactlyZeroStd) {
    const auto r = field_stats(std::vector<double>(7, 0.1), one_field(7));
    EXPECT_EQ(r.fields[0].std, 0.0);
    EXPECT_EQ(r.fields[0].mean, 0.1);
}

TEST(FieldStats, UnassignedCountedAndEmptyFieldsOmitted) {
    const FieldLabels labels{{"f", "g", "h"}, {0, -1, 2, 0}};
    const auto r = field_stats(std::vector<double>{1, 100, 4, 3}, labels);
    ASSERT_EQ(r.fields.size(), 2u);
    EXPECT_EQ(r.fields[0].field_id, "f");
    EXPECT_EQ(r.fields[1].field_id, "h");
    EXPECT_EQ(r.unassigned, 1u);
    EXPECT_THROW(field_stats(std::vector<double>{1}, labels), InputError);
}

TEST(RatioNormalize, OneField) {
    const auto r = ratio_normalize({"c", {1, 3}}, one_field(2));
    EXPECT_EQ(r.metric.metric_id, "R_c");
    EXPECT_DOUBLE_EQ(r.metric.values[0], 0.5);
    EXPECT_DOUBLE_EQ(r.metric.values[1], 1.5);
    EXPECT_TRUE(r.degenerate_fields.empty());
}

TEST(RatioNormalize, AllZeroFieldFlagged) {
    const auto r = ratio_normalize({"c", {0, 0, 0}}, one_field(3));
    EXPECT_EQ(r.metric.values, (std::vector<double>{0, 0, 0}));
    EXPECT_EQ(r.degenerate_fields, (std::vector<std::string>{"f"}));
}

TEST(RatioNormalize, TwoFields) {
    const FieldLabels labels{{"f", "g"}, {0, 0, 1, 1}};
    const auto r = ratio_normalize({"c", {2, 4, 10, 30}}, labels);
    EXPECT_DOUBLE_EQ(r.metric.values[0], 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(r.metric.values[1], 4.0 / 3.0);
    EXPECT_DOUBLE_EQ(r.metric.values[2], 0.5);
    EXPECT_DOUBLE_EQ(r.metric.values[3], 1.5);
    EXPECT_DOUBLE_EQ((r.metric.values[0] + r.metric.values[1]) / 2, 1.0);
    EXPECT_DOUBLE_EQ((r.metric.values[2] + r.metric.values[3]) / 2, 1.0);
}

TEST(ZscoreNormalize, OneField) {
    const auto z = zscore_normalize({"c", {1, 3}}, one_field(2));
    EXPECT_EQ(z.metric.metric_id, "Z_c");
    EXPECT_DOUBLE_EQ(z.metric.values[0], -1.0);
    EXPECT_DOUBLE_EQ(z.metric.values[1], 1.0);
}

TEST(ZscoreNormalize, ConstantFieldFlagged) {
    const auto z = zscore_normalize({"c", {5, 5}}, one_field(2));
    EXPECT_EQ(z.metric.values, (std::vector<double>{0, 0}));
    EXPECT_EQ(z.degenerate_fields, (std::vector<std::string>{"f"}));
}

TEST(Normalize, UnassignedGetsEmptyCell) {
    const FieldLabels labels{{"f"}, {0, -1, 0}};
    const auto r = ratio_normalize({"c", {1, 7, 3}}, labels);
    EXPECT_TRUE(std::isnan(r.metric.values[1]));
    EXPECT_EQ(r.unassigned, 1u);
    EXPECT_TRUE(std::isnan(zscore_normalize({"c", {1, 7, 3}}, labels).metric.values[1]));
}

TEST(Normalize, MisalignedInputRejected) {
    EXPECT_THROW(ratio_normalize({"c", {1, 2}}, one_field(3)), InputError);
}

class NormalizeProperties : public ::testing::Test {
protected:
    std::mt19937_64 rng{12345};

    std::pair<MetricVector, FieldLabels> random_case(std::size_t n, int fields) {
        FieldLabels labels;
        for (int f = 0; f < fields; ++f) labels.field_ids.push_back("f" + std::to_string(f));
        std::uniform_int_distribution<int> pick(0, fields - 1);
        std::lognormal_distribution<double> value(1.0, 1.5);
        MetricVector v{"m", {}};
        for (std::size_t i = 0; i < n; ++i) {
            labels.label.push_back(pick(rng));
            v.values.push_back(value(rng));
        }
        return {v, labels};
    }
};

TEST_F(NormalizeProperties, PerFieldMomentsOnRandomVectors) {
    for (int trial = 0; trial < 50; ++trial) {
        const auto [v, labels] = random_case(400, 7);
        const auto r = ratio_normalize(v, labels);
        const auto z = zscore_normalize(v, labels);
        for (std::int32_t f = 0; f < 7; ++f) {
            long double rs = 0, zs = 0, zq = 0, n = 0;
            for (std::size_t i = 0; i < labels.label.size(); ++i) {
                if (labels.label[i] != f) continue;
                rs += r.metric.values[i];
                zs += z.metric.values[i];
                zq += static_cast<long double>(z.metric.values[i]) * z.metric.values[i];
                ++n;
            }
            if (n < 2) continue;
            EXPECT_NEAR(static_cast<double>(rs / n), 1.0, 1e-12);
            EXPECT_NEAR(static_cast<double>(zs / n), 0.0, 1e-12);
            EXPECT_NEAR(static_cast<double>(std::sqrt(zq / n - (zs / n) * (zs / n))), 1.0, 1e-12);
        }
    }
}

TEST_F(NormalizeProperties, RankWithinFieldPreserved) {
    const auto [v, labels] = random_case(300, 4);
    const auto r = ratio_normalize(v, labels);
    const auto z = zscore_normalize(v, labels);
    for (std::size_t i = 0; i < v.values.size(); ++i) {
        for (std::size_t j = 0; j < v.values.size(); ++j) {
            if (labels.label[i] != labels.label[j] || !(v.values[i] < v.values[j])) continue;
            EXPECT_LT(r.metric.values[i], r.metric.values[j]);
            EXPECT_LT(z.metric.values[i], z.metric.values[j]);
        }
    }
}

TEST_F(NormalizeProperties, IdempotentAndScaleInvariant) {
    const auto [v, labels] = random_case(200, 3);
    const auto r = ratio_normalize(v, labels);
    const auto rr = ratio_normalize(r.metric, labels);
    const auto z = zscore_normalize(v, labels);
    const auto zz = zscore_normalize(z.metric, labels);
    MetricVector scaled = v;
    for (auto& x : scaled.values) x *= 37.5;
    const auto rs = ratio_normalize(scaled, labels);
    const auto zs = zscore_normalize(scaled, labels);
    for (std::size_t i = 0; i < v.values.size(); ++i) {
        EXPECT_NEAR(rr.metric.values[i], r.metric.values[i], 1e-12);
        EXPECT_NEAR(zz.metric.values[i], z.metric.values[i], 1e-12);
        EXPECT_NEAR(rs.metric.values[i], r.metric.values[i], 1e-12);
        EXPECT_NEAR(zs.metric.values[i], z.metric.values[i], 1e-12);
    }
}

// 6 core papers in 2 fields, every one cited at least once.
Corpus six_core_corpus(bool leave_one_unassigned = false) {
    std::vector<PaperRecord> ps{paper("A", 2020), paper("B", 2020), paper("C", 2021),
                                paper("D", 2020), paper("E", 2021), paper("F", 2021),
                                paper("Q", 2022, "J1", 5), paper("R", 2022, "J1", 3),
                                paper("S", 2022, "J2", 8), paper("T", 2022, "J2")};
    std::vector<CitationEdge> es{{"Q", "A"}, {"Q", "B"}, {"Q", "D"}, {"R", "C"}, {"S", "A"},
                                 {"S", "E"}, {"S", "F"}, {"S", "C"}, {"R", "E"}};
    std::vector<FieldAssignment> fs;
    for (const auto* id : {"A", "B", "C", "Q", "R"}) fs.push_back(assign(id, "f"));
    for (const auto* id : {"D", "E", "F", "S", "T"}) fs.push_back(assign(id, "g"));
    if (leave_one_unassigned) fs.erase(fs.begin() + 1);
    return make_corpus(ps, es, fs);
}

TEST(MetricMatrix, ToyCorpusMatchesComponentOps) {
    const auto c = six_core_corpus();
    const auto m = build_metric_matrix(c, kSL).matrix;
    ASSERT_EQ(m.columns.size(), 24u);
    for (std::size_t k = 0; k < 24; ++k) EXPECT_EQ(m.columns[k].metric_id, kMetricColumns[k]);
    EXPECT_EQ(m.paper_ids, c.core_ids());

    const auto s = compute_citing_stats(c);
    std::vector<MetricVector> base{compute_citation_count(c), compute_sc1(c, s).metric,
                                   compute_sc2(c, s).metric, compute_sc3(c, s).metric};
    for (std::size_t k = 0; k < 4; ++k) base.push_back(log_transform(base[k]));
    for (const auto& b : base) {
        const auto& col = m.column(b.metric_id);
        EXPECT_EQ(col.values, b.values) << b.metric_id;
        const auto r = ratio_normalize(b, kSL, c);
        const auto z = zscore_normalize(b, kSL, c);
        EXPECT_EQ(m.column(r.metric.metric_id).values, r.metric.values);
        EXPECT_EQ(m.column(z.metric.metric_id).values, z.metric.values);
    }
    for (std::size_t i = 0; i < m.paper_ids.size(); ++i) EXPECT_TRUE(m.row_complete(i));
}

TEST(MetricMatrix, UnitWeightsCollapse) {
    std::vector<PaperRecord> ps;
    std::vector<CitationEdge> es;
    std::vector<FieldAssignment> fs;
    for (int i = 0; i < 4; ++i) {
        const auto core = "C" + std::to_string(i);
        ps.push_back(paper(core, 2020));
        fs.push_back(assign(core, i < 2 ? "f" : "g"));
        for (int j = 0; j <= i; ++j) {
            const auto id = "Q" + std::to_string(i) + std::to_string(j);
            ps.push_back(paper(id, 2022, "J" + std::to_string(i * 10 + j), 1));
            es.push_back({id, core});
        }
    }
    const auto c = make_corpus(ps, es, fs);
    const auto m = build_metric_matrix(c, kSL).matrix;
    EXPECT_EQ(m.column("c").values, m.column("sc1").values);
    EXPECT_EQ(m.column("c").values, m.column("sc2").values);
    EXPECT_EQ(m.column("c").values, m.column("sc3").values);
}

TEST(MetricMatrix, UnassignedPaperHasEmptyNormalizedCells) {
    const auto c = six_core_corpus(true);
    const auto m = build_metric_matrix(c, kSL).matrix;
    EXPECT_EQ(m.unassigned, 1u);
    const auto row = static_cast<std::size_t>(
        std::find(m.paper_ids.begin(), m.paper_ids.end(), "B") - m.paper_ids.begin());
    for (std::size_t k = 0; k < 24; ++k) {
        EXPECT_EQ(std::isnan(m.columns[k].values[row]), k >= 8) << m.columns[k].metric_id;
    }
    EXPECT_FALSE(m.row_complete(row));
}

TEST(MetricMatrix, MissingBaseMetricRejected) {
    const auto c = six_core_corpus();
    const auto m = build_metric_matrix(c, kSL).matrix;
    std::vector<MetricVector> base(m.columns.begin(), m.columns.begin() + 7);
    EXPECT_THROW(assemble_metric_matrix(base, core_labels(c, kSL), kSL, c.core_ids()), InputError);
}

TEST(MetricMatrix, TsvRoundTrip) {
    const auto c = six_core_corpus(true);
    const auto m = build_metric_matrix(c, kSL).matrix;
    std::ostringstream out;
    write_metric_matrix(out, m);
    std::istringstream in(out.str());
    const auto back = read_metric_matrix(in, "metrics.tsv");
    EXPECT_EQ(back.paper_ids, m.paper_ids);
    EXPECT_EQ(back.unassigned, 1u);
    for (std::size_t k = 0; k < 24; ++k) {
        for (std::size_t i = 0; i < m.paper_ids.size(); ++i) {
            const double a = m.columns[k].values[i], b = back.columns[k].values[i];
            if (std::isnan(a)) {
                EXPECT_TRUE(std::isnan(b));
            } else {
                EXPECT_NEAR(a, b, 1e-8 * std::max(1.0, std::abs(a)));
            }
        }
    }
    std::istringstream bad("paper_id\tc\n");
    EXPECT_THROW(read_metric_matrix(bad, "bad.tsv"), InputError);
}

}  // namespace
}  // namespace fieldnorm
