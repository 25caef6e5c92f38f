#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fieldnorm/corpus.hpp"
#include "fieldnorm/source_norm.hpp"

namespace fieldnorm {

// Field label per value position (-1 = unassigned) plus the label names.
struct FieldLabels {
    std::vector<std::string> field_ids;
    std::vector<std::int32_t> label;

    std::size_t field_count() const noexcept { return field_ids.size(); }
};

// Labels of Corpus::core_papers() at `grouping`.
FieldLabels core_labels(const Corpus& corpus, const Grouping& grouping);

struct FieldStats {
    std::string field_id;
    std::size_t n = 0;
    double mean = 0.0;
    double std = 0.0;  // population (divide by n)
};

struct FieldStatsResult {
    std::vector<FieldStats> fields;  // fields with n >= 1, in label order
    std::size_t unassigned = 0;
};

struct NormalizedMetric {
    MetricVector metric;  // NaN where the paper is unassigned
    std::vector<std::string> degenerate_fields;
    std::size_t unassigned = 0;
};

FieldStatsResult field_stats(std::span<const double> values, const FieldLabels& labels);
FieldStatsResult field_stats(const MetricVector& v, const Grouping& grouping, const Corpus& corpus);

// m / mean per field ("R_" prefix). Fields with mean 0 map to 0 and are flagged.
NormalizedMetric ratio_normalize(const MetricVector& v, const FieldLabels& labels);
NormalizedMetric ratio_normalize(const MetricVector& v, const Grouping& grouping,
                                 const Corpus& corpus);

// (m - mean) / std per field ("Z_" prefix). Fields with std 0 map to 0 and are flagged.
NormalizedMetric zscore_normalize(const MetricVector& v, const FieldLabels& labels);
NormalizedMetric zscore_normalize(const MetricVector& v, const Grouping& grouping,
                                  const Corpus& corpus);

inline constexpr std::array<std::string_view, 8> kBaseMetrics = {
    "c", "c_ln", "sc1", "sc2", "sc3", "sc1_ln", "sc2_ln", "sc3_ln"};

// Column order of the metric matrix: base, ratio-normalized, z-normalized.
inline constexpr std::array<std::string_view, 24> kMetricColumns = {
    "c",      "c_ln",     "sc1",      "sc2",      "sc3",      "sc1_ln",   "sc2_ln",   "sc3_ln",
    "R_c",    "R_c_ln",   "R_sc1",    "R_sc2",    "R_sc3",    "R_sc1_ln", "R_sc2_ln", "R_sc3_ln",
    "Z_c",    "Z_c_ln",   "Z_sc1",    "Z_sc2",    "Z_sc3",    "Z_sc1_ln", "Z_sc2_ln", "Z_sc3_ln"};

struct MetricMatrix {
    Grouping grouping;
    std::vector<std::string> paper_ids;
    std::vector<MetricVector> columns;  // kMetricColumns order; NaN = empty cell
    std::size_t unassigned = 0;
    std::map<std::string, std::vector<std::string>> degenerate_fields;

    const MetricVector& column(std::string_view metric_id) const;
    // True when every column of row `i` holds a value.
    bool row_complete(std::size_t i) const;
};

// Builds the 24 columns from the 8 base vectors. Throws InputError unless
// `base` holds exactly the kBaseMetrics ids.
MetricMatrix assemble_metric_matrix(std::vector<MetricVector> base, const FieldLabels& labels,
                                    Grouping grouping, std::vector<std::string> paper_ids,
                                    unsigned threads = 1);

struct MetricMatrixBuild {
    MetricMatrix matrix;
    CitingStats citing;
    std::map<std::string, std::size_t> skipped_edges;      // sc1/sc2/sc3
    std::map<std::string, FieldStatsResult> field_stats;  // per base metric
};

MetricMatrixBuild build_metric_matrix(const Corpus& corpus, const Grouping& grouping,
                                      unsigned threads = 1);

// TSV with a paper_id column followed by the 24 metric columns. Empty cells
// mark unassigned papers; floats use 9 significant digits.
void write_metric_matrix(std::ostream& out, const MetricMatrix& matrix);
MetricMatrix read_metric_matrix(std::istream& in, std::string_view source);

}  // namespace fieldnorm
