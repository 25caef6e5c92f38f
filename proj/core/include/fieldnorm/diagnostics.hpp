#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fieldnorm/corpus.hpp"
#include "fieldnorm/source_norm.hpp"
#include "fieldnorm/target_norm.hpp"

namespace fieldnorm {

struct FieldGrowth {
    std::string field_id;
    std::map<int, std::int64_t> papers_by_year;  // every window year, zeros included
    std::int64_t core_count = 0;
    std::int64_t citing_count = 0;
    // sum of core-year counts / citing-year count; empty when citing_count = 0.
    std::optional<double> growth_rate;
};

// Per-field annual counts over all window years. Every field of the
// grouping is present.
std::map<std::string, FieldGrowth> growth_rates(const Corpus& corpus, const Grouping& grouping);

// D_f: total active references of the field's citing-year papers.
std::map<std::string, double> field_densities(const Corpus& corpus, const Grouping& grouping,
                                              const CitingStats& stats);

struct PaperDensity {
    std::string paper_id;
    std::optional<double> expected_density;  // D_f of own field
    std::optional<double> actual_density;    // AD_i
    std::optional<double> density_ratio;     // DR_i = AD_i / D_f
    std::string flag;                        // why a value is missing
};

// Aligned with Corpus::core_papers(). Citations from citing papers without an
// assignment at `grouping` are left out of the weights w_{i,k}.
std::vector<PaperDensity> density_ratios(const Corpus& corpus, const Grouping& grouping,
                                         const std::map<std::string, double>& densities);

// Arithmetic mean of a matrix column per field; rows with empty cells or no
// assignment at `grouping` are skipped, empty fields omitted.
std::map<std::string, double> field_mean_metric(const MetricMatrix& matrix, const Grouping& grouping,
                                                std::string_view metric_id, const Corpus& corpus);

struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// Simple least squares y = intercept + slope x. Needs >= 3 points and a
// non-constant x; r2 is 0 when y is constant.
OlsFit ols_r2(std::span<const double> x, std::span<const double> y);

// Pearson correlation; empty when either side has zero variance.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

struct DiagnosticRow {
    std::string field_id;
    std::map<int, std::int64_t> papers_by_year;
    std::optional<double> growth_rate;
    double density_total = 0.0;
    std::optional<double> density_per_paper;  // D_f / citing-year count
    std::optional<double> mean_sc3;
    std::optional<double> mean_density_ratio;
    std::optional<double> mean_density_ratio_per_paper;
    bool valid = false;
};

struct Rq1Report {
    Grouping grouping;
    std::vector<DiagnosticRow> fields;
    std::size_t valid_fields = 0;
    OlsFit regression;           // mean sc3 on growth rate
    bool intercept_only = false;  // growth rate constant over valid fields
    std::optional<double> growth_sc3_correlation;
    // Pearson(residuals of the regression, mean density ratio).
    std::optional<double> residual_density_correlation;
    std::optional<double> residual_density_correlation_per_paper;
};

// Field table plus the growth-rate regression and residual analysis. A
// field is valid when its growth rate, mean sc3 and mean density ratio are
// all defined. Throws DomainError with fewer than 3 valid fields.
Rq1Report rq1_analysis(const Corpus& corpus, const Grouping& grouping, const MetricMatrix& matrix);

// Tab-separated field table; header field_id, m_<year>..., growth_rate,
// density_total, density_per_paper, mean_sc3, mean_density_ratio.
void write_diagnostics_table(std::ostream& out, const Rq1Report& report);

}  // namespace fieldnorm
