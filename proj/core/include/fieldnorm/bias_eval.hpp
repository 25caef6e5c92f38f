#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fieldnorm/corpus.hpp"
#include "fieldnorm/random.hpp"
#include "fieldnorm/target_norm.hpp"

namespace fieldnorm {

// Positions of `values` ordered by descending value, ties by ascending id.
std::vector<std::size_t> rank_papers(std::span<const std::string> ids,
                                     std::span<const double> values);

struct FieldSelection {
    std::string field_id;
    std::int64_t total = 0;     // K_i
    std::int64_t selected = 0;  // k_i
    double expected = 0.0;      // mu_i = (z / 100) * K_i
};

struct SelectionCounts {
    Grouping grouping;
    double z = 0.0;
    std::int64_t n = 0;  // selected
    std::int64_t N = 0;  // evaluable
    std::vector<FieldSelection> fields;

    std::size_t F() const noexcept { return fields.size(); }
};

// round(z / 100 * N), half-up. Throws DomainError unless 0 < z <= 100.
std::int64_t selection_size(double z, std::int64_t N);

// Counts field membership in the top z% of `ranking` (positions into
// `labels`). Every ranked position must carry a label; fields with no ranked
// paper are omitted.
SelectionCounts top_share_counts(std::span<const std::size_t> ranking, double z,
                                 const FieldLabels& labels, Grouping grouping = {});

// d_M = sum_i (k_i - mu_i)^2 / sigma_i^2 * (1 - K_i / N) with
// sigma_i^2 = gamma * K_i * (N - K_i) and gamma = n (N - n) / (N^2 (N - 1)).
// No square root is taken. A field holding every paper contributes 0.
// Requires N >= 2, 0 < n < N and K_i >= 1.
double mahalanobis_bias(const SelectionCounts& s);
double mahalanobis_bias(std::span<const std::int64_t> totals, std::span<const std::int64_t> selected,
                        std::span<const double> expected, std::int64_t n, std::int64_t N);

struct NullModel {
    std::int64_t samples = 0;
    std::uint64_t seed = 0;
    std::string stream;
    std::string generator;
    std::int64_t N = 0;
    std::int64_t n = 0;
    double z = 0.0;
    double ci_low = 0.0;   // 2.5th percentile
    double ci_high = 0.0;  // 97.5th percentile
    double p95 = 0.0;      // one-sided 95th percentile
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    std::vector<std::pair<double, double>> quantiles;  // (q, value)
    std::vector<double> sorted;
    bool degenerate = false;  // fewer than 100 samples
};

// Linear-interpolation (type 7) quantile of an ascending sample.
double quantile_sorted(std::span<const double> sorted, double q);

// d_M of one uniform draw of round(z/100 N) papers without replacement from
// fields with the given sizes.
double sample_unbiased_dm(std::span<const std::int64_t> field_sizes, double z, Engine& engine);

// S independent unbiased draws; sample s uses substream (seed, stream, s).
NullModel null_model_distribution(std::span<const std::int64_t> field_sizes, double z,
                                  std::int64_t samples, std::uint64_t seed, unsigned threads = 1,
                                  std::string_view stream = "null");
NullModel null_model_distribution(const Corpus& corpus, const Grouping& grouping, double z,
                                  std::int64_t samples, std::uint64_t seed, unsigned threads = 1);

struct BiasReport {
    std::string metric;
    Grouping grouping;
    double z = 0.0;
    std::int64_t N = 0;
    std::int64_t n = 0;
    std::size_t F = 0;
    double d_m = 0.0;
    std::shared_ptr<const NullModel> null_model;
    std::size_t excluded_unassigned = 0;

    bool within_ci() const { return null_model && d_m <= null_model->ci_high; }
};

struct Evaluation {
    Grouping grouping;
    std::vector<BiasReport> reports;  // metric-major, then z in input order
    std::map<double, std::shared_ptr<const NullModel>> null_models;
    std::size_t excluded_unassigned = 0;
};

// Ranks every matrix column over core papers that are assigned at
// `eval_grouping` and have all 24 cells, and reports d_M per (metric, z)
// against a null model shared per z.
Evaluation evaluate(const MetricMatrix& matrix, const Grouping& eval_grouping,
                    std::span<const double> z_list, std::int64_t samples, std::uint64_t seed,
                    const Corpus& corpus, unsigned threads = 1);

}  // namespace fieldnorm
