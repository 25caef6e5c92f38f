#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fieldnorm/corpus.hpp"

namespace fieldnorm {

// Weights of one citing-year paper.
struct CitingSideStats {
    PaperIndex paper = 0;
    std::int64_t r = 0;  // reference-list length
    std::int64_t a = 0;  // active references (cited core papers)
    double p = 0.0;      // share of the journal's citing-year papers with a >= 1
    bool r_from_out_degree = false;
};

struct CitingStats {
    // Aligned with Corpus::citing_papers().
    std::vector<CitingSideStats> papers;
    std::map<std::string, double> journal_share;
    std::size_t r_from_out_degree = 0;
    std::size_t zero_r = 0;
    std::size_t zero_a = 0;
    std::size_t a_exceeds_r = 0;
};

// Values aligned with Corpus::core_papers().
struct MetricVector {
    std::string metric_id;
    std::vector<double> values;
};

// A source-weighted count plus the number of in-edges skipped because the
// weight was undefined (r = 0 or a = 0).
struct WeightedCount {
    MetricVector metric;
    std::size_t skipped_edges = 0;
};

CitingStats compute_citing_stats(const Corpus& corpus);

MetricVector compute_citation_count(const Corpus& corpus, unsigned threads = 1);
WeightedCount compute_sc1(const Corpus& corpus, const CitingStats& stats, unsigned threads = 1);
WeightedCount compute_sc2(const Corpus& corpus, const CitingStats& stats, unsigned threads = 1);
WeightedCount compute_sc3(const Corpus& corpus, const CitingStats& stats, unsigned threads = 1);

// ln(v + 1) elementwise; metric_id gains the suffix "_ln". Throws DomainError
// on a negative value.
MetricVector log_transform(const MetricVector& v);

}  // namespace fieldnorm
