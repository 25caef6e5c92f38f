#include "fieldnorm/source_norm.hpp"

#include <cmath>

#include "fieldnorm/error.hpp"
#include "fieldnorm/parallel.hpp"

namespace fieldnorm {

namespace {

// Sums weight(citing) over each core paper's in-edges. In-edge lists are in
// ascending citing order, so the summation order is fixed by the corpus and
// independent of the thread count.
template <class Weight>
WeightedCount weighted_in_degree(const Corpus& corpus, const CitingStats& stats,
                                 std::string metric_id, unsigned threads, Weight&& weight) {
    const auto core = corpus.core_papers();
    WeightedCount out{{std::move(metric_id), std::vector<double>(core.size(), 0.0)}, 0};
    std::vector<std::size_t> skipped(core.size(), 0);
    parallel_for(core.size(), threads, [&](std::size_t i) {
        double sum = 0.0;
        double carry = 0.0;  // Neumaier compensation
        for (const auto from : corpus.in_edges(core[i])) {
            const auto& s = stats.papers[static_cast<std::size_t>(corpus.citing_ordinal(from))];
            const double w = weight(s);
            if (w == 0.0) {
                ++skipped[i];
                continue;
            }
            const double t = sum + w;
            carry += std::abs(sum) >= std::abs(w) ? (sum - t) + w : (w - t) + sum;
            sum = t;
        }
        out.metric.values[i] = sum + carry;
    });
    for (auto s : skipped) out.skipped_edges += s;
    return out;
}

}  // namespace

CitingStats compute_citing_stats(const Corpus& corpus) {
    CitingStats stats;
    const auto citing = corpus.citing_papers();
    stats.papers.reserve(citing.size());

    std::map<std::string, std::pair<std::size_t, std::size_t>> journals;  // active, total
    for (const auto idx : citing) {
        CitingSideStats s;
        s.paper = idx;
        const auto out = corpus.out_edges(idx);
        for (const auto to : out) s.a += corpus.is_core(to) ? 1 : 0;
        const auto& rec = corpus.paper(idx);
        if (rec.total_ref_count) {
            s.r = *rec.total_ref_count;
            if (s.a > s.r) ++stats.a_exceeds_r;
        } else {
            s.r = static_cast<std::int64_t>(out.size());
            s.r_from_out_degree = true;
            ++stats.r_from_out_degree;
        }
        if (s.r == 0) ++stats.zero_r;
        if (s.a == 0) ++stats.zero_a;
        auto& j = journals[rec.journal_id];
        j.first += s.a >= 1 ? 1 : 0;
        ++j.second;
        stats.papers.push_back(s);
    }
    for (const auto& [journal, counts] : journals) {
        stats.journal_share[journal] =
            static_cast<double>(counts.first) / static_cast<double>(counts.second);
    }
    for (auto& s : stats.papers) s.p = stats.journal_share[corpus.paper(s.paper).journal_id];
    return stats;
}

MetricVector compute_citation_count(const Corpus& corpus, unsigned threads) {
    const auto core = corpus.core_papers();
    MetricVector v{"c", std::vector<double>(core.size(), 0.0)};
    parallel_for(core.size(), threads, [&](std::size_t i) {
        v.values[i] = static_cast<double>(corpus.in_edges(core[i]).size());
    });
    return v;
}

WeightedCount compute_sc1(const Corpus& corpus, const CitingStats& stats, unsigned threads) {
    return weighted_in_degree(corpus, stats, "sc1", threads, [](const CitingSideStats& s) {
        return s.r > 0 ? 1.0 / static_cast<double>(s.r) : 0.0;
    });
}

WeightedCount compute_sc2(const Corpus& corpus, const CitingStats& stats, unsigned threads) {
    return weighted_in_degree(corpus, stats, "sc2", threads, [](const CitingSideStats& s) {
        return s.a > 0 ? 1.0 / static_cast<double>(s.a) : 0.0;
    });
}

WeightedCount compute_sc3(const Corpus& corpus, const CitingStats& stats, unsigned threads) {
    // a >= 1 implies p > 0 for the citing paper's journal.
    return weighted_in_degree(corpus, stats, "sc3", threads, [](const CitingSideStats& s) {
        return s.a > 0 ? 1.0 / (static_cast<double>(s.a) * s.p) : 0.0;
    });
}

MetricVector log_transform(const MetricVector& v) {
    MetricVector out{v.metric_id + "_ln", std::vector<double>(v.values.size())};
    for (std::size_t i = 0; i < v.values.size(); ++i) {
        if (!(v.values[i] >= 0.0)) {
            throw DomainError("log_transform of " + v.metric_id + ": negative or NaN value at row " +
                              std::to_string(i));
        }
        out.values[i] = std::log1p(v.values[i]);
    }
    return out;
}

}  // namespace fieldnorm
