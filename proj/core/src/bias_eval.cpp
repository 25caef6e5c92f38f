#include "fieldnorm/bias_eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/random/uniform_int_distribution.hpp>

#include "fieldnorm/error.hpp"
#include "fieldnorm/format.hpp"
#include "fieldnorm/parallel.hpp"

namespace fieldnorm {

namespace {

constexpr double kReportedQuantiles[] = {0.01, 0.025, 0.05, 0.1, 0.25, 0.5,
                                         0.75, 0.9,   0.95, 0.975, 0.99};

// Draws n of N papers without replacement by a partial Fisher-Yates shuffle
// over a field-label array, undoing the swaps afterwards so the scratch
// state is identical before every draw.
class UnbiasedSampler {
public:
    UnbiasedSampler(std::span<const std::int64_t> sizes, double z)
        : totals_(sizes.begin(), sizes.end()), selected_(sizes.size(), 0) {
        N_ = std::accumulate(totals_.begin(), totals_.end(), std::int64_t{0});
        n_ = selection_size(z, N_);
        if (n_ < 1 || n_ >= N_) {
            throw DomainError("null model needs 0 < n < N (n=" + std::to_string(n_) +
                              ", N=" + std::to_string(N_) + ")");
        }
        for (auto K : totals_) {
            if (K < 1) throw DomainError("null model field with no papers");
        }
        expected_.reserve(totals_.size());
        for (auto K : totals_) expected_.push_back(z / 100.0 * static_cast<double>(K));
        labels_.reserve(static_cast<std::size_t>(N_));
        for (std::size_t f = 0; f < totals_.size(); ++f) {
            labels_.insert(labels_.end(), static_cast<std::size_t>(totals_[f]),
                           static_cast<std::uint32_t>(f));
        }
        swaps_.resize(static_cast<std::size_t>(n_));
    }

    double draw(Engine& engine) {
        std::fill(selected_.begin(), selected_.end(), 0);
        const auto last = N_ - 1;
        for (std::int64_t j = 0; j < n_; ++j) {
            boost::random::uniform_int_distribution<std::int64_t> pick(j, last);
            const auto r = pick(engine);
            std::swap(labels_[static_cast<std::size_t>(j)], labels_[static_cast<std::size_t>(r)]);
            swaps_[static_cast<std::size_t>(j)] = r;
            ++selected_[labels_[static_cast<std::size_t>(j)]];
        }
        for (auto j = n_; j-- > 0;) {
            std::swap(labels_[static_cast<std::size_t>(j)],
                      labels_[static_cast<std::size_t>(swaps_[static_cast<std::size_t>(j)])]);
        }
        return mahalanobis_bias(totals_, selected_, expected_, n_, N_);
    }

    std::int64_t n() const { return n_; }
    std::int64_t N() const { return N_; }

private:
    std::vector<std::int64_t> totals_;
    std::vector<std::int64_t> selected_;
    std::vector<double> expected_;
    std::vector<std::uint32_t> labels_;
    std::vector<std::int64_t> swaps_;
    std::int64_t N_ = 0;
    std::int64_t n_ = 0;
};

std::string z_label(double z) { return format_real(z); }

}  // namespace

std::vector<std::size_t> rank_papers(std::span<const std::string> ids,
                                     std::span<const double> values) {
    if (ids.size() != values.size()) throw InputError("rank_papers: ids and values differ in length");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::isnan(values[i])) throw InputError("rank_papers: empty value for " + ids[i]);
    }
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (values[a] != values[b]) return values[a] > values[b];
        return ids[a] < ids[b];
    });
    return order;
}

std::int64_t selection_size(double z, std::int64_t N) {
    if (!(z > 0.0 && z <= 100.0)) {
        throw DomainError("z must lie in (0, 100], got " + format_real(z));
    }
    // z * N is exact for integral z and moderate N; dividing last keeps
    // half-way cases such as 5% of 10 on the .5 boundary.
    return static_cast<std::int64_t>(std::floor(z * static_cast<double>(N) / 100.0 + 0.5));
}

SelectionCounts top_share_counts(std::span<const std::size_t> ranking, double z,
                                 const FieldLabels& labels, Grouping grouping) {
    SelectionCounts s;
    s.grouping = std::move(grouping);
    s.z = z;
    s.N = static_cast<std::int64_t>(ranking.size());
    s.n = selection_size(z, s.N);

    std::vector<std::int64_t> totals(labels.field_count(), 0);
    std::vector<std::int64_t> selected(labels.field_count(), 0);
    for (std::size_t r = 0; r < ranking.size(); ++r) {
        const auto l = labels.label.at(ranking[r]);
        if (l < 0) throw InputError("top_share_counts: ranked paper has no field assignment");
        ++totals[static_cast<std::size_t>(l)];
        if (static_cast<std::int64_t>(r) < s.n) ++selected[static_cast<std::size_t>(l)];
    }
    for (std::size_t f = 0; f < totals.size(); ++f) {
        if (totals[f] == 0) continue;
        s.fields.push_back({labels.field_ids[f], totals[f], selected[f],
                            z / 100.0 * static_cast<double>(totals[f])});
    }
    return s;
}

double mahalanobis_bias(std::span<const std::int64_t> totals, std::span<const std::int64_t> selected,
                        std::span<const double> expected, std::int64_t n, std::int64_t N) {
    if (N < 2) throw DomainError("d_M needs N >= 2");
    if (n <= 0 || n >= N) {
        throw DomainError("d_M needs 0 < n < N (n=" + std::to_string(n) + ", N=" +
                          std::to_string(N) + ")");
    }
    if (totals.size() != selected.size() || totals.size() != expected.size()) {
        throw DomainError("d_M field arrays differ in length");
    }
    const auto Nd = static_cast<double>(N);
    const auto nd = static_cast<double>(n);
    const double gamma = nd * (Nd - nd) / (Nd * Nd * (Nd - 1.0));
    double sum = 0.0;
    for (std::size_t i = 0; i < totals.size(); ++i) {
        const auto K = totals[i];
        if (K < 1) throw DomainError("d_M needs K_i >= 1");
        if (K >= N) continue;  // (1 - K/N) = 0 and sigma^2 = 0
        const auto Kd = static_cast<double>(K);
        const double variance = gamma * Kd * (Nd - Kd);
        const double dev = static_cast<double>(selected[i]) - expected[i];
        sum += dev * dev / variance * (1.0 - Kd / Nd);
    }
    return sum;
}

double mahalanobis_bias(const SelectionCounts& s) {
    std::vector<std::int64_t> totals, selected;
    std::vector<double> expected;
    for (const auto& f : s.fields) {
        totals.push_back(f.total);
        selected.push_back(f.selected);
        expected.push_back(f.expected);
    }
    return mahalanobis_bias(totals, selected, expected, s.n, s.N);
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw DomainError("quantile of an empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

double sample_unbiased_dm(std::span<const std::int64_t> field_sizes, double z, Engine& engine) {
    UnbiasedSampler sampler(field_sizes, z);
    return sampler.draw(engine);
}

NullModel null_model_distribution(std::span<const std::int64_t> field_sizes, double z,
                                  std::int64_t samples, std::uint64_t seed, unsigned threads,
                                  std::string_view stream) {
    if (samples < 1) throw DomainError("null model needs at least one sample");
    const UnbiasedSampler prototype(field_sizes, z);

    NullModel m;
    m.samples = samples;
    m.seed = seed;
    m.stream = std::string(stream);
    m.generator = std::string(kGeneratorId);
    m.N = prototype.N();
    m.n = prototype.n();
    m.z = z;
    m.degenerate = samples < 100;

    const auto S = static_cast<std::size_t>(samples);
    std::vector<double> values(S);
    const std::size_t blocks = std::min<std::size_t>(std::max(1u, threads), S);
    const std::size_t per_block = (S + blocks - 1) / blocks;
    parallel_for(blocks, threads, [&](std::size_t b) {
        UnbiasedSampler sampler = prototype;
        const auto end = std::min(S, (b + 1) * per_block);
        for (auto s = b * per_block; s < end; ++s) {
            auto engine = make_engine(seed, stream, s);
            values[s] = sampler.draw(engine);
        }
    });

    std::sort(values.begin(), values.end());
    double total = 0.0;
    for (double v : values) total += v;
    m.mean = total / static_cast<double>(S);
    m.min = values.front();
    m.max = values.back();
    m.ci_low = quantile_sorted(values, 0.025);
    m.ci_high = quantile_sorted(values, 0.975);
    m.p95 = quantile_sorted(values, 0.95);
    for (double q : kReportedQuantiles) m.quantiles.emplace_back(q, quantile_sorted(values, q));
    m.sorted = std::move(values);
    return m;
}

NullModel null_model_distribution(const Corpus& corpus, const Grouping& grouping, double z,
                                  std::int64_t samples, std::uint64_t seed, unsigned threads) {
    const auto labels = core_labels(corpus, grouping);
    std::vector<std::int64_t> sizes(labels.field_count(), 0);
    for (auto l : labels.label) {
        if (l >= 0) ++sizes[static_cast<std::size_t>(l)];
    }
    std::erase(sizes, 0);
    return null_model_distribution(sizes, z, samples, seed, threads,
                                   "null:" + grouping.str() + ":" + z_label(z));
}

Evaluation evaluate(const MetricMatrix& matrix, const Grouping& eval_grouping,
                    std::span<const double> z_list, std::int64_t samples, std::uint64_t seed,
                    const Corpus& corpus, unsigned threads) {
    const auto& index = corpus.fields(eval_grouping);

    // Evaluable rows: core papers assigned at the evaluation grouping whose
    // 24 cells are all populated.
    std::vector<std::size_t> rows;
    std::vector<std::string> ids;
    FieldLabels labels;
    labels.field_ids = index.field_ids;
    Evaluation out;
    out.grouping = eval_grouping;
    for (std::size_t i = 0; i < matrix.paper_ids.size(); ++i) {
        const auto p = corpus.find(matrix.paper_ids[i]);
        if (!p || !corpus.is_core(*p)) {
            throw InputError("metric matrix row '" + matrix.paper_ids[i] +
                             "' is not a core paper of the corpus");
        }
        const auto l = index.label[*p];
        if (l < 0 || !matrix.row_complete(i)) {
            ++out.excluded_unassigned;
            continue;
        }
        rows.push_back(i);
        ids.push_back(matrix.paper_ids[i]);
        labels.label.push_back(l);
    }

    std::vector<std::int64_t> sizes(labels.field_count(), 0);
    for (auto l : labels.label) ++sizes[static_cast<std::size_t>(l)];
    std::erase(sizes, 0);

    for (double z : z_list) {
        if (out.null_models.contains(z)) continue;
        out.null_models[z] = std::make_shared<const NullModel>(null_model_distribution(
            sizes, z, samples, seed, threads, "null:" + eval_grouping.str() + ":" + z_label(z)));
    }

    const auto& columns = matrix.columns;
    std::vector<std::vector<BiasReport>> per_metric(columns.size());
    parallel_for(columns.size(), threads, [&](std::size_t c) {
        std::vector<double> values;
        values.reserve(rows.size());
        for (auto r : rows) values.push_back(columns[c].values[r]);
        const auto ranking = rank_papers(ids, values);
        for (double z : z_list) {
            const auto counts = top_share_counts(ranking, z, labels, eval_grouping);
            BiasReport rep;
            rep.metric = columns[c].metric_id;
            rep.grouping = eval_grouping;
            rep.z = z;
            rep.N = counts.N;
            rep.n = counts.n;
            rep.F = counts.F();
            rep.d_m = mahalanobis_bias(counts);
            rep.null_model = out.null_models.at(z);
            rep.excluded_unassigned = out.excluded_unassigned;
            per_metric[c].push_back(std::move(rep));
        }
    });
    for (auto& v : per_metric) {
        for (auto& r : v) out.reports.push_back(std::move(r));
    }
    return out;
}

}  // namespace fieldnorm
