#include "fieldnorm/target_norm.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>

#include "fieldnorm/error.hpp"
#include "fieldnorm/format.hpp"
#include "fieldnorm/parallel.hpp"
#include "text_table.hpp"

namespace fieldnorm {

namespace {

constexpr double kEmpty = std::numeric_limits<double>::quiet_NaN();

class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        carry_ += std::abs(sum_) >= std::abs(x) ? (sum_ - t) + x : (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

std::vector<std::vector<std::size_t>> members_by_field(const FieldLabels& labels,
                                                       std::size_t* unassigned) {
    std::vector<std::vector<std::size_t>> members(labels.field_count());
    std::size_t missing = 0;
    for (std::size_t i = 0; i < labels.label.size(); ++i) {
        const auto l = labels.label[i];
        if (l < 0) {
            ++missing;
            continue;
        }
        members[static_cast<std::size_t>(l)].push_back(i);
    }
    if (unassigned) *unassigned = missing;
    return members;
}

FieldStats stats_of(std::span<const double> values, const std::vector<std::size_t>& members) {
    FieldStats s;
    s.n = members.size();
    const double first = values[members.front()];
    const bool constant = std::all_of(members.begin(), members.end(),
                                      [&](std::size_t i) { return values[i] == first; });
    if (constant) {
        s.mean = first;
        s.std = 0.0;
        return s;
    }
    const auto n = static_cast<double>(s.n);
    CompensatedSum total;
    for (auto i : members) total.add(values[i]);
    s.mean = total.value() / n;
    // Corrected two-pass variance.
    CompensatedSum dev, sq;
    for (auto i : members) {
        const double d = values[i] - s.mean;
        dev.add(d);
        sq.add(d * d);
    }
    const double var = (sq.value() - dev.value() * dev.value() / n) / n;
    s.std = std::sqrt(std::max(var, 0.0));
    return s;
}

void check_aligned(const MetricVector& v, const FieldLabels& labels) {
    if (v.values.size() != labels.label.size()) {
        throw InputError("metric " + v.metric_id + " has " + std::to_string(v.values.size()) +
                         " values but " + std::to_string(labels.label.size()) + " labels");
    }
}

template <class Map>
NormalizedMetric normalize(const MetricVector& v, const FieldLabels& labels, std::string prefix,
                           Map&& map) {
    check_aligned(v, labels);
    NormalizedMetric out;
    out.metric.metric_id = prefix + v.metric_id;
    out.metric.values.assign(v.values.size(), kEmpty);
    const auto members = members_by_field(labels, &out.unassigned);
    for (std::size_t f = 0; f < members.size(); ++f) {
        if (members[f].empty()) continue;
        const auto s = stats_of(v.values, members[f]);
        if (!map(s, v.values, members[f], out.metric.values)) {
            out.degenerate_fields.push_back(labels.field_ids[f]);
        }
    }
    return out;
}

}  // namespace

FieldLabels core_labels(const Corpus& corpus, const Grouping& grouping) {
    const auto& index = corpus.fields(grouping);
    FieldLabels labels;
    labels.field_ids = index.field_ids;
    const auto core = corpus.core_papers();
    labels.label.reserve(core.size());
    for (auto p : core) labels.label.push_back(index.label[p]);
    return labels;
}

FieldStatsResult field_stats(std::span<const double> values, const FieldLabels& labels) {
    if (values.size() != labels.label.size()) {
        throw InputError("field_stats: values and labels differ in length");
    }
    FieldStatsResult out;
    const auto members = members_by_field(labels, &out.unassigned);
    for (std::size_t f = 0; f < members.size(); ++f) {
        if (members[f].empty()) continue;
        auto s = stats_of(values, members[f]);
        s.field_id = labels.field_ids[f];
        out.fields.push_back(std::move(s));
    }
    return out;
}

FieldStatsResult field_stats(const MetricVector& v, const Grouping& grouping, const Corpus& corpus) {
    return field_stats(v.values, core_labels(corpus, grouping));
}

NormalizedMetric ratio_normalize(const MetricVector& v, const FieldLabels& labels) {
    return normalize(v, labels, "R_",
                     [](const FieldStats& s, const std::vector<double>& in,
                        const std::vector<std::size_t>& members, std::vector<double>& out) {
                         if (s.mean == 0.0) {
                             for (auto i : members) out[i] = 0.0;
                             return false;
                         }
                         for (auto i : members) out[i] = in[i] / s.mean;
                         return true;
                     });
}

NormalizedMetric ratio_normalize(const MetricVector& v, const Grouping& grouping,
                                 const Corpus& corpus) {
    return ratio_normalize(v, core_labels(corpus, grouping));
}

NormalizedMetric zscore_normalize(const MetricVector& v, const FieldLabels& labels) {
    return normalize(v, labels, "Z_",
                     [](const FieldStats& s, const std::vector<double>& in,
                        const std::vector<std::size_t>& members, std::vector<double>& out) {
                         if (s.std == 0.0) {
                             for (auto i : members) out[i] = 0.0;
                             return false;
                         }
                         for (auto i : members) out[i] = (in[i] - s.mean) / s.std;
                         return true;
                     });
}

NormalizedMetric zscore_normalize(const MetricVector& v, const Grouping& grouping,
                                  const Corpus& corpus) {
    return zscore_normalize(v, core_labels(corpus, grouping));
}

const MetricVector& MetricMatrix::column(std::string_view metric_id) const {
    for (const auto& c : columns) {
        if (c.metric_id == metric_id) return c;
    }
    throw InputError("metric matrix has no column '" + std::string(metric_id) + "'");
}

bool MetricMatrix::row_complete(std::size_t i) const {
    return std::none_of(columns.begin(), columns.end(),
                        [i](const MetricVector& c) { return std::isnan(c.values[i]); });
}

MetricMatrix assemble_metric_matrix(std::vector<MetricVector> base, const FieldLabels& labels,
                                    Grouping grouping, std::vector<std::string> paper_ids,
                                    unsigned threads) {
    if (base.size() != kBaseMetrics.size()) {
        throw InputError("metric matrix needs " + std::to_string(kBaseMetrics.size()) +
                         " base metrics, got " + std::to_string(base.size()));
    }
    std::vector<MetricVector> ordered;
    for (auto id : kBaseMetrics) {
        auto it = std::find_if(base.begin(), base.end(),
                               [id](const MetricVector& v) { return v.metric_id == id; });
        if (it == base.end()) throw InputError("missing base metric '" + std::string(id) + "'");
        if (it->values.size() != paper_ids.size()) {
            throw InputError("base metric '" + std::string(id) + "' is misaligned");
        }
        ordered.push_back(std::move(*it));
    }

    MetricMatrix m;
    m.grouping = std::move(grouping);
    m.paper_ids = std::move(paper_ids);
    const auto nb = ordered.size();
    std::vector<NormalizedMetric> normalized(2 * nb);
    parallel_for(2 * nb, threads, [&](std::size_t t) {
        normalized[t] = t < nb ? ratio_normalize(ordered[t], labels)
                               : zscore_normalize(ordered[t - nb], labels);
    });
    m.columns = std::move(ordered);
    m.unassigned = normalized.front().unassigned;
    for (auto& n : normalized) {
        if (!n.degenerate_fields.empty()) {
            m.degenerate_fields[n.metric.metric_id] = std::move(n.degenerate_fields);
        }
        m.columns.push_back(std::move(n.metric));
    }
    for (std::size_t i = 0; i < kMetricColumns.size(); ++i) {
        if (m.columns[i].metric_id != kMetricColumns[i]) {
            throw std::logic_error("metric matrix column order mismatch");
        }
    }
    return m;
}

MetricMatrixBuild build_metric_matrix(const Corpus& corpus, const Grouping& grouping,
                                      unsigned threads) {
    const auto labels = core_labels(corpus, grouping);
    MetricMatrixBuild out;
    out.citing = compute_citing_stats(corpus);

    auto c = compute_citation_count(corpus, threads);
    auto sc1 = compute_sc1(corpus, out.citing, threads);
    auto sc2 = compute_sc2(corpus, out.citing, threads);
    auto sc3 = compute_sc3(corpus, out.citing, threads);
    out.skipped_edges = {{"sc1", sc1.skipped_edges},
                         {"sc2", sc2.skipped_edges},
                         {"sc3", sc3.skipped_edges}};

    std::vector<MetricVector> base;
    base.push_back(log_transform(c));
    base.push_back(log_transform(sc1.metric));
    base.push_back(log_transform(sc2.metric));
    base.push_back(log_transform(sc3.metric));
    base.push_back(std::move(c));
    base.push_back(std::move(sc1.metric));
    base.push_back(std::move(sc2.metric));
    base.push_back(std::move(sc3.metric));
    for (const auto& v : base) out.field_stats[v.metric_id] = field_stats(v.values, labels);

    out.matrix = assemble_metric_matrix(std::move(base), labels, grouping, corpus.core_ids(), threads);
    return out;
}

void write_metric_matrix(std::ostream& out, const MetricMatrix& matrix) {
    out << "paper_id";
    for (const auto& c : matrix.columns) out << '\t' << c.metric_id;
    out << '\n';
    for (std::size_t i = 0; i < matrix.paper_ids.size(); ++i) {
        out << matrix.paper_ids[i];
        for (const auto& c : matrix.columns) {
            out << '\t';
            if (!std::isnan(c.values[i])) out << format_real(c.values[i]);
        }
        out << '\n';
    }
}

MetricMatrix read_metric_matrix(std::istream& in, std::string_view source) {
    const std::string src(source);
    std::string line;
    if (!detail::read_line(in, line)) throw InputError(src + ": empty metric matrix");
    const auto header = detail::split_tabs(line);
    if (header.size() != kMetricColumns.size() + 1 || header[0] != "paper_id" ||
        !std::equal(kMetricColumns.begin(), kMetricColumns.end(), header.begin() + 1)) {
        throw RowError(src, 1, "metric matrix header does not match the 24-column schema");
    }
    MetricMatrix m;
    for (auto id : kMetricColumns) m.columns.push_back({std::string(id), {}});
    std::size_t line_no = 1;
    while (detail::read_line(in, line)) {
        ++line_no;
        if (detail::is_blank(line)) continue;
        const auto cells = detail::split_tabs(line);
        if (cells.size() != header.size()) {
            throw RowError(src, line_no, "expected " + std::to_string(header.size()) + " columns");
        }
        m.paper_ids.emplace_back(cells[0]);
        bool any_empty = false;
        for (std::size_t k = 0; k < kMetricColumns.size(); ++k) {
            const auto cell = cells[k + 1];
            if (cell.empty()) {
                any_empty = true;
                m.columns[k].values.push_back(kEmpty);
                continue;
            }
            const auto v = detail::parse_real(cell);
            if (!v) throw RowError(src, line_no, "bad number '" + std::string(cell) + "'");
            m.columns[k].values.push_back(*v);
        }
        if (any_empty) ++m.unassigned;
    }
    return m;
}

}  // namespace fieldnorm
