#include "fieldnorm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "fieldnorm/error.hpp"
#include "fieldnorm/format.hpp"

namespace fieldnorm {

namespace {

double mean_of(std::span<const double> v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string cell(const std::optional<double>& v) { return v ? format_real(*v) : std::string(); }

}  // namespace

std::map<std::string, FieldGrowth> growth_rates(const Corpus& corpus, const Grouping& grouping) {
    const auto& index = corpus.fields(grouping);
    const auto& window = corpus.window();
    std::vector<FieldGrowth> rows(index.field_ids.size());
    for (std::size_t f = 0; f < rows.size(); ++f) {
        rows[f].field_id = index.field_ids[f];
        for (int y : window.core_years) rows[f].papers_by_year[y] = 0;
        rows[f].papers_by_year[window.citing_year] = 0;
    }
    for (PaperIndex p = 0; p < corpus.paper_count(); ++p) {
        const auto f = index.field_of(p);
        if (!f) continue;
        auto& row = rows[*f];
        if (corpus.is_core(p)) {
            ++row.core_count;
            ++row.papers_by_year[corpus.paper(p).pub_year];
        } else if (corpus.is_citing(p)) {
            ++row.citing_count;
            ++row.papers_by_year[corpus.paper(p).pub_year];
        }
    }
    std::map<std::string, FieldGrowth> out;
    for (auto& row : rows) {
        if (row.citing_count > 0) {
            row.growth_rate =
                static_cast<double>(row.core_count) / static_cast<double>(row.citing_count);
        }
        out.emplace(row.field_id, std::move(row));
    }
    return out;
}

std::map<std::string, double> field_densities(const Corpus& corpus, const Grouping& grouping,
                                              const CitingStats& stats) {
    const auto& index = corpus.fields(grouping);
    std::vector<double> totals(index.field_ids.size(), 0.0);
    for (const auto& s : stats.papers) {
        if (const auto f = index.field_of(s.paper)) totals[*f] += static_cast<double>(s.a);
    }
    std::map<std::string, double> out;
    for (std::size_t f = 0; f < totals.size(); ++f) out.emplace(index.field_ids[f], totals[f]);
    return out;
}

std::vector<PaperDensity> density_ratios(const Corpus& corpus, const Grouping& grouping,
                                         const std::map<std::string, double>& densities) {
    const auto& index = corpus.fields(grouping);
    std::vector<double> density(index.field_ids.size(), 0.0);
    for (std::size_t f = 0; f < density.size(); ++f) {
        if (auto it = densities.find(index.field_ids[f]); it != densities.end()) {
            density[f] = it->second;
        }
    }

    std::vector<PaperDensity> out;
    std::vector<std::int64_t> from_field(index.field_ids.size(), 0);
    for (const auto p : corpus.core_papers()) {
        PaperDensity d;
        d.paper_id = corpus.paper(p).paper_id;
        const auto own = index.field_of(p);
        if (!own) {
            d.flag = "unassigned";
            out.push_back(std::move(d));
            continue;
        }
        d.expected_density = density[*own];
        std::fill(from_field.begin(), from_field.end(), 0);
        std::int64_t total = 0;
        for (const auto citing : corpus.in_edges(p)) {
            if (const auto k = index.field_of(citing)) {
                ++from_field[*k];
                ++total;
            }
        }
        if (total == 0) {
            d.flag = corpus.in_edges(p).empty() ? "uncited" : "citing papers unassigned";
            out.push_back(std::move(d));
            continue;
        }
        double ad = 0.0;
        for (std::size_t k = 0; k < from_field.size(); ++k) {
            if (from_field[k] == 0) continue;
            ad += static_cast<double>(from_field[k]) / static_cast<double>(total) * density[k];
        }
        d.actual_density = ad;
        if (density[*own] > 0.0) {
            d.density_ratio = ad / density[*own];
        } else {
            d.flag = "own field density is zero";
        }
        out.push_back(std::move(d));
    }
    return out;
}

std::map<std::string, double> field_mean_metric(const MetricMatrix& matrix, const Grouping& grouping,
                                                std::string_view metric_id, const Corpus& corpus) {
    const auto& index = corpus.fields(grouping);
    const auto& column = matrix.column(metric_id);
    std::vector<double> sums(index.field_ids.size(), 0.0);
    std::vector<std::int64_t> counts(index.field_ids.size(), 0);
    for (std::size_t i = 0; i < matrix.paper_ids.size(); ++i) {
        const double v = column.values[i];
        if (std::isnan(v)) continue;
        const auto p = corpus.find(matrix.paper_ids[i]);
        if (!p) throw InputError("metric matrix row '" + matrix.paper_ids[i] + "' not in corpus");
        if (const auto f = index.field_of(*p)) {
            sums[*f] += v;
            ++counts[*f];
        }
    }
    std::map<std::string, double> out;
    for (std::size_t f = 0; f < sums.size(); ++f) {
        if (counts[f] > 0) out.emplace(index.field_ids[f], sums[f] / static_cast<double>(counts[f]));
    }
    return out;
}

OlsFit ols_r2(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("ols_r2: x and y differ in length");
    if (x.size() < 3) throw DomainError("ols_r2: needs at least 3 points");
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw DomainError("ols_r2: x is constant");
    OlsFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (syy == 0.0) return fit;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
    }
    fit.r2 = std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    return fit;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DomainError("pearson: x and y differ in length");
    if (x.size() < 2) return std::nullopt;
    const double mx = mean_of(x);
    const double my = mean_of(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

Rq1Report rq1_analysis(const Corpus& corpus, const Grouping& grouping, const MetricMatrix& matrix) {
    const auto stats = compute_citing_stats(corpus);
    const auto growth = growth_rates(corpus, grouping);
    const auto densities = field_densities(corpus, grouping, stats);

    std::map<std::string, double> per_paper_densities;
    for (const auto& [field, g] : growth) {
        per_paper_densities[field] =
            g.citing_count > 0 ? densities.at(field) / static_cast<double>(g.citing_count) : 0.0;
    }
    const auto ratios = density_ratios(corpus, grouping, densities);
    const auto ratios_per_paper = density_ratios(corpus, grouping, per_paper_densities);
    const auto mean_sc3 = field_mean_metric(matrix, grouping, "sc3", corpus);

    const auto& index = corpus.fields(grouping);
    const auto core = corpus.core_papers();
    std::vector<double> dr_sum(index.field_ids.size(), 0.0), drp_sum(index.field_ids.size(), 0.0);
    std::vector<std::int64_t> dr_n(index.field_ids.size(), 0), drp_n(index.field_ids.size(), 0);
    for (std::size_t i = 0; i < core.size(); ++i) {
        const auto f = index.field_of(core[i]);
        if (!f) continue;
        if (ratios[i].density_ratio) {
            dr_sum[*f] += *ratios[i].density_ratio;
            ++dr_n[*f];
        }
        if (ratios_per_paper[i].density_ratio) {
            drp_sum[*f] += *ratios_per_paper[i].density_ratio;
            ++drp_n[*f];
        }
    }

    Rq1Report rep;
    rep.grouping = grouping;
    std::vector<double> xs, ys, drs, drps;
    bool per_paper_complete = true;
    for (std::size_t f = 0; f < index.field_ids.size(); ++f) {
        const auto& id = index.field_ids[f];
        const auto& g = growth.at(id);
        DiagnosticRow row;
        row.field_id = id;
        row.papers_by_year = g.papers_by_year;
        row.growth_rate = g.growth_rate;
        row.density_total = densities.at(id);
        if (g.citing_count > 0) row.density_per_paper = per_paper_densities.at(id);
        if (auto it = mean_sc3.find(id); it != mean_sc3.end()) row.mean_sc3 = it->second;
        if (dr_n[f] > 0) row.mean_density_ratio = dr_sum[f] / static_cast<double>(dr_n[f]);
        if (drp_n[f] > 0) {
            row.mean_density_ratio_per_paper = drp_sum[f] / static_cast<double>(drp_n[f]);
        }
        row.valid = row.growth_rate && row.mean_sc3 && row.mean_density_ratio;
        if (row.valid) {
            xs.push_back(*row.growth_rate);
            ys.push_back(*row.mean_sc3);
            drs.push_back(*row.mean_density_ratio);
            if (row.mean_density_ratio_per_paper) {
                drps.push_back(*row.mean_density_ratio_per_paper);
            } else {
                per_paper_complete = false;
            }
        }
        rep.fields.push_back(std::move(row));
    }
    rep.valid_fields = xs.size();
    if (rep.valid_fields < 3) {
        throw DomainError("rq1_analysis needs at least 3 valid fields at " + grouping.str() +
                          ", found " + std::to_string(rep.valid_fields));
    }

    std::vector<double> residuals(ys.size());
    const bool constant_x = std::all_of(xs.begin(), xs.end(), [&](double v) { return v == xs[0]; });
    if (constant_x) {
        // Growth carries no information; fall back to the intercept-only model.
        rep.intercept_only = true;
        rep.regression.intercept = mean_of(ys);
        for (std::size_t i = 0; i < ys.size(); ++i) residuals[i] = ys[i] - rep.regression.intercept;
    } else {
        rep.regression = ols_r2(xs, ys);
        for (std::size_t i = 0; i < ys.size(); ++i) {
            residuals[i] = ys[i] - (rep.regression.intercept + rep.regression.slope * xs[i]);
        }
        rep.growth_sc3_correlation = pearson(xs, ys);
    }
    rep.residual_density_correlation = pearson(residuals, drs);
    if (per_paper_complete) rep.residual_density_correlation_per_paper = pearson(residuals, drps);
    return rep;
}

void write_diagnostics_table(std::ostream& out, const Rq1Report& report) {
    out << "field_id";
    std::vector<int> years;
    if (!report.fields.empty()) {
        for (const auto& [year, _] : report.fields.front().papers_by_year) years.push_back(year);
    }
    for (int y : years) out << "\tm_" << y;
    out << "\tgrowth_rate\tdensity_total\tdensity_per_paper\tmean_sc3\tmean_density_ratio\n";
    for (const auto& row : report.fields) {
        out << row.field_id;
        for (int y : years) out << '\t' << row.papers_by_year.at(y);
        out << '\t' << cell(row.growth_rate) << '\t' << format_real(row.density_total) << '\t'
            << cell(row.density_per_paper) << '\t' << cell(row.mean_sc3) << '\t'
            << cell(row.mean_density_ratio) << '\n';
    }
}

}  // namespace fieldnorm
