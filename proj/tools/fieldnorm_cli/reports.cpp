#include "fieldnorm_cli/reports.hpp"

#include <cmath>

#include "fieldnorm/format.hpp"

namespace fieldnorm::cli {

using nlohmann::json;

json real(double value) {
    if (!std::isfinite(value)) return nullptr;
    return round_real(value);
}

json real(const std::optional<double>& value) { return value ? real(*value) : json(nullptr); }

json to_json(const LoadDiagnostics& d) {
    return {{"rows_read", d.rows_read},
            {"rows_skipped", d.rows_skipped},
            {"duplicates", d.duplicates},
            {"warnings", d.warnings}};
}

json to_json(const BuildReport& r) {
    json coverage = json::object();
    for (const auto& [g, c] : r.coverage) {
        coverage[g.str()] = {{"assigned_papers", c.assigned_papers},
                             {"assigned_core", c.assigned_core},
                             {"assigned_citing", c.assigned_citing},
                             {"fraction_papers", real(c.fraction_papers)},
                             {"fraction_core", real(c.fraction_core)},
                             {"fraction_citing", real(c.fraction_citing)}};
    }
    return {{"papers_total", r.papers_total},
            {"core_papers", r.core_papers},
            {"citing_papers", r.citing_papers},
            {"edges_input", r.edges_input},
            {"edges_duplicate", r.edges_duplicate},
            {"edges_retained", r.edges_retained},
            {"edges_dropped_citing_not_in_window", r.edges_dropped_citing_not_in_window},
            {"edges_dropped_unknown_endpoint", r.edges_dropped_unknown_endpoint},
            {"assignments_unknown_paper", r.assignments_unknown_paper},
            {"citing_papers_missing_ref_count", r.papers_missing_ref_count},
            {"coverage", coverage}};
}

json to_json(const CitingStats& s) {
    return {{"citing_papers", s.papers.size()},
            {"journals", s.journal_share.size()},
            {"r_from_out_degree", s.r_from_out_degree},
            {"zero_r", s.zero_r},
            {"zero_a", s.zero_a},
            {"a_exceeds_r", s.a_exceeds_r}};
}

json to_json(const FieldStatsResult& r) {
    json fields = json::array();
    for (const auto& f : r.fields) {
        fields.push_back({{"field_id", f.field_id},
                          {"n", f.n},
                          {"mean", real(f.mean)},
                          {"std", real(f.std)}});
    }
    return {{"fields", fields}, {"unassigned", r.unassigned}};
}

json to_json(const NullModel& m) {
    json quantiles = json::object();
    for (const auto& [q, v] : m.quantiles) quantiles[format_real(q)] = real(v);
    return {{"S", m.samples},
            {"seed", m.seed},
            {"stream", m.stream},
            {"generator", m.generator},
            {"N", m.N},
            {"n", m.n},
            {"ci_low", real(m.ci_low)},
            {"ci_high", real(m.ci_high)},
            {"p95", real(m.p95)},
            {"min", real(m.min)},
            {"max", real(m.max)},
            {"mean", real(m.mean)},
            {"quantiles", quantiles},
            {"degenerate", m.degenerate}};
}

json to_json(const BiasReport& r) {
    return {{"metric", r.metric},
            {"scheme", r.grouping.scheme},
            {"level", r.grouping.level},
            {"z", real(r.z)},
            {"N", r.N},
            {"n", r.n},
            {"F", r.F},
            {"d_m", real(r.d_m)},
            {"within_ci", r.within_ci()},
            {"null", r.null_model ? to_json(*r.null_model) : json(nullptr)},
            {"excluded_unassigned", r.excluded_unassigned}};
}

json to_json(const Rq1Report& r) {
    json fields = json::array();
    for (const auto& row : r.fields) {
        json years = json::object();
        for (const auto& [y, m] : row.papers_by_year) years[std::to_string(y)] = m;
        fields.push_back({{"field_id", row.field_id},
                          {"papers_by_year", years},
                          {"growth_rate", real(row.growth_rate)},
                          {"density_total", real(row.density_total)},
                          {"density_per_paper", real(row.density_per_paper)},
                          {"mean_sc3", real(row.mean_sc3)},
                          {"mean_density_ratio", real(row.mean_density_ratio)},
                          {"mean_density_ratio_per_paper", real(row.mean_density_ratio_per_paper)},
                          {"valid", row.valid}});
    }
    return {{"scheme", r.grouping.scheme},
            {"level", r.grouping.level},
            {"valid_fields", r.valid_fields},
            {"regression",
             {{"model", r.intercept_only ? "intercept_only" : "mean_sc3 ~ growth_rate"},
              {"slope", real(r.regression.slope)},
              {"intercept", real(r.regression.intercept)},
              {"r2", real(r.regression.r2)}}},
            {"growth_sc3_correlation", real(r.growth_sc3_correlation)},
            {"residual_analysis",
             {{"method", "pearson(residuals of mean_sc3 ~ growth_rate, mean density ratio)"},
              {"correlation_total_density", real(r.residual_density_correlation)},
              {"correlation_per_paper_density", real(r.residual_density_correlation_per_paper)}}},
            {"fields", fields}};
}

json to_json(const AssumptionReport& r) {
    json dev = json::object();
    for (const auto& [f, d] : r.count_deviation) dev[f] = real(d);
    return {{"equal_annual_counts",
             {{"pass", r.equal_counts},
              {"max_relative_deviation", real(r.max_count_deviation)},
              {"per_field", dev}}},
            {"no_cross_field_citation",
             {{"pass", r.no_cross_field},
              {"cross_field_edges", r.cross_field_edges},
              {"classified_edges", r.classified_edges},
              {"cross_field_fraction", real(r.cross_field_fraction)}}},
            {"journals_have_active_paper",
             {{"pass", r.journals_active},
              {"journals", r.journals},
              {"inactive_journals", r.inactive_journals}}}};
}

json to_json(const SynthReport& r) {
    json fields = json::array();
    for (const auto& f : r.fields) {
        fields.push_back({{"field_id", f.field_id},
                          {"citing_papers", f.citing_papers},
                          {"requested_refs", f.requested_refs},
                          {"realized_refs", f.realized_refs},
                          {"cross_field_refs", f.cross_field_refs}});
    }
    return {{"requested_refs", r.requested_refs},
            {"realized_refs", r.realized_refs},
            {"collision_losses", r.collision_losses},
            {"warnings", r.warnings},
            {"fields", fields}};
}

}  // namespace fieldnorm::cli
