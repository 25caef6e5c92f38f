#include "fieldnorm_cli/commands.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fieldnorm/bias_eval.hpp"
#include "fieldnorm/diagnostics.hpp"
#include "fieldnorm/error.hpp"
#include "fieldnorm/format.hpp"
#include "fieldnorm/synthgen.hpp"
#include "fieldnorm/target_norm.hpp"
#include "fieldnorm_cli/reports.hpp"

namespace fieldnorm::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    return out;
}

void write_json(const fs::path& path, const json& doc) {
    auto out = open_output(path);
    out << doc.dump(2) << '\n';
}

void prepare_out_dir(const RunConfig& config) {
    if (config.out.empty()) throw InputError("--out is required");
    std::error_code ec;
    fs::create_directories(config.out, ec);
    if (ec || !fs::is_directory(config.out)) {
        throw InputError("output directory " + config.out.string() + " is not writable");
    }
}

void validate(const RunConfig& config) {
    for (double z : config.z_list) {
        if (!(z > 0.0 && z < 100.0)) throw InputError("--z values must lie in (0, 100), got " + format_real(z));
    }
    if (config.null_samples < 1) throw InputError("--null-samples must be >= 1");
}

void require_file(const fs::path& path, const char* flag) {
    if (path.empty()) throw InputError(std::string(flag) + " is required");
    if (!fs::exists(path)) throw InputError("input file not found: " + path.string());
}

json document(const RunConfig& config) {
    return {{"format_version", kFormatVersion}, {"config", config.effective()}};
}

MetricMatrix load_matrix(const RunConfig& config) {
    const auto path = config.metrics_path();
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("metric matrix not found: " + path.string() + " (run `metrics` first)");
    auto m = read_metric_matrix(in, path.string());
    m.grouping = config.grouping;
    return m;
}

}  // namespace

json RunConfig::effective() const {
    json groupings = json::array();
    for (const auto& g : evaluation_groupings()) groupings.push_back(g.str());
    json z = json::array();
    for (double v : z_list) z.push_back(round_real(v));
    return {{"papers", papers.string()},
            {"citations", citations.string()},
            {"fields", fields.string()},
            {"metrics", metrics_path().string()},
            {"core_years", window.core_years},
            {"citing_year", window.citing_year},
            {"grouping", grouping.str()},
            {"eval_groupings", groupings},
            {"z", z},
            {"null_samples", null_samples},
            {"seed", seed},
            {"skip_bad_rows", skip_bad_rows}};
}

std::vector<Grouping> RunConfig::evaluation_groupings() const {
    return eval_groupings.empty() ? std::vector<Grouping>{grouping} : eval_groupings;
}

fs::path RunConfig::metrics_path() const { return metrics ? *metrics : out / "metrics.tsv"; }

std::string grouping_slug(const Grouping& grouping) {
    std::string s = grouping.scheme + "_" + grouping.level;
    for (auto& c : s) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
        if (!ok) c = '-';
    }
    return s;
}

Ingested ingest(const RunConfig& config) {
    require_file(config.papers, "--papers");
    require_file(config.citations, "--citations");
    require_file(config.fields, "--fields");
    LoadOptions options;
    options.skip_bad_rows = config.skip_bad_rows;
    auto papers = load_papers(config.papers, paper_format_for(config.papers), options);
    auto citations = load_citations(config.citations, options);
    auto fields = load_field_assignments(config.fields, options);

    auto window = config.window;
    auto corpus = Corpus::build(std::move(papers.records), std::move(citations.records),
                                fields.records, window);
    const auto& rep = corpus.report();

    json doc = document(config);
    doc["status"] = "ok";
    doc["loaders"] = {{"papers", to_json(papers.diagnostics)},
                      {"citations", to_json(citations.diagnostics)},
                      {"fields", to_json(fields.diagnostics)}};
    doc["corpus"] = to_json(rep);
    doc["corpus"]["edges_duplicate"] = rep.edges_duplicate + citations.diagnostics.duplicates;
    json notes = json::array();
    if (rep.papers_missing_ref_count > 0) {
        notes.push_back(std::to_string(rep.papers_missing_ref_count) +
                        " citing papers lack total_ref_count; r falls back to in-corpus out-degree");
    }
    for (const auto& g : config.evaluation_groupings()) {
        if (!corpus.has_grouping(g)) notes.push_back("evaluation grouping " + g.str() + " has no assignments");
    }
    if (!corpus.has_grouping(config.grouping)) {
        notes.push_back("normalization grouping " + config.grouping.str() + " has no assignments");
    }
    doc["notes"] = notes;
    return {std::move(corpus), std::move(doc)};
}

void cmd_ingest(const RunConfig& config) {
    validate(config);
    prepare_out_dir(config);
    auto result = ingest(config);
    write_json(config.out / "run_report.json", result.report);
}

void cmd_metrics(const RunConfig& config) {
    validate(config);
    prepare_out_dir(config);
    auto ingested = ingest(config);
    write_json(config.out / "run_report.json", ingested.report);

    const auto build = build_metric_matrix(ingested.corpus, config.grouping, config.threads);
    {
        auto out = open_output(config.out / "metrics.tsv");
        write_metric_matrix(out, build.matrix);
    }
    json doc = document(config);
    doc["scheme"] = config.grouping.scheme;
    doc["level"] = config.grouping.level;
    doc["std"] = "population";
    doc["unassigned"] = build.matrix.unassigned;
    json stats = json::object();
    for (const auto& [metric, s] : build.field_stats) stats[metric] = to_json(s);
    doc["metrics"] = stats;
    doc["degenerate_fields"] = build.matrix.degenerate_fields;
    doc["skipped_edges"] = build.skipped_edges;
    doc["citing_stats"] = to_json(build.citing);
    write_json(config.out / "field_stats.json", doc);
}

void cmd_bias(const RunConfig& config) {
    validate(config);
    prepare_out_dir(config);
    const auto ingested = ingest(config);
    const auto matrix = load_matrix(config);
    for (const auto& g : config.evaluation_groupings()) {
        const auto eval = evaluate(matrix, g, config.z_list, config.null_samples, config.seed,
                                   ingested.corpus, config.threads);
        const auto slug = grouping_slug(g);

        json doc = document(config);
        doc["scheme"] = g.scheme;
        doc["level"] = g.level;
        doc["excluded_unassigned"] = eval.excluded_unassigned;
        json nulls = json::object();
        for (const auto& [z, m] : eval.null_models) nulls[format_real(z)] = to_json(*m);
        doc["null_models"] = nulls;
        json reports = json::array();
        for (const auto& r : eval.reports) reports.push_back(to_json(r));
        doc["reports"] = reports;
        write_json(config.out / ("bias_" + slug + ".json"), doc);

        auto plot = open_output(config.out / ("bias_plot_" + slug + ".tsv"));
        plot << "metric\tz\td_m\tci_low\tci_high\n";
        auto summary = open_output(config.out / ("bias_summary_" + slug + ".tsv"));
        summary << "metric\tz\td_m\tci_high\twithin_ci\n";
        for (const auto& r : eval.reports) {
            plot << r.metric << '\t' << format_real(r.z) << '\t' << format_real(r.d_m) << '\t'
                 << format_real(r.null_model->ci_low) << '\t' << format_real(r.null_model->ci_high)
                 << '\n';
            summary << r.metric << '\t' << format_real(r.z) << '\t' << format_real(r.d_m) << '\t'
                    << format_real(r.null_model->ci_high) << '\t' << (r.within_ci() ? "yes" : "no")
                    << '\n';
        }
    }
}

void cmd_diag(const RunConfig& config) {
    validate(config);
    prepare_out_dir(config);
    const auto ingested = ingest(config);
    const auto matrix = load_matrix(config);
    for (const auto& g : config.evaluation_groupings()) {
        const auto report = rq1_analysis(ingested.corpus, g, matrix);
        const auto slug = grouping_slug(g);
        {
            auto out = open_output(config.out / ("diagnostics_" + slug + ".tsv"));
            write_diagnostics_table(out, report);
        }
        json doc = document(config);
        doc["rq1"] = to_json(report);
        doc["assumptions"] = to_json(verify_assumptions(ingested.corpus, g));
        write_json(config.out / ("diagnostics_" + slug + ".json"), doc);
    }
}

void cmd_synth(const RunConfig& config) {
    if (config.synth_config.empty()) throw InputError("--config is required");
    prepare_out_dir(config);
    auto synth = load_synth_config(config.synth_config);
    if (config.synth_seed) synth.seed = *config.synth_seed;
    const auto corpus = generate(synth);
    write_synthetic_corpus(corpus, config.out);
    json doc = {{"format_version", kFormatVersion},
                {"config", {{"config", config.synth_config.string()},
                            {"seed", synth.seed},
                            {"epsilon", round_real(synth.epsilon)},
                            {"core_years", synth.window.core_years},
                            {"citing_year", synth.window.citing_year},
                            {"scheme", synth.scheme},
                            {"level", synth.level},
                            {"fields", synth.fields.size()}}},
                {"generator", kGeneratorId},
                {"report", to_json(corpus.report)}};
    write_json(config.out / "synth_report.json", doc);
}

void cmd_report(const RunConfig& config) {
    prepare_out_dir(config);
    std::vector<fs::path> inputs;
    for (const auto& entry : fs::directory_iterator(config.out)) {
        const auto& p = entry.path();
        if (p.extension() == ".json" && p.filename() != "report.json") inputs.push_back(p);
    }
    if (inputs.empty()) throw InputError("no reports found in " + config.out.string());
    std::sort(inputs.begin(), inputs.end());
    json files = json::object();
    for (const auto& p : inputs) {
        std::ifstream in(p, std::ios::binary);
        auto doc = json::parse(in, nullptr, false);
        if (doc.is_discarded()) throw InputError("malformed JSON in " + p.string());
        files[p.filename().string()] = std::move(doc);
    }
    write_json(config.out / "report.json", {{"format_version", kFormatVersion}, {"files", files}});
}

namespace {

json error_document(int code, const std::string& type, const std::string& message,
                    const RowError* row = nullptr) {
    json e = {{"type", type}, {"message", message}};
    if (row) {
        e["path"] = row->path();
        e["line"] = row->line();
    }
    return {{"format_version", kFormatVersion},
            {"status", "error"},
            {"exit_code", code},
            {"errors", json::array({e})}};
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Citation field-normalization indicators and bias evaluation", "fieldnorm"};
    app.require_subcommand(1);
    RunConfig config;
    std::string grouping_text = config.grouping.str();
    std::vector<std::string> eval_texts;
    std::uint64_t synth_seed = 0;

    auto add_inputs = [&](CLI::App* cmd) {
        cmd->add_option("--papers", config.papers, "Papers file (TSV or JSONL)");
        cmd->add_option("--citations", config.citations, "Citations TSV");
        cmd->add_option("--fields", config.fields, "Field assignments TSV");
        cmd->add_option("--core-years", config.window.core_years, "Core publication years")
            ->delimiter(',');
        cmd->add_option("--citing-year", config.window.citing_year, "Citing year");
        cmd->add_option("--grouping", grouping_text, "Normalization grouping SCHEME:LEVEL");
        cmd->add_option("--eval-grouping", eval_texts, "Evaluation grouping (repeatable)");
        cmd->add_option("--z", config.z_list, "Top-z percentages (repeatable)")->delimiter(',');
        cmd->add_option("--null-samples", config.null_samples, "Null-model sample count");
        cmd->add_option("--seed", config.seed, "Random seed");
        cmd->add_option("--threads", config.threads, "Worker threads");
        cmd->add_option("--metrics", config.metrics, "Metric matrix (default OUT/metrics.tsv)");
        cmd->add_option("--out", config.out, "Output directory")->required();
        cmd->add_flag("--skip-bad-rows", config.skip_bad_rows, "Skip malformed rows");
    };
    auto* ingest_cmd = app.add_subcommand("ingest", "Validate inputs and write run_report.json");
    auto* metrics_cmd = app.add_subcommand("metrics", "Compute the 24-column metric matrix");
    auto* bias_cmd = app.add_subcommand("bias", "d_M bias evaluation with null-model CI");
    auto* diag_cmd = app.add_subcommand("diag", "Growth-rate and citation-density diagnostics");
    for (auto* cmd : {ingest_cmd, metrics_cmd, bias_cmd, diag_cmd}) add_inputs(cmd);

    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic corpus");
    synth_cmd->add_option("--config", config.synth_config, "Scenario config (JSON)")->required();
    auto* seed_opt = synth_cmd->add_option("--seed", synth_seed, "Override the config seed");
    synth_cmd->add_option("--out", config.out, "Output directory")->required();

    auto* report_cmd = app.add_subcommand("report", "Bundle prior JSON outputs into report.json");
    report_cmd->add_option("--out", config.out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << error_document(kInputError, "usage", e.what()).dump(2) << '\n';
        return kInputError;
    }

    try {
        config.grouping = Grouping::parse(grouping_text);
        for (const auto& t : eval_texts) config.eval_groupings.push_back(Grouping::parse(t));
        if (seed_opt->count() > 0) config.synth_seed = synth_seed;

        if (ingest_cmd->parsed()) cmd_ingest(config);
        else if (metrics_cmd->parsed()) cmd_metrics(config);
        else if (bias_cmd->parsed()) cmd_bias(config);
        else if (diag_cmd->parsed()) cmd_diag(config);
        else if (synth_cmd->parsed()) cmd_synth(config);
        else if (report_cmd->parsed()) cmd_report(config);
        return kOk;
    } catch (const RowError& e) {
        err << error_document(kInputError, "row", e.what(), &e).dump(2) << '\n';
        return kInputError;
    } catch (const InputError& e) {
        err << error_document(kInputError, "input", e.what()).dump(2) << '\n';
        return kInputError;
    } catch (const DomainError& e) {
        err << error_document(kInputError, "domain", e.what()).dump(2) << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << error_document(kInternalError, "internal", e.what()).dump(2) << '\n';
        return kInternalError;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.push_back("fieldnorm");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace fieldnorm::cli
