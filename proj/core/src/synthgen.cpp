#include "fieldnorm/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>

#include <boost/random/discrete_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <json.hpp>

#include "fieldnorm/error.hpp"
#include "fieldnorm/random.hpp"
#include "fieldnorm/source_norm.hpp"

namespace fieldnorm {

namespace {

using nlohmann::json;

constexpr int kCollisionRetries = 64;
constexpr int kTruncationRetries = 1000;

std::string padded(std::int64_t value, int width) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%0*lld", width, static_cast<long long>(value));
    return buf;
}

CountDistribution parse_distribution(const std::string& name) {
    if (name == "constant") return CountDistribution::constant;
    if (name == "poisson") return CountDistribution::poisson;
    throw InputError("active_refs_dist must be 'constant' or 'poisson', got '" + name + "'");
}

FieldSpec field_from_json(const json& j, const FieldSpec& defaults) {
    FieldSpec f = defaults;
    f.field_id = j.at("id").get<std::string>();
    if (j.contains("papers_per_year")) {
        f.papers_per_year.clear();
        for (const auto& [year, count] : j.at("papers_per_year").items()) {
            f.papers_per_year[std::stoi(year)] = count.get<std::int64_t>();
        }
    }
    if (j.contains("journals")) f.journals = j.at("journals").get<std::int64_t>();
    if (j.contains("mean_active_refs")) f.mean_active_refs = j.at("mean_active_refs").get<double>();
    if (j.contains("active_refs_dist")) {
        f.active_refs_dist = parse_distribution(j.at("active_refs_dist").get<std::string>());
    }
    if (j.contains("min_active_refs")) f.min_active_refs = j.at("min_active_refs").get<std::int64_t>();
    if (j.contains("total_refs_multiplier")) {
        f.total_refs_multiplier = j.at("total_refs_multiplier").get<double>();
    }
    if (j.contains("attractiveness_sigma")) {
        f.attractiveness_sigma = j.at("attractiveness_sigma").get<double>();
    }
    return f;
}

std::int64_t draw_active_refs(const FieldSpec& spec, Engine& engine) {
    if (spec.active_refs_dist == CountDistribution::constant) {
        return std::max<std::int64_t>(std::llround(spec.mean_active_refs), spec.min_active_refs);
    }
    boost::random::poisson_distribution<std::int64_t, double> poisson(spec.mean_active_refs);
    for (int attempt = 0; attempt < kTruncationRetries; ++attempt) {
        const auto a = poisson(engine);
        if (a >= spec.min_active_refs) return a;
    }
    return spec.min_active_refs;
}

}  // namespace

void SynthConfig::validate() {
    window.validate();
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw InputError("epsilon must lie in [0, 1]");
    if (fields.empty()) throw InputError("synthetic config needs at least one field");
    if (scheme.empty() || level.empty()) throw InputError("scheme and level must be nonempty");
    if (super_fields) {
        if (super_fields->group_size < 1) throw InputError("super_fields.group_size must be >= 1");
        if (super_fields->level == level) throw InputError("super_fields.level must differ from level");
    }
    std::set<std::string> ids;
    for (auto& f : fields) {
        if (f.field_id.empty()) throw InputError("field id must be nonempty");
        if (!ids.insert(f.field_id).second) throw InputError("duplicate field id '" + f.field_id + "'");
        if (f.journals < 1) throw InputError("field '" + f.field_id + "': journals must be >= 1");
        if (!(f.mean_active_refs > 0.0)) {
            throw InputError("field '" + f.field_id + "': mean_active_refs must be > 0");
        }
        if (f.min_active_refs < 0) {
            throw InputError("field '" + f.field_id + "': min_active_refs must be >= 0");
        }
        if (!(f.total_refs_multiplier >= 1.0)) {
            throw InputError("field '" + f.field_id + "': total_refs_multiplier must be >= 1");
        }
        if (!(f.attractiveness_sigma >= 0.0)) {
            throw InputError("field '" + f.field_id + "': attractiveness_sigma must be >= 0");
        }
        for (const auto& [year, count] : f.papers_per_year) {
            if (count < 0) throw InputError("field '" + f.field_id + "': negative paper count");
            const bool in_window =
                year == window.citing_year ||
                std::binary_search(window.core_years.begin(), window.core_years.end(), year);
            if (!in_window) {
                throw InputError("field '" + f.field_id + "': year " + std::to_string(year) +
                                 " is outside the window");
            }
        }
    }
}

SynthConfig parse_synth_config(std::istream& in, std::string_view source) {
    const auto doc = json::parse(in, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw InputError(std::string(source) + ": not a JSON object");
    }
    try {
        SynthConfig c;
        c.seed = doc.value("seed", std::uint64_t{0});
        if (doc.contains("core_years")) c.window.core_years = doc.at("core_years").get<std::vector<int>>();
        c.window.citing_year = doc.value("citing_year", c.window.citing_year);
        c.epsilon = doc.value("epsilon", 0.0);
        c.scheme = doc.value("scheme", c.scheme);
        c.level = doc.value("level", c.level);
        if (doc.contains("super_fields")) {
            const auto& s = doc.at("super_fields");
            SuperFieldSpec spec;
            spec.level = s.value("level", spec.level);
            spec.group_size = s.value("group_size", spec.group_size);
            c.super_fields = spec;
        }
        FieldSpec defaults;
        if (doc.contains("defaults")) {
            auto d = doc.at("defaults");
            d["id"] = "";
            defaults = field_from_json(d, defaults);
        }
        for (const auto& f : doc.at("fields")) c.fields.push_back(field_from_json(f, defaults));
        c.validate();
        return c;
    } catch (const json::exception& e) {
        throw InputError(std::string(source) + ": " + e.what());
    }
}

SynthConfig load_synth_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    return parse_synth_config(in, path.string());
}

SyntheticCorpus generate(SynthConfig config) {
    config.validate();
    const auto& window = config.window;
    const auto F = config.fields.size();
    SyntheticCorpus out;

    // (1) papers, journals round-robin within each field and year.
    std::vector<std::vector<std::size_t>> core_of(F);     // indices into out.papers
    std::vector<std::vector<std::size_t>> citing_of(F);
    for (std::size_t f = 0; f < F; ++f) {
        const auto& spec = config.fields[f];
        for (const auto& [year, count] : spec.papers_per_year) {
            const bool citing = year == window.citing_year;
            for (std::int64_t k = 0; k < count; ++k) {
                PaperRecord p;
                p.paper_id = spec.field_id + "-" + std::to_string(year) + "-" + padded(k, 6);
                p.pub_year = year;
                p.journal_id = spec.field_id + "-J" + padded(k % spec.journals, 3);
                (citing ? citing_of[f] : core_of[f]).push_back(out.papers.size());
                out.papers.push_back(std::move(p));
            }
        }
    }

    std::vector<std::size_t> nonempty;
    for (std::size_t f = 0; f < F; ++f) {
        if (!core_of[f].empty()) nonempty.push_back(f);
    }
    // Other fields with core papers, per field.
    std::vector<std::vector<std::size_t>> others_of(F);
    for (std::size_t f = 0; f < F; ++f) {
        for (auto g : nonempty) {
            if (g != f) others_of[f].push_back(g);
        }
    }

    // Lognormal attractiveness with unit mean within each field.
    std::vector<boost::random::discrete_distribution<std::size_t, double>> pick_in(F);
    for (std::size_t f = 0; f < F; ++f) {
        if (core_of[f].empty()) continue;
        const double sigma = config.fields[f].attractiveness_sigma;
        auto engine = make_engine(config.seed, "attractiveness:" + config.fields[f].field_id);
        boost::random::normal_distribution<double> normal(-0.5 * sigma * sigma, sigma);
        std::vector<double> weights(core_of[f].size());
        for (auto& w : weights) w = std::exp(normal(engine));
        pick_in[f] = boost::random::discrete_distribution<std::size_t, double>(weights);
    }

    out.report.fields.resize(F);
    for (std::size_t f = 0; f < F; ++f) {
        const auto& spec = config.fields[f];
        auto& frep = out.report.fields[f];
        frep.field_id = spec.field_id;
        frep.citing_papers = static_cast<std::int64_t>(citing_of[f].size());
        auto engine = make_engine(config.seed, "references:" + spec.field_id);
        boost::random::uniform_01<double> unit;

        for (const auto citing : citing_of[f]) {
            // (2) active reference demand
            const auto demand = draw_active_refs(spec, engine);
            frep.requested_refs += demand;
            if (demand > 0 && nonempty.empty()) {
                throw InputError("no field has core papers to cite");
            }
            if (demand > 0 && core_of[f].empty() && config.epsilon == 0.0) {
                throw InputError("field '" + spec.field_id +
                                 "' has citing demand but no core papers and epsilon = 0");
            }
            // (3) targets, (5) distinct per citing paper with bounded redraws
            std::set<std::size_t> chosen;
            std::int64_t cross = 0;
            for (std::int64_t r = 0; r < demand; ++r) {
                bool placed = false;
                for (int attempt = 0; attempt < kCollisionRetries && !placed; ++attempt) {
                    std::size_t target_field = f;
                    const bool leave = F > 1 && unit(engine) < config.epsilon;
                    if (leave || core_of[f].empty()) {
                        const auto& others = others_of[f];
                        if (others.empty()) {
                            target_field = f;
                        } else {
                            boost::random::uniform_int_distribution<std::size_t> pick(
                                0, others.size() - 1);
                            target_field = others[pick(engine)];
                        }
                    }
                    const auto paper = core_of[target_field][pick_in[target_field](engine)];
                    if (chosen.insert(paper).second) {
                        placed = true;
                        if (target_field != f) ++cross;
                    }
                }
                if (!placed) ++out.report.collision_losses;
            }
            const auto realized = static_cast<std::int64_t>(chosen.size());
            frep.realized_refs += realized;
            frep.cross_field_refs += cross;
            for (const auto paper : chosen) {
                out.edges.push_back({out.papers[citing].paper_id, out.papers[paper].paper_id});
            }
            // (4) full reference list; the epsilon absorbs products such as
            // 1.1 * 10 landing just above an integer.
            out.papers[citing].total_ref_count = static_cast<std::int64_t>(
                std::ceil(spec.total_refs_multiplier * static_cast<double>(realized) - 1e-9));
        }
        out.report.requested_refs += frep.requested_refs;
        out.report.realized_refs += frep.realized_refs;
    }
    if (out.report.collision_losses > 0) {
        out.report.warnings.push_back(std::to_string(out.report.collision_losses) +
                                      " references dropped after repeated target collisions");
    }

    for (std::size_t f = 0; f < F; ++f) {
        const auto& spec = config.fields[f];
        std::string super_id;
        if (config.super_fields) {
            super_id = "S" + padded(static_cast<std::int64_t>(f / config.super_fields->group_size), 3);
        }
        for (const auto* list : {&core_of[f], &citing_of[f]}) {
            for (const auto idx : *list) {
                const auto& id = out.papers[idx].paper_id;
                out.assignments.push_back({id, config.scheme, config.level, spec.field_id});
                if (config.super_fields) {
                    out.assignments.push_back({id, config.scheme, config.super_fields->level, super_id});
                }
            }
        }
    }
    return out;
}

void write_synthetic_corpus(const SyntheticCorpus& corpus, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw InputError("cannot write " + (dir / name).string());
        return f;
    };
    auto papers = open("papers.tsv");
    write_papers(papers, corpus.papers);
    auto citations = open("citations.tsv");
    write_citations(citations, corpus.edges);
    auto fields = open("fields.tsv");
    write_field_assignments(fields, corpus.assignments);
}

AssumptionReport verify_assumptions(const Corpus& corpus, const Grouping& grouping) {
    const auto& index = corpus.fields(grouping);
    const auto& window = corpus.window();
    AssumptionReport rep;

    // (1)
    const auto F = index.field_ids.size();
    std::vector<std::map<int, std::int64_t>> counts(F);
    for (auto& c : counts) {
        for (int y : window.core_years) c[y] = 0;
        c[window.citing_year] = 0;
    }
    for (PaperIndex p = 0; p < corpus.paper_count(); ++p) {
        const auto f = index.field_of(p);
        if (f && (corpus.is_core(p) || corpus.is_citing(p))) ++counts[*f][corpus.paper(p).pub_year];
    }
    for (std::size_t f = 0; f < F; ++f) {
        double core_total = 0.0;
        for (int y : window.core_years) core_total += static_cast<double>(counts[f][y]);
        const double ref = core_total / static_cast<double>(window.core_years.size());
        double dev = 0.0;
        for (const auto& [year, m] : counts[f]) {
            const double d = static_cast<double>(m) - ref;
            if (ref > 0.0) {
                dev = std::max(dev, std::abs(d) / ref);
            } else if (m > 0) {
                dev = std::numeric_limits<double>::infinity();
            }
        }
        rep.count_deviation[index.field_ids[f]] = dev;
        rep.max_count_deviation = std::max(rep.max_count_deviation, dev);
    }
    rep.equal_counts = rep.max_count_deviation == 0.0;

    // (2)
    for (const auto citing : corpus.citing_papers()) {
        const auto from = index.field_of(citing);
        for (const auto cited : corpus.out_edges(citing)) {
            const auto to = index.field_of(cited);
            if (!from || !to) continue;
            ++rep.classified_edges;
            if (*from != *to) ++rep.cross_field_edges;
        }
    }
    rep.cross_field_fraction =
        rep.classified_edges ? static_cast<double>(rep.cross_field_edges) /
                                   static_cast<double>(rep.classified_edges)
                             : 0.0;
    rep.no_cross_field = rep.cross_field_edges == 0;

    // (3)
    const auto stats = compute_citing_stats(corpus);
    std::map<std::string, bool> active;
    for (PaperIndex p = 0; p < corpus.paper_count(); ++p) {
        if (corpus.is_core(p) || corpus.is_citing(p)) active.emplace(corpus.paper(p).journal_id, false);
    }
    for (const auto& s : stats.papers) {
        if (s.a >= 1) active[corpus.paper(s.paper).journal_id] = true;
    }
    rep.journals = active.size();
    rep.inactive_journals = static_cast<std::size_t>(
        std::count_if(active.begin(), active.end(), [](const auto& kv) { return !kv.second; }));
    rep.journals_active = rep.inactive_journals == 0;
    return rep;
}

}  // namespace fieldnorm
