#include "evoml/reports.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace evoml {

using nlohmann::json;

namespace {

json optional_number(std::optional<double> const& v)
{
    return v ? json(*v) : json(nullptr);
}

std::optional<double> number_or_null(json const& j, char const* key)
{
    if (!j.contains(key) || j.at(key).is_null()) {
        return std::nullopt;
    }
    return j.at(key).get<double>();
}

json to_json(ModeSummary const& s)
{
    return {
        { "runs", s.runs },
        { "excluded", s.excluded },
        { "mean_external", s.mean_external },
        { "std_external", s.std_external },
        { "mean_internal", s.mean_internal },
        { "mean_difference", s.mean_difference },
        { "mean_age", s.mean_age },
        { "mean_generations", s.mean_generations },
        { "mean_complexity", s.mean_complexity },
        { "mean_evaluations", s.mean_evaluations },
    };
}

ModeSummary summary_from_json(json const& j)
{
    ModeSummary s;
    s.runs = j.at("runs").get<std::size_t>();
    s.excluded = j.at("excluded").get<std::size_t>();
    s.mean_external = j.at("mean_external").get<double>();
    s.std_external = j.at("std_external").get<double>();
    s.mean_internal = j.at("mean_internal").get<double>();
    s.mean_difference = j.at("mean_difference").get<double>();
    s.mean_age = j.at("mean_age").get<double>();
    s.mean_generations = j.at("mean_generations").get<double>();
    s.mean_complexity = j.at("mean_complexity").get<double>();
    s.mean_evaluations = j.at("mean_evaluations").get<double>();
    return s;
}

Dominance parse_dominance(std::string const& s)
{
    if (s == "a_dominates") {
        return Dominance::a_dominates;
    }
    if (s == "b_dominates") {
        return Dominance::b_dominates;
    }
    return Dominance::none;
}

std::string fixed(double v, int decimals = 2)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string pad(std::string s, std::size_t width, bool left_align = false)
{
    if (s.size() >= width) {
        return s;
    }
    std::string fill(width - s.size(), ' ');
    return left_align ? s + fill : fill + s;
}

std::string render_rows(std::vector<std::vector<std::string>> const& rows)
{
    std::vector<std::size_t> width;
    for (auto const& row : rows) {
        width.resize(std::max(width.size(), row.size()), 0);
        for (std::size_t c = 0; c < row.size(); ++c) {
            width[c] = std::max(width[c], row[c].size());
        }
    }
    std::ostringstream os;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            os << (c == 0 ? "" : "  ") << pad(rows[r][c], width[c], c == 0);
        }
        os << '\n';
        if (r == 0) {
            std::size_t total = 0;
            for (auto w : width) {
                total += w + 2;
            }
            os << std::string(total - 2, '-') << '\n';
        }
    }
    return os.str();
}

} // namespace

json to_json(RunReport const& r)
{
    return {
        { "dataset", r.dataset_name },
        { "mode", to_string(r.mode) },
        { "replicate", { { "repeat", r.replicate.repeat }, { "half", r.replicate.half } } },
        { "final_pipeline", r.final_pipeline },
        { "internal_score", r.internal_score },
        { "external_score", r.external_score },
        { "difference", r.difference() },
        { "age", r.age },
        { "birth_generation", r.birth_generation },
        { "termination_generation", r.termination_generation },
        { "generations_completed", r.generations_completed },
        { "complexity", r.complexity },
        { "evaluations", r.evaluations },
        { "wall_seconds", r.wall_seconds },
        { "master_seed", r.master_seed },
        { "split_seed", r.split_seed },
        { "excluded", r.excluded },
        { "insufficient_budget", r.insufficient_budget },
        { "note", r.note },
    };
}

RunReport run_report_from_json(json const& j)
{
    try {
        RunReport r;
        r.dataset_name = j.at("dataset").get<std::string>();
        r.mode = parse_mode(j.at("mode").get<std::string>());
        r.replicate.repeat = j.at("replicate").at("repeat").get<int>();
        r.replicate.half = j.at("replicate").at("half").get<int>();
        r.final_pipeline = j.at("final_pipeline").get<std::string>();
        r.internal_score = j.at("internal_score").get<double>();
        r.external_score = j.at("external_score").get<double>();
        r.age = j.at("age").get<long>();
        r.birth_generation = j.at("birth_generation").get<long>();
        r.termination_generation = j.at("termination_generation").get<long>();
        r.generations_completed = j.at("generations_completed").get<long>();
        r.complexity = j.at("complexity").get<std::size_t>();
        r.evaluations = j.at("evaluations").get<std::int64_t>();
        r.wall_seconds = j.at("wall_seconds").get<double>();
        r.master_seed = j.at("master_seed").get<std::uint64_t>();
        r.split_seed = j.at("split_seed").get<std::uint64_t>();
        r.excluded = j.at("excluded").get<bool>();
        r.insufficient_budget = j.at("insufficient_budget").get<bool>();
        r.note = j.at("note").get<std::string>();
        return r;
    } catch (json::exception const& e) {
        throw ReportError(std::string("malformed run report: ") + e.what());
    } catch (ConfigError const& e) {
        throw ReportError(std::string("malformed run report: ") + e.what());
    }
}

json to_json(GenerationLog const& log)
{
    json frontier = json::array();
    for (auto const& f : log.frontier) {
        frontier.push_back({
            { "id", f.id },
            { "pipeline", f.pipeline },
            { "objective1", f.objective1 },
            { "objective2", f.objective2 },
            { "birth_generation", f.birth_generation },
        });
    }
    return {
        { "generation", log.generation },
        { "evaluations_this_generation", log.evaluations_this_generation },
        { "evaluations_performed", log.evaluations_performed },
        { "best_objective1", log.best_objective1 },
        { "frontier", frontier },
        { "elapsed_seconds", log.elapsed_seconds },
    };
}

json to_json(ComparisonDocument const& doc)
{
    json datasets = json::array();
    for (auto const& d : doc.datasets) {
        datasets.push_back({
            { "dataset", d.dataset },
            { "complete", d.complete },
            { "dynamic", to_json(d.dynamic) },
            { "static", to_json(d.fixed) },
            { "score_delta", d.score_delta },
            { "outcome", d.outcome },
            { "dominance", to_string(d.dominance) },
        });
    }
    json tests = json::array();
    for (auto const& t : doc.tests) {
        tests.push_back({
            { "metric", t.metric },
            { "pairs", t.pairs },
            { "statistic", optional_number(t.statistic) },
            { "w_plus", optional_number(t.w_plus) },
            { "w_minus", optional_number(t.w_minus) },
            { "p_value", optional_number(t.p_value) },
            { "corrected_p", optional_number(t.corrected_p) },
            { "significant", t.significant },
            { "direction", t.direction },
            { "flag", t.flag },
            { "note", t.note },
        });
    }
    json runs = json::array();
    for (auto const& r : doc.runs) {
        runs.push_back(to_json(r));
    }
    return {
        { "format_version", doc.format_version },
        { "alpha", doc.alpha },
        { "bonferroni_multiplier", doc.bonferroni_multiplier },
        { "datasets", datasets },
        { "wins", doc.wins },
        { "losses", doc.losses },
        { "draws", doc.draws },
        { "dominance", { { "dynamic_dominates", doc.dynamic_dominates }, { "static_dominates", doc.static_dominates }, { "none", doc.no_dominance } } },
        { "tests", tests },
        { "warnings", doc.warnings },
        { "runs", runs },
    };
}

ComparisonDocument comparison_from_json(json const& j)
{
    try {
        ComparisonDocument doc;
        doc.format_version = j.at("format_version").get<int>();
        doc.alpha = j.at("alpha").get<double>();
        doc.bonferroni_multiplier = j.at("bonferroni_multiplier").get<double>();
        for (auto const& d : j.at("datasets")) {
            DatasetComparison row;
            row.dataset = d.at("dataset").get<std::string>();
            row.complete = d.at("complete").get<bool>();
            row.dynamic = summary_from_json(d.at("dynamic"));
            row.fixed = summary_from_json(d.at("static"));
            row.score_delta = d.at("score_delta").get<double>();
            row.outcome = d.at("outcome").get<std::string>();
            row.dominance = parse_dominance(d.at("dominance").get<std::string>());
            doc.datasets.push_back(std::move(row));
        }
        doc.wins = j.at("wins").get<int>();
        doc.losses = j.at("losses").get<int>();
        doc.draws = j.at("draws").get<int>();
        doc.dynamic_dominates = j.at("dominance").at("dynamic_dominates").get<int>();
        doc.static_dominates = j.at("dominance").at("static_dominates").get<int>();
        doc.no_dominance = j.at("dominance").at("none").get<int>();
        for (auto const& t : j.at("tests")) {
            SignificanceTest test;
            test.metric = t.at("metric").get<std::string>();
            test.pairs = t.at("pairs").get<std::size_t>();
            test.statistic = number_or_null(t, "statistic");
            test.w_plus = number_or_null(t, "w_plus");
            test.w_minus = number_or_null(t, "w_minus");
            test.p_value = number_or_null(t, "p_value");
            test.corrected_p = number_or_null(t, "corrected_p");
            test.significant = t.at("significant").get<bool>();
            test.direction = t.at("direction").get<std::string>();
            test.flag = t.at("flag").get<std::string>();
            test.note = t.at("note").get<std::string>();
            doc.tests.push_back(std::move(test));
        }
        doc.warnings = j.at("warnings").get<std::vector<std::string>>();
        for (auto const& r : j.at("runs")) {
            doc.runs.push_back(run_report_from_json(r));
        }
        return doc;
    } catch (json::exception const& e) {
        throw ReportError(std::string("malformed comparison document: ") + e.what());
    }
}

json run_reports_document(std::vector<RunReport> const& reports)
{
    json runs = json::array();
    for (auto const& r : reports) {
        runs.push_back(to_json(r));
    }
    return { { "format_version", kReportFormatVersion }, { "reports", runs } };
}

std::vector<RunReport> run_reports_from_document(json const& j)
{
    if (!j.contains("reports") || !j.at("reports").is_array()) {
        throw ReportError("run report document has no 'reports' array");
    }
    std::vector<RunReport> out;
    for (auto const& r : j.at("reports")) {
        out.push_back(run_report_from_json(r));
    }
    return out;
}

json read_report_file(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ReportError("cannot open report file " + path.string());
    }
    json j;
    try {
        in >> j;
    } catch (json::exception const& e) {
        throw ReportError("corrupt report file " + path.string() + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("format_version") || !j.at("format_version").is_number_integer()) {
        throw ReportError("report file " + path.string() + " has no format_version");
    }
    auto const version = j.at("format_version").get<int>();
    if (version != kReportFormatVersion) {
        throw ReportError("format version mismatch in " + path.string() + ": found " + std::to_string(version) + ", expected "
            + std::to_string(kReportFormatVersion));
    }
    return j;
}

std::string render_comparison_table(ComparisonDocument const& doc)
{
    std::vector<std::vector<std::string>> rows;
    rows.push_back({ "dataset", "dynamic", "static", "outcome", "diff(dyn)", "diff(sta)", "age(dyn)", "age(sta)", "gens(dyn)", "gens(sta)",
        "size(dyn)", "size(sta)", "dominance" });
    for (auto const& d : doc.datasets) {
        auto const cell = [](ModeSummary const& s) { return fixed(s.mean_external) + " ± " + fixed(s.std_external); };
        if (!d.complete) {
            rows.push_back({ d.dataset, "-", "-", d.outcome });
            continue;
        }
        rows.push_back({ d.dataset, cell(d.dynamic), cell(d.fixed), d.outcome, fixed(d.dynamic.mean_difference), fixed(d.fixed.mean_difference),
            fixed(d.dynamic.mean_age, 1), fixed(d.fixed.mean_age, 1), fixed(d.dynamic.mean_generations, 1), fixed(d.fixed.mean_generations, 1),
            fixed(d.dynamic.mean_complexity, 2), fixed(d.fixed.mean_complexity, 2), std::string(to_string(d.dominance)) });
    }

    std::ostringstream os;
    os << render_rows(rows) << '\n';
    os << "wins/losses/draws (dynamic vs static): " << doc.wins << '/' << doc.losses << '/' << doc.draws << '\n';
    os << "dominance: dynamic " << doc.dynamic_dominates << ", static " << doc.static_dominates << ", neither " << doc.no_dominance << '\n';
    os << '\n';

    std::vector<std::vector<std::string>> tests;
    tests.push_back({ "metric", "pairs", "W", "p", "corrected p", "direction", "flag" });
    for (auto const& t : doc.tests) {
        if (!t.p_value) {
            tests.push_back({ t.metric, std::to_string(t.pairs), "-", "-", "-", "-", t.note });
            continue;
        }
        tests.push_back({ t.metric, std::to_string(t.pairs), fixed(*t.statistic, 1), fixed(*t.p_value, 5), fixed(*t.corrected_p, 5), t.direction, t.flag });
    }
    os << "Wilcoxon signed-rank, Bonferroni x" << fixed(doc.bonferroni_multiplier, 0) << ", alpha " << fixed(doc.alpha, 2) << '\n';
    os << render_rows(tests);
    for (auto const& w : doc.warnings) {
        os << "warning: " << w << '\n';
    }
    return os.str();
}

std::string render_runs_table(std::vector<RunReport> const& reports)
{
    std::vector<std::vector<std::string>> rows;
    rows.push_back({ "dataset", "mode", "rep", "internal", "external", "difference", "age", "gens", "size", "evals", "pipeline" });
    for (auto const& r : reports) {
        rows.push_back({ r.dataset_name, std::string(to_string(r.mode)), std::to_string(r.replicate.repeat) + "/" + std::to_string(r.replicate.half),
            fixed(r.internal_score), fixed(r.external_score), fixed(r.difference()), std::to_string(r.age), std::to_string(r.generations_completed),
            std::to_string(r.complexity), std::to_string(r.evaluations), r.excluded ? "(excluded) " + r.note : r.final_pipeline });
    }
    return render_rows(rows);
}

std::string dominance_csv(ComparisonDocument const& doc)
{
    std::ostringstream os;
    os << "dataset,obj1_a,obj2_a,obj1_b,obj2_b,dominance\n";
    for (auto const& d : doc.datasets) {
        if (!d.complete) {
            continue;
        }
        os << d.dataset << ',' << json(d.dynamic.mean_external).dump() << ',' << json(d.dynamic.mean_complexity).dump() << ','
           << json(d.fixed.mean_external).dump() << ',' << json(d.fixed.mean_complexity).dump() << ',' << to_string(d.dominance) << '\n';
    }
    return os.str();
}

std::string seed_sensitivity_csv(std::vector<SeedScore> const& rows)
{
    std::vector<double> a;
    std::vector<double> b;
    for (auto const& r : rows) {
        a.push_back(r.score_a);
        b.push_back(r.score_b);
    }
    double const mean_a = mean(a);
    double const mean_b = mean(b);
    std::ostringstream os;
    os << "seed,score_a,score_b,mean_a,mean_b,best\n";
    for (auto const& r : rows) {
        char const* best = r.score_a > r.score_b ? "a" : (r.score_b > r.score_a ? "b" : "tie");
        os << r.seed << ',' << json(r.score_a).dump() << ',' << json(r.score_b).dump() << ',' << json(mean_a).dump() << ',' << json(mean_b).dump() << ','
           << best << '\n';
    }
    return os.str();
}

} // namespace evoml
