#include "evoml/cli.hpp"

#include "evoml/analysis.hpp"
#include "evoml/data.hpp"
#include "evoml/reports.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace evoml::cli {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s)
{
    auto const first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    auto const last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(std::string const& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (auto t = trim(item); !t.empty()) {
            out.push_back(std::move(t));
        }
    }
    return out;
}

template <typename T>
T parse_number(std::string const& key, std::string const& text)
{
    T value {};
    auto const* first = text.data();
    auto const* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw ConfigError("invalid value '" + text + "' for " + key);
    }
    return value;
}

std::string canonical_key(std::string key)
{
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

LabelColumn label_selector(std::string const& text)
{
    bool const numeric = !text.empty() && std::all_of(text.begin() + (text.front() == '-' ? 1 : 0), text.end(), [](unsigned char c) { return std::isdigit(c); })
        && text != "-";
    if (numeric) {
        return std::stol(text);
    }
    return text;
}

} // namespace

void RunConfig::validate() const
{
    if (data.empty()) {
        throw ConfigError("no dataset given (--data)");
    }
    for (auto const& p : data) {
        if (!fs::exists(p)) {
            throw ConfigError("data file not found: " + p.string());
        }
    }
    if (labels.size() > 1 && labels.size() != data.size()) {
        throw ConfigError("give one --label for all datasets or one per dataset");
    }
    if (modes.empty()) {
        throw ConfigError("no fitness mode selected");
    }
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
        throw ConfigError("test fraction must lie in (0, 1)");
    }
    if (!(bonferroni >= 1.0)) {
        throw ConfigError("Bonferroni multiplier must be at least 1");
    }
    evolution.validate();
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec || !fs::is_directory(out)) {
        throw ConfigError("output directory is not writable: " + out.string());
    }
}

std::map<std::string, std::string> read_config_file(fs::path const& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    std::map<std::string, std::string> settings;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        auto const hash = line.find('#');
        auto const body = trim(line.substr(0, hash));
        if (body.empty()) {
            continue;
        }
        auto const eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path.string() + ":" + std::to_string(number) + ": expected key=value");
        }
        settings[canonical_key(trim(body.substr(0, eq)))] = trim(body.substr(eq + 1));
    }
    return settings;
}

RunConfig make_run_config(std::map<std::string, std::string> const& settings, Replication default_replication)
{
    static std::set<std::string> const known { "data", "label", "mode", "modes", "generations", "time-budget", "pop", "offspring", "k", "max-depth", "seed",
        "workers", "out", "replication", "test-fraction", "bonferroni" };
    RunConfig cfg;
    cfg.replication = default_replication;
    auto& evo = cfg.evolution;
    for (auto const& [key, value] : settings) {
        if (!known.contains(key)) {
            throw ConfigError("unknown setting '" + key + "'");
        }
    }
    auto get = [&](char const* key) -> std::string const* {
        auto it = settings.find(key);
        return it == settings.end() ? nullptr : &it->second;
    };

    if (auto const* v = get("data")) {
        for (auto const& p : split_list(*v)) {
            cfg.data.emplace_back(p);
        }
    }
    if (auto const* v = get("label")) {
        cfg.labels = split_list(*v);
    }
    if (auto const* v = get("mode")) {
        cfg.modes = { parse_mode(*v) };
    }
    if (auto const* v = get("modes")) {
        cfg.modes.clear();
        for (auto const& m : split_list(*v)) {
            cfg.modes.push_back(parse_mode(m));
        }
    }
    if (auto const* v = get("time-budget")) {
        evo.time_budget_seconds = parse_number<double>("time-budget", *v);
    }
    if (auto const* v = get("generations")) {
        evo.max_generations = parse_number<long>("generations", *v);
    } else if (evo.time_budget_seconds) {
        evo.max_generations.reset();
    }
    if (auto const* v = get("pop")) {
        evo.population_size = parse_number<std::size_t>("pop", *v);
    }
    if (auto const* v = get("offspring")) {
        evo.offspring_size = parse_number<std::size_t>("offspring", *v);
    }
    if (auto const* v = get("k")) {
        evo.k = parse_number<std::size_t>("k", *v);
    }
    if (auto const* v = get("max-depth")) {
        evo.max_depth = parse_number<std::size_t>("max-depth", *v);
    }
    if (auto const* v = get("seed")) {
        evo.master_seed = parse_number<std::uint64_t>("seed", *v);
    }
    if (auto const* v = get("workers")) {
        evo.workers = parse_number<std::size_t>("workers", *v);
    }
    if (auto const* v = get("out")) {
        cfg.out = *v;
    }
    if (auto const* v = get("replication")) {
        if (*v == "single") {
            cfg.replication = Replication::single;
        } else if (*v == "5x2" || *v == "five_by_two") {
            cfg.replication = Replication::five_by_two;
        } else {
            throw ConfigError("unknown replication '" + *v + "' (expected single or 5x2)");
        }
    }
    if (auto const* v = get("test-fraction")) {
        cfg.test_fraction = parse_number<double>("test-fraction", *v);
    }
    if (auto const* v = get("bonferroni")) {
        cfg.bonferroni = parse_number<double>("bonferroni", *v);
    }
    return cfg;
}

namespace {

Dataset load_indexed(RunConfig const& cfg, std::size_t i)
{
    LabelColumn label = -1L;
    if (cfg.labels.size() == 1) {
        label = label_selector(cfg.labels.front());
    } else if (!cfg.labels.empty()) {
        label = label_selector(cfg.labels[i]);
    }
    return load_csv(cfg.data[i], label);
}

void write_text(fs::path const& path, std::string const& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ReportError("cannot write " + path.string());
    }
    out << text;
}

nlohmann::json log_line(std::string const& dataset, FitnessMode mode, Replicate const& rep, GenerationLog const& log)
{
    auto j = to_json(log);
    j["dataset"] = dataset;
    j["mode"] = to_string(mode);
    j["replicate"] = { { "repeat", rep.repeat }, { "half", rep.half } };
    return j;
}

int cmd_run(RunConfig const& cfg, std::ostream& out)
{
    if (cfg.data.size() != 1) {
        throw ConfigError("run takes exactly one dataset");
    }
    auto const dataset = load_indexed(cfg, 0);
    auto evo = cfg.evolution;
    evo.mode = cfg.modes.front();

    std::ofstream jsonl(cfg.out / "generations.jsonl", std::ios::binary);
    std::vector<RunReport> reports;
    if (cfg.replication == Replication::single) {
        auto const split = train_test_split(dataset, cfg.test_fraction, replicate_split_seed(evo.master_seed, 1));
        Replicate const rep { 1, 1 };
        auto report = run_single(split.train, split.test, evo, rep, [&](GenerationLog const& log) {
            jsonl << log_line(dataset.name(), evo.mode, rep, log).dump() << '\n';
        });
        report.split_seed = split.split_seed;
        reports.push_back(std::move(report));
    } else {
        reports = run_5x2(dataset, evo, evo.mode, [&](Replicate const& rep, GenerationLog const& log) {
            jsonl << log_line(dataset.name(), evo.mode, rep, log).dump() << '\n';
        });
    }
    jsonl.close();

    write_text(cfg.out / "run_report.json", run_reports_document(reports).dump(2) + "\n");
    std::string pipelines;
    for (auto const& r : reports) {
        pipelines += r.final_pipeline + "\n";
    }
    write_text(cfg.out / "pipeline.txt", pipelines);
    auto const table = render_runs_table(reports);
    write_text(cfg.out / "runs.txt", table);
    out << table;

    bool const budget_failure = std::all_of(reports.begin(), reports.end(), [](auto const& r) { return r.insufficient_budget; });
    if (budget_failure) {
        throw InsufficientBudget("no run completed a generation within the time budget");
    }
    return kExitOk;
}

int cmd_compare(RunConfig const& cfg, std::ostream& out)
{
    bool const has_dynamic = std::find(cfg.modes.begin(), cfg.modes.end(), FitnessMode::dynamic) != cfg.modes.end();
    bool const has_static = std::find(cfg.modes.begin(), cfg.modes.end(), FitnessMode::static_kfold) != cfg.modes.end();
    if (!has_dynamic || !has_static) {
        throw ConfigError("compare needs both modes (--modes dynamic,static)");
    }

    std::vector<RunReport> reports;
    std::vector<std::pair<Dataset, SplitPair>> first_splits;
    for (std::size_t i = 0; i < cfg.data.size(); ++i) {
        auto const dataset = load_indexed(cfg, i);
        for (auto mode : { FitnessMode::dynamic, FitnessMode::static_kfold }) {
            auto evo = cfg.evolution;
            evo.mode = mode;
            if (cfg.replication == Replication::five_by_two) {
                auto runs = run_5x2(dataset, evo, mode);
                reports.insert(reports.end(), runs.begin(), runs.end());
            } else {
                auto const split = train_test_split(dataset, cfg.test_fraction, replicate_split_seed(evo.master_seed, 1));
                auto report = run_single(split.train, split.test, evo);
                report.split_seed = split.split_seed;
                reports.push_back(std::move(report));
            }
        }
        double const fraction = cfg.replication == Replication::five_by_two ? 0.5 : cfg.test_fraction;
        auto split = train_test_split(dataset, fraction, replicate_split_seed(cfg.evolution.master_seed, 1));
        first_splits.emplace_back(dataset, std::move(split));
    }

    ComparisonDocument doc;
    try {
        doc = build_report(reports, cfg.bonferroni);
    } catch (std::invalid_argument const& e) {
        write_text(cfg.out / "run_report.json", run_reports_document(reports).dump(2) + "\n");
        throw InsufficientBudget(e.what());
    }
    doc.format_version = kReportFormatVersion;

    write_text(cfg.out / "comparison.json", to_json(doc).dump(2) + "\n");
    auto const table = render_comparison_table(doc);
    write_text(cfg.out / "comparison.txt", table);
    write_text(cfg.out / "dominance.csv", dominance_csv(doc));

    // seed-sensitivity plot data from the first replicate's final picks
    for (auto const& [dataset, split] : first_splits) {
        auto find = [&](FitnessMode mode) {
            return std::find_if(reports.begin(), reports.end(), [&](auto const& r) {
                return r.dataset_name == dataset.name() && r.mode == mode && r.replicate == Replicate { 1, 1 } && !r.excluded;
            });
        };
        auto const a = find(FitnessMode::dynamic);
        auto const b = find(FitnessMode::static_kfold);
        if (a == reports.end() || b == reports.end()) {
            continue;
        }
        auto const rows = seed_sensitivity(PipelineTree::parse(a->final_pipeline), PipelineTree::parse(b->final_pipeline), split.train, cfg.evolution.k);
        write_text(cfg.out / ("seed_sensitivity_" + dataset.name() + ".csv"), seed_sensitivity_csv(rows));
    }
    out << table;
    return kExitOk;
}

int cmd_report(fs::path const& dir, std::ostream& out)
{
    if (!fs::is_directory(dir)) {
        throw ReportError("report directory not found: " + dir.string());
    }
    std::vector<fs::path> files;
    for (auto const& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    if (files.empty()) {
        throw ReportError("no report files in " + dir.string());
    }
    std::sort(files.begin(), files.end());

    std::vector<nlohmann::json> documents;
    for (auto const& f : files) {
        documents.push_back(read_report_file(f));
    }
    for (std::size_t i = 0; i < files.size(); ++i) {
        auto const& j = documents[i];
        auto const stem = files[i].stem().string();
        if (j.contains("datasets")) {
            auto const doc = comparison_from_json(j);
            auto const table = render_comparison_table(doc);
            write_text(dir / ("table_" + stem + ".txt"), table);
            write_text(dir / ("dominance_" + stem + ".csv"), dominance_csv(doc));
            out << "== " << files[i].filename().string() << '\n' << table;
        } else if (j.contains("reports")) {
            auto const table = render_runs_table(run_reports_from_document(j));
            write_text(dir / ("table_" + stem + ".txt"), table);
            out << "== " << files[i].filename().string() << '\n' << table;
        } else {
            throw ReportError("unrecognized report file " + files[i].string());
        }
    }
    return kExitOk;
}

} // namespace

int run_cli(std::vector<std::string> const& args, std::ostream& out, std::ostream& err)
{
    CLI::App app { "Evolutionary pipeline search with dynamic (lifetime-averaged) or static k-fold fitness", "evoml" };
    app.require_subcommand(1);

    std::map<std::string, std::vector<std::string>> values;
    std::string config_path;
    auto add_evolution_flags = [&](CLI::App* sub, bool compare) {
        sub->add_option("--data", values["data"], "CSV dataset (repeatable)");
        sub->add_option("--label", values["label"], "Label column name or index (default: last column)");
        if (compare) {
            sub->add_option("--modes", values["modes"], "Fitness modes, comma separated")->delimiter(',');
        } else {
            sub->add_option("--mode", values["mode"], "dynamic | static")->expected(1);
        }
        sub->add_option("--generations", values["generations"], "Generation limit (default 20)")->expected(1);
        sub->add_option("--time-budget", values["time-budget"], "Wall-clock budget in seconds, checked between generations")->expected(1);
        sub->add_option("--pop", values["pop"], "Population size")->expected(1);
        sub->add_option("--offspring", values["offspring"], "Offspring per generation (default: population size)")->expected(1);
        sub->add_option("--k", values["k"], "Folds for internal cross-validation (default 5)")->expected(1);
        sub->add_option("--max-depth", values["max-depth"], "Maximum pipeline complexity (default 6)")->expected(1);
        sub->add_option("--seed", values["seed"], "Master seed")->expected(1);
        sub->add_option("--workers", values["workers"], "Concurrent evaluations")->expected(1);
        sub->add_option("--out", values["out"], "Output directory")->expected(1);
        sub->add_option("--replication", values["replication"], "single | 5x2")->expected(1);
        sub->add_option("--test-fraction", values["test-fraction"], "Held-out fraction for single replication (default 0.5)")->expected(1);
        sub->add_option("--bonferroni", values["bonferroni"], "p-value multiplier (default 3)")->expected(1);
        sub->add_option("--config", config_path, "Flat key=value config file; flags override it");
    };
    auto* run = app.add_subcommand("run", "Evolve a pipeline on one dataset and write run_report.json");
    add_evolution_flags(run, false);
    auto* compare = app.add_subcommand("compare", "Paired dynamic vs static benchmark with 5x2 cross-validation");
    add_evolution_flags(compare, true);
    auto* report = app.add_subcommand("report", "Render tables and plot data from stored report files");
    std::string report_dir;
    report->add_option("--out,dir", report_dir, "Directory holding report JSON files")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (CLI::CallForHelp const&) {
        out << app.help();
        return kExitOk;
    } catch (CLI::ParseError const& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitUsage;
    }

    try {
        if (report->parsed()) {
            return cmd_report(report_dir, out);
        }
        auto const is_compare = compare->parsed();
        std::map<std::string, std::string> settings;
        if (!config_path.empty()) {
            settings = read_config_file(config_path);
        }
        for (auto const& [key, list] : values) {
            if (!list.empty()) {
                std::string joined;
                for (auto const& item : list) {
                    joined += (joined.empty() ? "" : ",") + item;
                }
                settings[key] = joined;
            }
        }
        if (is_compare && !settings.contains("modes")) {
            settings["modes"] = "dynamic,static";
        }
        auto const cfg = make_run_config(settings, is_compare ? Replication::five_by_two : Replication::single);
        cfg.validate();
        return is_compare ? cmd_compare(cfg, out) : cmd_run(cfg, out);
    } catch (ConfigError const& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (DataError const& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (InsufficientBudget const& e) {
        err << "error: insufficient budget: " << e.what() << "\n";
        return kExitBudget;
    } catch (std::exception const& e) {
        err << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

} // namespace evoml::cli
