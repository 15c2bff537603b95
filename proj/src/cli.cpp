#include "meaningbound/cli.hpp"

#include "meaningbound/analysis.hpp"
#include "meaningbound/corpus_index.hpp"
#include "meaningbound/providers.hpp"
#include "meaningbound/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <memory>
#include <optional>
#include <thread>

namespace meaningbound {

namespace {

// Flag problems detected after CLI11 parsing; always exit code 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProviderOptions {
    std::string corpus;
    std::string corpus_format = "auto";
    std::string fixture;
    std::string web;
};

struct StudyOptions {
    std::string first;
    std::string second;
    std::string conjunction;
    std::string exemplars;
    std::int64_t n_www = 55'000'000'000;
    double eps = 0.0;
    std::string format = "table";
};

void add_provider_options(CLI::App* cmd, ProviderOptions& p) {
    cmd->add_option("--corpus", p.corpus, "Local corpus: JSONL file ({\"id\",\"text\"} per line) or directory");
    cmd->add_option("--corpus-format", p.corpus_format, "auto, jsonl or dir")
        ->check(CLI::IsMember({"auto", "jsonl", "dir"}));
    cmd->add_option("--fixture", p.fixture, "Recorded count fixture (JSONL)");
    cmd->add_option("--web", p.web, "Web count provider config (JSON)");
}

void add_triple_options(CLI::App* cmd, StudyOptions& s) {
    cmd->add_option("--first", s.first, "First concept (word or quoted phrase)");
    cmd->add_option("--second", s.second, "Second concept");
    cmd->add_option("--conjunction", s.conjunction, "Conjunction pattern (default: phrase \"first second\")");
}

void add_study_options(CLI::App* cmd, StudyOptions& s) {
    add_triple_options(cmd, s);
    cmd->add_option("--n-www", s.n_www, "Total number of documents")->check(CLI::PositiveNumber);
    cmd->add_option("--eps", s.eps, "Neutral band around M = 1")->check(CLI::NonNegativeNumber);
}

void require_one_provider(const ProviderOptions& p) {
    const int chosen = !p.corpus.empty() + !p.fixture.empty() + !p.web.empty();
    if (chosen != 1) throw UsageError("exactly one of --corpus, --fixture, --web is required");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string item;
    auto flush = [&] {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t\r");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
        item.clear();
    };
    for (const char c : text) {
        if (c == ',') {
            flush();
        } else {
            item.push_back(c);
        }
    }
    flush();
    return out;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::StorageFailure, "cannot open " + path);
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line)) {
        const auto b = line.find_first_not_of(" \t");
        if (b == std::string::npos || line[b] == '#') continue;
        const auto e = line.find_last_not_of(" \t\r");
        out.push_back(line.substr(b, e - b + 1));
    }
    return out;
}

TermPattern flag_pattern(const std::string& flag, const std::string& value) {
    try {
        return parse_pattern(value);
    } catch (const Error& e) {
        throw UsageError(flag + ": " + e.what());
    }
}

std::vector<TermPattern> flag_patterns(const std::string& flag, const std::vector<std::string>& values) {
    std::vector<TermPattern> out;
    for (const auto& v : values) out.push_back(flag_pattern(flag, v));
    return out;
}

ConceptTriple flag_triple(const StudyOptions& s) {
    if (s.first.empty() || s.second.empty()) throw UsageError("--first and --second are required");
    auto first = flag_pattern("--first", s.first);
    auto second = flag_pattern("--second", s.second);
    if (s.conjunction.empty()) return ConceptTriple::with_phrase_conjunction(std::move(first), std::move(second));
    return ConceptTriple{std::move(first), std::move(second), flag_pattern("--conjunction", s.conjunction)};
}

StudyConfig flag_config(const StudyOptions& s) {
    StudyConfig config;
    config.n_www = Count{s.n_www};
    config.neutral_band_eps = s.eps;
    return config;
}

std::shared_ptr<const CorpusIndex> load_index(const ProviderOptions& p) {
    std::vector<Document> docs;
    if (p.corpus_format == "jsonl") {
        docs = read_jsonl_corpus(p.corpus);
    } else if (p.corpus_format == "dir") {
        docs = read_directory_corpus(p.corpus);
    } else {
        docs = read_corpus(p.corpus);
    }
    const unsigned threads = std::max(1u, std::min(8u, std::thread::hardware_concurrency()));
    return std::make_shared<const CorpusIndex>(build_index_parallel(docs, threads));
}

std::unique_ptr<CountProvider> open_provider(const ProviderOptions& p) {
    if (!p.corpus.empty()) return std::make_unique<LocalIndexProvider>(load_index(p));
    if (!p.fixture.empty()) return std::make_unique<FixtureProvider>(FixtureProvider::from_file(p.fixture));
    return std::make_unique<WebCountProvider>(ProviderConfig::load(p.web));
}

void print_failures(const std::vector<CellFailure>& failures, std::ostream& err) {
    for (const auto& f : failures) err << "error: " << describe(f) << '\n';
}

int run_index(const ProviderOptions& p, std::ostream& out) {
    if (p.corpus.empty()) throw UsageError("index requires --corpus");
    const auto stats = load_index(p)->stats();
    out << "documents\t" << stats.documents << '\n'
        << "tokens\t" << stats.tokens << '\n'
        << "vocabulary\t" << stats.vocabulary << '\n';
    return kExitOk;
}

int run_analyze(const ProviderOptions& p, const StudyOptions& s, std::ostream& out, std::ostream& err) {
    require_one_provider(p);
    const auto format = parse_report_format(s.format);
    auto provider = open_provider(p);
    const auto triple = flag_triple(s);
    const auto exemplars = flag_patterns("--exemplars", split_list(s.exemplars));
    const auto report = run_study(triple, exemplars, *provider, flag_config(s));
    out << render_report(report, format);
    print_failures(report.failures, err);
    return report.ok() ? kExitOk : kExitData;
}

int run_scan(const ProviderOptions& p, const StudyOptions& s, const std::optional<std::string>& candidates,
             const std::string& candidates_file, std::ostream& out, std::ostream& err) {
    require_one_provider(p);
    if (!candidates && candidates_file.empty()) throw UsageError("scan requires --candidates or --candidates-file");
    auto provider = open_provider(p);
    const auto triple = flag_triple(s);
    std::vector<std::string> names = candidates ? split_list(*candidates) : std::vector<std::string>{};
    if (!candidates_file.empty()) {
        const auto more = read_lines(candidates_file);
        names.insert(names.end(), more.begin(), more.end());
    }
    const auto config = flag_config(s);
    const auto result = guppy_scan(triple, flag_patterns("--candidates", names), *provider, config);
    out << render_scan(result, config.display);
    print_failures(result.failures, err);
    return result.failures.empty() ? kExitOk : kExitData;
}

int run_count(const ProviderOptions& p, const std::string& query_text, std::ostream& out) {
    require_one_provider(p);
    const Query query = [&] {
        try {
            return parse_query(query_text);
        } catch (const Error& e) {
            throw UsageError(std::string("--query: ") + e.what());
        }
    }();
    auto provider = open_provider(p);
    out << provider->get_count(query).count.value() << '\n';
    return kExitOk;
}

int run_fetch(const ProviderOptions& p, const StudyOptions& s, const std::string& queries_file,
              const std::string& out_path, std::ostream& out) {
    require_one_provider(p);
    const bool study = !s.first.empty() || !s.second.empty();
    if (queries_file.empty() && !study) throw UsageError("fetch requires --queries-file or --first/--second");
    std::vector<Query> queries;
    if (study) {
        queries = study_queries(flag_triple(s), flag_patterns("--exemplars", split_list(s.exemplars)));
    }
    auto provider = open_provider(p);
    if (!queries_file.empty()) {
        for (const auto& line : read_lines(queries_file)) queries.push_back(parse_query(line));
    }
    const auto table = record_fixture(*provider, queries, out_path);
    out << "recorded " << table.size() << " queries to " << out_path << '\n';
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Meaning bounds and conjunction effects from document co-occurrence counts", "meaningbound"};
    app.require_subcommand(1);

    ProviderOptions provider;
    StudyOptions study;
    std::string query_text;
    std::optional<std::string> candidates;
    std::string candidates_file;
    std::string queries_file;
    std::string out_path;

    auto* index_cmd = app.add_subcommand("index", "Build an index over a corpus and print its statistics");
    index_cmd->add_option("--corpus", provider.corpus, "JSONL file or directory")->required();
    index_cmd->add_option("--corpus-format", provider.corpus_format, "auto, jsonl or dir")
        ->check(CLI::IsMember({"auto", "jsonl", "dir"}));

    auto* count_cmd = app.add_subcommand("count", "Print the document count for one query");
    add_provider_options(count_cmd, provider);
    count_cmd->add_option("--query", query_text, "Canonical query, e.g. '\"pet fish\" -guppy'")->required();

    auto* analyze_cmd = app.add_subcommand("analyze", "Run a study and render its report");
    add_provider_options(analyze_cmd, provider);
    add_study_options(analyze_cmd, study);
    analyze_cmd->add_option("--exemplars", study.exemplars, "Comma separated exemplars");
    analyze_cmd->add_option("--format", study.format, "table, csv or json")
        ->check(CLI::IsMember({"table", "csv", "json"}));

    auto* scan_cmd = app.add_subcommand("scan", "Rank candidate exemplars by conjunction meaning bound");
    add_provider_options(scan_cmd, provider);
    add_study_options(scan_cmd, study);
    scan_cmd->add_option("--candidates", candidates, "Comma separated candidates");
    scan_cmd->add_option("--candidates-file", candidates_file, "One candidate per line");

    auto* fetch_cmd = app.add_subcommand("fetch", "Record counts from a provider into a fixture");
    add_provider_options(fetch_cmd, provider);
    add_triple_options(fetch_cmd, study);
    fetch_cmd->add_option("--exemplars", study.exemplars, "Comma separated exemplars (with --first/--second)");
    fetch_cmd->add_option("--queries-file", queries_file, "One canonical query per line");
    fetch_cmd->add_option("--out", out_path, "Fixture file to write")->required();

    std::vector<std::string> argv_storage{"meaningbound"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (index_cmd->parsed()) return run_index(provider, out);
        if (count_cmd->parsed()) return run_count(provider, query_text, out);
        if (analyze_cmd->parsed()) return run_analyze(provider, study, out, err);
        if (scan_cmd->parsed()) return run_scan(provider, study, candidates, candidates_file, out, err);
        if (fetch_cmd->parsed()) return run_fetch(provider, study, queries_file, out_path, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const StudyError& e) {
        print_failures(e.failures(), err);
        return kExitData;
    } catch (const Error& e) {
        err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
    return kExitInternal;
}

} // namespace meaningbound
