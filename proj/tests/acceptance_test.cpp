// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//
// Pinned tolerances:
//   1a Corr.          |value - printed| <= 1 unit in the printed last digit
//   1b Rel. N corr.   exact integer equality
//   1c Rel. w         |value - printed| <= 1 unit in the printed last digit
//   1d Abs. w         value formatted at the printed decimals equals the printed string
//   1e M              |value - printed| <= 1 unit in the printed last digit
//   1f runtime        analyze over the six exemplars < 1 s
//   3  spot weights   value formatted at the printed decimals equals the printed string
//   4  scale / coherence 1e-12 relative, symmetry 1e-15 relative, corr identity exact
//   5  counts exact, corr exactly 1, independence M = 1 +- 1e-9, runtime < 10 s
//   6  byte equality of JSON reports

#include "meaningbound/analysis.hpp"
#include "meaningbound/cli.hpp"
#include "meaningbound/report.hpp"

#include "support/synthetic.hpp"
#include "support/table1.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

namespace mb = meaningbound;
namespace fs = std::filesystem;
using mb::Count;
using nlohmann::json;

namespace {

const std::string kTable1 = std::string(MEANINGBOUND_DATA_DIR) + "/table1.jsonl";

int g_failures = 0;

void report(const std::string& id, bool ok, const std::string& what, const std::vector<std::string>& problems) {
    std::cout << (ok ? "PASS " : "FAIL ") << id << ": " << what;
    if (!ok) {
        std::cout << " [";
        for (std::size_t i = 0; i < problems.size(); ++i) std::cout << (i ? "; " : "") << problems[i];
        std::cout << "]";
        ++g_failures;
    }
    std::cout << '\n';
}

double rel_diff(double a, double b) {
    if (a == b) return 0.0;
    return std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b));
}

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = mb::run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

const char* kColumnNames[3] = {"pet", "fish", "pet fish"};

std::string where(std::string_view exemplar, std::size_t c) {
    return std::string(exemplar) + "/" + kColumnNames[c];
}

void criterion1_and_2() {
    const auto start = std::chrono::steady_clock::now();
    const auto run = cli({"analyze", "--first", "pet", "--second", "fish", "--exemplars",
                          "guppy,world,spelling,house,goldfish,hierarchy", "--fixture", kTable1, "--format", "json"});
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (run.code != 0) {
        for (const char* id : {"1a", "1b", "1c", "1d", "1e", "1f", "2"}) {
            report(id, false, "analyze on the published fixture", {"exit " + std::to_string(run.code) + ": " + run.err});
        }
        return;
    }
    const auto j = json::parse(run.out);
    const auto& printed = mb::testing::published_regions();

    std::vector<std::string> corr_bad, int_bad, relw_bad, absw_bad, m_bad;
    for (std::size_t r = 0; r < printed.size(); ++r) {
        const auto& jr = j["regions"][r];
        const auto& pr = printed[r];
        const double abs_w = jr["abs_w"].get<double>();
        if (mb::format_fixed(abs_w, mb::testing::printed_decimals(pr.abs_w)) != pr.abs_w) {
            absw_bad.push_back(std::string(pr.exemplar) + " " + mb::format_fixed(abs_w, 9) + " vs " +
                               std::string(pr.abs_w));
        }
        for (std::size_t c = 0; c < 3; ++c) {
            const auto& jc = jr["cells"][c];
            const auto& pc = pr.cells[c];
            const double corr = jc["corr"].get<double>();
            const double rel_w = jc["rel_w"].get<double>();
            const double m = jc["m"].get<double>();
            const auto corrected = jc["n_ax_corrected"].get<std::int64_t>();
            if (!mb::testing::within_printed_ulp(corr, pc.corr)) {
                corr_bad.push_back(where(pr.exemplar, c) + " " + mb::format_fixed(corr, 7) + " vs " +
                                   std::string(pc.corr));
            }
            if (corrected != pc.rel_n_corr) {
                int_bad.push_back(where(pr.exemplar, c) + " " + std::to_string(corrected) + " vs " +
                                  std::to_string(pc.rel_n_corr));
            }
            if (!mb::testing::within_printed_ulp(rel_w, pc.rel_w)) {
                relw_bad.push_back(where(pr.exemplar, c) + " " + mb::format_fixed(rel_w, 7) + " vs " +
                                   std::string(pc.rel_w));
            }
            if (!mb::testing::within_printed_ulp(m, pc.m)) {
                m_bad.push_back(where(pr.exemplar, c) + " " + mb::format_fixed(m, 4) + " vs " + std::string(pc.m));
            }
        }
    }
    // The back-derived Spelling/pet fish cell must reproduce its printed factor.
    const auto& spelling = j["regions"][2]["cells"][2];
    if (spelling["n_a_not_x"].get<std::int64_t>() != mb::testing::kSpellingConjunctionNotNFixture ||
        mb::format_fixed(spelling["corr"].get<double>(), 7) != "0.9998864") {
        corr_bad.push_back("spelling/pet fish does not give 0.9998864");
    }

    report("1a", corr_bad.empty(), "18 Corr. values within 1 unit of the printed last digit", corr_bad);
    report("1b", int_bad.empty(), "18 Rel. N corr. integers exactly as printed", int_bad);
    report("1c", relw_bad.empty(), "18 Rel. w values within 1 unit of the printed last digit", relw_bad);
    report("1d", absw_bad.empty(), "6 Abs. w values exactly as printed", absw_bad);
    report("1e", m_bad.empty(), "18 M values within 1 unit of the printed last digit", m_bad);
    report("1f", elapsed < 1.0, "published-study analyze under 1 second (" + mb::format_fixed(elapsed, 3) + " s)",
           {mb::format_fixed(elapsed, 3) + " s"});

    const std::vector<std::string> verdicts{"guppy-effect", "classical",   "classical",
                                            "overextended-on-second", "guppy-effect", "classical"};
    std::vector<std::string> verdict_bad;
    for (std::size_t r = 0; r < 6; ++r) {
        const auto& jr = j["regions"][r];
        for (const char* key : {"verdict_weights", "verdict_bounds"}) {
            if (jr[key] != verdicts[r]) {
                verdict_bad.push_back(std::string(printed[r].exemplar) + " " + key + " " + jr[key].get<std::string>());
            }
        }
        for (std::size_t c = 0; c < 3; ++c) {
            const std::string want = (r == 5 && c == 2) ? "repulsive" : "attractive";
            if (jr["cells"][c]["bound_class"] != want) verdict_bad.push_back(where(printed[r].exemplar, c) + " class");
        }
    }
    report("2", verdict_bad.empty(), "verdicts and bound classes of the six regions", verdict_bad);
}

void criterion3() {
    auto provider = mb::FixtureProvider::from_file(kTable1);
    struct Spot {
        const char* column;
        const char* exemplar;
        const char* printed;
    };
    const std::vector<Spot> spots{{"pet", "hierarchy", "0.00326"},  {"fish", "hierarchy", "0.00595"},
                                  {"\"pet fish\"", "hierarchy", "0.00080"}, {"pet", "guppy", "0.00236"},
                                  {"fish", "guppy", "0.00411"},     {"\"pet fish\"", "guppy", "0.02153"}};
    std::vector<std::string> bad;
    for (const auto& s : spots) {
        const auto column = mb::parse_pattern(s.column);
        const auto exemplar = mb::TermPattern::word(s.exemplar);
        const auto n_a = provider.get_count(mb::pattern_query(column)).count;
        const auto n_ax = provider.get_count(mb::and_query(column, exemplar)).count;
        const double w = mb::relative_weight(n_ax, n_a);
        const auto shown = mb::format_fixed(w, mb::testing::printed_decimals(s.printed));
        if (shown != s.printed) bad.push_back(std::string(s.column) + "/" + s.exemplar + " " + shown);
    }
    report("3", bad.empty(), "six uncorrected spot weights at printed significant figures", bad);
}

void criterion4() {
    std::mt19937_64 rng(20100504);
    std::vector<std::string> bad;
    const auto draw = [&](std::int64_t hi) { return 1 + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi)); };

    for (int i = 0; i < 1'000 && bad.size() < 5; ++i) {
        const std::int64_t www = draw(10'000'000'000);
        const std::int64_t a = draw(www), x = draw(www);
        const std::int64_t ax = draw(std::min(a, x) + 1) - 1;
        const std::int64_t not_x = draw(a);
        const mb::RawCellCounts raw{Count{a}, Count{ax}, Count{not_x}, Count{x}, Count{www}};
        const auto ref = mb::evaluate_cell(raw);
        const double ref_exact = mb::meaning_bound_exact(raw.n_ax, raw.n_a, raw.n_x, raw.n_www);
        for (const std::int64_t k : {2, 10, 1000}) {
            const Count kk{k};
            const mb::RawCellCounts s{raw.n_a * kk, raw.n_ax * kk, raw.n_a_not_x * kk, raw.n_x * kk, raw.n_www * kk};
            const auto cell = mb::evaluate_cell(s);
            const double w_scaled = mb::relative_weight(s.n_ax, s.n_a);
            if (rel_diff(w_scaled, mb::relative_weight(raw.n_ax, raw.n_a)) > 1e-12 ||
                rel_diff(cell.corr, ref.corr) > 1e-12 || rel_diff(cell.m, ref.m) > 1e-12 ||
                rel_diff(mb::meaning_bound_exact(s.n_ax, s.n_a, s.n_x, s.n_www), ref_exact) > 1e-12 ||
                cell.bound_class != ref.bound_class) {
                bad.push_back("scale k=" + std::to_string(k));
            }
        }
        // Correction identity exactly when the split is additive.
        const bool additive = ax + not_x == a;
        if ((mb::correction_factor(raw.n_a, raw.n_ax, raw.n_a_not_x) == 1.0) != additive) bad.push_back("corr identity");
        if (mb::correction_factor(raw.n_a, raw.n_ax, Count{a - ax}) != 1.0) bad.push_back("corr additive");
        // Symmetry in the two words.
        if (rel_diff(ref_exact, mb::meaning_bound_exact(raw.n_ax, raw.n_x, raw.n_a, raw.n_www)) > 1e-15) {
            bad.push_back("symmetry");
        }
        // Two routes to M.
        const std::int64_t small_www = draw(1'000'000);
        const std::int64_t sa = draw(small_www), sx = draw(small_www), sax = draw(std::min(sa, sx) + 1) - 1;
        const double via = mb::meaning_bound(mb::relative_weight(Count{sax}, Count{sa}),
                                             mb::absolute_weight(Count{sx}, Count{small_www}));
        if (rel_diff(via, mb::meaning_bound_exact(Count{sax}, Count{sa}, Count{sx}, Count{small_www})) > 1e-12) {
            bad.push_back("coherence");
        }
        // Verdict from weights equals verdict from bounds.
        std::array<mb::CellReport, 3> cells;
        for (auto& c : cells) {
            const std::int64_t ca = draw(www), cax = draw(std::min(ca, x) + 1) - 1, cnot = draw(ca);
            c = mb::evaluate_cell(mb::RawCellCounts{Count{ca}, Count{cax}, Count{cnot}, Count{x}, Count{www}});
        }
        if (mb::classify_conjunction(cells[0].rel_w, cells[1].rel_w, cells[2].rel_w) !=
            mb::classify_conjunction(cells[0].m, cells[1].m, cells[2].m)) {
            bad.push_back("verdict coherence");
        }
    }
    report("4", bad.empty(), "scale invariance, correction identity, symmetry, coherence on 10^3 count sets", bad);
}

void criterion5() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(5);
    std::vector<std::string> bad;
    const auto pet_fish =
        mb::ConceptTriple::with_phrase_conjunction(mb::TermPattern::word("pet"), mb::TermPattern::word("fish"));

    for (int c = 0; c < 100 && bad.size() < 5; ++c) {
        const auto docs = mb::testing::random_corpus(rng, 200, 50);
        auto index = std::make_shared<const mb::CorpusIndex>(mb::build_index(docs));
        const mb::testing::BruteForceScanner scanner(docs);
        for (int q = 0; q < 100; ++q) {
            const auto query = mb::testing::random_query(rng);
            if (index->count(query).value() != scanner.count(query)) {
                bad.push_back("corpus " + std::to_string(c) + " `" + mb::canonical_query_string(query) + "`");
            }
            const auto p = mb::testing::random_pattern(rng), x = mb::testing::random_pattern(rng);
            const auto n_p = index->count(mb::pattern_query(p));
            if (n_p.value() > 0 &&
                mb::correction_factor(n_p, index->count(mb::and_query(p, x)), index->count(mb::and_not_query(p, x))) !=
                    1.0) {
                bad.push_back("corr != 1 in corpus " + std::to_string(c));
            }
        }
        mb::LocalIndexProvider provider(index);
        mb::StudyConfig config;
        config.n_www = Count{std::max<std::int64_t>(1, static_cast<std::int64_t>(docs.size()))};
        std::vector<mb::TermPattern> exemplars;
        for (int i = 0; i < 3; ++i) exemplars.push_back(mb::testing::random_pattern(rng));
        for (const auto& region : mb::run_study(pet_fish, exemplars, provider, config).regions) {
            for (const auto& cell : region.cells) {
                if (cell.corr != 1.0) bad.push_back("study corr != 1 in corpus " + std::to_string(c));
            }
        }
    }

    std::size_t planted_pairs = 0;
    for (int c = 0; c < 20; ++c) {
        const auto planted = mb::testing::planted_independence_corpus(rng);
        mb::LocalIndexProvider provider(std::make_shared<const mb::CorpusIndex>(mb::build_index(planted.docs)));
        mb::StudyConfig config;
        config.n_www = Count{static_cast<std::int64_t>(planted.docs.size())};
        const auto study = mb::run_study(planted.triple, planted.exemplars, provider, config);
        if (!study.ok() || study.regions.size() != planted.exemplars.size()) bad.push_back("planted study failed");
        for (const auto& region : study.regions) {
            for (const auto& cell : region.cells) {
                ++planted_pairs;
                if (std::fabs(cell.m - 1.0) > 1e-9) bad.push_back("planted M = " + mb::format_fixed(cell.m, 12));
            }
            if (region.verdict_bounds == mb::ConjunctionVerdict::GuppyEffect ||
                region.verdict_weights == mb::ConjunctionVerdict::GuppyEffect) {
                bad.push_back("planted GuppyEffect");
            }
        }
        for (const auto& e : mb::guppy_scan(planted.triple, planted.exemplars, provider, config).entries) {
            if (e.verdict == mb::ConjunctionVerdict::GuppyEffect) bad.push_back("planted scan GuppyEffect");
        }
    }
    const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed >= 10.0) bad.push_back("runtime " + mb::format_fixed(elapsed, 2) + " s");
    report("5", bad.empty(),
           "index vs brute force on 100 corpora, corr = 1, " + std::to_string(planted_pairs) +
               " planted pairs at M = 1, no GuppyEffect (" + mb::format_fixed(elapsed, 2) + " s)",
           bad);
}

void criterion6() {
    const fs::path dir = fs::temp_directory_path() / "meaningbound-acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::mt19937_64 rng(6);
    const auto docs = mb::testing::random_corpus(rng, 200, 50);
    {
        std::ofstream out(dir / "corpus.jsonl");
        for (const auto& d : docs) out << json{{"id", d.id}, {"text", d.text}}.dump() << '\n';
    }
    const std::vector<std::string> study{"--first", "pet", "--second", "fish", "--exemplars", "guppy,house,world,tank"};
    const std::string n_www = std::to_string(std::max<std::size_t>(1, docs.size()));
    auto args = [&](std::vector<std::string> head, std::vector<std::string> tail) {
        head.insert(head.end(), study.begin(), study.end());
        head.insert(head.end(), tail.begin(), tail.end());
        return head;
    };
    const auto corpus = (dir / "corpus.jsonl").string();
    const auto fixture = (dir / "recorded.jsonl").string();
    const auto fetched = cli(args({"fetch", "--corpus", corpus, "--out", fixture}, {}));
    const auto direct = cli(args({"analyze", "--corpus", corpus}, {"--n-www", n_www, "--format", "json"}));
    const auto replay = cli(args({"analyze", "--fixture", fixture}, {"--n-www", n_www, "--format", "json"}));
    std::vector<std::string> bad;
    if (fetched.code != 0) bad.push_back("fetch exit " + std::to_string(fetched.code) + ": " + fetched.err);
    if (direct.code != replay.code) bad.push_back("exit codes differ");
    if (direct.out.empty()) bad.push_back("empty report");
    if (direct.out != replay.out) bad.push_back("JSON reports differ");
    report("6", bad.empty(), "fetch then analyze --fixture gives a byte-identical JSON report", bad);
    fs::remove_all(dir);
}

} // namespace

int main() {
    criterion1_and_2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    return g_failures == 0 ? 0 : 1;
}
