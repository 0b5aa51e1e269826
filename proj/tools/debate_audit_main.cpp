// debate-audit: audit two-sided debate judges for positional, lexical,
// order and stance biases with counterbalanced runs and paired tests.
//
// Stages write versioned artifacts under the manifest's output_dir and are
// resumable: ingest -> stats -> sample -> plan -> run -> analyze -> report.
// verify-paper replays the built-in reference statistics tables.

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "debate_audit/bias.hpp"
#include "debate_audit/corpus.hpp"
#include "debate_audit/design.hpp"
#include "debate_audit/io.hpp"
#include "debate_audit/judge.hpp"
#include "debate_audit/metrics.hpp"
#include "debate_audit/prompt.hpp"
#include "debate_audit/reference_tables.hpp"
#include "debate_audit/remote.hpp"
#include "debate_audit/rng.hpp"
#include "debate_audit/sha256.hpp"

using namespace debate_audit;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitRemote = 3;
constexpr int kExitVerification = 4;

class ManifestError : public Error {
public:
    using Error::Error;
};

struct NamedCondition {
    std::string name;
    design::Condition condition;
    std::uint64_t seed = 0;
};

struct Manifest {
    std::filesystem::path path;
    std::string digest;

    std::filesystem::path corpus;
    corpus::CorpusFormat format = corpus::CorpusFormat::Jsonl;
    corpus::EligibilityRule eligibility;

    std::string sample_mode = "balanced";
    std::map<int, long> quota = corpus::default_balanced_quota();
    long per_round_count = 500;
    std::uint64_t sample_seed = 0;

    std::vector<NamedCondition> conditions;

    std::string backend_kind = "mock";
    judge::MockParams mock_params;
    judge::RemoteConfig remote_config;

    std::filesystem::path output_dir = "out";
    std::filesystem::path cache_dir;
    std::filesystem::path templates_dir = DEFAULT_TEMPLATE_DIR;
    int parallelism = 1;
    bool use_cache = false;

    json analyses;  // optional block consumed by `analyze`
};

design::Condition parse_condition(const json& j) {
    design::Condition c;
    c.verbalizer = design::find_verbalizer(j.at("verbalizer").get<std::string>());
    c.policy = design::position_policy_from_string(j.value("policy", "FixedProFirst"));
    c.question = design::outcome_question_from_string(j.value("question", "Winner"));
    c.style = design::prompt_style_from_string(j.value("style", "Vanilla"));
    return c;
}

Manifest load_manifest(const std::filesystem::path& path) {
    std::string text;
    try {
        text = io::read_text_file(path);
    } catch (const Error& e) {
        throw ManifestError(e.what());
    }

    Manifest m;
    m.path = path;
    m.digest = sha256_hex(text);
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ManifestError("manifest " + path.string() + ": " + e.what());
    }

    try {
        if (j.contains("corpus")) m.corpus = j.at("corpus").get<std::string>();
        if (j.contains("format"))
            m.format = corpus::format_from_string(j.at("format").get<std::string>());
        if (j.contains("eligibility")) {
            const auto& e = j.at("eligibility");
            m.eligibility.min_rounds = e.value("min_rounds", 3);
            m.eligibility.max_rounds = e.value("max_rounds", 5);
            m.eligibility.min_vote_difference_exclusive =
                e.value("min_vote_difference_exclusive", 2L);
            m.eligibility.exclude_forfeits = e.value("exclude_forfeits", true);
        }
        if (j.contains("sample")) {
            const auto& s = j.at("sample");
            m.sample_mode = s.value("mode", "balanced");
            if (s.contains("quota")) {
                m.quota.clear();
                for (const auto& [key, value] : s.at("quota").items())
                    m.quota[std::stoi(key)] = value.get<long>();
            }
            m.per_round_count = s.value("per_round_count", 500L);
            m.sample_seed = s.value("seed", 0ULL);
        }
        for (const auto& cj : j.value("conditions", json::array())) {
            NamedCondition named;
            named.name = cj.at("name").get<std::string>();
            named.condition = parse_condition(cj);
            named.seed = cj.value("seed", 0ULL);
            m.conditions.push_back(std::move(named));
        }
        if (j.contains("backend")) {
            const auto& b = j.at("backend");
            m.backend_kind = b.value("kind", "mock");
            if (b.contains("mock")) {
                const auto& mk = b.at("mock");
                m.mock_params.beta_intercept = mk.value("beta_intercept", 0.0);
                m.mock_params.beta_position_second = mk.value("beta_position_second", 0.0);
                m.mock_params.beta_order_concluder = mk.value("beta_order_concluder", 0.0);
                m.mock_params.beta_stance_pro = mk.value("beta_stance_pro", 0.0);
                m.mock_params.beta_truth = mk.value("beta_truth", 0.0);
                if (mk.contains("beta_label"))
                    m.mock_params.beta_label =
                        mk.at("beta_label").get<std::map<std::string, double>>();
                m.mock_params.noise_seed = mk.value("noise_seed", 0ULL);
            }
            if (b.contains("remote")) {
                const auto& r = b.at("remote");
                m.remote_config.base_url = r.value("base_url", m.remote_config.base_url);
                m.remote_config.path = r.value("path", m.remote_config.path);
                m.remote_config.model = r.value("model", m.remote_config.model);
                m.remote_config.temperature = r.value("temperature", 0.0);
                m.remote_config.max_retries = r.value("max_retries", 3);
                m.remote_config.timeout_seconds = r.value("timeout_seconds", 60);
                m.remote_config.api_key_env = r.value("api_key_env", m.remote_config.api_key_env);
            }
        }
        if (j.contains("output_dir")) m.output_dir = j.at("output_dir").get<std::string>();
        if (j.contains("cache_dir")) m.cache_dir = j.at("cache_dir").get<std::string>();
        if (j.contains("templates_dir"))
            m.templates_dir = j.at("templates_dir").get<std::string>();
        m.parallelism = j.value("parallelism", 1);
        m.use_cache = j.value("use_cache", m.backend_kind == "remote");
        if (j.contains("analyses")) m.analyses = j.at("analyses");
    } catch (const json::exception& e) {
        throw ManifestError("manifest " + path.string() + ": " + e.what());
    }
    if (m.cache_dir.empty()) m.cache_dir = m.output_dir / "cache";
    return m;
}

// Every artifact is listed in output_dir/artifacts.json with the digest of
// the manifest that produced it.
void record_artifact(const Manifest& m, const std::string& name, const std::string& stage) {
    std::filesystem::path index_path = m.output_dir / "artifacts.json";
    json index = json::object();
    if (std::filesystem::exists(index_path)) {
        try {
            index = json::parse(io::read_text_file(index_path));
        } catch (const json::exception&) {
            index = json::object();
        }
    }
    index[name] = {{"stage", stage}, {"manifest_digest", m.digest}};
    io::write_text_file(index_path, index.dump(2) + "\n");
}

std::filesystem::path filtered_path(const Manifest& m) { return m.output_dir / "filtered.jsonl"; }
std::filesystem::path sample_path(const Manifest& m) { return m.output_dir / "sample.jsonl"; }
std::filesystem::path runs_path(const Manifest& m, const std::string& name) {
    return m.output_dir / ("runs_" + name + ".jsonl");
}

const NamedCondition& find_condition(const Manifest& m, const std::string& name) {
    for (const auto& c : m.conditions)
        if (c.name == name) return c;
    throw ManifestError("manifest has no condition named '" + name + "'");
}

int cmd_ingest(const Manifest& m) {
    std::ifstream in(m.corpus, std::ios::binary);
    if (!in) throw DataError("cannot read corpus: " + m.corpus.string());
    auto parsed = corpus::parse_corpus(in, m.format);

    std::ostringstream diag;
    for (const auto& d : parsed.diagnostics)
        diag << m.corpus.string() << ":" << d.line << ": [" << d.debate_id << "] " << d.reason
             << "\n";
    io::write_text_file(m.output_dir / "diagnostics.txt", diag.str());
    if (!parsed.diagnostics.empty())
        std::cerr << parsed.diagnostics.size() << " malformed record(s); see "
                  << (m.output_dir / "diagnostics.txt").string() << "\n";

    auto eligible = corpus::filter_eligible(parsed.debates, m.eligibility);
    io::write_debates_jsonl(filtered_path(m), eligible);
    record_artifact(m, "filtered.jsonl", "ingest");
    record_artifact(m, "diagnostics.txt", "ingest");
    std::cout << "parsed " << parsed.debates.size() << " debates ("
              << parsed.diagnostics.size() << " rejected), " << eligible.size()
              << " eligible -> " << filtered_path(m).string() << "\n";
    return kExitOk;
}

int cmd_stats(const Manifest& m) {
    auto debates = io::read_debates_jsonl(filtered_path(m));
    auto stats = corpus::corpus_stats(debates);
    io::write_text_file(m.output_dir / "corpus_stats.json", io::to_json(stats).dump(2) + "\n");
    record_artifact(m, "corpus_stats.json", "stats");

    std::cout << "debates: " << stats.debate_count << "\n";
    std::cout << "mean word count: " << stats.mean_word_count << "\n";
    for (const auto& [rounds, rs] : stats.per_round)
        std::cout << rounds << " rounds: " << rs.count << " debates, Con concludes "
                  << rs.fraction_con_concluding * 100 << "%, Con wins "
                  << rs.fraction_con_winning * 100 << "%\n";
    return kExitOk;
}

int cmd_sample(const Manifest& m) {
    auto debates = io::read_debates_jsonl(filtered_path(m));
    std::vector<corpus::Debate> sample;
    if (m.sample_mode == "balanced") {
        sample = corpus::sample_balanced(debates, m.quota, m.sample_seed);
    } else if (m.sample_mode == "unbalanced") {
        sample = corpus::sample_unbalanced(debates, m.per_round_count, m.sample_seed);
    } else {
        throw ManifestError("sample.mode must be balanced or unbalanced, got '" + m.sample_mode +
                            "'");
    }
    io::write_debates_jsonl(sample_path(m), sample);

    std::ostringstream ids;
    for (const auto& d : sample) ids << d.id << "\n";
    io::write_text_file(m.output_dir / "sample_ids.txt", ids.str());

    json meta{{"mode", m.sample_mode},
              {"seed", m.sample_seed},
              {"generator", rng::kGeneratorId},
              {"size", sample.size()}};
    io::write_text_file(m.output_dir / "sample_meta.json", meta.dump(2) + "\n");
    record_artifact(m, "sample.jsonl", "sample");
    record_artifact(m, "sample_ids.txt", "sample");
    record_artifact(m, "sample_meta.json", "sample");
    std::cout << "sampled " << sample.size() << " debates (" << m.sample_mode << ", seed "
              << m.sample_seed << ", " << rng::kGeneratorId << ")\n";
    return kExitOk;
}

int cmd_plan(const Manifest& m) {
    auto sample = io::read_debates_jsonl(sample_path(m));
    std::vector<std::string> ids;
    ids.reserve(sample.size());
    for (const auto& d : sample) ids.push_back(d.id);

    for (const auto& named : m.conditions) {
        auto assignments = design::assign(ids, named.condition, named.seed);
        std::string artifact = "assignments_" + named.name + ".jsonl";
        io::write_assignments_jsonl(m.output_dir / artifact, assignments);
        record_artifact(m, artifact, "plan");
        std::cout << named.name << ": " << assignments.size() << " assignments\n";
    }
    return kExitOk;
}

std::unique_ptr<judge::Judge> make_backend(const Manifest& m) {
    if (m.backend_kind == "mock") return std::make_unique<judge::MockJudge>(m.mock_params);
    if (m.backend_kind == "rule") return std::make_unique<judge::RuleBasedJudge>();
    if (m.backend_kind == "remote") return std::make_unique<judge::RemoteJudge>(m.remote_config);
    throw ManifestError("backend.kind must be mock, rule or remote, got '" + m.backend_kind + "'");
}

int cmd_run(const Manifest& m, const std::string& only_condition, bool fresh) {
    auto sample = io::read_debates_jsonl(sample_path(m));
    auto templates = prompt::TemplateSet::load(m.templates_dir);
    auto backend = make_backend(m);

    std::optional<judge::ResponseCache> cache;
    std::unique_ptr<judge::CachingJudge> caching;
    judge::Judge* active = backend.get();
    if (m.use_cache) {
        cache.emplace(m.cache_dir);
        caching = std::make_unique<judge::CachingJudge>(*backend, *cache, templates.version());
        active = caching.get();
    }

    for (const auto& named : m.conditions) {
        if (!only_condition.empty() && named.name != only_condition) continue;
        std::filesystem::path path = runs_path(m, named.name);

        judge::RunOptions options;
        options.parallelism = m.parallelism;
        if (fresh) std::filesystem::remove(path);
        if (std::filesystem::exists(path)) {
            for (const auto& r : io::read_run_records_jsonl(path))
                options.resume_done_ids.push_back(r.debate_id);
        }
        if (options.resume_done_ids.size() == sample.size()) {
            std::cout << named.name << ": already complete (" << sample.size() << " records)\n";
            continue;
        }

        std::filesystem::create_directories(m.output_dir);
        std::ofstream out(path, std::ios::binary | std::ios::app);
        if (!out) throw DataError("cannot write " + path.string());
        options.sink = [&out](const judge::RunRecord& r) {
            io::append_run_record(out, r);
            out.flush();
        };

        try {
            judge::run_experiment(*active, sample, named.condition, named.seed, templates,
                                  options);
        } catch (const judge::EvaluateFailed& e) {
            std::cerr << e.what() << "\npartial records kept in " << path.string() << "\n";
            throw;
        }
        record_artifact(m, path.filename().string(), "run");
        long total = static_cast<long>(io::read_run_records_jsonl(path).size());
        std::cout << named.name << ": " << total << " records -> " << path.string() << "\n";
    }
    return kExitOk;
}

std::vector<judge::RunRecord> load_run(const Manifest& m, const std::string& name) {
    find_condition(m, name);  // reject unknown names early
    return io::read_run_records_jsonl(runs_path(m, name));
}

int cmd_analyze(const Manifest& m) {
    if (m.analyses.is_null()) throw ManifestError("manifest has no analyses block");

    std::optional<bias::PositionalSection> positional;
    std::vector<bias::LexicalPair> lexical;
    std::optional<bias::OrderSection> order;
    std::optional<bias::StanceSection> stance;
    std::vector<bias::SensitivityCell> sensitivity;

    bias::ReportMetadata metadata;
    metadata.rng_identity = std::string(rng::kGeneratorId);
    metadata.template_version = prompt::TemplateSet::load(m.templates_dir).version();
    metadata.manifest_digest = m.digest;
    metadata.seeds["sample"] = m.sample_seed;
    for (const auto& named : m.conditions) {
        metadata.seeds["condition:" + named.name] = named.seed;
        metadata.conditions.push_back(named.name);
    }

    if (m.analyses.contains("positional")) {
        const auto& pj = m.analyses.at("positional");
        bias::PositionalSection section;
        if (pj.contains("unpaired_runs")) {
            std::vector<judge::RunRecord> records;
            for (const auto& name : pj.at("unpaired_runs")) {
                auto run = load_run(m, name.get<std::string>());
                records.insert(records.end(), run.begin(), run.end());
            }
            section.unpaired = bias::positional_unpaired(records);
            metadata.sample_sizes["positional"] = static_cast<long>(records.size());
        }
        if (pj.contains("paired")) {
            const auto& qj = pj.at("paired");
            bool correction = qj.at("correction").get<bool>();
            auto fixed_run = load_run(m, qj.at("fixed").get<std::string>());
            auto shuffled_run = load_run(m, qj.at("shuffled").get<std::string>());
            auto paired = bias::positional_paired(fixed_run, shuffled_run, correction);
            paired.fixed_run = qj.at("fixed").get<std::string>();
            paired.shuffled_run = qj.at("shuffled").get<std::string>();
            section.paired = std::move(paired);
            metadata.correction_flags["positional_mcnemar"] = correction;
        }
        if (section.unpaired || section.paired) positional = std::move(section);
    }

    if (m.analyses.contains("lexical")) {
        for (const auto& lj : m.analyses.at("lexical")) {
            bool correction = lj.at("correction").get<bool>();
            auto first = load_run(m, lj.at("first").get<std::string>());
            auto second = load_run(m, lj.at("second").get<std::string>());
            auto pair = bias::lexical_analysis(first, second, correction);
            metadata.correction_flags["lexical:" + pair.verbalizer_first + "|" +
                                      pair.verbalizer_second] = correction;
            lexical.push_back(std::move(pair));
        }
    }

    if (m.analyses.contains("order")) {
        const auto& oj = m.analyses.at("order");
        auto records = load_run(m, oj.at("run").get<std::string>());
        auto sample = io::read_debates_jsonl(sample_path(m));
        std::map<std::string, Side> concluding;
        for (const auto& d : sample) concluding[d.id] = d.concluding_side;
        bool yates = oj.value("yates", true);
        order = bias::order_analysis(records, concluding, yates);
        metadata.correction_flags["order_yates"] = yates;
        metadata.sample_sizes["order"] = static_cast<long>(records.size());
    }

    if (m.analyses.contains("stance")) {
        auto records = load_run(m, m.analyses.at("stance").at("run").get<std::string>());
        stance = bias::stance_analysis(records);
        metadata.sample_sizes["stance"] = static_cast<long>(records.size());
    }

    if (m.analyses.contains("sensitivity")) {
        std::map<std::pair<std::string, design::OutcomeQuestion>, std::vector<judge::RunRecord>>
            cells;
        for (const auto& name : m.analyses.at("sensitivity")) {
            const auto& named = find_condition(m, name.get<std::string>());
            auto run = load_run(m, named.name);
            auto& cell = cells[{named.condition.verbalizer.name, named.condition.question}];
            cell.insert(cell.end(), run.begin(), run.end());
        }
        sensitivity = bias::sensitivity_table(cells);
    }

    auto report = bias::build_report(std::move(positional), std::move(lexical), std::move(order),
                                     std::move(stance), std::move(sensitivity),
                                     std::move(metadata));
    io::write_text_file(m.output_dir / "report.json", io::to_json(report).dump(2) + "\n");
    record_artifact(m, "report.json", "analyze");
    std::cout << "report written to " << (m.output_dir / "report.json").string()
              << " (self-verified)\n";
    return kExitOk;
}

int cmd_report(const Manifest& m) {
    json j = json::parse(io::read_text_file(m.output_dir / "report.json"));
    auto report = io::report_from_json(j);
    bias::self_verify(report);  // tampered artifacts fail here
    io::write_text_file(m.output_dir / "report.md", io::report_markdown(report));
    record_artifact(m, "report.md", "report");
    std::cout << "markdown written to " << (m.output_dir / "report.md").string() << "\n";
    return kExitOk;
}

int cmd_verify_paper(double chi2_tolerance, double phi_tolerance) {
    reference::VerifyOptions options;
    options.chi2_tolerance = chi2_tolerance;
    options.phi_tolerance = phi_tolerance;
    auto summary = reference::verify_reference_tables(std::cout, options);
    return summary.ok() ? kExitOk : kExitVerification;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"audit two-sided debate judges for positional, lexical, order and stance bias"};
    app.require_subcommand(1);

    std::string manifest_path;
    std::string corpus_override, out_override, templates_override, condition_filter;
    std::optional<std::uint64_t> seed_override;
    std::optional<int> parallelism_override;
    bool no_cache = false, fresh = false;

    auto add_manifest = [&](CLI::App* cmd) {
        cmd->add_option("--manifest", manifest_path, "run manifest (json)")->required();
        cmd->add_option("--corpus", corpus_override, "override manifest corpus path");
        cmd->add_option("--out", out_override, "override manifest output_dir");
        cmd->add_option("--templates", templates_override, "override template directory");
        cmd->add_option("--seed", seed_override, "override sample/assignment seed");
    };

    auto* ingest = app.add_subcommand("ingest", "parse, validate and filter the corpus");
    add_manifest(ingest);
    auto* stats_cmd = app.add_subcommand("stats", "corpus statistics from the filtered corpus");
    add_manifest(stats_cmd);
    auto* sample_cmd = app.add_subcommand("sample", "draw the balanced or unbalanced sample");
    add_manifest(sample_cmd);
    auto* plan = app.add_subcommand("plan", "write per-condition assignment lists");
    add_manifest(plan);
    auto* run = app.add_subcommand("run", "evaluate the sample under every condition");
    add_manifest(run);
    run->add_option("--condition", condition_filter, "run only this condition");
    run->add_option("--parallelism", parallelism_override, "concurrent evaluations");
    run->add_flag("--no-cache", no_cache, "bypass the response cache");
    run->add_flag("--fresh", fresh, "discard existing run records instead of resuming");
    auto* analyze = app.add_subcommand("analyze", "compute the bias report from run records");
    add_manifest(analyze);
    auto* report = app.add_subcommand("report", "render report.json as markdown");
    add_manifest(report);

    double chi2_tolerance = 0.01, phi_tolerance = 0.002;
    auto* verify =
        app.add_subcommand("verify-paper", "replay the pinned reference statistics tables");
    verify->add_option("--chi2-tolerance", chi2_tolerance, "chi-square tolerance");
    verify->add_option("--phi-tolerance", phi_tolerance, "phi tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (verify->parsed()) return cmd_verify_paper(chi2_tolerance, phi_tolerance);

        Manifest m = load_manifest(manifest_path);
        if (!corpus_override.empty()) m.corpus = corpus_override;
        if (!out_override.empty()) m.output_dir = out_override;
        if (!templates_override.empty()) m.templates_dir = templates_override;
        if (seed_override) m.sample_seed = *seed_override;
        if (parallelism_override) m.parallelism = *parallelism_override;
        if (no_cache) m.use_cache = false;
        std::filesystem::create_directories(m.output_dir);

        if (ingest->parsed()) return cmd_ingest(m);
        if (stats_cmd->parsed()) return cmd_stats(m);
        if (sample_cmd->parsed()) return cmd_sample(m);
        if (plan->parsed()) return cmd_plan(m);
        if (run->parsed()) return cmd_run(m, condition_filter, fresh);
        if (analyze->parsed()) return cmd_analyze(m);
        if (report->parsed()) return cmd_report(m);
        return kExitUsage;
    } catch (const ManifestError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const RemoteError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRemote;
    } catch (const VerificationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitVerification;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}
