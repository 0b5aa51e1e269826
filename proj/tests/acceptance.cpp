// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Runs offline against the bundled synthetic corpus, the checked-in
// golden prompts, and the built-in reference statistics tables.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "debate_audit/bias.hpp"
#include "debate_audit/corpus.hpp"
#include "debate_audit/io.hpp"
#include "debate_audit/judge.hpp"
#include "debate_audit/metrics.hpp"
#include "debate_audit/prompt.hpp"
#include "debate_audit/reference_tables.hpp"
#include "debate_audit/stats.hpp"
#include "support/fixtures.hpp"
#include "support/harness.hpp"
#include "support/oracles.hpp"

using namespace debate_audit;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
    int number;
    std::string name;
    std::function<std::string()> run;  // returns detail, throws on failure
};

struct Failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& what) {
    if (!ok) throw Failure(what);
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v, int precision = 4) {
    std::ostringstream out;
    out.precision(precision);
    out << std::fixed << v;
    return out.str();
}

std::vector<corpus::Debate> load_bundled_eligible() {
    std::ifstream in(std::filesystem::path(DATA_DIR) / "synthetic_corpus.jsonl",
                     std::ios::binary);
    require(bool(in), "bundled corpus missing");
    auto parsed = corpus::parse_corpus(in, corpus::CorpusFormat::Jsonl);
    require(parsed.diagnostics.empty(), "bundled corpus has malformed records");
    return corpus::filter_eligible(parsed.debates, {});
}

// ---- criterion 1: reference statistics replay -----------------------------

std::string criterion_reference_tables() {
    auto start = Clock::now();
    std::ostringstream log;
    auto summary = reference::verify_reference_tables(log);
    double elapsed = seconds_since(start);
    if (!summary.ok()) std::cerr << log.str();
    require(summary.ok(), "reference table mismatch");
    require(summary.rows_checked == 24, "expected 24 pinned rows");
    require(elapsed < 1.0, "replay took " + fmt(elapsed) + "s, limit 1s");
    return "24 rows, max chi2 err " + fmt(summary.max_chi2_error) + ", max phi err " +
           fmt(summary.max_phi_error) + ", " + fmt(elapsed, 3) + "s";
}

// ---- criterion 2: special functions vs quadrature oracles -----------------

std::string criterion_special_functions() {
    double max_phi_err = 0.0, max_chi2_err = 0.0;
    for (int i = 0; i < 100; ++i) {
        double x = -8.0 + 16.0 * i / 99.0;
        max_phi_err = std::max(max_phi_err,
                               std::fabs(stats::normal_cdf(x) - oracles::normal_cdf(x)));
    }
    for (int i = 1; i <= 100; ++i) {
        double x = 25.0 * i / 100.0;
        max_chi2_err = std::max(max_chi2_err,
                                std::fabs(stats::chi2_cdf_df1(x) - oracles::chi2_cdf_df1(x)));
    }
    require(max_phi_err < 1e-6, "normal cdf error " + fmt(max_phi_err, 10));
    require(max_chi2_err < 1e-6, "chi2 cdf error " + fmt(max_chi2_err, 10));

    double survival = stats::chi2_survival_df1(3.841459);
    require(std::fabs(survival - 0.05) <= 1e-4,
            "survival(3.841459) = " + fmt(survival, 6) + ", expected 0.0500 +/- 1e-4");
    return "normal cdf err " + fmt(max_phi_err, 10) + ", chi2 cdf err " + fmt(max_chi2_err, 10) +
           ", survival(3.841459) = " + fmt(survival, 4);
}

// ---- criteria 3 and 4: calibration and power over mock trials --------------

std::string criterion_null_calibration() {
    auto start = Clock::now();
    auto eligible = load_bundled_eligible();
    auto sample = corpus::sample_balanced(eligible, corpus::default_balanced_quota(), 42);
    require(sample.size() == 1300, "balanced sample size");
    auto templates = prompt::TemplateSet::load(TEMPLATE_DIR);

    const int trials = 200;
    const double alpha = 0.05;
    harness::TrialJudge unbiased;
    int rejections[4] = {0, 0, 0, 0};
    for (int trial = 1; trial <= trials; ++trial) {
        std::uint64_t t = static_cast<std::uint64_t>(trial);
        if (harness::positional_trial(unbiased, sample, t, templates).p_value < alpha)
            ++rejections[0];
        if (harness::lexical_trial(unbiased, sample, t, templates).p_value < alpha)
            ++rejections[1];
        if (harness::order_trial(unbiased, sample, t, templates).p_value < alpha)
            ++rejections[2];
        if (harness::stance_trial(unbiased, sample, t, templates).p_value < alpha)
            ++rejections[3];
    }

    const char* names[4] = {"positional", "lexical", "order", "stance"};
    std::ostringstream detail;
    for (int i = 0; i < 4; ++i) {
        double rate = double(rejections[i]) / trials;
        if (i > 0) detail << ", ";
        detail << names[i] << " " << fmt(rate, 3);
        require(rate >= 0.02 && rate <= 0.09,
                std::string(names[i]) + " rejection rate " + fmt(rate, 3) +
                    " outside [0.02, 0.09]");
    }
    double elapsed = seconds_since(start);
    require(elapsed < 300.0, "calibration took " + fmt(elapsed) + "s, limit 300s");
    detail << " over " << trials << " seeds, " << fmt(elapsed, 1) << "s";
    return detail.str();
}

std::string criterion_power() {
    auto start = Clock::now();
    auto eligible = load_bundled_eligible();
    auto sample = corpus::sample_balanced(eligible, {{3, 125}}, 43);
    require(sample.size() == 500, "power sample size");
    auto templates = prompt::TemplateSet::load(TEMPLATE_DIR);

    // +0.15 absolute effect: the biased choice probability is 0.65
    const double bump = std::log(0.65 / 0.35);
    const int trials = 100;
    int hits[3] = {0, 0, 0};

    harness::TrialJudge position_biased;
    position_biased.params.beta_position_second = bump;
    harness::TrialJudge label_biased;
    label_biased.params.beta_label["B"] = bump;
    harness::TrialJudge order_biased;
    order_biased.params.beta_order_concluder = bump;

    for (int trial = 1; trial <= trials; ++trial) {
        std::uint64_t t = 1000 + static_cast<std::uint64_t>(trial);
        if (harness::positional_trial(position_biased, sample, t, templates).p_value < 0.01)
            ++hits[0];
        if (harness::lexical_trial(label_biased, sample, t, templates).p_value < 0.01)
            ++hits[1];
        if (harness::order_trial(order_biased, sample, t, templates).p_value < 0.01)
            ++hits[2];
    }

    const char* names[3] = {"positional", "lexical", "order"};
    std::ostringstream detail;
    for (int i = 0; i < 3; ++i) {
        if (i > 0) detail << ", ";
        detail << names[i] << " " << hits[i] << "/" << trials;
        require(hits[i] >= 95, std::string(names[i]) + " power " + std::to_string(hits[i]) +
                                   "/100, need >= 95");
    }
    double elapsed = seconds_since(start);
    require(elapsed < 300.0, "power suite took " + fmt(elapsed) + "s, limit 300s");
    detail << " at p < 0.01, " << fmt(elapsed, 1) << "s";
    return detail.str();
}

// ---- criterion 5: prompt goldens -------------------------------------------

std::string criterion_goldens() {
    auto templates = prompt::TemplateSet::load(TEMPLATE_DIR);
    auto debate = fixtures::golden_debate();

    struct Case {
        const char* file;
        design::PromptStyle style;
        design::OutcomeQuestion question;
        Side first;
    };
    const Case cases[] = {
        {"vanilla_winner_pro_first.txt", design::PromptStyle::Vanilla,
         design::OutcomeQuestion::Winner, Side::Pro},
        {"vanilla_winner_con_first.txt", design::PromptStyle::Vanilla,
         design::OutcomeQuestion::Winner, Side::Con},
        {"vanilla_loser_pro_first.txt", design::PromptStyle::Vanilla,
         design::OutcomeQuestion::Loser, Side::Pro},
        {"vanilla_loser_con_first.txt", design::PromptStyle::Vanilla,
         design::OutcomeQuestion::Loser, Side::Con},
        {"eval_winner_pro_first.txt", design::PromptStyle::Eval, design::OutcomeQuestion::Winner,
         Side::Pro},
        {"eval_winner_con_first.txt", design::PromptStyle::Eval, design::OutcomeQuestion::Winner,
         Side::Con},
    };
    for (const auto& c : cases) {
        design::Assignment a;
        a.debate_id = debate.id;
        a.pro_label = "A";
        a.con_label = "B";
        a.first_candidate = c.first;
        a.verbalizer_name = "A/B";
        auto rendered = prompt::render_full(debate, a, c.question, c.style, templates);
        auto golden = io::read_text_file(std::filesystem::path(GOLDEN_DIR) / c.file);
        require(rendered.text == golden, std::string("golden mismatch: ") + c.file);
    }
    return "6 goldens byte-identical (vanilla winner/loser + eval, both orders)";
}

// ---- criterion 6: sampler exactness ----------------------------------------

std::string criterion_sampler() {
    auto eligible = load_bundled_eligible();
    auto sample = corpus::sample_balanced(eligible, corpus::default_balanced_quota(), 42);
    require(sample.size() == 1300, "sample size " + std::to_string(sample.size()));

    std::map<std::tuple<int, Side, Side>, long> counts;
    for (const auto& d : sample) ++counts[{d.rounds, d.initiating_side, d.winner}];
    for (int rounds : {3, 4, 5}) {
        long quota = rounds == 5 ? 75 : 125;
        for (Side init : {Side::Pro, Side::Con}) {
            for (Side winner : {Side::Pro, Side::Con}) {
                long got = counts[{rounds, init, winner}];
                require(got == quota, "stratum " + std::to_string(rounds) + "r count " +
                                          std::to_string(got) + " != " + std::to_string(quota));
            }
        }
    }

    auto again = corpus::sample_balanced(eligible, corpus::default_balanced_quota(), 42);
    for (std::size_t i = 0; i < sample.size(); ++i)
        require(sample[i].id == again[i].id, "seed determinism violated at index " +
                                                 std::to_string(i));
    return "125/125/75 per stratum exact, identical id list under seed 42";
}

// ---- criterion 7: weighted F1 vs brute force -------------------------------

std::string criterion_f1_oracle() {
    std::mt19937_64 gen(20240515);
    std::uniform_int_distribution<int> outcome_dist(0, 2);
    std::bernoulli_distribution coin(0.5);
    int checked = 0;
    double worst = 0.0;
    while (checked < 1000) {
        int n = 2 + int(gen() % 60);
        std::vector<judge::RunRecord> records;
        std::vector<oracles::LabeledPair> pairs;
        bool has_pro = false, has_con = false;
        for (int i = 0; i < n; ++i) {
            bool truth_pro = coin(gen);
            int predicted = outcome_dist(gen);
            has_pro = has_pro || truth_pro;
            has_con = has_con || !truth_pro;
            judge::RunRecord r;
            r.debate_id = "f" + std::to_string(i);
            r.truth = truth_pro ? Side::Pro : Side::Con;
            r.verdict.predicted = predicted == 0   ? Outcome::Pro
                                  : predicted == 1 ? Outcome::Con
                                                   : Outcome::Invalid;
            records.push_back(std::move(r));
            pairs.push_back({truth_pro, predicted});
        }
        if (!has_pro || !has_con) continue;
        double ours = metrics::weighted_f1(metrics::confusion(records));
        double oracle = oracles::weighted_f1(pairs);
        worst = std::max(worst, std::fabs(ours - oracle));
        require(std::fabs(ours - oracle) <= 1e-12,
                "weighted F1 deviates from oracle by " + fmt(std::fabs(ours - oracle), 16));
        ++checked;
    }
    return "1000 random fixtures, max |deviation| " + fmt(worst, 16);
}

// ---- criterion 8: rule-based identity ---------------------------------------

std::string criterion_rule_based() {
    auto templates = prompt::TemplateSet::load(TEMPLATE_DIR);
    std::mt19937_64 gen(777);
    judge::RuleBasedJudge rule;
    for (int trial = 0; trial < 25; ++trial) {
        auto debates = corpus::filter_eligible(fixtures::random_corpus(gen, 120), {});
        if (debates.size() < 10) continue;
        auto records = judge::run_experiment(rule, debates, harness::condition(
                                                 "A/B", design::PositionPolicy::FixedProFirst),
                                             trial, templates);
        double accuracy = metrics::accuracy(metrics::confusion(records));
        long concluder_won = 0;
        for (const auto& d : debates) concluder_won += d.concluding_side == d.winner ? 1 : 0;
        double fraction = double(concluder_won) / double(debates.size());
        require(accuracy == fraction, "accuracy " + fmt(accuracy, 12) + " != concluder fraction " +
                                          fmt(fraction, 12));
    }
    return "exact equality with the concluding-side-wins fraction on 25 random corpora";
}

// ---- criterion 9: end-to-end smoke -----------------------------------------

std::string criterion_smoke() {
    auto start = Clock::now();
    auto out_dir = std::filesystem::temp_directory_path() / "da_acceptance_smoke";
    std::filesystem::remove_all(out_dir);
    std::filesystem::create_directories(out_dir);

    nlohmann::json manifest{
        {"corpus", std::string(DATA_DIR) + "/synthetic_corpus.jsonl"},
        {"format", "jsonl"},
        {"templates_dir", TEMPLATE_DIR},
        {"output_dir", out_dir.string()},
        {"sample", {{"mode", "balanced"}, {"seed", 42}}},
        {"backend",
         {{"kind", "mock"},
          {"mock",
           {{"beta_position_second", 0.5},
            {"beta_order_concluder", 0.4},
            {"beta_truth", 1.0},
            {"beta_label", {{"B", 0.3}}},
            {"noise_seed", 7}}}}},
        {"conditions",
         nlohmann::json::array(
             {{{"name", "ab_pro_first"}, {"verbalizer", "A/B"}, {"policy", "FixedProFirst"},
               {"seed", 101}},
              {{"name", "ab_con_first"}, {"verbalizer", "A/B"}, {"policy", "FixedConFirst"},
               {"seed", 102}},
              {{"name", "ab_shuffled"}, {"verbalizer", "A/B"}, {"policy", "ShuffledPositions"},
               {"seed", 103}},
              {{"name", "ba_shuffled"}, {"verbalizer", "B/A"}, {"policy", "ShuffledPositions"},
               {"seed", 103}},
              {{"name", "ab_double"}, {"verbalizer", "A/B"}, {"policy", "DoubleShuffled"},
               {"seed", 104}},
              {{"name", "ab_loser"}, {"verbalizer", "A/B"}, {"policy", "FixedProFirst"},
               {"question", "Loser"}, {"seed", 105}}})},
        {"analyses",
         {{"positional",
           {{"unpaired_runs", nlohmann::json::array({"ab_pro_first", "ab_con_first"})},
            {"paired",
             {{"fixed", "ab_pro_first"}, {"shuffled", "ab_shuffled"}, {"correction", false}}}}},
          {"lexical", nlohmann::json::array({{{"first", "ab_shuffled"}, {"second", "ba_shuffled"},
                                              {"correction", false}}})},
          {"order", {{"run", "ab_pro_first"}, {"yates", true}}},
          {"stance", {{"run", "ab_double"}}},
          {"sensitivity",
           nlohmann::json::array({"ab_pro_first", "ab_loser"})}}}};

    auto manifest_path = out_dir / "manifest.json";
    io::write_text_file(manifest_path, manifest.dump(2) + "\n");

    auto run_stage = [&](const std::string& stage) {
        std::string cmd = std::string(CLI_BIN) + " " + stage + " --manifest " +
                          manifest_path.string() + " >> " + (out_dir / "smoke.log").string() +
                          " 2>&1";
        int status = std::system(cmd.c_str());
        require(status == 0, stage + " exited with status " + std::to_string(status));
    };
    for (const char* stage : {"ingest", "stats", "sample", "plan", "run", "analyze", "report"})
        run_stage(stage);

    // the report must self-verify after deserialization
    auto report_json = nlohmann::json::parse(io::read_text_file(out_dir / "report.json"));
    auto report = io::report_from_json(report_json);
    bias::self_verify(report);
    require(report.positional.has_value() && report.positional->unpaired.has_value(),
            "positional section missing");
    require(report.positional->paired.has_value(), "paired positional section missing");
    require(report.lexical.size() == 1, "lexical section missing");
    require(report.order.has_value(), "order section missing");
    require(report.stance.has_value(), "stance section missing");
    require(report.sensitivity.size() == 2, "sensitivity cells missing");
    require(std::filesystem::exists(out_dir / "report.md"), "markdown missing");
    require(!report.metadata.manifest_digest.empty(), "manifest digest missing from metadata");

    // biased mock at n = 1300: every planted effect should be flagged
    require(report.positional->unpaired->z_test.p_value < 0.01, "positional effect not flagged");
    require(report.lexical[0].mcnemar.p_value < 0.01, "lexical effect not flagged");
    require(report.order->chi_square.p_value < 0.01, "order effect not flagged");

    // rerunning `run` against complete artifacts must not change them
    auto runs_file = out_dir / "runs_ab_pro_first.jsonl";
    auto before = io::read_text_file(runs_file);
    run_stage("run");
    require(io::read_text_file(runs_file) == before, "rerun changed a completed run artifact");

    double elapsed = seconds_since(start);
    require(elapsed < 120.0, "smoke took " + fmt(elapsed) + "s, limit 120s");
    std::filesystem::remove_all(out_dir);
    return "ingest->report on bundled corpus, report self-verified, rerun stable, " +
           fmt(elapsed, 1) + "s";
}

}  // namespace

int main() {
    const Criterion criteria[] = {
        {1, "reference statistics replay", criterion_reference_tables},
        {2, "special functions vs quadrature oracles", criterion_special_functions},
        {3, "null calibration (200 seeds, alpha 0.05)", criterion_null_calibration},
        {4, "power at +0.15 absolute effects (100 seeds)", criterion_power},
        {5, "prompt goldens byte-identical", criterion_goldens},
        {6, "balanced sampler exactness", criterion_sampler},
        {7, "weighted F1 vs brute-force oracle", criterion_f1_oracle},
        {8, "rule-based accuracy identity", criterion_rule_based},
        {9, "end-to-end pipeline smoke", criterion_smoke},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        try {
            std::string detail = c.run();
            std::cout << "[PASS] criterion " << c.number << ": " << c.name << " — " << detail
                      << std::endl;
        } catch (const std::exception& e) {
            ++failures;
            std::cout << "[FAIL] criterion " << c.number << ": " << c.name << " — " << e.what()
                      << std::endl;
        }
    }
    if (failures > 0) {
        std::cout << failures << " criterion(s) failed" << std::endl;
        return 1;
    }
    std::cout << "all 9 criteria passed" << std::endl;
    return 0;
}
