#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "debate_audit/corpus.hpp"
#include "debate_audit/design.hpp"
#include "debate_audit/prompt.hpp"

namespace debate_audit::judge {

/// Parsed judge decision.
struct Verdict {
    Outcome predicted = Outcome::Invalid;
    std::string raw;
    std::optional<std::string> matched_label;
};

/// Total: never throws, anything that is not exactly one assigned label (after
/// trimming, punctuation stripping and case folding) is Invalid. Eval style
/// applies the same matching to the final non-empty line only.
Verdict parse_verdict(const std::string& raw, const design::Assignment& assignment,
                      design::PromptStyle style);

/// Features a backend may use besides the prompt text. Mock judges decide
/// from these; the remote judge sees only the text.
struct JudgeInput {
    const prompt::RenderedPrompt& prompt;
    Side concluding_side = Side::Con;
    Side truth = Side::Pro;  // the debate's actual winner
    design::OutcomeQuestion question = design::OutcomeQuestion::Winner;
};

struct EvalResult {
    std::string raw;
    bool cached = false;
    long latency_ms = 0;
};

class Judge {
public:
    virtual ~Judge() = default;
    virtual EvalResult evaluate(const JudgeInput& input) = 0;
    /// Stable identity string, part of every cache key.
    virtual std::string identity() const = 0;
};

/// Knobs of the synthetic judge. Each beta shifts one side's logit; the
/// decision is a logistic draw over the two logits, seeded from the prompt
/// hash and noise_seed so identical prompts always get identical verdicts.
struct MockParams {
    double beta_intercept = 0.0;         // base shift on the Con logit
    double beta_position_second = 0.0;   // shift on whichever side is the second candidate
    double beta_order_concluder = 0.0;   // shift on the side that concludes the debate
    double beta_stance_pro = 0.0;        // shift on the Pro logit
    double beta_truth = 0.0;             // shift on the actual winner's logit
    std::map<std::string, double> beta_label;  // lexical pull per label text
    std::uint64_t noise_seed = 0;
};

class MockJudge : public Judge {
public:
    explicit MockJudge(MockParams params);

    EvalResult evaluate(const JudgeInput& input) override;
    std::string identity() const override { return identity_; }

    /// P(predict Con) for the given input, before the random draw.
    double con_probability(const JudgeInput& input) const;

private:
    MockParams params_;
    std::string identity_;
};

/// Baseline that names the concluding side's label as the winner.
class RuleBasedJudge : public Judge {
public:
    EvalResult evaluate(const JudgeInput& input) override;
    std::string identity() const override { return "rule-based:concluder"; }
};

/// Content-addressed response cache: key = sha256(prompt hash, judge
/// identity, template version), value = raw response + metadata. Readers
/// share a lock, writers are serialized.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir);

    static std::string key(const std::string& prompt_hash, const std::string& judge_identity,
                           const std::string& template_version);

    std::optional<std::string> get(const std::string& key) const;
    void put(const std::string& key, const std::string& raw, const std::string& prompt_hash,
             const std::string& judge_identity, const std::string& template_version);

private:
    std::filesystem::path dir_;
    mutable std::shared_mutex mutex_;
};

/// Wraps any judge with the cache. Hits skip the inner judge entirely and
/// come back flagged cached with zero latency.
class CachingJudge : public Judge {
public:
    CachingJudge(Judge& inner, ResponseCache& cache, std::string template_version);

    EvalResult evaluate(const JudgeInput& input) override;
    std::string identity() const override { return inner_.identity(); }

private:
    Judge& inner_;
    ResponseCache& cache_;
    std::string template_version_;
};

/// One (debate, assignment, condition, judge) evaluation.
struct RunRecord {
    std::string debate_id;
    design::Assignment assignment;
    design::OutcomeQuestion question = design::OutcomeQuestion::Winner;
    design::PromptStyle style = design::PromptStyle::Vanilla;
    Verdict verdict;
    Side truth = Side::Pro;
    long latency_ms = 0;
    bool cached = false;
};

struct RunOptions {
    int parallelism = 1;
    /// Called with each record in debate order as soon as it is final, so a
    /// failed run still leaves a persisted prefix.
    std::function<void(const RunRecord&)> sink;
    /// Debate ids to skip (already persisted by an earlier, interrupted run).
    std::vector<std::string> resume_done_ids;
};

class EvaluateFailed : public Error {
public:
    EvaluateFailed(const std::string& debate_id, const std::string& what)
        : Error("evaluating debate '" + debate_id + "': " + what), debate_id(debate_id) {}

    std::string debate_id;
};

/// Assign, render, evaluate and parse for every debate. Deterministic for
/// pure backends; remote evaluations may run `parallelism` at a time but
/// records always come back in debate order.
std::vector<RunRecord> run_experiment(Judge& judge, const std::vector<corpus::Debate>& debates,
                                      const design::Condition& condition, std::uint64_t seed,
                                      const prompt::TemplateSet& templates,
                                      const RunOptions& options = {});

}  // namespace debate_audit::judge
