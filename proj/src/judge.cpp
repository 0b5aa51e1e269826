#include "debate_audit/judge.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <future>
#include <sstream>

#include <json.hpp>

#include "debate_audit/rng.hpp"
#include "debate_audit/sha256.hpp"

namespace debate_audit::judge {

using nlohmann::json;

namespace {

bool is_strippable(char c) {
    static const std::string chars = ".,:;!?'\"`()[]{}<>*";
    return chars.find(c) != std::string::npos;
}

std::string fold_case(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string trim(std::string_view s) {
    std::size_t begin = s.find_first_not_of(" \t\r\n\f\v");
    if (begin == std::string_view::npos) return {};
    std::size_t end = s.find_last_not_of(" \t\r\n\f\v");
    return std::string(s.substr(begin, end - begin + 1));
}

std::string final_non_empty_line(const std::string& text) {
    std::size_t end = text.size();
    while (end > 0) {
        std::size_t start = text.find_last_of('\n', end - 1);
        std::size_t line_begin = start == std::string::npos ? 0 : start + 1;
        std::string line = trim(std::string_view(text).substr(line_begin, end - line_begin));
        if (!line.empty()) return line;
        if (start == std::string::npos) break;
        end = start;
    }
    return {};
}

// Match against the labels before stripping anything, then peel punctuation
// one character at a time. Labels like "-1" would be destroyed by a blind
// strip, so every intermediate form gets its own comparison.
std::optional<Side> match_label(std::string candidate, const design::Assignment& assignment) {
    const std::string pro = fold_case(assignment.pro_label);
    const std::string con = fold_case(assignment.con_label);
    while (!candidate.empty()) {
        std::string folded = fold_case(trim(candidate));
        if (folded == pro) return Side::Pro;
        if (folded == con) return Side::Con;
        if (!candidate.empty() && is_strippable(candidate.back())) {
            candidate.pop_back();
        } else if (!candidate.empty() && is_strippable(candidate.front())) {
            candidate.erase(candidate.begin());
        } else {
            break;
        }
    }
    return std::nullopt;
}

}  // namespace

Verdict parse_verdict(const std::string& raw, const design::Assignment& assignment,
                      design::PromptStyle style) {
    Verdict v;
    v.raw = raw;
    std::string candidate =
        style == design::PromptStyle::Eval ? final_non_empty_line(raw) : trim(raw);
    if (auto side = match_label(std::move(candidate), assignment)) {
        v.predicted = to_outcome(*side);
        v.matched_label = assignment.label_of(*side);
    }
    return v;
}

MockJudge::MockJudge(MockParams params) : params_(std::move(params)) {
    // identity covers every decision-relevant knob
    json desc{{"intercept", params_.beta_intercept},
              {"position_second", params_.beta_position_second},
              {"order_concluder", params_.beta_order_concluder},
              {"stance_pro", params_.beta_stance_pro},
              {"truth", params_.beta_truth},
              {"labels", params_.beta_label},
              {"noise_seed", params_.noise_seed}};
    identity_ = "mock:" + sha256_hex(desc.dump()).substr(0, 12);
}

double MockJudge::con_probability(const JudgeInput& input) const {
    const design::Assignment& a = input.prompt.assignment;
    double pro_logit = params_.beta_stance_pro;
    double con_logit = params_.beta_intercept;

    double& second_logit =
        a.first_candidate == Side::Pro ? con_logit : pro_logit;
    second_logit += params_.beta_position_second;

    double& concluder_logit =
        input.concluding_side == Side::Con ? con_logit : pro_logit;
    concluder_logit += params_.beta_order_concluder;

    double& truth_logit = input.truth == Side::Con ? con_logit : pro_logit;
    truth_logit += params_.beta_truth;

    if (auto it = params_.beta_label.find(a.pro_label); it != params_.beta_label.end())
        pro_logit += it->second;
    if (auto it = params_.beta_label.find(a.con_label); it != params_.beta_label.end())
        con_logit += it->second;

    double delta = con_logit - pro_logit;
    if (std::isinf(delta)) return delta > 0 ? 1.0 : 0.0;
    return 1.0 / (1.0 + std::exp(-delta));
}

EvalResult MockJudge::evaluate(const JudgeInput& input) {
    // One deterministic draw per (prompt, noise_seed): a judge at fixed
    // settings answers the same prompt the same way every time.
    std::string draw_key = std::to_string(params_.noise_seed);
    draw_key += ':';
    draw_key += input.prompt.content_hash;
    rng::Engine engine(sha256_prefix64(draw_key));

    Side believed_winner =
        engine.unit() < con_probability(input) ? Side::Con : Side::Pro;
    // answer the question that was asked
    Side named = input.question == design::OutcomeQuestion::Winner ? believed_winner
                                                                   : opposite(believed_winner);
    return {input.prompt.assignment.label_of(named), false, 0};
}

EvalResult RuleBasedJudge::evaluate(const JudgeInput& input) {
    return {input.prompt.assignment.label_of(input.concluding_side), false, 0};
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
}

std::string ResponseCache::key(const std::string& prompt_hash, const std::string& judge_identity,
                               const std::string& template_version) {
    return sha256_hex(prompt_hash + "\n" + judge_identity + "\n" + template_version);
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
    std::shared_lock lock(mutex_);
    std::ifstream in(dir_ / (key + ".json"), std::ios::binary);
    if (!in) return std::nullopt;
    try {
        json entry = json::parse(in);
        return entry.at("raw").get<std::string>();
    } catch (const json::exception&) {
        return std::nullopt;  // corrupt entry behaves like a miss
    }
}

void ResponseCache::put(const std::string& key, const std::string& raw,
                        const std::string& prompt_hash, const std::string& judge_identity,
                        const std::string& template_version) {
    json entry{{"raw", raw},
               {"prompt_hash", prompt_hash},
               {"judge", judge_identity},
               {"template_version", template_version}};
    std::unique_lock lock(mutex_);
    std::filesystem::path tmp = dir_ / (key + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << entry.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, dir_ / (key + ".json"));
}

CachingJudge::CachingJudge(Judge& inner, ResponseCache& cache, std::string template_version)
    : inner_(inner), cache_(cache), template_version_(std::move(template_version)) {}

EvalResult CachingJudge::evaluate(const JudgeInput& input) {
    std::string key =
        ResponseCache::key(input.prompt.content_hash, inner_.identity(), template_version_);
    if (auto hit = cache_.get(key)) return {*hit, true, 0};
    EvalResult result = inner_.evaluate(input);
    cache_.put(key, result.raw, input.prompt.content_hash, inner_.identity(), template_version_);
    return result;
}

std::vector<RunRecord> run_experiment(Judge& judge, const std::vector<corpus::Debate>& debates,
                                      const design::Condition& condition, std::uint64_t seed,
                                      const prompt::TemplateSet& templates,
                                      const RunOptions& options) {
    std::vector<std::string> ids;
    ids.reserve(debates.size());
    for (const auto& d : debates) ids.push_back(d.id);
    std::vector<design::Assignment> assignments = design::assign(ids, condition, seed);

    auto evaluate_one = [&](std::size_t i) -> RunRecord {
        const corpus::Debate& debate = debates[i];
        prompt::RenderedPrompt rendered = prompt::render_full(
            debate, assignments[i], condition.question, condition.style, templates);
        JudgeInput input{rendered, debate.concluding_side, debate.winner, condition.question};
        EvalResult eval;
        try {
            eval = judge.evaluate(input);
        } catch (const std::exception& e) {
            throw EvaluateFailed(debate.id, e.what());
        }
        RunRecord record;
        record.debate_id = debate.id;
        record.assignment = assignments[i];
        record.question = condition.question;
        record.style = condition.style;
        record.verdict = parse_verdict(eval.raw, assignments[i], condition.style);
        record.truth = debate.winner;
        record.latency_ms = eval.latency_ms;
        record.cached = eval.cached;
        return record;
    };

    const auto& done = options.resume_done_ids;
    auto already_done = [&](const std::string& id) {
        return std::find(done.begin(), done.end(), id) != done.end();
    };

    std::vector<RunRecord> records;
    records.reserve(debates.size());
    auto emit = [&](RunRecord record) {
        if (options.sink) options.sink(record);
        records.push_back(std::move(record));
    };

    if (options.parallelism <= 1) {
        for (std::size_t i = 0; i < debates.size(); ++i) {
            if (already_done(debates[i].id)) continue;
            emit(evaluate_one(i));
        }
        return records;
    }

    // Window of in-flight evaluations; results are consumed in debate order
    // so sinks see a contiguous, replayable prefix even on failure.
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < debates.size(); ++i)
        if (!already_done(debates[i].id)) pending.push_back(i);

    std::size_t window = static_cast<std::size_t>(options.parallelism);
    std::vector<std::future<RunRecord>> in_flight;
    std::size_t next = 0;
    while (next < pending.size() || !in_flight.empty()) {
        while (next < pending.size() && in_flight.size() < window) {
            std::size_t index = pending[next++];
            in_flight.push_back(
                std::async(std::launch::async, [&, index] { return evaluate_one(index); }));
        }
        emit(in_flight.front().get());
        in_flight.erase(in_flight.begin());
    }
    return records;
}

}  // namespace debate_audit::judge
