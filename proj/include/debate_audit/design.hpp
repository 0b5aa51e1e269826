#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "debate_audit/errors.hpp"
#include "debate_audit/side.hpp"

namespace debate_audit::design {

class UnknownVerbalizer : public DataError {
public:
    using DataError::DataError;
};

/// A pair of short labels standing in for the Pro and Con sides in prompts.
struct VerbalizerSet {
    std::string name;
    std::string pro_label;
    std::string con_label;
};

/// Validates: labels non-empty, whitespace-free, and distinct even after
/// case folding (the verdict parser matches case-insensitively).
VerbalizerSet make_verbalizer(std::string name, std::string pro_label, std::string con_label);

/// How candidate order (and, for DoubleShuffled, the label-to-side map)
/// varies across the debates of one run.
enum class PositionPolicy { FixedProFirst, FixedConFirst, ShuffledPositions, DoubleShuffled };

enum class OutcomeQuestion { Winner, Loser };

enum class PromptStyle { Vanilla, Eval };

std::string_view to_string(PositionPolicy policy);
std::string_view to_string(OutcomeQuestion question);
std::string_view to_string(PromptStyle style);
PositionPolicy position_policy_from_string(std::string_view name);
OutcomeQuestion outcome_question_from_string(std::string_view name);
PromptStyle prompt_style_from_string(std::string_view name);

/// One experimental condition: which labels, how they move, what is asked.
struct Condition {
    VerbalizerSet verbalizer;
    PositionPolicy policy = PositionPolicy::FixedProFirst;
    OutcomeQuestion question = OutcomeQuestion::Winner;
    PromptStyle style = PromptStyle::Vanilla;
};

/// Per-debate counterbalancing record: the label each side carries and which
/// side is listed first among the instruction's candidate answers.
struct Assignment {
    std::string debate_id;
    std::string pro_label;
    std::string con_label;
    Side first_candidate = Side::Pro;
    std::string verbalizer_name;
    PositionPolicy policy = PositionPolicy::FixedProFirst;
    std::uint64_t seed = 0;

    const std::string& label_of(Side s) const {
        return s == Side::Pro ? pro_label : con_label;
    }
};

/// Generate one assignment per debate id, deterministic in (ids, condition,
/// seed). Shuffled policies counterbalance exactly: a half-Pro-first /
/// half-Con-first template (ceil(n/2) Pro-first) is Fisher-Yates shuffled
/// rather than coin-flipped per debate. DoubleShuffled crosses that with an
/// independent label flip, cell counts n/4 up to rounding.
std::vector<Assignment> assign(const std::vector<std::string>& debate_ids,
                               const Condition& condition, std::uint64_t seed);

/// The built-in label sets: A/B, P/C, 1/-1, Pro/Con, M/N and their reversals.
const std::vector<VerbalizerSet>& builtin_verbalizers();

/// Lookup by stable name ("A/B", "-1/1", ...). Throws UnknownVerbalizer.
const VerbalizerSet& find_verbalizer(std::string_view name);

}  // namespace debate_audit::design
