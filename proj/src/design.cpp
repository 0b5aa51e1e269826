#include "debate_audit/design.hpp"

#include <algorithm>
#include <cctype>

#include "debate_audit/rng.hpp"

namespace debate_audit::design {

namespace {

std::string fold_case(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool has_whitespace(std::string_view s) {
    return std::any_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

VerbalizerSet make_verbalizer(std::string name, std::string pro_label, std::string con_label) {
    if (pro_label.empty() || con_label.empty())
        throw DataError("verbalizer '" + name + "': labels must be non-empty");
    if (has_whitespace(pro_label) || has_whitespace(con_label))
        throw DataError("verbalizer '" + name + "': labels must not contain whitespace");
    if (fold_case(pro_label) == fold_case(con_label))
        throw DataError("verbalizer '" + name + "': labels must differ (case-insensitively)");
    return {std::move(name), std::move(pro_label), std::move(con_label)};
}

std::string_view to_string(PositionPolicy policy) {
    switch (policy) {
        case PositionPolicy::FixedProFirst: return "FixedProFirst";
        case PositionPolicy::FixedConFirst: return "FixedConFirst";
        case PositionPolicy::ShuffledPositions: return "ShuffledPositions";
        default: return "DoubleShuffled";
    }
}

std::string_view to_string(OutcomeQuestion question) {
    return question == OutcomeQuestion::Winner ? "Winner" : "Loser";
}

std::string_view to_string(PromptStyle style) {
    return style == PromptStyle::Vanilla ? "Vanilla" : "Eval";
}

PositionPolicy position_policy_from_string(std::string_view name) {
    if (name == "FixedProFirst") return PositionPolicy::FixedProFirst;
    if (name == "FixedConFirst") return PositionPolicy::FixedConFirst;
    if (name == "ShuffledPositions") return PositionPolicy::ShuffledPositions;
    if (name == "DoubleShuffled") return PositionPolicy::DoubleShuffled;
    throw DataError("unknown position policy: '" + std::string(name) + "'");
}

OutcomeQuestion outcome_question_from_string(std::string_view name) {
    if (name == "Winner") return OutcomeQuestion::Winner;
    if (name == "Loser") return OutcomeQuestion::Loser;
    throw DataError("unknown outcome question: '" + std::string(name) + "'");
}

PromptStyle prompt_style_from_string(std::string_view name) {
    if (name == "Vanilla") return PromptStyle::Vanilla;
    if (name == "Eval") return PromptStyle::Eval;
    throw DataError("unknown prompt style: '" + std::string(name) + "'");
}

namespace {

struct Cell {
    bool pro_first;
    bool declared_labels;  // declared pro_label still maps to Pro
};

// Exactly counterbalanced template: ceil(n/2) Pro-first, ceil(n/2) with the
// declared label map, and the four position x label cells as equal as the
// remainder allows.
std::vector<Cell> counterbalance_template(std::size_t n, bool flip_labels) {
    std::size_t half = (n + 1) / 2;
    std::size_t c11 = (n + 3) / 4;  // Pro-first with declared labels
    if (!flip_labels) c11 = half;
    std::size_t c12 = half - c11;            // Pro-first, flipped labels
    std::size_t c21 = flip_labels ? half - c11 : n - half;  // Con-first, declared
    std::size_t c22 = n - c11 - c12 - c21;   // Con-first, flipped

    std::vector<Cell> cells;
    cells.reserve(n);
    for (std::size_t i = 0; i < c11; ++i) cells.push_back({true, true});
    for (std::size_t i = 0; i < c12; ++i) cells.push_back({true, false});
    for (std::size_t i = 0; i < c21; ++i) cells.push_back({false, true});
    for (std::size_t i = 0; i < c22; ++i) cells.push_back({false, false});
    return cells;
}

}  // namespace

std::vector<Assignment> assign(const std::vector<std::string>& debate_ids,
                               const Condition& condition, std::uint64_t seed) {
    if (debate_ids.empty()) throw DataError("assign: empty debate id list");

    const auto& v = condition.verbalizer;
    std::vector<Cell> cells;
    switch (condition.policy) {
        case PositionPolicy::FixedProFirst:
            cells.assign(debate_ids.size(), {true, true});
            break;
        case PositionPolicy::FixedConFirst:
            cells.assign(debate_ids.size(), {false, true});
            break;
        case PositionPolicy::ShuffledPositions:
            cells = counterbalance_template(debate_ids.size(), false);
            break;
        case PositionPolicy::DoubleShuffled:
            cells = counterbalance_template(debate_ids.size(), true);
            break;
    }
    if (condition.policy == PositionPolicy::ShuffledPositions ||
        condition.policy == PositionPolicy::DoubleShuffled) {
        rng::Engine engine(seed);
        rng::fisher_yates(cells, engine);
    }

    std::vector<Assignment> out;
    out.reserve(debate_ids.size());
    for (std::size_t i = 0; i < debate_ids.size(); ++i) {
        Assignment a;
        a.debate_id = debate_ids[i];
        a.pro_label = cells[i].declared_labels ? v.pro_label : v.con_label;
        a.con_label = cells[i].declared_labels ? v.con_label : v.pro_label;
        a.first_candidate = cells[i].pro_first ? Side::Pro : Side::Con;
        a.verbalizer_name = v.name;
        a.policy = condition.policy;
        a.seed = seed;
        out.push_back(std::move(a));
    }
    return out;
}

const std::vector<VerbalizerSet>& builtin_verbalizers() {
    static const std::vector<VerbalizerSet> sets = [] {
        std::vector<VerbalizerSet> v;
        auto add_pair = [&v](const std::string& x, const std::string& y) {
            v.push_back(make_verbalizer(x + "/" + y, x, y));
            v.push_back(make_verbalizer(y + "/" + x, y, x));
        };
        add_pair("A", "B");
        add_pair("P", "C");
        add_pair("1", "-1");
        add_pair("Pro", "Con");
        add_pair("M", "N");
        return v;
    }();
    return sets;
}

const VerbalizerSet& find_verbalizer(std::string_view name) {
    for (const auto& v : builtin_verbalizers()) {
        if (v.name == name) return v;
    }
    throw UnknownVerbalizer("unknown verbalizer set: '" + std::string(name) + "'");
}

}  // namespace debate_audit::design
