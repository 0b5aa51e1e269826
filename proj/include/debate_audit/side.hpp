#pragma once

#include <string>
#include <string_view>

#include "debate_audit/errors.hpp"

namespace debate_audit {

/// The two sides of a debate.
enum class Side { Pro, Con };

/// A parsed judge decision. Invalid means the response matched neither label.
enum class Outcome { Pro, Con, Invalid };

inline Side opposite(Side s) {
    return s == Side::Pro ? Side::Con : Side::Pro;
}

inline std::string_view to_string(Side s) {
    return s == Side::Pro ? "Pro" : "Con";
}

inline std::string_view to_string(Outcome o) {
    switch (o) {
        case Outcome::Pro: return "Pro";
        case Outcome::Con: return "Con";
        default: return "Invalid";
    }
}

inline Side side_from_string(std::string_view text) {
    if (text == "Pro") return Side::Pro;
    if (text == "Con") return Side::Con;
    throw DataError("not a side: '" + std::string(text) + "' (expected Pro or Con)");
}

inline Outcome outcome_from_string(std::string_view text) {
    if (text == "Pro") return Outcome::Pro;
    if (text == "Con") return Outcome::Con;
    if (text == "Invalid") return Outcome::Invalid;
    throw DataError("not an outcome: '" + std::string(text) + "'");
}

inline Outcome to_outcome(Side s) {
    return s == Side::Pro ? Outcome::Pro : Outcome::Con;
}

}  // namespace debate_audit
