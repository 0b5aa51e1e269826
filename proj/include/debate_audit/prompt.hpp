#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "debate_audit/corpus.hpp"
#include "debate_audit/design.hpp"

namespace debate_audit::prompt {

/// The prompt wording lives in versioned text files with named slots, not in
/// string literals, so the exact phrasing stays auditable and swappable.
/// `version` is a digest of the file contents; cache keys include it so
/// template edits invalidate stale responses.
class TemplateSet {
public:
    /// Loads transcript_preamble.txt, transcript_header.txt and one
    /// instruction file per (style, question) from `dir`.
    static TemplateSet load(const std::filesystem::path& dir);

    const std::string& transcript_preamble() const { return transcript_preamble_; }
    const std::string& transcript_header() const { return transcript_header_; }
    const std::string& instruction(design::PromptStyle style,
                                   design::OutcomeQuestion question) const;
    const std::string& version() const { return version_; }

private:
    std::string transcript_preamble_;
    std::string transcript_header_;
    std::string vanilla_winner_;
    std::string vanilla_loser_;
    std::string eval_winner_;
    std::string eval_loser_;
    std::string version_;
};

struct RenderedPrompt {
    std::string text;
    design::Assignment assignment;
    design::PromptStyle style = design::PromptStyle::Vanilla;
    std::string content_hash;  // sha256 hex of text
};

/// Single-pass slot substitution: `{name}` is replaced from `slots`, inserted
/// values are never rescanned. Unknown or unterminated slots throw DataError.
std::string substitute(std::string_view template_text,
                       const std::map<std::string, std::string>& slots);

/// Chronological transcript: preamble, then each utterance under a header
/// line carrying the assignment's label for that utterance's side.
std::string render_transcript(const corpus::Debate& debate, const design::Assignment& assignment,
                              const TemplateSet& templates);

/// Instruction block with Side1_label = label of the first candidate.
/// Candidate order touches only this block, never the transcript.
std::string render_instruction(const design::Assignment& assignment,
                               design::OutcomeQuestion question, design::PromptStyle style,
                               const TemplateSet& templates);

/// Transcript then instruction, blocks separated by blank lines, newline
/// terminated, `\n` endings throughout. The hash is taken after that
/// normalization.
RenderedPrompt render_full(const corpus::Debate& debate, const design::Assignment& assignment,
                           design::OutcomeQuestion question, design::PromptStyle style,
                           const TemplateSet& templates);

}  // namespace debate_audit::prompt
