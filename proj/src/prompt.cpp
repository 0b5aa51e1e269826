#include "debate_audit/prompt.hpp"

#include <fstream>
#include <sstream>

#include "debate_audit/sha256.hpp"

namespace debate_audit::prompt {

namespace {

std::string read_template_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read template file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();

    std::string normalized;
    normalized.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\r') {
            if (i + 1 < text.size() && text[i + 1] == '\n') continue;
            normalized.push_back('\n');
        } else {
            normalized.push_back(text[i]);
        }
    }
    while (!normalized.empty() && normalized.back() == '\n') normalized.pop_back();
    return normalized;
}

}  // namespace

TemplateSet TemplateSet::load(const std::filesystem::path& dir) {
    TemplateSet t;
    Sha256 digest;
    auto read = [&](const char* name, std::string& into) {
        into = read_template_file(dir / name);
        digest.update(name);
        digest.update(":");
        digest.update(into);
        digest.update("\n");
    };
    read("transcript_preamble.txt", t.transcript_preamble_);
    read("transcript_header.txt", t.transcript_header_);
    read("vanilla_winner.txt", t.vanilla_winner_);
    read("vanilla_loser.txt", t.vanilla_loser_);
    read("eval_winner.txt", t.eval_winner_);
    read("eval_loser.txt", t.eval_loser_);

    static const char* hex = "0123456789abcdef";
    auto d = digest.finish();
    for (int i = 0; i < 6; ++i) {
        t.version_.push_back(hex[d[i] >> 4]);
        t.version_.push_back(hex[d[i] & 0xf]);
    }
    return t;
}

const std::string& TemplateSet::instruction(design::PromptStyle style,
                                            design::OutcomeQuestion question) const {
    if (style == design::PromptStyle::Vanilla)
        return question == design::OutcomeQuestion::Winner ? vanilla_winner_ : vanilla_loser_;
    return question == design::OutcomeQuestion::Winner ? eval_winner_ : eval_loser_;
}

std::string substitute(std::string_view text, const std::map<std::string, std::string>& slots) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '{') {
            out.push_back(text[i]);
            ++i;
            continue;
        }
        std::size_t close = text.find('}', i + 1);
        if (close == std::string_view::npos)
            throw DataError("template has an unterminated '{' slot");
        std::string name(text.substr(i + 1, close - i - 1));
        auto it = slots.find(name);
        if (it == slots.end()) throw DataError("template references unknown slot '" + name + "'");
        out += it->second;
        i = close + 1;
    }
    return out;
}

std::string render_transcript(const corpus::Debate& debate, const design::Assignment& assignment,
                              const TemplateSet& templates) {
    std::string out = templates.transcript_preamble();
    for (const auto& u : debate.utterances) {
        out += "\n\n";
        out += substitute(templates.transcript_header(), {{"label", assignment.label_of(u.side)}});
        out += "\n\n";
        out += u.text;
    }
    return out;
}

std::string render_instruction(const design::Assignment& assignment,
                               design::OutcomeQuestion question, design::PromptStyle style,
                               const TemplateSet& templates) {
    const std::string& first = assignment.label_of(assignment.first_candidate);
    const std::string& second = assignment.label_of(opposite(assignment.first_candidate));
    return substitute(templates.instruction(style, question),
                      {{"Side1_label", first}, {"Side2_label", second}});
}

RenderedPrompt render_full(const corpus::Debate& debate, const design::Assignment& assignment,
                           design::OutcomeQuestion question, design::PromptStyle style,
                           const TemplateSet& templates) {
    RenderedPrompt p;
    p.text = render_transcript(debate, assignment, templates);
    p.text += "\n\n";
    p.text += render_instruction(assignment, question, style, templates);
    p.text += '\n';
    p.assignment = assignment;
    p.style = style;
    p.content_hash = sha256_hex(p.text);
    return p;
}

}  // namespace debate_audit::prompt
