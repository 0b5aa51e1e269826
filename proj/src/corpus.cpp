#include "debate_audit/corpus.hpp"

#include <algorithm>
#include <istream>
#include <sstream>

#include <json.hpp>

#include "debate_audit/rng.hpp"

namespace debate_audit::corpus {

using nlohmann::json;

InsufficientStratum::InsufficientStratum(int round_count_, std::string stratum_, long available_,
                                         long requested_)
    : DataError("insufficient stratum: " + std::to_string(round_count_) + "-round " + stratum_ +
                " has " + std::to_string(available_) + " debates, need " +
                std::to_string(requested_)),
      round_count(round_count_),
      stratum(std::move(stratum_)),
      available(available_),
      requested(requested_) {}

InsufficientDebates::InsufficientDebates(int round_count_, long available_, long requested_)
    : DataError("insufficient debates: " + std::to_string(round_count_) + "-round count has " +
                std::to_string(available_) + " debates, need " + std::to_string(requested_)),
      round_count(round_count_),
      available(available_),
      requested(requested_) {}

namespace {

std::string trim(std::string_view s) {
    std::size_t begin = s.find_first_not_of(" \t\r\n\f\v");
    if (begin == std::string_view::npos) return {};
    std::size_t end = s.find_last_not_of(" \t\r\n\f\v");
    return std::string(s.substr(begin, end - begin + 1));
}

std::string normalize_newlines(std::string s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\r') {
            if (i + 1 < s.size() && s[i + 1] == '\n') continue;
            out.push_back('\n');
        } else {
            out.push_back(s[i]);
        }
    }
    return out;
}

long count_words(std::string_view s) {
    long words = 0;
    bool in_word = false;
    for (char c : s) {
        bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
        if (!space && !in_word) ++words;
        in_word = !space;
    }
    return words;
}

}  // namespace

Debate make_debate(std::string id, std::string topic, std::vector<RawUtterance> raw, Side winner,
                   long vote_difference, bool forfeited) {
    if (raw.empty()) throw DataError("debate has no utterances");
    if (raw.size() % 2 != 0)
        throw DataError("odd utterance count (" + std::to_string(raw.size()) +
                        "); rounds need one utterance per side");
    if (vote_difference < 0) throw DataError("negative vote_difference");

    Debate d;
    d.id = std::move(id);
    d.topic = std::move(topic);
    d.winner = winner;
    d.vote_difference = vote_difference;
    d.forfeited = forfeited;
    d.utterances.reserve(raw.size());

    for (std::size_t i = 0; i < raw.size(); ++i) {
        std::string text = trim(normalize_newlines(std::move(raw[i].text)));
        if (text.empty())
            throw DataError("empty utterance at index " + std::to_string(i));
        if (i > 0 && raw[i].side == raw[i - 1].side)
            throw DataError("sides do not alternate at index " + std::to_string(i));
        Utterance u;
        u.side = raw[i].side;
        u.text = std::move(text);
        u.round_index = static_cast<int>(i / 2) + 1;
        d.word_count += count_words(u.text);
        d.utterances.push_back(std::move(u));
    }

    d.rounds = static_cast<int>(d.utterances.size() / 2);
    d.initiating_side = d.utterances.front().side;
    d.concluding_side = d.utterances.back().side;
    return d;
}

CorpusFormat format_from_string(std::string_view name) {
    if (name == "jsonl") return CorpusFormat::Jsonl;
    if (name == "csv") return CorpusFormat::Csv;
    throw DataError("unknown corpus format: '" + std::string(name) + "' (expected jsonl or csv)");
}

namespace {

DiagnosticKind classify(const std::string& reason) {
    if (reason.find("do not alternate") != std::string::npos)
        return DiagnosticKind::NonAlternatingSides;
    if (reason.find("empty utterance") != std::string::npos) return DiagnosticKind::EmptyUtterance;
    return DiagnosticKind::MalformedRecord;
}

void add_diagnostic(ParseResult& result, long line, std::string id, const std::string& reason) {
    ParseDiagnostic diag;
    diag.kind = classify(reason);
    diag.line = line;
    diag.debate_id = std::move(id);
    diag.reason = reason;
    if (diag.kind == DiagnosticKind::EmptyUtterance) {
        auto pos = reason.find_last_of(' ');
        if (pos != std::string::npos) diag.utterance_index = std::atoi(reason.c_str() + pos + 1);
    }
    result.diagnostics.push_back(std::move(diag));
}

void parse_jsonl(std::istream& input, ParseResult& result) {
    std::string line;
    long line_no = 0;
    while (std::getline(input, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::string id;
        try {
            json record = json::parse(line);
            id = record.at("id").get<std::string>();
            std::vector<RawUtterance> raw;
            for (const auto& u : record.at("utterances")) {
                raw.push_back({side_from_string(u.at("side").get<std::string>()),
                               u.at("text").get<std::string>()});
            }
            result.debates.push_back(make_debate(
                id, record.value("topic", std::string{}), std::move(raw),
                side_from_string(record.at("winner").get<std::string>()),
                record.at("vote_difference").get<long>(), record.at("forfeited").get<bool>()));
        } catch (const json::exception& e) {
            add_diagnostic(result, line_no, id, std::string("invalid record: ") + e.what());
        } catch (const DataError& e) {
            add_diagnostic(result, line_no, id, e.what());
        }
    }
}

struct CsvRow {
    std::vector<std::string> fields;
    long line = 0;  // line where the row started
};

// RFC-4180-ish reader: quoted fields may contain commas, newlines and
// doubled quotes. Returns false at end of input.
bool read_csv_row(std::istream& input, long& line_no, CsvRow& row) {
    row.fields.clear();
    int c = input.peek();
    if (c == EOF) return false;
    ++line_no;
    row.line = line_no;

    std::string field;
    bool quoted = false;
    bool any = false;
    while ((c = input.get()) != EOF) {
        any = true;
        char ch = static_cast<char>(c);
        if (quoted) {
            if (ch == '"') {
                if (input.peek() == '"') {
                    field.push_back('"');
                    input.get();
                } else {
                    quoted = false;
                }
            } else {
                if (ch == '\n') ++line_no;
                field.push_back(ch);
            }
        } else if (ch == '"' && field.empty()) {
            quoted = true;
        } else if (ch == ',') {
            row.fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            break;
        } else if (ch != '\r') {
            field.push_back(ch);
        }
    }
    if (!any) return false;
    row.fields.push_back(std::move(field));
    return true;
}

struct PendingDebate {
    std::string id;
    std::string topic;
    std::vector<RawUtterance> utterances;
    Side winner = Side::Pro;
    long vote_difference = 0;
    bool forfeited = false;
    long first_line = 0;
};

void flush_pending(PendingDebate& pending, ParseResult& result) {
    if (pending.id.empty()) return;
    try {
        result.debates.push_back(make_debate(pending.id, pending.topic,
                                             std::move(pending.utterances), pending.winner,
                                             pending.vote_difference, pending.forfeited));
    } catch (const DataError& e) {
        add_diagnostic(result, pending.first_line, pending.id, e.what());
    }
    pending = PendingDebate{};
}

void parse_csv(std::istream& input, ParseResult& result) {
    long line_no = 0;
    CsvRow row;
    if (!read_csv_row(input, line_no, row)) return;  // header (or empty file)

    PendingDebate pending;
    std::vector<std::string> finished_ids;
    std::string poisoned_id;  // rows of a rejected record are consumed silently
    while (read_csv_row(input, line_no, row)) {
        if (row.fields.size() == 1 && trim(row.fields[0]).empty()) continue;
        if (row.fields.size() != 7) {
            add_diagnostic(result, row.line, "",
                           "expected 7 fields, got " + std::to_string(row.fields.size()));
            continue;
        }
        const std::string& id = row.fields[0];
        if (!poisoned_id.empty() && id == poisoned_id) continue;
        try {
            if (id != pending.id) {
                flush_pending(pending, result);
                if (std::find(finished_ids.begin(), finished_ids.end(), id) != finished_ids.end())
                    throw DataError("rows for debate '" + id + "' are not contiguous");
                finished_ids.push_back(id);
                pending.id = id;
                pending.topic = row.fields[1];
                pending.winner = side_from_string(trim(row.fields[4]));
                pending.vote_difference = std::stol(trim(row.fields[5]));
                std::string forfeited = trim(row.fields[6]);
                if (forfeited != "true" && forfeited != "false")
                    throw DataError("forfeited must be true or false, got '" + forfeited + "'");
                pending.forfeited = forfeited == "true";
                pending.first_line = row.line;
            }
            pending.utterances.push_back({side_from_string(trim(row.fields[2])), row.fields[3]});
        } catch (const std::exception& e) {
            add_diagnostic(result, row.line, id, e.what());
            pending = PendingDebate{};
            poisoned_id = id;
        }
    }
    flush_pending(pending, result);
}

}  // namespace

ParseResult parse_corpus(std::istream& input, CorpusFormat format) {
    ParseResult result;
    if (format == CorpusFormat::Jsonl) {
        parse_jsonl(input, result);
    } else {
        parse_csv(input, result);
    }
    return result;
}

std::vector<Debate> filter_eligible(const std::vector<Debate>& debates,
                                    const EligibilityRule& rule) {
    if (rule.min_rounds > rule.max_rounds)
        throw DataError("eligibility rule: min_rounds exceeds max_rounds");
    if (rule.min_vote_difference_exclusive < 0)
        throw DataError("eligibility rule: negative vote-difference threshold");
    std::vector<Debate> out;
    for (const auto& d : debates) {
        if (d.rounds < rule.min_rounds || d.rounds > rule.max_rounds) continue;
        if (d.vote_difference <= rule.min_vote_difference_exclusive) continue;
        if (rule.exclude_forfeits && d.forfeited) continue;
        out.push_back(d);
    }
    return out;
}

CorpusStats corpus_stats(const std::vector<Debate>& debates) {
    if (debates.empty()) throw EmptyCorpus("corpus_stats: empty corpus");

    CorpusStats stats;
    stats.debate_count = static_cast<long>(debates.size());
    long total_words = 0;
    std::map<int, long> con_concluding, con_winning;
    for (const auto& d : debates) {
        total_words += d.word_count;
        auto& rs = stats.per_round[d.rounds];
        ++rs.count;
        if (d.concluding_side == Side::Con) ++con_concluding[d.rounds];
        if (d.winner == Side::Con) ++con_winning[d.rounds];
    }
    stats.mean_word_count = double(total_words) / double(stats.debate_count);
    for (auto& [rounds, rs] : stats.per_round) {
        rs.fraction_con_concluding = double(con_concluding[rounds]) / double(rs.count);
        rs.fraction_con_winning = double(con_winning[rounds]) / double(rs.count);
    }
    return stats;
}

std::map<int, long> default_balanced_quota() {
    return {{3, 125}, {4, 125}, {5, 75}};
}

namespace {

std::vector<const Debate*> sorted_by_id(std::vector<const Debate*> v) {
    std::stable_sort(v.begin(), v.end(),
                     [](const Debate* a, const Debate* b) { return a->id < b->id; });
    return v;
}

std::vector<const Debate*> take_shuffled(std::vector<const Debate*> members, long quota,
                                         rng::Engine& engine) {
    members = sorted_by_id(std::move(members));
    rng::fisher_yates(members, engine);
    members.resize(static_cast<std::size_t>(quota));
    return members;
}

std::string stratum_name(Side initiating, Side winner) {
    return std::string(to_string(initiating)) + "-initiates/" + std::string(to_string(winner)) +
           "-wins";
}

}  // namespace

std::vector<Debate> sample_balanced(const std::vector<Debate>& debates,
                                    const std::map<int, long>& per_round_quota,
                                    std::uint64_t seed) {
    struct Key {
        int rounds;
        Side initiating;
        Side winner;
        bool operator<(const Key& o) const {
            return std::tie(rounds, initiating, winner) < std::tie(o.rounds, o.initiating, o.winner);
        }
    };
    std::map<Key, std::vector<const Debate*>> strata;
    for (const auto& d : debates) {
        if (per_round_quota.count(d.rounds))
            strata[{d.rounds, d.initiating_side, d.winner}].push_back(&d);
    }

    rng::Engine engine(seed);
    std::vector<Debate> sample;
    for (const auto& [rounds, quota] : per_round_quota) {
        if (quota == 0) continue;
        for (Side initiating : {Side::Pro, Side::Con}) {
            for (Side winner : {Side::Pro, Side::Con}) {
                auto it = strata.find({rounds, initiating, winner});
                long available = it == strata.end() ? 0 : static_cast<long>(it->second.size());
                if (available < quota)
                    throw InsufficientStratum(rounds, stratum_name(initiating, winner), available,
                                              quota);
                for (const Debate* d : take_shuffled(it->second, quota, engine))
                    sample.push_back(*d);
            }
        }
    }
    return sample;
}

std::vector<Debate> sample_unbalanced(const std::vector<Debate>& debates, long per_round_count,
                                      std::uint64_t seed) {
    if (per_round_count == 0) return {};
    std::map<int, std::vector<const Debate*>> by_rounds;
    for (const auto& d : debates) by_rounds[d.rounds].push_back(&d);

    rng::Engine engine(seed);
    std::vector<Debate> sample;
    for (auto& [rounds, members] : by_rounds) {
        if (static_cast<long>(members.size()) < per_round_count)
            throw InsufficientDebates(rounds, static_cast<long>(members.size()), per_round_count);
        for (const Debate* d : take_shuffled(members, per_round_count, engine)) sample.push_back(*d);
    }
    return sample;
}

}  // namespace debate_audit::corpus
