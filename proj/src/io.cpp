#include "debate_audit/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace debate_audit::io {

using nlohmann::json;

nlohmann::json to_json(const corpus::Debate& d) {
    json utterances = json::array();
    for (const auto& u : d.utterances)
        utterances.push_back({{"side", to_string(u.side)}, {"text", u.text}});
    return json{{"id", d.id},
                {"topic", d.topic},
                {"utterances", std::move(utterances)},
                {"winner", to_string(d.winner)},
                {"vote_difference", d.vote_difference},
                {"forfeited", d.forfeited}};
}

corpus::Debate debate_from_json(const json& j) {
    std::vector<corpus::RawUtterance> raw;
    for (const auto& u : j.at("utterances"))
        raw.push_back({side_from_string(u.at("side").get<std::string>()),
                       u.at("text").get<std::string>()});
    return corpus::make_debate(j.at("id").get<std::string>(),
                               j.value("topic", std::string{}), std::move(raw),
                               side_from_string(j.at("winner").get<std::string>()),
                               j.at("vote_difference").get<long>(),
                               j.at("forfeited").get<bool>());
}

nlohmann::json to_json(const design::Assignment& a) {
    return json{{"debate_id", a.debate_id},
                {"pro_label", a.pro_label},
                {"con_label", a.con_label},
                {"first_candidate", to_string(a.first_candidate)},
                {"verbalizer", a.verbalizer_name},
                {"policy", design::to_string(a.policy)},
                {"seed", a.seed}};
}

design::Assignment assignment_from_json(const json& j) {
    design::Assignment a;
    a.debate_id = j.at("debate_id").get<std::string>();
    a.pro_label = j.at("pro_label").get<std::string>();
    a.con_label = j.at("con_label").get<std::string>();
    a.first_candidate = side_from_string(j.at("first_candidate").get<std::string>());
    a.verbalizer_name = j.at("verbalizer").get<std::string>();
    a.policy = design::position_policy_from_string(j.at("policy").get<std::string>());
    a.seed = j.at("seed").get<std::uint64_t>();
    return a;
}

nlohmann::json to_json(const judge::RunRecord& r) {
    json verdict{{"predicted", to_string(r.verdict.predicted)}, {"raw", r.verdict.raw}};
    if (r.verdict.matched_label) verdict["matched_label"] = *r.verdict.matched_label;
    return json{{"debate_id", r.debate_id},
                {"assignment", to_json(r.assignment)},
                {"question", design::to_string(r.question)},
                {"style", design::to_string(r.style)},
                {"verdict", std::move(verdict)},
                {"truth", to_string(r.truth)},
                {"latency_ms", r.latency_ms},
                {"cached", r.cached}};
}

judge::RunRecord run_record_from_json(const json& j) {
    judge::RunRecord r;
    r.debate_id = j.at("debate_id").get<std::string>();
    r.assignment = assignment_from_json(j.at("assignment"));
    r.question = design::outcome_question_from_string(j.at("question").get<std::string>());
    r.style = design::prompt_style_from_string(j.at("style").get<std::string>());
    const auto& v = j.at("verdict");
    r.verdict.predicted = outcome_from_string(v.at("predicted").get<std::string>());
    r.verdict.raw = v.at("raw").get<std::string>();
    if (v.contains("matched_label")) r.verdict.matched_label = v.at("matched_label");
    r.truth = side_from_string(j.at("truth").get<std::string>());
    r.latency_ms = j.at("latency_ms").get<long>();
    r.cached = j.at("cached").get<bool>();
    return r;
}

nlohmann::json to_json(const corpus::CorpusStats& stats) {
    json per_round = json::object();
    for (const auto& [rounds, rs] : stats.per_round) {
        per_round[std::to_string(rounds)] = {
            {"count", rs.count},
            {"fraction_con_concluding", rs.fraction_con_concluding},
            {"fraction_con_winning", rs.fraction_con_winning}};
    }
    return json{{"debate_count", stats.debate_count},
                {"mean_word_count", stats.mean_word_count},
                {"per_round", std::move(per_round)}};
}

namespace {

json to_json(const stats::TestResult& t) {
    json j{{"statistic", t.statistic},
           {"p_value", t.p_value},
           {"df", t.df},
           {"degenerate", t.degenerate}};
    if (t.effect_size) j["phi"] = *t.effect_size;
    return j;
}

stats::TestResult test_from_json(const json& j) {
    stats::TestResult t;
    t.statistic = j.at("statistic").get<double>();
    t.p_value = j.at("p_value").get<double>();
    t.df = j.at("df").get<int>();
    t.degenerate = j.at("degenerate").get<bool>();
    if (j.contains("phi")) t.effect_size = j.at("phi").get<double>();
    return t;
}

json to_json(const metrics::Proportion& p) {
    return json{{"count", p.count}, {"valid_n", p.valid_n}, {"value", p.value}};
}

metrics::Proportion proportion_from_json(const json& j) {
    metrics::Proportion p;
    p.count = j.at("count").get<long>();
    p.valid_n = j.at("valid_n").get<long>();
    p.value = j.at("value").get<double>();
    return p;
}

json to_json(const metrics::ConfusionMatrix& m) {
    return json{{"tp_pro", m.tp_pro},
                {"fn_pro", m.fn_pro},
                {"fp_pro", m.fp_pro},
                {"tn_pro", m.tn_pro},
                {"invalid_truth_pro", m.invalid_truth_pro},
                {"invalid_truth_con", m.invalid_truth_con}};
}

metrics::ConfusionMatrix confusion_from_json(const json& j) {
    metrics::ConfusionMatrix m;
    m.tp_pro = j.at("tp_pro").get<long>();
    m.fn_pro = j.at("fn_pro").get<long>();
    m.fp_pro = j.at("fp_pro").get<long>();
    m.tn_pro = j.at("tn_pro").get<long>();
    m.invalid_truth_pro = j.at("invalid_truth_pro").get<long>();
    m.invalid_truth_con = j.at("invalid_truth_con").get<long>();
    return m;
}

}  // namespace

nlohmann::json to_json(const bias::BiasReport& report) {
    json j = json::object();

    if (report.positional) {
        json p = json::object();
        if (report.positional->unpaired) {
            const auto& u = *report.positional->unpaired;
            p["unpaired"] = {{"con_when_con_second", to_json(u.con_when_con_second)},
                             {"con_when_con_first", to_json(u.con_when_con_first)},
                             {"z_test", to_json(u.z_test)}};
        }
        if (report.positional->paired) {
            const auto& q = *report.positional->paired;
            p["paired"] = {{"fixed_run", q.fixed_run},
                           {"shuffled_run", q.shuffled_run},
                           {"f12", q.f12},
                           {"f21", q.f21},
                           {"dropped_invalid", q.dropped_invalid},
                           {"continuity_correction", q.continuity_correction},
                           {"mcnemar", to_json(q.mcnemar)}};
        }
        j["positional"] = std::move(p);
    } else {
        j["positional"] = "not run";
    }

    if (!report.lexical.empty()) {
        json pairs = json::array();
        for (const auto& pair : report.lexical) {
            pairs.push_back({{"verbalizer_first", pair.verbalizer_first},
                             {"verbalizer_second", pair.verbalizer_second},
                             {"f12", pair.f12},
                             {"f21", pair.f21},
                             {"dropped_invalid", pair.dropped_invalid},
                             {"continuity_correction", pair.continuity_correction},
                             {"mcnemar", to_json(pair.mcnemar)},
                             {"con_under_first", to_json(pair.con_under_first)},
                             {"con_under_second", to_json(pair.con_under_second)}});
        }
        j["lexical"] = std::move(pairs);
    } else {
        j["lexical"] = "not run";
    }

    if (report.order) {
        const auto& o = *report.order;
        j["order"] = {{"table",
                       {{"end_pro_predicted_pro", o.table.a},
                        {"end_pro_predicted_con", o.table.b},
                        {"end_con_predicted_pro", o.table.c},
                        {"end_con_predicted_con", o.table.d},
                        {"yates_correction", o.table.yates_correction}}},
                      {"dropped_invalid", o.dropped_invalid},
                      {"chi_square", to_json(o.chi_square)}};
    } else {
        j["order"] = "not run";
    }

    if (report.stance) {
        const auto& s = *report.stance;
        j["stance"] = {{"predicted_pro", s.predicted_pro},
                       {"valid_n", s.valid_n},
                       {"proportion", s.proportion},
                       {"vs_half", to_json(s.vs_half)},
                       {"confusion", to_json(s.confusion)}};
    } else {
        j["stance"] = "not run";
    }

    if (!report.sensitivity.empty()) {
        json cells = json::array();
        for (const auto& cell : report.sensitivity) {
            cells.push_back({{"verbalizer", cell.verbalizer},
                             {"question", design::to_string(cell.question)},
                             {"n", cell.n},
                             {"accuracy", cell.accuracy},
                             {"weighted_f1", cell.weighted_f1},
                             {"invalid_rate", cell.invalid_rate},
                             {"best", cell.best},
                             {"worst", cell.worst}});
        }
        j["sensitivity"] = std::move(cells);
    } else {
        j["sensitivity"] = "not run";
    }

    j["metadata"] = {{"seeds", report.metadata.seeds},
                     {"conditions", report.metadata.conditions},
                     {"sample_sizes", report.metadata.sample_sizes},
                     {"correction_flags", report.metadata.correction_flags},
                     {"rng_identity", report.metadata.rng_identity},
                     {"template_version", report.metadata.template_version},
                     {"manifest_digest", report.metadata.manifest_digest}};
    return j;
}

bias::BiasReport report_from_json(const nlohmann::json& j) {
    bias::BiasReport report;

    if (j.contains("positional") && j.at("positional").is_object()) {
        bias::PositionalSection section;
        const auto& p = j.at("positional");
        if (p.contains("unpaired")) {
            bias::UnpairedPositional u;
            u.con_when_con_second = proportion_from_json(p.at("unpaired").at("con_when_con_second"));
            u.con_when_con_first = proportion_from_json(p.at("unpaired").at("con_when_con_first"));
            u.z_test = test_from_json(p.at("unpaired").at("z_test"));
            section.unpaired = std::move(u);
        }
        if (p.contains("paired")) {
            bias::PairedPositional q;
            const auto& pj = p.at("paired");
            q.fixed_run = pj.at("fixed_run").get<std::string>();
            q.shuffled_run = pj.at("shuffled_run").get<std::string>();
            q.f12 = pj.at("f12").get<long>();
            q.f21 = pj.at("f21").get<long>();
            q.dropped_invalid = pj.at("dropped_invalid").get<long>();
            q.continuity_correction = pj.at("continuity_correction").get<bool>();
            q.mcnemar = test_from_json(pj.at("mcnemar"));
            section.paired = std::move(q);
        }
        report.positional = std::move(section);
    }

    if (j.contains("lexical") && j.at("lexical").is_array()) {
        for (const auto& pj : j.at("lexical")) {
            bias::LexicalPair pair;
            pair.verbalizer_first = pj.at("verbalizer_first").get<std::string>();
            pair.verbalizer_second = pj.at("verbalizer_second").get<std::string>();
            pair.f12 = pj.at("f12").get<long>();
            pair.f21 = pj.at("f21").get<long>();
            pair.dropped_invalid = pj.at("dropped_invalid").get<long>();
            pair.continuity_correction = pj.at("continuity_correction").get<bool>();
            pair.mcnemar = test_from_json(pj.at("mcnemar"));
            pair.con_under_first = proportion_from_json(pj.at("con_under_first"));
            pair.con_under_second = proportion_from_json(pj.at("con_under_second"));
            report.lexical.push_back(std::move(pair));
        }
    }

    if (j.contains("order") && j.at("order").is_object()) {
        bias::OrderSection section;
        const auto& oj = j.at("order");
        section.table.a = oj.at("table").at("end_pro_predicted_pro").get<long>();
        section.table.b = oj.at("table").at("end_pro_predicted_con").get<long>();
        section.table.c = oj.at("table").at("end_con_predicted_pro").get<long>();
        section.table.d = oj.at("table").at("end_con_predicted_con").get<long>();
        section.table.yates_correction = oj.at("table").at("yates_correction").get<bool>();
        section.dropped_invalid = oj.at("dropped_invalid").get<long>();
        section.chi_square = test_from_json(oj.at("chi_square"));
        report.order = std::move(section);
    }

    if (j.contains("stance") && j.at("stance").is_object()) {
        bias::StanceSection section;
        const auto& sj = j.at("stance");
        section.predicted_pro = sj.at("predicted_pro").get<long>();
        section.valid_n = sj.at("valid_n").get<long>();
        section.proportion = sj.at("proportion").get<double>();
        section.vs_half = test_from_json(sj.at("vs_half"));
        section.confusion = confusion_from_json(sj.at("confusion"));
        report.stance = std::move(section);
    }

    if (j.contains("sensitivity") && j.at("sensitivity").is_array()) {
        for (const auto& cj : j.at("sensitivity")) {
            bias::SensitivityCell cell;
            cell.verbalizer = cj.at("verbalizer").get<std::string>();
            cell.question =
                design::outcome_question_from_string(cj.at("question").get<std::string>());
            cell.n = cj.at("n").get<long>();
            cell.accuracy = cj.at("accuracy").get<double>();
            cell.weighted_f1 = cj.at("weighted_f1").get<double>();
            cell.invalid_rate = cj.at("invalid_rate").get<double>();
            cell.best = cj.at("best").get<bool>();
            cell.worst = cj.at("worst").get<bool>();
            report.sensitivity.push_back(std::move(cell));
        }
    }

    if (j.contains("metadata")) {
        const auto& mj = j.at("metadata");
        report.metadata.seeds =
            mj.value("seeds", std::map<std::string, std::uint64_t>{});
        report.metadata.conditions = mj.value("conditions", std::vector<std::string>{});
        report.metadata.sample_sizes = mj.value("sample_sizes", std::map<std::string, long>{});
        report.metadata.correction_flags =
            mj.value("correction_flags", std::map<std::string, bool>{});
        report.metadata.rng_identity = mj.value("rng_identity", std::string{});
        report.metadata.template_version = mj.value("template_version", std::string{});
        report.metadata.manifest_digest = mj.value("manifest_digest", std::string{});
    }
    return report;
}

namespace {

std::string fmt(double v, int precision = 4) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(precision) << v;
    return out.str();
}

std::string fmt_p(double p) {
    if (p < 0.001) return "< 0.001";
    return fmt(p, 4);
}

}  // namespace

std::string report_markdown(const bias::BiasReport& report) {
    std::ostringstream md;
    md << "# Bias report\n\n";

    md << "## Positional bias\n\n";
    if (report.positional) {
        if (report.positional->unpaired) {
            const auto& u = *report.positional->unpaired;
            md << "| arm | predicted Con | n | proportion |\n";
            md << "|---|---|---|---|\n";
            md << "| Con second | " << u.con_when_con_second.count << " | "
               << u.con_when_con_second.valid_n << " | " << fmt(u.con_when_con_second.value)
               << " |\n";
            md << "| Con first | " << u.con_when_con_first.count << " | "
               << u.con_when_con_first.valid_n << " | " << fmt(u.con_when_con_first.value)
               << " |\n\n";
            md << "Two-proportion z = " << fmt(u.z_test.statistic, 3)
               << ", p = " << fmt_p(u.z_test.p_value) << "\n\n";
        }
        if (report.positional->paired) {
            const auto& p = *report.positional->paired;
            md << "Paired fixed-vs-shuffled McNemar: f12 = " << p.f12 << ", f21 = " << p.f21
               << ", dropped (Invalid) = " << p.dropped_invalid
               << ", correction = " << (p.continuity_correction ? "yes" : "no")
               << ", chi2 = " << fmt(p.mcnemar.statistic, 2)
               << ", p = " << fmt_p(p.mcnemar.p_value) << "\n\n";
        }
    } else {
        md << "not run\n\n";
    }

    md << "## Lexical bias\n\n";
    if (!report.lexical.empty()) {
        md << "| pair | f12 | f21 | dropped | correction | chi2 | p | Con share (first) | Con "
              "share (second) |\n";
        md << "|---|---|---|---|---|---|---|---|---|\n";
        for (const auto& pair : report.lexical) {
            md << "| " << pair.verbalizer_first << " vs " << pair.verbalizer_second << " | "
               << pair.f12 << " | " << pair.f21 << " | " << pair.dropped_invalid << " | "
               << (pair.continuity_correction ? "yes" : "no") << " | "
               << fmt(pair.mcnemar.statistic, 2) << " | " << fmt_p(pair.mcnemar.p_value) << " | "
               << fmt(pair.con_under_first.value) << " | " << fmt(pair.con_under_second.value)
               << " |\n";
        }
        md << "\n";
    } else {
        md << "not run\n\n";
    }

    md << "## Order bias\n\n";
    if (report.order) {
        const auto& o = *report.order;
        md << "| concluding side | predicted Pro | predicted Con |\n";
        md << "|---|---|---|\n";
        md << "| Pro | " << o.table.a << " | " << o.table.b << " |\n";
        md << "| Con | " << o.table.c << " | " << o.table.d << " |\n\n";
        md << "Chi-square (" << (o.table.yates_correction ? "Yates" : "uncorrected")
           << ") = " << fmt(o.chi_square.statistic, 2) << ", phi = "
           << fmt(o.chi_square.effect_size.value_or(0.0), 3)
           << ", p = " << fmt_p(o.chi_square.p_value) << ", dropped (Invalid) = "
           << o.dropped_invalid << "\n\n";
    } else {
        md << "not run\n\n";
    }

    md << "## Stance bias\n\n";
    if (report.stance) {
        const auto& s = *report.stance;
        md << "Predicted Pro " << s.predicted_pro << " of " << s.valid_n << " valid ("
           << fmt(s.proportion) << "), z vs 0.5 = " << fmt(s.vs_half.statistic, 3)
           << ", p = " << fmt_p(s.vs_half.p_value) << "\n\n";
        md << "| | predicted Pro | predicted Con | invalid |\n";
        md << "|---|---|---|---|\n";
        md << "| truth Pro | " << s.confusion.tp_pro << " | " << s.confusion.fn_pro << " | "
           << s.confusion.invalid_truth_pro << " |\n";
        md << "| truth Con | " << s.confusion.fp_pro << " | " << s.confusion.tn_pro << " | "
           << s.confusion.invalid_truth_con << " |\n\n";
    } else {
        md << "not run\n\n";
    }

    md << "## Verbalizer / question sensitivity\n\n";
    if (!report.sensitivity.empty()) {
        md << "| verbalizer | question | n | accuracy | weighted F1 | invalid rate | |\n";
        md << "|---|---|---|---|---|---|---|\n";
        for (const auto& cell : report.sensitivity) {
            md << "| " << cell.verbalizer << " | " << design::to_string(cell.question) << " | "
               << cell.n << " | " << fmt(cell.accuracy) << " | " << fmt(cell.weighted_f1) << " | "
               << fmt(cell.invalid_rate) << " | "
               << (cell.best ? "best" : (cell.worst ? "worst" : "")) << " |\n";
        }
        md << "\n";
    } else {
        md << "not run\n\n";
    }

    md << "## Metadata\n\n";
    md << "- rng: " << report.metadata.rng_identity << "\n";
    md << "- templates: " << report.metadata.template_version << "\n";
    md << "- manifest: " << report.metadata.manifest_digest << "\n";
    for (const auto& [name, seed] : report.metadata.seeds)
        md << "- seed " << name << ": " << seed << "\n";
    for (const auto& [name, size] : report.metadata.sample_sizes)
        md << "- n " << name << ": " << size << "\n";
    for (const auto& [name, flag] : report.metadata.correction_flags)
        md << "- correction " << name << ": " << (flag ? "yes" : "no") << "\n";
    return md.str();
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write file: " + path.string());
    out << content;
}

namespace {

template <typename T, typename ToJson>
void write_jsonl(const std::filesystem::path& path, const std::vector<T>& items, ToJson to) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write file: " + path.string());
    for (const auto& item : items) out << to(item).dump() << '\n';
}

template <typename FromJson>
auto read_jsonl(const std::filesystem::path& path, FromJson from)
    -> std::vector<decltype(from(nlohmann::json{}))> {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read file: " + path.string());
    std::vector<decltype(from(nlohmann::json{}))> items;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            items.push_back(from(json::parse(line)));
        } catch (const json::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return items;
}

}  // namespace

void write_debates_jsonl(const std::filesystem::path& path,
                         const std::vector<corpus::Debate>& debates) {
    write_jsonl(path, debates, [](const corpus::Debate& d) { return to_json(d); });
}

std::vector<corpus::Debate> read_debates_jsonl(const std::filesystem::path& path) {
    return read_jsonl(path, [](const json& j) { return debate_from_json(j); });
}

void write_assignments_jsonl(const std::filesystem::path& path,
                             const std::vector<design::Assignment>& assignments) {
    write_jsonl(path, assignments, [](const design::Assignment& a) { return to_json(a); });
}

void write_run_records_jsonl(const std::filesystem::path& path,
                             const std::vector<judge::RunRecord>& records) {
    write_jsonl(path, records, [](const judge::RunRecord& r) { return to_json(r); });
}

std::vector<judge::RunRecord> read_run_records_jsonl(const std::filesystem::path& path) {
    return read_jsonl(path, [](const json& j) { return run_record_from_json(j); });
}

void append_run_record(std::ostream& out, const judge::RunRecord& record) {
    out << to_json(record).dump() << '\n';
}

}  // namespace debate_audit::io
