#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "debate_audit/bias.hpp"
#include "debate_audit/corpus.hpp"
#include "debate_audit/design.hpp"
#include "debate_audit/judge.hpp"

namespace debate_audit::io {

nlohmann::json to_json(const corpus::Debate& debate);
corpus::Debate debate_from_json(const nlohmann::json& j);

nlohmann::json to_json(const design::Assignment& assignment);
design::Assignment assignment_from_json(const nlohmann::json& j);

nlohmann::json to_json(const judge::RunRecord& record);
judge::RunRecord run_record_from_json(const nlohmann::json& j);

nlohmann::json to_json(const corpus::CorpusStats& stats);

nlohmann::json to_json(const bias::BiasReport& report);
bias::BiasReport report_from_json(const nlohmann::json& j);

/// Markdown rendering with the contingency tables inline.
std::string report_markdown(const bias::BiasReport& report);

void write_debates_jsonl(const std::filesystem::path& path,
                         const std::vector<corpus::Debate>& debates);
std::vector<corpus::Debate> read_debates_jsonl(const std::filesystem::path& path);

void write_assignments_jsonl(const std::filesystem::path& path,
                             const std::vector<design::Assignment>& assignments);

void write_run_records_jsonl(const std::filesystem::path& path,
                             const std::vector<judge::RunRecord>& records);
std::vector<judge::RunRecord> read_run_records_jsonl(const std::filesystem::path& path);

/// Appends one record to an open stream (the incremental `run` sink).
void append_run_record(std::ostream& out, const judge::RunRecord& record);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace debate_audit::io
