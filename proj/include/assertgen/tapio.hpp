#pragma once

// On-disk formats: TAP and abstract-TAP JSON Lines, the filter report, and
// small file helpers shared by the CLI.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "assertgen/abstractor.hpp"
#include "assertgen/miner.hpp"

namespace assertgen::tapio {

std::string read_file(const std::filesystem::path& path);

/// Writes atomically enough for our purposes: truncate then write. Creates
/// parent directories.
void write_file(const std::filesystem::path& path, std::string_view contents);

/// One JSON object per line: id, context, target, focal_signature (nullable).
std::string taps_to_jsonl(const std::vector<miner::TapRecord>& taps);
std::vector<miner::TapRecord> taps_from_jsonl(std::string_view text);

/// One JSON object per line: raw_id, context, target, map (raw -> term).
std::string abstract_taps_to_jsonl(const std::vector<abstractor::AbstractTap>& taps);
std::vector<abstractor::AbstractTap> abstract_taps_from_jsonl(std::string_view text);

std::string filter_report_json(const miner::FilterReport& report);
miner::FilterReport filter_report_from_json(std::string_view text);

/// Splits text into non-empty lines; `\r\n` is accepted.
std::vector<std::string_view> jsonl_lines(std::string_view text);

}  // namespace assertgen::tapio
