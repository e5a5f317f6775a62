#pragma once

#include <nlohmann/json.hpp>

#include "evminer/analytics.hpp"
#include "evminer/eval_harness.hpp"
#include "evminer/query_engine.hpp"

namespace evminer {

// JSON shapes shared by the CLI (--json) and the HTTP API.

nlohmann::json query_to_json(const Query& query, const EvidenceIndex& index);
nlohmann::json search_to_json(const SearchResult& result, const EvidenceIndex& index,
                              std::size_t offset = 0);
nlohmann::json entities_to_json(const std::vector<EntityFrequency>& rows);
nlohmann::json relations_to_json(const std::vector<RelationFrequency>& rows);
nlohmann::json report_to_json(const EvalReport& report);
nlohmann::json stats_to_json(const EvidenceIndex& index);

/// Full document with every mention as a character span, for in-context highlighting.
/// `focus` flags one sentence. Returns null json when the doc is unknown.
nlohmann::json document_to_json(const EvidenceIndex& index, std::string_view doc_id,
                                std::optional<SentenceId> focus = std::nullopt);

}  // namespace evminer
