#pragma once

#include <filesystem>
#include <optional>

#include "evminer/evidence_index.hpp"

namespace evminer {

/// File inputs for an offline index build. Optional lists replace the built-in
/// defaults when given.
struct BuildInputs {
    std::filesystem::path corpus;
    std::filesystem::path lexicon;
    CorpusFormat format = CorpusFormat::Jsonl;
    std::optional<std::filesystem::path> synonyms;
    std::optional<std::filesystem::path> mentions;
    std::optional<std::filesystem::path> abbreviations;
    std::optional<std::filesystem::path> stopwords;
    std::optional<std::filesystem::path> stem_exceptions;
    BuildConfig config;
};

EvidenceIndex build_index(const BuildInputs& inputs);

}  // namespace evminer
