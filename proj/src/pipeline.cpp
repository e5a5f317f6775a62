#include "evminer/pipeline.hpp"

namespace evminer {

EvidenceIndex build_index(const BuildInputs& in) {
    auto docs = load_corpus(in.corpus, in.format);
    auto lexicon = load_lexicon(in.lexicon);
    auto stopwords = in.stopwords ? load_word_list(*in.stopwords) : default_stopwords();
    std::unordered_set<std::string> exceptions;
    if (in.stem_exceptions) exceptions = load_word_list(*in.stem_exceptions);
    std::vector<std::vector<std::string>> classes;
    if (in.synonyms) classes = load_synonym_config(*in.synonyms);
    PatternNormalizer normalizer(std::move(stopwords), std::move(exceptions), std::move(classes));
    SentenceSplitter splitter =
        in.abbreviations ? SentenceSplitter(load_abbreviations(*in.abbreviations)) : SentenceSplitter();
    std::vector<ExternalMention> external;
    if (in.mentions) external = load_external_mentions(*in.mentions);
    return EvidenceIndex::build(std::move(docs), std::move(lexicon), std::move(normalizer),
                                in.config, splitter, external, in.mentions.has_value());
}

}  // namespace evminer
