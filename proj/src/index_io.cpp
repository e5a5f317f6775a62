// On-disk layout of an evidence index. See FORMAT.md for the record layouts.

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "evminer/errors.hpp"
#include "evminer/evidence_index.hpp"

namespace evminer {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr char kDocumentsMagic[4] = {'E', 'M', 'D', 'C'};
constexpr char kSentencesMagic[4] = {'E', 'M', 'S', 'N'};
constexpr char kWordsMagic[4] = {'E', 'M', 'W', 'D'};
constexpr char kEntitiesMagic[4] = {'E', 'M', 'E', 'N'};
constexpr char kPatternsMagic[4] = {'E', 'M', 'P', 'T'};

class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
    }
    void str(std::string_view s) {
        u32(static_cast<std::uint32_t>(s.size()));
        buf_.append(s);
    }
    void raw(std::string_view s) { buf_.append(s); }
    void strs(const std::vector<std::string>& v) {
        u32(static_cast<std::uint32_t>(v.size()));
        for (const auto& s : v) str(s);
    }
    const std::string& bytes() const noexcept { return buf_; }
    void clear() { buf_.clear(); }

private:
    std::string buf_;
};

// Header (magic, version, record count) followed by u32-length-prefixed records.
class RecordFileWriter {
public:
    explicit RecordFileWriter(const char (&magic)[4]) { out_.raw(std::string_view(magic, 4)); }

    void begin(std::uint64_t count) {
        out_.u32(kIndexFormatVersion);
        out_.u64(count);
    }
    void add(const ByteWriter& record) {
        out_.u32(static_cast<std::uint32_t>(record.bytes().size()));
        out_.raw(record.bytes());
    }
    void save(const fs::path& path) const {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot write " + path.string());
        f.write(out_.bytes().data(), static_cast<std::streamsize>(out_.bytes().size()));
        if (!f) throw IoError("write failed: " + path.string());
    }

private:
    ByteWriter out_;
};

class ByteReader {
public:
    ByteReader(std::string_view data, std::string file) : data_(data), file_(std::move(file)) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
    std::uint32_t u32() {
        auto b = take(4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[static_cast<std::size_t>(i)]);
        return v;
    }
    std::uint64_t u64() {
        auto b = take(8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[static_cast<std::size_t>(i)]);
        return v;
    }
    std::string str() {
        auto n = u32();
        return std::string(take(n));
    }
    std::vector<std::string> strs() {
        auto n = u32();
        check_count(n, 4);
        std::vector<std::string> v;
        v.reserve(n);
        for (std::uint32_t i = 0; i < n; ++i) v.push_back(str());
        return v;
    }
    std::string_view take(std::size_t n) {
        if (n > data_.size() - pos_) fail("truncated data");
        auto s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    // Guards allocations against absurd counts in damaged files.
    void check_count(std::uint64_t n, std::size_t min_bytes_each) {
        if (n > (data_.size() - pos_) / std::max<std::size_t>(1, min_bytes_each)) {
            fail("count exceeds remaining data");
        }
    }
    bool done() const noexcept { return pos_ == data_.size(); }
    [[noreturn]] void fail(const std::string& reason) const { throw CorruptIndex(file_, reason); }
    const std::string& file() const noexcept { return file_; }

private:
    std::string_view data_;
    std::string file_;
    std::size_t pos_ = 0;
};

std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw CorruptIndex(path.filename().string(), "missing or unreadable");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + path.string());
    f << text;
    if (!f) throw IoError("write failed: " + path.string());
}

// Calls `fn(ByteReader&)` once per record after validating the header.
template <typename Fn>
void read_records(const fs::path& dir, const char* name, const char (&magic)[4], Fn&& fn) {
    const std::string data = read_file(dir / name);
    ByteReader r(data, name);
    if (r.take(4) != std::string_view(magic, 4)) r.fail("bad magic");
    auto version = r.u32();
    if (version != kIndexFormatVersion) throw VersionMismatch(kIndexFormatVersion, version);
    auto count = r.u64();
    r.check_count(count, 4);
    for (std::uint64_t i = 0; i < count; ++i) {
        auto len = r.u32();
        ByteReader rec(r.take(len), name);
        fn(rec);
        if (!rec.done()) rec.fail("trailing bytes in record " + std::to_string(i));
    }
    if (!r.done()) r.fail("trailing bytes after last record");
}

void write_postings(ByteWriter& w, const PostingList& list) {
    w.u32(static_cast<std::uint32_t>(list.size()));
    for (const auto& p : list) {
        w.u32(p.sentence_id);
        w.u32(p.tf);
    }
}

PostingList read_postings(ByteReader& r) {
    auto n = r.u32();
    r.check_count(n, 8);
    PostingList list;
    list.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        Posting p;
        p.sentence_id = r.u32();
        p.tf = r.u32();
        if (p.tf == 0) r.fail("zero term frequency");
        if (!list.empty() && list.back().sentence_id >= p.sentence_id) r.fail("unsorted posting list");
        list.push_back(p);
    }
    return list;
}

void write_term_index(const fs::path& path, const char (&magic)[4], const TermIndex& index) {
    std::vector<const std::string*> keys;
    keys.reserve(index.size());
    for (const auto& [k, v] : index) keys.push_back(&k);
    std::sort(keys.begin(), keys.end(), [](auto* a, auto* b) { return *a < *b; });

    RecordFileWriter file(magic);
    file.begin(keys.size());
    ByteWriter rec;
    for (const auto* key : keys) {
        rec.clear();
        rec.str(*key);
        write_postings(rec, index.at(*key));
        file.add(rec);
    }
    file.save(path);
}

TermIndex read_term_index(const fs::path& dir, const char* name, const char (&magic)[4]) {
    TermIndex index;
    read_records(dir, name, magic, [&](ByteReader& r) {
        auto key = r.str();
        auto list = read_postings(r);
        if (!index.emplace(std::move(key), std::move(list)).second) r.fail("duplicate key");
    });
    return index;
}

json manifest_json(const EvidenceIndex& index) {
    const auto& st = index.stats();
    std::size_t group_count = index.groups().groups.size();
    return json{
        {"format", "evminer-index"},
        {"format_version", kIndexFormatVersion},
        {"config_hash", index.config_hash()},
        {"config",
         {{"min_support", index.config().min_support},
          {"max_pattern_len", index.config().max_pattern_len},
          {"index_titles", index.config().index_titles}}},
        {"sentence_count", st.sentence_count},
        {"avg_sentence_length", st.avg_sentence_length},
        {"vocab_size", st.vocab_size},
        {"document_count", index.documents().size()},
        {"entity_count", index.entity_index().size()},
        {"pattern_count", index.patterns().size()},
        {"group_count", group_count},
        {"files",
         {"documents.dat", "sentences.dat", "words.idx", "entities.idx", "patterns.idx",
          "groups.json", "lexicon.tsv"}},
    };
}

}  // namespace

void persist(const EvidenceIndex& index, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create index directory " + dir.string() + ": " + ec.message());

    {
        RecordFileWriter file(kDocumentsMagic);
        file.begin(index.documents_.size());
        ByteWriter rec;
        for (const auto& d : index.documents_) {
            rec.clear();
            rec.str(d.doc_id);
            rec.str(d.title);
            rec.str(d.body);
            rec.u8(d.source_uri ? 1 : 0);
            if (d.source_uri) rec.str(*d.source_uri);
            file.add(rec);
        }
        file.save(dir / "documents.dat");
    }
    {
        RecordFileWriter file(kSentencesMagic);
        file.begin(index.sentences_.size());
        ByteWriter rec;
        for (const auto& s : index.sentences_) {
            rec.clear();
            rec.u32(s.id);
            rec.str(s.doc_id);
            rec.u8(static_cast<std::uint8_t>(s.section));
            rec.u64(s.char_span.start);
            rec.u64(s.char_span.end);
            rec.u32(static_cast<std::uint32_t>(s.tokens.size()));
            for (std::size_t t = 0; t < s.tokens.size(); ++t) {
                rec.str(s.tokens[t]);
                rec.u64(s.token_spans[t].start);
                rec.u64(s.token_spans[t].end);
            }
            const auto& ms = index.mentions_[s.id];
            rec.u32(static_cast<std::uint32_t>(ms.size()));
            for (const auto& m : ms) {
                rec.u64(m.token_span.start);
                rec.u64(m.token_span.end);
                rec.str(m.entity_type);
                rec.str(m.canonical_id);
            }
            file.add(rec);
        }
        file.save(dir / "sentences.dat");
    }
    write_term_index(dir / "words.idx", kWordsMagic, index.word_index_);
    write_term_index(dir / "entities.idx", kEntitiesMagic, index.entity_index_);
    {
        RecordFileWriter file(kPatternsMagic);
        file.begin(index.patterns_.size());
        ByteWriter rec;
        for (const auto& p : index.patterns_) {
            rec.clear();
            rec.u32(p.id);
            rec.u64(p.support);
            rec.strs(p.items);
            const auto& postings = index.pattern_postings_[p.id];
            rec.u32(static_cast<std::uint32_t>(postings.size()));
            for (const auto& [tuple, sids] : postings) {
                rec.strs(tuple);
                rec.u32(static_cast<std::uint32_t>(sids.size()));
                for (auto sid : sids) rec.u32(sid);
            }
            file.add(rec);
        }
        file.save(dir / "patterns.idx");
    }
    {
        json groups = json::array();
        for (const auto& g : index.groups_.groups) {
            groups.push_back({{"group_id", g.id},
                              {"members", g.members},
                              {"entity_types", g.signature.entity_types},
                              {"content", g.signature.content}});
        }
        json doc = {
            {"groups", groups},
            {"pattern_to_group", index.groups_.pattern_to_group},
            {"normalizer",
             {{"stopwords", index.normalizer_.stopword_list()},
              {"stem_exceptions", index.normalizer_.stem_exception_list()},
              {"synonym_classes", index.normalizer_.synonym_classes()}}},
        };
        write_text(dir / "groups.json", doc.dump(1) + "\n");
    }
    write_text(dir / "lexicon.tsv", index.lexicon_.to_tsv());
    // The manifest goes last so a partially written directory never looks complete.
    write_text(dir / "manifest.json", manifest_json(index).dump(2) + "\n");
}

EvidenceIndex load_index(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw CorruptIndex(dir.string(), "not a directory");

    json manifest;
    try {
        manifest = json::parse(read_file(dir / "manifest.json"));
    } catch (const json::exception& e) {
        throw CorruptIndex("manifest.json", e.what());
    }
    std::uint32_t version = 0;
    std::size_t expected_n = 0;
    EvidenceIndex idx;
    try {
        if (manifest.value("format", "") != "evminer-index") {
            throw CorruptIndex("manifest.json", "not an evminer index");
        }
        version = manifest.at("format_version").get<std::uint32_t>();
        if (version != kIndexFormatVersion) throw VersionMismatch(kIndexFormatVersion, version);
        const auto& cfg = manifest.at("config");
        idx.config_.min_support = cfg.at("min_support").get<std::size_t>();
        idx.config_.max_pattern_len = cfg.at("max_pattern_len").get<std::size_t>();
        idx.config_.index_titles = cfg.at("index_titles").get<bool>();
        expected_n = manifest.at("sentence_count").get<std::size_t>();
    } catch (const json::exception& e) {
        throw CorruptIndex("manifest.json", e.what());
    }

    try {
        auto groups_doc = json::parse(read_file(dir / "groups.json"));
        const auto& norm = groups_doc.at("normalizer");
        auto stop = norm.at("stopwords").get<std::vector<std::string>>();
        auto exc = norm.at("stem_exceptions").get<std::vector<std::string>>();
        idx.normalizer_ = PatternNormalizer(
            {stop.begin(), stop.end()}, {exc.begin(), exc.end()},
            norm.at("synonym_classes").get<std::vector<std::vector<std::string>>>());
        idx.groups_.pattern_to_group =
            groups_doc.at("pattern_to_group").get<std::vector<GroupId>>();
        for (const auto& g : groups_doc.at("groups")) {
            SynonymGroup group;
            group.id = g.at("group_id").get<GroupId>();
            group.members = g.at("members").get<std::vector<PatternId>>();
            group.signature.entity_types = g.at("entity_types").get<std::vector<std::string>>();
            group.signature.content = g.at("content").get<std::vector<std::string>>();
            if (group.id != idx.groups_.groups.size() || group.members.empty()) {
                throw CorruptIndex("groups.json", "groups not dense or empty");
            }
            idx.groups_.groups.push_back(std::move(group));
        }
    } catch (const json::exception& e) {
        throw CorruptIndex("groups.json", e.what());
    } catch (const MalformedSynonymConfig& e) {
        throw CorruptIndex("groups.json", e.what());
    }

    try {
        idx.lexicon_ = Lexicon::parse(read_file(dir / "lexicon.tsv"));
    } catch (const MalformedRow& e) {
        throw CorruptIndex("lexicon.tsv", e.what());
    } catch (const EmptyLexicon& e) {
        throw CorruptIndex("lexicon.tsv", e.what());
    }

    read_records(dir, "documents.dat", kDocumentsMagic, [&](ByteReader& r) {
        Document d;
        d.doc_id = r.str();
        d.title = r.str();
        d.body = r.str();
        if (r.u8()) d.source_uri = r.str();
        idx.documents_.push_back(std::move(d));
    });

    read_records(dir, "sentences.dat", kSentencesMagic, [&](ByteReader& r) {
        Sentence s;
        s.id = r.u32();
        if (s.id != idx.sentences_.size()) r.fail("sentence ids not dense");
        s.doc_id = r.str();
        auto section = r.u8();
        if (section > 1) r.fail("bad section tag");
        s.section = static_cast<Section>(section);
        s.char_span.start = r.u64();
        s.char_span.end = r.u64();
        auto ntok = r.u32();
        r.check_count(ntok, 20);
        for (std::uint32_t t = 0; t < ntok; ++t) {
            s.tokens.push_back(r.str());
            CharSpan sp;
            sp.start = r.u64();
            sp.end = r.u64();
            s.token_spans.push_back(sp);
        }
        if (s.tokens.empty()) r.fail("sentence without tokens");
        auto nm = r.u32();
        r.check_count(nm, 24);
        std::vector<EntityMention> ms;
        for (std::uint32_t i = 0; i < nm; ++i) {
            EntityMention m;
            m.sentence_id = s.id;
            m.token_span.start = r.u64();
            m.token_span.end = r.u64();
            m.entity_type = r.str();
            m.canonical_id = r.str();
            if (m.token_span.start >= m.token_span.end || m.token_span.end > s.tokens.size() ||
                (!ms.empty() && ms.back().token_span.end > m.token_span.start)) {
                r.fail("bad mention span");
            }
            m.surface.assign(s.tokens.begin() + static_cast<std::ptrdiff_t>(m.token_span.start),
                             s.tokens.begin() + static_cast<std::ptrdiff_t>(m.token_span.end));
            ms.push_back(std::move(m));
        }
        idx.sentences_.push_back(std::move(s));
        idx.mentions_.push_back(std::move(ms));
    });

    idx.word_index_ = read_term_index(dir, "words.idx", kWordsMagic);
    idx.entity_index_ = read_term_index(dir, "entities.idx", kEntitiesMagic);

    read_records(dir, "patterns.idx", kPatternsMagic, [&](ByteReader& r) {
        MetaPattern p;
        p.id = r.u32();
        if (p.id != idx.patterns_.size()) r.fail("pattern ids not dense");
        p.support = r.u64();
        p.items = r.strs();
        p.arity = pattern_arity(p.items);
        PatternPostings postings;
        auto ntuples = r.u32();
        r.check_count(ntuples, 8);
        for (std::uint32_t i = 0; i < ntuples; ++i) {
            auto tuple = r.strs();
            if (tuple.size() != p.arity) r.fail("entity tuple arity mismatch");
            auto n = r.u32();
            r.check_count(n, 4);
            std::vector<SentenceId> sids;
            sids.reserve(n);
            for (std::uint32_t j = 0; j < n; ++j) {
                auto sid = r.u32();
                if (!sids.empty() && sids.back() >= sid) r.fail("unsorted sentence ids");
                sids.push_back(sid);
            }
            postings.emplace(std::move(tuple), std::move(sids));
        }
        idx.patterns_.push_back(std::move(p));
        idx.pattern_postings_.push_back(std::move(postings));
    });

    // Cross-file consistency.
    const auto n = idx.sentences_.size();
    if (n == 0 || n != expected_n) throw CorruptIndex("sentences.dat", "sentence count differs from manifest");
    auto check_postings = [n](const TermIndex& index, const char* file) {
        for (const auto& [k, list] : index) {
            if (!list.empty() && list.back().sentence_id >= n) {
                throw CorruptIndex(file, "posting references unknown sentence");
            }
        }
    };
    check_postings(idx.word_index_, "words.idx");
    check_postings(idx.entity_index_, "entities.idx");
    for (const auto& postings : idx.pattern_postings_) {
        for (const auto& [tuple, sids] : postings) {
            if (!sids.empty() && sids.back() >= n) {
                throw CorruptIndex("patterns.idx", "posting references unknown sentence");
            }
        }
    }
    if (idx.groups_.pattern_to_group.size() != idx.patterns_.size()) {
        throw CorruptIndex("groups.json", "pattern_to_group size differs from pattern count");
    }
    std::size_t member_total = 0;
    for (const auto& g : idx.groups_.groups) {
        member_total += g.members.size();
        for (auto p : g.members) {
            if (p >= idx.patterns_.size() || idx.groups_.pattern_to_group[p] != g.id) {
                throw CorruptIndex("groups.json", "dictionaries are not mutually inverse");
            }
        }
    }
    if (member_total != idx.patterns_.size()) {
        throw CorruptIndex("groups.json", "groups do not partition the patterns");
    }
    idx.finalize();
    for (const auto& s : idx.sentences_) {
        if (!idx.find_document(s.doc_id)) {
            throw CorruptIndex("sentences.dat", "sentence references unknown document");
        }
    }
    idx.stats_ = corpus_stats(idx.sentences_);
    return idx;
}

}  // namespace evminer
