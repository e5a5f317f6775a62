#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace evminer {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class MalformedRecord : public Error {
public:
    MalformedRecord(std::size_t line_no, const std::string& reason)
        : Error("malformed record at line " + std::to_string(line_no) + ": " + reason),
          line_no_(line_no) {}
    std::size_t line_no() const noexcept { return line_no_; }

private:
    std::size_t line_no_;
};

class DuplicateDocId : public Error {
public:
    explicit DuplicateDocId(const std::string& id) : Error("duplicate doc_id: " + id), id_(id) {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class EmptyCorpus : public Error {
public:
    EmptyCorpus() : Error("corpus contains no sentences") {}
};

class MalformedRow : public Error {
public:
    MalformedRow(std::size_t line_no, const std::string& reason)
        : Error("malformed row at line " + std::to_string(line_no) + ": " + reason),
          line_no_(line_no) {}
    std::size_t line_no() const noexcept { return line_no_; }

private:
    std::size_t line_no_;
};

class EmptyLexicon : public Error {
public:
    EmptyLexicon() : Error("lexicon contains no entries") {}
};

class OverlappingMentions : public Error {
public:
    using Error::Error;
};

class MalformedSynonymConfig : public Error {
public:
    MalformedSynonymConfig(std::size_t line_no, const std::string& reason)
        : Error("malformed synonym config at line " + std::to_string(line_no) + ": " + reason) {}
};

class ArityMismatch : public Error {
public:
    ArityMismatch(std::size_t expected, std::size_t got)
        : Error("entity tuple has " + std::to_string(got) + " entries, pattern arity is " +
                std::to_string(expected)) {}
};

class VersionMismatch : public Error {
public:
    VersionMismatch(std::uint32_t expected, std::uint32_t found)
        : Error("index format version " + std::to_string(found) + " is not supported (expected " +
                std::to_string(expected) + ")") {}
};

class CorruptIndex : public Error {
public:
    CorruptIndex(const std::string& file, const std::string& reason)
        : Error("corrupt index file '" + file + "': " + reason), file_(file) {}
    const std::string& file() const noexcept { return file_; }

private:
    std::string file_;
};

class EmptyQuery : public Error {
public:
    EmptyQuery() : Error("query is empty") {}
};

class UnknownEntityType : public Error {
public:
    explicit UnknownEntityType(const std::string& name)
        : Error("unknown entity type: " + name), name_(name) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class MalformedQueryFile : public Error {
public:
    MalformedQueryFile(std::size_t line_no, const std::string& reason)
        : Error("malformed query file at line " + std::to_string(line_no) + ": " + reason) {}
};

class MalformedJudgments : public Error {
public:
    MalformedJudgments(std::size_t line_no, const std::string& reason)
        : Error("malformed judgments at line " + std::to_string(line_no) + ": " + reason) {}
};

class UnknownQueryId : public Error {
public:
    explicit UnknownQueryId(const std::string& id) : Error("unknown query id: " + id) {}
};

}  // namespace evminer
