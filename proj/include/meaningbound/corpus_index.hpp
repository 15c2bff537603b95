#pragma once

#include "meaningbound/core_model.hpp"
#include "meaningbound/query.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace meaningbound {

struct Document {
    std::string id;
    std::string text;
};

using DocNumber = std::uint32_t;

/// Sorted document numbers plus, for each, the sorted token positions.
struct PostingList {
    std::vector<DocNumber> docs;
    std::vector<std::vector<std::uint32_t>> positions;
};

struct IndexStats {
    std::int64_t documents = 0;
    std::int64_t tokens = 0;
    std::int64_t vocabulary = 0;
};

/// Immutable positional inverted index answering document-frequency queries.
/// Safe for any number of concurrent readers.
class CorpusIndex {
public:
    CorpusIndex() = default;

    Count count(const Query& query) const;
    /// Sorted document numbers matching a pattern.
    std::vector<DocNumber> match(const TermPattern& pattern) const;

    Count total_docs() const { return Count{static_cast<std::int64_t>(doc_ids_.size())}; }
    const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }
    const PostingList* postings(const std::string& token) const;
    IndexStats stats() const;

private:
    friend class IndexBuilder;

    std::vector<std::string> doc_ids_;  // DocNumber -> id, ascending by id
    std::unordered_map<std::string, PostingList> postings_;
    std::int64_t token_total_ = 0;
};

/// Accumulates tokenized documents. Builders over disjoint partitions of a
/// corpus can be merged in any order; build() numbers documents by sorted id,
/// so the resulting index does not depend on ingestion or merge order.
class IndexBuilder {
public:
    void add(const Document& doc);
    void merge(IndexBuilder&& other);
    std::size_t size() const noexcept { return docs_.size(); }
    CorpusIndex build() &&;

private:
    struct Tokenized {
        std::string id;
        std::vector<std::string> tokens;
    };

    void insert(Tokenized doc);

    std::vector<Tokenized> docs_;
    std::unordered_set<std::string> ids_;
};

/// Throws ErrorKind::DuplicateDocId.
CorpusIndex build_index(const std::vector<Document>& documents);
/// Tokenizes partitions on `threads` workers and merges the partial builders.
CorpusIndex build_index_parallel(const std::vector<Document>& documents, unsigned threads);

/// One JSON object per line with string fields `id` and `text`.
std::vector<Document> read_jsonl_corpus(const std::filesystem::path& path);
/// Every regular file below `root`; the id is the relative path with '/'.
std::vector<Document> read_directory_corpus(const std::filesystem::path& root);
/// Directory -> read_directory_corpus, otherwise read_jsonl_corpus.
std::vector<Document> read_corpus(const std::filesystem::path& path);

} // namespace meaningbound
