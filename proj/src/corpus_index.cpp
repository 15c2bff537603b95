#include "meaningbound/corpus_index.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iterator>
#include <sstream>
#include <thread>

namespace meaningbound {

namespace {

const std::vector<std::uint32_t>* positions_in(const PostingList& list, DocNumber doc) {
    const auto it = std::lower_bound(list.docs.begin(), list.docs.end(), doc);
    if (it == list.docs.end() || *it != doc) return nullptr;
    return &list.positions[static_cast<std::size_t>(it - list.docs.begin())];
}

std::vector<DocNumber> intersect(const std::vector<DocNumber>& a, const std::vector<DocNumber>& b) {
    std::vector<DocNumber> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

} // namespace

const PostingList* CorpusIndex::postings(const std::string& token) const {
    const auto it = postings_.find(token);
    return it == postings_.end() ? nullptr : &it->second;
}

std::vector<DocNumber> CorpusIndex::match(const TermPattern& pattern) const {
    const auto& tokens = pattern.tokens();
    std::vector<const PostingList*> lists;
    lists.reserve(tokens.size());
    for (const auto& t : tokens) {
        const auto* list = postings(t);
        if (list == nullptr) return {};
        lists.push_back(list);
    }
    if (pattern.kind() == TermPattern::Kind::Word) return lists.front()->docs;

    std::vector<DocNumber> candidates = lists.front()->docs;
    for (std::size_t i = 1; i < lists.size() && !candidates.empty(); ++i) {
        candidates = intersect(candidates, lists[i]->docs);
    }

    std::vector<DocNumber> out;
    for (const DocNumber doc : candidates) {
        std::vector<const std::vector<std::uint32_t>*> pos(lists.size());
        for (std::size_t i = 0; i < lists.size(); ++i) pos[i] = positions_in(*lists[i], doc);
        for (const std::uint32_t start : *pos.front()) {
            bool adjacent = true;
            for (std::size_t i = 1; i < pos.size() && adjacent; ++i) {
                adjacent = std::binary_search(pos[i]->begin(), pos[i]->end(),
                                              start + static_cast<std::uint32_t>(i));
            }
            if (adjacent) {
                out.push_back(doc);
                break;
            }
        }
    }
    return out;
}

Count CorpusIndex::count(const Query& query) const {
    struct Visitor {
        const CorpusIndex& index;
        std::size_t operator()(const PatternQuery& q) const { return index.match(q.pattern).size(); }
        std::size_t operator()(const AndQuery& q) const {
            return intersect(index.match(q.left), index.match(q.right)).size();
        }
        std::size_t operator()(const AndNotQuery& q) const {
            const auto left = index.match(q.left);
            const auto right = index.match(q.right);
            std::vector<DocNumber> out;
            std::set_difference(left.begin(), left.end(), right.begin(), right.end(),
                                std::back_inserter(out));
            return out.size();
        }
    };
    return Count{static_cast<std::int64_t>(std::visit(Visitor{*this}, query))};
}

IndexStats CorpusIndex::stats() const {
    return IndexStats{static_cast<std::int64_t>(doc_ids_.size()), token_total_,
                      static_cast<std::int64_t>(postings_.size())};
}

void IndexBuilder::insert(Tokenized doc) {
    if (!ids_.insert(doc.id).second) {
        throw Error(ErrorKind::DuplicateDocId, "duplicate document id '" + doc.id + "'");
    }
    docs_.push_back(std::move(doc));
}

void IndexBuilder::add(const Document& doc) {
    insert(Tokenized{doc.id, normalize(doc.text)});
}

void IndexBuilder::merge(IndexBuilder&& other) {
    docs_.reserve(docs_.size() + other.docs_.size());
    for (auto& doc : other.docs_) insert(std::move(doc));
    other.docs_.clear();
    other.ids_.clear();
}

CorpusIndex IndexBuilder::build() && {
    std::sort(docs_.begin(), docs_.end(),
              [](const Tokenized& a, const Tokenized& b) { return a.id < b.id; });
    CorpusIndex index;
    index.doc_ids_.reserve(docs_.size());
    for (std::size_t n = 0; n < docs_.size(); ++n) {
        const auto doc = static_cast<DocNumber>(n);
        index.doc_ids_.push_back(std::move(docs_[n].id));
        const auto& tokens = docs_[n].tokens;
        index.token_total_ += static_cast<std::int64_t>(tokens.size());
        for (std::size_t pos = 0; pos < tokens.size(); ++pos) {
            auto& list = index.postings_[tokens[pos]];
            if (list.docs.empty() || list.docs.back() != doc) {
                list.docs.push_back(doc);
                list.positions.emplace_back();
            }
            list.positions.back().push_back(static_cast<std::uint32_t>(pos));
        }
    }
    docs_.clear();
    ids_.clear();
    return index;
}

CorpusIndex build_index(const std::vector<Document>& documents) {
    IndexBuilder builder;
    for (const auto& doc : documents) builder.add(doc);
    return std::move(builder).build();
}

CorpusIndex build_index_parallel(const std::vector<Document>& documents, unsigned threads) {
    threads = std::max(1u, threads);
    std::vector<IndexBuilder> parts(threads);
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> workers;
        const std::size_t chunk = (documents.size() + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            workers.emplace_back([&, t] {
                try {
                    const std::size_t begin = std::min(documents.size(), t * chunk);
                    const std::size_t end = std::min(documents.size(), begin + chunk);
                    for (std::size_t i = begin; i < end; ++i) parts[t].add(documents[i]);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    IndexBuilder merged;
    for (auto& part : parts) merged.merge(std::move(part));
    return std::move(merged).build();
}

std::vector<Document> read_jsonl_corpus(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::StorageFailure, "cannot open corpus file " + path.string());
    std::vector<Document> docs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto where = path.string() + ":" + std::to_string(line_no);
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorKind::InvalidArgument, where + ": " + e.what());
        }
        if (!record.is_object() || !record.contains("id") || !record["id"].is_string() ||
            !record.contains("text") || !record["text"].is_string()) {
            throw Error(ErrorKind::InvalidArgument, where + ": expected {\"id\": string, \"text\": string}");
        }
        docs.push_back(Document{record["id"].get<std::string>(), record["text"].get<std::string>()});
    }
    return docs;
}

std::vector<Document> read_directory_corpus(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(root, ec)) {
        throw Error(ErrorKind::StorageFailure, "corpus directory not found: " + root.string());
    }
    std::vector<Document> docs;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        if (!in) throw Error(ErrorKind::StorageFailure, "cannot read " + entry.path().string());
        std::ostringstream text;
        text << in.rdbuf();
        docs.push_back(Document{fs::relative(entry.path(), root).generic_string(), text.str()});
    }
    std::sort(docs.begin(), docs.end(), [](const Document& a, const Document& b) { return a.id < b.id; });
    return docs;
}

std::vector<Document> read_corpus(const std::filesystem::path& path) {
    std::error_code ec;
    if (std::filesystem::is_directory(path, ec)) return read_directory_corpus(path);
    return read_jsonl_corpus(path);
}

} // namespace meaningbound
