#pragma once

#include "meaningbound/core_model.hpp"
#include "meaningbound/corpus_index.hpp"
#include "meaningbound/query.hpp"

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace meaningbound {

using Timestamp = std::chrono::sys_seconds;

/// Timestamp used for records whose counts do not drift (fixtures, local corpora).
inline constexpr Timestamp kSentinelEpoch{};

/// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_utc(Timestamp t);
Timestamp parse_utc(std::string_view text);

struct CountRecord {
    Query query;
    Count count;
    std::string source_id;
    Timestamp observed_at = kSentinelEpoch;

    friend bool operator==(const CountRecord&, const CountRecord&) = default;
};

/// {"q": "<canonical query>", "n": <integer>, "src": "<source>", "t": "<ISO-8601 UTC>"}
std::string to_jsonl(const CountRecord& record);
/// Throws ErrorKind::InvalidArgument on a malformed line.
CountRecord from_jsonl(std::string_view line);

enum class FetchMode { PreferCache, ForceRefresh };

class CountProvider {
public:
    virtual ~CountProvider() = default;
    virtual CountRecord get_count(const Query& query, FetchMode mode = FetchMode::PreferCache) = 0;
    virtual std::string source_id() const = 0;
};

/// Canonical query string -> record. Entries keep insertion order so a saved
/// table is byte-stable.
class FixtureTable {
public:
    /// Blank lines and lines starting with '#' are skipped. Duplicate
    /// canonical queries are rejected.
    static FixtureTable load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;

    /// Returns false if the canonical query is already present.
    bool insert(CountRecord record);
    const CountRecord* find(const std::string& canonical) const;
    const std::vector<CountRecord>& records() const noexcept { return records_; }
    std::size_t size() const noexcept { return records_.size(); }

private:
    std::vector<CountRecord> records_;
    std::unordered_map<std::string, std::size_t> by_query_;
};

/// Replays a recorded table. Unknown queries are errors, never zero.
class FixtureProvider final : public CountProvider {
public:
    explicit FixtureProvider(FixtureTable table, std::string source = "fixture");
    static FixtureProvider from_file(const std::filesystem::path& path);

    CountRecord get_count(const Query& query, FetchMode mode = FetchMode::PreferCache) override;
    std::string source_id() const override { return source_; }
    const FixtureTable& table() const noexcept { return table_; }

private:
    FixtureTable table_;
    std::string source_;
};

class LocalIndexProvider final : public CountProvider {
public:
    explicit LocalIndexProvider(std::shared_ptr<const CorpusIndex> index, std::string source = "local");

    CountRecord get_count(const Query& query, FetchMode mode = FetchMode::PreferCache) override;
    std::string source_id() const override { return source_; }
    const CorpusIndex& index() const noexcept { return *index_; }

private:
    std::shared_ptr<const CorpusIndex> index_;
    std::string source_;
};

/// Append-only journal of CountRecords (newline-delimited JSON). History is
/// never rewritten; get() answers with the newest observation per query.
class CountCache {
public:
    explicit CountCache(std::filesystem::path path);

    void put(const CountRecord& record);
    std::optional<CountRecord> get(const std::string& canonical) const;
    std::size_t journal_size() const;
    const std::filesystem::path& path() const noexcept { return path_; }

private:
    void remember(const CountRecord& record);

    std::filesystem::path path_;
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, CountRecord> latest_;
    std::size_t journal_size_ = 0;
};

struct ProviderConfig {
    std::string endpoint_url;         // must contain "{query}"
    std::string api_key_env_name;     // empty: no credentials
    std::string api_key_header = "X-API-Key";
    std::string count_field_path = "totalResults";  // dotted; numeric segments index arrays
    std::chrono::milliseconds min_request_interval{1000};
    int max_retries = 3;
    std::chrono::milliseconds timeout{10000};
    std::string source_id = "web";
    std::optional<std::filesystem::path> cache_path;

    /// Reads the JSON config file used by `--web`.
    static ProviderConfig load(const std::filesystem::path& path);
    void validate() const;
};

/// Time source for the web provider; tests substitute a manual clock.
class Clock {
public:
    virtual ~Clock() = default;
    virtual std::chrono::steady_clock::time_point now() = 0;
    virtual Timestamp utc_now() = 0;
    virtual void sleep_for(std::chrono::milliseconds duration) = 0;
};

class SystemClock final : public Clock {
public:
    std::chrono::steady_clock::time_point now() override;
    Timestamp utc_now() override;
    void sleep_for(std::chrono::milliseconds duration) override;
};

struct HttpResponse {
    int status = 0;  // 0: no response (connection failure, timeout)
    std::string body;
    std::string error;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;
using HttpTransport = std::function<HttpResponse(const std::string& url, const HttpHeaders& headers)>;

/// cpp-httplib backed GET.
HttpTransport make_http_transport(std::chrono::milliseconds timeout);

std::string percent_encode(std::string_view text);

/// Extracts a non-negative integer at a dotted path; digit strings are
/// accepted. Throws ErrorKind::MalformedResponse.
Count extract_count(const std::string& body, const std::string& field_path);

/// Generic hit-count client. All requests go through one rate-limited
/// dispatch point; the cache is consulted first unless refresh is forced.
class WebCountProvider final : public CountProvider {
public:
    WebCountProvider(ProviderConfig config, HttpTransport transport, std::shared_ptr<Clock> clock,
                     std::shared_ptr<CountCache> cache = nullptr);
    /// Real transport and clock; opens config.cache_path if set.
    explicit WebCountProvider(ProviderConfig config);

    CountRecord get_count(const Query& query, FetchMode mode = FetchMode::PreferCache) override;
    std::string source_id() const override { return config_.source_id; }

    std::size_t requests_issued() const;
    std::string request_url(const Query& query) const;

private:
    HttpResponse dispatch(const std::string& url, int attempt);

    ProviderConfig config_;
    HttpTransport transport_;
    std::shared_ptr<Clock> clock_;
    std::shared_ptr<CountCache> cache_;
    HttpHeaders headers_;

    mutable std::mutex dispatch_mutex_;
    std::optional<std::chrono::steady_clock::time_point> last_request_;
    std::size_t requests_issued_ = 0;
};

/// Fetches every query (duplicates once) and writes a replayable fixture.
/// Errors carry the failing query; nothing is written on failure.
FixtureTable record_fixture(CountProvider& provider, const std::vector<Query>& queries,
                            const std::filesystem::path& out);

} // namespace meaningbound
