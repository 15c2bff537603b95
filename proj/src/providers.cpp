#include "meaningbound/providers.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <thread>

namespace meaningbound {

using nlohmann::json;

std::string format_utc(Timestamp t) {
    const std::time_t secs = static_cast<std::time_t>(t.time_since_epoch().count());
    std::tm tm{};
    gmtime_r(&secs, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Timestamp parse_utc(std::string_view text) {
    std::tm tm{};
    int consumed = 0;
    const std::string s(text);
    if (s.size() != 20 ||
        std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2dZ%n", &tm.tm_year, &tm.tm_mon, &tm.tm_mday,
                    &tm.tm_hour, &tm.tm_min, &tm.tm_sec, &consumed) != 6 ||
        consumed != 20) {
        throw Error(ErrorKind::InvalidArgument, "bad UTC timestamp '" + s + "'");
    }
    tm.tm_year -= 1900;
    tm.tm_mon -= 1;
    const std::tm requested = tm;
    const std::time_t secs = timegm(&tm);
    if (tm.tm_mday != requested.tm_mday || tm.tm_mon != requested.tm_mon ||
        tm.tm_hour != requested.tm_hour || tm.tm_min != requested.tm_min ||
        tm.tm_sec != requested.tm_sec) {
        throw Error(ErrorKind::InvalidArgument, "bad UTC timestamp '" + s + "'");
    }
    return Timestamp{std::chrono::seconds{secs}};
}

std::string to_jsonl(const CountRecord& record) {
    json j;
    j["q"] = canonical_query_string(record.query);
    j["n"] = record.count.value();
    j["src"] = record.source_id;
    j["t"] = format_utc(record.observed_at);
    // nlohmann orders keys alphabetically; emit the documented order instead.
    return "{\"q\":" + j["q"].dump() + ",\"n\":" + j["n"].dump() + ",\"src\":" + j["src"].dump() +
           ",\"t\":" + j["t"].dump() + "}";
}

CountRecord from_jsonl(std::string_view line) {
    json j;
    try {
        j = json::parse(line);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("malformed count record: ") + e.what());
    }
    if (!j.is_object() || !j.contains("q") || !j["q"].is_string() || !j.contains("n") ||
        !j["n"].is_number_integer()) {
        throw Error(ErrorKind::InvalidArgument, "count record needs string \"q\" and integer \"n\"");
    }
    if (j["n"].is_number_unsigned() && j["n"].get<std::uint64_t>() >
                                           static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
        throw Error(ErrorKind::Overflow, "count record value exceeds 2^63-1");
    }
    CountRecord r{parse_query(j["q"].get<std::string>()), Count{j["n"].get<std::int64_t>()}, {}, kSentinelEpoch};
    if (j.contains("src")) {
        if (!j["src"].is_string()) throw Error(ErrorKind::InvalidArgument, "\"src\" must be a string");
        r.source_id = j["src"].get<std::string>();
    }
    if (j.contains("t")) {
        if (!j["t"].is_string()) throw Error(ErrorKind::InvalidArgument, "\"t\" must be a string");
        r.observed_at = parse_utc(j["t"].get<std::string>());
    }
    return r;
}

namespace {

bool skippable(const std::string& line) {
    const auto first = line.find_first_not_of(" \t\r");
    return first == std::string::npos || line[first] == '#';
}

template <typename Fn>
void for_each_record(const std::filesystem::path& path, Fn&& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::StorageFailure, "cannot open " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (skippable(line)) continue;
        try {
            fn(from_jsonl(line));
        } catch (const Error& e) {
            throw Error(e.kind(), path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

} // namespace

FixtureTable FixtureTable::load(const std::filesystem::path& path) {
    FixtureTable table;
    for_each_record(path, [&](CountRecord r) {
        const auto q = canonical_query_string(r.query);
        if (!table.insert(std::move(r))) {
            throw Error(ErrorKind::InvalidArgument, "duplicate fixture entry for `" + q + "`");
        }
    });
    return table;
}

void FixtureTable::save(const std::filesystem::path& path) const {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::StorageFailure, "cannot write " + tmp.string());
        for (const auto& r : records_) out << to_jsonl(r) << '\n';
        out.flush();
        if (!out) throw Error(ErrorKind::StorageFailure, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error(ErrorKind::StorageFailure, "cannot move fixture into " + path.string() + ": " + ec.message());
}

bool FixtureTable::insert(CountRecord record) {
    auto key = canonical_query_string(record.query);
    if (by_query_.contains(key)) return false;
    by_query_.emplace(std::move(key), records_.size());
    records_.push_back(std::move(record));
    return true;
}

const CountRecord* FixtureTable::find(const std::string& canonical) const {
    const auto it = by_query_.find(canonical);
    return it == by_query_.end() ? nullptr : &records_[it->second];
}

FixtureProvider::FixtureProvider(FixtureTable table, std::string source)
    : table_(std::move(table)), source_(std::move(source)) {}

FixtureProvider FixtureProvider::from_file(const std::filesystem::path& path) {
    return FixtureProvider(FixtureTable::load(path), path.filename().string());
}

CountRecord FixtureProvider::get_count(const Query& query, FetchMode) {
    const auto key = canonical_query_string(query);
    const auto* record = table_.find(key);
    if (record == nullptr) {
        throw Error(ErrorKind::MissingFixtureEntry, "no fixture entry for `" + key + "`");
    }
    return *record;
}

LocalIndexProvider::LocalIndexProvider(std::shared_ptr<const CorpusIndex> index, std::string source)
    : index_(std::move(index)), source_(std::move(source)) {
    if (!index_) throw Error(ErrorKind::InvalidArgument, "local provider needs an index");
}

CountRecord LocalIndexProvider::get_count(const Query& query, FetchMode) {
    return CountRecord{query, index_->count(query), source_, kSentinelEpoch};
}

CountCache::CountCache(std::filesystem::path path) : path_(std::move(path)) {
    std::error_code ec;
    if (std::filesystem::exists(path_, ec)) {
        for_each_record(path_, [&](const CountRecord& r) { remember(r); });
    } else {
        std::ofstream create(path_, std::ios::binary | std::ios::app);
        if (!create) throw Error(ErrorKind::StorageFailure, "cannot create cache journal " + path_.string());
    }
}

void CountCache::remember(const CountRecord& record) {
    ++journal_size_;
    auto key = canonical_query_string(record.query);
    const auto it = latest_.find(key);
    // Equal timestamps: the later append wins.
    if (it == latest_.end()) {
        latest_.emplace(std::move(key), record);
    } else if (record.observed_at >= it->second.observed_at) {
        it->second = record;
    }
}

void CountCache::put(const CountRecord& record) {
    const auto line = to_jsonl(record) + "\n";
    std::unique_lock lock(mutex_);
    std::ofstream out(path_, std::ios::binary | std::ios::app);
    out << line;
    out.flush();
    if (!out) throw Error(ErrorKind::StorageFailure, "cannot append to cache journal " + path_.string());
    remember(record);
}

std::optional<CountRecord> CountCache::get(const std::string& canonical) const {
    std::shared_lock lock(mutex_);
    const auto it = latest_.find(canonical);
    if (it == latest_.end()) return std::nullopt;
    return it->second;
}

std::size_t CountCache::journal_size() const {
    std::shared_lock lock(mutex_);
    return journal_size_;
}

ProviderConfig ProviderConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::StorageFailure, "cannot open web provider config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, path.string() + ": " + e.what());
    }
    ProviderConfig c;
    try {
        c.endpoint_url = j.at("endpoint_url").get<std::string>();
        c.api_key_env_name = j.value("api_key_env", c.api_key_env_name);
        c.api_key_header = j.value("api_key_header", c.api_key_header);
        c.count_field_path = j.value("count_field", c.count_field_path);
        c.min_request_interval = std::chrono::milliseconds{
            j.value("min_request_interval_ms", static_cast<std::int64_t>(c.min_request_interval.count()))};
        c.max_retries = j.value("max_retries", c.max_retries);
        c.timeout = std::chrono::milliseconds{j.value("timeout_ms", static_cast<std::int64_t>(c.timeout.count()))};
        c.source_id = j.value("source_id", c.source_id);
        if (j.contains("cache")) {
            std::filesystem::path cache = j["cache"].get<std::string>();
            c.cache_path = cache.is_relative() ? path.parent_path() / cache : cache;
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, path.string() + ": " + e.what());
    }
    c.validate();
    return c;
}

void ProviderConfig::validate() const {
    if (endpoint_url.find("{query}") == std::string::npos) {
        throw Error(ErrorKind::InvalidArgument, "endpoint_url must contain a {query} placeholder");
    }
    if (min_request_interval.count() <= 0) {
        throw Error(ErrorKind::InvalidArgument, "min_request_interval must be positive");
    }
    if (max_retries < 0) throw Error(ErrorKind::InvalidArgument, "max_retries must be non-negative");
}

std::chrono::steady_clock::time_point SystemClock::now() { return std::chrono::steady_clock::now(); }

Timestamp SystemClock::utc_now() {
    return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

void SystemClock::sleep_for(std::chrono::milliseconds duration) { std::this_thread::sleep_for(duration); }

std::string percent_encode(std::string_view text) {
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(text.size() * 3);
    for (const unsigned char c : text) {
        if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' ||
            c == '_' || c == '.' || c == '~') {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 15]);
        }
    }
    return out;
}

Count extract_count(const std::string& body, const std::string& field_path) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::MalformedResponse, std::string("response is not JSON: ") + e.what());
    }
    const json* node = &j;
    std::size_t start = 0;
    while (start <= field_path.size() && !field_path.empty()) {
        const auto dot = field_path.find('.', start);
        const auto key = field_path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (node->is_object() && node->contains(key)) {
            node = &(*node)[key];
        } else if (node->is_array() && !key.empty() &&
                   key.find_first_not_of("0123456789") == std::string::npos &&
                   std::stoull(key) < node->size()) {
            node = &(*node)[std::stoull(key)];
        } else {
            throw Error(ErrorKind::MalformedResponse, "response has no field '" + field_path + "'");
        }
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    if (node->is_number_unsigned() || (node->is_number_integer() && node->get<std::int64_t>() >= 0)) {
        const auto v = node->get<std::uint64_t>();
        if (v > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
            throw Error(ErrorKind::MalformedResponse, "count out of range");
        }
        return Count{static_cast<std::int64_t>(v)};
    }
    if (node->is_string()) {
        std::string digits;
        for (const char c : node->get<std::string>()) {
            if (c == ',') continue;
            if (c < '0' || c > '9') {
                throw Error(ErrorKind::MalformedResponse, "count field is not a non-negative integer");
            }
            digits.push_back(c);
        }
        if (digits.empty() || digits.size() > 18) {
            throw Error(ErrorKind::MalformedResponse, "count field is not a representable integer");
        }
        return Count{std::stoll(digits)};
    }
    throw Error(ErrorKind::MalformedResponse, "count field is not a non-negative integer");
}

WebCountProvider::WebCountProvider(ProviderConfig config, HttpTransport transport,
                                   std::shared_ptr<Clock> clock, std::shared_ptr<CountCache> cache)
    : config_(std::move(config)), transport_(std::move(transport)), clock_(std::move(clock)),
      cache_(std::move(cache)) {
    config_.validate();
    if (!transport_ || !clock_) throw Error(ErrorKind::InvalidArgument, "web provider needs a transport and a clock");
    headers_.emplace_back("Accept", "application/json");
    if (!config_.api_key_env_name.empty()) {
        const char* key = std::getenv(config_.api_key_env_name.c_str());
        if (key == nullptr) {
            throw Error(ErrorKind::InvalidArgument,
                        "environment variable " + config_.api_key_env_name + " is not set");
        }
        headers_.emplace_back(config_.api_key_header, key);
    }
}

WebCountProvider::WebCountProvider(ProviderConfig config)
    : WebCountProvider(config, make_http_transport(config.timeout), std::make_shared<SystemClock>(),
                       config.cache_path ? std::make_shared<CountCache>(*config.cache_path) : nullptr) {}

std::string WebCountProvider::request_url(const Query& query) const {
    const auto encoded = percent_encode(canonical_query_string(query));
    std::string url = config_.endpoint_url;
    static constexpr std::string_view placeholder = "{query}";
    for (auto pos = url.find(placeholder); pos != std::string::npos;
         pos = url.find(placeholder, pos + encoded.size())) {
        url.replace(pos, placeholder.size(), encoded);
    }
    return url;
}

std::size_t WebCountProvider::requests_issued() const {
    std::lock_guard lock(dispatch_mutex_);
    return requests_issued_;
}

HttpResponse WebCountProvider::dispatch(const std::string& url, int attempt) {
    // Retries back off by doubling the base spacing.
    const auto spacing = config_.min_request_interval * (1LL << std::min(attempt, 10));
    if (last_request_) {
        const auto elapsed = clock_->now() - *last_request_;
        if (elapsed < spacing) {
            clock_->sleep_for(std::chrono::ceil<std::chrono::milliseconds>(spacing - elapsed));
        }
    }
    last_request_ = clock_->now();
    ++requests_issued_;
    return transport_(url, headers_);
}

CountRecord WebCountProvider::get_count(const Query& query, FetchMode mode) {
    const auto key = canonical_query_string(query);
    if (cache_ && mode == FetchMode::PreferCache) {
        if (auto hit = cache_->get(key)) return *hit;
    }
    const auto url = request_url(query);
    std::string last_error;
    {
        std::lock_guard lock(dispatch_mutex_);
        for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
            const auto response = dispatch(url, attempt);
            if (response.status == 200) {
                CountRecord record{query, extract_count(response.body, config_.count_field_path),
                                   config_.source_id, clock_->utc_now()};
                if (cache_) cache_->put(record);
                return record;
            }
            const bool retryable = response.status == 0 || response.status == 429 || response.status >= 500;
            last_error = response.status == 0 ? "no response (" + response.error + ")"
                                               : "HTTP " + std::to_string(response.status);
            if (!retryable) break;
        }
    }
    throw Error(ErrorKind::TransportFailure, "`" + key + "`: " + last_error);
}

FixtureTable record_fixture(CountProvider& provider, const std::vector<Query>& queries,
                            const std::filesystem::path& out) {
    FixtureTable table;
    for (const auto& q : queries) {
        const auto key = canonical_query_string(q);
        if (table.find(key) != nullptr) continue;
        try {
            table.insert(provider.get_count(q));
        } catch (const Error& e) {
            throw Error(e.kind(), "query `" + key + "`: " + e.what());
        }
    }
    table.save(out);
    return table;
}

} // namespace meaningbound
