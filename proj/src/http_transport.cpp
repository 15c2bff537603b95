#include "meaningbound/providers.hpp"

#include <httplib.h>

namespace meaningbound {

HttpTransport make_http_transport(std::chrono::milliseconds timeout) {
    return [timeout](const std::string& url, const HttpHeaders& headers) -> HttpResponse {
        const auto scheme_end = url.find("://");
        if (scheme_end == std::string::npos) return HttpResponse{0, {}, "URL without scheme: " + url};
        const auto path_start = url.find('/', scheme_end + 3);
        const auto origin = url.substr(0, path_start);
        const auto target = path_start == std::string::npos ? std::string("/") : url.substr(path_start);

        httplib::Client client(origin);
        const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
        const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
        client.set_connection_timeout(secs.count(), usecs.count());
        client.set_read_timeout(secs.count(), usecs.count());
        client.set_follow_location(true);

        httplib::Headers h;
        for (const auto& [name, value] : headers) h.emplace(name, value);
        const auto result = client.Get(target, h);
        if (!result) return HttpResponse{0, {}, httplib::to_string(result.error())};
        return HttpResponse{result->status, result->body, {}};
    };
}

} // namespace meaningbound
