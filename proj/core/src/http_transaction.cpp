#include "toyaudit/http_transaction.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <tuple>

namespace toyaudit {

namespace {

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

const char* status_reason(int status) {
    switch (status) {
        case 200: return "OK";
        case 301: return "Moved Permanently";
        case 400: return "Bad Request";
        case 401: return "Unauthorized";
        case 403: return "Forbidden";
        case 404: return "Not Found";
        case 410: return "Gone";
        case 500: return "Internal Server Error";
        default: return "Unknown";
    }
}

}  // namespace

std::string to_string(HttpMethod m) {
    switch (m) {
        case HttpMethod::Get: return "GET";
        case HttpMethod::Post: return "POST";
        case HttpMethod::Put: return "PUT";
        case HttpMethod::Delete: return "DELETE";
        case HttpMethod::Other: return "OTHER";
    }
    return "OTHER";
}

HttpMethod method_from_string(std::string_view s) {
    if (s == "GET") return HttpMethod::Get;
    if (s == "POST") return HttpMethod::Post;
    if (s == "PUT") return HttpMethod::Put;
    if (s == "DELETE") return HttpMethod::Delete;
    return HttpMethod::Other;
}

std::optional<std::string> header_get(const HeaderList& headers, std::string_view name) {
    const std::string want = ascii_lower(name);
    for (const auto& [k, v] : headers) {
        if (ascii_lower(k) == want) return v;
    }
    return std::nullopt;
}

std::string serialize_request(const HttpTransaction& txn) {
    std::string out;
    out += to_string(txn.method);
    out += ' ';
    out += txn.path.empty() ? "/" : txn.path;
    out += " HTTP/1.1\r\n";
    for (const auto& [k, v] : txn.req_headers) {
        out += k;
        out += ": ";
        out += v;
        out += "\r\n";
    }
    out += "\r\n";
    out += txn.req_body;
    return out;
}

std::string serialize_response(const HttpTransaction& txn) {
    if (txn.status == 0) return {};
    std::string out = "HTTP/1.1 " + std::to_string(txn.status) + " " + status_reason(txn.status) + "\r\n";
    for (const auto& [k, v] : txn.resp_headers) {
        out += k;
        out += ": ";
        out += v;
        out += "\r\n";
    }
    out += "\r\n";
    out += txn.resp_body;
    return out;
}

void finalize_transaction(HttpTransaction& txn) {
    auto ensure = [](HeaderList& headers, const std::string& name, const std::string& value) {
        for (auto& [k, v] : headers) {
            if (ascii_lower(k) == ascii_lower(name)) {
                v = value;
                return;
            }
        }
        headers.emplace_back(name, value);
    };
    if (!header_get(txn.req_headers, "Host") && !txn.host.empty()) {
        txn.req_headers.insert(txn.req_headers.begin(), {"Host", txn.host});
    }
    if (!txn.req_body.empty() || txn.method == HttpMethod::Post || txn.method == HttpMethod::Put) {
        ensure(txn.req_headers, "Content-Length", std::to_string(txn.req_body.size()));
    }
    if (txn.status != 0) {
        ensure(txn.resp_headers, "Content-Length", std::to_string(txn.resp_body.size()));
    }
    txn.req_bytes = serialize_request(txn).size();
    txn.resp_bytes = serialize_response(txn).size();
}

bool transactions_equal(const HttpTransaction& a, const HttpTransaction& b, double ts_tolerance) {
    if (std::fabs(a.ts_start - b.ts_start) > ts_tolerance) return false;
    if (std::fabs(a.ts_end - b.ts_end) > ts_tolerance) return false;
    return a.src_ip == b.src_ip && a.src_port == b.src_port && a.dst_ip == b.dst_ip &&
           a.dst_port == b.dst_port && a.host == b.host && a.tls == b.tls &&
           a.method == b.method && a.path == b.path && a.req_headers == b.req_headers &&
           a.status == b.status && a.resp_headers == b.resp_headers &&
           a.req_body == b.req_body && a.resp_body == b.resp_body &&
           a.req_bytes == b.req_bytes && a.resp_bytes == b.resp_bytes;
}

bool transaction_multisets_equal(std::vector<HttpTransaction> a, std::vector<HttpTransaction> b,
                                 double ts_tolerance) {
    if (a.size() != b.size()) return false;
    auto key_less = [](const HttpTransaction& x, const HttpTransaction& y) {
        return std::tie(x.ts_start, x.host, x.path, x.src_port, x.status) <
               std::tie(y.ts_start, y.host, y.path, y.src_port, y.status);
    };
    std::sort(a.begin(), a.end(), key_less);
    std::sort(b.begin(), b.end(), key_less);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!transactions_equal(a[i], b[i], ts_tolerance)) return false;
    }
    return true;
}

}  // namespace toyaudit
