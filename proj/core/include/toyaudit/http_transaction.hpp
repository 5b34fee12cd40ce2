#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace toyaudit {

enum class HttpMethod { Get, Post, Put, Delete, Other };

std::string to_string(HttpMethod m);
HttpMethod method_from_string(std::string_view s);

/// Ordered list of header name/value pairs, preserving wire order.
using HeaderList = std::vector<std::pair<std::string, std::string>>;

/// One reassembled HTTP request/response pair, the normalized unit of analysis.
/// For TLS traffic this is the decrypted view; ciphertext never appears in bodies.
struct HttpTransaction {
    double ts_start{0.0};  // seconds since epoch
    double ts_end{0.0};
    std::string src_ip;
    int src_port{0};
    std::string dst_ip;
    int dst_port{0};
    std::string host;  // Host header, SNI, or dst_ip fallback
    bool tls{false};
    HttpMethod method{HttpMethod::Other};
    std::string path;
    HeaderList req_headers;
    int status{0};  // 0 = no response observed
    HeaderList resp_headers;
    std::string req_body;
    std::string resp_body;
    std::uint64_t req_bytes{0};
    std::uint64_t resp_bytes{0};

    bool operator==(const HttpTransaction&) const = default;
};

/// Case-insensitive header lookup; returns the first match.
std::optional<std::string> header_get(const HeaderList& headers, std::string_view name);

/// Serializes the request exactly as the pcap writer puts it on the wire.
std::string serialize_request(const HttpTransaction& txn);

/// Serializes the response; empty string when status == 0.
std::string serialize_response(const HttpTransaction& txn);

/// Fills req_bytes/resp_bytes from the serialized forms and ensures the
/// Host and Content-Length headers are present and consistent.
void finalize_transaction(HttpTransaction& txn);

/// Field-wise equality with timestamps compared within ts_tolerance seconds.
bool transactions_equal(const HttpTransaction& a, const HttpTransaction& b, double ts_tolerance);

/// Multiset equality under transactions_equal.
bool transaction_multisets_equal(std::vector<HttpTransaction> a, std::vector<HttpTransaction> b,
                                 double ts_tolerance);

}  // namespace toyaudit
