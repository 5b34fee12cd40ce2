#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "toyaudit/http_transaction.hpp"

namespace toyaudit {

struct PcapParseResult {
    std::vector<HttpTransaction> transactions;  // ordered by ts_start
    std::vector<std::string> warnings;          // skipped streams, unpaired responses, ...
};

/// Parses a classic libpcap capture (Ethernet link type, IPv4/TCP only) and
/// reassembles HTTP/1.1 transactions. Streams with out-of-order or overlapping
/// segments are skipped and reported in warnings. Plaintext payloads on port
/// 443 are treated as decrypted TLS views (tls flag set); genuine TLS record
/// streams are recorded opaque with the host taken from the ClientHello SNI.
///
/// Throws MalformedCapture or UnsupportedLinkType.
PcapParseResult parse_pcap(std::string_view capture_bytes);

PcapParseResult load_pcap(const std::string& path);

/// Writes the transactions as a classic libpcap capture with synthetic
/// Ethernet/IPv4/TCP framing. The HTTP bytes on the wire are exactly
/// serialize_request/serialize_response, so parse_pcap round-trips the input.
/// TLS-flagged transactions are written as decrypted views on port 443.
std::string write_pcap(const std::vector<HttpTransaction>& txns);

}  // namespace toyaudit
