#pragma once

#include <string>
#include <vector>

#include "toyaudit/http_transaction.hpp"

namespace toyaudit {

/// Parses a JSONL transaction log, one object per line.
/// Throws SchemaError (with 1-based line number) on the first malformed line.
std::vector<HttpTransaction> parse_transaction_log(const std::string& jsonl_text);

/// Emits one JSON object per line with the exact schema field order:
/// ts_start, ts_end, src_ip, src_port, dst_ip, dst_port, host, tls, method,
/// path, req_headers, status, resp_headers, req_body_b64, resp_body_b64,
/// req_bytes, resp_bytes. Round-trips losslessly with parse_transaction_log.
std::string write_transaction_log(const std::vector<HttpTransaction>& txns);

std::vector<HttpTransaction> load_transaction_log(const std::string& path);

}  // namespace toyaudit
