#include "toyaudit/jsonl.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "toyaudit/base64.hpp"
#include "toyaudit/errors.hpp"

namespace toyaudit {

namespace {

using ojson = nlohmann::ordered_json;

HeaderList headers_from_json(const ojson& obj, std::size_t line_no, const char* field) {
    if (!obj.is_object()) {
        throw SchemaError(line_no, std::string(field) + " must be an object");
    }
    HeaderList out;
    for (const auto& [k, v] : obj.items()) {
        if (!v.is_string()) {
            throw SchemaError(line_no, std::string(field) + "." + k + " must be a string");
        }
        out.emplace_back(k, v.get<std::string>());
    }
    return out;
}

ojson headers_to_json(const HeaderList& headers) {
    ojson obj = ojson::object();
    for (const auto& [k, v] : headers) obj[k] = v;
    return obj;
}

template <typename T>
T require_field(const ojson& obj, const char* name, std::size_t line_no) {
    auto it = obj.find(name);
    if (it == obj.end()) {
        throw SchemaError(line_no, std::string("missing field: ") + name);
    }
    try {
        return it->get<T>();
    } catch (const ojson::exception&) {
        throw SchemaError(line_no, std::string("wrong type for field: ") + name);
    }
}

}  // namespace

std::vector<HttpTransaction> parse_transaction_log(const std::string& jsonl_text) {
    std::vector<HttpTransaction> out;
    std::istringstream in(jsonl_text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ojson obj;
        try {
            obj = ojson::parse(line);
        } catch (const ojson::parse_error& e) {
            throw SchemaError(line_no, std::string("invalid JSON: ") + e.what());
        }
        if (!obj.is_object()) throw SchemaError(line_no, "line is not a JSON object");

        HttpTransaction txn;
        txn.ts_start = require_field<double>(obj, "ts_start", line_no);
        txn.ts_end = require_field<double>(obj, "ts_end", line_no);
        txn.src_ip = require_field<std::string>(obj, "src_ip", line_no);
        txn.src_port = require_field<int>(obj, "src_port", line_no);
        txn.dst_ip = require_field<std::string>(obj, "dst_ip", line_no);
        txn.dst_port = require_field<int>(obj, "dst_port", line_no);
        txn.host = require_field<std::string>(obj, "host", line_no);
        txn.tls = require_field<bool>(obj, "tls", line_no);
        txn.method = method_from_string(require_field<std::string>(obj, "method", line_no));
        txn.path = require_field<std::string>(obj, "path", line_no);
        if (!obj.contains("req_headers")) throw SchemaError(line_no, "missing field: req_headers");
        txn.req_headers = headers_from_json(obj["req_headers"], line_no, "req_headers");
        txn.status = require_field<int>(obj, "status", line_no);
        if (!obj.contains("resp_headers")) throw SchemaError(line_no, "missing field: resp_headers");
        txn.resp_headers = headers_from_json(obj["resp_headers"], line_no, "resp_headers");
        try {
            txn.req_body = base64_decode(require_field<std::string>(obj, "req_body_b64", line_no));
            txn.resp_body = base64_decode(require_field<std::string>(obj, "resp_body_b64", line_no));
        } catch (const SchemaError&) {
            throw;
        } catch (const Error& e) {
            throw SchemaError(line_no, e.what());
        }
        txn.req_bytes = require_field<std::uint64_t>(obj, "req_bytes", line_no);
        txn.resp_bytes = require_field<std::uint64_t>(obj, "resp_bytes", line_no);
        out.push_back(std::move(txn));
    }
    return out;
}

std::string write_transaction_log(const std::vector<HttpTransaction>& txns) {
    std::string out;
    for (const auto& txn : txns) {
        ojson obj;
        obj["ts_start"] = txn.ts_start;
        obj["ts_end"] = txn.ts_end;
        obj["src_ip"] = txn.src_ip;
        obj["src_port"] = txn.src_port;
        obj["dst_ip"] = txn.dst_ip;
        obj["dst_port"] = txn.dst_port;
        obj["host"] = txn.host;
        obj["tls"] = txn.tls;
        obj["method"] = to_string(txn.method);
        obj["path"] = txn.path;
        obj["req_headers"] = headers_to_json(txn.req_headers);
        obj["status"] = txn.status;
        obj["resp_headers"] = headers_to_json(txn.resp_headers);
        obj["req_body_b64"] = base64_encode(txn.req_body);
        obj["resp_body_b64"] = base64_encode(txn.resp_body);
        obj["req_bytes"] = txn.req_bytes;
        obj["resp_bytes"] = txn.resp_bytes;
        out += obj.dump();
        out += '\n';
    }
    return out;
}

std::vector<HttpTransaction> load_transaction_log(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open transaction log: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_transaction_log(buf.str());
}

}  // namespace toyaudit
