#include <doctest.h>

#include <cstdint>
#include <cstring>
#include <string>

#include "toyaudit/errors.hpp"
#include "toyaudit/pcap.hpp"

#include "txn_fixtures.hpp"

using namespace toyaudit;

namespace {

void put_u16(std::string& out, std::uint16_t v) {  // big-endian (network fields)
    out.push_back(static_cast<char>(v >> 8));
    out.push_back(static_cast<char>(v & 0xff));
}

void put_u32le(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u32be(std::string& out, std::uint32_t v) {
    for (int i = 3; i >= 0; --i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::string pcap_header(std::uint32_t linktype) {
    std::string out;
    put_u32le(out, 0xa1b2c3d4u);
    put_u32le(out, 0x00040002u);  // version 2.4
    put_u32le(out, 0);
    put_u32le(out, 0);
    put_u32le(out, 262144);
    put_u32le(out, linktype);
    return out;
}

// one Ethernet/IPv4/TCP data frame, checksums zeroed (the parser reads fields)
std::string tcp_frame(std::uint32_t ts_sec, const std::string& payload, bool client_to_server,
                      std::uint32_t seq) {
    std::string frame;
    frame.append(12, '\0');       // MACs
    put_u16(frame, 0x0800);       // IPv4
    std::string ip;
    ip.push_back(0x45);           // v4, ihl 5
    ip.push_back(0);
    put_u16(ip, static_cast<std::uint16_t>(20 + 20 + payload.size()));
    put_u16(ip, 0);               // id
    put_u16(ip, 0x4000);          // DF
    ip.push_back(64);             // ttl
    ip.push_back(6);              // tcp
    put_u16(ip, 0);               // checksum (unchecked)
    const char* src = client_to_server ? "\xc0\xa8\x01\x32" : "\xcb\x00\x71\x09";
    const char* dst = client_to_server ? "\xcb\x00\x71\x09" : "\xc0\xa8\x01\x32";
    ip.append(src, 4);
    ip.append(dst, 4);
    std::string tcp;
    put_u16(tcp, client_to_server ? 50000 : 443);
    put_u16(tcp, client_to_server ? 443 : 50000);
    put_u32be(tcp, seq);
    put_u32be(tcp, 0);    // ack (ignored)
    tcp.push_back(0x50);  // data offset 5
    tcp.push_back(0x18);  // PSH|ACK
    put_u16(tcp, 65535);
    put_u16(tcp, 0);      // checksum (unchecked)
    put_u16(tcp, 0);      // urgent
    std::string pkt = frame + ip + tcp + payload;

    std::string rec;
    put_u32le(rec, ts_sec);
    put_u32le(rec, 0);
    put_u32le(rec, static_cast<std::uint32_t>(pkt.size()));
    put_u32le(rec, static_cast<std::uint32_t>(pkt.size()));
    return rec + pkt;
}

// minimal ClientHello carrying an SNI, wrapped in one TLS handshake record
std::string client_hello(const std::string& host) {
    std::string hello;
    hello.push_back(0x01);                       // ClientHello
    std::string body;
    put_u16(body, 0x0303);                       // version
    body.append(32, '\x42');                     // random
    body.push_back(0);                           // session id len
    put_u16(body, 2);                            // cipher suites len
    put_u16(body, 0x1301);
    body.push_back(1);                           // compression methods len
    body.push_back(0);
    std::string sni;
    put_u16(sni, static_cast<std::uint16_t>(host.size() + 3));  // server_name_list len
    sni.push_back(0);                                           // host_name type
    put_u16(sni, static_cast<std::uint16_t>(host.size()));
    sni += host;
    std::string ext;
    put_u16(ext, 0x0000);                        // server_name
    put_u16(ext, static_cast<std::uint16_t>(sni.size()));
    ext += sni;
    put_u16(body, static_cast<std::uint16_t>(ext.size()));
    body += ext;
    hello.push_back(0);
    put_u16(hello, static_cast<std::uint16_t>(body.size()));
    hello += body;
    std::string record;
    record.push_back(0x16);                      // handshake
    record.push_back(0x03);
    record.push_back(0x01);
    put_u16(record, static_cast<std::uint16_t>(hello.size()));
    record += hello;
    return record;
}

}  // namespace

TEST_CASE("header-only pcap parses to nothing") {
    const auto result = parse_pcap(pcap_header(1));
    CHECK(result.transactions.empty());
    CHECK(result.warnings.empty());
}

TEST_CASE("bad magic and truncated header are MalformedCapture") {
    CHECK_THROWS_AS(parse_pcap("short"), MalformedCapture);
    std::string junk = pcap_header(1);
    junk[0] = 'X';
    CHECK_THROWS_AS(parse_pcap(junk), MalformedCapture);
}

TEST_CASE("non-Ethernet link type is rejected") {
    CHECK_THROWS_AS(parse_pcap(pcap_header(113)), UnsupportedLinkType);
}

TEST_CASE("write_pcap round-trips emulated transactions") {
    auto get = fixtures::make_txn("api.toymaker.test", false, HttpMethod::Get, "/health", "",
                                  "{\"status\":\"ok\"}", 100.0);
    auto post = fixtures::make_txn("api.toymaker.test", true, HttpMethod::Post, "/api/drink",
                                   "{\"ml\":250}", "{\"total_ml\":250}", 101.0);
    post.src_port = 50001;
    finalize_transaction(post);
    const auto parsed = parse_pcap(write_pcap({get, post}));
    CHECK(parsed.warnings.empty());
    REQUIRE(parsed.transactions.size() == 2);
    CHECK(transaction_multisets_equal(parsed.transactions, {get, post}, 0.001));
    // decrypted-view convention: port 443 implies the tls flag
    CHECK(parsed.transactions[1].tls);
}

TEST_CASE("request without response keeps status 0") {
    auto txn = fixtures::make_txn("api.toymaker.test", false, HttpMethod::Get, "/health");
    txn.status = 0;
    txn.resp_headers.clear();
    txn.resp_body.clear();
    txn.ts_end = txn.ts_start;  // no response bytes to stamp
    finalize_transaction(txn);
    const auto parsed = parse_pcap(write_pcap({txn}));
    REQUIRE(parsed.transactions.size() == 1);
    CHECK(parsed.transactions[0].status == 0);
    CHECK(parsed.transactions[0].method == HttpMethod::Get);
    CHECK(parsed.transactions[0].resp_bytes == 0);
}

TEST_CASE("genuine TLS records stay opaque with the SNI as host") {
    std::string capture = pcap_header(1);
    capture += tcp_frame(500, client_hello("api.smartpet.test"), true, 1);
    const auto parsed = parse_pcap(capture);
    REQUIRE(parsed.transactions.size() == 1);
    const auto& txn = parsed.transactions[0];
    CHECK(txn.tls);
    CHECK(txn.host == "api.smartpet.test");
    CHECK(txn.method == HttpMethod::Other);
    CHECK(txn.status == 0);
    CHECK(txn.req_body.empty());
    CHECK(txn.req_bytes > 0);
}

TEST_CASE("out-of-order segments skip the stream with a warning") {
    std::string capture = pcap_header(1);
    // second half first: seq jumps ahead, then back
    capture += tcp_frame(500, "GET /a HT", true, 1);
    capture += tcp_frame(501, "1.1\r\nHost: h\r\n\r\n", true, 100);  // gap
    const auto parsed = parse_pcap(capture);
    CHECK(parsed.transactions.empty());
    REQUIRE(!parsed.warnings.empty());
}
