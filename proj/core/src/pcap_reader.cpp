#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <tuple>

#include "toyaudit/errors.hpp"
#include "toyaudit/pcap.hpp"

namespace toyaudit {

namespace {

constexpr uint32_t kMagicLe = 0xa1b2c3d4u;     // little-endian file, microseconds
constexpr uint32_t kMagicBe = 0xd4c3b2a1u;     // byte-swapped file, microseconds
constexpr uint32_t kMagicNsLe = 0xa1b23c4du;   // little-endian file, nanoseconds
constexpr uint32_t kMagicNsBe = 0x4d3cb2a1u;   // byte-swapped file, nanoseconds
constexpr uint32_t kLinkTypeEthernet = 1;
constexpr uint16_t kEthertypeIpv4 = 0x0800;
constexpr uint8_t kProtoTcp = 6;

constexpr uint8_t kTcpFin = 0x01;
constexpr uint8_t kTcpSyn = 0x02;
constexpr uint8_t kTcpRst = 0x04;

struct Reader {
    const unsigned char* data;
    std::size_t size;
    std::size_t pos{0};
    bool swap{false};

    std::size_t remaining() const { return size - pos; }

    uint32_t u32() {
        uint32_t v;
        std::memcpy(&v, data + pos, 4);
        pos += 4;
        return swap ? __builtin_bswap32(v) : v;
    }
    uint16_t u16() {
        uint16_t v;
        std::memcpy(&v, data + pos, 2);
        pos += 2;
        return swap ? __builtin_bswap16(v) : v;
    }
};

uint16_t be16(const unsigned char* p) { return static_cast<uint16_t>((p[0] << 8) | p[1]); }
uint32_t be32(const unsigned char* p) {
    return (static_cast<uint32_t>(p[0]) << 24) | (static_cast<uint32_t>(p[1]) << 16) |
           (static_cast<uint32_t>(p[2]) << 8) | static_cast<uint32_t>(p[3]);
}

std::string ipv4_to_string(uint32_t addr) {
    return std::to_string((addr >> 24) & 0xFF) + "." + std::to_string((addr >> 16) & 0xFF) + "." +
           std::to_string((addr >> 8) & 0xFF) + "." + std::to_string(addr & 0xFF);
}

struct Segment {
    double ts;
    uint32_t seq;
    uint8_t flags;
    std::string payload;
};

struct Endpoint {
    uint32_t ip;
    uint16_t port;
    auto operator<=>(const Endpoint&) const = default;
};

struct FlowKey {
    Endpoint a, b;  // a = initiator of the first packet seen
    auto operator<=>(const FlowKey&) const = default;
};

// One direction of a TCP stream, reassembled strictly in order.
struct DirectionState {
    bool seq_known{false};
    uint32_t next_seq{0};
    std::string bytes;
    // (offset into bytes, packet timestamp) for each data segment start
    std::vector<std::pair<std::size_t, double>> stamps;
    uint64_t payload_bytes{0};
    double first_ts{0};
    double last_ts{0};
    bool any_packet{false};
};

struct Connection {
    DirectionState fwd;  // initiator -> responder
    DirectionState rev;
    bool broken{false};
    std::string broken_reason;
};

// seq arithmetic with wraparound
bool seq_eq(uint32_t a, uint32_t b) { return a == b; }
bool seq_lt(uint32_t a, uint32_t b) { return static_cast<int32_t>(a - b) < 0; }

void feed_segment(DirectionState& dir, Connection& conn, const Segment& seg) {
    if (!dir.any_packet) {
        dir.any_packet = true;
        dir.first_ts = seg.ts;
    }
    dir.last_ts = std::max(dir.last_ts, seg.ts);

    uint32_t seq = seg.seq;
    if (seg.flags & kTcpSyn) {
        dir.seq_known = true;
        dir.next_seq = seq + 1;  // SYN consumes one sequence number
        return;
    }
    if (!dir.seq_known) {
        // no SYN observed; adopt the first data segment's sequence
        dir.seq_known = true;
        dir.next_seq = seq;
    }
    if (!seg.payload.empty()) {
        if (!seq_eq(seq, dir.next_seq)) {
            conn.broken = true;
            conn.broken_reason = seq_lt(seq, dir.next_seq) ? "retransmitted or overlapping segment"
                                                           : "out-of-order segment (gap)";
            return;
        }
        dir.stamps.emplace_back(dir.bytes.size(), seg.ts);
        dir.bytes += seg.payload;
        dir.payload_bytes += seg.payload.size();
        dir.next_seq = seq + static_cast<uint32_t>(seg.payload.size());
    }
    if (seg.flags & kTcpFin) dir.next_seq += 1;
}

double ts_at_offset(const DirectionState& dir, std::size_t offset) {
    double ts = dir.first_ts;
    for (const auto& [off, t] : dir.stamps) {
        if (off <= offset) ts = t;
        else break;
    }
    return ts;
}

// --- minimal HTTP/1.1 message scanning over a reassembled byte stream ---

struct ParsedMessage {
    std::string start_line;
    HeaderList headers;
    std::string body;
    std::size_t begin_offset{0};
    std::size_t total_size{0};
};

std::optional<std::size_t> find_crlfcrlf(const std::string& s, std::size_t from) {
    auto pos = s.find("\r\n\r\n", from);
    if (pos == std::string::npos) return std::nullopt;
    return pos;
}

// Returns messages parsed from the stream; sets truncated when the stream ends
// mid-message (incomplete tail is dropped).
std::vector<ParsedMessage> scan_messages(const std::string& stream, bool& unsupported_encoding) {
    std::vector<ParsedMessage> out;
    std::size_t pos = 0;
    unsupported_encoding = false;
    while (pos < stream.size()) {
        auto head_end = find_crlfcrlf(stream, pos);
        if (!head_end) break;
        ParsedMessage msg;
        msg.begin_offset = pos;
        std::size_t line_end = stream.find("\r\n", pos);
        msg.start_line = stream.substr(pos, line_end - pos);
        std::size_t cursor = line_end + 2;
        std::size_t content_length = 0;
        while (cursor < *head_end) {
            std::size_t eol = stream.find("\r\n", cursor);
            std::string line = stream.substr(cursor, eol - cursor);
            cursor = eol + 2;
            auto colon = line.find(':');
            if (colon == std::string::npos) continue;
            std::string name = line.substr(0, colon);
            std::size_t vstart = line.find_first_not_of(' ', colon + 1);
            std::string value = vstart == std::string::npos ? "" : line.substr(vstart);
            msg.headers.emplace_back(name, value);
            std::string lower = name;
            std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
            if (lower == "content-length") {
                try {
                    content_length = std::stoull(value);
                } catch (const std::exception&) {
                    content_length = 0;
                }
            } else if (lower == "transfer-encoding") {
                unsupported_encoding = true;
            }
        }
        if (unsupported_encoding) return out;
        std::size_t body_begin = *head_end + 4;
        if (body_begin + content_length > stream.size()) break;  // incomplete tail
        msg.body = stream.substr(body_begin, content_length);
        msg.total_size = body_begin + content_length - pos;
        pos = body_begin + content_length;
        out.push_back(std::move(msg));
    }
    return out;
}

bool looks_like_tls(const std::string& stream) {
    // TLS record layer: handshake(22), version 3.x
    return stream.size() >= 3 && static_cast<unsigned char>(stream[0]) == 0x16 &&
           static_cast<unsigned char>(stream[1]) == 0x03;
}

// Extracts the server_name extension from a ClientHello, if present.
std::optional<std::string> parse_sni(const std::string& stream) {
    const auto* p = reinterpret_cast<const unsigned char*>(stream.data());
    std::size_t n = stream.size();
    if (n < 5 + 4) return std::nullopt;
    std::size_t rec_len = be16(p + 3);
    std::size_t end = std::min(n, 5 + rec_len);
    std::size_t pos = 5;
    if (p[pos] != 0x01) return std::nullopt;  // not a ClientHello
    pos += 4;                                  // handshake type + 24-bit length
    pos += 2 + 32;                             // client version + random
    if (pos >= end) return std::nullopt;
    pos += 1 + p[pos];  // session id
    if (pos + 2 > end) return std::nullopt;
    pos += 2 + be16(p + pos);  // cipher suites
    if (pos + 1 > end) return std::nullopt;
    pos += 1 + p[pos];  // compression methods
    if (pos + 2 > end) return std::nullopt;
    std::size_t ext_total = be16(p + pos);
    pos += 2;
    std::size_t ext_end = std::min(end, pos + ext_total);
    while (pos + 4 <= ext_end) {
        uint16_t ext_type = be16(p + pos);
        uint16_t ext_len = be16(p + pos + 2);
        pos += 4;
        if (pos + ext_len > ext_end) return std::nullopt;
        if (ext_type == 0x0000 && ext_len >= 5) {
            // server_name list: u16 list_len, u8 type, u16 name_len, name
            uint16_t name_len = be16(p + pos + 3);
            if (5 + name_len <= ext_len) {
                return std::string(reinterpret_cast<const char*>(p + pos + 5), name_len);
            }
            return std::nullopt;
        }
        pos += ext_len;
    }
    return std::nullopt;
}

}  // namespace

PcapParseResult parse_pcap(std::string_view capture_bytes) {
    if (capture_bytes.size() < 24) throw MalformedCapture("truncated global header");
    Reader r{reinterpret_cast<const unsigned char*>(capture_bytes.data()), capture_bytes.size()};

    uint32_t magic;
    std::memcpy(&magic, r.data, 4);
    r.pos = 4;
    bool nanos = false;
    if (magic == kMagicLe) {
    } else if (magic == kMagicNsLe) {
        nanos = true;
    } else if (magic == kMagicBe) {
        r.swap = true;
    } else if (magic == kMagicNsBe) {
        r.swap = true;
        nanos = true;
    } else {
        throw MalformedCapture("bad magic number");
    }
    r.u16();  // version major
    r.u16();  // version minor
    r.u32();  // thiszone
    r.u32();  // sigfigs
    r.u32();  // snaplen
    uint32_t link_type = r.u32();
    if (link_type != kLinkTypeEthernet) {
        throw UnsupportedLinkType("link type " + std::to_string(link_type) + " (only Ethernet supported)");
    }

    PcapParseResult result;
    std::map<FlowKey, Connection> connections;
    std::vector<FlowKey> connection_order;
    uint64_t skipped_packets = 0;

    while (r.remaining() > 0) {
        if (r.remaining() < 16) throw MalformedCapture("truncated packet record header");
        uint32_t ts_sec = r.u32();
        uint32_t ts_frac = r.u32();
        uint32_t incl_len = r.u32();
        uint32_t orig_len = r.u32();
        if (r.remaining() < incl_len) throw MalformedCapture("truncated packet data");
        const unsigned char* pkt = r.data + r.pos;
        r.pos += incl_len;

        double ts = static_cast<double>(ts_sec) + static_cast<double>(ts_frac) * (nanos ? 1e-9 : 1e-6);

        if (incl_len < orig_len) {
            ++skipped_packets;  // sliced packet; payload incomplete
            continue;
        }
        if (incl_len < 14) continue;
        uint16_t ethertype = be16(pkt + 12);
        if (ethertype != kEthertypeIpv4) {
            ++skipped_packets;
            continue;
        }
        const unsigned char* ip = pkt + 14;
        std::size_t ip_avail = incl_len - 14;
        if (ip_avail < 20 || (ip[0] >> 4) != 4) {
            ++skipped_packets;
            continue;
        }
        std::size_t ihl = static_cast<std::size_t>(ip[0] & 0x0F) * 4;
        uint16_t total_len = be16(ip + 2);
        uint16_t frag = be16(ip + 6);
        if ((frag & 0x3FFF) != 0) {  // MF flag or fragment offset set
            ++skipped_packets;
            continue;
        }
        if (ip[9] != kProtoTcp || total_len > ip_avail || ihl < 20 || total_len < ihl + 20) {
            ++skipped_packets;
            continue;
        }
        const unsigned char* tcp = ip + ihl;
        std::size_t tcp_off = static_cast<std::size_t>(tcp[12] >> 4) * 4;
        if (tcp_off < 20 || ihl + tcp_off > total_len) {
            ++skipped_packets;
            continue;
        }
        Endpoint src{be32(ip + 12), be16(tcp + 0)};
        Endpoint dst{be32(ip + 16), be16(tcp + 2)};
        Segment seg;
        seg.ts = ts;
        seg.seq = be32(tcp + 4);
        seg.flags = tcp[13];
        std::size_t payload_len = total_len - ihl - tcp_off;
        seg.payload.assign(reinterpret_cast<const char*>(tcp + tcp_off), payload_len);

        FlowKey fwd{src, dst};
        FlowKey rev{dst, src};
        auto it = connections.find(fwd);
        bool is_forward = true;
        if (it == connections.end()) {
            auto rit = connections.find(rev);
            if (rit != connections.end()) {
                it = rit;
                is_forward = false;
            } else {
                it = connections.emplace(fwd, Connection{}).first;
                connection_order.push_back(fwd);
            }
        }
        Connection& conn = it->second;
        if (conn.broken) continue;
        if (seg.flags & kTcpRst) continue;  // keep what was already assembled
        feed_segment(is_forward ? conn.fwd : conn.rev, conn, seg);
    }

    if (skipped_packets > 0) {
        result.warnings.push_back(std::to_string(skipped_packets) +
                                  " non-IPv4/TCP or fragmented packet(s) skipped");
    }

    for (const auto& key : connection_order) {
        Connection& conn = connections[key];
        const std::string src_ip = ipv4_to_string(key.a.ip);
        const std::string dst_ip = ipv4_to_string(key.b.ip);
        auto flow_label = [&] {
            return src_ip + ":" + std::to_string(key.a.port) + " -> " + dst_ip + ":" +
                   std::to_string(key.b.port);
        };
        if (conn.broken) {
            result.warnings.push_back("stream " + flow_label() + " skipped: " + conn.broken_reason);
            continue;
        }

        // opaque TLS stream: one transaction per connection, host from SNI
        if (looks_like_tls(conn.fwd.bytes)) {
            HttpTransaction txn;
            txn.ts_start = conn.fwd.first_ts;
            txn.ts_end = std::max(conn.fwd.last_ts, conn.rev.any_packet ? conn.rev.last_ts : conn.fwd.last_ts);
            txn.src_ip = src_ip;
            txn.src_port = key.a.port;
            txn.dst_ip = dst_ip;
            txn.dst_port = key.b.port;
            auto sni = parse_sni(conn.fwd.bytes);
            txn.host = sni ? *sni : dst_ip;
            txn.tls = true;
            txn.method = HttpMethod::Other;
            txn.status = 0;
            txn.req_bytes = conn.fwd.payload_bytes;
            txn.resp_bytes = conn.rev.payload_bytes;
            result.transactions.push_back(std::move(txn));
            continue;
        }

        bool bad_encoding = false;
        auto requests = scan_messages(conn.fwd.bytes, bad_encoding);
        if (bad_encoding) {
            result.warnings.push_back("stream " + flow_label() + " skipped: unsupported transfer encoding");
            continue;
        }
        auto responses = scan_messages(conn.rev.bytes, bad_encoding);
        if (bad_encoding) {
            result.warnings.push_back("stream " + flow_label() + " skipped: unsupported transfer encoding");
            continue;
        }

        // pipelined requests pair FIFO with responses
        for (std::size_t i = 0; i < requests.size(); ++i) {
            const ParsedMessage& req = requests[i];
            std::istringstream start(req.start_line);
            std::string method_str, path, version;
            start >> method_str >> path >> version;

            HttpTransaction txn;
            txn.ts_start = ts_at_offset(conn.fwd, req.begin_offset);
            txn.src_ip = src_ip;
            txn.src_port = key.a.port;
            txn.dst_ip = dst_ip;
            txn.dst_port = key.b.port;
            txn.tls = key.b.port == 443;  // decrypted view convention
            txn.method = method_from_string(method_str);
            txn.path = path;
            txn.req_headers = req.headers;
            txn.req_body = req.body;
            txn.req_bytes = req.total_size;
            txn.host = header_get(req.headers, "Host").value_or(dst_ip);

            if (i < responses.size()) {
                const ParsedMessage& resp = responses[i];
                int status = 0;
                std::istringstream rs(resp.start_line);
                std::string ver;
                rs >> ver >> status;
                txn.status = status;
                txn.resp_headers = resp.headers;
                txn.resp_body = resp.body;
                txn.resp_bytes = resp.total_size;
                txn.ts_end = ts_at_offset(conn.rev, resp.begin_offset + resp.total_size - 1);
            } else {
                txn.status = 0;
                txn.ts_end = ts_at_offset(conn.fwd, req.begin_offset + req.total_size - 1);
            }
            result.transactions.push_back(std::move(txn));
        }
        if (responses.size() > requests.size()) {
            result.warnings.push_back("stream " + flow_label() + ": " +
                                      std::to_string(responses.size() - requests.size()) +
                                      " unpaired response(s)");
        }
    }

    std::stable_sort(result.transactions.begin(), result.transactions.end(),
                     [](const HttpTransaction& a, const HttpTransaction& b) {
                         return a.ts_start < b.ts_start;
                     });
    return result;
}

PcapParseResult load_pcap(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open pcap file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string bytes = buf.str();
    return parse_pcap(bytes);
}

}  // namespace toyaudit
