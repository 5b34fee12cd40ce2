#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <tuple>
#include <vector>

#include "toyaudit/pcap.hpp"

namespace toyaudit {

namespace {

constexpr std::size_t kSegmentSize = 1460;

void put_u16be(std::string& out, uint16_t v) {
    out.push_back(static_cast<char>(v >> 8));
    out.push_back(static_cast<char>(v & 0xFF));
}

void put_u32be(std::string& out, uint32_t v) {
    out.push_back(static_cast<char>(v >> 24));
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>(v & 0xFF));
}

void put_u32le(std::string& out, uint32_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    out.push_back(static_cast<char>(v >> 24));
}

void put_u16le(std::string& out, uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>(v >> 8));
}

uint32_t parse_ipv4(const std::string& dotted) {
    uint32_t parts[4] = {0, 0, 0, 0};
    std::size_t idx = 0;
    uint32_t cur = 0;
    bool any = false;
    for (char c : dotted) {
        if (c == '.') {
            if (idx < 3) parts[idx++] = cur;
            cur = 0;
            any = false;
        } else if (c >= '0' && c <= '9') {
            cur = cur * 10 + static_cast<uint32_t>(c - '0');
            any = true;
        }
    }
    if (any && idx < 4) parts[idx] = cur;
    return (parts[0] << 24) | (parts[1] << 16) | (parts[2] << 8) | parts[3];
}

uint16_t ones_complement_sum(const unsigned char* data, std::size_t len, uint32_t initial) {
    uint32_t sum = initial;
    for (std::size_t i = 0; i + 1 < len; i += 2) {
        sum += static_cast<uint32_t>((data[i] << 8) | data[i + 1]);
    }
    if (len % 2 == 1) sum += static_cast<uint32_t>(data[len - 1] << 8);
    while (sum >> 16) sum = (sum & 0xFFFF) + (sum >> 16);
    return static_cast<uint16_t>(~sum & 0xFFFF);
}

struct Packet {
    double ts;
    uint64_t order;  // insertion index, stable tiebreak
    std::string frame;
};

class FrameBuilder {
  public:
    void add(std::vector<Packet>& sink, double ts, uint32_t src_ip, uint16_t src_port,
             uint32_t dst_ip, uint16_t dst_port, uint32_t seq, uint32_t ack, uint8_t flags,
             std::string_view payload) {
        std::string ip_and_tcp;
        const uint16_t total_len = static_cast<uint16_t>(20 + 20 + payload.size());

        // IPv4 header
        ip_and_tcp.push_back(0x45);
        ip_and_tcp.push_back(0x00);
        put_u16be(ip_and_tcp, total_len);
        put_u16be(ip_and_tcp, ip_id_++);
        put_u16be(ip_and_tcp, 0x4000);  // don't fragment
        ip_and_tcp.push_back(64);       // ttl
        ip_and_tcp.push_back(6);        // tcp
        put_u16be(ip_and_tcp, 0);       // checksum placeholder
        put_u32be(ip_and_tcp, src_ip);
        put_u32be(ip_and_tcp, dst_ip);
        uint16_t ip_csum = ones_complement_sum(
            reinterpret_cast<const unsigned char*>(ip_and_tcp.data()), 20, 0);
        ip_and_tcp[10] = static_cast<char>(ip_csum >> 8);
        ip_and_tcp[11] = static_cast<char>(ip_csum & 0xFF);

        // TCP header
        std::string tcp;
        put_u16be(tcp, src_port);
        put_u16be(tcp, dst_port);
        put_u32be(tcp, seq);
        put_u32be(tcp, ack);
        tcp.push_back(0x50);  // data offset 5 words
        tcp.push_back(static_cast<char>(flags));
        put_u16be(tcp, 65535);  // window
        put_u16be(tcp, 0);      // checksum placeholder
        put_u16be(tcp, 0);      // urgent
        tcp.append(payload);

        // pseudo-header for the TCP checksum
        std::string pseudo;
        put_u32be(pseudo, src_ip);
        put_u32be(pseudo, dst_ip);
        pseudo.push_back(0);
        pseudo.push_back(6);
        put_u16be(pseudo, static_cast<uint16_t>(tcp.size()));
        uint32_t partial = 0;
        for (std::size_t i = 0; i + 1 < pseudo.size(); i += 2) {
            partial += static_cast<uint32_t>((static_cast<unsigned char>(pseudo[i]) << 8) |
                                             static_cast<unsigned char>(pseudo[i + 1]));
        }
        uint16_t tcp_csum =
            ones_complement_sum(reinterpret_cast<const unsigned char*>(tcp.data()), tcp.size(), partial);
        tcp[16] = static_cast<char>(tcp_csum >> 8);
        tcp[17] = static_cast<char>(tcp_csum & 0xFF);

        std::string frame;
        frame.append("\x02\x00\x00\x00\x00\x02", 6);  // dst mac
        frame.append("\x02\x00\x00\x00\x00\x01", 6);  // src mac
        put_u16be(frame, 0x0800);
        frame += ip_and_tcp;
        frame += tcp;
        sink.push_back(Packet{ts, order_++, std::move(frame)});
    }

  private:
    uint16_t ip_id_{1};
    uint64_t order_{0};
};

struct ConnKey {
    std::string src_ip;
    int src_port;
    std::string dst_ip;
    int dst_port;
    auto operator<=>(const ConnKey&) const = default;
};

}  // namespace

std::string write_pcap(const std::vector<HttpTransaction>& txns) {
    // group into connections by 5-tuple, ordered by first appearance
    std::map<ConnKey, std::vector<const HttpTransaction*>> conns;
    std::vector<ConnKey> conn_order;
    for (const auto& txn : txns) {
        ConnKey key{txn.src_ip, txn.src_port, txn.dst_ip, txn.dst_port};
        auto [it, inserted] = conns.try_emplace(key);
        if (inserted) conn_order.push_back(key);
        it->second.push_back(&txn);
    }

    std::vector<Packet> packets;
    FrameBuilder builder;

    for (const auto& key : conn_order) {
        auto& list = conns[key];
        std::stable_sort(list.begin(), list.end(),
                         [](const HttpTransaction* a, const HttpTransaction* b) {
                             return a->ts_start < b->ts_start;
                         });
        const uint32_t src = parse_ipv4(key.src_ip);
        const uint32_t dst = parse_ipv4(key.dst_ip);
        const auto sport = static_cast<uint16_t>(key.src_port);
        const auto dport = static_cast<uint16_t>(key.dst_port);

        uint32_t client_seq = 1001;
        uint32_t server_seq = 42001;
        const double t0 = std::max(0.0, list.front()->ts_start - 30e-6);
        builder.add(packets, t0, src, sport, dst, dport, client_seq - 1, 0, 0x02, {});  // SYN
        builder.add(packets, t0 + 10e-6, dst, dport, src, sport, server_seq - 1, client_seq,
                    0x12, {});  // SYN-ACK
        builder.add(packets, t0 + 20e-6, src, sport, dst, dport, client_seq, server_seq, 0x10, {});

        for (const HttpTransaction* txn : list) {
            const std::string req = serialize_request(*txn);
            for (std::size_t off = 0; off < req.size(); off += kSegmentSize) {
                std::string_view chunk(req.data() + off, std::min(kSegmentSize, req.size() - off));
                builder.add(packets, txn->ts_start, src, sport, dst, dport, client_seq, server_seq,
                            0x18, chunk);  // PSH|ACK
                client_seq += static_cast<uint32_t>(chunk.size());
            }
            if (txn->status == 0) continue;  // request that never got an answer
            const std::string resp = serialize_response(*txn);
            for (std::size_t off = 0; off < resp.size(); off += kSegmentSize) {
                std::string_view chunk(resp.data() + off, std::min(kSegmentSize, resp.size() - off));
                builder.add(packets, txn->ts_end, dst, dport, src, sport, server_seq, client_seq,
                            0x18, chunk);
                server_seq += static_cast<uint32_t>(chunk.size());
            }
        }
    }

    std::stable_sort(packets.begin(), packets.end(), [](const Packet& a, const Packet& b) {
        if (a.ts != b.ts) return a.ts < b.ts;
        return a.order < b.order;
    });

    std::string out;
    put_u32le(out, 0xa1b2c3d4u);
    put_u16le(out, 2);   // version 2.4
    put_u16le(out, 4);
    put_u32le(out, 0);   // thiszone
    put_u32le(out, 0);   // sigfigs
    put_u32le(out, 262144);
    put_u32le(out, 1);   // Ethernet

    for (const auto& pkt : packets) {
        double whole = std::floor(pkt.ts);
        auto usec = static_cast<uint32_t>(std::llround((pkt.ts - whole) * 1e6));
        auto sec = static_cast<uint32_t>(whole);
        if (usec >= 1000000) {
            sec += 1;
            usec -= 1000000;
        }
        put_u32le(out, sec);
        put_u32le(out, usec);
        put_u32le(out, static_cast<uint32_t>(pkt.frame.size()));
        put_u32le(out, static_cast<uint32_t>(pkt.frame.size()));
        out += pkt.frame;
    }
    return out;
}

}  // namespace toyaudit
