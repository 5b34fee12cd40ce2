#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "toyaudit/device_profile.hpp"
#include "toyaudit/endpoint_stats.hpp"
#include "toyaudit/http_transaction.hpp"
#include "toyaudit/pcap.hpp"
#include "toyaudit/secret_scan.hpp"
#include "toyaudit/token_space.hpp"

namespace {

std::vector<toyaudit::HttpTransaction> sample_capture(int count) {
    std::vector<toyaudit::HttpTransaction> txns;
    for (int i = 0; i < count; ++i) {
        toyaudit::HttpTransaction t;
        t.ts_start = 1000.0 + i * 0.05;
        t.ts_end = t.ts_start + 0.01;
        t.src_ip = "10.0.0.2";
        t.src_port = 40000 + i;
        t.dst_ip = "192.0.2.10";
        t.host = "api-" + std::to_string(i % 7) + ".toymaker.test";
        t.dst_port = i % 3 == 0 ? 80 : 443;
        t.tls = t.dst_port == 443;
        t.method = i % 4 == 0 ? toyaudit::HttpMethod::Post : toyaudit::HttpMethod::Get;
        t.path = "/api/resource/" + std::to_string(i);
        t.req_headers = {{"Host", t.host}, {"Content-Type", "application/json"}};
        t.req_body = R"({"name":"kid","weight_kg":21.5,"seq":)" + std::to_string(i) + "}";
        t.status = 200;
        t.resp_headers = {{"Content-Type", "application/json"}};
        t.resp_body = R"({"ok":true})";
        toyaudit::finalize_transaction(t);
        txns.push_back(std::move(t));
    }
    return txns;
}

toyaudit::DeviceProfile bench_profile() {
    toyaudit::DeviceProfile profile;
    profile.device_name = "bench-toy";
    profile.first_party_hosts = {"*.toymaker.test"};
    return profile;
}

void BM_suffix_permutation_at(benchmark::State& state) {
    const toyaudit::TokenSpace space{"ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789", 3, 6};
    const toyaudit::SuffixPermutation perm(space, "KQ3", 42);
    std::uint64_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(perm.at(i));
        i = (i + 1) % perm.size();
    }
}
BENCHMARK(BM_suffix_permutation_at);

void BM_suffix_at(benchmark::State& state) {
    const toyaudit::TokenSpace space{"ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789", 3, 6};
    std::uint64_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(toyaudit::suffix_at(space, i));
        i = (i + 1) % toyaudit::suffix_universe(space);
    }
}
BENCHMARK(BM_suffix_at);

void BM_shannon_entropy(benchmark::State& state) {
    const std::string value(static_cast<std::size_t>(state.range(0)), 'x');
    std::string probe = value;
    for (std::size_t i = 0; i < probe.size(); ++i)
        probe[i] = static_cast<char>('A' + i % 23);
    for (auto _ : state) benchmark::DoNotOptimize(toyaudit::shannon_entropy(probe));
}
BENCHMARK(BM_shannon_entropy)->Arg(16)->Arg(64)->Arg(256);

void BM_pcap_round_trip(benchmark::State& state) {
    const auto txns = sample_capture(static_cast<int>(state.range(0)));
    const std::string bytes = toyaudit::write_pcap(txns);
    for (auto _ : state) {
        auto parsed = toyaudit::parse_pcap(bytes);
        benchmark::DoNotOptimize(parsed.transactions.size());
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(bytes.size()));
}
BENCHMARK(BM_pcap_round_trip)->Arg(32)->Arg(256);

void BM_endpoint_stats(benchmark::State& state) {
    const auto txns = sample_capture(static_cast<int>(state.range(0)));
    const auto profile = bench_profile();
    for (auto _ : state) {
        auto stats = toyaudit::endpoint_stats(txns, profile);
        benchmark::DoNotOptimize(stats.size());
    }
}
BENCHMARK(BM_endpoint_stats)->Arg(64)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
