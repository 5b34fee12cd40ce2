#include <atomic>
#include <chrono>
#include <cstdio>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "toyaudit/errors.hpp"
#include "toyaudit/miner.hpp"

namespace toyaudit {

namespace {

std::string fill_one(const std::string& tpl, const std::string& value) {
    const std::size_t pos = tpl.find("{}");
    if (pos == std::string::npos) throw InvalidParameter("path template needs a {} placeholder");
    return tpl.substr(0, pos) + value + tpl.substr(pos + 2);
}

void require_loopback(const MinerConfig& config) {
    if (config.allow_non_loopback) return;
    std::string host = config.target;
    const std::size_t scheme = host.find("://");
    if (scheme != std::string::npos) host = host.substr(scheme + 3);
    const std::size_t slash = host.find('/');
    if (slash != std::string::npos) host = host.substr(0, slash);
    const std::size_t colon = host.rfind(':');
    if (colon != std::string::npos && host.find(']') == std::string::npos)
        host = host.substr(0, colon);
    if (host == "localhost" || host == "::1" || host == "[::1]" || host.rfind("127.", 0) == 0)
        return;
    throw NonLoopbackTarget("refusing to probe non-loopback target " + host +
                            " without --i-own-this-target");
}

// one shared pace for every worker thread
class RateLimiter {
  public:
    explicit RateLimiter(int delay_ms) : delay_(delay_ms) {}

    void wait() {
        if (delay_.count() <= 0) return;
        std::chrono::steady_clock::time_point wake;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            const auto now = std::chrono::steady_clock::now();
            next_ = std::max(next_, now);
            wake = next_;
            next_ += delay_;
        }
        std::this_thread::sleep_until(wake);
    }

  private:
    std::chrono::milliseconds delay_;
    std::mutex mutex_;
    std::chrono::steady_clock::time_point next_{};
};

}  // namespace

std::uint64_t planned_prefix_probes(const MinerConfig& config) {
    validate_token_space(config.space);
    return prefix_universe(config.space);
}

std::set<std::string> sweep_prefixes(const MinerConfig& config, std::uint64_t* probes_out) {
    validate_token_space(config.space);
    require_loopback(config);

    httplib::Client client(config.target);
    client.set_connection_timeout(config.timeout_s, 0);
    client.set_read_timeout(config.timeout_s, 0);
    RateLimiter limiter(config.request_delay_ms);

    std::set<std::string> valid;
    std::uint64_t probes = 0;
    const std::uint64_t universe = prefix_universe(config.space);
    for (std::uint64_t i = 0; i < universe; ++i) {
        const std::string prefix = prefix_at(config.space, i);
        limiter.wait();
        auto res = client.Get(fill_one(config.prefix_path_template, prefix));
        if (!res) throw TargetUnreachable("no response from " + config.target);
        ++probes;
        if (res->status == config.oracle_valid_status) {
            valid.insert(prefix);
        } else if (res->status != config.oracle_invalid_status) {
            throw OracleAmbiguous("prefix " + prefix + " answered with unexpected status " +
                                  std::to_string(res->status));
        }
    }
    if (probes_out != nullptr) *probes_out = probes;
    return valid;
}

MiningResult mine_suffixes(const MinerConfig& config, const std::set<std::string>& prefixes) {
    validate_token_space(config.space);
    require_loopback(config);
    if (config.workers < 1) throw InvalidParameter("workers must be >= 1");
    if (config.target_fraction <= 0.0 || config.target_fraction > 1.0)
        throw InvalidParameter("target_fraction must be in (0, 1]");
    const bool fraction_mode = config.target_fraction < 1.0;
    if (fraction_mode && config.known_planted_count == 0)
        throw InvalidParameter("fraction mode needs the planted token count (testbed use only)");
    if (!config.unlimited_budget && config.suffix_budget < 1)
        throw InvalidParameter("suffix_budget must be >= 1 when bounded");

    MiningResult result;
    result.valid_prefixes = prefixes;

    RateLimiter limiter(config.request_delay_ms);
    std::mutex result_mutex;
    std::atomic<bool> stop{false};
    std::atomic<bool> budget_hit{false};
    std::atomic<std::uint64_t> suffix_probes{0};
    std::atomic<std::size_t> recovered_count{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto fraction_reached = [&]() {
        return fraction_mode &&
               static_cast<double>(recovered_count.load()) >=
                   config.target_fraction * static_cast<double>(config.known_planted_count);
    };

    for (const auto& prefix : prefixes) {
        if (stop.load() || fraction_reached()) break;
        std::atomic<std::uint64_t> prefix_budget_left{
            config.unlimited_budget ? std::numeric_limits<std::uint64_t>::max()
                                    : config.suffix_budget};

        auto worker_fn = [&](int worker) {
            try {
                httplib::Client client(config.target);
                client.set_connection_timeout(config.timeout_s, 0);
                client.set_read_timeout(config.timeout_s, 0);
                SuffixStream stream(config.space, prefix, config.seed, worker, config.workers);
                std::string suffix;
                while (!stop.load() && stream.next(suffix)) {
                    // claim one probe from the per-prefix budget
                    std::uint64_t left = prefix_budget_left.load();
                    do {
                        if (left == 0) {
                            budget_hit.store(true);
                            return;
                        }
                    } while (!prefix_budget_left.compare_exchange_weak(left, left - 1));

                    limiter.wait();
                    if (stop.load()) return;
                    const std::string token = prefix + suffix;
                    std::string path = fill_one(config.token_path_template, prefix);
                    path = fill_one(path, token);
                    auto res = client.Get(path);
                    if (!res) throw TargetUnreachable("no response from " + config.target);
                    suffix_probes.fetch_add(1);
                    if (res->status == 200) {
                        std::lock_guard<std::mutex> lock(result_mutex);
                        if (result.recovered_tokens.insert(token).second)
                            recovered_count.fetch_add(1);
                    }
                    if (fraction_reached()) {
                        stop.store(true);
                        return;
                    }
                }
            } catch (...) {
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
                stop.store(true);
            }
        };

        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(config.workers));
        for (int w = 0; w < config.workers; ++w) threads.emplace_back(worker_fn, w);
        for (auto& t : threads) t.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    result.suffix_probes = suffix_probes.load();
    result.probes_sent = result.prefix_probes + result.suffix_probes;
    if (fraction_mode && fraction_reached())
        result.completion = "fraction_reached";
    else if (budget_hit.load())
        result.completion = "budget_exhausted";
    else
        result.completion = "complete";
    return result;
}

MiningResult run_miner(const MinerConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    std::uint64_t prefix_probes = 0;
    const std::set<std::string> prefixes = sweep_prefixes(config, &prefix_probes);

    MiningResult result;
    if (prefixes.empty()) {
        result.valid_prefixes = prefixes;
        result.completion = "complete";
    } else {
        result = mine_suffixes(config, prefixes);
    }
    result.prefix_probes = prefix_probes;
    result.probes_sent = result.prefix_probes + result.suffix_probes;
    result.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

std::string mining_result_to_json(const MiningResult& result) {
    nlohmann::ordered_json doc;
    doc["valid_prefixes"] = result.valid_prefixes;
    doc["recovered_tokens"] = result.recovered_tokens;
    doc["probes_sent"] = result.probes_sent;
    doc["prefix_probes"] = result.prefix_probes;
    doc["suffix_probes"] = result.suffix_probes;
    doc["elapsed_seconds"] = result.elapsed_seconds;
    doc["completion"] = result.completion;
    return doc.dump(2) + "\n";
}

RuntimeEstimate estimate_runtime(std::uint64_t probes, double rtt_seconds, int workers,
                                 double fraction) {
    if (rtt_seconds <= 0.0) throw InvalidParameter("rtt must be positive");
    if (workers < 1) throw InvalidParameter("workers must be >= 1");
    if (fraction <= 0.0 || fraction > 1.0) throw InvalidParameter("fraction must be in (0, 1]");

    RuntimeEstimate est;
    est.seconds = static_cast<double>(probes) * fraction * rtt_seconds /
                  static_cast<double>(workers);

    char buf[64];
    const double sec = est.seconds;
    if (sec < 120.0) {
        std::snprintf(buf, sizeof(buf), "%.1f s", sec);
    } else if (sec / 60.0 < 120.0) {
        std::snprintf(buf, sizeof(buf), "%.1f min", sec / 60.0);
    } else if (sec / 3600.0 < 48.0) {
        std::snprintf(buf, sizeof(buf), "%.1f h", sec / 3600.0);
    } else if (sec / 86400.0 < 730.0) {
        std::snprintf(buf, sizeof(buf), "%.1f days", sec / 86400.0);
    } else {
        std::snprintf(buf, sizeof(buf), "%.1f years", sec / (365.25 * 86400.0));
    }
    est.human = buf;
    return est;
}

}  // namespace toyaudit
