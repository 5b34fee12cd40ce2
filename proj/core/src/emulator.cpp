#include "toyaudit/emulator.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "toyaudit/atomic_file.hpp"
#include "toyaudit/errors.hpp"
#include "toyaudit/jsonl.hpp"
#include "toyaudit/pcap.hpp"

namespace toyaudit {

namespace {

using json = nlohmann::ordered_json;

constexpr double kBaseTs = 1700000000.0;  // recording start, fixed for determinism
constexpr const char* kDeviceIp = "192.168.1.23";
constexpr double kFirstPartyLatency = 0.04;
constexpr double kThirdPartyLatency = 0.08;

// Assigns each host one synthetic TCP connection (dst ip, src port) in
// first-contact order and finalizes every recorded transaction.
class SessionRecorder {
  public:
    void record(double offset, double latency, const std::string& host, bool tls,
                HttpMethod method, const std::string& path, HeaderList req_headers,
                std::string req_body, int status, HeaderList resp_headers,
                std::string resp_body) {
        HttpTransaction txn;
        txn.ts_start = kBaseTs + offset;
        txn.ts_end = txn.ts_start + latency;
        txn.src_ip = kDeviceIp;
        auto [it, fresh] = conns_.try_emplace(host, Conn{});
        if (fresh) {
            it->second.index = next_index_++;
            it->second.dst_ip = "198.51.100." + std::to_string(10 + it->second.index);
        }
        txn.src_port = 49152 + it->second.index;
        txn.dst_ip = it->second.dst_ip;
        txn.dst_port = tls ? 443 : 80;
        txn.host = host;
        txn.tls = tls;
        txn.method = method;
        txn.path = path;
        txn.req_headers = std::move(req_headers);
        txn.status = status;
        txn.resp_headers = std::move(resp_headers);
        txn.req_body = std::move(req_body);
        txn.resp_body = std::move(resp_body);
        finalize_transaction(txn);
        txns_.push_back(std::move(txn));
    }

    std::vector<HttpTransaction> take() {
        std::stable_sort(txns_.begin(), txns_.end(), [](const HttpTransaction& a,
                                                        const HttpTransaction& b) {
            return a.ts_start < b.ts_start;
        });
        return std::move(txns_);
    }

  private:
    struct Conn {
        int index{0};
        std::string dst_ip;
    };
    std::map<std::string, Conn> conns_;
    int next_index_{0};
    std::vector<HttpTransaction> txns_;
};

// Synthesized exchange (third-party hosts, firmware CDN): nothing on the
// network, we just write down what the device would have said.
void synth(SessionRecorder& rec, double offset, double latency, const std::string& host,
           bool tls, HttpMethod method, const std::string& path, const std::string& ua,
           const std::string& req_ct, std::string req_body, int status,
           const std::string& resp_ct, std::string resp_body) {
    HeaderList req_headers{{"User-Agent", ua}, {"Accept", "*/*"}};
    if (!req_body.empty()) req_headers.emplace_back("Content-Type", req_ct);
    HeaderList resp_headers;
    if (!resp_ct.empty()) resp_headers.emplace_back("Content-Type", resp_ct);
    rec.record(offset, latency, host, tls, method, path, std::move(req_headers),
               std::move(req_body), status, std::move(resp_headers), std::move(resp_body));
}

struct LiveReply {
    int status{0};
    std::string body;
    std::string content_type;
};

// Talks to the embedded testbed and fails loudly when the scenario's
// assumptions about it don't hold.
class LiveToyServer {
  public:
    explicit LiveToyServer(const std::string& url) : cli_(url.c_str()) {
        if (url.empty())
            throw ScenarioServerUnavailable("scenario needs a running testbed url");
        cli_.set_connection_timeout(3, 0);
        cli_.set_read_timeout(5, 0);
        auto res = cli_.Get("/health");
        if (!res) throw ScenarioServerUnavailable("no testbed reachable at " + url);
    }

    LiveReply get(const std::string& path, const httplib::Headers& headers = {}) {
        return wrap(cli_.Get(path.c_str(), headers), path);
    }

    LiveReply post(const std::string& path, const httplib::Headers& headers,
                   const std::string& body, const std::string& ct) {
        return wrap(cli_.Post(path.c_str(), headers, body, ct.c_str()), path);
    }

    LiveReply put(const std::string& path, const httplib::Headers& headers,
                  const std::string& body, const std::string& ct) {
        return wrap(cli_.Put(path.c_str(), headers, body, ct.c_str()), path);
    }

  private:
    LiveReply wrap(httplib::Result res, const std::string& path) {
        if (!res) throw ScenarioServerUnavailable("testbed dropped " + path);
        LiveReply reply;
        reply.status = res->status;
        reply.body = res->body;
        reply.content_type = res->get_header_value("Content-Type");
        return reply;
    }

    httplib::Client cli_;
};

void expect_status(const LiveReply& reply, int wanted, const std::string& what) {
    if (reply.status != wanted)
        throw ScenarioServerUnavailable("testbed returned " + std::to_string(reply.status) +
                                        " for " + what + ", scenario expected " +
                                        std::to_string(wanted));
}

HeaderList live_resp_headers(const LiveReply& reply) {
    HeaderList headers;
    if (!reply.content_type.empty()) headers.emplace_back("Content-Type", reply.content_type);
    return headers;
}

// ---- hydration tracker (and its hardened twin) ------------------------------

// Plain GA measurement-protocol ping; keys kept out of the PII dictionary.
std::string ga_body(const std::string& tid, const std::string& cid, const std::string& action) {
    return "v=1&tid=" + tid + "&cid=" + cid + "&t=event&ec=sync&ea=" + action;
}

void hydration_third_party(SessionRecorder& rec, const TestbedConfig& config,
                           const UserRecord& account) {
    synth(rec, 12.0, kThirdPartyLatency, "data.flurry.test", true, HttpMethod::Post, "/aap.do",
          "FlurrySDK/11.2", "application/json", json{{"session", "fl-3c2a"}, {"events", 12}}.dump(),
          200, "application/json", json{{"result", "ok"}}.dump());
    synth(rec, 13.0, kThirdPartyLatency, "ads.flurry.test", true, HttpMethod::Get,
          "/adspace/config", "FlurrySDK/11.2", "", "", 200, "application/json",
          json{{"fill", false}, {"refresh_s", 180}}.dump());
    synth(rec, 15.0, kThirdPartyLatency, "www.google-analytics.test", true, HttpMethod::Post,
          "/collect", "GA-SDK/3.1", "application/x-www-form-urlencoded",
          ga_body("UA-442211-7", "9f1d2e", "drink"), 200, "application/json",
          json{{"ok", true}}.dump());
    synth(rec, 16.0, kThirdPartyLatency, "stats.g.doubleclick.test", true, HttpMethod::Get,
          "/j/collect?t=dc&aip=1", "GA-SDK/3.1", "", "", 200, "application/json",
          json{{"ok", true}}.dump());
    synth(rec, 299.0, kThirdPartyLatency, "settings.crashlytics.test", true, HttpMethod::Get,
          "/spi/v2/platforms/android/settings", "Crashlytics/2.10", "", "", 200,
          "application/json", json{{"settings", {{"collect_reports", true}}}}.dump());

    json crash;
    if (config.toggles.pii_crash_reports) {
        // the whole point: the crash handler bundles the child's profile
        crash = json{{"name", account.name},
                     {"gender", account.gender},
                     {"birthday", account.birthday},
                     {"weight_kg", account.weight_kg},
                     {"error", "IndexOutOfBounds: BottleSync.kt:112"}};
    } else {
        crash = json{{"report_id", "cr-4471"},
                     {"error", "IndexOutOfBounds: BottleSync.kt:112"},
                     {"app_version", "2.1.4"}};
    }
    synth(rec, 300.0, kThirdPartyLatency, "reports.crashlytics.test", true, HttpMethod::Post,
          "/spi/v2/events", "Crashlytics/2.10", "application/json", crash.dump(), 202,
          "application/json", json{{"accepted", true}}.dump());

    synth(rec, 500.0, kThirdPartyLatency, "api.jpush.jiguang.test", true, HttpMethod::Post,
          "/v3/push/heartbeat", "JPush/3.5", "application/json",
          json{{"device", "hx-88"}, {"uptime", 600}}.dump(), 200, "application/json",
          json{{"ok", true}}.dump());
    synth(rec, 501.0, kThirdPartyLatency, "status.jiguang.test", true, HttpMethod::Get, "/status",
          "JPush/3.5", "", "", 200, "application/json", json{{"ok", true}}.dump());
}

std::vector<HttpTransaction> run_hydration_flow(const TestbedConfig& config,
                                                const std::string& target_url) {
    const bool cleartext = config.toggles.cleartext_first_party;
    const bool fp_tls = !cleartext;
    const std::string ua = "HydraTrack/2.1 (bottle-sync)";

    LiveToyServer server(target_url);
    SessionRecorder rec;

    // wake-up ping
    auto health = server.get("/health");
    expect_status(health, 200, "GET /health");
    rec.record(0.5, kFirstPartyLatency, "api.toymaker.test", fp_tls, HttpMethod::Get, "/health",
               {{"User-Agent", ua}, {"Accept", "application/json"}}, "", health.status,
               live_resp_headers(health), health.body);

    // firmware channel check, served from a CDN the testbed doesn't model
    synth(rec, 1.2, kFirstPartyLatency, "fw.toymaker.test", fp_tls, HttpMethod::Get,
          "/firmware/check?device=bottle&hw=3", ua, "", "", 200, "application/json",
          json{{"channel", "stable"}, {"version", "2.1.4"}}.dump());

    // account registration carries the full child profile
    UserRecord account;
    account.name = "Mia Park";
    account.gender = "female";
    account.birthday = "2017-03-14";
    account.weight_kg = 24.5;
    account.height_cm = 118.0;
    account.age_years = 8;
    const std::string account_body = json{{"name", account.name},
                                          {"gender", account.gender},
                                          {"birthday", account.birthday},
                                          {"weight_kg", account.weight_kg},
                                          {"height_cm", account.height_cm},
                                          {"age_years", account.age_years}}
                                         .dump();
    auto created = server.post("/api/account", {{"User-Agent", ua}}, account_body,
                               "application/json");
    expect_status(created, 200, "POST /api/account");
    rec.record(2.0, kFirstPartyLatency, "auth.toymaker.test", fp_tls, HttpMethod::Post,
               "/api/account", {{"User-Agent", ua}, {"Content-Type", "application/json"}},
               account_body, created.status, live_resp_headers(created), created.body);
    const json created_json = json::parse(created.body);
    const std::string user_id = created_json.at("user_id").get<std::string>();
    std::string auth_token = created_json.at("auth_token").get<std::string>();

    // profile photo upload; the server mints the token
    const std::string photo = make_photo_bytes("mia-photo-v1");
    auto uploaded = server.put("/api/photo/" + user_id, {{"X-Auth-Token", auth_token}}, photo,
                               "image/png");
    expect_status(uploaded, 200, "PUT /api/photo");
    rec.record(5.0, kFirstPartyLatency, "img.toymaker.test", fp_tls, HttpMethod::Put,
               "/api/photo/" + user_id,
               {{"User-Agent", ua},
                {"X-Auth-Token", auth_token},
                {"Content-Type", "image/png"}},
               photo, uploaded.status, live_resp_headers(uploaded), uploaded.body);
    // the token's prefix shows up twice: /api/photo/{prefix}/{full token}
    const std::string token = json::parse(uploaded.body).at("token").get<std::string>();
    const std::string photo_path =
        "/api/photo/" + token.substr(0, static_cast<std::size_t>(config.prefix_len)) + "/" + token;

    // photo fetch: with no_auth_photos on the companion app never sends a
    // credential; hardened builds do
    httplib::Headers fetch_live;
    HeaderList fetch_rec{{"User-Agent", ua}};
    if (!config.toggles.no_auth_photos) {
        fetch_live.emplace("X-Auth-Token", auth_token);
        fetch_rec.emplace_back("X-Auth-Token", auth_token);
    }
    auto fetched = server.get(photo_path, fetch_live);
    expect_status(fetched, 200, "GET " + photo_path);
    rec.record(8.0, kFirstPartyLatency, "img.toymaker.test", fp_tls, HttpMethod::Get, photo_path,
               std::move(fetch_rec), "", fetched.status, live_resp_headers(fetched),
               fetched.body);

    hydration_third_party(rec, config, account);

    // three sips ten minutes apart; vulnerable firmware reuses the
    // registration token forever, hardened firmware refreshes between sips
    const double drink_offsets[3] = {60.0, 360.0, 660.0};
    for (int i = 0; i < 3; ++i) {
        if (!config.toggles.token_reuse && i > 0) {
            const std::string refresh_body =
                json{{"user_id", user_id}, {"auth_token", auth_token}}.dump();
            auto refreshed = server.post("/api/token/refresh", {{"User-Agent", ua}},
                                         refresh_body, "application/json");
            expect_status(refreshed, 200, "POST /api/token/refresh");
            rec.record(drink_offsets[i] - 5.0, kFirstPartyLatency, "auth.toymaker.test", fp_tls,
                       HttpMethod::Post, "/api/token/refresh",
                       {{"User-Agent", ua}, {"Content-Type", "application/json"}}, refresh_body,
                       refreshed.status, live_resp_headers(refreshed), refreshed.body);
            auth_token = json::parse(refreshed.body).at("auth_token").get<std::string>();
        }
        const std::string drink_body = json{{"ml", 250}}.dump();
        auto drank = server.post("/api/drink", {{"User-Agent", ua}, {"X-Auth-Token", auth_token}},
                                 drink_body, "application/json");
        expect_status(drank, 200, "POST /api/drink");
        rec.record(drink_offsets[i], kFirstPartyLatency, "api.toymaker.test", fp_tls,
                   HttpMethod::Post, "/api/drink",
                   {{"User-Agent", ua},
                    {"X-Auth-Token", auth_token},
                    {"Content-Type", "application/json"}},
                   drink_body, drank.status, live_resp_headers(drank), drank.body);
    }

    return rec.take();
}

// ---- smart pet ---------------------------------------------------------------

// Content pack bytes as a hex blob: the hex alphabet can't spell any PII key,
// so the capture stays label-faithful.
std::string pack_blob() {
    std::string blob;
    blob.reserve(600);
    unsigned long long x = 0x5eedbeefULL;
    const char* digits = "0123456789ABCDEF";
    for (int i = 0; i < 600; ++i) {
        x = x * 6364136223846793005ULL + 1442695040888963407ULL;
        blob.push_back(digits[(x >> 33) & 0xf]);
    }
    return blob;
}

std::vector<HttpTransaction> run_smartpet_flow() {
    SessionRecorder rec;
    const std::string ua = "SmartPetApp/4.0";

    synth(rec, 1.0, kFirstPartyLatency, "api.smartpet.test", true, HttpMethod::Post,
          "/v1/pet/state", ua, "application/json",
          json{{"pet_id", "rex-0441"}, {"mood", "happy"}, {"battery", 84}}.dump(), 200,
          "application/json", json{{"ok", true}}.dump());
    synth(rec, 2.0, kFirstPartyLatency, "api.smartpet.test", true, HttpMethod::Get,
          "/v1/content/manifest", ua, "", "", 200, "application/json",
          json{{"packs", json::array({"stories-vol2"})}, {"refresh_hours", 24}}.dump());
    synth(rec, 4.0, kThirdPartyLatency, "cdn.toyassets.test", true, HttpMethod::Get,
          "/packs/stories-vol2.bin", ua, "", "", 200, "application/octet-stream", pack_blob());

    // the companion app pulls its kid-news widgets over plain HTTP
    synth(rec, 6.0, kThirdPartyLatency, "news.msn.test", false, HttpMethod::Get,
          "/feeds/kids-news.xml", ua, "", "", 200, "text/xml",
          "<?xml version=\"1.0\"?><rss><channel><title>Kids News Daily</title>"
          "<item><title>School garden grows a giant pumpkin</title>"
          "<pubDate>Tue, 05 Mar 2024</pubDate></item></channel></rss>");
    synth(rec, 7.0, kThirdPartyLatency, "rss.msn.test", false, HttpMethod::Get, "/rss/daily.xml",
          ua, "", "", 200, "text/xml",
          "<?xml version=\"1.0\"?><rss><channel><title>Daily Pet Facts</title>"
          "<item><title>Hamsters hoard food in their cheeks</title>"
          "<pubDate>Tue, 05 Mar 2024</pubDate></item></channel></rss>");

    synth(rec, 9.0, kThirdPartyLatency, "www.google-analytics.test", true, HttpMethod::Post,
          "/collect", "GA-SDK/3.1", "application/x-www-form-urlencoded",
          ga_body("UA-509310-2", "7c44aa", "pet_state"), 200, "application/json",
          json{{"ok", true}}.dump());
    synth(rec, 10.0, kThirdPartyLatency, "reports.crashlytics.test", true, HttpMethod::Post,
          "/spi/v2/events", "Crashlytics/2.10", "application/json",
          json{{"report_id", "cr-8812"},
               {"error", "IOException: PackDownloader.fetch timed out"},
               {"app_version", "4.0.2"}}
              .dump(),
          202, "application/json", json{{"accepted", true}}.dump());

    return rec.take();
}

// ---- fitness band -------------------------------------------------------------

std::vector<HttpTransaction> run_fitness_flow() {
    SessionRecorder rec;
    const std::string ua = "FitBand Sync/1.8";

    // Authorization rotates per request — nothing for the reuse detector
    rec.record(1.0, kFirstPartyLatency, "api.fitband.test", true, HttpMethod::Get, "/v2/goals",
               {{"User-Agent", ua}, {"Accept", "*/*"}, {"Authorization", "Bearer fb-9f31ac"}},
               "", 200, {{"Content-Type", "application/json"}},
               json{{"daily_steps", 10000}, {"active_minutes_goal", 60}}.dump());
    rec.record(3.0, kFirstPartyLatency, "api.fitband.test", true, HttpMethod::Post, "/v2/sync",
               {{"User-Agent", ua},
                {"Content-Type", "application/json"},
                {"Authorization", "Bearer fb-77d0b2"}},
               json{{"steps", 8421}, {"calories", 312}, {"distance_m", 6380}}.dump(), 200,
               {{"Content-Type", "application/json"}}, json{{"accepted", true}}.dump());
    rec.record(5.0, kFirstPartyLatency, "api.fitband.test", true, HttpMethod::Post, "/v2/sync",
               {{"User-Agent", ua},
                {"Content-Type", "application/json"},
                {"Authorization", "Bearer fb-4e19cd"}},
               json{{"steps", 203}, {"calories", 9}, {"distance_m", 150}}.dump(), 200,
               {{"Content-Type", "application/json"}}, json{{"accepted", true}}.dump());
    rec.record(7.0, kThirdPartyLatency, "www.google-analytics.test", true, HttpMethod::Post,
               "/collect",
               {{"User-Agent", "GA-SDK/3.1"},
                {"Content-Type", "application/x-www-form-urlencoded"}},
               ga_body("UA-881402-5", "e03b91", "step_sync"), 200,
               {{"Content-Type", "application/json"}}, json{{"ok", true}}.dump());
    rec.record(8.0, kThirdPartyLatency, "reports.crashlytics.test", true, HttpMethod::Get,
               "/spi/v2/platforms/android/settings", {{"User-Agent", "Crashlytics/2.10"}}, "",
               200, {{"Content-Type", "application/json"}},
               json{{"settings", {{"collect_reports", false}}}}.dump());

    return rec.take();
}

// ---- ground-truth labels -------------------------------------------------------

json label(const std::string& detector_id, const std::string& description,
           const std::string& hint) {
    return json{{"detector_id", detector_id}, {"description", description},
                {"evidence_hint", hint}};
}

json hydration_labels(const TestbedToggles& toggles) {
    json labels = json::array();
    if (toggles.cleartext_first_party) {
        labels.push_back(label("D_CLEARTEXT", "first-party toymaker hosts speak plain HTTP",
                               "hosts api/auth/img/fw.toymaker.test"));
        labels.push_back(label("D_PII_EXPOSURE",
                               "registration posts the child profile fields in the clear",
                               "POST auth.toymaker.test /api/account"));
        labels.push_back(label("D_PII_EXPOSURE", "profile photo bytes cross the wire unencrypted",
                               "PUT+GET img.toymaker.test /api/photo"));
    }
    if (toggles.token_reuse)
        labels.push_back(label("D_TOKEN_REUSE",
                               "every drink report reuses the registration auth token",
                               "POST api.toymaker.test /api/drink, 10 minutes apart"));
    if (toggles.no_auth_photos)
        labels.push_back(label("D_NO_AUTH", "photo GET succeeds with no session credential",
                               "GET img.toymaker.test /api/photo/{prefix}/{token}"));
    if (toggles.prefix_oracle)
        labels.push_back(label("D_ORACLE",
                               "truncated photo URLs answer differently for planted prefixes",
                               "GET /api/photo/{prefix} against the live testbed"));
    if (toggles.retain_old_photos)
        labels.push_back(label("D_STALE_RESOURCE",
                               "overwritten photos stay retrievable at the old URL",
                               "PUT /api/photo/{user_id}, then GET the pre-overwrite URL"));
    if (toggles.pii_crash_reports)
        labels.push_back(label("D_PII_THIRD_PARTY",
                               "crash report ships name/gender/birthday/weight off-device",
                               "POST reports.crashlytics.test /spi/v2/events"));
    return labels;
}

json smartpet_labels() {
    json labels = json::array();
    labels.push_back(label("D_CLEARTEXT", "news feed fetched over plain HTTP",
                           "GET news.msn.test /feeds/kids-news.xml"));
    labels.push_back(label("D_CLEARTEXT", "rss digest fetched over plain HTTP",
                           "GET rss.msn.test /rss/daily.xml"));
    labels.push_back(label("D_SECRET_CONSTANT",
                           "in-app purchase secret committed as a string constant",
                           "smartpet_src/PurchaseConstants.java:5"));
    labels.push_back(label("D_SECRET_CONSTANT",
                           "second pack-service secret sits right next to the first",
                           "smartpet_src/PurchaseConstants.java:6"));
    return labels;
}

// Decompiled-app fixture for the static scanner. Exactly two string constants
// here should trip it; everything else stays under the entropy bar.
void write_smartpet_fixture(const std::filesystem::path& dir) {
    write_file_atomic(dir / "PurchaseConstants.java",
                      "package com.smartpet.billing;\n"
                      "\n"
                      "// lifted from the companion app's billing module\n"
                      "public final class PurchaseConstants {\n"
                      "    public static final String NOOK_ALLPACK_SERVICE_INAPP_SECRET = "
                      "\"Xq7PjW2mKd9RtC4vBn8LzF5sYh3GwA6e\";\n"
                      "    public static final String NOOK_PACK_SERVICE_INAPP_SECRET = "
                      "\"Tr5NkM8cQw2XvJ6pZd4BgL9fSy7HuE3a\";\n"
                      "    public static final int PACK_PRICE_TIER = 3;\n"
                      "    public static final boolean BILLING_ENABLED = true;\n"
                      "}\n");
    write_file_atomic(dir / "AppInfo.java",
                      "package com.smartpet.app;\n"
                      "\n"
                      "public final class AppInfo {\n"
                      "    public static final String LOG_TAG = \"SmartPet\";\n"
                      "    public static final String VERSION_NAME = \"4.0.2\";\n"
                      "    public static final int VERSION_CODE = 4002;\n"
                      "}\n");
}

}  // namespace

Scenario scenario_from_name(const std::string& name) {
    if (name == "hydration") return Scenario::Hydration;
    if (name == "smartpet") return Scenario::Smartpet;
    if (name == "fitness") return Scenario::Fitness;
    if (name == "hardened") return Scenario::Hardened;
    throw InvalidParameter("unknown scenario: " + name);
}

std::string scenario_name(Scenario scenario) {
    switch (scenario) {
        case Scenario::Hydration: return "hydration";
        case Scenario::Smartpet: return "smartpet";
        case Scenario::Fitness: return "fitness";
        case Scenario::Hardened: return "hardened";
    }
    throw InvalidParameter("unknown scenario enum value");
}

TestbedConfig scenario_testbed_config(Scenario scenario) {
    TestbedConfig config;
    config.listen_address = "127.0.0.1:0";
    if (scenario == Scenario::Hydration || scenario == Scenario::Hardened) {
        UserRecord planted;
        planted.user_id = "hydra-kid-1";
        planted.name = "Planted Kid";
        planted.gender = "female";
        planted.birthday = "2016-11-02";
        planted.weight_kg = 22.0;
        planted.height_cm = 112.0;
        planted.age_years = 9;
        planted.photo_token = "KQ3FC0Z1MVXB";
        planted.photo_bytes = make_photo_bytes("hydra-kid-1");
        planted.auth_token = "tb-planted-0001";
        config.planted_users.push_back(std::move(planted));
    }
    if (scenario == Scenario::Hydration) config.toggles = all_toggles_on();
    return config;
}

DeviceProfile scenario_profile(Scenario scenario) {
    DeviceProfile profile;
    switch (scenario) {
        case Scenario::Hydration:
        case Scenario::Hardened:
            profile.device_name =
                scenario == Scenario::Hydration ? "hydration-bottle" : "hydration-bottle-hardened";
            profile.first_party_hosts = {"*.toymaker.test"};
            profile.third_party_hosts = {{"*.flurry.test", "flurry-analytics"},
                                         {"*.crashlytics.test", "crashlytics"},
                                         {"*.google-analytics.test", "google-analytics"},
                                         {"*.doubleclick.test", "doubleclick-ads"},
                                         {"*.jiguang.test", "jpush"}};
            break;
        case Scenario::Smartpet:
            profile.device_name = "smart-pet";
            profile.first_party_hosts = {"*.smartpet.test"};
            profile.third_party_hosts = {{"*.google-analytics.test", "google-analytics"},
                                         {"*.crashlytics.test", "crashlytics"},
                                         {"*.toyassets.test", "asset-cdn"},
                                         {"*.msn.test", "news-feeds"}};
            break;
        case Scenario::Fitness:
            profile.device_name = "fitness-band";
            profile.first_party_hosts = {"*.fitband.test"};
            profile.third_party_hosts = {{"*.google-analytics.test", "google-analytics"},
                                         {"*.crashlytics.test", "crashlytics"}};
            break;
    }
    return profile;
}

EmulationResult emulate_toy_session(Scenario scenario, const TestbedConfig& config,
                                    const std::filesystem::path& out_dir,
                                    const std::string& target_url) {
    EmulationResult result;
    result.profile = scenario_profile(scenario);

    json labels = json::array();
    switch (scenario) {
        case Scenario::Hydration:
        case Scenario::Hardened:
            result.txns = run_hydration_flow(config, target_url);
            labels = hydration_labels(config.toggles);
            break;
        case Scenario::Smartpet: {
            result.txns = run_smartpet_flow();
            labels = smartpet_labels();
            result.source_fixture = out_dir / "smartpet_src";
            write_smartpet_fixture(result.source_fixture);
            break;
        }
        case Scenario::Fitness:
            result.txns = run_fitness_flow();
            break;
    }

    result.jsonl_path = out_dir / "capture.jsonl";
    result.pcap_path = out_dir / "capture.pcap";
    result.labels_path = out_dir / "labels.json";
    result.profile_path = out_dir / "profile.json";
    write_file_atomic(result.jsonl_path, write_transaction_log(result.txns));
    write_file_atomic(result.pcap_path, write_pcap(result.txns));
    write_file_atomic(result.labels_path, labels.dump(2) + "\n");
    write_file_atomic(result.profile_path, serialize_device_profile(result.profile) + "\n");
    return result;
}

}  // namespace toyaudit
