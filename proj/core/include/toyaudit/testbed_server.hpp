#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "toyaudit/testbed.hpp"

namespace toyaudit {

// The mock first-party server. Endpoint behavior follows the config toggles;
// with everything off it acts like a vendor that did their homework.
class TestbedServer {
  public:
    explicit TestbedServer(TestbedConfig config);
    ~TestbedServer();
    TestbedServer(const TestbedServer&) = delete;
    TestbedServer& operator=(const TestbedServer&) = delete;

    void start();  // binds and serves on a background thread; AddressInUse on failure
    void stop();

    int port() const;
    std::string base_url() const;  // http://host:port
    std::uint64_t request_count() const;
    const TestbedConfig& config() const;

    // Same store mutation PUT /api/photo/{user_id} performs; returns the new
    // token. Throws UnknownUser.
    std::string overwrite_photo(const std::string& user_id, const std::string& new_photo);

    // Current full-token URL path for a user's photo ("" when none).
    std::string photo_url(const std::string& user_id) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace toyaudit
