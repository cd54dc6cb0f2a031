#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>

#include <nlohmann/json.hpp>

#include "richstate/core/error.hpp"
#include "richstate/populations/population.hpp"

namespace richstate {

struct UniverseConfig {
    PopulationConfig population;
    OrgMap org;
    std::uint64_t seed = 0;
    std::string host = "127.0.0.1";
    int port = 8080;
    /// Holds universe_state.json. No persistence when empty.
    std::optional<std::filesystem::path> data_dir;
};

/// Reads a universe config file. Relative paths inside it resolve against
/// the file's directory. Keys: registry, population, personas (optional),
/// org, seed, host, port, data_dir.
UniverseConfig universe_config_from_file(const std::filesystem::path& path);

/// The test universe behind the HTTP API. Mutations are serialized through
/// one writer and published as immutable snapshots; reads never wait for a
/// running evolution.
class Universe {
public:
    /// Restores data_dir/universe_state.json when present, otherwise creates
    /// the population. Throws Error(configuration) unless the workflow is evolving.
    explicit Universe(UniverseConfig config);

    const UniverseConfig& config() const { return config_; }

    nlohmann::json status() const;
    /// Active members, optionally restricted to one pool.
    nlohmann::json users(std::optional<Pool> pool = {}) const;
    nlohmann::json session(const std::string& employee) const;
    /// Feed of the employee's active identity; requires the primary identity.
    nlohmann::json feed(const std::string& employee, std::size_t limit = 20) const;
    nlohmann::json threads(const std::string& employee) const;
    /// Feasible manual actions for the employee's primary.
    nlohmann::json alternatives(const std::string& employee) const;
    Generation generation() const;

    nlohmann::json claim(const std::string& user, const std::string& employee);
    nlohmann::json release(const std::string& user, const std::string& employee);
    /// Patch with feature_weights and/or interests; unspecified parts are kept.
    nlohmann::json update_persona(const std::string& user, const std::string& employee,
                                  const nlohmann::json& patch);
    nlohmann::json update_interests(const std::string& user, const std::string& employee,
                                    const nlohmann::json& body);
    nlohmann::json set_frozen(const std::string& user, const std::string& employee, bool frozen);
    nlohmann::json control(const std::string& bot, const std::string& employee);
    /// target is "personal" or "primary".
    nlohmann::json switch_profile(const std::string& employee, const std::string& target);
    /// Body {feature, target?, content?}. Runs with no faults live.
    nlohmann::json act(const std::string& employee, const nlohmann::json& request);
    nlohmann::json evolve();
    nlohmann::json maintain();

    /// Evolves every `period` until stop is requested.
    void auto_evolve(std::chrono::milliseconds period, std::stop_token stop);

    /// Writes data_dir/universe_state.json; no-op without a data dir.
    void persist() const;

private:
    struct State {
        Population population;
        /// employee -> active primary; absent means personal.
        std::map<std::string, UserId, std::less<>> sessions;
    };

    std::shared_ptr<const State> current() const;
    template <class F>
    nlohmann::json mutate(F&& change);
    void persist(const State& state) const;

    UniverseConfig config_;
    std::mutex write_mutex_;
    mutable std::mutex publish_mutex_;
    std::shared_ptr<const State> committed_;
};

/// Status code for an error raised by the universe.
int http_status(ErrorKind kind);

/// HTTP front end over a Universe. Requests that act for an employee carry
/// the X-Employee-Id header.
class UniverseServer {
public:
    explicit UniverseServer(Universe& universe);
    ~UniverseServer();
    UniverseServer(const UniverseServer&) = delete;
    UniverseServer& operator=(const UniverseServer&) = delete;

    /// Port 0 picks a free port. Returns the bound port; throws Error(io).
    int bind(const std::string& host, int port);
    /// Serves until stop(); bind() first.
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace richstate
