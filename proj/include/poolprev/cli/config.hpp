#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "poolprev/sim/harness.hpp"

namespace poolprev {

/// Simulation grid description, mirrored field-for-field by the JSON config
/// document. Conditions are the cross product of p_true x m x q x accuracy;
/// the pooled-test count is always total_tests - m.
struct GridConfig {
    std::vector<double> p_true;
    std::vector<long> m_values;
    long total_tests = 0;
    std::vector<long> q_values;
    std::vector<TestAccuracy> accuracy;
    PriorBeta prior;
    long trials = 100;
    std::uint64_t seed = 0;
};

namespace detail {

/// Converts a JSON number to the exact rational its shortest decimal form
/// denotes, so a config value of 0.95 means exactly 19/20.
inline Rational rational_from_json_number(const nlohmann::json& v) {
    return rational_from_decimal(format_shortest(v.get<double>()));
}

} // namespace detail

/// Parses and validates a grid config, reporting every offending field at
/// once.
inline GridConfig parse_grid_config(const nlohmann::json& doc) {
    std::vector<std::string> problems;
    auto complain = [&](const std::string& msg) { problems.push_back(msg); };

    GridConfig config;
    if (!doc.is_object()) {
        throw validation_error("grid config must be a JSON object");
    }

    auto require = [&](const char* key, nlohmann::json::value_t, auto parse) {
        if (!doc.contains(key)) {
            complain(std::string(key) + ": missing");
            return;
        }
        try {
            parse(doc.at(key));
        } catch (const std::exception& e) {
            complain(std::string(key) + ": " + e.what());
        }
    };

    require("p_true", nlohmann::json::value_t::array, [&](const nlohmann::json& v) {
        for (const auto& x : v) {
            double p = x.get<double>();
            if (!(p > 0.0 && p <= 1.0)) throw validation_error("values must lie in (0, 1]");
            config.p_true.push_back(p);
        }
        if (config.p_true.empty()) throw validation_error("list is empty");
    });
    require("m", nlohmann::json::value_t::array, [&](const nlohmann::json& v) {
        for (const auto& x : v) {
            long m = x.get<long>();
            if (m < 0) throw validation_error("values must be nonnegative");
            config.m_values.push_back(m);
        }
        if (config.m_values.empty()) throw validation_error("list is empty");
    });
    require("total_tests", nlohmann::json::value_t::number_integer, [&](const nlohmann::json& v) {
        config.total_tests = v.get<long>();
        if (config.total_tests < 0) throw validation_error("must be nonnegative");
    });
    require("q", nlohmann::json::value_t::array, [&](const nlohmann::json& v) {
        for (const auto& x : v) {
            long q = x.get<long>();
            if (q < 1) throw validation_error("values must be at least 1");
            config.q_values.push_back(q);
        }
        if (config.q_values.empty()) throw validation_error("list is empty");
    });
    require("accuracy", nlohmann::json::value_t::array, [&](const nlohmann::json& v) {
        for (const auto& x : v) {
            TestAccuracy acc{detail::rational_from_json_number(x.at("se")),
                             detail::rational_from_json_number(x.at("sp"))};
            acc.validate();
            config.accuracy.push_back(std::move(acc));
        }
        if (config.accuracy.empty()) throw validation_error("list is empty");
    });
    require("trials", nlohmann::json::value_t::number_integer, [&](const nlohmann::json& v) {
        config.trials = v.get<long>();
        if (config.trials < 1) throw validation_error("must be at least 1");
    });
    require("seed", nlohmann::json::value_t::number_unsigned, [&](const nlohmann::json& v) {
        config.seed = v.get<std::uint64_t>();
    });

    if (doc.contains("alpha")) {
        try {
            config.prior.alpha = detail::rational_from_json_number(doc.at("alpha"));
        } catch (const std::exception& e) {
            complain(std::string("alpha: ") + e.what());
        }
    }
    if (doc.contains("beta")) {
        try {
            config.prior.beta = detail::rational_from_json_number(doc.at("beta"));
        } catch (const std::exception& e) {
            complain(std::string("beta: ") + e.what());
        }
    }
    try {
        config.prior.validate();
    } catch (const std::exception& e) {
        complain(std::string("alpha/beta: ") + e.what());
    }

    if (problems.empty()) {
        for (long m : config.m_values) {
            if (m > config.total_tests) {
                complain("m: value " + std::to_string(m) + " exceeds total_tests (" +
                         std::to_string(config.total_tests) + "), derived n would be negative");
                break;
            }
        }
    }

    if (!problems.empty()) {
        std::string msg = "invalid grid config:";
        for (const auto& p : problems) msg += "\n  - " + p;
        throw validation_error(msg);
    }
    return config;
}

/// Cross product of the config lists, in (p_true, m, q, accuracy) order.
inline std::vector<SimCondition> expand_grid(const GridConfig& config) {
    std::vector<SimCondition> grid;
    for (double p : config.p_true) {
        for (long m : config.m_values) {
            for (long q : config.q_values) {
                for (const auto& acc : config.accuracy) {
                    SimCondition cond;
                    cond.p_true = p;
                    cond.design = Design{m, config.total_tests - m, q};
                    cond.acc = acc;
                    cond.prior = config.prior;
                    cond.trials = config.trials;
                    cond.seed = config.seed;
                    cond.id = make_condition_id(p, cond.design, acc, config.prior);
                    cond.validate();
                    grid.push_back(std::move(cond));
                }
            }
        }
    }
    return grid;
}

} // namespace poolprev
