#pragma once

#include <stdexcept>
#include <string>

namespace predtown {

// Error categories map 1:1 onto the CLI exit codes (see exit_code()).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class StageError : public std::runtime_error {
public:
    StageError(const std::string& stage, const std::string& msg)
        : std::runtime_error("stage '" + stage + "' failed: " + msg), stage_(stage) {}

    const std::string& stage() const { return stage_; }

private:
    std::string stage_;
};

inline int exit_code(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 2;
    if (dynamic_cast<const DataError*>(&e)) return 3;
    if (dynamic_cast<const StageError*>(&e)) return 4;
    return 4;
}

} // namespace predtown
