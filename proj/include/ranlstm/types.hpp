#pragma once

#include <stdexcept>
#include <string>

namespace ranlstm {

/// Traffic regime attached to samples, windows, and orchestration decisions.
enum class Regime { Regular, Critical };

inline const char* to_string(Regime r) {
    return r == Regime::Critical ? "Critical" : "Regular";
}

inline Regime parse_regime(const std::string& s) {
    if (s == "Regular") return Regime::Regular;
    if (s == "Critical") return Regime::Critical;
    throw std::invalid_argument("unknown regime: " + s);
}

/// Invalid configuration (bad field values, unknown scenario keys, broken
/// cross-field constraints). The message names the offending field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Training aborted; the message names the epoch and batch.
class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ranlstm
