#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace oraclegen {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad or missing configuration. Fatal; the CLI maps it to exit code 2 or 3.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Backend misconfiguration: missing credentials, rejected authentication,
/// unusable endpoint or playbook.
class BackendConfigError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Transport, timeout or process failure talking to a model backend. Retryable.
class BackendError : public Error {
public:
    using Error::Error;
};

/// Model output did not contain a usable assertion statement. Retryable.
class ExtractionError : public Error {
public:
    using Error::Error;
};

class TemplateError : public Error {
public:
    TemplateError(std::string slot, const std::string& what)
        : Error(what), slot_(std::move(slot)) {}

    const std::string& slot() const noexcept { return slot_; }

private:
    std::string slot_;
};

class PreprocessError : public Error {
public:
    using Error::Error;
};

class AssembleError : public Error {
public:
    using Error::Error;
};

/// The subject toolchain (compiler or runner) could not be launched at all.
class EnvironmentError : public Error {
public:
    using Error::Error;
};

class FocalNotFound : public Error {
public:
    using Error::Error;
};

/// Every retry of one generation attempt failed; carries each underlying message.
class AttemptFailed : public Error {
public:
    explicit AttemptFailed(std::vector<std::string> causes)
        : Error(join(causes)), causes_(std::move(causes)) {}

    const std::vector<std::string>& causes() const noexcept { return causes_; }

private:
    static std::string join(const std::vector<std::string>& causes) {
        std::string out = "all retries failed";
        for (const auto& c : causes) {
            out += "; ";
            out += c;
        }
        return out;
    }

    std::vector<std::string> causes_;
};

}  // namespace oraclegen
