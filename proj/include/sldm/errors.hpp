#ifndef SLDM_ERRORS_HPP
#define SLDM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sldm {

// Every thrown error carries a stable machine-readable code; the CLI turns
// these into JSON on stderr.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& m) : Error("domain_error", m) {}
};
struct ShapeMismatch : Error {
    explicit ShapeMismatch(const std::string& m) : Error("shape_mismatch", m) {}
};
struct NonFiniteValue : Error {
    explicit NonFiniteValue(const std::string& m) : Error("non_finite_value", m) {}
};
struct CapacityExceeded : Error {
    explicit CapacityExceeded(const std::string& m) : Error("capacity_exceeded", m) {}
};
struct EmptyCorpus : Error {
    explicit EmptyCorpus(const std::string& m) : Error("empty_corpus", m) {}
};
struct EmptyInput : Error {
    explicit EmptyInput(const std::string& m) : Error("empty_input", m) {}
};
struct EmptyPattern : Error {
    explicit EmptyPattern(const std::string& m) : Error("empty_pattern", m) {}
};
struct UnknownPanelName : Error {
    explicit UnknownPanelName(const std::string& m) : Error("unknown_panel_name", m) {}
};
struct InvalidQuaternion : Error {
    explicit InvalidQuaternion(const std::string& m) : Error("invalid_quaternion", m) {}
};
struct GridViolation : Error {
    explicit GridViolation(const std::string& m) : Error("grid_violation", m) {}
};
struct IoError : Error {
    explicit IoError(const std::string& m) : Error("io_error", m) {}
};
struct MissingStage1 : Error {
    explicit MissingStage1(const std::string& m) : Error("missing_stage1", m) {}
};
struct InvalidCheckpoint : Error {
    explicit InvalidCheckpoint(const std::string& m) : Error("invalid_checkpoint", m) {}
};
struct MissingCheckpoint : Error {
    explicit MissingCheckpoint(const std::string& m) : Error("missing_checkpoint", m) {}
};
struct InfeasibleParams : Error {
    explicit InfeasibleParams(const std::string& m) : Error("infeasible_params", m) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& m) : Error("config_error", m) {}
};

}  // namespace sldm

#endif
