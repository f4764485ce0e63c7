#pragma once

#include <stdexcept>
#include <string>

namespace ppgof {

// All library errors derive from ppgof::error and carry a short machine
// readable kind string ("EmptyDataset", "NonFinite", ...) next to the
// human readable message. The CLI maps kind() into error JSON on stderr.
class error : public std::runtime_error {
public:
    error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct validation_error : error {
    explicit validation_error(const std::string& msg) : error("Validation", msg) {}
};

struct io_error : error {
    explicit io_error(const std::string& msg) : error("IO", msg) {}
};

struct empty_dataset_error : error {
    explicit empty_dataset_error(const std::string& msg) : error("EmptyDataset", msg) {}
};

struct non_convergence_error : error {
    explicit non_convergence_error(const std::string& msg) : error("NonConvergence", msg) {}
};

struct singular_fisher_error : error {
    explicit singular_fisher_error(const std::string& msg) : error("SingularFisher", msg) {}
};

struct non_finite_error : error {
    explicit non_finite_error(const std::string& msg) : error("NonFinite", msg) {}
};

struct invalid_epsilon_error : error {
    explicit invalid_epsilon_error(const std::string& msg) : error("InvalidEpsilon", msg) {}
};

struct model_mismatch_error : error {
    explicit model_mismatch_error(const std::string& msg) : error("ModelMismatch", msg) {}
};

struct missing_epsilon_error : error {
    explicit missing_epsilon_error(const std::string& msg) : error("MissingEpsilon", msg) {}
};

}  // namespace ppgof
