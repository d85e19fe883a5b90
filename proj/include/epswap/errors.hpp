#pragma once

#include <stdexcept>
#include <string>

namespace epswap {

// Error taxonomy shared by the library and the CLI exit-code mapping.
class Error : public std::runtime_error {
public:
    enum class Kind { validation, domain, data, coverage, no_solution };

    Error(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

    Kind kind() const noexcept { return kind_; }

    const char* kind_name() const noexcept {
        switch (kind_) {
            case Kind::validation: return "validation";
            case Kind::domain: return "domain";
            case Kind::data: return "data";
            case Kind::coverage: return "coverage";
            case Kind::no_solution: return "no-solution";
        }
        return "unknown";
    }

private:
    Kind kind_;
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& m) : Error(Kind::validation, m) {}
};

struct DomainError : Error {
    explicit DomainError(const std::string& m) : Error(Kind::domain, m) {}
};

struct DataError : Error {
    explicit DataError(const std::string& m) : Error(Kind::data, m) {}
};

struct CoverageError : Error {
    explicit CoverageError(const std::string& m) : Error(Kind::coverage, m) {}
};

struct NoSolutionError : Error {
    explicit NoSolutionError(const std::string& m) : Error(Kind::no_solution, m) {}
};

}  // namespace epswap
