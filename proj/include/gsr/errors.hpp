#pragma once

#include <stdexcept>
#include <string>

namespace gsr {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad user input: empty or non-positive group sizes, invalid (r,q), bad
/// generation parameters, malformed config files.
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

/// Vector/matrix dimensions inconsistent with the partition or design.
class DimensionMismatch : public Error {
public:
    explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

/// A group submatrix failed the full-column-rank requirement.
class RankDeficientGroup : public Error {
public:
    RankDeficientGroup(long group, const std::string& msg)
        : Error(msg), group_(group) {}
    long group() const { return group_; }

private:
    long group_;
};

/// Least squares on the current active set is not solvable: either the
/// stacked active columns exceed the row count or the normal matrix is
/// singular. Path drivers treat this as a termination signal.
class IllPosedActiveSet : public Error {
public:
    explicit IllPosedActiveSet(const std::string& msg) : Error(msg) {}
};

/// Guard against combinatorial blow-up in exhaustive enumeration.
class EnumerationLimit : public Error {
public:
    explicit EnumerationLimit(const std::string& msg) : Error(msg) {}
};

/// File could not be read/parsed or written.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace gsr
