#pragma once

#include <stdexcept>
#include <string>

namespace voxelforest {

// Exit-code mapping used by the CLI: UsageError -> 1, DataError -> 2,
// InternalError -> 3. Anything escaping those is also treated as 3.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input data or a violated file/contract invariant.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A broken internal invariant; indicates a bug, not bad input.
class InternalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class IoErrorKind {
    BadMagic,
    BadHeader,
    UnknownDtype,
    Truncated,
    NonFinite,
    DimsMismatch,
    CountMismatch,
    MissingFile,
    VersionMismatch,
    BadStructure,
    BadLayout,
};

// File-format failure with a machine-checkable kind; the message names the
// offending field or file.
class FileFormatError : public DataError {
public:
    FileFormatError(IoErrorKind kind, const std::string& what)
        : DataError(what), kind_(kind) {}

    IoErrorKind kind() const { return kind_; }

private:
    IoErrorKind kind_;
};

}  // namespace voxelforest
