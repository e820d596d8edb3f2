// Copyright Contributors to the specsep project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace specsep {

/// Broad failure category. The command-line tool maps these onto exit codes.
enum class ErrorKind {
    InvalidArgument,
    Io,
    Geometry,
    Fit,
    Numerical,
    Internal,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), m_kind(kind)
    {
    }

    ErrorKind kind() const noexcept { return m_kind; }

private:
    ErrorKind m_kind;
};

/// Error raised inside a named pipeline stage (decompose, CLI commands).
class StageError : public Error {
public:
    StageError(std::string stage, ErrorKind kind, const std::string& message)
        : Error(kind, stage + ": " + message), m_stage(std::move(stage))
    {
    }

    const std::string& stage() const noexcept { return m_stage; }

private:
    std::string m_stage;
};

[[noreturn]] inline void
fail(ErrorKind kind, const std::string& message)
{
    throw Error(kind, message);
}

inline void
require(bool condition, const std::string& message)
{
    if (!condition)
        throw Error(ErrorKind::InvalidArgument, message);
}

}  // namespace specsep
