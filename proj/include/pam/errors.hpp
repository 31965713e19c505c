#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pam {

// Base of every domain error raised by the toolkit. The CLI maps these to
// exit code 1; anything else escaping a subcommand is a bug.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An error tied to a position in an input file.
class LocatedError : public Error {
public:
    LocatedError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// event_log
class MissingColumn : public Error { using Error::Error; };
class EmptyLog : public Error { using Error::Error; };
class MalformedRow : public LocatedError { using LocatedError::LocatedError; };
class IoError : public Error { using Error::Error; };

// windowing
class TraceTooShort : public Error { using Error::Error; };
class OverlappingBins : public Error { using Error::Error; };
class InvalidScheme : public Error { using Error::Error; };

// declare_templates
class UnsupportedParameter : public Error { using Error::Error; };
class ArityMismatch : public Error { using Error::Error; };
class UnknownTemplate : public Error { using Error::Error; };

// miner
class ProfileMismatch : public Error { using Error::Error; };

// tensor_store
class FormatError : public LocatedError { using LocatedError::LocatedError; };

// metrics
class NoPositives : public Error { using Error::Error; };
class DegenerateLabels : public Error { using Error::Error; };
class HeaderMismatch : public Error { using Error::Error; };
class MissingTrace : public Error { using Error::Error; };
class TargetMismatch : public Error { using Error::Error; };
class TooFewTraces : public Error { using Error::Error; };

// baselines
class SingleWindowTrace : public Error { using Error::Error; };
class EmptyTraining : public Error { using Error::Error; };

}  // namespace pam
