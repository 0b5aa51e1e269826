#pragma once

#include <stdexcept>
#include <string>

namespace debate_audit {

/// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad input data: malformed corpora, impossible samples, mismatched runs.
class DataError : public Error {
public:
    using Error::Error;
};

/// Remote judge failures: missing credentials, exhausted retries, timeouts.
class RemoteError : public Error {
public:
    using Error::Error;
};

/// A report or fixture failed its self-consistency check.
class VerificationError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

}  // namespace debate_audit
